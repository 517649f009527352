//! Exhaustive constrained isomorphism and automorphism search.
//!
//! Vertices of the first graph are placed in a connectivity-first order and
//! matched one at a time against vertices of the second graph with the same
//! color (degree and tomography digest by default), subject to forced and
//! forbidden pairs and to adjacency agreement with every vertex placed so
//! far. The search is complete: `None` means no isomorphism exists.

mod enumerate;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constraint::{index_of, Constraint};
use crate::error::{BudgetExceeded, OracleError};
use crate::graph::Graph;
use crate::tomography::tomography_digests;

pub use enumerate::{all_labeled_graphs, corpus_up_to, dedup_corpus, enumerate_nonisomorphic};

/// Environment variable overriding the default node budget.
pub const BUDGET_ENV: &str = "COLLAPSE_ISO_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_millis: Option<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 50_000_000,
            max_millis: None,
        }
    }
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            max_millis: None,
        }
    }

    /// Default budget, with the node cap taken from `COLLAPSE_ISO_BUDGET`
    /// when that holds an integer.
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(n) = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            b.max_nodes = n;
        }
        b
    }
}

/// Counts search nodes and enforces a [`SearchBudget`].
#[derive(Debug)]
pub(crate) struct Meter {
    budget: SearchBudget,
    nodes: u64,
    start: Instant,
}

impl Meter {
    pub(crate) fn new(budget: SearchBudget) -> Self {
        Meter {
            budget,
            nodes: 0,
            start: Instant::now(),
        }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(BudgetExceeded::Nodes(self.budget.max_nodes));
        }
        if let Some(ms) = self.budget.max_millis {
            if self.nodes % 1024 == 0 && self.start.elapsed().as_millis() as u64 > ms {
                return Err(BudgetExceeded::Time(ms));
            }
        }
        Ok(())
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes
    }
}

/// Dense adjacency bit rows.
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(g: &Graph) -> Self {
        let words = g.n().div_ceil(64).max(1);
        let mut bits = vec![0u64; words * g.n()];
        for u in 0..g.n() {
            for &v in g.neighbors(u) {
                bits[u * words + v / 64] |= 1 << (v % 64);
            }
        }
        BitRows { words, bits }
    }

    #[inline]
    fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }
}

/// Degree plus unlabeled tomography digest, as a single integer color.
pub fn default_colors(g: &Graph) -> Vec<u64> {
    tomography_digests(g, None)
        .into_iter()
        .enumerate()
        .map(|(v, d)| d.prefix_u64() ^ (g.neighbors(v).len() as u64).rotate_left(48))
        .collect()
}

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    g_bits: BitRows,
    h_bits: BitRows,
    cg: &'a [u64],
    ch: &'a [u64],
    constraint: &'a Constraint,
    order: Vec<usize>,
    /// For each position, an earlier-placed neighbor (if any) to draw candidates from.
    anchor: Vec<Option<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
    meter: Meter,
}

impl<'a> Search<'a> {
    fn new(
        g: &'a Graph,
        h: &'a Graph,
        cg: &'a [u64],
        ch: &'a [u64],
        constraint: &'a Constraint,
        budget: SearchBudget,
    ) -> Self {
        let order = placement_order(g, cg, constraint);
        let mut pos = vec![usize::MAX; g.n()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let anchor = order
            .iter()
            .enumerate()
            .map(|(i, &v)| g.neighbors(v).iter().copied().filter(|&u| pos[u] < i).min_by_key(|&u| h.n() + pos[u]))
            .collect();
        Search {
            g,
            h,
            g_bits: BitRows::new(g),
            h_bits: BitRows::new(h),
            cg,
            ch,
            constraint,
            order,
            anchor,
            map: vec![usize::MAX; g.n()],
            used: vec![false; h.n()],
            meter: Meter::new(budget),
        }
    }

    fn consistent(&self, pos: usize, v: usize, w: usize) -> bool {
        if self.used[w] || self.cg[v] != self.ch[w] || !self.constraint.allows(v, w) {
            return false;
        }
        if self.g.neighbors(v).len() != self.h.neighbors(w).len() {
            return false;
        }
        self.order[..pos]
            .iter()
            .all(|&u| self.g_bits.get(v, u) == self.h_bits.get(w, self.map[u]))
    }

    /// Depth-first extension. `visit` returns `false` to stop the search.
    fn extend(&mut self, pos: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<bool, BudgetExceeded> {
        if pos == self.order.len() {
            return Ok(visit(&self.map));
        }
        self.meter.tick()?;
        let v = self.order[pos];
        let candidates: Vec<usize> = if let Some(w) = self.constraint.image_of(v) {
            vec![w]
        } else if let Some(u) = self.anchor[pos] {
            self.h.neighbors(self.map[u]).to_vec()
        } else {
            (0..self.h.n()).collect()
        };
        for w in candidates {
            if !self.consistent(pos, v, w) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            let go_on = self.extend(pos + 1, visit)?;
            self.used[w] = false;
            self.map[v] = usize::MAX;
            if !go_on {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Forced vertices first, then repeatedly the vertex with the most placed
/// neighbors (ties: smaller color class, then smaller id).
fn placement_order(g: &Graph, colors: &[u64], constraint: &Constraint) -> Vec<usize> {
    let n = g.n();
    let mut class_size = std::collections::HashMap::new();
    for &c in colors {
        *class_size.entry(c).or_insert(0usize) += 1;
    }
    let mut placed = vec![false; n];
    let mut placed_nbrs = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let place = |v: usize, placed: &mut Vec<bool>, placed_nbrs: &mut Vec<usize>, order: &mut Vec<usize>| {
        placed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            placed_nbrs[w] += 1;
        }
    };
    for &(a, _) in constraint.forced() {
        if a < n && !placed[a] {
            place(a, &mut placed, &mut placed_nbrs, &mut order);
        }
    }
    while order.len() < n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                placed_nbrs[a]
                    .cmp(&placed_nbrs[b])
                    .then(class_size[&colors[b]].cmp(&class_size[&colors[a]]))
                    .then(g.neighbors(a).len().cmp(&g.neighbors(b).len()))
                    .then(b.cmp(&a))
            })
            .unwrap();
        place(v, &mut placed, &mut placed_nbrs, &mut order);
    }
    order
}

fn sorted(c: &[u64]) -> Vec<u64> {
    let mut v = c.to_vec();
    v.sort_unstable();
    v
}

/// Exhaustive constrained isomorphism search with caller-supplied colors;
/// a returned mapping sends color classes to equal color classes.
pub fn oracle_iso_colored(
    g: &Graph,
    h: &Graph,
    cg: &[u64],
    ch: &[u64],
    constraint: &Constraint,
    budget: SearchBudget,
) -> Result<Option<Vec<usize>>, OracleError> {
    constraint.check_against(g, h)?;
    if g.n() != h.n() || g.edge_count() != h.edge_count() || sorted(cg) != sorted(ch) {
        return Ok(None);
    }
    let mut search = Search::new(g, h, cg, ch, constraint, budget);
    let mut found = None;
    search.extend(0, &mut |m| {
        found = Some(m.to_vec());
        false
    })?;
    Ok(found)
}

/// Exhaustive search for an isomorphism `g -> h` honoring `constraint`.
pub fn oracle_iso(g: &Graph, h: &Graph, constraint: &Constraint, budget: SearchBudget) -> Result<Option<Vec<usize>>, OracleError> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        constraint.check_against(g, h)?;
        return Ok(None);
    }
    oracle_iso_colored(g, h, &default_colors(g), &default_colors(h), constraint, budget)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphisms {
    /// Total including the identity.
    pub count: u64,
    /// Up to the requested number of automorphisms, in search order.
    pub listed: Vec<Vec<usize>>,
}

impl Automorphisms {
    pub fn nontrivial(&self) -> u64 {
        self.count - 1
    }
}

/// Counts every automorphism honoring `constraint`, keeping the first `keep`.
pub fn oracle_automorphisms(
    g: &Graph,
    constraint: &Constraint,
    keep: usize,
    budget: SearchBudget,
) -> Result<Automorphisms, OracleError> {
    constraint.check_against(g, g)?;
    let colors = default_colors(g);
    let mut search = Search::new(g, g, &colors, &colors, constraint, budget);
    let mut count = 0u64;
    let mut listed = Vec::new();
    search.extend(0, &mut |m| {
        count += 1;
        if listed.len() < keep {
            listed.push(m.to_vec());
        }
        true
    })?;
    Ok(Automorphisms { count, listed })
}

/// Isomorphism between the parts of `g` and `h` reachable from the nails,
/// with `g_nails[i]` forced onto `h_nails[i]`. The mapping is returned as
/// `(g vertex, h vertex)` pairs in parent ids.
pub fn oracle_nailed_iso(
    g: &Graph,
    g_nails: &[usize],
    h: &Graph,
    h_nails: &[usize],
    budget: SearchBudget,
) -> Result<Option<Vec<(usize, usize)>>, OracleError> {
    let forced: Vec<(usize, usize)> = g_nails.iter().copied().zip(h_nails.iter().copied()).collect();
    let full = Constraint::new(forced, vec![])?;
    full.check_against(g, h)?;
    let (gs, gt) = g.induced_subgraph(&g.reachable_from(g_nails));
    let (hs, ht) = h.induced_subgraph(&h.reachable_from(h_nails));
    let c = full.restrict(&index_of(&gt, g.n()), &index_of(&ht, h.n()));
    Ok(oracle_iso(&gs, &hs, &c, budget)?.map(|m| m.iter().enumerate().map(|(i, &j)| (gt[i], ht[j])).collect()))
}
