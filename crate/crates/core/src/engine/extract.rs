//! Mapping extraction: joint color refinement of both graphs with
//! individualization and backtracking. Exhaustive, so a failure under
//! isomorphism-invariant starting colors proves that no isomorphism exists.

use std::collections::HashMap;

use crate::constraint::Constraint;
use crate::error::BudgetExceeded;
use crate::graph::Graph;
use crate::oracle::Meter;

/// Edge preservation in both directions plus constraint compliance.
pub fn verify_mapping(g: &Graph, h: &Graph, mapping: &[usize], constraint: &Constraint) -> bool {
    if g.n() != h.n() || mapping.len() != g.n() || g.edge_count() != h.edge_count() {
        return false;
    }
    let mut seen = vec![false; h.n()];
    for &w in mapping {
        if w >= h.n() || std::mem::replace(&mut seen[w], true) {
            return false;
        }
    }
    // injective on vertices, equal edge counts: edge images suffice
    g.edge_list().into_iter().all(|(u, v)| h.has_edge(mapping[u], mapping[v])) && constraint.satisfied_by(mapping)
}

/// Colors over the disjoint union: ids `0..n` are `g`, `n..2n` are `h`.
#[derive(Clone)]
struct Coloring {
    colors: Vec<u32>,
    next: u32,
}

struct Extractor<'a> {
    g: &'a Graph,
    h: &'a Graph,
    n: usize,
    accept: &'a dyn Fn(&[usize]) -> bool,
    meter: &'a mut Meter,
    hint: Option<&'a [usize]>,
}

impl Extractor<'_> {
    fn nbrs(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        let (graph, offset) = if x < n { (self.g, 0) } else { (self.h, n) };
        graph.neighbors(x - offset).iter().map(move |&y| y + offset)
    }

    /// Refines to the coarsest equitable joint partition. Returns false as
    /// soon as some color has unequal counts on the two sides.
    fn refine(&self, c: &mut Coloring) -> bool {
        let total = 2 * self.n;
        let mut classes = count_classes(&c.colors);
        loop {
            let mut table: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
            let mut fresh = Vec::with_capacity(total);
            let mut sig = Vec::new();
            for x in 0..total {
                sig.clear();
                sig.extend(self.nbrs(x).map(|y| c.colors[y]));
                sig.sort_unstable();
                let next = table.len() as u32;
                let id = *table.entry((c.colors[x], sig.clone())).or_insert(next);
                fresh.push(id);
            }
            c.colors = fresh;
            c.next = table.len() as u32;
            if !balanced(&c.colors, self.n) {
                return false;
            }
            let now = table.len();
            if now == classes {
                return true;
            }
            classes = now;
        }
    }

    fn search(&mut self, mut c: Coloring) -> Result<Option<Vec<usize>>, BudgetExceeded> {
        self.meter.tick()?;
        if !self.refine(&mut c) {
            return Ok(None);
        }
        let n = self.n;
        let mut members: HashMap<u32, (Vec<usize>, Vec<usize>)> = HashMap::new();
        for x in 0..2 * n {
            let e = members.entry(c.colors[x]).or_default();
            if x < n {
                e.0.push(x);
            } else {
                e.1.push(x - n);
            }
        }
        let target = members
            .iter()
            .filter(|(_, (a, _))| a.len() > 1)
            .min_by_key(|(&col, (a, _))| (a.len(), col))
            .map(|(&col, _)| col);
        let Some(col) = target else {
            let mut mapping = vec![usize::MAX; n];
            for (a, b) in members.values() {
                mapping[a[0]] = b[0];
            }
            return Ok((verify_mapping(self.g, self.h, &mapping, &Constraint::none()) && (self.accept)(&mapping))
                .then_some(mapping));
        };
        let (ours, theirs) = members.remove(&col).unwrap();
        let v = ours[0];
        let mut candidates = theirs;
        if let Some(&w) = self.hint.and_then(|h| h.get(v)) {
            if let Some(i) = candidates.iter().position(|&x| x == w) {
                candidates[..=i].rotate_right(1);
            }
        }
        for w in candidates {
            let mut branch = c.clone();
            branch.colors[v] = branch.next;
            branch.colors[n + w] = branch.next;
            branch.next += 1;
            if let Some(m) = self.search(branch)? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }
}

fn count_classes(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn balanced(colors: &[u32], n: usize) -> bool {
    let mut count: HashMap<u32, i64> = HashMap::new();
    for (x, &col) in colors.iter().enumerate() {
        *count.entry(col).or_default() += if x < n { 1 } else { -1 };
    }
    count.values().all(|&d| d == 0)
}

/// Searches for an isomorphism `g -> h` that maps every vertex to one of
/// equal starting color, honors the forced pairs of `constraint` and is
/// accepted by `accept`. Forbidden pairs are checked at the leaves.
///
/// Starting colors must be isomorphism-invariant for a `None` to mean
/// non-isomorphism; `hint` only orders candidates.
pub(crate) fn extract(
    g: &Graph,
    h: &Graph,
    g_colors: &[u64],
    h_colors: &[u64],
    constraint: &Constraint,
    hint: Option<&[usize]>,
    accept: &dyn Fn(&[usize]) -> bool,
    meter: &mut Meter,
) -> Result<Option<Vec<usize>>, BudgetExceeded> {
    let n = g.n();
    if n != h.n() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut colors = Vec::with_capacity(2 * n);
    for &c in g_colors.iter().chain(h_colors) {
        let next = ids.len() as u32;
        colors.push(*ids.entry(c).or_insert(next));
    }
    let mut next = ids.len() as u32;
    for &(a, b) in constraint.forced() {
        if colors[a] != colors[n + b] {
            return Ok(None);
        }
        colors[a] = next;
        colors[n + b] = next;
        next += 1;
    }
    let leaf = |m: &[usize]| constraint.satisfied_by(m) && accept(m);
    let mut ex = Extractor {
        g,
        h,
        n,
        accept: &leaf,
        meter,
        hint,
    };
    ex.search(Coloring { colors, next })
}
