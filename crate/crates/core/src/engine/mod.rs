//! Label-refining isomorphism engine.
//!
//! [`gi_labeled`] compares labeled tomographies, then labeled nailed
//! patterns; when every tomography matches it anchors one vertex and hands
//! over to [`gi_constrained`], otherwise it takes the rarest pattern class as
//! a base set, classifies the extensions of its members, and recurses on the
//! base subgraph with the refined labels. [`gi_constrained`] refines labels
//! layer by layer from the outermost layer of the nailed graph inwards.
//!
//! Every refinement is isomorphism-invariant, so a mismatch is a proof of
//! non-isomorphism. A positive answer always comes from an explicit,
//! verified bijection found by exhaustive extraction over the final labels.

mod extract;
mod multigraph;

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collapse::{extension_with_mask, layer_assignment};
use crate::constraint::{index_of, Constraint};
use crate::error::EngineError;
use crate::format::to_graph6;
use crate::graph::{Graph, VertexSet};
use crate::key::{Canonical, Digest, KeyNode, Label, LabelTable};
use crate::oracle::{default_colors, oracle_iso_colored, Meter, SearchBudget};
use crate::tomography::{layered_multisets, nailed_pattern_digests, tomography_digests, varied_pattern, Pattern};

pub use extract::verify_mapping;
pub use multigraph::{gi_multigraph, preprocess_multigraph, StrippedFeatures};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Try every anchor in the symmetric branch.
    #[default]
    Sound,
    /// Trust that matching tomographies mean vertex symmetry and anchor once;
    /// a negative anchored answer is retried soundly and any disagreement is
    /// recorded.
    Conjecture,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternVariant {
    #[default]
    Plain,
    Varied,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub mode: Mode,
    /// Defaults to `2 * ceil(log2 n) + 8`.
    pub depth_limit: Option<usize>,
    pub pattern: PatternVariant,
    /// Subproblems past the depth limit go to the oracle up to this size.
    pub oracle_fallback: usize,
    pub budget: SearchBudget,
    /// Shuffles the anchor order of the sound symmetric branch.
    pub anchor_seed: Option<u64>,
    pub trace: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Sound,
            depth_limit: None,
            pattern: PatternVariant::Plain,
            oracle_fallback: 64,
            budget: SearchBudget::default(),
            anchor_seed: None,
            trace: false,
        }
    }
}

impl EngineConfig {
    pub fn conjecture() -> Self {
        EngineConfig {
            mode: Mode::Conjecture,
            ..Self::default()
        }
    }

    fn depth_limit_for(&self, n: usize) -> usize {
        self.depth_limit
            .unwrap_or_else(|| 2 * (usize::BITS - n.max(1).saturating_sub(1).leading_zeros()) as usize + 8)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    ConjectureDisagreement,
}

/// What a negative answer rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refutation {
    VertexCount,
    EdgeCount,
    LabelMultiset,
    NailLabel,
    Components,
    Tomographies,
    NailedPatterns,
    ExtensionClasses,
    AnchorsExhausted,
    ExtractionExhausted,
    Oracle,
    StrippedFeatures,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub reason: Refutation,
    /// Recursion depth of the call that found the mismatch.
    pub depth: usize,
    /// Vertex count of the subproblem at that call.
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receipt {
    pub vertices: usize,
    pub edges_checked: usize,
    pub constraint_pairs: usize,
}

/// A vertex-indistinguishable pair whose single anchored call said no while
/// another anchor produced an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub graph6: String,
    pub other_graph6: String,
    pub anchor: (usize, usize),
    pub resolved_anchor: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub depth: usize,
    pub call: String,
    pub n: usize,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    pub labeled_calls: u64,
    pub constrained_calls: u64,
    pub extension_subcalls: u64,
    pub memo_hits: u64,
    pub oracle_fallbacks: u64,
    pub extraction_nodes: u64,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoOutcome {
    pub verdict: Verdict,
    /// `mapping[v]` is the image of `v`; present whenever an isomorphism was found.
    pub mapping: Option<Vec<usize>>,
    pub receipt: Option<Receipt>,
    pub witness: Option<Witness>,
    pub disagreements: Vec<Disagreement>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceEvent>,
    pub stats: EngineStats,
}

impl IsoOutcome {
    pub fn is_isomorphic(&self) -> bool {
        self.mapping.is_some()
    }
}

enum Answer {
    Yes(Vec<usize>),
    No(Witness),
}

type Step = Result<Answer, EngineError>;

// Leading tags of interned label keys.
const TAG_UNIFORM: u64 = 0;
const TAG_LAYER: u64 = 1;
const TAG_EXTENSION: u64 = 2;
const TAG_CLASS: u64 = 3;
const TAG_MASK: u64 = 4;
const TAG_FINAL: u64 = 5;
const TAG_USER: u64 = 6;
const TAG_STRIPPED: u64 = 7;
const TAG_DEGENERATE: u64 = 8;

/// Extension of one base point, ready for comparison.
struct ExtItem {
    graph: Graph,
    labels: Vec<Label>,
    base: usize,
    key: Digest,
    degenerate: bool,
}

impl ExtItem {
    fn encoding(&self) -> Vec<u8> {
        let mut e = Vec::with_capacity(8 * (self.graph.n() + self.graph.edge_count()));
        e.extend((self.graph.n() as u64).to_le_bytes());
        e.extend((self.base as u64).to_le_bytes());
        for l in &self.labels {
            e.extend(l.0.to_le_bytes());
        }
        for (u, v) in self.graph.edge_list() {
            e.extend((u as u32).to_le_bytes());
            e.extend((v as u32).to_le_bytes());
        }
        e
    }
}

struct Run<'c> {
    cfg: &'c EngineConfig,
    table: LabelTable,
    depth_limit: usize,
    meter: Meter,
    memo: HashMap<(Vec<u8>, Vec<u8>), bool>,
    disagreements: Vec<Disagreement>,
    trace: Vec<TraceEvent>,
    stats: EngineStats,
}

impl<'c> Run<'c> {
    fn new(cfg: &'c EngineConfig, n: usize) -> Self {
        Run {
            cfg,
            table: LabelTable::new(),
            depth_limit: cfg.depth_limit_for(n),
            meter: Meter::new(cfg.budget),
            memo: HashMap::new(),
            disagreements: Vec::new(),
            trace: Vec::new(),
            stats: EngineStats::default(),
        }
    }

    fn label(&self, parts: Vec<KeyNode>) -> Label {
        self.table.intern(&KeyNode::List(parts))
    }

    fn uniform(&self, n: usize) -> Vec<Label> {
        vec![self.label(vec![KeyNode::Int(TAG_UNIFORM)]); n]
    }

    fn user_labels(&self, tokens: &[u64]) -> Vec<Label> {
        tokens
            .iter()
            .map(|&t| self.label(vec![KeyNode::Int(TAG_USER), KeyNode::Int(t)]))
            .collect()
    }

    fn note(&mut self, depth: usize, call: &str, n: usize, note: impl FnOnce() -> String) {
        if self.cfg.trace {
            self.trace.push(TraceEvent {
                depth,
                call: call.to_string(),
                n,
                note: note(),
            });
        }
    }

    fn no(&mut self, reason: Refutation, depth: usize, n: usize) -> Step {
        self.note(depth, "no", n, || format!("{reason:?}"));
        Ok(Answer::No(Witness { reason, depth, n }))
    }

    fn into_outcome(self, answer: Answer, g: &Graph, h: &Graph, constraint: &Constraint) -> IsoOutcome {
        let mut stats = self.stats;
        stats.extraction_nodes = self.meter.nodes();
        let (verdict, mapping, receipt, witness) = match answer {
            Answer::Yes(m) => {
                assert!(
                    verify_mapping(g, h, &m, constraint),
                    "engine produced a mapping that fails verification"
                );
                let receipt = Receipt {
                    vertices: g.n(),
                    edges_checked: g.edge_count(),
                    constraint_pairs: constraint.forced().len() + constraint.forbidden().count(),
                };
                (Verdict::Yes, Some(m), Some(receipt), None)
            }
            Answer::No(w) => (Verdict::No, None, None, Some(w)),
        };
        let verdict = if self.disagreements.is_empty() {
            verdict
        } else {
            Verdict::ConjectureDisagreement
        };
        IsoOutcome {
            verdict,
            mapping,
            receipt,
            witness,
            disagreements: self.disagreements,
            trace: self.trace,
            stats,
        }
    }

    /// Quick necessary conditions shared by both entry points.
    fn precheck(&mut self, g: &Graph, h: &Graph, lg: &[Label], lh: &[Label], depth: usize) -> Option<Step> {
        let n = g.n();
        if n != h.n() {
            return Some(self.no(Refutation::VertexCount, depth, n));
        }
        if g.edge_count() != h.edge_count() {
            return Some(self.no(Refutation::EdgeCount, depth, n));
        }
        let (mut a, mut b) = (lg.to_vec(), lh.to_vec());
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Some(self.no(Refutation::LabelMultiset, depth, n));
        }
        None
    }

    fn colors(&self, g: &Graph, labels: &[Label]) -> Vec<u64> {
        default_colors(g)
            .into_iter()
            .zip(labels)
            .map(|(c, l)| c ^ (l.0 as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
            .collect()
    }

    /// Exact answer for a subproblem past the depth limit.
    fn fallback(&mut self, g: &Graph, h: &Graph, lg: &[Label], lh: &[Label], c: &Constraint, depth: usize) -> Step {
        let n = g.n();
        if n > self.cfg.oracle_fallback {
            return Err(EngineError::DepthExhausted { depth, n });
        }
        self.stats.oracle_fallbacks += 1;
        self.note(depth, "oracle", n, String::new);
        let (cg, ch) = (self.colors(g, lg), self.colors(h, lh));
        match oracle_iso_colored(g, h, &cg, &ch, c, self.cfg.budget)? {
            Some(m) => Ok(Answer::Yes(m)),
            None => self.no(Refutation::Oracle, depth, n),
        }
    }

    fn extract(
        &mut self,
        g: &Graph,
        h: &Graph,
        lg: &[Label],
        lh: &[Label],
        c: &Constraint,
        hint: Option<&[usize]>,
        depth: usize,
    ) -> Step {
        let cg: Vec<u64> = lg.iter().map(|l| l.0 as u64).collect();
        let ch: Vec<u64> = lh.iter().map(|l| l.0 as u64).collect();
        match extract::extract(g, h, &cg, &ch, c, hint, &|_| true, &mut self.meter)? {
            Some(m) => Ok(Answer::Yes(m)),
            None => self.no(Refutation::ExtractionExhausted, depth, g.n()),
        }
    }

    fn per_vertex_patterns(&self, g: &Graph, tomographies: &[Digest]) -> Vec<Digest> {
        let plain = nailed_pattern_digests(g, tomographies);
        match self.cfg.pattern {
            PatternVariant::Plain => plain,
            PatternVariant::Varied => (0..g.n())
                .into_par_iter()
                .map(|v| {
                    let varied = varied_pattern(g, &VertexSet::singleton(v)).expect("vertex in range");
                    KeyNode::List(vec![KeyNode::Digest(plain[v]), KeyNode::Digest(varied.digest())])
                        .encode()
                        .digest()
                })
                .collect(),
        }
    }

    fn gi_labeled(&mut self, g: &Graph, h: &Graph, lg: &[Label], lh: &[Label], depth: usize) -> Step {
        self.stats.labeled_calls += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let n = g.n();
        self.note(depth, "labeled", n, String::new);
        if let Some(done) = self.precheck(g, h, lg, lh, depth) {
            return done;
        }
        if n == 0 {
            return Ok(Answer::Yes(Vec::new()));
        }
        if depth > self.depth_limit {
            return self.fallback(g, h, lg, lh, &Constraint::none(), depth);
        }
        if !g.is_connected() || !h.is_connected() {
            return self.by_components(g, h, lg, lh, depth);
        }
        if n <= 2 {
            return self.extract(g, h, lg, lh, &Constraint::none(), None, depth);
        }

        // Step 1: labeled tomographies.
        let tg = tomography_digests(g, Some(lg));
        let th = tomography_digests(h, Some(lh));
        if sorted(&tg) != sorted(&th) {
            return self.no(Refutation::Tomographies, depth, n);
        }
        if tg.iter().all(|&d| d == tg[0]) {
            return self.symmetric_branch(g, h, lg, lh, depth);
        }

        // Step 2: labeled nailed patterns; the rarest class is the base set.
        let pg = self.per_vertex_patterns(g, &tg);
        let ph = self.per_vertex_patterns(h, &th);
        if sorted(&pg) != sorted(&ph) {
            return self.no(Refutation::NailedPatterns, depth, n);
        }
        let mut counts: BTreeMap<Digest, usize> = BTreeMap::new();
        for &d in &pg {
            *counts.entry(d).or_default() += 1;
        }
        let rare = counts.iter().min_by_key(|&(d, &c)| (c, *d)).map(|(&d, _)| d).unwrap();
        let beta_g: Vec<usize> = (0..n).filter(|&v| pg[v] == rare).collect();
        let beta_h: Vec<usize> = (0..n).filter(|&v| ph[v] == rare).collect();
        self.note(depth, "base-set", n, || format!("{} of {n}", beta_g.len()));

        let (mask_g, mask_h) = (VertexSet::new(beta_g.clone()).mask(n), VertexSet::new(beta_h.clone()).mask(n));
        let Some((cls_g, cls_h)) = self.classify(g, h, &mask_g, &mask_h, &beta_g, &beta_h, lg, lh, depth)? else {
            return self.no(Refutation::ExtensionClasses, depth, n);
        };

        // Final labels: old label, pattern class, and extension class on the base set.
        let mut fg: Vec<Label> = (0..n).map(|v| self.final_label(lg[v], pg[v], None)).collect();
        let mut fh: Vec<Label> = (0..n).map(|v| self.final_label(lh[v], ph[v], None)).collect();
        let mut next_g = Vec::with_capacity(beta_g.len());
        let mut next_h = Vec::with_capacity(beta_h.len());
        for (i, &v) in beta_g.iter().enumerate() {
            let l = self.label(vec![KeyNode::Int(TAG_EXTENSION), KeyNode::Label(lg[v]), KeyNode::Label(cls_g[i])]);
            next_g.push(l);
            fg[v] = self.final_label(lg[v], pg[v], Some(l));
        }
        for (i, &v) in beta_h.iter().enumerate() {
            let l = self.label(vec![KeyNode::Int(TAG_EXTENSION), KeyNode::Label(lh[v]), KeyNode::Label(cls_h[i])]);
            next_h.push(l);
            fh[v] = self.final_label(lh[v], ph[v], Some(l));
        }

        let (sub_g, tab_g) = g.induced_subgraph(&VertexSet::new(beta_g));
        let (sub_h, tab_h) = h.induced_subgraph(&VertexSet::new(beta_h));
        let hint = match self.gi_labeled(&sub_g, &sub_h, &next_g, &next_h, depth + 1) {
            Ok(Answer::No(w)) => return Ok(Answer::No(w)),
            Ok(Answer::Yes(m)) => {
                let mut hint = vec![usize::MAX; n];
                for (i, &j) in m.iter().enumerate() {
                    hint[tab_g[i]] = tab_h[j];
                }
                Some(hint)
            }
            Err(e) if e.is_resource_exhaustion() => {
                self.note(depth, "base-subgraph", sub_g.n(), || format!("unresolved: {e}"));
                None
            }
            Err(e) => return Err(e),
        };
        self.extract(g, h, &fg, &fh, &Constraint::none(), hint.as_deref(), depth)
    }

    fn final_label(&self, old: Label, pattern: Digest, ext: Option<Label>) -> Label {
        self.label(vec![
            KeyNode::Int(TAG_FINAL),
            KeyNode::Label(old),
            KeyNode::Digest(pattern),
            ext.map_or(KeyNode::Absent, KeyNode::Label),
        ])
    }

    fn symmetric_branch(&mut self, g: &Graph, h: &Graph, lg: &[Label], lh: &[Label], depth: usize) -> Step {
        let n = g.n();
        let (gc, hc);
        let (gx, hx) = if 2 * g.neighbors(0).len() > n {
            gc = g.complement();
            hc = h.complement();
            (&gc, &hc)
        } else {
            (g, h)
        };
        self.note(depth, "symmetric", n, || format!("complemented: {}", !std::ptr::eq(gx, g)));
        let mut anchors: Vec<usize> = (0..n).collect();
        if let Some(seed) = self.cfg.anchor_seed {
            anchors.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        if self.cfg.mode == Mode::Conjecture {
            let first = anchors[0];
            match self.gi_constrained(gx, hx, 0, first, lg, lh, depth + 1)? {
                Answer::Yes(m) => return Ok(Answer::Yes(m)),
                Answer::No(w) => {
                    for &b in &anchors[1..] {
                        if let Answer::Yes(m) = self.gi_constrained(gx, hx, 0, b, lg, lh, depth + 1)? {
                            self.disagreements.push(Disagreement {
                                graph6: to_graph6(g),
                                other_graph6: to_graph6(h),
                                anchor: (0, first),
                                resolved_anchor: (0, b),
                            });
                            return Ok(Answer::Yes(m));
                        }
                    }
                    return Ok(Answer::No(w));
                }
            }
        }
        let mut pending = None;
        for b in anchors {
            match self.gi_constrained(gx, hx, 0, b, lg, lh, depth + 1) {
                Ok(Answer::Yes(m)) => return Ok(Answer::Yes(m)),
                Ok(Answer::No(_)) => {}
                Err(e) if e.is_resource_exhaustion() => pending = Some(e),
                Err(e) => return Err(e),
            }
        }
        match pending {
            Some(e) => Err(e),
            None => self.no(Refutation::AnchorsExhausted, depth, n),
        }
    }

    /// Matches components greedily; isomorphism is an equivalence, so the
    /// first isomorphic partner is as good as any.
    fn by_components(&mut self, g: &Graph, h: &Graph, lg: &[Label], lh: &[Label], depth: usize) -> Step {
        let n = g.n();
        let split = |graph: &Graph, labels: &[Label]| -> Vec<(Graph, Vec<usize>, Vec<Label>)> {
            graph
                .components()
                .into_iter()
                .map(|c| {
                    let (sub, tab) = graph.induced_subgraph(&c);
                    let l = tab.iter().map(|&v| labels[v]).collect();
                    (sub, tab, l)
                })
                .collect()
        };
        let cg = split(g, lg);
        let ch = split(h, lh);
        if cg.len() != ch.len() {
            return self.no(Refutation::Components, depth, n);
        }
        let mut used = vec![false; ch.len()];
        let mut mapping = vec![usize::MAX; n];
        for (sg, tg, lsg) in &cg {
            let mut matched = false;
            for (j, (sh, th, lsh)) in ch.iter().enumerate() {
                if used[j] || sh.n() != sg.n() || sh.edge_count() != sg.edge_count() {
                    continue;
                }
                if let Answer::Yes(m) = self.gi_labeled(sg, sh, lsg, lsh, depth)? {
                    for (i, &k) in m.iter().enumerate() {
                        mapping[tg[i]] = th[k];
                    }
                    used[j] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                return self.no(Refutation::Components, depth, n);
            }
        }
        Ok(Answer::Yes(mapping))
    }

    #[allow(clippy::too_many_arguments)]
    fn gi_constrained(
        &mut self,
        g: &Graph,
        h: &Graph,
        a: usize,
        b: usize,
        lg: &[Label],
        lh: &[Label],
        depth: usize,
    ) -> Step {
        self.stats.constrained_calls += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let n = g.n();
        self.note(depth, "constrained", n, || format!("{a} -> {b}"));
        if let Some(done) = self.precheck(g, h, lg, lh, depth) {
            return done;
        }
        if lg[a] != lh[b] {
            return self.no(Refutation::NailLabel, depth, n);
        }
        let forced = Constraint::forced_pair(a, b);
        if depth > self.depth_limit {
            return self.fallback(g, h, lg, lh, &forced, depth);
        }
        if !g.is_connected() || !h.is_connected() {
            return self.constrained_components(g, h, a, b, lg, lh, depth);
        }

        let tg = tomography_digests(g, Some(lg));
        let th = tomography_digests(h, Some(lh));
        let nailed = |graph: &Graph, nail: usize, t: &[Digest]| {
            Pattern::Nailed {
                nails: VertexSet::singleton(nail),
                layers: layered_multisets(graph, &[nail], t),
            }
            .digest()
        };
        if nailed(g, a, &tg) != nailed(h, b, &th) {
            return self.no(Refutation::NailedPatterns, depth, n);
        }
        let (dist_g, layers_g) = layer_assignment(g, &[a]);
        let (dist_h, layers_h) = layer_assignment(h, &[b]);
        let l = layers_g.len() - 1;
        if l == 0 {
            return Ok(Answer::Yes(vec![b]));
        }
        if l == 1 {
            // The nail is adjacent to everything else.
            let rest_g = VertexSet::new((0..n).filter(|&v| v != a).collect());
            let rest_h = VertexSet::new((0..n).filter(|&v| v != b).collect());
            let (sg, tab_g) = g.induced_subgraph(&rest_g);
            let (sh, tab_h) = h.induced_subgraph(&rest_h);
            let lsg: Vec<Label> = tab_g.iter().map(|&v| lg[v]).collect();
            let lsh: Vec<Label> = tab_h.iter().map(|&v| lh[v]).collect();
            match self.gi_labeled(&sg, &sh, &lsg, &lsh, depth + 1) {
                Ok(Answer::Yes(m)) => {
                    let mut mapping = vec![usize::MAX; n];
                    mapping[a] = b;
                    for (i, &j) in m.iter().enumerate() {
                        mapping[tab_g[i]] = tab_h[j];
                    }
                    return Ok(Answer::Yes(mapping));
                }
                Ok(Answer::No(w)) => return Ok(Answer::No(w)),
                Err(e) if e.is_resource_exhaustion() => {
                    let (mg, mh) = (self.with_tomography(lg, &tg), self.with_tomography(lh, &th));
                    return self.extract(g, h, &mg, &mh, &forced, None, depth);
                }
                Err(e) => return Err(e),
            }
        }

        // Layer-by-layer relabeling, outermost layer first.
        let layer_label = |run: &Self, labels: &[Label], t: &[Digest], dist: &[usize]| -> Vec<Label> {
            (0..n)
                .map(|v| {
                    run.label(vec![
                        KeyNode::Int(TAG_LAYER),
                        KeyNode::Label(labels[v]),
                        KeyNode::Int(dist[v] as u64),
                        KeyNode::Digest(t[v]),
                    ])
                })
                .collect()
        };
        let mut mg = layer_label(self, lg, &tg, &dist_g);
        let mut mh = layer_label(self, lh, &th, &dist_h);
        for x in (1..l).rev() {
            let base_g: Vec<bool> = dist_g.iter().map(|&d| d <= x).collect();
            let base_h: Vec<bool> = dist_h.iter().map(|&d| d <= x).collect();
            let Some((cg, ch)) = self.classify(g, h, &base_g, &base_h, &layers_g[x], &layers_h[x], &mg, &mh, depth)?
            else {
                return self.no(Refutation::ExtensionClasses, depth, n);
            };
            for (i, &v) in layers_g[x].iter().enumerate() {
                mg[v] = self.label(vec![KeyNode::Int(TAG_EXTENSION), KeyNode::Label(mg[v]), KeyNode::Label(cg[i])]);
            }
            for (i, &v) in layers_h[x].iter().enumerate() {
                mh[v] = self.label(vec![KeyNode::Int(TAG_EXTENSION), KeyNode::Label(mh[v]), KeyNode::Label(ch[i])]);
            }
        }
        self.extract(g, h, &mg, &mh, &forced, None, depth)
    }

    fn with_tomography(&self, labels: &[Label], t: &[Digest]) -> Vec<Label> {
        labels
            .iter()
            .zip(t)
            .map(|(&l, &d)| self.label(vec![KeyNode::Int(TAG_LAYER), KeyNode::Label(l), KeyNode::Digest(d)]))
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn constrained_components(
        &mut self,
        g: &Graph,
        h: &Graph,
        a: usize,
        b: usize,
        lg: &[Label],
        lh: &[Label],
        depth: usize,
    ) -> Step {
        let n = g.n();
        let comp_g = g.reachable_from(&[a]);
        let comp_h = h.reachable_from(&[b]);
        if comp_g.len() != comp_h.len() {
            return self.no(Refutation::Components, depth, n);
        }
        let restrict = |graph: &Graph, set: &VertexSet, labels: &[Label]| {
            let (sub, tab) = graph.induced_subgraph(set);
            let l: Vec<Label> = tab.iter().map(|&v| labels[v]).collect();
            (sub, tab, l)
        };
        let (sg, tg, lsg) = restrict(g, &comp_g, lg);
        let (sh, th, lsh) = restrict(h, &comp_h, lh);
        let (a_local, b_local) = (index_of(&tg, n)[a], index_of(&th, n)[b]);
        let m1 = match self.gi_constrained(&sg, &sh, a_local, b_local, &lsg, &lsh, depth)? {
            Answer::Yes(m) => m,
            no => return Ok(no),
        };
        let mut mapping = vec![usize::MAX; n];
        for (i, &j) in m1.iter().enumerate() {
            mapping[tg[i]] = th[j];
        }
        let others = |set: &VertexSet| VertexSet::new((0..n).filter(|&v| !set.contains(v)).collect());
        let (rg, rtg, lrg) = restrict(g, &others(&comp_g), lg);
        let (rh, rth, lrh) = restrict(h, &others(&comp_h), lh);
        match self.gi_labeled(&rg, &rh, &lrg, &lrh, depth)? {
            Answer::Yes(m2) => {
                for (i, &j) in m2.iter().enumerate() {
                    mapping[rtg[i]] = rth[j];
                }
                Ok(Answer::Yes(mapping))
            }
            no => Ok(no),
        }
    }

    fn ext_item(&self, g: &Graph, mask: &[bool], base_set: &VertexSet, v: usize, labels: &[Label], masked: Label) -> ExtItem {
        let ext = extension_with_mask(g, mask, v, base_set.clone());
        let degenerate = ext.is_degenerate();
        let (graph, table, base) = ext.to_graph();
        let mut local: Vec<Label> = table.iter().map(|&u| labels[u]).collect();
        local[base] = masked;
        let key = if degenerate {
            KeyNode::List(vec![KeyNode::Int(TAG_DEGENERATE)]).encode().digest()
        } else {
            let t = tomography_digests(&graph, Some(&local));
            let pattern = Pattern::Nailed {
                nails: VertexSet::singleton(base),
                layers: layered_multisets(&graph, &[base], &t),
            };
            KeyNode::List(vec![
                KeyNode::Int(graph.n() as u64),
                KeyNode::Int(graph.edge_count() as u64),
                KeyNode::Digest(pattern.digest()),
            ])
            .encode()
            .digest()
        };
        ExtItem {
            graph,
            labels: local,
            base,
            key,
            degenerate,
        }
    }

    /// Joint isomorphism classes of the extensions of `pts_g` in `g` and
    /// `pts_h` in `h` against the given base sets, with base-point labels
    /// masked. `None` when the class counts of the two sides differ.
    #[allow(clippy::too_many_arguments)]
    fn classify(
        &mut self,
        g: &Graph,
        h: &Graph,
        mask_g: &[bool],
        mask_h: &[bool],
        pts_g: &[usize],
        pts_h: &[usize],
        lg: &[Label],
        lh: &[Label],
        depth: usize,
    ) -> Result<Option<(Vec<Label>, Vec<Label>)>, EngineError> {
        let masked = self.label(vec![KeyNode::Int(TAG_MASK)]);
        let parent_n = g.n();
        let set_of = |mask: &[bool]| VertexSet::new((0..mask.len()).filter(|&v| mask[v]).collect());
        let (set_g, set_h) = (set_of(mask_g), set_of(mask_h));
        let items: Vec<ExtItem> = {
            let this = &*self;
            pts_g
                .par_iter()
                .map(|&v| this.ext_item(g, mask_g, &set_g, v, lg, masked))
                .chain(pts_h.par_iter().map(|&v| this.ext_item(h, mask_h, &set_h, v, lh, masked)))
                .collect()
        };
        let split_at = pts_g.len();
        let mut groups: BTreeMap<Digest, Vec<usize>> = BTreeMap::new();
        for (i, it) in items.iter().enumerate() {
            groups.entry(it.key).or_default().push(i);
        }
        let mut class_of = vec![Label(0); items.len()];
        for (key, members) in groups {
            let ours = members.iter().filter(|&&i| i < split_at).count();
            if 2 * ours != members.len() {
                return Ok(None);
            }
            let first = &items[members[0]];
            let splittable = members.len() > 2 && !first.degenerate && first.graph.n() < parent_n;
            let classes = if splittable {
                self.split_group(&items, &members, depth)?
            } else {
                None
            };
            let classes = classes.unwrap_or_else(|| vec![members.clone()]);
            for (ci, class) in classes.iter().enumerate() {
                let ours = class.iter().filter(|&&i| i < split_at).count();
                if 2 * ours != class.len() {
                    return Ok(None);
                }
                let l = self.label(vec![KeyNode::Int(TAG_CLASS), KeyNode::Digest(key), KeyNode::Int(ci as u64)]);
                for &i in class {
                    class_of[i] = l;
                }
            }
        }
        let h_part = class_of.split_off(split_at);
        Ok(Some((class_of, h_part)))
    }

    /// Isomorphism classes within one key group, by constrained sub-calls
    /// against class representatives. `None` if some sub-call ran out of
    /// resources, in which case the group stays whole.
    fn split_group(&mut self, items: &[ExtItem], members: &[usize], depth: usize) -> Result<Option<Vec<Vec<usize>>>, EngineError> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in members {
            let mut placed = false;
            for class in classes.iter_mut() {
                match self.ext_iso(&items[class[0]], &items[i], depth + 1) {
                    Ok(true) => {
                        class.push(i);
                        placed = true;
                        break;
                    }
                    Ok(false) => {}
                    Err(e) if e.is_resource_exhaustion() => {
                        self.note(depth, "classify", items[i].graph.n(), || format!("group left whole: {e}"));
                        return Ok(None);
                    }
                    Err(e) => return Err(e),
                }
            }
            if !placed {
                classes.push(vec![i]);
            }
        }
        Ok(Some(classes))
    }

    fn ext_iso(&mut self, x: &ExtItem, y: &ExtItem, depth: usize) -> Result<bool, EngineError> {
        let key = (x.encoding(), y.encoding());
        if let Some(&r) = self.memo.get(&key) {
            self.stats.memo_hits += 1;
            return Ok(r);
        }
        self.stats.extension_subcalls += 1;
        let r = matches!(
            self.gi_constrained(&x.graph, &y.graph, x.base, y.base, &x.labels, &y.labels, depth)?,
            Answer::Yes(_)
        );
        self.memo.insert(key, r);
        Ok(r)
    }
}

fn sorted(d: &[Digest]) -> Vec<Digest> {
    let mut v = d.to_vec();
    v.sort_unstable();
    v
}

/// Isomorphism test between two graphs.
pub fn gi(g: &Graph, h: &Graph, cfg: &EngineConfig) -> Result<IsoOutcome, EngineError> {
    let mut run = Run::new(cfg, g.n().max(h.n()));
    let (lg, lh) = (run.uniform(g.n()), run.uniform(h.n()));
    let answer = run.gi_labeled(g, h, &lg, &lh, 0)?;
    Ok(run.into_outcome(answer, g, h, &Constraint::none()))
}

/// Isomorphism test that must map each vertex to one carrying the same label.
pub fn gi_labeled(g: &Graph, h: &Graph, labels_g: &[u64], labels_h: &[u64], cfg: &EngineConfig) -> Result<IsoOutcome, EngineError> {
    check_labels(g, labels_g)?;
    check_labels(h, labels_h)?;
    let mut run = Run::new(cfg, g.n().max(h.n()));
    let (lg, lh) = (run.user_labels(labels_g), run.user_labels(labels_h));
    let answer = run.gi_labeled(g, h, &lg, &lh, 0)?;
    Ok(run.into_outcome(answer, g, h, &Constraint::none()))
}

/// Isomorphism test with `a` forced onto `b`, optionally under labels.
pub fn gi_constrained(
    g: &Graph,
    h: &Graph,
    a: usize,
    b: usize,
    labels: Option<(&[u64], &[u64])>,
    cfg: &EngineConfig,
) -> Result<IsoOutcome, EngineError> {
    g.check_vertex(a)?;
    h.check_vertex(b)?;
    let mut run = Run::new(cfg, g.n().max(h.n()));
    let (lg, lh) = match labels {
        Some((x, y)) => {
            check_labels(g, x)?;
            check_labels(h, y)?;
            (run.user_labels(x), run.user_labels(y))
        }
        None => (run.uniform(g.n()), run.uniform(h.n())),
    };
    let answer = run.gi_constrained(g, h, a, b, &lg, &lh, 0)?;
    Ok(run.into_outcome(answer, g, h, &Constraint::forced_pair(a, b)))
}

/// Label-guided exhaustive extraction: candidates for `v` are the vertices
/// carrying the same label, forced pairs are honored, ties are broken by
/// individualization with backtracking.
pub fn extract_mapping(
    g: &Graph,
    h: &Graph,
    labels_g: &[u64],
    labels_h: &[u64],
    constraint: &Constraint,
    budget: SearchBudget,
) -> Result<Option<Vec<usize>>, EngineError> {
    check_labels(g, labels_g)?;
    check_labels(h, labels_h)?;
    constraint.check_against(g, h)?;
    let mut meter = Meter::new(budget);
    Ok(extract::extract(g, h, labels_g, labels_h, constraint, None, &|_| true, &mut meter)?)
}

fn check_labels(g: &Graph, labels: &[u64]) -> Result<(), EngineError> {
    if labels.len() != g.n() {
        return Err(crate::error::GraphError::Parse {
            line: 0,
            reason: format!("{} labels for {} vertices", labels.len(), g.n()),
        }
        .into());
    }
    Ok(())
}
