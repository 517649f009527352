//! Self-loops and parallel edges: stripped before the simple-graph engine
//! runs, folded into the starting labels, and rechecked on the final mapping.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{extract, Answer, EngineConfig, IsoOutcome, Refutation, Run, Witness, TAG_STRIPPED};
use crate::constraint::Constraint;
use crate::error::EngineError;
use crate::format::RawMultigraph;
use crate::graph::Graph;
use crate::key::{KeyNode, Label};

/// What was removed to make a multigraph simple.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrippedFeatures {
    /// Self-loop count per vertex (vertices without loops omitted).
    pub loops: BTreeMap<usize, usize>,
    /// Multiplicity per vertex pair `(u, v)`, `u < v`, where it exceeds one.
    pub multiplicity: BTreeMap<(usize, usize), usize>,
}

impl StrippedFeatures {
    pub fn is_empty(&self) -> bool {
        self.loops.is_empty() && self.multiplicity.is_empty()
    }

    /// Whether `mapping` carries these features onto `other`'s.
    pub fn preserved_by(&self, other: &StrippedFeatures, mapping: &[usize]) -> bool {
        self.loops.len() == other.loops.len()
            && self.multiplicity.len() == other.multiplicity.len()
            && self.loops.iter().all(|(&v, c)| other.loops.get(&mapping[v]) == Some(c))
            && self.multiplicity.iter().all(|(&(u, v), c)| {
                let (x, y) = (mapping[u].min(mapping[v]), mapping[u].max(mapping[v]));
                other.multiplicity.get(&(x, y)) == Some(c)
            })
    }

    fn vertex_profile(&self, n: usize) -> Vec<(usize, Vec<usize>)> {
        let mut profile: Vec<(usize, Vec<usize>)> = (0..n).map(|v| (self.loops.get(&v).copied().unwrap_or(0), Vec::new())).collect();
        for (&(u, v), &c) in &self.multiplicity {
            profile[u].1.push(c);
            profile[v].1.push(c);
        }
        for p in &mut profile {
            p.1.sort_unstable();
        }
        profile
    }
}

/// Simple graph underlying `raw`, plus the loops and multiplicities removed.
pub fn preprocess_multigraph(raw: &RawMultigraph) -> (Graph, StrippedFeatures) {
    let mut features = StrippedFeatures::default();
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(u, v) in &raw.edges {
        if u == v {
            *features.loops.entry(u).or_default() += 1;
        } else {
            *pairs.entry((u.min(v), u.max(v))).or_default() += 1;
        }
    }
    features.multiplicity = pairs.iter().filter(|&(_, &c)| c > 1).map(|(&p, &c)| (p, c)).collect();
    let g = Graph::from_edges_lossy(raw.n, pairs.into_keys());
    (g, features)
}

/// Multigraph isomorphism: the simple engine under labels derived from the
/// stripped features, then an exhaustive search if the first mapping does
/// not carry the multiplicities across.
pub fn gi_multigraph(a: &RawMultigraph, b: &RawMultigraph, cfg: &EngineConfig) -> Result<IsoOutcome, EngineError> {
    let (g, fg) = preprocess_multigraph(a);
    let (h, fh) = preprocess_multigraph(b);
    let mut run = Run::new(cfg, g.n().max(h.n()));
    let labels = |run: &Run, f: &StrippedFeatures, n: usize| -> Vec<Label> {
        f.vertex_profile(n)
            .into_iter()
            .map(|(loops, mult)| run.label(vec![KeyNode::Int(TAG_STRIPPED), KeyNode::Int(loops as u64), KeyNode::ints(mult)]))
            .collect()
    };
    let (lg, lh) = (labels(&run, &fg, g.n()), labels(&run, &fh, h.n()));
    let answer = match run.gi_labeled(&g, &h, &lg, &lh, 0)? {
        Answer::Yes(m) if fg.preserved_by(&fh, &m) => Answer::Yes(m),
        Answer::Yes(_) => {
            let cg: Vec<u64> = lg.iter().map(|l| l.0 as u64).collect();
            let ch: Vec<u64> = lh.iter().map(|l| l.0 as u64).collect();
            let accept = |m: &[usize]| fg.preserved_by(&fh, m);
            match extract::extract(&g, &h, &cg, &ch, &Constraint::none(), None, &accept, &mut run.meter)? {
                Some(m) => Answer::Yes(m),
                None => Answer::No(Witness {
                    reason: Refutation::StrippedFeatures,
                    depth: 0,
                    n: g.n(),
                }),
            }
        }
        no => no,
    };
    Ok(run.into_outcome(answer, &g, &h, &Constraint::none()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Verdict;
    use crate::format::parse_multigraph;

    #[test]
    fn simple_input_is_unchanged() {
        let raw = parse_multigraph(b"0 1\n1 2\n").unwrap();
        let (g, f) = preprocess_multigraph(&raw);
        assert_eq!(g, Graph::path(3));
        assert!(f.is_empty());
    }

    #[test]
    fn loops_and_multiplicities_matter() {
        let cfg = EngineConfig::default();
        let a = parse_multigraph(b"0 1\n1 2\n0 0\n").unwrap();
        let b = parse_multigraph(b"0 1\n1 2\n2 2\n").unwrap();
        let c = parse_multigraph(b"0 1\n1 2\n1 1\n").unwrap();
        assert_eq!(preprocess_multigraph(&a).1.loops, BTreeMap::from([(0, 1)]));
        let out = gi_multigraph(&a, &b, &cfg).unwrap();
        assert_eq!(out.verdict, Verdict::Yes);
        assert_eq!(out.mapping.unwrap()[0], 2);
        assert_eq!(gi_multigraph(&a, &c, &cfg).unwrap().verdict, Verdict::No);
        let d = parse_multigraph(b"0 1\n0 1\n1 2\n").unwrap();
        let e = parse_multigraph(b"0 1\n1 2\n1 2\n").unwrap();
        assert_eq!(gi_multigraph(&d, &e, &cfg).unwrap().verdict, Verdict::Yes);
        let f = parse_multigraph(b"0 1\n1 2\n2 0\n0 1\n").unwrap();
        let k = parse_multigraph(b"0 1\n1 2\n2 0\n2 1\n").unwrap();
        assert_eq!(gi_multigraph(&f, &k, &cfg).unwrap().verdict, Verdict::Yes);
        assert_eq!(gi_multigraph(&d, &f, &cfg).unwrap().verdict, Verdict::No);
    }
}
