//! Regularity, indistinguishability and exact vertex/edge/arc symmetry.
//!
//! Exact checks compare the first vertex (edge, arc) against every other
//! one, which both decides transitivity and yields the lexicographically
//! smallest failing pair. Every positive comparison is backed by a verified
//! bijection between the nailed graphs.

use serde::{Deserialize, Serialize};

use crate::constraint::{index_of, Constraint};
use crate::engine::{gi_labeled, verify_mapping, EngineConfig};
use crate::error::EngineError;
use crate::graph::{Graph, VertexSet};
use crate::key::{Canonical, Digest};
use crate::oracle::{oracle_nailed_iso, SearchBudget};
use crate::tomography::{arc_parts, layered_multisets, nailed_pattern_digests, tomography_digests, Pattern};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indistinguishability {
    /// All vertex tomographies match.
    #[default]
    Tomographies,
    /// All single-vertex nailed patterns match.
    NailedPatterns,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryConfig {
    /// Graphs up to this size are checked with the oracle, larger ones with the engine.
    pub oracle_limit: usize,
    pub budget: SearchBudget,
    pub engine: EngineConfig,
}

impl Default for SymmetryConfig {
    fn default() -> Self {
        SymmetryConfig {
            oracle_limit: 64,
            budget: SearchBudget::default(),
            engine: EngineConfig::default(),
        }
    }
}

impl SymmetryConfig {
    pub fn with_budget(budget: SearchBudget) -> Self {
        SymmetryConfig {
            budget,
            engine: EngineConfig {
                budget,
                ..EngineConfig::default()
            },
            ..Self::default()
        }
    }
}

pub fn is_vertex_regular(g: &Graph) -> bool {
    vertex_regularity_witness(g).is_none()
}

fn vertex_regularity_witness(g: &Graph) -> Option<(usize, usize)> {
    if g.n() == 0 {
        return None;
    }
    let d0 = g.neighbors(0).len();
    (1..g.n()).find(|&v| g.neighbors(v).len() != d0).map(|v| (0, v))
}

pub fn is_edge_regular(g: &Graph) -> bool {
    edge_regularity_witness(g).is_none()
}

fn edge_regularity_witness(g: &Graph) -> Option<(usize, usize)> {
    let degrees: Vec<usize> = g
        .edge_list()
        .into_iter()
        .map(|(u, v)| g.edge_degree(u, v).expect("listed edge"))
        .collect();
    (1..degrees.len()).find(|&i| degrees[i] != degrees[0]).map(|i| (0, i))
}

pub fn is_vertex_indistinguishable(g: &Graph, variant: Indistinguishability) -> bool {
    indistinguishability_witness(g, variant).is_none()
}

fn indistinguishability_witness(g: &Graph, variant: Indistinguishability) -> Option<(usize, usize)> {
    let t = tomography_digests(g, None);
    let keys = match variant {
        Indistinguishability::Tomographies => t,
        Indistinguishability::NailedPatterns => nailed_pattern_digests(g, &t),
    };
    (1..keys.len()).find(|&v| keys[v] != keys[0]).map(|v| (0, v))
}

/// Outcome of an exact symmetry check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactSymmetry {
    pub holds: bool,
    /// Lexicographically first nail pair (as vertex lists) with no
    /// constrained isomorphism between their nailed graphs.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    /// Number of verified nailed-graph bijections behind a positive answer.
    pub certified: usize,
    #[serde(skip)]
    pub certificates: Vec<Vec<(usize, usize)>>,
}

impl ExactSymmetry {
    fn vacuous() -> Self {
        ExactSymmetry {
            holds: true,
            witness: None,
            certified: 0,
            certificates: Vec::new(),
        }
    }
}

/// Constrained isomorphism between the nailed graphs `g(nails_a)` and
/// `g(nails_b)` with `nails_a[i] -> nails_b[i]`; pairs are in parent ids and
/// have been verified.
pub fn nailed_isomorphism(
    g: &Graph,
    nails_a: &[usize],
    nails_b: &[usize],
    cfg: &SymmetryConfig,
) -> Result<Option<Vec<(usize, usize)>>, EngineError> {
    let comp_a = g.reachable_from(nails_a);
    let comp_b = g.reachable_from(nails_b);
    if comp_a.len() != comp_b.len() {
        return Ok(None);
    }
    let pairs = if g.n() <= cfg.oracle_limit {
        oracle_nailed_iso(g, nails_a, g, nails_b, cfg.budget)?
    } else {
        let (ga, ta) = g.induced_subgraph(&comp_a);
        let (gb, tb) = g.induced_subgraph(&comp_b);
        let tokens = |table: &[usize], nails: &[usize]| -> Vec<u64> {
            table
                .iter()
                .map(|v| nails.iter().position(|x| x == v).map_or(0, |i| i as u64 + 1))
                .collect()
        };
        let out = gi_labeled(&ga, &gb, &tokens(&ta, nails_a), &tokens(&tb, nails_b), &cfg.engine)?;
        out.mapping
            .map(|m| m.iter().enumerate().map(|(i, &j)| (ta[i], tb[j])).collect())
    };
    let Some(pairs) = pairs else {
        return Ok(None);
    };
    // Re-check on the component graphs.
    let (ga, ta) = g.induced_subgraph(&comp_a);
    let (gb, tb) = g.induced_subgraph(&comp_b);
    let (ia, ib) = (index_of(&ta, g.n()), index_of(&tb, g.n()));
    let mut local = vec![usize::MAX; ga.n()];
    for &(x, y) in &pairs {
        local[ia[x]] = ib[y];
    }
    let forced: Vec<(usize, usize)> = nails_a.iter().zip(nails_b).map(|(&x, &y)| (ia[x], ib[y])).collect();
    let c = Constraint::new(forced, vec![])?;
    assert!(verify_mapping(&ga, &gb, &local, &c), "nailed isomorphism failed verification");
    Ok(Some(pairs))
}

fn first_failure(
    g: &Graph,
    reference: &[usize],
    others: impl Iterator<Item = Vec<Vec<usize>>>,
    cfg: &SymmetryConfig,
) -> Result<ExactSymmetry, EngineError> {
    let mut certificates = Vec::new();
    // each item lists the admissible orderings of one target nail set
    for orderings in others {
        let mut found = None;
        for target in &orderings {
            if let Some(c) = nailed_isomorphism(g, reference, target, cfg)? {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => certificates.push(c),
            None => {
                return Ok(ExactSymmetry {
                    holds: false,
                    witness: Some((reference.to_vec(), orderings[0].clone())),
                    certified: 0,
                    certificates: Vec::new(),
                })
            }
        }
    }
    Ok(ExactSymmetry {
        holds: true,
        witness: None,
        certified: certificates.len(),
        certificates,
    })
}

/// Every pair of single-vertex nailed graphs is isomorphic with the nails matched.
pub fn is_vertex_symmetric_exact(g: &Graph, cfg: &SymmetryConfig) -> Result<ExactSymmetry, EngineError> {
    if g.n() <= 1 {
        return Ok(ExactSymmetry::vacuous());
    }
    first_failure(g, &[0], (1..g.n()).map(|v| vec![vec![v]]), cfg)
}

/// Every pair of edge-nailed graphs is isomorphic with the edges matched in
/// either orientation.
pub fn is_edge_symmetric_exact(g: &Graph, cfg: &SymmetryConfig) -> Result<ExactSymmetry, EngineError> {
    let edges = g.edge_list();
    let Some(&(a, b)) = edges.first() else {
        return Ok(ExactSymmetry::vacuous());
    };
    first_failure(g, &[a, b], edges[1..].iter().map(|&(c, d)| vec![vec![c, d], vec![d, c]]), cfg)
}

/// Every pair of arc-nailed graphs is isomorphic with tails and heads matched.
pub fn is_arc_symmetric_exact(g: &Graph, cfg: &SymmetryConfig) -> Result<ExactSymmetry, EngineError> {
    let arcs = arcs(g);
    let Some(&(a, b)) = arcs.first() else {
        return Ok(ExactSymmetry::vacuous());
    };
    first_failure(g, &[a, b], arcs[1..].iter().map(|&(c, d)| vec![vec![c, d]]), cfg)
}

fn arcs(g: &Graph) -> Vec<(usize, usize)> {
    let mut arcs: Vec<(usize, usize)> = g.edge_list().into_iter().flat_map(|(u, v)| [(u, v), (v, u)]).collect();
    arcs.sort_unstable();
    arcs
}

/// Match-based symmetry flags: the hypotheses of the symmetry conjectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFlags {
    /// All vertex tomographies match.
    pub vertex: bool,
    /// All edge-nailed patterns match.
    pub edge: bool,
    /// All arc patterns match.
    pub arc: bool,
}

pub fn edge_pattern_digests(g: &Graph) -> Vec<Digest> {
    let t = tomography_digests(g, None);
    g.edge_list()
        .into_iter()
        .map(|(u, v)| {
            Pattern::Nailed {
                nails: VertexSet::new(vec![u, v]),
                layers: layered_multisets(g, &[u, v], &t),
            }
            .digest()
        })
        .collect()
}

/// Arc-pattern digest of every arc, in sorted arc order.
pub fn arc_pattern_digests(g: &Graph) -> Vec<((usize, usize), Digest)> {
    let t = tomography_digests(g, None);
    let mut out = Vec::new();
    for (u, v) in g.edge_list() {
        let removed = g.toggle_edge(u, v).expect("listed edge");
        let rt = tomography_digests(&removed, None);
        for (tail, head) in [(u, v), (v, u)] {
            let parts = arc_parts(g, &removed, tail, head, &t, &rt);
            let d = Pattern::Arc {
                tail,
                head,
                parts: Box::new(parts),
            }
            .digest();
            out.push(((tail, head), d));
        }
    }
    out.sort_unstable_by_key(|&(a, _)| a);
    out
}

fn all_equal(d: &[Digest]) -> bool {
    d.windows(2).all(|w| w[0] == w[1])
}

pub fn pattern_symmetry_tests(g: &Graph) -> PatternFlags {
    let arcs: Vec<Digest> = arc_pattern_digests(g).into_iter().map(|(_, d)| d).collect();
    PatternFlags {
        vertex: is_vertex_indistinguishable(g, Indistinguishability::Tomographies),
        edge: all_equal(&edge_pattern_digests(g)),
        arc: all_equal(&arcs),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryWitnesses {
    /// Vertices `(0, v)` of different degree.
    pub vertex_regular: Option<(usize, usize)>,
    /// Edges `(e0, ei)`, by index in sorted edge order, of different edge degree.
    pub edge_regular: Option<(usize, usize)>,
    /// Vertices `(0, v)` with different tomographies.
    pub vertex_indistinguishable: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub n: usize,
    pub edges: usize,
    pub vertex_regular: bool,
    pub edge_regular: bool,
    pub vertex_indistinguishable: bool,
    /// The stronger form: all nailed patterns match.
    pub nailed_patterns_match: bool,
    pub vertex_symmetric: ExactSymmetry,
    pub edge_symmetric: ExactSymmetry,
    pub arc_symmetric: ExactSymmetry,
    pub pattern_flags: PatternFlags,
    pub witnesses: SymmetryWitnesses,
}

pub fn classify(g: &Graph, cfg: &SymmetryConfig) -> Result<SymmetryReport, EngineError> {
    let vertex_regular = vertex_regularity_witness(g);
    let edge_regular = edge_regularity_witness(g);
    let indist = indistinguishability_witness(g, Indistinguishability::Tomographies);
    Ok(SymmetryReport {
        n: g.n(),
        edges: g.edge_count(),
        vertex_regular: vertex_regular.is_none(),
        edge_regular: edge_regular.is_none(),
        vertex_indistinguishable: indist.is_none(),
        nailed_patterns_match: is_vertex_indistinguishable(g, Indistinguishability::NailedPatterns),
        vertex_symmetric: is_vertex_symmetric_exact(g, cfg)?,
        edge_symmetric: is_edge_symmetric_exact(g, cfg)?,
        arc_symmetric: is_arc_symmetric_exact(g, cfg)?,
        pattern_flags: pattern_symmetry_tests(g),
        witnesses: SymmetryWitnesses {
            vertex_regular,
            edge_regular,
            vertex_indistinguishable: indist,
        },
    })
}
