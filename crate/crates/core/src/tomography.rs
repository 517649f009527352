//! Vertex and edge properties, collapse tomographies and collapse patterns.

use serde::Serialize;

use crate::collapse::{extension_with_mask, layer_assignment};
use crate::error::GraphError;
use crate::graph::{sorted_intersection_len, Graph, VertexSet};
use crate::key::{Canonical, Digest, KeyNode, Label};

/// Sorted multiset of vertex degrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexProperty(pub Vec<usize>);

/// Sorted multiset of edge degrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct EdgeProperty(pub Vec<usize>);

impl Canonical for VertexProperty {
    fn key_node(&self) -> KeyNode {
        KeyNode::ints(self.0.iter().copied())
    }
}

impl Canonical for EdgeProperty {
    fn key_node(&self) -> KeyNode {
        KeyNode::ints(self.0.iter().copied())
    }
}

pub fn vertex_property(g: &Graph) -> VertexProperty {
    let mut d: Vec<usize> = (0..g.n()).map(|v| g.neighbors(v).len()).collect();
    d.sort_unstable();
    VertexProperty(d)
}

pub fn edge_property(g: &Graph) -> EdgeProperty {
    let mut d: Vec<usize> = g
        .edge_list()
        .into_iter()
        .map(|(u, v)| g.neighbors(u).len() + g.neighbors(v).len() - sorted_intersection_len(g.neighbors(u), g.neighbors(v)))
        .collect();
    d.sort_unstable();
    EdgeProperty(d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TomographyEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    pub vertex_property: VertexProperty,
    pub edge_property: EdgeProperty,
}

/// Per-layer properties of the collapse from one trigger, layers 1..l.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tomography {
    pub trigger: usize,
    pub entries: Vec<TomographyEntry>,
}

impl Canonical for Tomography {
    fn key_node(&self) -> KeyNode {
        KeyNode::List(
            self.entries
                .iter()
                .map(|e| {
                    let mut parts = Vec::with_capacity(3);
                    if let Some(l) = e.label {
                        parts.push(KeyNode::Label(l));
                    }
                    parts.push(e.vertex_property.key_node());
                    parts.push(e.edge_property.key_node());
                    KeyNode::List(parts)
                })
                .collect(),
        )
    }
}

/// Vertex and edge properties of every layer subgraph, measured in place
/// from a distance array.
fn layer_properties(g: &Graph, dist: &[usize], layers: &[Vec<usize>]) -> Vec<(VertexProperty, EdgeProperty)> {
    let mut in_deg = vec![0usize; g.n()];
    let mut out = Vec::with_capacity(layers.len().saturating_sub(1));
    let mut same_layer: Vec<usize> = Vec::new();
    let mut other: Vec<usize> = Vec::new();
    for (i, layer) in layers.iter().enumerate().skip(1) {
        for &v in layer {
            in_deg[v] = g.neighbors(v).iter().filter(|&&w| dist[w] == i).count();
        }
        let mut pv: Vec<usize> = layer.iter().map(|&v| in_deg[v]).collect();
        pv.sort_unstable();
        let mut pe = Vec::new();
        for &u in layer {
            if in_deg[u] == 0 {
                continue;
            }
            same_layer.clear();
            same_layer.extend(g.neighbors(u).iter().copied().filter(|&w| dist[w] == i));
            for &w in &same_layer {
                if u < w {
                    other.clear();
                    other.extend(g.neighbors(w).iter().copied().filter(|&x| dist[x] == i));
                    pe.push(in_deg[u] + in_deg[w] - sorted_intersection_len(&same_layer, &other));
                }
            }
        }
        pe.sort_unstable();
        out.push((VertexProperty(pv), EdgeProperty(pe)));
    }
    out
}

pub fn tomography(g: &Graph, trigger: usize, labels: Option<&[Label]>) -> Result<Tomography, GraphError> {
    g.check_vertex(trigger)?;
    Ok(tomography_unchecked(g, trigger, labels))
}

pub(crate) fn tomography_unchecked(g: &Graph, trigger: usize, labels: Option<&[Label]>) -> Tomography {
    let (dist, layers) = layer_assignment(g, &[trigger]);
    let label = labels.map(|l| l[trigger]);
    let entries = layer_properties(g, &dist, &layers)
        .into_iter()
        .map(|(vertex_property, edge_property)| TomographyEntry {
            label,
            vertex_property,
            edge_property,
        })
        .collect();
    Tomography { trigger, entries }
}

/// Tomography digest of every vertex.
pub fn tomography_digests(g: &Graph, labels: Option<&[Label]>) -> Vec<Digest> {
    (0..g.n()).map(|v| tomography_unchecked(g, v, labels).digest()).collect()
}

/// Invariant of a graph built from its vertex tomographies. `Nailed` and
/// `Varied` list one multiset per layer starting at layer 0; `Arc` holds the
/// edge-nailed pattern followed by the two endpoint patterns of the graph
/// with the edge removed. Nail ids are informational and do not take part in
/// matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pattern {
    Normal {
        tomographies: Vec<Digest>,
    },
    Nailed {
        nails: VertexSet,
        layers: Vec<Vec<Digest>>,
    },
    Arc {
        tail: usize,
        head: usize,
        parts: Box<[Pattern; 3]>,
    },
    Varied {
        nails: VertexSet,
        layers: Vec<Vec<Digest>>,
    },
    VariedNormal {
        patterns: Vec<Digest>,
    },
}

fn digests_node(ds: &[Digest]) -> KeyNode {
    KeyNode::Multiset(ds.iter().map(|&d| KeyNode::Digest(d)).collect())
}

impl Canonical for Pattern {
    fn key_node(&self) -> KeyNode {
        match self {
            Pattern::Normal { tomographies } => KeyNode::List(vec![KeyNode::Int(0), digests_node(tomographies)]),
            Pattern::Nailed { layers, .. } => KeyNode::List(vec![
                KeyNode::Int(1),
                KeyNode::List(layers.iter().map(|l| digests_node(l)).collect()),
            ]),
            Pattern::Arc { parts, .. } => {
                let mut items = vec![KeyNode::Int(2)];
                items.extend(parts.iter().map(|p| KeyNode::Digest(p.digest())));
                KeyNode::List(items)
            }
            Pattern::Varied { layers, .. } => KeyNode::List(vec![
                KeyNode::Int(3),
                KeyNode::List(layers.iter().map(|l| digests_node(l)).collect()),
            ]),
            Pattern::VariedNormal { patterns } => KeyNode::List(vec![KeyNode::Int(4), digests_node(patterns)]),
        }
    }
}

impl Pattern {
    /// Total number of tomographies (or triples) across all layers.
    pub fn size(&self) -> usize {
        match self {
            Pattern::Normal { tomographies } => tomographies.len(),
            Pattern::Nailed { layers, .. } | Pattern::Varied { layers, .. } => layers.iter().map(Vec::len).sum(),
            Pattern::Arc { parts, .. } => parts[0].size(),
            Pattern::VariedNormal { patterns } => patterns.len(),
        }
    }
}

pub fn pattern_normal(g: &Graph, labels: Option<&[Label]>) -> Pattern {
    let mut tomographies = tomography_digests(g, labels);
    tomographies.sort_unstable();
    Pattern::Normal { tomographies }
}

/// Per-layer multisets of precomputed per-vertex digests.
pub(crate) fn layered_multisets(g: &Graph, nails: &[usize], per_vertex: &[Digest]) -> Vec<Vec<Digest>> {
    let (_, layers) = layer_assignment(g, nails);
    layers
        .into_iter()
        .map(|layer| {
            let mut ds: Vec<Digest> = layer.into_iter().map(|v| per_vertex[v]).collect();
            ds.sort_unstable();
            ds
        })
        .collect()
}

fn check_nails(g: &Graph, nails: &VertexSet) -> Result<(), GraphError> {
    if nails.is_empty() {
        return Err(GraphError::EmptyTriggers);
    }
    nails.iter().try_for_each(|&v| g.check_vertex(v))
}

/// Pattern of a (multi-)nailed graph; tomographies are taken in the whole of `g`.
pub fn pattern_nailed(g: &Graph, nails: &VertexSet, labels: Option<&[Label]>) -> Result<Pattern, GraphError> {
    check_nails(g, nails)?;
    let per_vertex = tomography_digests(g, labels);
    Ok(Pattern::Nailed {
        nails: nails.clone(),
        layers: layered_multisets(g, nails.as_slice(), &per_vertex),
    })
}

/// Pattern of the arc `tail -> head`.
pub fn pattern_arc(g: &Graph, tail: usize, head: usize) -> Result<Pattern, GraphError> {
    g.check_vertex(tail)?;
    g.check_vertex(head)?;
    if !g.has_edge(tail, head) {
        return Err(GraphError::NotAnEdge(tail, head));
    }
    let removed = g.toggle_edge(tail, head)?;
    let parts = arc_parts(g, &removed, tail, head, &tomography_digests(g, None), &tomography_digests(&removed, None));
    Ok(Pattern::Arc {
        tail,
        head,
        parts: Box::new(parts),
    })
}

pub(crate) fn arc_parts(
    g: &Graph,
    removed: &Graph,
    tail: usize,
    head: usize,
    digests: &[Digest],
    removed_digests: &[Digest],
) -> [Pattern; 3] {
    let edge = VertexSet::new(vec![tail, head]);
    [
        Pattern::Nailed {
            layers: layered_multisets(g, edge.as_slice(), digests),
            nails: edge,
        },
        Pattern::Nailed {
            nails: VertexSet::singleton(tail),
            layers: layered_multisets(removed, &[tail], removed_digests),
        },
        Pattern::Nailed {
            nails: VertexSet::singleton(head),
            layers: layered_multisets(removed, &[head], removed_digests),
        },
    ]
}

/// Varied pattern: per layer, the multiset of triples (tomography in `g`,
/// tomography inside the layer subgraph, tomography inside the extension
/// against the layer).
pub fn varied_pattern(g: &Graph, nails: &VertexSet) -> Result<Pattern, GraphError> {
    check_nails(g, nails)?;
    let per_vertex = tomography_digests(g, None);
    Ok(varied_with_digests(g, nails, &per_vertex))
}

fn varied_with_digests(g: &Graph, nails: &VertexSet, per_vertex: &[Digest]) -> Pattern {
    let (_, layers) = layer_assignment(g, nails.as_slice());
    let mut out = Vec::with_capacity(layers.len());
    for layer in &layers {
        let set = VertexSet::new(layer.clone());
        let (layer_graph, table) = g.induced_subgraph(&set);
        let mask = set.mask(g.n());
        let mut triples: Vec<Digest> = layer
            .iter()
            .map(|&v| {
                let local = table.binary_search(&v).unwrap();
                let in_layer = tomography_unchecked(&layer_graph, local, None);
                let ext = extension_with_mask(g, &mask, v, set.clone());
                let (ext_graph, _, base) = ext.to_graph();
                let in_ext = tomography_unchecked(&ext_graph, base, None);
                KeyNode::List(vec![
                    KeyNode::Digest(per_vertex[v]),
                    KeyNode::Digest(in_layer.digest()),
                    KeyNode::Digest(in_ext.digest()),
                ])
                .encode()
                .digest()
            })
            .collect();
        triples.sort_unstable();
        out.push(triples);
    }
    Pattern::Varied {
        nails: nails.clone(),
        layers: out,
    }
}

/// Normal-graph form of the varied pattern: the multiset of varied patterns
/// of all single-vertex nailings.
pub fn varied_pattern_normal(g: &Graph) -> Pattern {
    let per_vertex = tomography_digests(g, None);
    let mut patterns: Vec<Digest> = (0..g.n())
        .map(|v| varied_with_digests(g, &VertexSet::singleton(v), &per_vertex).digest())
        .collect();
    patterns.sort_unstable();
    Pattern::VariedNormal { patterns }
}

/// Nailed-pattern digest of every single-vertex nailing, from precomputed
/// tomography digests.
pub fn nailed_pattern_digests(g: &Graph, per_vertex: &[Digest]) -> Vec<Digest> {
    (0..g.n())
        .map(|v| {
            Pattern::Nailed {
                nails: VertexSet::singleton(v),
                layers: layered_multisets(g, &[v], per_vertex),
            }
            .digest()
        })
        .collect()
}
