//! Collapses (BFS layerings from a trigger set), nailed graphs and
//! extensions around a base point.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{Graph, VertexSet};

/// Layering of the component(s) reachable from a trigger set.
///
/// Layer 0 is the trigger set; layer k+1 holds the unvisited neighbors of
/// layer k. `layer_graphs[k]` is the subgraph induced on `layers[k]`, with
/// vertices numbered in the order of `layers[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseLayers {
    pub trigger: VertexSet,
    pub layers: Vec<VertexSet>,
    #[serde(skip)]
    pub layer_graphs: Vec<Graph>,
}

impl CollapseLayers {
    /// Number of layers after layer 0 (the `l` of an `l + 1`-layer collapse).
    pub fn depth(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn reachable(&self) -> VertexSet {
        self.layers.iter().flat_map(|l| l.iter().copied()).collect()
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(VertexSet::len).collect()
    }

    /// Layer index per vertex of the parent graph, `None` if unreachable.
    pub fn layer_index(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (k, layer) in self.layers.iter().enumerate() {
            for &v in layer.iter() {
                out[v] = Some(k);
            }
        }
        out
    }
}

/// Layer assignment without building the per-layer subgraphs.
pub(crate) fn layer_assignment(g: &Graph, triggers: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let dist = g.distances_from(triggers);
    let depth = dist.iter().filter(|&&d| d != usize::MAX).max().copied().unwrap_or(0);
    let mut layers = vec![Vec::new(); if triggers.is_empty() { 0 } else { depth + 1 }];
    for (v, &d) in dist.iter().enumerate() {
        if d != usize::MAX {
            layers[d].push(v);
        }
    }
    (dist, layers)
}

pub fn collapse(g: &Graph, triggers: &VertexSet) -> Result<CollapseLayers, GraphError> {
    if triggers.is_empty() {
        return Err(GraphError::EmptyTriggers);
    }
    for &t in triggers.iter() {
        g.check_vertex(t)?;
    }
    let (_, layers) = layer_assignment(g, triggers.as_slice());
    let layers: Vec<VertexSet> = layers.into_iter().map(VertexSet::new).collect();
    let layer_graphs = layers.iter().map(|l| g.induced_subgraph(l).0).collect();
    Ok(CollapseLayers {
        trigger: triggers.clone(),
        layers,
        layer_graphs,
    })
}

/// A collapse with the edges between consecutive layers restored. Only the
/// part of the graph reachable from the nails is kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NailedGraph {
    pub layers: CollapseLayers,
    /// Edges with both ends in one layer, in parent ids.
    pub within_layer_edges: Vec<(usize, usize)>,
    /// Edges joining layer k and layer k+1, in parent ids, layer-k end first.
    pub between_layer_edges: Vec<(usize, usize)>,
}

impl NailedGraph {
    pub fn vertex_count(&self) -> usize {
        self.layers.layers.iter().map(VertexSet::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.within_layer_edges.len() + self.between_layer_edges.len()
    }

    /// The nailed graph as a standalone graph. `table[new] = parent id`;
    /// new ids follow the sorted reachable set.
    pub fn to_graph(&self, parent: &Graph) -> (Graph, Vec<usize>) {
        parent.induced_subgraph(&self.layers.reachable())
    }
}

pub fn nailed_graph(g: &Graph, nails: &VertexSet) -> Result<NailedGraph, GraphError> {
    let layers = collapse(g, nails)?;
    let index = layers.layer_index(g.n());
    let mut within = Vec::new();
    let mut between = Vec::new();
    for (u, v) in g.edge_list() {
        match (index[u], index[v]) {
            (Some(a), Some(b)) if a == b => within.push((u, v)),
            (Some(a), Some(b)) if a + 1 == b => between.push((u, v)),
            (Some(a), Some(b)) if b + 1 == a => between.push((v, u)),
            (None, None) => {}
            _ => unreachable!("BFS layering never skips a layer"),
        }
    }
    Ok(NailedGraph {
        layers,
        within_layer_edges: within,
        between_layer_edges: between,
    })
}

/// Closure of a base point against a base set.
///
/// The vertex set is the smallest set containing the base point and its
/// neighbors outside the base set, closed under "a member outside the base
/// set brings in its whole neighborhood". Edges are the parent edges with at
/// least one end outside the base set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub base_point: usize,
    pub base_set: VertexSet,
    pub vertices: VertexSet,
    pub edges: Vec<(usize, usize)>,
}

impl Extension {
    pub fn is_degenerate(&self) -> bool {
        self.edges.is_empty()
    }

    /// Standalone graph plus `table[new] = parent id`; the base point's new
    /// id is returned too.
    pub fn to_graph(&self) -> (Graph, Vec<usize>, usize) {
        let table = self.vertices.as_slice().to_vec();
        let local = |v: usize| table.binary_search(&v).expect("edge endpoint inside extension");
        let g = Graph::from_edges_lossy(table.len(), self.edges.iter().map(|&(u, v)| (local(u), local(v))));
        let base = local(self.base_point);
        (g, table, base)
    }
}

pub fn extension(g: &Graph, base_set: &VertexSet, base_point: usize) -> Result<Extension, GraphError> {
    g.check_vertex(base_point)?;
    if !base_set.contains(base_point) {
        return Err(GraphError::BasePointOutsideBase(base_point));
    }
    let in_base = base_set.mask(g.n());
    Ok(extension_with_mask(g, &in_base, base_point, base_set.clone()))
}

pub(crate) fn extension_vertices(g: &Graph, in_base: &[bool], base_point: usize) -> Vec<usize> {
    let mut member = vec![false; g.n()];
    member[base_point] = true;
    let mut members = vec![base_point];
    let mut work = Vec::new();
    for &w in g.neighbors(base_point) {
        if !in_base[w] && !member[w] {
            member[w] = true;
            members.push(w);
            work.push(w);
        }
    }
    while let Some(u) = work.pop() {
        for &w in g.neighbors(u) {
            if !member[w] {
                member[w] = true;
                members.push(w);
                if !in_base[w] {
                    work.push(w);
                }
            }
        }
    }
    members.sort_unstable();
    members
}

pub(crate) fn extension_with_mask(g: &Graph, in_base: &[bool], base_point: usize, base_set: VertexSet) -> Extension {
    let members = extension_vertices(g, in_base, base_point);
    let mut edges = Vec::new();
    for &u in &members {
        if in_base[u] {
            continue;
        }
        for &w in g.neighbors(u) {
            if in_base[w] || u < w {
                edges.push((u.min(w), u.max(w)));
            }
        }
    }
    edges.sort_unstable();
    Extension {
        base_point,
        base_set,
        vertices: VertexSet::new(members),
        edges,
    }
}
