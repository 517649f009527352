//! Simple undirected graphs over dense vertex ids and the structural
//! derivations built on them: degree classes, base subgraphs, complements,
//! relabelings and connected components.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Immutable simple undirected graph on vertices `0..n`.
///
/// Neighbor lists are sorted and duplicate-free, adjacency is symmetric and
/// there are no self-loops. Every constructor enforces this.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edge_list())
            .finish()
    }
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph {
            adj,
            edges: edges.len(),
        })
    }

    /// Builds a graph from edges already known to be valid. Duplicates are
    /// collapsed; self-loops are dropped.
    pub(crate) fn from_edges_lossy(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut count = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            count += list.len();
        }
        Graph {
            adj,
            edges: count / 2,
        }
    }

    /// Complete graph K_n.
    pub fn complete(n: usize) -> Self {
        Self::from_edges_lossy(
            n,
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))),
        )
    }

    /// Cycle C_n (n >= 3).
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::from_edges_lossy(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> Self {
        Self::from_edges_lossy(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges_lossy(leaves + 1, (1..=leaves).map(|i| (0, i)))
    }

    /// Complete bipartite graph K_{a,b}; the first part is `0..a`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        Self::from_edges_lossy(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
    }

    /// Vertex-disjoint union; the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let off = self.n();
        let edges = self
            .edge_list()
            .into_iter()
            .chain(other.edge_list().into_iter().map(|(u, v)| (u + off, v + off)));
        Self::from_edges_lossy(off + other.n(), edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// |N(v)|.
    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.adj[v].len())
    }

    /// Edge degree |N(u)| + |N(v)| - |N(u) ∩ N(v)| of an existing edge.
    pub fn edge_degree(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        Ok(self.adj[u].len() + self.adj[v].len() - sorted_intersection_len(&self.adj[u], &self.adj[v]))
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Edge-complement on the same vertex set.
    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut adj = Vec::with_capacity(n);
        for (u, list) in self.adj.iter().enumerate() {
            let mut row = Vec::with_capacity(n.saturating_sub(list.len() + 1));
            let mut it = list.iter().peekable();
            for v in 0..n {
                if it.peek() == Some(&&v) {
                    it.next();
                    continue;
                }
                if v != u {
                    row.push(v);
                }
            }
            adj.push(row);
        }
        let total = n * n.saturating_sub(1) / 2;
        Graph {
            adj,
            edges: total - self.edges,
        }
    }

    /// Vertices of degree exactly `w`.
    pub fn degree_class(&self, w: usize) -> VertexSet {
        VertexSet((0..self.n()).filter(|&v| self.adj[v].len() == w).collect())
    }

    /// Induced subgraph on `set`. The returned table maps new ids to the
    /// original ids (`table[new] = old`).
    pub fn induced_subgraph(&self, set: &VertexSet) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in set.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = Vec::with_capacity(set.len());
        let mut count = 0;
        for &v in set.iter() {
            let row: Vec<usize> = self.adj[v]
                .iter()
                .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                .collect();
            count += row.len();
            adj.push(row);
        }
        (Graph { adj, edges: count / 2 }, set.as_slice().to_vec())
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        check_bijection(perm, self.n())?;
        let mut adj = vec![Vec::new(); self.n()];
        for (u, list) in self.adj.iter().enumerate() {
            let mut row: Vec<usize> = list.iter().map(|&v| perm[v]).collect();
            row.sort_unstable();
            adj[perm[u]] = row;
        }
        Ok(Graph {
            adj,
            edges: self.edges,
        })
    }

    /// The graph with one edge toggled (added if absent, removed if present).
    pub fn toggle_edge(&self, u: usize, v: usize) -> Result<Graph, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let mut adj = self.adj.clone();
        let edges = if self.has_edge(u, v) {
            adj[u].retain(|&w| w != v);
            adj[v].retain(|&w| w != u);
            self.edges - 1
        } else {
            let pu = adj[u].binary_search(&v).unwrap_err();
            adj[u].insert(pu, v);
            let pv = adj[v].binary_search(&u).unwrap_err();
            adj[v].insert(pv, u);
            self.edges + 1
        };
        Ok(Graph { adj, edges })
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(VertexSet(comp));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.reachable_from(&[0]).len() == self.n()
    }

    /// Vertices reachable from any of `sources`, sorted.
    pub fn reachable_from(&self, sources: &[usize]) -> VertexSet {
        let mut seen = vec![false; self.n()];
        let mut stack: Vec<usize> = Vec::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        VertexSet((0..self.n()).filter(|&v| seen[v]).collect())
    }

    /// BFS distances from a set of sources; unreachable vertices get `usize::MAX`.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u] + 1;
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = d;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Size of the intersection of two sorted slices.
pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

pub(crate) fn check_bijection(perm: &[usize], n: usize) -> Result<(), GraphError> {
    if perm.len() != n {
        return Err(GraphError::NotABijection(format!(
            "length {} for {} vertices",
            perm.len(),
            n
        )));
    }
    let mut hit = vec![false; n];
    for &p in perm {
        if p >= n || hit[p] {
            return Err(GraphError::NotABijection(format!("image {p} out of range or repeated")));
        }
        hit[p] = true;
    }
    Ok(())
}

/// Inverse of a permutation given as an image array.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    /// Validates membership in `0..n`.
    pub fn within(ids: Vec<usize>, n: usize) -> Result<Self, GraphError> {
        if let Some(&v) = ids.iter().find(|&&v| v >= n) {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
        Ok(Self::new(ids))
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(vec![v])
    }

    pub fn all(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &usize> + '_ {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Membership bitmap over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::complete(3).disjoint_union(&Graph::complete(3))
    }

    #[test]
    fn degrees() {
        let k4 = Graph::complete(4);
        assert!((0..4).all(|v| k4.degree(v).unwrap() == 3));
        let p3 = Graph::path(3);
        assert_eq!(p3.degree(1).unwrap(), 2);
        assert_eq!(Graph::empty(1).degree(0).unwrap(), 0);
        assert!(p3.degree(3).is_err());
    }

    #[test]
    fn edge_degrees_match_formula() {
        for n in 4..9 {
            let c = Graph::cycle(n);
            // 2 + 2 - 0: neighborhoods of adjacent cycle vertices are disjoint
            for (u, v) in c.edge_list() {
                assert_eq!(c.edge_degree(u, v).unwrap(), 4);
            }
            let k = Graph::complete(n);
            for (u, v) in k.edge_list() {
                assert_eq!(k.edge_degree(u, v).unwrap(), n);
            }
        }
        let p3 = Graph::path(3);
        assert_eq!(p3.edge_degree(0, 1).unwrap(), 3);
        assert!(matches!(p3.edge_degree(0, 2), Err(GraphError::NotAnEdge(0, 2))));
    }

    #[test]
    fn strict_construction_rejects_bad_input() {
        assert!(matches!(Graph::from_edges(2, &[(0, 0)]), Err(GraphError::SelfLoop(0))));
        assert!(matches!(
            Graph::from_edges(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn complement_basics() {
        let k5 = Graph::complete(5);
        assert_eq!(k5.complement(), Graph::empty(5));
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(g.complement().complement(), g);
        assert_eq!(g.complement().edge_count(), 10 - 3);
    }

    #[test]
    fn degree_classes() {
        let p3 = Graph::path(3);
        assert_eq!(p3.degree_class(1).as_slice(), &[0, 2]);
        let k4 = Graph::complete(4);
        assert_eq!(k4.degree_class(3).len(), 4);
        assert!(k4.degree_class(2).is_empty());
    }

    #[test]
    fn induced_subgraphs() {
        let c6 = Graph::cycle(6);
        let (sub, table) = c6.induced_subgraph(&VertexSet::new(vec![0, 2, 4]));
        assert_eq!(sub, Graph::empty(3));
        assert_eq!(table, vec![0, 2, 4]);
        let k4 = Graph::complete(4);
        let (sub, _) = k4.induced_subgraph(&VertexSet::new(vec![1, 2, 3]));
        assert_eq!(sub, Graph::complete(3));
        let (same, _) = c6.induced_subgraph(&VertexSet::all(6));
        assert_eq!(same, c6);
    }

    #[test]
    fn permutations() {
        let g = Graph::path(4);
        assert_eq!(g.permute(&[0, 1, 2, 3]).unwrap(), g);
        let pi = vec![2, 0, 3, 1];
        let back = g.permute(&pi).unwrap().permute(&invert_permutation(&pi)).unwrap();
        assert_eq!(back, g);
        let k = Graph::complete(5);
        assert_eq!(k.permute(&[4, 3, 2, 1, 0]).unwrap(), k);
        assert!(g.permute(&[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn component_listing() {
        let comps = two_triangles().components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.len() == 3));
        assert_eq!(Graph::cycle(5).components(), vec![VertexSet::all(5)]);
        assert_eq!(Graph::empty(4).components().len(), 4);
    }

    #[test]
    fn toggling() {
        let g = Graph::path(3);
        let t = g.toggle_edge(0, 2).unwrap();
        assert_eq!(t, Graph::cycle(3));
        assert_eq!(t.toggle_edge(2, 0).unwrap(), g);
    }
}
