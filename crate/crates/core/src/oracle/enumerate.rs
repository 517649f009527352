//! Small-graph corpora: one representative per isomorphism class.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{default_colors, oracle_iso_colored, SearchBudget};
use crate::constraint::Constraint;
use crate::error::OracleError;
use crate::format::to_graph6;
use crate::graph::Graph;

/// Isomorphism-class deduplicator. Graphs are bucketed by edge count and
/// the sorted multiset of oracle colors; only bucket mates reach the oracle.
struct ClassSet {
    buckets: HashMap<(usize, usize, Vec<u64>), Vec<usize>>,
    reps: Vec<(Graph, Vec<u64>)>,
    budget: SearchBudget,
}

impl ClassSet {
    fn new(budget: SearchBudget) -> Self {
        ClassSet {
            buckets: HashMap::new(),
            reps: Vec::new(),
            budget,
        }
    }

    fn bucket_key(g: &Graph, colors: &[u64]) -> (usize, usize, Vec<u64>) {
        let mut sorted = colors.to_vec();
        sorted.sort_unstable();
        (g.n(), g.edge_count(), sorted)
    }

    /// Inserts `g` unless an isomorphic graph is present; true if inserted.
    fn insert(&mut self, g: Graph, colors: Vec<u64>) -> Result<bool, OracleError> {
        let key = Self::bucket_key(&g, &colors);
        let bucket = self.buckets.entry(key).or_default();
        for &i in bucket.iter() {
            let (rep, rep_colors) = &self.reps[i];
            if oracle_iso_colored(&g, rep, &colors, rep_colors, &Constraint::none(), self.budget)?.is_some() {
                return Ok(false);
            }
        }
        bucket.push(self.reps.len());
        self.reps.push((g, colors));
        Ok(true)
    }

    fn into_graphs(self) -> Vec<Graph> {
        self.reps.into_iter().map(|(g, _)| g).collect()
    }
}

fn sort_corpus(graphs: &mut [Graph]) {
    graphs.sort_by_cached_key(|g| (g.edge_count(), to_graph6(g)));
}

/// One graph per isomorphism class on `n` vertices, ordered by edge count
/// then graph6. Built by adding a vertex with every possible neighborhood
/// to each class representative on `n - 1` vertices. `n = 0` yields nothing.
pub fn enumerate_nonisomorphic(n: usize, budget: SearchBudget) -> Result<Vec<Graph>, OracleError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut level = vec![Graph::empty(1)];
    for m in 2..=n {
        level = extend_level(&level, m, budget)?;
    }
    Ok(level)
}

fn extend_level(prev: &[Graph], m: usize, budget: SearchBudget) -> Result<Vec<Graph>, OracleError> {
    let new = m - 1;
    let candidates: Vec<(Graph, Vec<u64>)> = prev
        .par_iter()
        .flat_map_iter(|g| {
            let edges = g.edge_list();
            (0u64..1 << new).map(move |subset| {
                let mut e = edges.clone();
                e.extend((0..new).filter(|&u| subset >> u & 1 == 1).map(|u| (u, new)));
                Graph::from_edges_lossy(m, e)
            })
        })
        .map(|g| {
            let c = default_colors(&g);
            (g, c)
        })
        .collect();
    let mut classes = ClassSet::new(budget);
    for (g, c) in candidates {
        classes.insert(g, c)?;
    }
    let mut out = classes.into_graphs();
    sort_corpus(&mut out);
    Ok(out)
}

/// All classes on `1..=n_max` vertices, smallest graphs first.
pub fn corpus_up_to(n_max: usize, budget: SearchBudget) -> Result<Vec<Graph>, OracleError> {
    let mut out = Vec::new();
    let mut level = Vec::new();
    for n in 1..=n_max {
        level = if n == 1 {
            vec![Graph::empty(1)]
        } else {
            extend_level(&level, n, budget)?
        };
        out.extend(level.iter().cloned());
    }
    Ok(out)
}

/// Keeps the first member of each isomorphism class, in input order.
pub fn dedup_corpus(graphs: Vec<Graph>, budget: SearchBudget) -> Result<Vec<Graph>, OracleError> {
    let colored: Vec<(Graph, Vec<u64>)> = graphs
        .into_par_iter()
        .map(|g| {
            let c = default_colors(&g);
            (g, c)
        })
        .collect();
    let mut classes = ClassSet::new(budget);
    for (g, c) in colored {
        classes.insert(g, c)?;
    }
    Ok(classes.into_graphs())
}

/// Every labeled graph on `n` vertices, in upper-triangle counting order.
///
/// # Panics
/// If `n > 11` (more than 2^55 graphs).
pub fn all_labeled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!(n <= 11, "labeled enumeration is limited to n <= 11");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
    let total: u64 = 1 << pairs.len();
    (0..total).map(move |bits| {
        Graph::from_edges_lossy(
            n,
            pairs.iter().enumerate().filter(|&(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_small() {
        let counts: Vec<usize> = (0..=5)
            .map(|n| enumerate_nonisomorphic(n, SearchBudget::default()).unwrap().len())
            .collect();
        assert_eq!(counts, vec![0, 1, 2, 4, 11, 34]);
    }

    #[test]
    fn labeled_dedup_agrees_with_extension() {
        // Independent route: all 2^10 labeled graphs on 5 vertices.
        let all: Vec<Graph> = all_labeled_graphs(5).collect();
        assert_eq!(all.len(), 1024);
        let classes = dedup_corpus(all, SearchBudget::default()).unwrap();
        assert_eq!(classes.len(), 34);
    }

    #[test]
    fn corpus_is_sorted_and_cumulative() {
        let c = corpus_up_to(4, SearchBudget::default()).unwrap();
        assert_eq!(c.len(), 1 + 2 + 4 + 11);
        let four: Vec<_> = c.iter().filter(|g| g.n() == 4).collect();
        assert_eq!(four.first().unwrap().edge_count(), 0);
        assert_eq!(four.last().unwrap().edge_count(), 6);
    }
}
