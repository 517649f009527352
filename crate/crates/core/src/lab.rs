//! Counterexample search for the five pattern conjectures over graph corpora.
//!
//! | id | name          | hypothesis                          | conclusion               |
//! |----|---------------|-------------------------------------|--------------------------|
//! | 1  | iso-pat       | normal patterns of two graphs match | the graphs are isomorphic |
//! | 2  | nail-iso-pat  | nailed patterns of two nailings match | constrained isomorphism |
//! | 3  | sym-pat       | all vertex tomographies match       | vertex symmetric          |
//! | 4  | edge-sym-pat  | all edge-nailed patterns match      | edge symmetric            |
//! | 5  | arc-sym-pat   | all arc patterns match              | arc symmetric             |
//!
//! The proven directions (symmetry implies regularity and matching patterns)
//! are checked along the way; a failure there is a bug and aborts the run.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constraint::Constraint;
use crate::error::{LabError, OracleError};
use crate::format::{parse_graph, to_graph6, Format};
use crate::graph::Graph;
use crate::key::{Canonical, Digest};
use crate::oracle::{corpus_up_to, default_colors, oracle_iso_colored, oracle_nailed_iso, SearchBudget};
use crate::symmetry::{
    arc_pattern_digests, edge_pattern_digests, is_arc_symmetric_exact, is_edge_regular, is_edge_symmetric_exact,
    is_vertex_indistinguishable, is_vertex_regular, is_vertex_symmetric_exact, ExactSymmetry, Indistinguishability,
    SymmetryConfig,
};
use crate::tomography::{nailed_pattern_digests, pattern_normal, tomography_digests};

pub const CONJECTURE_IDS: [u8; 5] = [1, 2, 3, 4, 5];

pub fn conjecture_name(id: u8) -> Result<&'static str, LabError> {
    Ok(match id {
        1 => "iso-pat",
        2 => "nail-iso-pat",
        3 => "sym-pat",
        4 => "edge-sym-pat",
        5 => "arc-sym-pat",
        other => return Err(LabError::UnknownConjecture(other)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDescriptor {
    /// `enumerated`, `random`, or the name of an external corpus.
    pub source: String,
    pub n_min: usize,
    pub n_max: usize,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct LabCorpus {
    pub descriptor: CorpusDescriptor,
    pub graphs: Vec<Graph>,
}

impl LabCorpus {
    /// One graph per isomorphism class for every size in `n_min..=n_max`.
    pub fn enumerated(n_min: usize, n_max: usize, budget: SearchBudget) -> Result<Self, LabError> {
        let graphs: Vec<Graph> = corpus_up_to(n_max, budget)?.into_iter().filter(|g| g.n() >= n_min).collect();
        Ok(Self::describe("enumerated", graphs))
    }

    pub fn external(name: &str, graphs: Vec<Graph>) -> Self {
        Self::describe(name, graphs)
    }

    fn describe(source: &str, graphs: Vec<Graph>) -> Self {
        let n_min = graphs.iter().map(Graph::n).min().unwrap_or(0);
        let n_max = graphs.iter().map(Graph::n).max().unwrap_or(0);
        LabCorpus {
            descriptor: CorpusDescriptor {
                source: source.to_string(),
                n_min,
                n_max,
                count: graphs.len(),
            },
            graphs,
        }
    }
}

/// A hypothesis that held while its conclusion failed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Counterexample {
    /// One graph for the symmetry conjectures, two for the pair conjectures.
    pub graphs: Vec<String>,
    /// Nails per graph (conjecture 2), empty otherwise.
    pub nails: Vec<Vec<usize>>,
    /// Failing nail pair for the symmetry conjectures.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

impl Counterexample {
    /// Recomputes both the matching hypothesis and the oracle refutation.
    pub fn reverify(&self, id: u8, budget: SearchBudget) -> Result<bool, LabError> {
        let graphs: Vec<Graph> = self
            .graphs
            .iter()
            .map(|s| parse_graph(s.as_bytes(), Format::Graph6))
            .collect::<Result<_, _>>()?;
        let cfg = SymmetryConfig::with_budget(budget);
        Ok(match (id, graphs.as_slice()) {
            (1, [g, h]) => {
                pattern_normal(g, None).digest() == pattern_normal(h, None).digest()
                    && oracle_iso_colored(g, h, &default_colors(g), &default_colors(h), &Constraint::none(), budget)?.is_none()
            }
            (2, [g, h]) => {
                let (a, b) = match self.nails.as_slice() {
                    [a, b] if a.len() == 1 && b.len() == 1 => (a[0], b[0]),
                    _ => return Ok(false),
                };
                nailed_digest(g, a) == nailed_digest(h, b) && oracle_nailed_iso(g, &[a], h, &[b], budget)?.is_none()
            }
            (3, [g]) => hypothesis(3, g) && !is_vertex_symmetric_exact(g, &cfg)?.holds,
            (4, [g]) => hypothesis(4, g) && !is_edge_symmetric_exact(g, &cfg)?.holds,
            (5, [g]) => hypothesis(5, g) && !is_arc_symmetric_exact(g, &cfg)?.holds,
            (1..=5, _) => false,
            (other, _) => return Err(LabError::UnknownConjecture(other)),
        })
    }
}

fn nailed_digest(g: &Graph, v: usize) -> Digest {
    nailed_pattern_digests(g, &tomography_digests(g, None))[v]
}

fn all_equal(d: &[Digest]) -> bool {
    d.windows(2).all(|w| w[0] == w[1])
}

fn hypothesis(id: u8, g: &Graph) -> bool {
    match id {
        3 => is_vertex_indistinguishable(g, Indistinguishability::Tomographies),
        4 => all_equal(&edge_pattern_digests(g)),
        5 => all_equal(&arc_pattern_digests(g).into_iter().map(|(_, d)| d).collect::<Vec<_>>()),
        _ => unreachable!("single-graph hypotheses are 3..=5"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub id: u8,
    pub name: String,
    pub corpus: CorpusDescriptor,
    /// Pairs (conjectures 1, 2) or graphs (3-5) examined.
    pub checked: u64,
    pub hypothesis_held: u64,
    pub counterexamples: Vec<Counterexample>,
    pub seconds: f64,
    pub seed: u64,
}

impl ConjectureReport {
    pub fn summary(&self) -> String {
        format!(
            "conjecture {} ({}): {} checked, {} hypothesis matches, {} counterexamples [{} graphs, n={}..{}, {}]",
            self.id,
            self.name,
            self.checked,
            self.hypothesis_held,
            self.counterexamples.len(),
            self.corpus.count,
            self.corpus.n_min,
            self.corpus.n_max,
            self.corpus.source
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabConfig {
    pub ids: Vec<u8>,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
    pub seed: u64,
    pub budget: SearchBudget,
    /// Record wall-clock seconds; off makes reports byte-reproducible.
    pub timing: bool,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            ids: CONJECTURE_IDS.to_vec(),
            jobs: 1,
            seed: 0,
            budget: SearchBudget::default(),
            timing: true,
        }
    }
}

fn pairs_of(k: usize) -> u64 {
    (k as u64) * (k as u64).saturating_sub(1) / 2
}

/// Partitions `items` into classes of the equivalence `same`, comparing
/// each item with one representative per class.
fn partition<T>(items: &[T], mut same: impl FnMut(&T, &T) -> Result<bool, OracleError>) -> Result<Vec<Vec<usize>>, OracleError> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'items: for (i, it) in items.iter().enumerate() {
        for class in classes.iter_mut() {
            if same(&items[class[0]], it)? {
                class.push(i);
                continue 'items;
            }
        }
        classes.push(vec![i]);
    }
    Ok(classes)
}

/// Counterexamples from one bucket: every pair of class representatives.
fn class_pairs(classes: &[Vec<usize>], mut make: impl FnMut(usize, usize) -> Counterexample) -> Vec<Counterexample> {
    let mut out = Vec::new();
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            out.push(make(a[0], b[0]));
        }
    }
    out
}

/// Conjecture 1 over every unordered pair of corpus graphs, sizes mixed.
pub fn check_conjecture_1(corpus: &LabCorpus, cfg: &LabConfig) -> Result<ConjectureReport, LabError> {
    let start = Instant::now();
    let keyed: Vec<(Digest, Vec<u64>)> = corpus
        .graphs
        .par_iter()
        .map(|g| (pattern_normal(g, None).digest(), default_colors(g)))
        .collect();
    let mut buckets: BTreeMap<Digest, Vec<usize>> = BTreeMap::new();
    for (i, (d, _)) in keyed.iter().enumerate() {
        buckets.entry(*d).or_default().push(i);
    }
    let buckets: Vec<Vec<usize>> = buckets.into_values().collect();
    let held = buckets.iter().map(|b| pairs_of(b.len())).sum();
    let found: Vec<Vec<Counterexample>> = buckets
        .par_iter()
        .filter(|b| b.len() > 1)
        .map(|bucket| {
            let classes = partition(bucket, |&x, &y| {
                let (g, h) = (&corpus.graphs[x], &corpus.graphs[y]);
                Ok(oracle_iso_colored(g, h, &keyed[x].1, &keyed[y].1, &Constraint::none(), cfg.budget)?.is_some())
            })?;
            Ok(class_pairs(&classes, |a, b| Counterexample {
                graphs: vec![to_graph6(&corpus.graphs[bucket[a]]), to_graph6(&corpus.graphs[bucket[b]])],
                nails: Vec::new(),
                witness: None,
            }))
        })
        .collect::<Result<_, OracleError>>()?;
    Ok(finish(1, corpus, cfg, pairs_of(corpus.graphs.len()), held, found, start))
}

/// Conjecture 2 over every unordered pair of (graph, nail) items, including
/// two nailings of the same graph and graphs of different sizes.
pub fn check_conjecture_2(corpus: &LabCorpus, cfg: &LabConfig) -> Result<ConjectureReport, LabError> {
    let start = Instant::now();
    let per_graph: Vec<Vec<Digest>> = corpus
        .graphs
        .par_iter()
        .map(|g| nailed_pattern_digests(g, &tomography_digests(g, None)))
        .collect();
    let mut buckets: BTreeMap<Digest, Vec<(usize, usize)>> = BTreeMap::new();
    for (gi, ds) in per_graph.iter().enumerate() {
        for (v, d) in ds.iter().enumerate() {
            buckets.entry(*d).or_default().push((gi, v));
        }
    }
    let items: u64 = per_graph.iter().map(|d| d.len() as u64).sum();
    let buckets: Vec<Vec<(usize, usize)>> = buckets.into_values().collect();
    let held = buckets.iter().map(|b| pairs_of(b.len())).sum();
    let found: Vec<Vec<Counterexample>> = buckets
        .par_iter()
        .filter(|b| b.len() > 1)
        .map(|bucket| {
            let classes = partition(bucket, |&(gx, x), &(gy, y)| {
                Ok(oracle_nailed_iso(&corpus.graphs[gx], &[x], &corpus.graphs[gy], &[y], cfg.budget)?.is_some())
            })?;
            Ok(class_pairs(&classes, |a, b| {
                let ((ga, va), (gb, vb)) = (bucket[a], bucket[b]);
                Counterexample {
                    graphs: vec![to_graph6(&corpus.graphs[ga]), to_graph6(&corpus.graphs[gb])],
                    nails: vec![vec![va], vec![vb]],
                    witness: None,
                }
            }))
        })
        .collect::<Result<_, OracleError>>()?;
    Ok(finish(2, corpus, cfg, items * items.saturating_sub(1) / 2, held, found, start))
}

fn violation(g: &Graph, what: &str) -> LabError {
    LabError::LemmaViolation {
        graph6: to_graph6(g),
        what: what.to_string(),
    }
}

fn has_isolated_vertex(g: &Graph) -> bool {
    (0..g.n()).any(|v| g.neighbors(v).is_empty())
}

/// The proven directions for one graph, given its exact symmetry results.
fn check_lemmas(g: &Graph, vertex: Option<&ExactSymmetry>, edge: Option<&ExactSymmetry>, arc: Option<&ExactSymmetry>) -> Result<(), LabError> {
    if vertex.is_some_and(|v| v.holds) {
        if !is_vertex_regular(g) {
            return Err(violation(g, "vertex symmetric but not vertex regular"));
        }
        if !hypothesis(3, g) {
            return Err(violation(g, "vertex symmetric but tomographies differ"));
        }
    }
    if edge.is_some_and(|e| e.holds) {
        if !is_edge_regular(g) {
            return Err(violation(g, "edge symmetric but not edge regular"));
        }
        if !hypothesis(4, g) {
            return Err(violation(g, "edge symmetric but edge-nailed patterns differ"));
        }
    }
    if arc.is_some_and(|a| a.holds) {
        if !hypothesis(5, g) {
            return Err(violation(g, "arc symmetric but arc patterns differ"));
        }
        if edge.is_some_and(|e| !e.holds) {
            return Err(violation(g, "arc symmetric but not edge symmetric"));
        }
        if !has_isolated_vertex(g) && vertex.is_some_and(|v| !v.holds) {
            return Err(violation(g, "arc symmetric without isolated vertices but not vertex symmetric"));
        }
    }
    Ok(())
}

/// Conjectures 3-5: per graph, the uniform-pattern hypothesis must imply
/// the exact symmetry.
pub fn check_symmetry_conjecture(id: u8, corpus: &LabCorpus, cfg: &LabConfig) -> Result<ConjectureReport, LabError> {
    conjecture_name(id)?;
    if !(3..=5).contains(&id) {
        return Err(LabError::UnknownConjecture(id));
    }
    let start = Instant::now();
    let sym = SymmetryConfig::with_budget(cfg.budget);
    let results: Vec<(bool, Option<Counterexample>)> = corpus
        .graphs
        .par_iter()
        .map(|g| -> Result<_, LabError> {
            let vertex = is_vertex_symmetric_exact(g, &sym)?;
            let edge = is_edge_symmetric_exact(g, &sym)?;
            let arc = if id == 5 { Some(is_arc_symmetric_exact(g, &sym)?) } else { None };
            check_lemmas(g, Some(&vertex), Some(&edge), arc.as_ref())?;
            let held = hypothesis(id, g);
            let conclusion = match id {
                3 => &vertex,
                4 => &edge,
                _ => arc.as_ref().unwrap(),
            };
            let cex = (held && !conclusion.holds).then(|| Counterexample {
                graphs: vec![to_graph6(g)],
                nails: Vec::new(),
                witness: conclusion.witness.clone(),
            });
            Ok((held, cex))
        })
        .collect::<Result<_, LabError>>()?;
    let held = results.iter().filter(|r| r.0).count() as u64;
    let found = vec![results.into_iter().filter_map(|r| r.1).collect()];
    Ok(finish(id, corpus, cfg, corpus.graphs.len() as u64, held, found, start))
}

pub fn check_conjecture_3(corpus: &LabCorpus, cfg: &LabConfig) -> Result<ConjectureReport, LabError> {
    check_symmetry_conjecture(3, corpus, cfg)
}

pub fn check_conjecture_4(corpus: &LabCorpus, cfg: &LabConfig) -> Result<ConjectureReport, LabError> {
    check_symmetry_conjecture(4, corpus, cfg)
}

pub fn check_conjecture_5(corpus: &LabCorpus, cfg: &LabConfig) -> Result<ConjectureReport, LabError> {
    check_symmetry_conjecture(5, corpus, cfg)
}

fn finish(
    id: u8,
    corpus: &LabCorpus,
    cfg: &LabConfig,
    checked: u64,
    hypothesis_held: u64,
    found: Vec<Vec<Counterexample>>,
    start: Instant,
) -> ConjectureReport {
    let mut counterexamples: Vec<Counterexample> = found.into_iter().flatten().collect();
    counterexamples.sort();
    ConjectureReport {
        id,
        name: conjecture_name(id).expect("checked id").to_string(),
        corpus: corpus.descriptor.clone(),
        checked,
        hypothesis_held,
        counterexamples,
        seconds: if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 },
        seed: cfg.seed,
    }
}

fn check_one(id: u8, corpus: &LabCorpus, cfg: &LabConfig) -> Result<ConjectureReport, LabError> {
    match id {
        1 => check_conjecture_1(corpus, cfg),
        2 => check_conjecture_2(corpus, cfg),
        3..=5 => check_symmetry_conjecture(id, corpus, cfg),
        other => Err(LabError::UnknownConjecture(other)),
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

/// Runs the selected conjectures over `corpus`, reports ordered by id.
pub fn run_suite(corpus: &LabCorpus, cfg: &LabConfig) -> Result<Vec<ConjectureReport>, LabError> {
    let mut ids = cfg.ids.clone();
    ids.sort_unstable();
    ids.dedup();
    for &id in &ids {
        conjecture_name(id)?;
    }
    pool(cfg.jobs).install(|| ids.iter().map(|&id| check_one(id, corpus, cfg)).collect())
}

/// Random graph with each edge present with probability one half.
pub fn random_graph(n: usize, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for v in 0..n {
        for u in 0..v {
            if rng.gen_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("simple by construction")
}

/// Uniform-ish random `d`-regular graph by the pairing model, restarting on
/// loops and repeated pairs. `None` when `n * d` is odd or `d >= n`.
pub fn random_regular_graph(n: usize, d: usize, rng: &mut impl Rng) -> Option<Graph> {
    if (n * d) % 2 == 1 || (d >= n && n > 0) {
        return None;
    }
    'attempt: loop {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        points.shuffle(rng);
        let mut edges = Vec::with_capacity(points.len() / 2);
        let mut seen = std::collections::HashSet::new();
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Some(Graph::from_edges(n, &edges).expect("simple by construction"));
    }
}

/// Moves one random edge to a random non-edge, keeping the edge count.
pub fn move_random_edge(g: &Graph, rng: &mut impl Rng) -> Graph {
    let edges = g.edge_list();
    let non: Vec<(usize, usize)> = (0..g.n())
        .flat_map(|v| (0..v).map(move |u| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    match (edges.choose(rng), non.choose(rng)) {
        (Some(&(a, b)), Some(&(c, d))) => g.toggle_edge(a, b).and_then(|x| x.toggle_edge(c, d)).expect("valid toggles"),
        _ => g.clone(),
    }
}

/// Seeded random spot check of conjectures 1 and 2: `pairs` pairs on `n`
/// vertices, each a relabeled copy or a moved-edge variant of a random graph.
pub fn spot_check(n: usize, pairs: usize, cfg: &LabConfig) -> Result<Vec<ConjectureReport>, LabError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut work = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let g = random_graph(n, &mut rng);
        let h = if rng.gen_bool(0.5) {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            g.permute(&perm).expect("permutation")
        } else {
            move_random_edge(&g, &mut rng)
        };
        let (a, b) = (rng.gen_range(0..n.max(1)), rng.gen_range(0..n.max(1)));
        work.push((g, h, a, b));
    }
    let descriptor = CorpusDescriptor {
        source: "random".into(),
        n_min: n,
        n_max: n,
        count: 2 * pairs,
    };
    let corpus = LabCorpus {
        descriptor,
        graphs: Vec::new(),
    };
    let mut ids: Vec<u8> = cfg.ids.iter().copied().filter(|id| *id <= 2).collect();
    ids.sort_unstable();
    ids.dedup();
    let per_pair = |id: u8, (g, h, a, b): &(Graph, Graph, usize, usize)| -> Result<(bool, Option<Counterexample>), LabError> {
        Ok(if id == 1 {
            let held = pattern_normal(g, None).digest() == pattern_normal(h, None).digest();
            let fails = held && oracle_iso_colored(g, h, &default_colors(g), &default_colors(h), &Constraint::none(), cfg.budget)?.is_none();
            (held, fails.then(|| Counterexample {
                graphs: vec![to_graph6(g), to_graph6(h)],
                nails: Vec::new(),
                witness: None,
            }))
        } else {
            if n == 0 {
                return Ok((false, None));
            }
            let held = nailed_digest(g, *a) == nailed_digest(h, *b);
            let fails = held && oracle_nailed_iso(g, &[*a], h, &[*b], cfg.budget)?.is_none();
            (held, fails.then(|| Counterexample {
                graphs: vec![to_graph6(g), to_graph6(h)],
                nails: vec![vec![*a], vec![*b]],
                witness: None,
            }))
        })
    };
    pool(cfg.jobs).install(|| {
        ids.iter()
            .map(|&id| {
                let results: Vec<(bool, Option<Counterexample>)> =
                    work.par_iter().map(|w| per_pair(id, w)).collect::<Result<_, LabError>>()?;
                let held = results.iter().filter(|r| r.0).count() as u64;
                let found = vec![results.into_iter().filter_map(|r| r.1).collect()];
                Ok(finish(id, &corpus, cfg, pairs as u64, held, found, start))
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> LabConfig {
        LabConfig {
            timing: false,
            ..LabConfig::default()
        }
    }

    #[test]
    fn small_graphs_have_no_counterexamples() {
        let corpus = LabCorpus::enumerated(1, 5, SearchBudget::default()).unwrap();
        assert_eq!(corpus.graphs.len(), 1 + 2 + 4 + 11 + 34);
        for r in run_suite(&corpus, &quiet()).unwrap() {
            assert!(r.counterexamples.is_empty(), "{}", r.summary());
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn empty_corpus() {
        let corpus = LabCorpus::external("empty", Vec::new());
        for r in run_suite(&corpus, &quiet()).unwrap() {
            assert_eq!((r.checked, r.hypothesis_held, r.counterexamples.len()), (0, 0, 0));
        }
    }

    #[test]
    fn relabeled_pair_holds_both_ways() {
        let g = Graph::path(4);
        let corpus = LabCorpus::external("pair", vec![g.clone(), g.permute(&[2, 0, 3, 1]).unwrap()]);
        let r = check_conjecture_1(&corpus, &quiet()).unwrap();
        assert_eq!((r.checked, r.hypothesis_held), (1, 1));
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn symmetric_families() {
        let corpus = LabCorpus::external("fam", vec![Graph::cycle(5), Graph::cycle(8), Graph::star(3), Graph::path(4)]);
        let r3 = check_conjecture_3(&corpus, &quiet()).unwrap();
        assert_eq!(r3.hypothesis_held, 2);
        let r4 = check_conjecture_4(&corpus, &quiet()).unwrap();
        assert_eq!(r4.hypothesis_held, 3);
        assert!(r3.counterexamples.is_empty() && r4.counterexamples.is_empty());
    }

    #[test]
    fn disconnected_non_transitive_graph_is_found() {
        // Triangle plus a disjoint edge: the edge-nailed patterns differ, so
        // the hypothesis fails; a single-graph report stays consistent.
        let g = Graph::complete(3).disjoint_union(&Graph::path(2));
        let corpus = LabCorpus::external("x", vec![g]);
        let r = check_conjecture_4(&corpus, &quiet()).unwrap();
        assert_eq!(r.hypothesis_held, 0);
    }

    #[test]
    fn reports_are_reproducible() {
        let corpus = LabCorpus::enumerated(1, 4, SearchBudget::default()).unwrap();
        let a = serde_json::to_string(&run_suite(&corpus, &quiet()).unwrap()).unwrap();
        let cfg = LabConfig { jobs: 3, ..quiet() };
        let b = serde_json::to_string(&run_suite(&corpus, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let s1 = serde_json::to_string(&spot_check(12, 50, &quiet()).unwrap()).unwrap();
        let s2 = serde_json::to_string(&spot_check(12, 50, &quiet()).unwrap()).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn random_regular_graphs_are_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_regular_graph(64, 3, &mut rng).unwrap();
        assert!((0..64).all(|v| g.neighbors(v).len() == 3));
        assert!(random_regular_graph(7, 3, &mut rng).is_none());
    }

    #[test]
    fn unknown_id() {
        let cfg = LabConfig { ids: vec![6], ..quiet() };
        assert!(matches!(
            run_suite(&LabCorpus::external("e", vec![]), &cfg),
            Err(LabError::UnknownConjecture(6))
        ));
    }
}
