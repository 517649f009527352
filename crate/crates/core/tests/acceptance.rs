//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one status line; the process fails if any
//! hard criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use collapse_iso::engine::{gi, verify_mapping, EngineConfig, Verdict};
use collapse_iso::format::{emit_graph, parse_graph};
use collapse_iso::lab::{self, LabConfig, LabCorpus};
use collapse_iso::oracle::{all_labeled_graphs, corpus_up_to, oracle_automorphisms, oracle_iso};
use collapse_iso::symmetry::{
    classify, is_edge_regular, is_vertex_regular, pattern_symmetry_tests, SymmetryConfig,
};
use collapse_iso::tomography::{
    pattern_arc, pattern_nailed, pattern_normal, tomography, varied_pattern_normal, vertex_property,
};
use collapse_iso::{to_graph6, Canonical, Constraint, Format, Graph, SearchBudget, VertexSet};

// Pinned thresholds.
const CONJECTURE_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_EQUIVALENCE_LIMIT: Duration = Duration::from_secs(600);
const ORACLE_EQUIVALENCE_JOBS: usize = 4;
const RANDOM_TRIALS: usize = 1000;
const RANDOM_N: (usize, usize) = (8, 40);
const ORACLE_CUTOFF: usize = 12;
const LEMMA_PAIRS: usize = 500;
const INVARIANCE_GRAPHS: usize = 200;
const INVARIANCE_RELABELINGS: usize = 100;
const TREND_SIZES: [usize; 4] = [128, 256, 512, 1024];
const TREND_TRIALS: usize = 5;
const TREND_MAX_RATIO: f64 = 16.0;
const SEED: u64 = 0x5eed_2024;

struct Outcome {
    passed: bool,
    /// Report-only criteria never fail the run.
    report_only: bool,
    detail: String,
}

impl Outcome {
    fn check(passed: bool, detail: String) -> Self {
        Outcome { passed, report_only: false, detail }
    }
}

fn budget() -> SearchBudget {
    SearchBudget::default()
}

fn random_perm(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn corpus6() -> Vec<Graph> {
    corpus_up_to(6, budget()).expect("enumeration")
}

fn conjectures_on_small_graphs() -> Outcome {
    let start = Instant::now();
    let corpus = LabCorpus::enumerated(1, 5, budget()).expect("corpus");
    let cfg = LabConfig {
        ids: vec![1, 2, 3, 4, 5],
        jobs: 1,
        ..LabConfig::default()
    };
    let reports = match lab::run_suite(&corpus, &cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::check(false, format!("lab error: {e}")),
    };
    let elapsed = start.elapsed();
    let found: usize = reports.iter().map(|r| r.counterexamples.len()).sum();
    let classes = reports.first().map_or(0, |r| r.corpus.count);
    Outcome::check(
        found == 0 && classes == 52 && reports.len() == 5 && elapsed < CONJECTURE_LIMIT,
        format!("{classes} classes n<=5, {found} counterexamples, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn oracle_equivalence(corpus: &[Graph]) -> Outcome {
    let start = Instant::now();
    let mut classes: BTreeMap<Vec<usize>, Vec<&Graph>> = BTreeMap::new();
    for g in corpus {
        classes.entry(vertex_property(g).0).or_default().push(g);
    }
    let pairs: Vec<(&Graph, &Graph)> = classes
        .values()
        .flat_map(|members| members.iter().flat_map(move |&g| members.iter().map(move |&h| (g, h))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ORACLE_EQUIVALENCE_JOBS)
        .build()
        .unwrap();
    let cfg = EngineConfig::default();
    let failures: Vec<String> = pool.install(|| {
        pairs
            .par_iter()
            .filter_map(|&(g, h)| {
                let truth = oracle_iso(g, h, &Constraint::none(), budget()).expect("oracle").is_some();
                match gi(g, h, &cfg) {
                    Ok(out) if out.is_isomorphic() == truth && out.disagreements.is_empty() => None,
                    Ok(out) => Some(format!("{} vs {}: {:?}", to_graph6(g), to_graph6(h), out.verdict)),
                    Err(e) => Some(format!("{} vs {}: {e}", to_graph6(g), to_graph6(h))),
                }
            })
            .collect()
    });
    let elapsed = start.elapsed();
    let n6 = corpus.iter().filter(|g| g.n() == 6).count();
    Outcome::check(
        failures.is_empty() && n6 == 156 && elapsed < ORACLE_EQUIVALENCE_LIMIT,
        format!(
            "{} ordered pairs in {} vertex-property classes, {} mismatches{}, {:.1}s",
            pairs.len(),
            classes.len(),
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn randomized_equivalence() -> Outcome {
    let cfg = EngineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let mut oracle_checked = 0;
    for trial in 0..RANDOM_TRIALS {
        let n = rng.gen_range(RANDOM_N.0..=RANDOM_N.1);
        let g = lab::random_graph(n, &mut rng);
        let perm = random_perm(n, &mut rng);
        let h = g.permute(&perm).unwrap();
        match gi(&g, &h, &cfg) {
            Ok(out) if out.verdict == Verdict::Yes => {
                if !out.mapping.as_ref().is_some_and(|m| verify_mapping(&g, &h, m, &Constraint::none())) {
                    failures.push(format!("trial {trial}: unverified mapping"));
                }
            }
            Ok(out) => failures.push(format!("trial {trial}: relabeled copy gave {:?}", out.verdict)),
            Err(e) => failures.push(format!("trial {trial}: {e}")),
        }

        let u = rng.gen_range(0..n);
        let v = (u + rng.gen_range(1..n)) % n;
        let toggled = g.toggle_edge(u, v).unwrap();
        // A moved edge keeps the edge count, so the verdict is not settled by
        // counting alone.
        let moved = lab::move_random_edge(&h, &mut rng);
        for other in [&toggled, &moved] {
            let out = match gi(&g, other, &cfg) {
                Ok(out) => out,
                Err(e) => {
                    failures.push(format!("trial {trial}: {e}"));
                    continue;
                }
            };
            if let Some(m) = &out.mapping {
                if !verify_mapping(&g, other, m, &Constraint::none()) {
                    failures.push(format!("trial {trial}: unverified mapping"));
                }
            }
            if n <= ORACLE_CUTOFF {
                oracle_checked += 1;
                let truth = oracle_iso(&g, other, &Constraint::none(), budget()).expect("oracle").is_some();
                if truth != out.is_isomorphic() {
                    failures.push(format!("trial {trial}: engine {:?}, oracle {truth}", out.verdict));
                }
            } else if out.verdict == Verdict::No && out.witness.is_none() {
                failures.push(format!("trial {trial}: No without a witness"));
            }
        }
    }
    Outcome::check(
        failures.is_empty(),
        format!(
            "{RANDOM_TRIALS} trials, {oracle_checked} oracle comparisons, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

/// Vertex transitivity straight from the automorphism group.
fn transitive_by_automorphisms(g: &Graph) -> bool {
    if g.n() == 0 {
        return true;
    }
    let auts = oracle_automorphisms(g, &Constraint::none(), usize::MAX, budget()).expect("oracle");
    let mut orbit = vec![false; g.n()];
    for a in &auts.listed {
        orbit[a[0]] = true;
    }
    orbit.iter().all(|&x| x)
}

fn lemma_checks_on(g: &Graph, sym: &SymmetryConfig) -> Result<(), String> {
    let bad = |what: &str| Err(format!("{}: {what}", to_graph6(g)));
    let report = classify(g, sym).map_err(|e| e.to_string())?;
    let flags = pattern_symmetry_tests(g);
    if report.vertex_symmetric.holds != transitive_by_automorphisms(g) {
        return bad("vertex symmetry disagrees with the automorphism group");
    }
    if report.vertex_symmetric.holds && !(is_vertex_regular(g) && flags.vertex && report.vertex_indistinguishable) {
        return bad("vertex symmetric but not regular or not indistinguishable");
    }
    if report.edge_symmetric.holds && !(is_edge_regular(g) && flags.edge) {
        return bad("edge symmetric but not edge regular or edge patterns differ");
    }
    if report.arc_symmetric.holds {
        let isolated = (0..g.n()).any(|v| g.neighbors(v).is_empty());
        if !report.edge_symmetric.holds || !flags.arc || (!isolated && !report.vertex_symmetric.holds) {
            return bad("arc symmetric but a weaker symmetry fails");
        }
    }
    Ok(())
}

fn patterns_match_under(g: &Graph, perm: &[usize]) -> bool {
    let h = g.permute(perm).unwrap();
    if pattern_normal(g, None).digest() != pattern_normal(&h, None).digest() {
        return false;
    }
    (0..g.n()).all(|v| {
        let a = pattern_nailed(g, &VertexSet::singleton(v), None).unwrap();
        let b = pattern_nailed(&h, &VertexSet::singleton(perm[v]), None).unwrap();
        a.digest() == b.digest()
    }) && g.edge_list().iter().all(|&(u, v)| {
        pattern_arc(g, u, v).unwrap().digest() == pattern_arc(&h, perm[u], perm[v]).unwrap().digest()
    })
}

fn lemma_suite(corpus: &[Graph]) -> Outcome {
    let sym = SymmetryConfig::default();
    let cfg = EngineConfig::default();
    let mut failures: Vec<String> = corpus
        .par_iter()
        .filter_map(|g| lemma_checks_on(g, &sym).err())
        .collect();

    // Dual graphs: isomorphism is preserved both ways.
    let dual_failures: Vec<String> = corpus
        .par_iter()
        .flat_map_iter(|g| corpus.iter().filter(move |h| h.n() == g.n()).map(move |h| (g, h)))
        .filter_map(|(g, h)| {
            let direct = gi(g, h, &cfg).ok()?.is_isomorphic();
            let dual = gi(&g.complement(), &h.complement(), &cfg).ok()?.is_isomorphic();
            (direct != dual).then(|| format!("{} / {}: dual verdict differs", to_graph6(g), to_graph6(h)))
        })
        .collect();
    failures.extend(dual_failures);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    for _ in 0..LEMMA_PAIRS {
        let n = rng.gen_range(3..=12);
        let g = lab::random_graph(n, &mut rng);
        let perm = random_perm(n, &mut rng);
        if !patterns_match_under(&g, &perm) {
            failures.push(format!("{}: patterns differ under relabeling", to_graph6(&g)));
        }
        let h = g.permute(&perm).unwrap();
        let dual = gi(&g.complement(), &h.complement(), &cfg).map(|o| o.is_isomorphic());
        if !matches!(dual, Ok(true)) {
            failures.push(format!("{}: relabeled dual not recognized", to_graph6(&g)));
        }
        if n <= 8 {
            if let Err(e) = lemma_checks_on(&h, &sym) {
                failures.push(e);
            }
        }
    }

    let mut factorial = 1u64;
    for n in 1..=6 {
        factorial *= n as u64;
        let auts = oracle_automorphisms(&Graph::complete(n), &Constraint::none(), 0, budget()).unwrap();
        if auts.nontrivial() != factorial - 1 {
            failures.push(format!("K{n}: {} nontrivial automorphisms", auts.nontrivial()));
        }
    }
    Outcome::check(
        failures.is_empty(),
        format!(
            "{} corpus graphs, {LEMMA_PAIRS} permuted pairs, K1..K6, {} violations{}",
            corpus.len(),
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

/// Every canonical key we expose, laid out so that relabeling by `perm`
/// must reproduce it entry for entry.
fn keys_under(g: &Graph, perm: &[usize], probe_edge: Option<(usize, usize)>) -> Vec<String> {
    let h = g.permute(perm).unwrap();
    let mut keys = vec![
        pattern_normal(&h, None).digest().to_string(),
        varied_pattern_normal(&h).digest().to_string(),
    ];
    for v in 0..g.n() {
        keys.push(tomography(&h, perm[v], None).unwrap().digest().to_string());
        keys.push(pattern_nailed(&h, &VertexSet::singleton(perm[v]), None).unwrap().digest().to_string());
    }
    if let Some((u, v)) = probe_edge {
        keys.push(pattern_arc(&h, perm[u], perm[v]).unwrap().digest().to_string());
        keys.push(pattern_nailed(&h, &VertexSet::new(vec![perm[u], perm[v]]), None).unwrap().digest().to_string());
    }
    keys
}

fn invariance_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let work: Vec<(Graph, Vec<Vec<usize>>)> = (0..INVARIANCE_GRAPHS)
        .map(|_| {
            let n = rng.gen_range(1..=14);
            let g = lab::random_graph(n, &mut rng);
            let perms = (0..INVARIANCE_RELABELINGS).map(|_| random_perm(n, &mut rng)).collect();
            (g, perms)
        })
        .collect();
    let failures: Vec<String> = work
        .par_iter()
        .filter_map(|(g, perms)| {
            let edge = g.edge_list().first().copied();
            let identity: Vec<usize> = (0..g.n()).collect();
            let reference = keys_under(g, &identity, edge);
            perms
                .iter()
                .any(|p| keys_under(g, p, edge) != reference)
                .then(|| to_graph6(g))
        })
        .collect();
    Outcome::check(
        failures.is_empty(),
        format!(
            "{INVARIANCE_GRAPHS} graphs x {INVARIANCE_RELABELINGS} relabelings, {} graphs with a changed key",
            failures.len()
        ),
    )
}

fn complexity_trend() -> Outcome {
    let cfg = EngineConfig::conjecture();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 13);
    let mut medians = Vec::new();
    for &n in &TREND_SIZES {
        let mut times = Vec::new();
        for _ in 0..TREND_TRIALS {
            let g = lab::random_regular_graph(n, 3, &mut rng).expect("3-regular graph");
            let h = g.permute(&random_perm(n, &mut rng)).unwrap();
            let start = Instant::now();
            let out = gi(&g, &h, &cfg);
            times.push(start.elapsed().as_secs_f64());
            if !matches!(out, Ok(ref o) if o.is_isomorphic()) {
                return Outcome {
                    passed: false,
                    report_only: true,
                    detail: format!("n={n}: relabeled copy not recognized"),
                };
            }
        }
        times.sort_by(f64::total_cmp);
        medians.push(times[times.len() / 2]);
    }
    let ratios: Vec<f64> = medians.windows(2).map(|w| w[1] / w[0].max(1e-9)).collect();
    let detail = TREND_SIZES
        .iter()
        .zip(&medians)
        .map(|(n, t)| format!("n={n}: {:.1}ms", t * 1e3))
        .collect::<Vec<_>>()
        .join(", ");
    let ratio_text = ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join("/");
    Outcome {
        passed: ratios.iter().all(|&r| r <= TREND_MAX_RATIO),
        report_only: true,
        detail: format!("{detail}; doubling ratios {ratio_text} (limit {TREND_MAX_RATIO})"),
    }
}

fn round_trip(corpus: &[Graph]) -> Outcome {
    let mut failures = Vec::new();
    let labeled = (1..=6).flat_map(all_labeled_graphs);
    let mut checked = 0usize;
    for g in corpus.iter().cloned().chain(labeled) {
        checked += 1;
        let g6 = emit_graph(&g, Format::Graph6);
        let edges = emit_graph(&g, Format::EdgeList);
        let back6 = parse_graph(&g6, Format::Graph6).ok();
        let back_edges = parse_graph(&edges, Format::EdgeList).ok();
        let reemit = back6.as_ref().map(|b| emit_graph(b, Format::Graph6));
        if back6.as_ref() != Some(&g) || back_edges.as_ref() != Some(&g) || reemit.as_deref() != Some(&g6[..]) {
            failures.push(to_graph6(&g));
        }
    }
    Outcome::check(
        failures.is_empty(),
        format!("{checked} graphs (classes and all labeled n<=6), {} failures", failures.len()),
    )
}

fn main() {
    // Accept and ignore libtest arguments such as --nocapture or filters.
    let corpus = corpus6();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("conjectures hold at n<=5", Box::new(conjectures_on_small_graphs)),
        ("engine matches oracle on n<=6 classes", Box::new(|| oracle_equivalence(&corpus))),
        ("randomized equivalence", Box::new(randomized_equivalence)),
        ("lemma suite", Box::new(|| lemma_suite(&corpus))),
        ("key invariance under relabeling", Box::new(invariance_suite)),
        ("complexity trend on 3-regular graphs", Box::new(complexity_trend)),
        ("format round-trip", Box::new(|| round_trip(&corpus))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let status = match (outcome.passed, outcome.report_only) {
            (true, _) => "PASS",
            (false, true) => "REPORT",
            (false, false) => {
                failed += 1;
                "FAIL"
            }
        };
        println!(
            "{status:<6} {name}: {} [{:.1}s]",
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
