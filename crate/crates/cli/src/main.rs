//! Command-line front end.
//!
//! Exit codes: 0 yes/success, 1 no, 2 usage or input error, 3 search budget
//! exhausted, 4 conjecture disagreement or counterexample surfaced.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use collapse_iso::engine::{gi, gi_multigraph, EngineConfig, IsoOutcome, Mode, PatternVariant, Verdict};
use collapse_iso::format::{parse_graphs, parse_multigraph};
use collapse_iso::lab::{self, LabConfig, LabCorpus};
use collapse_iso::oracle::{all_labeled_graphs, enumerate_nonisomorphic};
use collapse_iso::symmetry::{classify, SymmetryConfig};
use collapse_iso::tomography::{pattern_arc, pattern_nailed, pattern_normal, tomography, varied_pattern, varied_pattern_normal};
use collapse_iso::{to_graph6, Canonical, EngineError, Format, Graph, LabError, SearchBudget, VertexSet};

const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_DISAGREEMENT: u8 = 4;

#[derive(Parser)]
#[command(name = "collapse-iso", version, about = "Graph isomorphism from collapse tomographies and patterns")]
struct Cli {
    /// Print only JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two graphs are isomorphic.
    Iso(IsoArgs),
    /// Regularity, indistinguishability and exact symmetry of a graph.
    Classify(ClassifyArgs),
    /// Collapse tomographies of a graph.
    Tomo(ShapeArgs),
    /// Collapse pattern of a graph or of a nailed graph.
    Pattern(ShapeArgs),
    /// Search a corpus for counterexamples to the pattern conjectures.
    Conjecture(ConjectureArgs),
    /// Emit all graphs on n vertices in graph6.
    Gen(GenArgs),
    /// Time the engine on random graph families.
    Bench(BenchArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input format; guessed from the extension (.g6, .edges) when omitted.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Sound,
    Conjecture,
}

#[derive(Args)]
struct IsoArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long, value_enum, default_value = "sound")]
    mode: CliMode,
    #[command(flatten)]
    input: InputArgs,
    /// Include the bijection in the output.
    #[arg(long)]
    emit_mapping: bool,
    /// Include the recursion trace in the output.
    #[arg(long)]
    trace: bool,
    /// Use the varied pattern in place of the plain nailed pattern.
    #[arg(long)]
    varied: bool,
    /// Read edge lists leniently, keeping self-loops and parallel edges.
    #[arg(long)]
    multigraph: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    file: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Node budget for the exact symmetry searches.
    #[arg(long)]
    exact_budget: Option<u64>,
}

#[derive(Args)]
struct ShapeArgs {
    file: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Nail a single vertex.
    #[arg(long, conflicts_with_all = ["edge", "arc"])]
    nail: Option<usize>,
    /// Nail an edge, given as `u,v`.
    #[arg(long, value_parser = parse_pair, conflicts_with = "arc")]
    edge: Option<(usize, usize)>,
    /// Nail an arc, given as `tail,head`.
    #[arg(long, value_parser = parse_pair)]
    arc: Option<(usize, usize)>,
    /// Varied pattern.
    #[arg(long)]
    varied: bool,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    /// Comma-separated conjecture ids.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    ids: Vec<u8>,
    /// graph6 corpus file used instead of enumeration.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random spot check with this many pairs instead of a corpus sweep.
    #[arg(long)]
    spot_check: Option<usize>,
    /// Vertex count for the spot check.
    #[arg(long, default_value_t = 12)]
    spot_n: usize,
    /// Report zero seconds so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// One graph per isomorphism class.
    #[arg(long)]
    dedup: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Family {
    /// Random 3-regular graphs.
    Regular3,
    /// Random graphs with edge probability one half.
    Gnp,
    Cycle,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "regular3")]
    family: Family,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, value_enum, default_value = "conjecture")]
    mode: CliMode,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected u,v")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = if e.is_resource_exhaustion() { EXIT_BUDGET } else { EXIT_USAGE };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        let code = match &e {
            LabError::Budget(_) => EXIT_BUDGET,
            LabError::Engine(inner) if inner.is_resource_exhaustion() => EXIT_BUDGET,
            LabError::LemmaViolation { .. } => EXIT_DISAGREEMENT,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn resolve_format(path: &Path, input: &InputArgs) -> Result<Format, Failure> {
    input
        .format
        .or_else(|| Format::sniff(path))
        .ok_or_else(|| Failure::usage(format!("{}: cannot tell the format; pass --format", path.display())))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path, input: &InputArgs) -> Result<Graph, Failure> {
    let format = resolve_format(path, input)?;
    let mut graphs = parse_graphs(&read(path)?, format).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    match graphs.len() {
        1 => Ok(graphs.pop().unwrap()),
        k => Err(Failure::usage(format!("{}: expected one graph, found {k}", path.display()))),
    }
}

fn print_json<T: Serialize>(value: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("serializable");
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn engine_config(mode: CliMode, varied: bool, trace: bool) -> EngineConfig {
    EngineConfig {
        mode: match mode {
            CliMode::Sound => Mode::Sound,
            CliMode::Conjecture => Mode::Conjecture,
        },
        pattern: if varied { PatternVariant::Varied } else { PatternVariant::Plain },
        budget: SearchBudget::from_env(),
        trace,
        ..EngineConfig::default()
    }
}

fn cmd_iso(args: &IsoArgs) -> CmdResult {
    let cfg = engine_config(args.mode, args.varied, args.trace);
    let mut outcome: IsoOutcome = if args.multigraph {
        let parse = |p: &Path| -> Result<_, Failure> {
            parse_multigraph(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
        };
        gi_multigraph(&parse(&args.first)?, &parse(&args.second)?, &cfg)?
    } else {
        let g = read_graph(&args.first, &args.input)?;
        let h = read_graph(&args.second, &args.input)?;
        gi(&g, &h, &cfg)?
    };
    if !args.emit_mapping {
        outcome.mapping = None;
    }
    print_json(&outcome);
    Ok(match outcome.verdict {
        Verdict::Yes => 0,
        Verdict::No => EXIT_NO,
        Verdict::ConjectureDisagreement => EXIT_DISAGREEMENT,
    })
}

fn cmd_classify(args: &ClassifyArgs) -> CmdResult {
    let g = read_graph(&args.file, &args.input)?;
    let budget = match args.exact_budget {
        Some(nodes) => SearchBudget::nodes(nodes),
        None => SearchBudget::from_env(),
    };
    print_json(&classify(&g, &SymmetryConfig::with_budget(budget))?);
    Ok(0)
}

fn check_vertex(g: &Graph, v: usize) -> Result<(), Failure> {
    g.check_vertex(v).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_tomo(args: &ShapeArgs) -> CmdResult {
    let g = read_graph(&args.file, &args.input)?;
    if args.edge.is_some() || args.arc.is_some() || args.varied {
        return Err(Failure::usage("tomo takes only --nail; use `pattern` for edges, arcs and varied patterns"));
    }
    let vertices: Vec<usize> = match args.nail {
        Some(v) => {
            check_vertex(&g, v)?;
            vec![v]
        }
        None => (0..g.n()).collect(),
    };
    let out: Vec<_> = vertices
        .into_iter()
        .map(|v| {
            let t = tomography(&g, v, None).expect("checked vertex");
            json!({ "trigger": v, "key": t.digest(), "layers": t.entries })
        })
        .collect();
    print_json(&out);
    Ok(0)
}

fn cmd_pattern(args: &ShapeArgs) -> CmdResult {
    let g = read_graph(&args.file, &args.input)?;
    let usage = |e: collapse_iso::GraphError| Failure::usage(e.to_string());
    let pattern = if let Some((u, v)) = args.arc {
        if args.varied {
            return Err(Failure::usage("--varied does not apply to arcs"));
        }
        pattern_arc(&g, u, v).map_err(usage)?
    } else {
        let nails = match (args.nail, args.edge) {
            (Some(v), _) => Some(VertexSet::singleton(v)),
            (None, Some((u, v))) => {
                check_vertex(&g, u)?;
                check_vertex(&g, v)?;
                if !g.has_edge(u, v) {
                    return Err(Failure::usage(format!("({u}, {v}) is not an edge")));
                }
                Some(VertexSet::new(vec![u, v]))
            }
            (None, None) => None,
        };
        match (nails, args.varied) {
            (Some(n), false) => pattern_nailed(&g, &n, None).map_err(usage)?,
            (Some(n), true) => varied_pattern(&g, &n).map_err(usage)?,
            (None, false) => pattern_normal(&g, None),
            (None, true) => varied_pattern_normal(&g),
        }
    };
    print_json(&json!({ "key": pattern.digest(), "pattern": pattern }));
    Ok(0)
}

fn cmd_conjecture(args: &ConjectureArgs, json_only: bool) -> CmdResult {
    let cfg = LabConfig {
        ids: args.ids.clone(),
        jobs: args.jobs,
        seed: args.seed,
        budget: SearchBudget::from_env(),
        timing: !args.no_timing,
    };
    let reports = if let Some(pairs) = args.spot_check {
        lab::spot_check(args.spot_n, pairs, &cfg)?
    } else {
        let corpus = match &args.corpus {
            Some(path) => {
                let graphs = parse_graphs(&read(path)?, Format::Graph6)
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                LabCorpus::external(&path.display().to_string(), graphs)
            }
            None => LabCorpus::enumerated(args.n_min, args.n_max, cfg.budget)?,
        };
        lab::run_suite(&corpus, &cfg)?
    };
    print_json(&reports);
    if !json_only {
        for r in &reports {
            eprintln!("{}", r.summary());
        }
    }
    let found = reports.iter().any(|r| !r.counterexamples.is_empty());
    Ok(if found { EXIT_DISAGREEMENT } else { 0 })
}

fn cmd_gen(args: &GenArgs, json_only: bool) -> CmdResult {
    let graphs: Box<dyn Iterator<Item = Graph>> = if args.n == 0 {
        Box::new(std::iter::empty())
    } else if args.dedup {
        let classes = enumerate_nonisomorphic(args.n, SearchBudget::from_env())
            .map_err(|e| Failure::from(EngineError::from(e)))?;
        Box::new(classes.into_iter())
    } else if args.n <= 11 {
        Box::new(all_labeled_graphs(args.n))
    } else {
        return Err(Failure::usage("labeled enumeration is limited to n <= 11; use --dedup"));
    };
    if json_only {
        let lines: Vec<String> = graphs.map(|g| to_graph6(&g)).collect();
        print_json(&lines);
    } else {
        use std::io::Write;
        let stdout = std::io::stdout();
        let mut out = std::io::BufWriter::new(stdout.lock());
        for g in graphs {
            if writeln!(out, "{}", to_graph6(&g)).is_err() {
                break;
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    trials: usize,
    median_ms: f64,
    min_ms: f64,
    max_ms: f64,
}

fn bench_graph(family: Family, n: usize, rng: &mut ChaCha8Rng) -> Result<Graph, Failure> {
    match family {
        Family::Regular3 => lab::random_regular_graph(n, 3, rng)
            .ok_or_else(|| Failure::usage(format!("no 3-regular graph on {n} vertices"))),
        Family::Gnp => Ok(lab::random_graph(n, rng)),
        Family::Cycle => Ok(Graph::cycle(n)),
    }
}

fn cmd_bench(args: &BenchArgs, json_only: bool) -> CmdResult {
    let cfg = engine_config(args.mode, false, false);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::new();
    for &n in &args.sizes {
        let mut times = Vec::with_capacity(args.trials);
        for _ in 0..args.trials.max(1) {
            let g = bench_graph(args.family, n, &mut rng)?;
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let h = g.permute(&perm).expect("permutation");
            let start = Instant::now();
            let out = gi(&g, &h, &cfg)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            if out.verdict != Verdict::Yes {
                return Err(Failure {
                    code: EXIT_DISAGREEMENT,
                    message: format!("relabeled copy on {n} vertices not recognized: {:?}", out.verdict),
                });
            }
        }
        times.sort_by(f64::total_cmp);
        rows.push(BenchRow {
            n,
            trials: times.len(),
            median_ms: times[times.len() / 2],
            min_ms: times[0],
            max_ms: times[times.len() - 1],
        });
    }
    if json_only {
        print_json(&json!({ "family": args.family, "seed": args.seed, "rows": rows }));
    } else {
        println!("# seed {}", args.seed);
        println!("{:>8} {:>7} {:>12} {:>12} {:>12}", "n", "trials", "median_ms", "min_ms", "max_ms");
        for r in &rows {
            println!("{:>8} {:>7} {:>12.3} {:>12.3} {:>12.3}", r.n, r.trials, r.median_ms, r.min_ms, r.max_ms);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Iso(a) => cmd_iso(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Tomo(a) => cmd_tomo(a),
        Command::Pattern(a) => cmd_pattern(a),
        Command::Conjecture(a) => cmd_conjecture(a, cli.json),
        Command::Gen(a) => cmd_gen(a, cli.json),
        Command::Bench(a) => cmd_bench(a, cli.json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
