//! `cutrep`: encode, query and verify the family of sets where a
//! connectivity function takes a given value.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cutrep::bisection::{solve_with, CardinalityQuery, Mode};
use cutrep::encoder::{encode_with, enumerate_family_within, member, stats, EncodeOptions, Representation};
use cutrep::interpolation::SfmBackend;
use cutrep::mutation::SeededBug;
use cutrep::oracles::{
    check_axioms, cut_rank_oracle, edge_cut_oracle, matroid_connectivity_oracle, parse_function_file, vertex_cut_oracle,
    AxiomReport, ConnectivityFn, FunctionFile,
};
use cutrep::verify::{run_suite, Suite, VerifyOptions};
use cutrep::{Error, SubsetMask};

const EXIT_NOT_FOUND: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_AXIOM: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(name = "cutrep", version, about = "Represent and search the sets where a connectivity function equals k")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check f(∅) = 0, symmetry and submodularity exhaustively.
    Axioms(FunctionArgs),
    /// Build the representation of {X : f(X) = k}.
    Encode(EncodeArgs),
    /// Print every set decoded from a representation, one per line.
    Enumerate {
        representation: PathBuf,
        /// Refuse to expand more than this many sets.
        #[arg(long, default_value_t = 1 << 20)]
        budget: u128,
    },
    /// Test whether a set is decoded by a representation.
    Member {
        representation: PathBuf,
        /// Comma-separated labels; empty for the empty set.
        #[arg(long, allow_hyphen_values = true)]
        set: String,
    },
    /// Find A with f(A) = k (or <= k) and |A ∩ W| among the targets.
    Bisect(BisectArgs),
    /// Run verification suites against brute force.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Func {
    Edgecut,
    Cutrank,
    Vertexcut,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Exhaustive,
    Mnp,
}

impl Backend {
    fn sfm(self) -> SfmBackend {
        match self {
            Backend::Exhaustive => SfmBackend::Exhaustive,
            Backend::Mnp => SfmBackend::min_norm_point(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    AtMost,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Graph file; the function is chosen with --func.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// GF(2) matrix file; the function is matroid connectivity of its columns.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Table file listing f on every subset.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct FunctionArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Function of a graph.
    #[arg(long, value_enum)]
    func: Option<Func>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(short = 'k', default_value_t = 0)]
    k: i64,
    #[arg(long, value_enum, default_value_t = Backend::Exhaustive)]
    backend: Backend,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long = "seeded-bug", hide = true)]
    seeded_bug: Option<SeededBug>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[arg(long)]
    no_provenance: bool,
    /// Print size and timing statistics to standard error.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct BisectArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Window W as comma-separated labels; the whole ground set when absent.
    #[arg(long)]
    window: Option<String>,
    /// Comma-separated target sizes of |A ∩ W|, or `half` for ⌊n/2⌋.
    #[arg(long, allow_hyphen_values = true)]
    targets: String,
    #[arg(long, value_enum, default_value_t = ModeArg::AtMost)]
    mode: ModeArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_function(args: &FunctionArgs) -> anyhow::Result<ConnectivityFn> {
    let (path, expect) = match (&args.input.graph, &args.input.matrix, &args.input.table) {
        (Some(p), _, _) => (p, "graph"),
        (_, Some(p), _) => (p, "gf2"),
        (_, _, Some(p)) => (p, "table"),
        _ => unreachable!("clap enforces exactly one input"),
    };
    let parsed = parse_function_file(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let f = match parsed {
        FunctionFile::Graph(g) if expect == "graph" => match args.func.unwrap_or(Func::Edgecut) {
            Func::Edgecut => edge_cut_oracle(&g),
            Func::Cutrank => cut_rank_oracle(&g),
            Func::Vertexcut => vertex_cut_oracle(&g),
        },
        FunctionFile::Matrix(m) if expect == "gf2" && args.func.is_none() => matroid_connectivity_oracle(&m),
        FunctionFile::Table(f) if expect == "table" && args.func.is_none() => f,
        _ if args.func.is_some() && expect != "graph" => {
            return Err(Error::Input("--func applies only to --graph inputs".into()).into())
        }
        _ => {
            return Err(Error::Input(format!("{} does not start with a `{expect}` header", path.display())).into())
        }
    };
    Ok(f)
}

fn load_representation(path: &Path) -> anyhow::Result<Representation> {
    Ok(Representation::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?)
}

fn encode_options(common: &CommonArgs) -> EncodeOptions {
    EncodeOptions { backend: common.backend.sfm(), jobs: common.jobs.max(1), provenance: true, faults: common.seeded_bug }
}

fn cmd_axioms(args: &FunctionArgs) -> anyhow::Result<ExitCode> {
    let f = load_function(args)?;
    match check_axioms(&f)? {
        AxiomReport::Pass { checked } => {
            println!("PASS checked={checked}");
            Ok(ExitCode::SUCCESS)
        }
        AxiomReport::Violation { axiom, x, y } => {
            let g = f.ground();
            println!("FAIL axiom={axiom} X={{{}}} Y={{{}}}", g.format(&x), g.format(&y));
            Ok(ExitCode::from(EXIT_AXIOM))
        }
    }
}

fn cmd_encode(args: &EncodeArgs) -> anyhow::Result<ExitCode> {
    let f = load_function(&args.function)?;
    let options = EncodeOptions { provenance: !args.no_provenance, ..encode_options(&args.common) };
    let rep = encode_with(&f, args.common.k, &options)?;
    let text = rep.to_json();
    match &args.output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    if args.stats {
        eprint!("{}", stats(&rep));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_enumerate(path: &Path, budget: u128) -> anyhow::Result<ExitCode> {
    let rep = load_representation(path)?;
    for x in enumerate_family_within(&rep, budget)? {
        println!("{}", rep.ground.format(&x));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_member(path: &Path, set: &str) -> anyhow::Result<ExitCode> {
    let rep = load_representation(path)?;
    let x = rep.ground.parse_subset(set)?;
    if member(&rep, &x) {
        println!("yes");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("no");
        Ok(ExitCode::from(EXIT_NOT_FOUND))
    }
}

fn parse_targets(text: &str, n: usize) -> anyhow::Result<Vec<i64>> {
    if text.trim() == "half" {
        return Ok(vec![(n / 2) as i64]);
    }
    text.split(',')
        .map(|t| {
            t.trim().parse::<i64>().map_err(|_| Error::Input(format!("target {t:?} is not an integer or `half`")).into())
        })
        .collect()
}

fn cmd_bisect(args: &BisectArgs) -> anyhow::Result<ExitCode> {
    let f = load_function(&args.function)?;
    let ground = f.ground();
    let window: SubsetMask = match &args.window {
        Some(text) => ground.parse_subset(text)?,
        None => ground.full_set(),
    };
    let targets = parse_targets(&args.targets, ground.len())?;
    let mode = match args.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::AtMost => Mode::AtMost,
    };
    let query = CardinalityQuery::new(window, targets, args.common.k, mode)?;
    match solve_with(&f, &query, &encode_options(&args.common))? {
        Some(a) => {
            println!("{}", ground.format(&a));
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("INFEASIBLE");
            Ok(ExitCode::from(EXIT_NOT_FOUND))
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let f = load_function(&args.function)?;
    let opts = VerifyOptions {
        backend: args.common.backend.sfm(),
        jobs: args.common.jobs.max(1),
        seed: args.seed,
        faults: args.common.seeded_bug,
        ..VerifyOptions::default()
    };
    let reports = run_suite(&f, args.common.k, args.suite, &opts)?;
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.passed) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VERIFY))
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Resource(_)) | Some(Error::Backend(_)) => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Axioms(args) => cmd_axioms(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Enumerate { representation, budget } => cmd_enumerate(representation, *budget),
        Command::Member { representation, set } => cmd_member(representation, set),
        Command::Bisect(args) => cmd_bisect(args),
        Command::Verify(args) => {
            if args.common.k < 0 {
                bail!(Error::Input(format!("k must be non-negative, got {}", args.common.k)));
            }
            cmd_verify(args)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
