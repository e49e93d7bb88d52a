use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use qsat_core::families::{self, Family};
use qsat_core::hypergraph::structural_predicates;
use qsat_core::oracle::{self, exact_satisfiable, verify_state};
use qsat_core::solver_bounded::{gen_pseudo_line_instance, PseudoLineSpec};
use qsat_core::{
    algorithm_a, decouple, find_sdr, greedy_filtration, sample_generic, solve, validate, BoundedOutcome, FiltrationSpec,
    Hypergraph, Matching, ProductState, QsatInstance, SolveConfig, TransferFiltration,
};

const SOLVER_FAILURE: u8 = 2;
const UNSAT: u8 = 3;
const INPUT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "qsat", version, about = "Product-state solvers for quantum k-SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family member with generic constraints.
    Gen(GenArgs),
    /// Report structural properties of a hypergraph.
    Analyze(InputArgs),
    /// Build a greedy filtration, or validate one with --filtration.
    Filtrate(FiltrateArgs),
    /// Decouple a hypergraph along a filtration and dump the blow-up.
    Decouple(FiltrateArgs),
    #[command(subcommand)]
    Solve(SolveCommand),
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Time the parameterized solver against the dense oracle.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum SolveCommand {
    /// Qualifier-polynomial solver.
    Param(ParamArgs),
    /// Bounded-occurrence solver for vertex degree at most two.
    Bounded(BoundedArgs),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Null-space check of a product state.
    Check(CheckArgs),
    /// Exact satisfiability by the smallest eigenvalue.
    Satisfiable(SatArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Chain,
    Cycle,
    Semicycle,
    Torus,
    ModifiedTorus,
    FirTree,
    Crash,
    RunningExample,
    Fano,
    Icycle,
    NoSdrFano,
    NoSdrIcycle,
    PseudoLine,
}

#[derive(Args)]
struct GenArgs {
    family: FamilyName,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Torus side lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 6)]
    discs: usize,
    #[arg(long, default_value_t = 6)]
    crosses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the family's filtration.
    #[arg(long)]
    filtration_out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Hypergraph JSON.
    #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
    hypergraph: Option<PathBuf>,
    /// Instance JSON; its hypergraph is used.
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Args)]
struct FiltrateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    filtration: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Filtration JSON; a greedy one is built when absent.
    #[arg(long)]
    filtration: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundedArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct SatArgs {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    family: FamilyName,
    /// Inclusive range such as `1..3`, or a single value.
    #[arg(long, value_parser = parse_range)]
    t: (usize, usize),
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => (parse(s)?, parse(s)?),
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT_ERROR, message: message.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn load_hypergraph(args: &InputArgs) -> Result<Hypergraph, Failure> {
    match (&args.hypergraph, &args.instance) {
        (Some(p), _) => read_json(p),
        (None, Some(p)) => read_json::<QsatInstance>(p).map(|i| i.hypergraph),
        (None, None) => Err(Failure::input("one of --hypergraph or --instance is required")),
    }
}

fn load_filtration(g: &Hypergraph, path: Option<&Path>) -> Result<TransferFiltration, Failure> {
    match path {
        Some(p) => read_json::<FiltrationSpec>(p)?
            .build(g)
            .map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            let f = greedy_filtration(g);
            let violations = validate(g, &f);
            if let Some(v) = violations.first() {
                return Err(Failure::input(format!("greedy filtration is invalid ({:?}: {}); pass --filtration", v.kind, v.detail)));
            }
            Ok(f)
        }
    }
}

fn need(value: Option<usize>, flag: &str) -> Result<usize, Failure> {
    value.ok_or_else(|| Failure::input(format!("--{flag} is required for this family")))
}

fn build_family(name: FamilyName, t: Option<usize>, k: Option<usize>, dims: &[usize]) -> Result<Family, Failure> {
    let fam = match name {
        FamilyName::Chain => families::chain(need(t, "t")?, need(k, "k")?),
        FamilyName::Cycle => families::cycle(need(t, "t")?, need(k, "k")?),
        FamilyName::Semicycle => families::semicycle(need(t, "t")?, need(k, "k")?),
        FamilyName::Torus => families::torus(dims),
        FamilyName::ModifiedTorus => families::modified_torus(need(t, "t")?, need(k, "k")?),
        FamilyName::FirTree => families::fir_tree(need(t, "t")?, need(k, "k")?),
        FamilyName::Crash => families::crash(need(t, "t")?, need(k, "k")?),
        FamilyName::RunningExample => Ok(families::running_example()),
        FamilyName::Fano => Ok(families::fano()),
        FamilyName::Icycle => Ok(families::icycle()),
        FamilyName::NoSdrFano => Ok(families::no_sdr_counterexample(&families::fano(), false)),
        FamilyName::NoSdrIcycle => Ok(families::no_sdr_counterexample(&families::icycle(), true)),
        FamilyName::PseudoLine => return Err(Failure::input("pseudo-line instances are not a parameter family")),
    };
    fam.map_err(|e| Failure::input(e.to_string()))
}

fn gen(args: &GenArgs) -> Outcome {
    let (instance, filtration) = if let FamilyName::PseudoLine = args.family {
        let spec = PseudoLineSpec::random(args.discs, args.crosses, args.seed).map_err(|e| Failure::input(e.to_string()))?;
        let inst = gen_pseudo_line_instance(&spec, args.seed).map_err(|e| Failure::input(e.to_string()))?;
        eprintln!("pseudo-line: {} discs, {} crosses, n = {}, m = {}", spec.discs, spec.crosses, inst.n(), inst.m());
        (inst, None)
    } else {
        let fam = build_family(args.family, args.t, args.k, &args.dims)?;
        eprintln!("{}: n = {}, m = {}, b = {:?}, radius = {:?}", fam.name, fam.n(), fam.m(), fam.b(), fam.radius());
        (sample_generic(&fam.hypergraph, args.seed), fam.filtration)
    };
    if let Some(p) = &args.filtration_out {
        let f = filtration.ok_or_else(|| Failure::input("this family has no stored filtration"))?;
        emit(Some(p), &pretty(&f.spec()))?;
    }
    emit(args.out.as_deref(), &instance.to_json())?;
    Ok(0)
}

fn analyze(args: &InputArgs) -> Outcome {
    let g = load_hypergraph(args)?;
    let degrees = g.degrees();
    let predicates = structural_predicates(&g);
    let matching = match find_sdr(&g) {
        Matching::Sdr(s) => json!({ "sdr": s.assignment }),
        Matching::Hall(h) => json!({ "hall": { "edge_subset": h.edge_subset, "union_size": h.union_size } }),
    };
    let f = greedy_filtration(&g);
    let valid = validate(&g, &f).is_empty();
    let report = json!({
        "n": g.n,
        "m": g.m(),
        "uniformity": g.uniformity(),
        "max_degree": degrees.iter().max().copied().unwrap_or(0),
        "predicates": predicates,
        "matching": matching,
        "greedy_filtration": { "valid": valid, "b": valid.then(|| f.b()), "radius": valid.then_some(f.radius) },
    });
    eprintln!("n = {}, m = {}, linear = {}, helly = {}", g.n, g.m(), predicates.linear, predicates.helly);
    emit(None, &pretty(&report))?;
    Ok(0)
}

fn filtrate(args: &FiltrateArgs) -> Outcome {
    let g = load_hypergraph(&args.input)?;
    let (spec, f) = match &args.filtration {
        Some(p) => {
            let spec: FiltrationSpec = read_json(p)?;
            let f = TransferFiltration { foundation: spec.foundation.clone(), steps: spec.steps.clone(), r_map: Vec::new(), radius: 0 };
            (spec, f)
        }
        None => {
            let f = greedy_filtration(&g);
            (f.spec(), f)
        }
    };
    // Stored r_map/radius are never trusted; only structural violations matter here.
    let violations: Vec<_> = validate(&g, &f)
        .into_iter()
        .filter(|v| args.filtration.is_none() || v.kind != qsat_core::filtration::ViolationKind::RMap || v.step.is_some())
        .collect();
    let built = spec.clone().build(&g).ok();
    let report = json!({
        "filtration": spec,
        "valid": built.is_some() && violations.is_empty(),
        "b": built.as_ref().map(TransferFiltration::b),
        "r_map": built.as_ref().map(|f| f.r_map.clone()),
        "radius": built.as_ref().map(|f| f.radius),
        "violations": violations,
    });
    match &built {
        Some(f) => eprintln!("b = {}, radius = {}", f.b(), f.radius),
        None => eprintln!("invalid filtration: {} violation(s)", violations.len()),
    }
    emit(args.out.as_deref(), &pretty(&report))?;
    Ok(if built.is_some() { 0 } else { INPUT_ERROR })
}

fn decouple_cmd(args: &FiltrateArgs) -> Outcome {
    let g = load_hypergraph(&args.input)?;
    let f = load_filtration(&g, args.filtration.as_deref())?;
    let bu = decouple(&g, &f).map_err(|e| Failure::input(e.to_string()))?;
    eprintln!("n~ = {}, duplicate pairs = {}", bu.n_tilde(), bu.duplicate_pairs.len());
    emit(args.out.as_deref(), &pretty(&bu))?;
    Ok(0)
}

fn solve_param(args: &ParamArgs) -> Outcome {
    let inst: QsatInstance = read_json(&args.instance)?;
    let f = load_filtration(&inst.hypergraph, args.filtration.as_deref())?;
    let cfg = SolveConfig { rng_seed: args.seed, ..SolveConfig::default() };
    let report = match solve(&inst.hypergraph, &f, &inst, &cfg) {
        Ok(r) => r,
        Err(e) => {
            return Err(Failure { code: SOLVER_FAILURE, message: e.to_string() });
        }
    };
    eprintln!(
        "{}: residual {:.3e}, b = {}, radius = {}, {:.2} ms",
        report.message, report.residual, f.b(), f.radius, report.timings.total_ms
    );
    emit(args.out.as_deref(), &pretty(&report))?;
    Ok(if report.state.is_some() { 0 } else { SOLVER_FAILURE })
}

fn solve_bounded(args: &BoundedArgs) -> Outcome {
    let inst: QsatInstance = read_json(&args.instance)?;
    let outcome = algorithm_a(&inst).map_err(|e| Failure::input(e.to_string()))?;
    let (report, code) = match outcome {
        BoundedOutcome::Solved { state, residual, trace } => {
            eprintln!("solved: residual {residual:.3e}");
            (json!({ "outcome": "solved", "state": state, "residual": residual, "trace": trace }), 0)
        }
        BoundedOutcome::Reject { vertex } => {
            eprintln!("rejected: conflicting 1-local clauses on vertex {vertex}");
            (json!({ "outcome": "reject", "vertex": vertex }), UNSAT)
        }
    };
    emit(args.out.as_deref(), &pretty(&report))?;
    Ok(code)
}

fn oracle_error(e: oracle::OracleError) -> Failure {
    Failure::input(e.to_string())
}

fn oracle_check(args: &CheckArgs) -> Outcome {
    let inst: QsatInstance = read_json(&args.instance)?;
    let state: ProductState = read_json(&args.state)?;
    let value = verify_state(&inst, &state).map_err(oracle_error)?;
    let ok = value <= args.tol;
    eprintln!("|H psi| / |psi| = {value:.3e} ({})", if ok { "solution" } else { "not a solution" });
    emit(None, &json!({ "null_check": value, "solution": ok }).to_string())?;
    Ok(if ok { 0 } else { UNSAT })
}

fn oracle_satisfiable(args: &SatArgs) -> Outcome {
    let inst: QsatInstance = read_json(&args.instance)?;
    let lambda = if inst.m() == 0 { 0.0 } else { oracle::min_eigenvalue(&inst).map_err(oracle_error)? };
    let sat = exact_satisfiable(&inst).map_err(oracle_error)?;
    eprintln!("min eigenvalue {lambda:.3e}: {}", if sat { "satisfiable" } else { "unsatisfiable" });
    emit(None, &json!({ "min_eigenvalue": lambda, "satisfiable": sat }).to_string())?;
    Ok(if sat { 0 } else { UNSAT })
}

fn bench(args: &BenchArgs) -> Outcome {
    let mut csv = String::from("family,t,n,m,b,radius,solver_ms,oracle_ms,residual\n");
    let mut failed = false;
    for t in args.t.0..=args.t.1 {
        let fam = build_family(args.family, Some(t), Some(args.k), &[])?;
        let f = fam.filtration.clone().ok_or_else(|| Failure::input(format!("{} has no stored filtration", fam.name)))?;
        for s in 0..args.seeds {
            let seed = args.seed + s;
            let inst = sample_generic(&fam.hypergraph, seed);
            let report = solve(&fam.hypergraph, &f, &inst, &SolveConfig::default())
                .map_err(|e| Failure { code: SOLVER_FAILURE, message: e.to_string() })?;
            failed |= report.state.is_none();
            let oracle_ms = if fam.n() <= oracle::EIGEN_CAP {
                let start = Instant::now();
                exact_satisfiable(&inst).map_err(oracle_error)?;
                format!("{:.3}", start.elapsed().as_secs_f64() * 1e3)
            } else {
                String::new()
            };
            writeln!(
                csv,
                "{},{t},{},{},{},{},{:.3},{oracle_ms},{:e}",
                fam.name,
                fam.n(),
                fam.m(),
                f.b(),
                f.radius,
                report.timings.total_ms,
                report.residual
            )
            .expect("writing to a string");
        }
        eprintln!("t = {t}: n = {}, m = {}", fam.n(), fam.m());
    }
    emit(args.out.as_deref(), csv.trim_end())?;
    Ok(if failed { SOLVER_FAILURE } else { 0 })
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Analyze(a) => analyze(a),
        Command::Filtrate(a) => filtrate(a),
        Command::Decouple(a) => decouple_cmd(a),
        Command::Solve(SolveCommand::Param(a)) => solve_param(a),
        Command::Solve(SolveCommand::Bounded(a)) => solve_bounded(a),
        Command::Oracle(OracleCommand::Check(a)) => oracle_check(a),
        Command::Oracle(OracleCommand::Satisfiable(a)) => oracle_satisfiable(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
