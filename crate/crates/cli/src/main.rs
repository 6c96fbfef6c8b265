mod grid;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_pr::harness::{
    emit_report, gen_instance, run_curve_in_pool, Algorithm, BenchConfig, InstanceConfig, Manifest, SupportModel,
    ValueDist,
};
use sparse_pr::noisy_support::{auto_tau, recover_support_noisy, threshold_support, NoisySupportParams};
use sparse_pr::recovery::{
    rank_one_approx, relative_residual, solve_sdp_equality_report, solve_sdp_noisy_report, sparse_fienup, FienupParams,
    SdpMethod, SdpSettings, SolveReport,
};
use sparse_pr::turnpike::{brute_force_turnpike, recover_support, GraphWidth, TurnpikeParams};
use sparse_pr::{autocorrelation, canonicalize, io, support_of, DistanceSet, Error, SupportSet};

#[derive(Parser, Debug)]
#[command(
    name = "sparse-pr",
    version,
    about = "Sparse phase retrieval from autocorrelation measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a random sparse signal
    Gen(GenArgs),
    /// Autocorrelation of a signal file
    Autocorr(AutocorrArgs),
    /// Support set from a distance set
    Turnpike(TurnpikeArgs),
    /// Noiseless recovery from an autocorrelation
    Recover(RecoverArgs),
    /// Noise-robust recovery from an autocorrelation
    RecoverNoisy(RecoverNoisyArgs),
    /// Sparse error-reduction baseline
    Fienup(FienupArgs),
    /// Monte Carlo success-rate curves
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("sparsity").required(true))]
struct GenArgs {
    /// Signal length
    #[arg(long)]
    n: usize,
    /// Exact number of nonzeros (uniform support)
    #[arg(long, group = "sparsity")]
    k: Option<usize>,
    /// Expected number of nonzeros (Bernoulli support)
    #[arg(long, group = "sparsity")]
    s: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Real Gaussian values instead of complex Gaussian
    #[arg(long)]
    real: bool,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AutocorrArgs {
    /// Signal CSV
    input: PathBuf,
    /// Reject signals with nonzero imaginary parts
    #[arg(long)]
    real: bool,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TurnpikeArgs {
    /// Distance set, one integer per line
    input: PathBuf,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exhaustive search instead of the combinatorial algorithm
    #[arg(long)]
    oracle: bool,
    /// Largest sparsity the exhaustive search accepts
    #[arg(long, default_value_t = 14)]
    oracle_cap: usize,
    /// Graph-step width (automatic when omitted)
    #[arg(long)]
    t: Option<usize>,
    /// Skip the final distance-set check
    #[arg(long)]
    no_verify: bool,
    /// Fall back to the fixpoint refinement when the plain steps fail
    #[arg(long)]
    refine: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Splitting,
    Direct,
}

impl From<MethodArg> for SdpMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Splitting => SdpMethod::Splitting,
            MethodArg::Direct => SdpMethod::DirectGraph,
        }
    }
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Exact graph path with splitting fallback, or splitting only
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    method: MethodArg,
    /// Feasibility tolerance relative to a_0
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Splitting iteration cap
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
}

impl SolverArgs {
    fn settings(&self) -> Result<SdpSettings, Failure> {
        let s = SdpSettings {
            method: self.method.into(),
            tol_feas: self.tol,
            max_iter: self.max_iter,
            ..Default::default()
        };
        s.validate().map_err(Failure::usage)?;
        Ok(s)
    }
}

#[derive(Args, Debug)]
struct RecoverArgs {
    /// Autocorrelation CSV
    input: PathBuf,
    /// Support set file, or `auto` to recover it from the measurement
    #[arg(long, default_value = "auto")]
    support: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON-lines solver report
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tau {
    Auto,
    Value(f64),
}

impl FromStr for Tau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Tau::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v >= 0.0 => Ok(Tau::Value(v)),
            _ => Err(format!("expected a nonnegative number or `auto`, got {s:?}")),
        }
    }
}

#[derive(Args, Debug)]
struct RecoverNoisyArgs {
    /// Autocorrelation CSV
    input: PathBuf,
    /// Magnitude threshold, or `auto` for 3 * median / 0.6745
    #[arg(long)]
    tau: Tau,
    /// Deletion budget per support point
    #[arg(long, default_value_t = 2)]
    c: usize,
    /// Per-lag noise budget of the lifted program
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Pair quota of the anchor search (automatic when omitted)
    #[arg(long)]
    quota: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Recovered support set
    #[arg(long)]
    support_out: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON-lines solver report
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FienupArgs {
    /// Autocorrelation CSV
    input: PathBuf,
    /// Sparsity of the projection
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    inits: usize,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Cells as `N:K,a-b/step;N:...`
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "tspr", value_parser = ["tspr", "tspr-noisy", "fienup", "known-support-sdp"])]
    alg: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report directory
    #[arg(long)]
    out: PathBuf,
    /// Worker threads, 0 for all cores, 1 for serial; SPARSE_PR_THREADS overrides
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long, default_value_t = 1e-3)]
    eta: f64,
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 100)]
    fienup_inits: usize,
    #[arg(long, default_value_t = 500)]
    fienup_iters: usize,
    /// Real Gaussian values instead of complex Gaussian
    #[arg(long)]
    real: bool,
    /// Enable the support refinement fallback for tspr
    #[arg(long)]
    refine: bool,
    /// Omit wall-clock columns and the start time for byte-stable reports
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Self {
            code: 1,
            msg: e.to_string(),
        }
    }

    fn input(e: impl ToString) -> Self {
        Self {
            code: 4,
            msg: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse { .. } => 4,
            Error::OracleTooLarge { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

type CliResult = Result<(), Failure>;

fn load<T>(path: &Path, read: impl Fn(&Path) -> sparse_pr::Result<T>) -> Result<T, Failure> {
    read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => io::write_atomic(p, text.as_bytes()).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_line(r: &SolveReport) -> String {
    format!("{}\n", serde_json::to_string(r).expect("report serializes"))
}

fn gen(args: GenArgs) -> CliResult {
    let model = match (args.k, args.s) {
        (Some(k), _) => SupportModel::UniformK(k),
        (None, Some(s)) => SupportModel::Bernoulli(s),
        (None, None) => unreachable!("clap enforces the sparsity group"),
    };
    let cfg = InstanceConfig {
        n: args.n,
        model,
        values: if args.real {
            ValueDist::RealGaussian
        } else {
            ValueDist::ComplexGaussian
        },
        seed: args.seed,
    };
    cfg.validate().map_err(Failure::usage)?;
    let x = gen_instance(&cfg)?;
    emit(args.out.as_deref(), &io::format_signal(&x))
}

fn autocorr(args: AutocorrArgs) -> CliResult {
    let x = load(&args.input, io::read_signal)?;
    if args.real {
        x.assert_real().map_err(Failure::input)?;
    }
    emit(args.out.as_deref(), &io::format_autocorrelation(&autocorrelation(&x)))
}

fn turnpike(args: TurnpikeArgs) -> CliResult {
    if args.t == Some(0) {
        return Err(Failure::usage("--t must be at least 1"));
    }
    let w = load(&args.input, |p| io::read_set(p).and_then(DistanceSet::new))?;
    let u = if args.oracle {
        let sols = brute_force_turnpike(&w, args.oracle_cap)?;
        if sols.len() > 1 {
            eprintln!("{} homometric solutions; writing the first", sols.len());
        }
        sols.into_iter()
            .next()
            .ok_or_else(|| Failure::from(Error::VerificationFailed("no set has this distance set".into())))?
    } else {
        let params = TurnpikeParams {
            t: args.t.map_or(GraphWidth::Auto, GraphWidth::Fixed),
            verify: !args.no_verify,
            refine: args.refine,
        };
        recover_support(&w, &params)?
    };
    emit(args.out.as_deref(), &io::format_set(u.as_slice()))
}

fn recover(args: RecoverArgs) -> CliResult {
    let settings = args.solver.settings()?;
    let a = load(&args.input, io::read_autocorrelation)?;
    let u = if args.support == "auto" {
        recover_support(&support_of(&a, 0.0)?, &TurnpikeParams::default())?
    } else {
        load(Path::new(&args.support), |p| io::read_set(p).and_then(SupportSet::new))?
    };
    let (lifted, report) = solve_sdp_equality_report(&a, &u, &settings)?;
    let x = rank_one_approx(&lifted)?;
    let r = relative_residual(&x, &a)?;
    if let Some(p) = &args.report {
        emit(Some(p), &report_line(&report))?;
    }
    if r > 1e-6 {
        return Err(Error::RecoveryFailed(r).into());
    }
    emit(args.out.as_deref(), &io::format_signal(&canonicalize(&x, 1e-9)))
}

fn recover_noisy(args: RecoverNoisyArgs) -> CliResult {
    let settings = args.solver.settings()?;
    if !(args.eta >= 0.0) {
        return Err(Failure::usage("--eta must be nonnegative"));
    }
    let probe = NoisySupportParams {
        tau: 0.0,
        c: args.c,
        pair_quota: args.quota,
    };
    probe.validate().map_err(Failure::usage)?;
    let a = load(&args.input, io::read_autocorrelation)?;
    let tau = match args.tau {
        Tau::Auto => auto_tau(&a),
        Tau::Value(v) => v,
    };
    let params = NoisySupportParams { tau, ..probe };
    let u = recover_support_noisy(&threshold_support(&a, tau)?, &params)?;
    if let Some(p) = &args.support_out {
        emit(Some(p), &io::format_set(u.as_slice()))?;
    }
    let (lifted, report) = solve_sdp_noisy_report(&a, &u, args.eta, &settings)?;
    let x = rank_one_approx(&lifted)?;
    if let Some(p) = &args.report {
        emit(Some(p), &report_line(&report))?;
    }
    emit(args.out.as_deref(), &io::format_signal(&canonicalize(&x, 1e-9)))
}

fn fienup(args: FienupArgs) -> CliResult {
    if args.k == 0 || args.inits == 0 {
        return Err(Failure::usage("--k and --inits must be positive"));
    }
    let a = load(&args.input, io::read_autocorrelation)?;
    let params = FienupParams {
        k: args.k,
        inits: args.inits,
        iters: args.iters,
        seed: args.seed,
    };
    let r = sparse_fienup(&a, &params)?;
    eprintln!("relative residual {:.3e} (start {})", r.residual, r.best_init);
    emit(args.out.as_deref(), &io::format_signal(&canonicalize(&r.signal, 1e-9)))
}

fn bench(args: BenchArgs) -> CliResult {
    let grid = grid::parse_grid(&args.grid).map_err(Failure::usage)?;
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be positive"));
    }
    let threads = match std::env::var("SPARSE_PR_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::usage(format!("SPARSE_PR_THREADS must be an integer, got {v:?}")))?,
        Err(_) => args.parallel,
    };
    let alg: Algorithm = args.alg.parse().map_err(Failure::usage)?;
    let cfg = BenchConfig {
        alg,
        trials: args.trials,
        base_seed: args.seed,
        values: if args.real {
            ValueDist::RealGaussian
        } else {
            ValueDist::ComplexGaussian
        },
        eta: args.eta,
        c: args.c,
        fienup_inits: args.fienup_inits,
        fienup_iters: args.fienup_iters,
        parallel: threads != 1,
        turnpike: TurnpikeParams {
            refine: args.refine,
            ..Default::default()
        },
        ..Default::default()
    };
    let table = run_curve_in_pool(&grid, &cfg, threads)?;

    let flags: BTreeMap<String, String> = [
        ("grid", args.grid.clone()),
        ("trials", args.trials.to_string()),
        ("alg", alg.tag().to_string()),
        ("threads", threads.to_string()),
        ("eta", args.eta.to_string()),
        ("c", args.c.to_string()),
        ("fienup-inits", args.fienup_inits.to_string()),
        ("fienup-iters", args.fienup_iters.to_string()),
        ("refine", args.refine.to_string()),
        ("values", if args.real { "real" } else { "complex" }.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let started_at = (!args.no_timing).then(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        secs.to_string()
    });
    let manifest = Manifest {
        command: "bench".into(),
        flags,
        seed: args.seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        started_at,
    };
    let files = emit_report(&table.rows, &manifest, &args.out, !args.no_timing).map_err(Failure::input)?;
    for row in &table.rows {
        eprintln!("n={} k={} rate={:.3}", row.n, row.k, row.rate);
    }
    eprintln!("wrote {}", files.csv.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Autocorr(a) => autocorr(a),
        Command::Turnpike(a) => turnpike(a),
        Command::Recover(a) => recover(a),
        Command::RecoverNoisy(a) => recover_noisy(a),
        Command::Fienup(a) => fienup(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
