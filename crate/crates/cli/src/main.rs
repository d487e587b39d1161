use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use specmom::bench::{load_manifest, run_bench, thread_cap, write_report};
use specmom::modes::{dominant_index, run_modes, write_slopes, write_traces, MethodChoice};
use specmom::output::{self, real, write_history, write_json, Summary, ACCOUNTING};
use specmom::run::{parse_real, MatrixSource, RunSpec, StartVector};
use specmom::table::{cheb_degree, table_rows, write_table, Example};
use specmom_core::analysis::fit_modes;
use specmom_core::rates::{m_cr_approx, m_cr_root, m_cr_solve};
use specmom_core::{Error, Method, ResidualMode, SolverConfig};

const EXIT_OK: u8 = 0;
const EXIT_NOT_CONVERGED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "specmom", version, about = "Momentum power iterations and restarted Lanczos for dominant eigenpairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and write its residual history and summary.
    Solve(SolveArgs),
    /// Print the crossover Krylov dimension for given gaps.
    Predict(PredictArgs),
    /// Crossover table for one of the diagonal test families.
    Table(TableArgs),
    /// Per-mode decay slopes of several methods on a diagonal matrix.
    Modes(ModesArgs),
    /// Matvec counts over a manifest of matrices and methods.
    Bench(BenchArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Matrix Market file.
    #[arg(long, value_name = "PATH")]
    mm: Option<PathBuf>,
    /// diag(N, N-1, ..., 1).
    #[arg(long, value_name = "N")]
    diag: Option<usize>,
    /// diag(N, N-1, ..., -N/2), N even.
    #[arg(long, value_name = "N")]
    indef: Option<usize>,
}

impl SourceArgs {
    fn source(&self) -> MatrixSource {
        match (&self.mm, self.diag, self.indef) {
            (Some(p), _, _) => MatrixSource::MatrixMarket(p.clone()),
            (_, Some(n), _) => MatrixSource::Diag(n),
            (_, _, Some(n)) => MatrixSource::Indef(n),
            _ => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Args)]
struct StopArgs {
    #[arg(long, default_value_t = 1e-12, value_parser = parse_real)]
    tol: f64,
    /// Stop on ||Ax - nu x|| / |nu| instead of the absolute residual.
    #[arg(long)]
    relative: bool,
    #[arg(long, value_name = "INT", default_value_t = 100_000)]
    max_matvecs: usize,
    /// Start vector file (whitespace-separated reals); all-ones by default.
    #[arg(long, value_name = "PATH")]
    start: Option<PathBuf>,
}

impl StopArgs {
    fn residual_mode(&self) -> ResidualMode {
        if self.relative {
            ResidualMode::Relative
        } else {
            ResidualMode::Absolute
        }
    }

    fn start(&self) -> StartVector {
        self.start.clone().map_or(StartVector::Ones, StartVector::File)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "momentum-dynamic")]
    method: Method,
    /// Krylov dimension (Lanczos family; default 64).
    #[arg(long)]
    m: Option<usize>,
    /// Momentum parameter (momentum-static only).
    #[arg(long, value_parser = parse_real)]
    beta: Option<f64>,
    #[command(flatten)]
    stop: StopArgs,
    /// Residual history CSV (matvec,residual,nu).
    #[arg(long, value_name = "PATH")]
    history: Option<PathBuf>,
    /// Per-mode decay slopes CSV (diagonal matrices only).
    #[arg(long, value_name = "PATH")]
    modes: Option<PathBuf>,
    /// JSON summary.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Matvecs to skip before fitting mode slopes.
    #[arg(long, value_name = "INT", default_value_t = 0)]
    burn_in: usize,
}

#[derive(Args)]
struct PredictArgs {
    /// (lambda1 - |lambda2|) / |lambda2|; ratios such as 1/1023 are accepted.
    #[arg(long, value_parser = parse_real)]
    eps: f64,
    /// (lambda1 - lambda2') / (lambda2' - lambdan').
    #[arg(long = "eps-l", value_parser = parse_real)]
    eps_l: f64,
    /// Chebyshev degree N on the momentum side.
    #[arg(long = "cheb-n", short = 'N', default_value_t = 199)]
    cheb_n: usize,
}

#[derive(Args)]
struct TableArgs {
    /// 1: diag(n, ..., 1); 2: diag(n, ..., -n/2).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    example: u8,
    /// Comma-separated sizes; defaults to the standard list for the example.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Output CSV; stdout when omitted.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ModesArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated methods, NAME or NAME:M (NAME:BETA for momentum-static).
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<MethodChoice>,
    #[command(flatten)]
    stop: StopArgs,
    /// Slopes CSV; stdout when omitted.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    /// 1-based modes whose per-matvec traces go to --traces.
    #[arg(long = "trace-modes", value_delimiter = ',')]
    trace_modes: Vec<usize>,
    #[arg(long, value_name = "PATH", requires = "trace_modes")]
    traces: Option<PathBuf>,
    #[arg(long, value_name = "INT", default_value_t = 0)]
    burn_in: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML manifest of matrices and methods.
    manifest: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Table(a) => cmd_table(a),
        Command::Modes(a) => cmd_modes(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

/// Numerical failures count as non-convergence; everything else is a usage
/// or I/O problem.
fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::Divergence(_)
            | Error::Breakdown(_)
            | Error::SpectralTie { .. }
            | Error::NoCrossover(_),
        ) => EXIT_NOT_CONVERGED,
        _ => EXIT_USAGE,
    }
}

fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => f(&mut output::create(p)?),
        None => f(&mut io::stdout().lock()),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let mut spec = RunSpec::new(args.source.source(), args.method);
    spec.m = args.m;
    spec.beta = args.beta;
    spec.tol = args.stop.tol;
    spec.residual_mode = args.stop.residual_mode();
    spec.max_matvecs = args.stop.max_matvecs;
    spec.start = args.stop.start();
    spec.validate()?;

    let a = spec.source.load()?;
    let diag = a.diagonal();
    if args.modes.is_some() && diag.is_none() {
        bail!("--modes needs a diagonal matrix");
    }
    let cfg = SolverConfig { record_modes: args.modes.is_some(), ..spec.config() };
    let out = spec.run_on(&a, &cfg)?;

    if let Some(p) = &args.history {
        write_history(&out, output::create(p)?)?;
    }
    if let (Some(p), Some(d)) = (&args.modes, &diag) {
        let report = fit_modes(d, &out, args.burn_in)?;
        let mut w = output::create(p)?;
        writeln!(w, "lambda_ratio,slope_{}", spec.label())?;
        for (r, s) in report.eigenvalue_ratio.iter().zip(&report.slope) {
            writeln!(w, "{},{}", real(*r), real(*s))?;
        }
        w.flush()?;
    }
    let summary = Summary {
        method: out.method.name(),
        matrix: spec.source.to_string(),
        n: a.dim(),
        status: out.status.name(),
        matvecs_used: out.matvecs_used,
        nu1: out.nu1,
        nu2: out.nu2,
        final_residual: out.residuals.last().map(|p| p.residual),
        best_residual: out.best_residual,
        residual_mode: match spec.residual_mode {
            ResidualMode::Absolute => "absolute",
            ResidualMode::Relative => "relative",
        },
        tol: spec.tol,
        matvec_accounting: ACCOUNTING,
        warnings: &out.warnings,
    };
    if let Some(p) = &args.json {
        write_json(&summary, output::create(p).context("writing JSON summary")?)?;
    }
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{} on {} (n={}): {} after {} matvecs, nu1={}, best residual={}",
        spec.label(),
        summary.matrix,
        summary.n,
        summary.status,
        summary.matvecs_used,
        real(out.nu1),
        real(out.best_residual)
    );
    Ok(if out.status.is_converged() { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn cmd_predict(args: PredictArgs) -> Result<u8> {
    let approx = m_cr_approx(args.eps, args.eps_l);
    let solved = m_cr_solve(args.eps, args.eps_l, args.cheb_n);
    match (approx, solved) {
        (Ok(a), Ok(s)) => {
            let root = m_cr_root(args.eps, args.eps_l, args.cheb_n)?;
            println!("m_cr_approx={a}");
            println!("m_cr_solved={s}");
            println!("m_cr_root={}", real(root));
            Ok(EXIT_OK)
        }
        (Err(e), _) | (_, Err(e)) => {
            if matches!(e, Error::NoCrossover(_)) {
                println!("no crossover: {e}");
                Ok(EXIT_NOT_CONVERGED)
            } else {
                Err(e.into())
            }
        }
    }
}

fn cmd_table(args: TableArgs) -> Result<u8> {
    let example = Example::from_number(args.example)?;
    let sizes = if args.sizes.is_empty() { example.default_sizes().to_vec() } else { args.sizes };
    let rows = table_rows(example, &sizes)?;
    with_output(args.output.as_deref(), |w| write_table(&rows, w))?;
    let degrees: Vec<String> = sizes.iter().map(|&n| format!("{n}:{}", cheb_degree(n))).collect();
    eprintln!("Chebyshev degree N per size: {}", degrees.join(" "));
    Ok(EXIT_OK)
}

fn cmd_modes(args: ModesArgs) -> Result<u8> {
    let source = args.source.source();
    let a = source.load()?;
    let Some(dom) = dominant_index(&a) else {
        bail!("modes needs a diagonal matrix; {source} is not diagonal");
    };
    let v0 = args.stop.start().build(a.dim())?;
    let cfg = SolverConfig {
        tol: args.stop.tol,
        residual_mode: args.stop.residual_mode(),
        max_matvecs: args.stop.max_matvecs,
        ..SolverConfig::default()
    };
    cfg.validate(Method::Power)?;
    let runs = run_modes(&a, &v0, &args.methods, &cfg, args.burn_in)?;
    with_output(args.output.as_deref(), |w| write_slopes(&runs, w))?;
    if let Some(p) = &args.traces {
        write_traces(&runs, &args.trace_modes, dom, output::create(p)?)?;
    }
    for r in &runs {
        eprintln!("{}: {} after {} matvecs", r.label, r.outcome.status, r.outcome.matvecs_used);
    }
    let all = runs.iter().all(|r| r.outcome.status.is_converged());
    Ok(if all { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn cmd_bench(args: BenchArgs) -> Result<u8> {
    let manifest = load_manifest(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let report = run_bench(&manifest, base, thread_cap()?)?;
    with_output(args.output.as_deref(), |w| write_report(&report, w))?;
    Ok(if report.all_converged() { EXIT_OK } else { EXIT_NOT_CONVERGED })
}
