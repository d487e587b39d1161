//! Matvec-count tables over a manifest of matrices and methods.
//!
//! ```toml
//! methods = ["lanczos:64", "mp-lanczos:64", "momentum-dynamic"]
//!
//! [run]
//! tol = 1e-12
//! relative = false
//! max_matvecs = 5000
//!
//! [[matrices]]
//! name = "Andrews"
//! path = "Andrews.mtx"
//!
//! [[matrices]]
//! name = "example1"
//! diag = 1024
//! ```
//!
//! Each cell holds the matvec count to tolerance, or `F(r)` with the best
//! residual `r` reached when the budget ran out.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use specmom_core::solvers::solve;
use specmom_core::{ResidualMode, SolverConfig, SparseMatrix, Status};

use crate::modes::MethodChoice;
use crate::output::real;
use crate::run::{resolve, MatrixSource, DEFAULT_M};

pub const THREADS_ENV: &str = "SPECMOM_THREADS";
pub const DEFAULT_CAP: usize = 5000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub methods: Vec<String>,
    #[serde(default)]
    pub run: RunDefaults,
    pub matrices: Vec<MatrixEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunDefaults {
    pub tol: f64,
    pub relative: bool,
    pub max_matvecs: usize,
}

impl Default for RunDefaults {
    fn default() -> Self {
        Self { tol: 1e-12, relative: false, max_matvecs: DEFAULT_CAP }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub name: String,
    pub path: Option<PathBuf>,
    pub diag: Option<usize>,
    pub indef: Option<usize>,
}

impl MatrixEntry {
    fn source(&self, base: &Path) -> Result<MatrixSource> {
        match (&self.path, self.diag, self.indef) {
            (Some(p), None, None) => Ok(MatrixSource::MatrixMarket(resolve(base, p))),
            (None, Some(n), None) => Ok(MatrixSource::Diag(n)),
            (None, None, Some(n)) => Ok(MatrixSource::Indef(n)),
            _ => bail!("matrix {:?}: give exactly one of path, diag, indef", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Converged { matvecs: usize, nu1: f64 },
    NotConverged { best: f64 },
    Missing,
    Failed(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Converged { matvecs, .. } => matvecs.to_string(),
            Cell::NotConverged { best } => format!("F({best:.1e})"),
            Cell::Missing => "missing".into(),
            Cell::Failed(_) => "error".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub n: Option<usize>,
    pub cells: Vec<Cell>,
}

impl BenchRow {
    /// Dominant eigenvalue from the first converged run.
    pub fn lambda1(&self) -> Option<f64> {
        self.cells.iter().find_map(|c| match c {
            Cell::Converged { nu1, .. } => Some(*nu1),
            _ => None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub labels: Vec<String>,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn all_converged(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.cells.iter().all(|c| matches!(c, Cell::Converged { .. })))
    }
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Worker count: `SPECMOM_THREADS` if set, else the available parallelism.
pub fn thread_cap() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV}={v:?} is not a count"))?;
            if n == 0 {
                bail!("{THREADS_ENV} must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Maps `f` over `items` on up to `threads` workers, keeping input order.
fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..threads.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().expect("result slots poisoned")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots poisoned")
        .into_iter()
        .map(|r| r.expect("every item processed"))
        .collect()
}

pub fn run_bench(manifest: &Manifest, base: &Path, threads: usize) -> Result<BenchReport> {
    let choices: Vec<MethodChoice> = manifest
        .methods
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    if choices.is_empty() {
        bail!("manifest lists no methods");
    }
    let sources: Vec<MatrixSource> = manifest
        .matrices
        .iter()
        .map(|m| m.source(base))
        .collect::<Result<_>>()?;
    let cfg = SolverConfig {
        tol: manifest.run.tol,
        residual_mode: if manifest.run.relative { ResidualMode::Relative } else { ResidualMode::Absolute },
        max_matvecs: manifest.run.max_matvecs,
        ..SolverConfig::default()
    };

    let loaded: Vec<Result<SparseMatrix>> = par_map(&sources, threads, |s| s.load());
    for (entry, m) in manifest.matrices.iter().zip(&loaded) {
        if let Err(e) = m {
            eprintln!("skipping {}: {e:#}", entry.name);
        }
    }

    let jobs: Vec<(usize, usize)> = (0..sources.len())
        .filter(|&i| loaded[i].is_ok())
        .flat_map(|i| (0..choices.len()).map(move |j| (i, j)))
        .collect();
    let results = par_map(&jobs, threads, |&(i, j)| {
        let a = loaded[i].as_ref().expect("filtered to loaded matrices");
        let c = choices[j];
        let cfg = SolverConfig {
            m: c.m.unwrap_or(DEFAULT_M),
            beta: c.beta.unwrap_or(0.0),
            ..cfg.clone()
        };
        match solve(a, &vec![1.0; a.dim()], c.method, &cfg) {
            Ok(out) if out.status.is_converged() => Cell::Converged { matvecs: out.matvecs_used, nu1: out.nu1 },
            Ok(out) if out.status == Status::Diverged => Cell::Failed("diverged".into()),
            Ok(out) => Cell::NotConverged { best: out.best_residual },
            Err(e) => Cell::Failed(e.to_string()),
        }
    });

    let mut rows: Vec<BenchRow> = manifest
        .matrices
        .iter()
        .zip(&loaded)
        .map(|(entry, m)| BenchRow {
            name: entry.name.clone(),
            n: m.as_ref().ok().map(|a| a.dim()),
            cells: vec![if m.is_ok() { Cell::Failed(String::new()) } else { Cell::Missing }; choices.len()],
        })
        .collect();
    for (&(i, j), cell) in jobs.iter().zip(results) {
        if let Cell::Failed(msg) = &cell {
            eprintln!("{} / {}: {msg}", rows[i].name, choices[j].label());
        }
        rows[i].cells[j] = cell;
    }
    Ok(BenchReport { labels: choices.iter().map(|c| c.label()).collect(), rows })
}

/// `matrix,n,lambda1,<label>...`
pub fn write_report<W: Write>(report: &BenchReport, mut w: W) -> Result<()> {
    write!(w, "matrix,n,lambda1")?;
    for l in &report.labels {
        write!(w, ",{l}")?;
    }
    writeln!(w)?;
    for r in &report.rows {
        let n = r.n.map_or_else(String::new, |n| n.to_string());
        let l1 = r.lambda1().map_or_else(String::new, real);
        write!(w, "{},{},{}", r.name, n, l1)?;
        for c in &r.cells {
            write!(w, ",{}", c.render())?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
