//! A single solver run: where the matrix comes from, which method, and how
//! to stop.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use specmom_core::market::read_matrix_market;
use specmom_core::matrix::make_diag_indefinite;
use specmom_core::solvers::{self, SolveOutcome};
use specmom_core::{make_diag_descending, Method, ResidualMode, SolverConfig, SparseMatrix};

pub const DEFAULT_M: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    MatrixMarket(PathBuf),
    /// `diag(n, n-1, ..., 1)`
    Diag(usize),
    /// `diag(n, n-1, ..., -n/2)`
    Indef(usize),
}

impl MatrixSource {
    pub fn load(&self) -> Result<SparseMatrix> {
        Ok(match self {
            MatrixSource::MatrixMarket(p) => {
                read_matrix_market(p).with_context(|| format!("reading {}", p.display()))?
            }
            MatrixSource::Diag(n) => make_diag_descending(*n)?,
            MatrixSource::Indef(n) => make_diag_indefinite(*n)?,
        })
    }
}

impl fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSource::MatrixMarket(p) => write!(f, "{}", p.display()),
            MatrixSource::Diag(n) => write!(f, "diag:{n}"),
            MatrixSource::Indef(n) => write!(f, "indef:{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum StartVector {
    #[default]
    Ones,
    /// Whitespace-separated reals, one entry per row of the matrix.
    File(PathBuf),
}

impl StartVector {
    pub fn build(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            StartVector::Ones => Ok(vec![1.0; n]),
            StartVector::File(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let v = text
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().with_context(|| format!("bad entry {t:?} in {}", p.display())))
                    .collect::<Result<Vec<_>>>()?;
                if v.len() != n {
                    bail!("{} has {} entries, matrix has {n} rows", p.display(), v.len());
                }
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub source: MatrixSource,
    pub method: Method,
    pub m: Option<usize>,
    pub beta: Option<f64>,
    pub tol: f64,
    pub residual_mode: ResidualMode,
    pub max_matvecs: usize,
    pub start: StartVector,
}

impl RunSpec {
    pub fn new(source: MatrixSource, method: Method) -> Self {
        Self {
            source,
            method,
            m: None,
            beta: None,
            tol: 1e-12,
            residual_mode: ResidualMode::Absolute,
            max_matvecs: 100_000,
            start: StartVector::Ones,
        }
    }

    /// Checks that `m` and `beta` are only given to methods that use them.
    pub fn validate(&self) -> Result<()> {
        if self.beta.is_some() && !self.method.uses_beta() {
            bail!("--beta only applies to momentum-static, not {}", self.method);
        }
        if self.method.uses_beta() && self.beta.is_none() {
            bail!("momentum-static needs --beta");
        }
        if self.m.is_some() && !self.method.uses_m() {
            bail!("--m only applies to the Lanczos family, not {}", self.method);
        }
        self.config().validate(self.method)?;
        Ok(())
    }

    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            residual_mode: self.residual_mode,
            max_matvecs: self.max_matvecs,
            m: self.m.unwrap_or(DEFAULT_M),
            beta: self.beta.unwrap_or(0.0),
            ..SolverConfig::default()
        }
    }

    /// Method name with the Krylov dimension appended for the Lanczos family.
    pub fn label(&self) -> String {
        if self.method.uses_m() {
            format!("{}-{}", self.method, self.m.unwrap_or(DEFAULT_M))
        } else {
            self.method.to_string()
        }
    }

    pub fn run_on(&self, a: &SparseMatrix, cfg: &SolverConfig) -> Result<SolveOutcome> {
        let v0 = self.start.build(a.dim())?;
        Ok(solvers::solve(a, &v0, self.method, cfg)?)
    }
}

/// Parses a real, also accepting a ratio such as `1/1023`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (parse(p)?, parse(q)?);
            if q == 0.0 {
                return Err(format!("{s:?}: division by zero"));
            }
            Ok(p / q)
        }
        None => parse(s),
    }
}

/// Resolves `path` against `base` unless it is absolute.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
