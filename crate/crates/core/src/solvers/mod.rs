//! Iterative dominant-eigenpair solvers sharing one matvec-counted driver.
//!
//! Every method checks `||A x - nu x||` after each matvec that produces a new
//! iterate (per cycle for Lanczos), and stops on the first check below `tol`.
//! The product `A x1` used for a restart residual is reused as the first
//! matvec of whatever stage follows, so it is counted once.

mod lanczos;
mod momentum;
mod tridiag;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::vector;

pub use lanczos::{
    lanczos_cycle, mp_lanczos_solve, pp_lanczos_solve, restarted_lanczos_solve, LanczosCycle,
    TridiagonalMatrix,
};
pub use momentum::{dynamic_momentum_solve, power_solve, static_momentum_solve};
pub use tridiag::{tridiag_eig, TridiagEig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualMode {
    #[default]
    Absolute,
    /// Divide the residual norm by `|nu|`.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Power,
    MomentumStatic,
    MomentumDynamic,
    Lanczos,
    MpLanczos,
    PpLanczos,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Power,
        Method::MomentumStatic,
        Method::MomentumDynamic,
        Method::Lanczos,
        Method::MpLanczos,
        Method::PpLanczos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Power => "power",
            Method::MomentumStatic => "momentum-static",
            Method::MomentumDynamic => "momentum-dynamic",
            Method::Lanczos => "lanczos",
            Method::MpLanczos => "mp-lanczos",
            Method::PpLanczos => "pp-lanczos",
        }
    }

    /// Whether the method takes a Krylov dimension `m`.
    pub fn uses_m(self) -> bool {
        matches!(self, Method::Lanczos | Method::MpLanczos | Method::PpLanczos)
    }

    pub fn uses_beta(self) -> bool {
        self == Method::MomentumStatic
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::Input(format!("unknown method {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub residual_mode: ResidualMode,
    pub max_matvecs: usize,
    /// Krylov dimension, Lanczos family only.
    pub m: usize,
    /// Momentum parameter, static momentum only.
    pub beta: f64,
    pub record_history: bool,
    /// Record `|x_j|` at every residual check (diagonal operators only).
    pub record_modes: bool,
    /// Full reorthogonalization inside Lanczos cycles. Off by default.
    pub reorthogonalize: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            residual_mode: ResidualMode::Absolute,
            max_matvecs: 100_000,
            m: 64,
            beta: 0.0,
            record_history: true,
            record_modes: false,
            reorthogonalize: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, method: Method) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Input(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_matvecs == 0 {
            return Err(Error::Input("max_matvecs must be at least 1".into()));
        }
        if method.uses_m() && self.m < 2 {
            return Err(Error::Input(format!("m must be >= 2, got {}", self.m)));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::Input(format!("beta must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxMatvecs,
    Diverged,
    /// The Lanczos recurrence found an invariant subspace before `tol` was
    /// reached; the Ritz pair is exact up to rounding.
    BreakdownConverged,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxMatvecs => "max_matvecs",
            Status::Diverged => "diverged",
            Status::BreakdownConverged => "breakdown_converged",
        }
    }

    pub fn is_converged(self) -> bool {
        matches!(self, Status::Converged | Status::BreakdownConverged)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One residual check. `residual` is the quantity compared against `tol`
/// (relative when the config asks for it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint {
    pub matvecs: usize,
    pub residual: f64,
    pub nu: f64,
}

/// `|x_j|` for every coordinate at one residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSnapshot {
    pub matvecs: usize,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub method: Method,
    pub nu1: f64,
    /// Second Ritz value of the last Lanczos cycle.
    pub nu2: Option<f64>,
    /// Unit-norm eigenvector estimate.
    pub x1: Vec<f64>,
    pub residuals: Vec<ResidualPoint>,
    pub matvecs_used: usize,
    pub status: Status,
    /// Smallest residual seen, in the configured mode.
    pub best_residual: f64,
    /// `beta_k` per step of dynamic momentum.
    pub beta_history: Vec<f64>,
    pub modes: Vec<ModeSnapshot>,
    pub warnings: Vec<String>,
}

/// Runs `method` from `v0`.
pub fn solve(a: &SparseMatrix, v0: &[f64], method: Method, cfg: &SolverConfig) -> Result<SolveOutcome> {
    match method {
        Method::Power => power_solve(a, v0, cfg),
        Method::MomentumStatic => static_momentum_solve(a, v0, cfg),
        Method::MomentumDynamic => dynamic_momentum_solve(a, v0, cfg),
        Method::Lanczos => restarted_lanczos_solve(a, v0, cfg),
        Method::MpLanczos => mp_lanczos_solve(a, v0, cfg),
        Method::PpLanczos => pp_lanczos_solve(a, v0, cfg),
    }
}

/// Outcome of one residual check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Check {
    Continue,
    Converged,
    Diverged,
}

/// Per-run bookkeeping: the matvec counter, residual history and snapshots.
pub(crate) struct Tracker<'a> {
    pub a: &'a SparseMatrix,
    pub cfg: SolverConfig,
    pub method: Method,
    pub matvecs: usize,
    pub residuals: Vec<ResidualPoint>,
    pub modes: Vec<ModeSnapshot>,
    pub best: f64,
    pub beta_history: Vec<f64>,
    pub warnings: Vec<String>,
}

impl<'a> Tracker<'a> {
    pub fn new(a: &'a SparseMatrix, v0: &[f64], method: Method, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate(method)?;
        if v0.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: v0.len(),
            });
        }
        if cfg.record_modes && !a.is_diagonal() {
            return Err(Error::Unsupported(
                "modal recording needs a diagonal operator".into(),
            ));
        }
        Ok(Self {
            a,
            cfg: cfg.clone(),
            method,
            matvecs: 0,
            residuals: Vec::new(),
            modes: Vec::new(),
            best: f64::INFINITY,
            beta_history: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn matvec(&mut self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.a.apply(x, &mut y);
        self.matvecs += 1;
        y
    }

    pub fn budget_left(&self) -> bool {
        self.matvecs < self.cfg.max_matvecs
    }

    /// Computes and records the residual of `(nu, x)` given `ax = A x`.
    pub fn check(&mut self, nu: f64, x: &[f64], ax: &[f64]) -> Check {
        let raw = vector::residual_norm(ax, nu, x);
        self.check_raw(nu, x, raw)
    }

    pub fn check_raw(&mut self, nu: f64, x: &[f64], raw: f64) -> Check {
        let measured = match self.cfg.residual_mode {
            ResidualMode::Absolute => raw,
            ResidualMode::Relative if raw == 0.0 => 0.0,
            ResidualMode::Relative => raw / nu.abs(),
        };
        if self.cfg.record_history {
            self.residuals.push(ResidualPoint {
                matvecs: self.matvecs,
                residual: measured,
                nu,
            });
        }
        if self.cfg.record_modes {
            self.modes.push(ModeSnapshot {
                matvecs: self.matvecs,
                coefficients: x.iter().map(|v| v.abs()).collect(),
            });
        }
        if !measured.is_finite() || !nu.is_finite() || !vector::all_finite(x) {
            return Check::Diverged;
        }
        if measured < self.best {
            self.best = measured;
        }
        if measured < self.cfg.tol {
            Check::Converged
        } else {
            Check::Continue
        }
    }

    pub fn finish(self, nu1: f64, nu2: Option<f64>, x1: Vec<f64>, status: Status) -> SolveOutcome {
        SolveOutcome {
            method: self.method,
            nu1,
            nu2,
            x1,
            residuals: self.residuals,
            matvecs_used: self.matvecs,
            status,
            best_residual: self.best,
            beta_history: self.beta_history,
            modes: self.modes,
            warnings: self.warnings,
        }
    }
}

pub(crate) fn unit_start(v0: &[f64]) -> Result<Vec<f64>> {
    vector::normalized(v0)
        .map(|(u, _)| u)
        .ok_or_else(|| Error::Input("initial vector must be nonzero and finite".into()))
}
