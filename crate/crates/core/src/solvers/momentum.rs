//! Power iteration and its heavy-ball accelerations.

use super::{unit_start, Check, Method, SolveOutcome, SolverConfig, Status, Tracker};
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::vector;

/// Consecutive clamped residual ratios before dynamic momentum warns about a
/// probable dominant-eigenvalue tie.
const CLAMP_WARN_STEPS: usize = 50;

/// Heavy-ball iterate `x_{k+1} = (A x_k - (beta / h_k) x_{k-1}) / h_{k+1}`.
///
/// `v` always holds `A x`, so the next step needs no extra product.
pub(crate) struct HeavyBall {
    pub x_prev: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// Norm that produced the current `x`.
    pub h: f64,
    pub nu: f64,
    /// Unscaled residual norm `||v - nu x||`.
    pub residual: f64,
}

impl HeavyBall {
    /// Takes one power step from unit `x0` with `v1 = A x0` already known.
    /// Costs one matvec.
    pub fn start(tr: &mut Tracker<'_>, x0: Vec<f64>, v1: Vec<f64>) -> Result<Self> {
        let h = vector::norm2(&v1);
        if h == 0.0 {
            return Err(Error::Breakdown("A x vanished in power step".into()));
        }
        let x: Vec<f64> = v1.iter().map(|v| v / h).collect();
        let mut hb = Self {
            x_prev: x0,
            x,
            v: Vec::new(),
            h,
            nu: 0.0,
            residual: 0.0,
        };
        hb.apply(tr);
        Ok(hb)
    }

    /// One momentum step; `beta = 0` is a power step. Costs one matvec.
    pub fn step(&mut self, tr: &mut Tracker<'_>, beta: f64) -> Result<()> {
        let mut u = self.v.clone();
        vector::axpy(-beta / self.h, &self.x_prev, &mut u);
        let h = vector::norm2(&u);
        if h == 0.0 {
            return Err(Error::Breakdown("momentum update vanished".into()));
        }
        vector::scale(1.0 / h, &mut u);
        self.x_prev = std::mem::replace(&mut self.x, u);
        self.h = h;
        self.apply(tr);
        Ok(())
    }

    fn apply(&mut self, tr: &mut Tracker<'_>) {
        self.v = tr.matvec(&self.x);
        self.nu = vector::dot(&self.v, &self.x);
        self.residual = vector::residual_norm(&self.v, self.nu, &self.x);
    }

    pub fn check(&self, tr: &mut Tracker<'_>) -> Check {
        tr.check_raw(self.nu, &self.x, self.residual)
    }
}

/// What ended a run of heavy-ball steps.
pub(crate) enum StageEnd {
    Converged,
    Diverged,
    Budget,
    /// Ran the requested number of steps.
    Done,
}

fn status_of(end: StageEnd) -> Status {
    match end {
        StageEnd::Converged => Status::Converged,
        StageEnd::Diverged => Status::Diverged,
        StageEnd::Budget | StageEnd::Done => Status::MaxMatvecs,
    }
}

/// Starts a heavy-ball run at `x0`, then takes up to `steps - 1` further
/// steps with fixed `beta`. The first step is always a power step.
pub(crate) fn fixed_beta_stage(
    tr: &mut Tracker<'_>,
    x0: Vec<f64>,
    v1: Vec<f64>,
    beta: f64,
    steps: Option<usize>,
) -> Result<(HeavyBall, StageEnd)> {
    let mut hb = HeavyBall::start(tr, x0, v1)?;
    let mut taken = 1;
    loop {
        match hb.check(tr) {
            Check::Converged => return Ok((hb, StageEnd::Converged)),
            Check::Diverged => return Ok((hb, StageEnd::Diverged)),
            Check::Continue => {}
        }
        if steps.is_some_and(|s| taken >= s) {
            return Ok((hb, StageEnd::Done));
        }
        if !tr.budget_left() {
            return Ok((hb, StageEnd::Budget));
        }
        hb.step(tr, beta)?;
        taken += 1;
    }
}

fn fixed_beta_solve(
    a: &SparseMatrix,
    v0: &[f64],
    cfg: &SolverConfig,
    method: Method,
    beta: f64,
) -> Result<SolveOutcome> {
    let mut tr = Tracker::new(a, v0, method, cfg)?;
    let x0 = unit_start(v0)?;
    let v1 = tr.matvec(&x0);
    let (hb, end) = fixed_beta_stage(&mut tr, x0, v1, beta, None)?;
    Ok(tr.finish(hb.nu, None, hb.x, status_of(end)))
}

pub fn power_solve(a: &SparseMatrix, v0: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome> {
    fixed_beta_solve(a, v0, cfg, Method::Power, 0.0)
}

/// Heavy-ball iteration with the fixed `cfg.beta`. Convergence needs
/// `beta < lambda1^2 / 4`; this is not checked.
pub fn static_momentum_solve(a: &SparseMatrix, v0: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome> {
    fixed_beta_solve(a, v0, cfg, Method::MomentumStatic, cfg.beta)
}

/// Heavy-ball iteration with `beta_k = nu_k^2 r_k^2 / 4`, where `r_k` is
/// recovered from the ratio `rho` of consecutive residual norms through
/// `r = 2 rho / (1 + rho^2)`.
pub fn dynamic_momentum_solve(a: &SparseMatrix, v0: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome> {
    let mut tr = Tracker::new(a, v0, Method::MomentumDynamic, cfg)?;
    let x0 = unit_start(v0)?;
    let v1 = tr.matvec(&x0);
    let mut hb = HeavyBall::start(&mut tr, x0, v1)?;
    if let Some(status) = stop_status(hb.check(&mut tr)) {
        return Ok(tr.finish(hb.nu, None, hb.x, status));
    }
    if !tr.budget_left() {
        return Ok(tr.finish(hb.nu, None, hb.x, Status::MaxMatvecs));
    }
    let d1 = hb.residual;
    hb.step(&mut tr, 0.0)?;
    if let Some(status) = stop_status(hb.check(&mut tr)) {
        return Ok(tr.finish(hb.nu, None, hb.x, status));
    }
    let mut d_prev = hb.residual;
    let mut r = ratio(d_prev, d1);
    let mut clamped = 0usize;
    loop {
        if !tr.budget_left() {
            return Ok(tr.finish(hb.nu, None, hb.x, Status::MaxMatvecs));
        }
        let beta = hb.nu * hb.nu * r * r / 4.0;
        tr.beta_history.push(beta);
        hb.step(&mut tr, beta)?;
        if let Some(status) = stop_status(hb.check(&mut tr)) {
            return Ok(tr.finish(hb.nu, None, hb.x, status));
        }
        let rho = ratio(hb.residual, d_prev);
        if rho >= 1.0 {
            clamped += 1;
            if clamped == CLAMP_WARN_STEPS {
                tr.warnings.push(format!(
                    "residual ratio clamped at 1 for {CLAMP_WARN_STEPS} consecutive steps; \
                     the dominant eigenvalue may be tied in magnitude"
                ));
            }
        } else {
            clamped = 0;
        }
        r = 2.0 * rho / (1.0 + rho * rho);
        d_prev = hb.residual;
    }
}

/// `min(num / den, 1)`, treating a zero denominator as no contraction.
fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        (num / den).min(1.0)
    } else {
        1.0
    }
}

fn stop_status(check: Check) -> Option<Status> {
    match check {
        Check::Converged => Some(Status::Converged),
        Check::Diverged => Some(Status::Diverged),
        Check::Continue => None,
    }
}
