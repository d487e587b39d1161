//! Restarted Lanczos(m) and its power / momentum preconditioned variants.

use super::momentum::{fixed_beta_stage, StageEnd};
use super::tridiag::tridiag_eig;
use super::{unit_start, Check, Method, SolveOutcome, SolverConfig, Status, Tracker};
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::vector;

/// Relative size below which `|nu2|` is treated as equal to `|nu1|`.
const TIE_TOL: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub alpha: Vec<f64>,
    /// Off-diagonal, length `alpha.len() - 1`.
    pub beta: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }
}

/// One Lanczos cycle: the tridiagonal projection, the basis and the two
/// largest-magnitude Ritz pairs.
#[derive(Debug, Clone)]
pub struct LanczosCycle {
    pub t: TridiagonalMatrix,
    /// Basis vectors `q_1 .. q_k`.
    pub q: Vec<Vec<f64>>,
    pub nu1: f64,
    pub nu2: Option<f64>,
    pub x1: Vec<f64>,
    pub x2: Option<Vec<f64>>,
    /// `||A x1 - nu1 x1||`; absent from cycles run inside a solver, where the
    /// product is taken by the caller.
    pub residual: Option<f64>,
    /// The recurrence hit an invariant subspace and `t` was truncated.
    pub breakdown: bool,
}

/// Runs a single cycle of dimension `m` from `v0` and evaluates the residual
/// of the dominant Ritz pair (`m + 1` matvecs, fewer on breakdown).
pub fn lanczos_cycle(a: &SparseMatrix, v0: &[f64], m: usize) -> Result<LanczosCycle> {
    let cfg = SolverConfig { m, ..SolverConfig::default() };
    let mut tr = Tracker::new(a, v0, Method::Lanczos, &cfg)?;
    let q1 = unit_start(v0)?;
    let mut cyc = cycle(&mut tr, q1, None, m, false)?;
    let ax = tr.matvec(&cyc.x1);
    cyc.residual = Some(vector::residual_norm(&ax, cyc.nu1, &cyc.x1));
    Ok(cyc)
}

/// Builds the Krylov basis from unit `q1`. `aq1`, when given, is `A q1` from
/// an earlier product and saves one matvec.
pub(crate) fn cycle(
    tr: &mut Tracker<'_>,
    q1: Vec<f64>,
    aq1: Option<Vec<f64>>,
    m: usize,
    reorthogonalize: bool,
) -> Result<LanczosCycle> {
    let n = q1.len();
    let m = m.min(n.max(1));
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut scale = 0.0f64;
    let mut breakdown = false;
    let mut cur = q1;
    let mut pending = aq1;

    for k in 0..m {
        let mut u = match pending.take() {
            Some(v) => v,
            None => tr.matvec(&cur),
        };
        let a_k = vector::dot(&cur, &u);
        alpha.push(a_k);
        scale = scale.max(a_k.abs());
        q.push(cur);
        if k + 1 == m {
            break;
        }
        if k > 0 {
            vector::axpy(-beta[k - 1], &q[k - 1], &mut u);
        }
        vector::axpy(-a_k, &q[k], &mut u);
        if reorthogonalize {
            for _ in 0..2 {
                for qj in &q {
                    let c = vector::dot(qj, &u);
                    vector::axpy(-c, qj, &mut u);
                }
            }
        }
        let b_k = vector::norm2(&u);
        if !b_k.is_finite() {
            return Err(Error::Breakdown("non-finite Lanczos coefficient".into()));
        }
        if b_k <= f64::EPSILON * scale.max(b_k) {
            breakdown = true;
            break;
        }
        scale = scale.max(b_k);
        beta.push(b_k);
        vector::scale(1.0 / b_k, &mut u);
        cur = u;
    }

    let t = TridiagonalMatrix { alpha, beta };
    let eig = tridiag_eig(&t)?;
    let mut order: Vec<usize> = (0..eig.values.len()).collect();
    order.sort_by(|&i, &j| eig.values[j].abs().total_cmp(&eig.values[i].abs()));
    let lift = |k: usize| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (qj, c) in q.iter().zip(&eig.vectors[k]) {
            vector::axpy(*c, qj, &mut x);
        }
        x
    };
    let x1 = normalize_or_keep(lift(order[0]));
    let (nu2, x2) = match order.get(1) {
        Some(&k) => (Some(eig.values[k]), Some(normalize_or_keep(lift(k)))),
        None => (None, None),
    };
    Ok(LanczosCycle {
        nu1: eig.values[order[0]],
        nu2,
        x1,
        x2,
        t,
        q,
        residual: None,
        breakdown,
    })
}

/// Without reorthogonalization `Q` drifts from orthonormal; the lifted Ritz
/// vector is renormalized so the residual refers to a unit vector.
fn normalize_or_keep(x: Vec<f64>) -> Vec<f64> {
    match vector::normalized(&x) {
        Some((u, _)) => u,
        None => x,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Inner {
    None,
    Power,
    Momentum,
}

pub fn restarted_lanczos_solve(a: &SparseMatrix, v0: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome> {
    drive(a, v0, cfg, Method::Lanczos, Inner::None)
}

/// Alternates a Lanczos cycle with `m` heavy-ball steps at `beta = nu2^2 / 4`
/// seeded at the dominant Ritz vector.
pub fn mp_lanczos_solve(a: &SparseMatrix, v0: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome> {
    drive(a, v0, cfg, Method::MpLanczos, Inner::Momentum)
}

/// Alternates a Lanczos cycle with `m` power steps seeded at the dominant
/// Ritz vector.
pub fn pp_lanczos_solve(a: &SparseMatrix, v0: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome> {
    drive(a, v0, cfg, Method::PpLanczos, Inner::Power)
}

fn drive(a: &SparseMatrix, v0: &[f64], cfg: &SolverConfig, method: Method, inner: Inner) -> Result<SolveOutcome> {
    let mut tr = Tracker::new(a, v0, method, cfg)?;
    let m = cfg.m;
    let mut x = unit_start(v0)?;
    let mut ax: Option<Vec<f64>> = None;

    loop {
        let cyc = cycle(&mut tr, x, ax.take(), m, cfg.reorthogonalize)?;
        let x1 = cyc.x1;
        let a1 = tr.matvec(&x1);
        match tr.check(cyc.nu1, &x1, &a1) {
            Check::Converged => return Ok(tr.finish(cyc.nu1, cyc.nu2, x1, Status::Converged)),
            Check::Diverged => return Ok(tr.finish(cyc.nu1, cyc.nu2, x1, Status::Diverged)),
            Check::Continue => {}
        }
        if cyc.breakdown {
            return Ok(tr.finish(cyc.nu1, cyc.nu2, x1, Status::BreakdownConverged));
        }
        if !tr.budget_left() {
            return Ok(tr.finish(cyc.nu1, cyc.nu2, x1, Status::MaxMatvecs));
        }

        let beta = match inner {
            Inner::None => {
                x = x1;
                ax = Some(a1);
                continue;
            }
            Inner::Power => 0.0,
            Inner::Momentum => {
                let nu2 = cyc.nu2.unwrap_or(0.0);
                if nu2.abs() >= cyc.nu1.abs() * (1.0 - TIE_TOL) {
                    return Err(Error::SpectralTie { nu1: cyc.nu1, nu2 });
                }
                nu2 * nu2 / 4.0
            }
        };
        let (hb, end) = fixed_beta_stage(&mut tr, x1, a1, beta, Some(m))?;
        match end {
            StageEnd::Converged => return Ok(tr.finish(hb.nu, cyc.nu2, hb.x, Status::Converged)),
            StageEnd::Diverged => return Ok(tr.finish(hb.nu, cyc.nu2, hb.x, Status::Diverged)),
            StageEnd::Budget => return Ok(tr.finish(hb.nu, cyc.nu2, hb.x, Status::MaxMatvecs)),
            StageEnd::Done => {}
        }
        if !tr.budget_left() {
            return Ok(tr.finish(hb.nu, cyc.nu2, hb.x, Status::MaxMatvecs));
        }
        x = hb.x;
        ax = Some(hb.v);
    }
}
