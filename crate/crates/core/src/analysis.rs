//! Per-eigenmode decay rates and residual-history fits.
//!
//! On a diagonal operator the eigenbasis is the standard basis, so the modal
//! coefficients of an iterate are its entries. Slopes are fitted to
//! `log10` of a series against the matvec count.

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::solvers::{self, Method, ResidualPoint, SolveOutcome, SolverConfig};

/// Values below this are treated as underflowed and left out of fits.
pub const UNDERFLOW_FLOOR: f64 = 1e-280;

/// `|x_j|` for each mode of a diagonal operator.
pub fn modal_coefficients(x: &[f64], a: &SparseMatrix) -> Result<Vec<f64>> {
    if !a.is_diagonal() {
        return Err(Error::Unsupported(
            "modal coefficients need a diagonal operator".into(),
        ));
    }
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: x.len() });
    }
    Ok(x.iter().map(|v| v.abs()).collect())
}

/// Least-squares slope of `log10(value)` against `k`. Points that are not
/// finite or fall below [`UNDERFLOW_FLOOR`] are dropped; `None` when fewer
/// than two distinct `k` remain.
pub fn regression_slope(series: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(k, v)| k.is_finite() && v.is_finite() && *v >= UNDERFLOW_FLOOR)
        .map(|&(k, v)| (k, v.log10()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mk = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, y) in &pts {
        sxy += (k - mk) * (y - my);
        sxx += (k - mk) * (k - mk);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Fitted `log10` residual slope per matvec, skipping checks taken before
/// `burn_in` matvecs.
pub fn history_slope(residuals: &[ResidualPoint], burn_in: usize) -> Option<f64> {
    let series: Vec<(f64, f64)> = residuals
        .iter()
        .filter(|p| p.matvecs >= burn_in)
        .map(|p| (p.matvecs as f64, p.residual))
        .collect();
    regression_slope(&series)
}

/// `(max - min) / |mean|` over the finite entries.
pub fn relative_spread(values: &[f64]) -> Option<f64> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return None;
    }
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = finite.iter().sum::<f64>() / finite.len() as f64;
    Some((max - min) / mean.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalDecayReport {
    pub method: Method,
    /// `lambda_j / lambda_1` for every subdominant mode, in storage order.
    pub eigenvalue_ratio: Vec<f64>,
    /// Fitted `log10` decay per matvec; NaN where not usable.
    pub slope: Vec<f64>,
    pub usable: Vec<bool>,
}

impl ModalDecayReport {
    pub fn usable_slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.slope
            .iter()
            .zip(&self.usable)
            .filter(|(_, u)| **u)
            .map(|(s, _)| *s)
    }

    /// Slope of the mode whose ratio is closest to `ratio`.
    pub fn slope_at_ratio(&self, ratio: f64) -> Option<f64> {
        let j = self
            .eigenvalue_ratio
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - ratio).abs().total_cmp(&(b.1 - ratio).abs()))?
            .0;
        self.usable[j].then_some(self.slope[j])
    }
}

/// Runs `method` on a diagonal operator with modal recording and fits one
/// slope per subdominant mode.
///
/// Each mode is tracked relative to the dominant one, `|x_j| / |x_1|`, which
/// removes the common normalization transient; snapshots taken before
/// `burn_in` matvecs are skipped.
pub fn modal_decay_run(
    a: &SparseMatrix,
    v0: &[f64],
    method: Method,
    cfg: &SolverConfig,
    burn_in: usize,
) -> Result<(ModalDecayReport, SolveOutcome)> {
    let diag = a.diagonal().ok_or_else(|| {
        Error::Unsupported("modal decay runs need a diagonal operator".into())
    })?;
    let cfg = SolverConfig { record_modes: true, ..cfg.clone() };
    let outcome = solvers::solve(a, v0, method, &cfg)?;
    let report = fit_modes(&diag, &outcome, burn_in)?;
    Ok((report, outcome))
}

/// Fits per-mode slopes from the snapshots already recorded in `outcome`.
pub fn fit_modes(diag: &[f64], outcome: &SolveOutcome, burn_in: usize) -> Result<ModalDecayReport> {
    let dom = dominant_index(diag)
        .ok_or_else(|| Error::Input("empty spectrum".into()))?;
    let lambda1 = diag[dom];
    let snaps: Vec<_> = outcome
        .modes
        .iter()
        .filter(|s| s.matvecs >= burn_in && s.coefficients[dom] > 0.0)
        .collect();
    let mut eigenvalue_ratio = Vec::with_capacity(diag.len().saturating_sub(1));
    let mut slope = Vec::with_capacity(eigenvalue_ratio.capacity());
    let mut usable = Vec::with_capacity(eigenvalue_ratio.capacity());
    for (j, &lam) in diag.iter().enumerate() {
        if j == dom {
            continue;
        }
        let series: Vec<(f64, f64)> = snaps
            .iter()
            .map(|s| (s.matvecs as f64, s.coefficients[j] / s.coefficients[dom]))
            .collect();
        let fit = regression_slope(&series);
        eigenvalue_ratio.push(lam / lambda1);
        slope.push(fit.unwrap_or(f64::NAN));
        usable.push(fit.is_some());
    }
    Ok(ModalDecayReport {
        method: outcome.method,
        eigenvalue_ratio,
        slope,
        usable,
    })
}

fn dominant_index(diag: &[f64]) -> Option<usize> {
    diag.iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(j, _)| j)
}
