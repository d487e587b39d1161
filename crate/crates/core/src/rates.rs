//! Chebyshev polynomials, asymptotic rates of the momentum and Lanczos
//! iterations, and the Krylov dimension `m_cr` at which the two cross.
//!
//! Growth quantities are evaluated in log space: `T_N(1 + eps)` overflows a
//! double long before `N * sqrt(eps)` becomes interesting.

use crate::error::{Error, Result};

/// Spectral gaps of a symmetric operator with a positive dominant eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumGaps {
    pub lambda1: f64,
    /// `|lambda2|`, the second largest magnitude.
    pub lambda2_mag: f64,
    /// Second largest signed eigenvalue.
    pub lambda2_signed: f64,
    /// Smallest signed eigenvalue.
    pub lambdan_signed: f64,
    /// `(lambda1 - |lambda2|) / |lambda2|`
    pub eps: f64,
    /// `(lambda1 - lambda2') / (lambda2' - lambdan')`
    pub eps_l: f64,
}

impl SpectrumGaps {
    pub fn new(lambda1: f64, lambda2_mag: f64, lambda2_signed: f64, lambdan_signed: f64) -> Result<Self> {
        let finite = [lambda1, lambda2_mag, lambda2_signed, lambdan_signed]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Input("spectral values must be finite".into()));
        }
        if !(lambda1 > lambda2_mag && lambda2_mag > 0.0) {
            return Err(Error::Input(format!(
                "need lambda1 > |lambda2| > 0, got {lambda1} and {lambda2_mag}"
            )));
        }
        if lambda2_signed > lambda1 || lambdan_signed >= lambda2_signed {
            return Err(Error::Input(format!(
                "need lambdan' < lambda2' <= lambda1, got {lambdan_signed}, {lambda2_signed}, {lambda1}"
            )));
        }
        Ok(Self {
            lambda1,
            lambda2_mag,
            lambda2_signed,
            lambdan_signed,
            eps: (lambda1 - lambda2_mag) / lambda2_mag,
            eps_l: (lambda1 - lambda2_signed) / (lambda2_signed - lambdan_signed),
        })
    }

    /// Reads the gaps off a full list of eigenvalues (any order). The
    /// dominant eigenvalue must be positive and simple in magnitude.
    pub fn from_eigenvalues(eigs: &[f64]) -> Result<Self> {
        if eigs.len() < 3 {
            return Err(Error::Input(format!(
                "need at least 3 eigenvalues, got {}",
                eigs.len()
            )));
        }
        let mut signed = eigs.to_vec();
        signed.sort_by(|a, b| b.total_cmp(a));
        let mut mags: Vec<f64> = eigs.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let lambda1 = signed[0];
        if lambda1 < mags[0] {
            return Err(Error::Input(format!(
                "dominant eigenvalue is negative (-{})",
                mags[0]
            )));
        }
        Self::new(lambda1, mags[1], signed[1], signed[signed.len() - 1])
    }
}

/// `T_n(t)` from the cos / cosh forms.
pub fn cheb_t(n: usize, t: f64) -> f64 {
    let nf = n as f64;
    if t.abs() <= 1.0 {
        (nf * t.acos()).cos()
    } else if t > 1.0 {
        (nf * t.acosh()).cosh()
    } else {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (nf * (-t).acosh()).cosh()
    }
}

/// `T_n(t)` from `T_{k+1} = 2t T_k - T_{k-1}`.
pub fn cheb_t_recurrence(n: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln T_n(t)` for `t > 1`.
pub fn log_cheb_t(n: usize, t: f64) -> Result<f64> {
    log_cheb_t_continuous(n as f64, t)
}

/// `ln T_d(t)` for real degree `d >= 0` and `t > 1`, via
/// `T_d(t) = (s^d + s^-d) / 2` with `s = t + sqrt(t^2 - 1)`.
pub fn log_cheb_t_continuous(degree: f64, t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::Domain(format!("log T requires t > 1, got {t}")));
    }
    if !(degree >= 0.0) {
        return Err(Error::Domain(format!("degree must be >= 0, got {degree}")));
    }
    let ln_s = (t + (t * t - 1.0).sqrt()).ln();
    Ok(0.5f64.ln() + degree * ln_s + (-2.0 * degree * ln_s).exp().ln_1p())
}

/// Log of the lower and upper bounds on `T_n(1 + eps)`:
/// `(1 + sqrt(2 eps))^n / 2` and
/// `(1 + 2 eps + sqrt(2 eps))^n (1 + (1 + sqrt(2 eps))^(-2n)) / 2`.
pub fn cheb_growth_bounds(n: usize, eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let nf = n as f64;
    let r = (2.0 * eps).sqrt();
    let ln_lo = r.ln_1p();
    let lower = 0.5f64.ln() + nf * ln_lo;
    let upper = 0.5f64.ln() + nf * (2.0 * eps + r).ln_1p() + (-2.0 * nf * ln_lo).exp().ln_1p();
    Ok((lower, upper))
}

/// Per-matvec contraction `r / (1 + sqrt(1 - r^2))` of optimally tuned
/// momentum when `r = |lambda2| / lambda1`.
pub fn momentum_asymptotic_rate(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0, 1), got {r}")));
    }
    Ok(r / (1.0 + (1.0 - r * r).sqrt()))
}

/// Inverse of [`momentum_asymptotic_rate`]: `2 rho / (1 + rho^2)`.
pub fn r_of_rho(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1], got {rho}")));
    }
    Ok(2.0 * rho / (1.0 + rho * rho))
}

/// `r'(rho) = 2 (1 - rho^2) / (1 + rho^2)^2`
pub fn r_of_rho_derivative(rho: f64) -> f64 {
    let q = 1.0 + rho * rho;
    2.0 * (1.0 - rho * rho) / (q * q)
}

/// Largest eigenvalue magnitude of the companion block
/// `[[lambda, -beta], [1, 0]]`.
pub fn augmented_mode_magnitude(lambda: f64, beta: f64) -> f64 {
    let disc = lambda * lambda - 4.0 * beta;
    if disc >= 0.0 {
        (lambda.abs() + disc.sqrt()) / 2.0
    } else {
        beta.sqrt()
    }
}

/// Asymptotic per-step decay of mode `j` relative to the dominant mode.
///
/// At `beta = lambda_j^2 / 4` the block is defective; both branches share the
/// returned limit, and the transient linear-in-k growth is not modelled.
pub fn mode_decay_ratio(lambda_j: f64, lambda1: f64, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be >= 0, got {beta}")));
    }
    if beta >= lambda1 * lambda1 / 4.0 {
        return Err(Error::Divergence(format!(
            "beta = {beta} >= lambda1^2/4 = {}",
            lambda1 * lambda1 / 4.0
        )));
    }
    if lambda_j.abs() >= lambda1.abs() {
        return Err(Error::Domain(format!(
            "|lambda_j| = {} must be below lambda1 = {lambda1}",
            lambda_j.abs()
        )));
    }
    Ok(augmented_mode_magnitude(lambda_j, beta) / augmented_mode_magnitude(lambda1, beta))
}

/// `p_n(x)` from `p_{k+1} = x p_k - beta p_{k-1}`, `p_0 = 1`, `p_1 = x / 2`.
///
/// With this start `p_n(2 sqrt(beta) t) = beta^(n/2) T_n(t)`.
pub fn momentum_polynomial(n: usize, x: f64, beta: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x / 2.0);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = x * cur - beta * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Bound `kappa_i / T_{m-i}(1 + 2 gamma_i) * tan0` on the angle between the
/// `i`-th eigenvector (1-based, signed descending order) and the Krylov space.
pub fn lanczos_tan_bound(i: usize, m: usize, spectrum: &[f64], tan0: f64) -> Result<f64> {
    let n = spectrum.len();
    if i == 0 || i >= n {
        return Err(Error::Domain(format!("mode index {i} outside 1..{n}")));
    }
    if m <= i {
        return Err(Error::Domain(format!("need m > i, got m = {m}, i = {i}")));
    }
    if spectrum.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain("spectrum must be sorted descending".into()));
    }
    let lam = |k: usize| spectrum[k - 1];
    let last = lam(n);
    let gap = lam(i + 1) - last;
    if gap <= 0.0 {
        return Err(Error::Domain(format!(
            "degenerate gap: lambda_{} equals lambda_n",
            i + 1
        )));
    }
    let gamma = (lam(i) - lam(i + 1)) / gap;
    let mut kappa = 1.0;
    for j in 1..i {
        let den = lam(j) - lam(i);
        if den == 0.0 {
            return Err(Error::Domain(format!("repeated eigenvalue at index {j}")));
        }
        kappa *= (lam(j) - last) / den;
    }
    Ok(kappa / cheb_t(m - i, 1.0 + 2.0 * gamma) * tan0)
}

/// Per-matvec log slope of the restart bound `2 (1 + 2 sqrt(eps_l))^-(m-1)`,
/// charging `m` matvecs per restart. Positive when the bound predicts no
/// progress.
pub fn lanczos_rate_upper(m: usize, eps_l: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("m must be >= 2, got {m}")));
    }
    if !(eps_l >= 0.0) || !eps_l.is_finite() {
        return Err(Error::Domain(format!("eps_L must be >= 0, got {eps_l}")));
    }
    let mf = m as f64;
    Ok((2f64.ln() - (mf - 1.0) * (2.0 * eps_l.sqrt()).ln_1p()) / mf)
}

/// Per-matvec log slope `-ln T_{m-1}(1 + 2 eps_l) / m` of the Chebyshev
/// restart estimate itself.
pub fn lanczos_restart_slope(m: usize, eps_l: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("m must be >= 2, got {m}")));
    }
    if !(eps_l > 0.0) {
        return Err(Error::Domain(format!("eps_L must be > 0, got {eps_l}")));
    }
    Ok(-log_cheb_t(m - 1, 1.0 + 2.0 * eps_l)? / m as f64)
}

/// Closed-form crossover estimate `ceil(ln 2 / (2 sqrt(eps_l) - sqrt(2 eps)) + 1)`.
pub fn m_cr_approx(eps: f64, eps_l: f64) -> Result<usize> {
    check_gaps(eps, eps_l)?;
    let den = 2.0 * eps_l.sqrt() - (2.0 * eps).sqrt();
    if !(den > 0.0) {
        return Err(Error::NoCrossover(format!(
            "2 sqrt(eps_L) = {} does not exceed sqrt(2 eps) = {}",
            2.0 * eps_l.sqrt(),
            (2.0 * eps).sqrt()
        )));
    }
    Ok((2f64.ln() / den + 1.0).ceil() as usize)
}

/// Continuous root in `m` of
/// `ln T_{N+1}(1+eps) - ln T_N(1+eps) = ln T_{m-1}(1 + 2 eps_l) / (m - 1)`,
/// by bisection on `[2, 1e4]` to `1e-6`.
pub fn m_cr_root(eps: f64, eps_l: f64, n: usize) -> Result<f64> {
    check_gaps(eps, eps_l)?;
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let lhs = log_cheb_t(n + 1, 1.0 + eps)? - log_cheb_t(n, 1.0 + eps)?;
    let t = 1.0 + 2.0 * eps_l;
    let f = |m: f64| -> Result<f64> { Ok(log_cheb_t_continuous(m - 1.0, t)? / (m - 1.0) - lhs) };
    let (mut lo, mut hi) = (2.0, 1.0e4);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoCrossover(format!(
            "no sign change on m in [2, 1e4] for eps = {eps}, eps_L = {eps_l}, N = {n}"
        )));
    }
    while hi - lo > 1.0e-6 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`m_cr_root`] rounded up.
pub fn m_cr_solve(eps: f64, eps_l: f64, n: usize) -> Result<usize> {
    Ok(m_cr_root(eps, eps_l, n)?.ceil() as usize)
}

fn check_gaps(eps: f64, eps_l: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() || !(eps_l > 0.0) || !eps_l.is_finite() {
        return Err(Error::Domain(format!(
            "gaps must be positive and finite, got eps = {eps}, eps_L = {eps_l}"
        )));
    }
    Ok(())
}

/// Predicted natural-log residual slopes per matvec and the crossover pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    pub momentum_slope: f64,
    /// Slope of the restart upper bound for the requested `m`, clamped at 0
    /// where the bound predicts no progress.
    pub lanczos_slope_bound: f64,
    pub m_cr_approx: usize,
    pub m_cr_solved: usize,
}

impl RatePrediction {
    pub fn new(gaps: &SpectrumGaps, m: usize, n_cheb: usize) -> Result<Self> {
        let r = gaps.lambda2_mag / gaps.lambda1;
        Ok(Self {
            momentum_slope: momentum_asymptotic_rate(r)?.ln(),
            lanczos_slope_bound: lanczos_rate_upper(m, gaps.eps_l)?.min(0.0),
            m_cr_approx: m_cr_approx(gaps.eps, gaps.eps_l)?,
            m_cr_solved: m_cr_solve(gaps.eps, gaps.eps_l, n_cheb)?,
        })
    }
}
