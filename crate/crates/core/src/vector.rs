//! Dense vector kernels on `f64` slices.
//!
//! Reductions run front to back so repeated runs are bit-identical.

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// `||ax - nu * x||_2` without allocating.
pub fn residual_norm(ax: &[f64], nu: f64, x: &[f64]) -> f64 {
    debug_assert_eq!(ax.len(), x.len());
    ax.iter()
        .zip(x)
        .map(|(a, b)| {
            let d = a - nu * b;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Returns `x / ||x||` and `||x||`, or `None` for a zero or non-finite vector.
pub fn normalized(x: &[f64]) -> Option<(Vec<f64>, f64)> {
    let h = norm2(x);
    if h == 0.0 || !h.is_finite() {
        return None;
    }
    Some((x.iter().map(|v| v / h).collect(), h))
}
