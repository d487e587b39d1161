//! Symmetric tridiagonal eigensolver: implicit QL with Wilkinson shifts.

use crate::error::{Error, Result};

use super::lanczos::TridiagonalMatrix;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs sorted by descending eigenvalue. `vectors[k]` pairs with
/// `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEig {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn tridiag_eig(t: &TridiagonalMatrix) -> Result<TridiagEig> {
    let n = t.alpha.len();
    if n == 0 {
        return Ok(TridiagEig { values: Vec::new(), vectors: Vec::new() });
    }
    if t.beta.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: t.beta.len() });
    }
    if !t.alpha.iter().chain(&t.beta).all(|v| v.is_finite()) {
        return Err(Error::Input("tridiagonal entries must be finite".into()));
    }

    let mut d = t.alpha.clone();
    let mut e = t.beta.clone();
    e.push(0.0);
    // z is row-major; column k accumulates the k-th eigenvector.
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Breakdown(format!(
                    "QL iteration did not converge for eigenvalue {l}"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk = &mut z[k * n..(k + 1) * n];
                    let f = zk[i + 1];
                    zk[i + 1] = s * zk[i] + c * f;
                    zk[i] = c * zk[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| z[i * n + k]).collect())
        .collect();
    Ok(TridiagEig { values, vectors })
}
