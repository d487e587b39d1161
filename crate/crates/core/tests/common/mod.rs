#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specmom_core::SparseMatrix;

pub type Dense = Vec<Vec<f64>>;

pub fn random_symmetric(n: usize, seed: u64) -> Dense {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.random_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

pub fn to_sparse(a: &Dense) -> SparseMatrix {
    let n = a.len();
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if a[i][j] != 0.0 {
                t.push((i, j, a[i][j]));
            }
        }
    }
    SparseMatrix::from_triplets(n, &t, false).unwrap()
}

pub fn mul(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn unit(x: &[f64]) -> Vec<f64> {
    let h = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / h).collect()
}

/// Max-abs distance between `x` and `y` up to a global sign.
pub fn sign_dist(x: &[f64], y: &[f64]) -> f64 {
    let plus = x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let minus = x.iter().zip(y).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
    plus.min(minus)
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &Dense) -> Vec<f64> {
    let n = a.len();
    let mut m = a.clone();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    eig
}
