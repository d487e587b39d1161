//! Symmetric sparse operators in compressed sparse row layout.

use crate::error::{Error, Result};

/// A real symmetric matrix stored fully expanded in CSR form.
///
/// Both triangles are stored, so the product is a plain row-wise sweep.
/// Instances are immutable once built and can be shared across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, checking structure and symmetry.
    pub fn from_csr(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(Error::Input(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n + 1
            )));
        }
        if row_ptr[0] != 0 || row_ptr[n] != col_idx.len() || col_idx.len() != values.len() {
            return Err(Error::Input(
                "row_ptr must start at 0 and end at nnz; col_idx and values must have equal length"
                    .into(),
            ));
        }
        for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            if lo > hi {
                return Err(Error::Input(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[lo..hi];
            if cols.iter().any(|&j| j >= n) {
                return Err(Error::Input(format!("column index out of range in row {i}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Input(format!(
                    "column indices in row {i} are not strictly increasing"
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("matrix entries must be finite".into()));
        }
        let m = Self {
            n,
            row_ptr,
            col_idx,
            values,
        };
        if let Some((i, j)) = m.first_asymmetry(0.0) {
            return Err(Error::Input(format!(
                "matrix is not symmetric: entry ({i},{j}) has no matching ({j},{i})"
            )));
        }
        Ok(m)
    }

    /// Assembles from 0-based coordinate triplets. Duplicates are summed.
    ///
    /// With `mirror` set, every off-diagonal triplet `(i, j, v)` also stands
    /// for `(j, i, v)` (one-triangle storage). Otherwise the triplets must
    /// already describe a symmetric matrix; pairs that differ by at most a
    /// relative `1e-12` are averaged.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)], mirror: bool) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> =
            Vec::with_capacity(if mirror { 2 * triplets.len() } else { triplets.len() });
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::Input(format!(
                    "triplet ({i},{j}) outside a {n}x{n} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Input(format!("non-finite entry at ({i},{j})")));
            }
            entries.push((i, j, v));
            if mirror && i != j {
                entries.push((j, i, v));
            }
        }
        entries.sort_by_key(|a| (a.0, a.1));

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = Self {
            n,
            row_ptr,
            col_idx,
            values,
        };
        if let Some((i, j)) = m.first_asymmetry(1e-12) {
            return Err(Error::Input(format!(
                "matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ"
            )));
        }
        m.symmetrize_values();
        Ok(m)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored entries of row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        self.apply(x, y);
        Ok(())
    }

    /// Sequential row-wise product; lengths are the caller's responsibility.
    pub(crate) fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    /// True when every stored entry sits on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, _)| j == i))
    }

    /// The diagonal, or `None` if the matrix has off-diagonal entries.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        if !self.is_diagonal() {
            return None;
        }
        Some(
            (0..self.n)
                .map(|i| self.row(i).map(|(_, v)| v).sum())
                .collect(),
        )
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn find(&self, i: usize, j: usize) -> Option<f64> {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi]
            .binary_search(&j)
            .ok()
            .map(|k| self.values[lo + k])
    }

    fn first_asymmetry(&self, rel_tol: f64) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j <= i {
                    continue;
                }
                let w = self.find(j, i).unwrap_or(0.0);
                if (v - w).abs() > rel_tol * v.abs().max(w.abs()) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn symmetrize_values(&mut self) {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if j > i {
                    let w = self.find(j, i).expect("symmetry already checked");
                    let avg = 0.5 * (self.values[k] + w);
                    self.values[k] = avg;
                    let (lo, hi) = (self.row_ptr[j], self.row_ptr[j + 1]);
                    let kk = lo + self.col_idx[lo..hi].binary_search(&i).expect("mirror entry");
                    self.values[kk] = avg;
                }
            }
        }
    }
}

/// `diag(n, n-1, ..., 1)`: `lambda1 = n`, `lambda2 = n - 1`, `lambda_n = 1`.
pub fn make_diag_descending(n: usize) -> Result<SparseMatrix> {
    if n < 2 {
        return Err(Error::Input(format!("descending diagonal needs n >= 2, got {n}")));
    }
    let diag: Vec<f64> = (1..=n).rev().map(|v| v as f64).collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}

/// `diag(n, n-1, ..., 0, ..., -n/2)` of dimension `3n/2 + 1`.
///
/// The dominant eigenvalue is `n`, the second largest signed one `n - 1` and
/// the leftmost `-n/2`, so the momentum gap is `1/(n-1)` while the Lanczos gap
/// shrinks to `1/(3n/2 - 1)`.
pub fn make_diag_indefinite(n: usize) -> Result<SparseMatrix> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Input(format!(
            "indefinite diagonal needs an even n >= 2, got {n}"
        )));
    }
    let lo = -((n / 2) as i64);
    let diag: Vec<f64> = (lo..=n as i64).rev().map(|v| v as f64).collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}

/// `diag(n, n-1, ..., n/2)`, the positive-spectrum variant of the indefinite
/// generator.
pub fn make_diag_upper_half(n: usize) -> Result<SparseMatrix> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Input(format!(
            "upper-half diagonal needs an even n >= 2, got {n}"
        )));
    }
    let diag: Vec<f64> = (n / 2..=n).rev().map(|v| v as f64).collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}
