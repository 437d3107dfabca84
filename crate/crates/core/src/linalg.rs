//! Sparse storage and solvers for slab systems: CSR matrices bound to an
//! explicit sparsity pattern, restarted GMRES with an ILU(0) preconditioner,
//! and a dense partial-pivoting LU used as oracle and fallback.

use crate::{Error, Result};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Set of admissible (row, column) entries in CSR layout.
///
/// Columns within a row are sorted and unique; writes outside the pattern are
/// rejected by [`CsrMatrix::add_entry`], never silently dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl SparsityPattern {
    /// Build from an iterator of (row, col) pairs; duplicates are merged.
    pub fn from_entries(
        n_rows: usize,
        n_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> SparsityPattern {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
        for (i, j) in entries {
            assert!(i < n_rows && j < n_cols, "entry ({i},{j}) out of bounds");
            rows[i].push(j);
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        SparsityPattern {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Sorted column indices of `row`.
    pub fn row(&self, row: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[row]..self.row_ptr[row + 1]]
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.index_of(row, col).is_some()
    }

    /// Position of (row, col) in the value array, if present.
    pub fn index_of(&self, row: usize, col: usize) -> Option<usize> {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.col_idx[lo..hi]
            .binary_search(&col)
            .ok()
            .map(|k| lo + k)
    }

    /// All (row, col) pairs in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).iter().map(move |&j| (i, j)))
    }

    /// True if every entry of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &SparsityPattern) -> bool {
        self.entries().all(|(i, j)| other.contains(i, j))
    }
}

/// Sparse matrix with values aligned to a shared [`SparsityPattern`].
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pattern: Arc<SparsityPattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(pattern: Arc<SparsityPattern>) -> CsrMatrix {
        let nnz = pattern.nnz();
        CsrMatrix {
            pattern,
            values: vec![0.0; nnz],
        }
    }

    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn n_rows(&self) -> usize {
        self.pattern.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.pattern.n_cols
    }

    /// Accumulate `v` into entry (i, j); the entry must be in the pattern.
    pub fn add_entry(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        match self.pattern.index_of(i, j) {
            Some(k) => {
                self.values[k] += v;
                Ok(())
            }
            None => Err(Error::PatternViolation { row: i, col: j }),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern
            .index_of(i, j)
            .map_or(0.0, |k| self.values[k])
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        match self.pattern.index_of(i, j) {
            Some(k) => {
                self.values[k] = v;
                Ok(())
            }
            None => Err(Error::PatternViolation { row: i, col: j }),
        }
    }

    /// Column indices and mutable values of row `i`.
    pub fn row_entries_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let lo = self.pattern.row_ptr[i];
        let hi = self.pattern.row_ptr[i + 1];
        (&self.pattern.col_idx[lo..hi], &mut self.values[lo..hi])
    }

    /// Column indices and values of row `i`.
    pub fn row_entries(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.pattern.row_ptr[i];
        let hi = self.pattern.row_ptr[i + 1];
        (&self.pattern.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Zero out a whole row (entries stay in the pattern).
    pub fn zero_row(&mut self, i: usize) {
        let lo = self.pattern.row_ptr[i];
        let hi = self.pattern.row_ptr[i + 1];
        for v in &mut self.values[lo..hi] {
            *v = 0.0;
        }
    }

    /// y = A x.
    pub fn spmv(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols());
        let mut y = vec![0.0; self.n_rows()];
        for i in 0..self.n_rows() {
            let lo = self.pattern.row_ptr[i];
            let hi = self.pattern.row_ptr[i + 1];
            let mut sum = 0.0;
            for k in lo..hi {
                sum += self.values[k] * x[self.pattern.col_idx[k]];
            }
            y[i] = sum;
        }
        y
    }

    /// Dense copy, row-major; intended for oracle solves on small systems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols()]; self.n_rows()];
        for i in 0..self.n_rows() {
            let lo = self.pattern.row_ptr[i];
            let hi = self.pattern.row_ptr[i + 1];
            for k in lo..hi {
                dense[i][self.pattern.col_idx[k]] = self.values[k];
            }
        }
        dense
    }

    /// Write the matrix in MatrixMarket coordinate format.
    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let result = (|| -> std::io::Result<()> {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            writeln!(file, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(
                file,
                "{} {} {}",
                self.n_rows(),
                self.n_cols(),
                self.pattern.nnz()
            )?;
            for i in 0..self.n_rows() {
                let lo = self.pattern.row_ptr[i];
                let hi = self.pattern.row_ptr[i + 1];
                for k in lo..hi {
                    writeln!(
                        file,
                        "{} {} {:.16e}",
                        i + 1,
                        self.pattern.col_idx[k] + 1,
                        self.values[k]
                    )?;
                }
            }
            Ok(())
        })();
        result.map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Contiguous real vector sized to a slab system (`N_x * N_t`) or a spatial
/// trace (`N_x`).
pub type StVector = Vec<f64>;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Zero-fill incomplete LU factorization on the matrix's own pattern.
///
/// L (unit diagonal, strictly lower part) and U (upper part incl. diagonal)
/// share the input pattern; no entries are created outside it.
pub struct Ilu0 {
    pattern: Arc<SparsityPattern>,
    values: Vec<f64>,
    diag_idx: Vec<usize>,
}

impl Ilu0 {
    pub fn factor(a: &CsrMatrix) -> Result<Ilu0> {
        let pattern = Arc::clone(&a.pattern);
        let n = pattern.n_rows();
        let mut values = a.values.clone();
        let mut diag_idx = Vec::with_capacity(n);
        for i in 0..n {
            diag_idx.push(
                pattern
                    .index_of(i, i)
                    .ok_or(Error::PatternViolation { row: i, col: i })?,
            );
        }
        // IKJ variant restricted to the pattern
        for i in 1..n {
            let row_lo = pattern.row_ptr[i];
            let row_hi = pattern.row_ptr[i + 1];
            for kk in row_lo..row_hi {
                let k = pattern.col_idx[kk];
                if k >= i {
                    break;
                }
                let pivot = values[diag_idx[k]];
                if pivot.abs() < 1e-300 {
                    return Err(Error::SingularMatrix { pivot: k });
                }
                let factor = values[kk] / pivot;
                values[kk] = factor;
                // subtract factor * U(k, j) for j > k present in row i
                let k_lo = pattern.row_ptr[k];
                let k_hi = pattern.row_ptr[k + 1];
                for jj in k_lo..k_hi {
                    let j = pattern.col_idx[jj];
                    if j <= k {
                        continue;
                    }
                    if let Some(idx) = pattern.index_of(i, j) {
                        values[idx] -= factor * values[jj];
                    }
                }
            }
        }
        Ok(Ilu0 {
            pattern,
            values,
            diag_idx,
        })
    }

    /// Solve (LU) z = r.
    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let n = self.pattern.n_rows();
        let mut z = r.to_vec();
        // forward solve with unit lower triangle
        for i in 0..n {
            let lo = self.pattern.row_ptr[i];
            let hi = self.pattern.row_ptr[i + 1];
            let mut sum = z[i];
            for k in lo..hi {
                let j = self.pattern.col_idx[k];
                if j >= i {
                    break;
                }
                sum -= self.values[k] * z[j];
            }
            z[i] = sum;
        }
        // backward solve with upper triangle
        for i in (0..n).rev() {
            let hi = self.pattern.row_ptr[i + 1];
            let mut sum = z[i];
            for k in (self.diag_idx[i] + 1)..hi {
                sum -= self.values[k] * z[self.pattern.col_idx[k]];
            }
            z[i] = sum / self.values[self.diag_idx[i]];
        }
        z
    }
}

/// Right-preconditioned restarted GMRES with ILU(0).
///
/// Converges when the true residual satisfies `||b - Ax|| <= rtol * ||b||`;
/// returns the solution and the total iteration count.
pub fn solve_gmres_ilu0(
    a: &CsrMatrix,
    b: &[f64],
    rtol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    const RESTART: usize = 50;
    let n = a.n_rows();
    assert_eq!(b.len(), n);
    let precond = Ilu0::factor(a)?;
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let tol = rtol * b_norm;

    let mut x = vec![0.0; n];
    let mut total_iters = 0;
    let mut residual = f64::INFINITY;

    while total_iters < max_iter {
        let ax = a.spmv(&x);
        let r0: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        let beta = norm(&r0);
        residual = beta;
        if beta <= tol {
            return Ok((x, total_iters));
        }

        // Arnoldi with modified Gram-Schmidt and Givens rotations
        let mut basis: Vec<Vec<f64>> = vec![r0.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; RESTART]; RESTART + 1];
        let mut cs = vec![0.0; RESTART];
        let mut sn = vec![0.0; RESTART];
        let mut g = vec![0.0; RESTART + 1];
        g[0] = beta;
        let mut k_used = 0;

        for k in 0..RESTART {
            if total_iters >= max_iter {
                break;
            }
            total_iters += 1;
            let z = precond.apply(&basis[k]);
            let mut w = a.spmv(&z);
            for (j, vj) in basis.iter().enumerate() {
                h[j][k] = dot(&w, vj);
                for (wi, vji) in w.iter_mut().zip(vj) {
                    *wi -= h[j][k] * vji;
                }
            }
            h[k + 1][k] = norm(&w);
            // apply accumulated rotations to the new column
            for j in 0..k {
                let tmp = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = tmp;
            }
            let denom = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if denom < 1e-300 {
                k_used = k + 1;
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            residual = g[k + 1].abs();
            if h[k + 1][k].abs() < 1e-300 || residual <= tol {
                break;
            }
            for v in &mut w {
                *v /= h[k + 1][k];
            }
            basis.push(w);
        }

        // back-substitute the small triangular system
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut sum = g[i];
            for j in (i + 1)..k_used {
                sum -= h[i][j] * y[j];
            }
            y[i] = sum / h[i][i];
        }
        // x += M^{-1} V y
        let mut update = vec![0.0; n];
        for (j, &yj) in y.iter().enumerate() {
            for (ui, vi) in update.iter_mut().zip(&basis[j]) {
                *ui += yj * vi;
            }
        }
        let z = precond.apply(&update);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }

        if residual <= tol {
            // confirm with the true residual before accepting
            let ax = a.spmv(&x);
            let true_res = norm(
                &b.iter()
                    .zip(&ax)
                    .map(|(bi, axi)| bi - axi)
                    .collect::<Vec<_>>(),
            );
            if true_res <= tol * 10.0 {
                return Ok((x, total_iters));
            }
        }
    }
    Err(Error::SolverDidNotConverge {
        iterations: total_iters,
        residual: residual / b_norm,
    })
}

/// Maximum system size accepted by the dense LU solve.
pub const DENSE_LU_MAX_SIZE: usize = 5000;

/// Dense LU with partial pivoting; oracle solver for systems up to
/// [`DENSE_LU_MAX_SIZE`].
pub fn solve_dense_lu(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    if n > DENSE_LU_MAX_SIZE {
        return Err(Error::DimensionMismatch {
            expected: DENSE_LU_MAX_SIZE,
            got: n,
        });
    }
    let max_abs = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    let mut lu: Vec<Vec<f64>> = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // partial pivoting
        let (pivot_row, pivot_val) = (k..n)
            .map(|i| (i, lu[i][k].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_val <= 1e-14 * max_abs {
            return Err(Error::SingularMatrix { pivot: k });
        }
        lu.swap(k, pivot_row);
        perm.swap(k, pivot_row);
        let pivot = lu[k][k];
        for i in (k + 1)..n {
            let factor = lu[i][k] / pivot;
            lu[i][k] = factor;
            for j in (k + 1)..n {
                lu[i][j] -= factor * lu[k][j];
            }
        }
    }
    // forward/backward substitution on the permuted rhs
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 1..n {
        for j in 0..i {
            x[i] -= lu[i][j] * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            x[i] -= lu[i][j] * x[j];
        }
        x[i] /= lu[i][i];
    }
    Ok(x)
}
