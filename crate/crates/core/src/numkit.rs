//! Small dense matrix kernels for the bound recursion.
//!
//! Everything here operates on matrices of dimension at most a few, stored
//! row-major in a flat `Vec<f64>`: inversion of symmetric positive-definite
//! matrices via Cholesky, LU inversion for the (possibly indefinite) inner
//! terms of the recursion, the information step `J_{t+1} = D22 - D12^T (J_t +
//! D11)^{-1} D12`, and its matrix-inversion-lemma counterpart that advances
//! the bound `J^{-1}` directly.

use crate::error::{Error, Result};

/// Ratio of largest to smallest Cholesky diagonal entry beyond which an
/// inversion is rejected as a degenerate bound step.
pub const CONDITION_GUARD: f64 = 1e12;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Matrix {
        let r = rows.len();
        assert!(r > 0, "from_rows: empty");
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "from_rows: ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn scalar(v: f64) -> Matrix {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        assert!(self.is_square(), "dim() on a {}x{} matrix", self.rows, self.cols);
        self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul: inner dimensions disagree");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o += r;
        }
        out
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o -= r;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn add_assign(&mut self, rhs: &Matrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (o, r) in self.data.iter_mut().zip(&rhs.data) {
            *o += r;
        }
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec: dimension disagrees");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Symmetry check: |a_ij - a_ji| <= 1e-12 * max(1, |a_ij|).
    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let a = self[(i, j)];
                let b = self[(j, i)];
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return false;
                }
            }
        }
        true
    }

    /// Average with the transpose; kills floating-point symmetry drift.
    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let m = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = m;
                out[(j, i)] = m;
            }
        }
        out
    }

    /// Lower-triangular Cholesky factor of a symmetric positive-definite
    /// matrix. Fails with `NotPositiveDefinite` on a nonpositive pivot and
    /// with `IllConditioned` when the diagonal ratio exceeds the guard.
    pub fn cholesky(&self) -> Result<Matrix> {
        let n = self.dim();
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::NotPositiveDefinite);
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        let mut dmin = f64::INFINITY;
        let mut dmax: f64 = 0.0;
        for i in 0..n {
            dmin = dmin.min(l[(i, i)]);
            dmax = dmax.max(l[(i, i)]);
        }
        if dmax > dmin * CONDITION_GUARD {
            return Err(Error::IllConditioned);
        }
        Ok(l)
    }

    /// Positive semidefiniteness via Cholesky with a pivot tolerance: pivots
    /// are allowed down to `-tol * max(1, max |diag|)`; columns with
    /// nonpositive pivots are zeroed and skipped.
    pub fn is_psd(&self, tol: f64) -> bool {
        let n = self.dim();
        let scale = (0..n).fold(1.0f64, |acc, i| acc.max(self[(i, i)].abs()));
        let floor = -tol * scale;
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if s < floor {
                        return false;
                    }
                    l[(i, i)] = if s > 0.0 { s.sqrt() } else { 0.0 };
                } else {
                    l[(i, j)] = if l[(j, j)] > 0.0 { s / l[(j, j)] } else { 0.0 };
                }
            }
        }
        true
    }

    /// LU factorization with partial pivoting; used for the indefinite inner
    /// terms of the recursion. Returns the packed factors and the pivot rows.
    fn lu(&self) -> Option<(Matrix, Vec<usize>)> {
        let n = self.dim();
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for r in (k + 1)..n {
                if a[(r, k)].abs() > best {
                    best = a[(r, k)].abs();
                    p = r;
                }
            }
            if best <= 1e-13 * scale {
                return None;
            }
            if p != k {
                for c in 0..n {
                    let tmp = a[(k, c)];
                    a[(k, c)] = a[(p, c)];
                    a[(p, c)] = tmp;
                }
                piv.swap(k, p);
            }
            for r in (k + 1)..n {
                let f = a[(r, k)] / a[(k, k)];
                a[(r, k)] = f;
                for c in (k + 1)..n {
                    a[(r, c)] -= f * a[(k, c)];
                }
            }
        }
        Some((a, piv))
    }

    /// General inverse via LU with partial pivoting; `None` when singular.
    pub fn invert_lu(&self) -> Option<Matrix> {
        let n = self.dim();
        let (lu, piv) = self.lu()?;
        let mut inv = Matrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            for (r, item) in col.iter_mut().enumerate() {
                *item = if piv[r] == j { 1.0 } else { 0.0 };
            }
            // forward substitution (unit lower)
            for r in 1..n {
                for k in 0..r {
                    col[r] -= lu[(r, k)] * col[k];
                }
            }
            // back substitution
            for r in (0..n).rev() {
                for k in (r + 1)..n {
                    col[r] -= lu[(r, k)] * col[k];
                }
                col[r] /= lu[(r, r)];
            }
            for r in 0..n {
                inv[(r, j)] = col[r];
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Inverse of a symmetric positive-definite matrix through its Cholesky
/// factor.
pub fn invert_spd(m: &Matrix) -> Result<Matrix> {
    let n = m.dim();
    let l = m.cholesky()?;
    // Solve L L^T X = I column by column.
    let mut inv = Matrix::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        for (r, item) in col.iter_mut().enumerate() {
            *item = if r == j { 1.0 } else { 0.0 };
        }
        for r in 0..n {
            for k in 0..r {
                col[r] -= l[(r, k)] * col[k];
            }
            col[r] /= l[(r, r)];
        }
        for r in (0..n).rev() {
            for k in (r + 1)..n {
                col[r] -= l[(k, r)] * col[k];
            }
            col[r] /= l[(r, r)];
        }
        for r in 0..n {
            inv[(r, j)] = col[r];
        }
    }
    Ok(inv.symmetrized())
}

fn check_step_dims(j_prev: &Matrix, d11: &Matrix, d12: &Matrix, d22: &Matrix) -> Result<usize> {
    let n = j_prev.dim();
    if d11.dim() != n || d12.dim() != n || d22.dim() != n {
        return Err(Error::DimensionMismatch("recursion blocks must share the state dimension"));
    }
    Ok(n)
}

/// One information step: `J_{t+1} = D22 - D12^T (J_t + D11)^{-1} D12`.
///
/// The output is averaged with its transpose so that symmetry drift does not
/// accumulate over the horizon.
pub fn pfim_step(j_prev: &Matrix, d11: &Matrix, d12: &Matrix, d22: &Matrix) -> Result<Matrix> {
    check_step_dims(j_prev, d11, d12, d22)?;
    let inner = j_prev.add(d11);
    let inner_inv = inner.invert_lu().ok_or(Error::SingularInformation)?;
    let out = d22.sub(&d12.transpose().matmul(&inner_inv).matmul(d12));
    Ok(out.symmetrized())
}

/// One direct bound step via the matrix inversion lemma:
///
/// `J_{t+1}^{-1} = D22^{-1} - D22^{-1} D12^T [D12 D22^{-1} D12^T - (J_t + D11)]^{-1} D12 D22^{-1}`
///
/// Equals `invert_spd(pfim_step(...))` whenever both are defined.
pub fn pcrlb_inverse_step(
    j_prev: &Matrix,
    d11: &Matrix,
    d12: &Matrix,
    d22: &Matrix,
) -> Result<Matrix> {
    check_step_dims(j_prev, d11, d12, d22)?;
    let a_inv = d22.invert_lu().ok_or(Error::SingularInnerTerm)?;
    let bracket = d12
        .matmul(&a_inv)
        .matmul(&d12.transpose())
        .sub(&j_prev.add(d11));
    let b_inv = bracket.invert_lu().ok_or(Error::SingularInnerTerm)?;
    let left = a_inv.matmul(&d12.transpose());
    let out = a_inv.sub(&left.matmul(&b_inv).matmul(d12).matmul(&a_inv));
    Ok(out.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn invert_identity() {
        let i3 = Matrix::identity(3);
        assert!(invert_spd(&i3).unwrap().max_abs_diff(&i3) < 1e-15);
    }

    #[test]
    fn invert_diagonal() {
        let inv = invert_spd(&Matrix::diag(&[2.0, 4.0])).unwrap();
        assert!(inv.max_abs_diff(&Matrix::diag(&[0.5, 0.25])) < 1e-15);
    }

    #[test]
    fn invert_2x2_against_adjugate() {
        // closed-form adjugate: inv([[2,1],[1,2]]) = (1/3)[[2,-1],[-1,2]]
        let m = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let expect = Matrix::from_rows(&[
            &[2.0 / 3.0, -1.0 / 3.0],
            &[-1.0 / 3.0, 2.0 / 3.0],
        ]);
        assert!(invert_spd(&m).unwrap().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn invert_rejects_indefinite() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(invert_spd(&m), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn conditioning_guard_trips() {
        let m = Matrix::diag(&[1.0, 1e-26]);
        assert!(matches!(invert_spd(&m), Err(Error::IllConditioned)));
    }

    #[test]
    fn product_with_inverse_is_identity() {
        let m = Matrix::from_rows(&[
            &[4.0, 1.0, 0.5],
            &[1.0, 3.0, 0.2],
            &[0.5, 0.2, 2.0],
        ]);
        let prod = m.matmul(&invert_spd(&m).unwrap());
        assert!(prod.max_abs_diff(&Matrix::identity(3)) < 1e-9);
    }

    #[test]
    fn pfim_step_decouples_for_zero_cross_term() {
        let j = Matrix::diag(&[1.0, 2.0]);
        let d11 = Matrix::diag(&[0.5, 0.5]);
        let d12 = Matrix::zeros(2, 2);
        let d22 = Matrix::from_rows(&[&[3.0, 0.1], &[0.1, 3.0]]);
        let out = pfim_step(&j, &d11, &d12, &d22).unwrap();
        assert!(out.max_abs_diff(&d22) < 1e-15);
    }

    #[test]
    fn pfim_step_scalar_arithmetic() {
        let out = pfim_step(
            &Matrix::scalar(1.0),
            &Matrix::scalar(0.81),
            &Matrix::scalar(-0.9),
            &Matrix::scalar(2.0),
        )
        .unwrap();
        assert_close(out[(0, 0)], 2.0 - 0.81 / 1.81, 1e-14);
        assert_close(out[(0, 0)], 1.552486, 1e-6);
    }

    #[test]
    fn pfim_step_identity_blocks() {
        let i = Matrix::identity(2);
        let out = pfim_step(&i, &i, &i, &i.scale(2.0)).unwrap();
        assert!(out.max_abs_diff(&i.scale(1.5)) < 1e-14);
    }

    #[test]
    fn inverse_step_scalar_kalman_information() {
        // scalar information filter with a=0.9, q=1, c=1, r=1 starting at J0=1
        let out = pcrlb_inverse_step(
            &Matrix::scalar(1.0),
            &Matrix::scalar(0.81),
            &Matrix::scalar(-0.9),
            &Matrix::scalar(2.0),
        )
        .unwrap();
        assert_close(out[(0, 0)], 1.0 / (2.0 - 0.81 / 1.81), 1e-14);
        assert_close(out[(0, 0)], 0.644128, 1e-6);
    }

    #[test]
    fn inverse_step_zero_cross_term() {
        let j = Matrix::diag(&[1.0, 2.0]);
        let d11 = Matrix::diag(&[0.5, 0.5]);
        let d12 = Matrix::zeros(2, 2);
        let d22 = Matrix::from_rows(&[&[3.0, 0.1], &[0.1, 3.0]]);
        let out = pcrlb_inverse_step(&j, &d11, &d12, &d22).unwrap();
        assert!(out.max_abs_diff(&invert_spd(&d22).unwrap()) < 1e-12);
    }

    #[test]
    fn inverse_step_direct_scalar() {
        let out = pcrlb_inverse_step(
            &Matrix::scalar(1.0),
            &Matrix::scalar(0.0),
            &Matrix::scalar(1.0),
            &Matrix::scalar(2.0),
        )
        .unwrap();
        assert_close(out[(0, 0)], 1.0, 1e-14);
    }

    #[test]
    fn psd_check_accepts_semidefinite() {
        assert!(Matrix::diag(&[1.0, 0.0]).is_psd(1e-9));
        assert!(Matrix::diag(&[1.0, -1e-12]).is_psd(1e-9));
        assert!(!Matrix::diag(&[1.0, -1e-3]).is_psd(1e-9));
    }

    #[test]
    fn lu_inverts_indefinite() {
        let m = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let inv = m.invert_lu().unwrap();
        assert!(m.matmul(&inv).max_abs_diff(&Matrix::identity(2)) < 1e-14);
        assert!(Matrix::zeros(2, 2).invert_lu().is_none());
    }
}
