//! Dense linear algebra: cyclic Jacobi eigensolver, Cholesky, generalized
//! symmetric-definite eigenproblem, LU determinant.

use crate::error::{Error, Result};

/// Largest order accepted by [`sym_eig`].
pub const MAX_ORDER: usize = 4096;
const MAX_SWEEPS: usize = 60;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Condition estimate above which [`generalized_eig`] gives up.
pub const MAX_CONDITION: f64 = 1e12;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::domain(format!(
                "matrix data has {} entries, expected {rows} x {cols}",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::domain(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `M M^T` (inner products of rows).
    pub fn row_gram(&self) -> SymMatrix {
        let mut g = SymMatrix::zeros(self.rows);
        for i in 0..self.rows {
            let ri = self.row(i);
            for j in 0..=i {
                let rj = self.row(j);
                g.set(i, j, ri.iter().zip(rj).map(|(a, b)| a * b).sum());
            }
        }
        g
    }

    /// `M^T M` (inner products of columns).
    pub fn col_gram(&self) -> SymMatrix {
        self.transpose().row_gram()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Symmetric matrix stored as its lower triangle, so `a(i, j) == a(j, i)`
/// holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    packed: Vec<f64>,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            packed: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_diagonal(&vec![1.0; order])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle only.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Takes the lower triangle of a square matrix after checking symmetry
    /// to `tol` relative to its largest entry.
    pub fn from_dense(m: &Matrix, tol: f64) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::domain("from_dense: matrix is not square"));
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..m.rows() {
            for j in 0..i {
                if (m.get(i, j) - m.get(j, i)).abs() > tol * scale {
                    return Err(Error::domain(format!(
                        "from_dense: entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(SymMatrix::from_fn(m.rows(), |i, j| m.get(i, j)))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[packed_index(i, j)] = v;
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.order, self.order, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.order {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.packed {
            *v *= factor;
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.order != other.order {
            return Err(Error::domain("add: order mismatch"));
        }
        Ok(SymMatrix {
            order: self.order,
            packed: self.packed.iter().zip(&other.packed).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.order != other.order {
            return Err(Error::domain("sub: order mismatch"));
        }
        Ok(SymMatrix {
            order: self.order,
            packed: self.packed.iter().zip(&other.packed).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }
}

/// Eigenvalues in descending order, optionally with orthonormal
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Matrix>,
}

impl Spectrum {
    /// Eigenvector `k` (matching `values[k]`), if vectors were requested.
    pub fn vector(&self, k: usize) -> Option<Vec<f64>> {
        self.vectors.as_ref().map(|v| v.column(k))
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi
/// rotations.
pub fn sym_eig(a: &SymMatrix, want_vectors: bool) -> Result<Spectrum> {
    let n = a.order();
    if n == 0 {
        return Err(Error::domain("sym_eig: empty matrix"));
    }
    if n > MAX_ORDER {
        return Err(Error::domain(format!(
            "sym_eig: order {n} exceeds {MAX_ORDER}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::domain("sym_eig: non-finite entry"));
    }

    let mut w = a.to_dense().data;
    let mut v = if want_vectors {
        Some(Matrix::identity(n))
    } else {
        None
    };
    let norm = a.frobenius();
    let target = OFF_DIAGONAL_TOL * norm;

    let mut converged = norm == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&w, n);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = w[p * n + p];
                let aqq = w[q * n + q];
                // Skip rotations that cannot change the diagonal in floating point.
                if apq.abs() < 1e-300
                    || (apq.abs() * 1e18 < app.abs() && apq.abs() * 1e18 < aqq.abs())
                {
                    w[p * n + q] = 0.0;
                    w[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut w, n, p, q, c, s, t, apq);
                if let Some(vm) = v.as_mut() {
                    for k in 0..n {
                        let row = vm.row_mut(k);
                        let (vkp, vkq) = (row[p], row[q]);
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&w, n) > target {
        return Err(Error::numerical(format!(
            "sym_eig: Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let diag: Vec<f64> = (0..n).map(|i| w[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|vm| Matrix::from_fn(n, n, |i, k| vm.get(i, order[k])));
    Ok(Spectrum { values, vectors })
}

fn off_diagonal_norm(w: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..i {
            s += 2.0 * w[i * n + j] * w[i * n + j];
        }
    }
    s.sqrt()
}

/// Applies the Jacobi rotation in the `(p, q)` plane that zeroes `w[p][q]`.
#[allow(clippy::too_many_arguments)]
fn rotate(w: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64, t: f64, apq: f64) {
    let tau = s / (1.0 + c);
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = w[p * n + k];
        let akq = w[q * n + k];
        let new_p = akp - s * (akq + tau * akp);
        let new_q = akq + s * (akp - tau * akq);
        w[p * n + k] = new_p;
        w[k * n + p] = new_p;
        w[q * n + k] = new_q;
        w[k * n + q] = new_q;
    }
    w[p * n + p] -= t * apq;
    w[q * n + q] += t * apq;
    w[p * n + q] = 0.0;
    w[q * n + p] = 0.0;
}

/// Lower-triangular `L` with `L L^T = a`.
pub fn cholesky(a: &SymMatrix) -> Result<Matrix> {
    if !a.is_finite() {
        return Err(Error::domain("cholesky: non-finite entry"));
    }
    let n = a.order();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        l.set(j, j, ljj);
        for i in j + 1..n {
            let mut s = a.get(i, j);
            let (ri, rj) = (l.row(i), l.row(j));
            for k in 0..j {
                s -= ri[k] * rj[k];
            }
            l.set(i, j, s / ljj);
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in 0..n {
        let row = l.row(i);
        let mut s = x[i];
        for k in 0..i {
            s -= row[k] * x[k];
        }
        x[i] = s / row[i];
    }
    x
}

/// Solves `L^T x = b` for lower-triangular `L`.
pub fn solve_lower_transpose(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(x[i], |s, k| s - l.get(k, i) * x[k]);
        x[i] = s / l.get(i, i);
    }
    x
}

/// `L^{-1} B` for lower-triangular `L` and a general `B`.
pub fn lower_solve_matrix(l: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(b.rows(), b.cols());
    for j in 0..b.cols() {
        let x = solve_lower(l, &b.column(j));
        for (i, v) in x.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// Roots `x` of `det(x m - a) = 0`, descending, via `m = L L^T` and the
/// symmetric problem for `L^{-1} a L^{-T}`.
pub fn generalized_eig(a: &SymMatrix, m: &SymMatrix) -> Result<Spectrum> {
    if a.order() != m.order() {
        return Err(Error::domain("generalized_eig: order mismatch"));
    }
    if !a.is_finite() {
        return Err(Error::domain("generalized_eig: non-finite entry"));
    }
    let l = cholesky(m)?;
    let n = a.order();
    let diag: Vec<f64> = (0..n).map(|i| l.get(i, i)).collect();
    let hi = diag.iter().cloned().fold(0.0, f64::max);
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = (hi / lo).powi(2);
    if condition > MAX_CONDITION {
        return Err(Error::numerical(format!(
            "generalized_eig: right-hand matrix is near singular (condition estimate {condition:e})"
        )));
    }
    // C = L^{-1} a L^{-T} = L^{-1} (L^{-1} a)^T since a is symmetric.
    let w = lower_solve_matrix(&l, &a.to_dense());
    let c = lower_solve_matrix(&l, &w.transpose());
    let sym = SymMatrix::from_fn(n, |i, j| 0.5 * (c.get(i, j) + c.get(j, i)));
    let mut spec = sym_eig(&sym, false)?;
    spec.vectors = None;
    for v in &mut spec.values {
        if *v == 0.0 {
            *v = 0.0;
        }
    }
    Ok(spec)
}

/// Determinant by LU factorization with partial pivoting.
pub fn lu_determinant(a: &Matrix) -> Result<f64> {
    if a.rows() != a.cols() {
        return Err(Error::domain("lu_determinant: matrix is not square"));
    }
    if !a.is_finite() {
        return Err(Error::domain("lu_determinant: non-finite entry"));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let mut piv = k;
        let mut best = m.get(k, k).abs();
        for i in k + 1..n {
            let v = m.get(i, k).abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Ok(0.0);
        }
        if piv != k {
            for j in 0..n {
                let tmp = m.get(k, j);
                m.set(k, j, m.get(piv, j));
                m.set(piv, j, tmp);
            }
            det = -det;
        }
        let pivot = m.get(k, k);
        det *= pivot;
        for i in k + 1..n {
            let factor = m.get(i, k) / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let v = m.get(i, j) - factor * m.get(k, j);
                m.set(i, j, v);
            }
        }
    }
    Ok(det)
}
