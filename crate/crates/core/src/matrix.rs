//! Dense complex matrices: products, Kronecker products, partial traces,
//! Hermitian eigendecomposition, and unitary construction.
//!
//! Storage is row-major. Tensor products always put the first factor on
//! the outer (slow) index, so `kron(system, environment)` indexes a joint
//! basis state `|s, e>` as `s * dim_env + e`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex::zero() })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(diag[i], T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    /// Single-column matrix holding `v`.
    pub fn column_vector(v: &[Complex<T>]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Computational basis ket `|index>` in dimension `dim`.
    pub fn basis_ket(dim: usize, index: usize) -> Self {
        Self::from_fn(dim, 1, |i, _| if i == index { Complex::one() } else { Complex::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row_vecs(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Matrix product; panics on non-conformable shapes.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul of {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Kronecker product, first factor outer.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (br, bc) = rhs.shape();
        Self::from_fn(self.rows * br, self.cols * bc, |i, j| {
            self[(i / br, j / bc)] * rhs[(i % br, j % bc)]
        })
    }

    /// Traces out one tensor factor of a square matrix on `keep ⊗ trace`
    /// (`trace_second = true`) or `trace ⊗ keep` (`trace_second = false`).
    pub fn partial_trace(&self, dim_keep: usize, dim_trace: usize, trace_second: bool) -> Result<Self> {
        let side = dim_keep * dim_trace;
        if !self.is_square() || self.rows != side || side == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot factor as {dim_keep} x {dim_trace}",
                self.rows, self.cols
            )));
        }
        Ok(Self::from_fn(dim_keep, dim_keep, |a, b| {
            (0..dim_trace)
                .map(|e| {
                    if trace_second {
                        self[(a * dim_trace + e, b * dim_trace + e)]
                    } else {
                        self[(e * dim_keep + a, e * dim_keep + b)]
                    }
                })
                .fold(Complex::zero(), |x, y| x + y)
        }))
    }

    pub fn hermiticity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖A†A − 1‖_F`: zero exactly when the columns are orthonormal.
    pub fn isometry_residual(&self) -> T {
        let gram = self.adjoint().matmul(self);
        (&gram - &Self::identity(self.cols)).frobenius_norm()
    }

    pub fn unitarity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.isometry_residual()
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Eigenvalues come back in descending order.
    pub fn hermitian_eig(&self) -> Result<HermitianEigen<T>> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let scale = self.frobenius_norm().max(T::one());
        let residual = self.hermiticity_residual();
        if residual > T::tol(1e-10) * scale {
            return Err(Error::NotHermitian { residual: residual.as_f64() });
        }
        let n = self.rows;
        let half = T::lit(0.5);
        let mut a = Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()).scale(half));
        let v = jacobi_diagonalize(&mut a.data, n);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
        let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
        let eigenvectors = Self::from_fn(n, n, |i, j| v[i * n + order[j]]);
        Ok(HermitianEigen { eigenvalues, eigenvectors })
    }

    /// `exp(iH)` for the Hermitian `H` packed in `v`: the `dim` diagonal
    /// entries first, then `(re, im)` of each upper-triangular entry in
    /// row-major order.
    pub fn unitary_from_generator(v: &[T], dim: usize) -> Result<Self> {
        let mut h = hermitian_from_generator(v, dim)?;
        let vecs = jacobi_diagonalize(&mut h.data, dim);
        let n = dim;
        let phases: Vec<Complex<T>> = (0..n).map(|k| Complex::from_polar(T::one(), h.data[k * n + k].re)).collect();
        let mut data = vec![Complex::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let w = vecs[i * n + k] * phases[k];
                for j in 0..n {
                    data[i * n + j] = data[i * n + j] + w * vecs[j * n + k].conj();
                }
            }
        }
        Ok(Self { rows: n, cols: n, data })
    }

    /// Haar-distributed unitary from QR of a complex Ginibre matrix with the
    /// phases of `R`'s diagonal divided out.
    pub fn haar_random_unitary(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        let g = Self::from_fn(dim, dim, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(T::lit(re) * s, T::lit(im) * s)
        });
        let (q, r) = g.householder_qr();
        Self::from_fn(dim, dim, |i, j| {
            let d = r[(j, j)];
            let n = d.norm();
            let phase = if n > T::zero() { d / n } else { Complex::one() };
            q[(i, j)] * phase
        })
    }

    /// Householder QR of a square matrix: returns unitary `Q` and upper
    /// triangular `R` with `self = Q R`.
    pub fn householder_qr(&self) -> (Self, Self) {
        assert!(self.is_square(), "householder_qr expects a square matrix");
        let n = self.rows;
        let mut r = self.clone();
        let mut q = Self::identity(n);
        for k in 0..n.saturating_sub(1) {
            let norm_x = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<T>().sqrt();
            if norm_x == T::zero() {
                continue;
            }
            let x0 = r[(k, k)];
            let phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { Complex::one() };
            let alpha = -phase * norm_x;
            let mut w: Vec<Complex<T>> = (k..n).map(|i| r[(i, k)]).collect();
            w[0] = w[0] - alpha;
            let wn = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if wn == T::zero() {
                continue;
            }
            for z in &mut w {
                *z = *z / wn;
            }
            // R <- (I - 2ww†) R on rows k..n
            for j in 0..n {
                let dot = w
                    .iter()
                    .enumerate()
                    .fold(Complex::<T>::zero(), |acc, (t, wt)| acc + wt.conj() * r[(k + t, j)]);
                for (t, wt) in w.iter().enumerate() {
                    r[(k + t, j)] = r[(k + t, j)] - *wt * dot * T::lit(2.0);
                }
            }
            // Q <- Q (I - 2ww†) on columns k..n
            for i in 0..n {
                let dot = w
                    .iter()
                    .enumerate()
                    .fold(Complex::<T>::zero(), |acc, (t, wt)| acc + q[(i, k + t)] * *wt);
                for (t, wt) in w.iter().enumerate() {
                    q[(i, k + t)] = q[(i, k + t)] - dot * wt.conj() * T::lit(2.0);
                }
            }
        }
        for i in 1..n {
            for j in 0..i {
                r[(i, j)] = Complex::zero();
            }
        }
        (q, r)
    }

    /// Extends a matrix with orthonormal columns to a square unitary whose
    /// leading columns are exactly `self`.
    pub fn complete_isometry(&self) -> Result<Self> {
        if self.rows < self.cols {
            return Err(Error::DimensionMismatch(format!(
                "isometry must be tall, got {}x{}",
                self.rows, self.cols
            )));
        }
        let residual = self.isometry_residual();
        if residual > T::tol(1e-10) {
            return Err(Error::NotIsometry { residual: residual.as_f64() });
        }
        let n = self.rows;
        let mut basis: Vec<Vec<Complex<T>>> = (0..self.cols).map(|j| self.column(j)).collect();
        let mut candidates: Vec<usize> = (0..n).collect();
        while basis.len() < n {
            // Greedy: take the standard basis vector with the largest
            // component outside the current span.
            let (pos, vec, norm) = candidates
                .iter()
                .enumerate()
                .map(|(pos, &e)| {
                    let mut w = vec![Complex::zero(); n];
                    w[e] = Complex::one();
                    for _ in 0..2 {
                        orthogonalize(&mut w, &basis);
                    }
                    let norm = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
                    (pos, w, norm)
                })
                .max_by(|a, b| a.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal))
                .expect("candidate basis vectors remain while the span is incomplete");
            candidates.swap_remove(pos);
            basis.push(vec.into_iter().map(|z| z / norm).collect());
        }
        let mut out = Self::zeros(n, n);
        for (j, col) in basis.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                out[(i, j)] = z;
            }
        }
        for j in 0..self.cols {
            for i in 0..n {
                out[(i, j)] = self[(i, j)];
            }
        }
        Ok(out)
    }
}

fn orthogonalize<T: Real>(w: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) {
    for b in basis {
        let overlap = b.iter().zip(w.iter()).fold(Complex::zero(), |acc, (bi, wi)| acc + bi.conj() * *wi);
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi = *wi - *bi * overlap;
        }
    }
}

/// Diagonalizes the Hermitian row-major `a` in place by cyclic Jacobi
/// sweeps and returns the accumulated eigenvector matrix (columns).
fn jacobi_diagonalize<T: Real>(a: &mut [Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = Complex::one();
    }
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let threshold = T::lit(1e-13).max(T::epsilon()) * norm;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + a[i * n + j].norm_sqr();
            }
        }
        let off = off + off;
        if off.sqrt() <= threshold {
            break;
        }
        // pivots this small cannot keep the off-diagonal norm above the threshold
        let skip = threshold / T::lit((2 * n * n) as f64);
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p * n + q].norm_sqr() > skip * skip {
                    jacobi_rotate(a, &mut v, n, p, q);
                }
            }
        }
    }
    v
}

/// One two-sided rotation `A <- G† A G`, `V <- V G` annihilating `A[p][q]`,
/// on row-major `n x n` storage, with
/// `G = [[c, u c A[p][q]], [−u c conj(A[p][q]), c]]` on the `(p, q)` plane.
/// Only the `p` and `q` columns are computed; the rows follow from
/// Hermiticity.
fn jacobi_rotate<T: Real>(a: &mut [Complex<T>], v: &mut [Complex<T>], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r2 = apq.norm_sqr();
    if r2 == T::zero() {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // u·|A[p][q]| is the smaller root of t² + 2θt − 1 = 0, θ = (aqq − app)/2|A[p][q]|
    let diff = aqq - app;
    let u = T::lit(2.0) * diff.signum() / (diff.abs() + (diff * diff + T::lit(4.0) * r2).sqrt());
    let c = (u * u * r2 + T::one()).sqrt().recip();
    let shift = u * r2;
    let g_pq = apq * (u * c);
    let g_qp = -g_pq.conj();

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_p = akp * c + akq * g_qp;
        let new_q = akp * g_pq + akq * c;
        a[k * n + p] = new_p;
        a[k * n + q] = new_q;
        a[p * n + k] = new_p.conj();
        a[q * n + k] = new_q.conj();
    }
    a[p * n + p] = Complex::new(app - shift, T::zero());
    a[q * n + q] = Complex::new(aqq + shift, T::zero());
    a[p * n + q] = Complex::zero();
    a[q * n + p] = Complex::zero();
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c + vkq * g_qp;
        v[k * n + q] = vkp * g_pq + vkq * c;
    }
}

/// Unpacks a generator vector into the Hermitian matrix it encodes.
pub fn hermitian_from_generator<T: Real>(v: &[T], dim: usize) -> Result<ComplexMatrix<T>> {
    if v.len() != dim * dim || dim == 0 {
        return Err(Error::GeneratorLength { expected: dim * dim, got: v.len() });
    }
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex::new(v[i], T::zero());
    }
    let mut idx = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = Complex::new(v[idx], v[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    Ok(h)
}

/// Result of [`ComplexMatrix::hermitian_eig`].
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Descending.
    pub eigenvalues: Vec<T>,
    /// Columns are the matching orthonormal eigenvectors.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V diag(values) V†`.
    pub fn reconstruct_with(&self, values: &[Complex<T>]) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| acc + v[(i, k)] * values[k] * v[(j, k)].conj())
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let vals: Vec<Complex<T>> =
            self.eigenvalues.iter().map(|&l| Complex::new(l, T::zero())).collect();
        self.reconstruct_with(&vals)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "add of mismatched shapes");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "sub of mismatched shapes");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "({:?}, {:?})  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// The Pauli matrices and identity, in the order `(1, σx, σy, σz)`.
pub fn paulis<T: Real>() -> [ComplexMatrix<T>; 4] {
    let o = Complex::zero();
    let l = Complex::one();
    let i = Complex::i();
    let m = |a: [Complex<T>; 4]| ComplexMatrix { rows: 2, cols: 2, data: a.to_vec() };
    [m([l, o, o, l]), m([o, l, l, o]), m([o, -i, i, o]), m([l, o, o, -l])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> M {
        let g: M = ComplexMatrix::haar_random_unitary(n, seed);
        let d: Vec<f64> = (0..n).map(|k| (k as f64) - 1.7).collect();
        let raw = &(&g * &M::from_real_diagonal(&d)) * &g.adjoint();
        M::from_fn(n, n, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5)
    }

    #[test]
    fn kron_identities_and_paulis() {
        let [id, x, _, _] = paulis::<f64>();
        assert_eq!(id.kron(&id), M::identity(4));
        let xx = x.kron(&x);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(i, j)], c(expect, 0.0));
            }
        }
        let d = M::from_real_diagonal(&[2.0, 3.0]).kron(&id);
        assert_eq!(d, M::from_real_diagonal(&[2.0, 2.0, 3.0, 3.0]));
    }

    #[test]
    fn partial_trace_cases() {
        let rho = M::from_rows(&[vec![c(0.7, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.3, 0.0)]]).unwrap();
        let sigma = M::from_real_diagonal(&[0.25, 0.5, 1.25]);
        let reduced = rho.kron(&sigma).partial_trace(2, 3, true).unwrap();
        assert!(reduced.max_abs_diff(&rho.scale_real(2.0)) < 1e-15);
        let reduced_first = sigma.kron(&rho).partial_trace(2, 3, false).unwrap();
        assert!(reduced_first.max_abs_diff(&rho.scale_real(2.0)) < 1e-15);

        let s = FRAC_1_SQRT_2;
        let omega = M::column_vector(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let bell = &omega * &omega.adjoint();
        let half = bell.partial_trace(2, 2, true).unwrap();
        assert!(half.max_abs_diff(&M::identity(2).scale_real(0.5)) < 1e-15);

        assert_eq!(M::identity(4).partial_trace(2, 2, true).unwrap(), M::identity(2).scale_real(2.0));
        assert!(matches!(M::identity(4).partial_trace(3, 2, true), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn eig_of_paulis() {
        let [_, x, _, z] = paulis::<f64>();
        let ez = z.hermitian_eig().unwrap();
        assert_eq!(ez.eigenvalues, vec![1.0, -1.0]);
        assert!(ez.eigenvectors.max_abs_diff(&M::identity(2)) < 1e-15);

        let ex = x.hermitian_eig().unwrap();
        assert!((ex.eigenvalues[0] - 1.0).abs() < 1e-15 && (ex.eigenvalues[1] + 1.0).abs() < 1e-15);
        // eigenvectors are fixed only up to phase
        let v0 = ex.eigenvectors.column(0);
        let v1 = ex.eigenvectors.column(1);
        assert!(((v0[0] * v0[1].conj()).re - 0.5).abs() < 1e-15);
        assert!(((v1[0] * v1[1].conj()).re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        for seed in 0..20 {
            let h = random_hermitian(6, seed);
            let eig = h.hermitian_eig().unwrap();
            let err = (&eig.reconstruct() - &h).frobenius_norm();
            assert!(err < 1e-12 * h.frobenius_norm().max(1.0), "seed {seed}: {err:e}");
            assert!(eig.eigenvectors.unitarity_residual() < 1e-12);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = M::zeros(2, 3);
        assert!(matches!(rect.hermitian_eig(), Err(Error::NotSquare { .. })));
        let nonherm = M::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(matches!(nonherm.hermitian_eig(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn generator_exponentials() {
        assert!(M::unitary_from_generator(&[0.0; 16], 4).unwrap().max_abs_diff(&M::identity(4)) < 1e-15);

        // (π/2)σx: diag zeros, upper entry re = π/2.
        let u = M::unitary_from_generator(&[0.0, 0.0, PI / 2.0, 0.0], 2).unwrap();
        let ix = paulis::<f64>()[1].scale(Complex::i());
        assert!(u.max_abs_diff(&ix) < 1e-15);

        assert!(matches!(
            M::unitary_from_generator(&[0.0; 5], 2),
            Err(Error::GeneratorLength { expected: 4, got: 5 })
        ));
    }

    #[test]
    fn haar_unitary_is_deterministic() {
        let a: M = ComplexMatrix::haar_random_unitary(8, 17);
        let b: M = ComplexMatrix::haar_random_unitary(8, 17);
        assert_eq!(a, b);
        assert!(a.unitarity_residual() < 1e-12);
        let one: M = ComplexMatrix::haar_random_unitary(1, 3);
        assert!((one[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn householder_qr_factorizes() {
        let g = M::from_fn(5, 5, |i, j| c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0));
        let (q, r) = g.householder_qr();
        assert!(q.unitarity_residual() < 1e-13);
        assert!((&q * &r).max_abs_diff(&g) < 1e-12);
        for i in 1..5 {
            for j in 0..i {
                assert_eq!(r[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn isometry_completion() {
        let e0 = M::basis_ket(4, 0);
        let u = e0.complete_isometry().unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        assert_eq!(u.column(0), e0.column(0));

        let v: M = ComplexMatrix::haar_random_unitary(4, 9);
        assert_eq!(v.complete_isometry().unwrap(), v);

        let big: M = ComplexMatrix::haar_random_unitary(8, 4);
        let iso = M::from_fn(8, 2, |i, j| big[(i, j)]);
        let u = iso.complete_isometry().unwrap();
        assert!(u.unitarity_residual() < 1e-11);
        assert!((&u * &u.adjoint()).max_abs_diff(&M::identity(8)) < 1e-11);
        for j in 0..2 {
            for i in 0..8 {
                assert!((u[(i, j)] - iso[(i, j)]).norm() < 1e-13);
            }
        }

        let bad = M::from_fn(3, 1, |_, _| c(1.0, 0.0));
        assert!(matches!(bad.complete_isometry(), Err(Error::NotIsometry { .. })));
    }

    #[test]
    fn construction_rejects_non_finite() {
        let err = M::new(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, col: 1 }));
        assert!(M::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn single_precision_eig() {
        let [_, x, y, _] = paulis::<f32>();
        let h = &x + &y;
        let eig = h.hermitian_eig().unwrap();
        let s = 2f32.sqrt();
        assert!((eig.eigenvalues[0] - s).abs() < 1e-6);
        assert!((&eig.reconstruct() - &h).frobenius_norm() < 1e-5);
    }
}
