//! Completely positive trace-preserving maps in Kraus form, their Choi
//! matrices, and the checks built on them.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianEigen};
use crate::scalar::Real;

/// Default tolerance on `‖Σ A†A − 1‖_F` and on Choi eigenvalues.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A channel from `in_dim`-dimensional to `out_dim`-dimensional operators,
/// `ρ ↦ Σ A ρ A†`.
///
/// Operators are kept exactly as given (including zero padding or user
/// grouping); [`QuantumChannel::canonicalize`] produces the minimal
/// orthogonal set when that is wanted.
#[derive(Clone, Debug)]
pub struct QuantumChannel<T> {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix<T>>,
}

/// `Σ_ij E_ij ⊗ χ(E_ij)`, input factor first, trace `in_dim` for
/// trace-preserving maps.
#[derive(Clone, Debug)]
pub struct ChoiMatrix<T> {
    in_dim: usize,
    out_dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> QuantumChannel<T> {
    /// Validated constructor: shapes must agree and the trace-preservation
    /// residual must be within [`DEFAULT_TOLERANCE`].
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        Self::with_tolerance(in_dim, out_dim, kraus, T::tol(DEFAULT_TOLERANCE))
    }

    pub fn with_tolerance(in_dim: usize, out_dim: usize, kraus: Vec<ComplexMatrix<T>>, tol: T) -> Result<Self> {
        let ch = Self::unvalidated(in_dim, out_dim, kraus)?;
        let residual = ch.tp_residual();
        if residual > tol {
            return Err(Error::NotTracePreserving { residual: residual.as_f64() });
        }
        Ok(ch)
    }

    /// Checks shapes only. Used for diagnosing maps that may fail trace
    /// preservation, e.g. files under validation.
    pub fn unvalidated(in_dim: usize, out_dim: usize, kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidParameter("channel dimensions must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::EmptyKraus);
        }
        if let Some((i, k)) = kraus.iter().enumerate().find(|(_, k)| k.shape() != (out_dim, in_dim)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {i} is {}x{}, expected {out_dim}x{in_dim}",
                k.rows(),
                k.cols()
            )));
        }
        Ok(Self { in_dim, out_dim, kraus })
    }

    pub fn identity(n: usize) -> Self {
        Self { in_dim: n, out_dim: n, kraus: vec![ComplexMatrix::identity(n)] }
    }

    /// Conjugation by a single unitary.
    pub fn unitary(u: ComplexMatrix<T>) -> Result<Self> {
        let n = u.rows();
        if !u.is_square() {
            return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
        }
        Self::new(n, n, vec![u])
    }

    /// Non-selective projective measurement in the computational basis.
    pub fn von_neumann(n: usize) -> Self {
        let kraus = (0..n)
            .map(|i| {
                let ket = ComplexMatrix::basis_ket(n, i);
                &ket * &ket.adjoint()
            })
            .collect();
        Self { in_dim: n, out_dim: n, kraus }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix<T>> {
        self.kraus
    }

    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, channel input dimension is {}",
                rho.rows(),
                rho.cols(),
                self.in_dim
            )));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for a in &self.kraus {
            out = &out + &(&(a * rho) * &a.adjoint());
        }
        Ok(out)
    }

    pub fn tp_residual(&self) -> T {
        let mut sum = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for a in &self.kraus {
            sum = &sum + &(&a.adjoint() * a);
        }
        (&sum - &ComplexMatrix::identity(self.in_dim)).frobenius_norm()
    }

    pub fn is_trace_preserving(&self, tol: T) -> bool {
        self.tp_residual() <= tol
    }

    /// Sum of `|A⟩⟩⟨⟨A|` over the Kraus operators, where
    /// `|A⟩⟩ = Σ_i |i⟩ ⊗ A|i⟩`. Equal to `Σ E_ij ⊗ χ(E_ij)`.
    pub fn choi(&self) -> ChoiMatrix<T> {
        let (n, m) = (self.in_dim, self.out_dim);
        let side = n * m;
        let mut matrix = ComplexMatrix::zeros(side, side);
        let mut vec = vec![Complex::zero(); side];
        for a in &self.kraus {
            for i in 0..n {
                for r in 0..m {
                    vec[i * m + r] = a[(r, i)];
                }
            }
            for (p, &vp) in vec.iter().enumerate() {
                if vp.is_zero() {
                    continue;
                }
                for (q, &vq) in vec.iter().enumerate() {
                    matrix[(p, q)] = matrix[(p, q)] + vp * vq.conj();
                }
            }
        }
        ChoiMatrix { in_dim: n, out_dim: m, matrix }
    }

    pub fn is_completely_positive(&self, tol: T) -> bool {
        self.choi().is_completely_positive(tol)
    }

    /// Number of Choi eigenvalues above `tol`: the minimal number of
    /// Kraus operators.
    pub fn kraus_rank(&self, tol: T) -> usize {
        self.choi().rank(tol)
    }

    /// Kraus rank at most the output dimension. Sufficient for the map to
    /// be an extreme point of the channel set; not claimed to be necessary.
    pub fn is_extremal_rank_condition(&self, tol: T) -> bool {
        self.kraus_rank(tol) <= self.out_dim
    }

    /// `B_i = Σ_j u_ij A_j`, zero-padding the operator list up to the side
    /// of `u`. Describes the same channel.
    pub fn mix_kraus(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
        }
        if u.rows() < self.kraus.len() {
            return Err(Error::DimensionMismatch(format!(
                "mixing unitary of side {} for {} operators",
                u.rows(),
                self.kraus.len()
            )));
        }
        let residual = u.unitarity_residual();
        if residual > T::tol(1e-10) {
            return Err(Error::NotUnitary { residual: residual.as_f64() });
        }
        let kraus = (0..u.rows())
            .map(|i| {
                self.kraus.iter().enumerate().fold(
                    ComplexMatrix::zeros(self.out_dim, self.in_dim),
                    |acc, (j, a)| &acc + &a.scale(u[(i, j)]),
                )
            })
            .collect();
        Ok(Self { in_dim: self.in_dim, out_dim: self.out_dim, kraus })
    }

    /// `‖J(a) − J(b)‖_F / n` on Choi matrices.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.choi().distance(&other.choi())
    }

    /// Minimal orthogonal Kraus set from the Choi eigendecomposition.
    pub fn canonicalize(&self, tol: T) -> Result<Self> {
        self.choi().to_kraus(tol)
    }
}

impl<T: Real> ChoiMatrix<T> {
    pub fn new(in_dim: usize, out_dim: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        let side = in_dim * out_dim;
        if matrix.shape() != (side, side) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for {in_dim}->{out_dim} must be {side}x{side}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let residual = matrix.hermiticity_residual();
        if residual > T::tol(1e-10) * matrix.frobenius_norm().max(T::one()) {
            return Err(Error::NotHermitian { residual: residual.as_f64() });
        }
        Ok(Self { in_dim, out_dim, matrix })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn eigen(&self) -> HermitianEigen<T> {
        self.matrix.hermitian_eig().expect("Choi matrices are Hermitian by construction")
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigen().min_eigenvalue()
    }

    pub fn is_completely_positive(&self, tol: T) -> bool {
        self.min_eigenvalue() >= -tol
    }

    pub fn rank(&self, tol: T) -> usize {
        self.eigen().eigenvalues.iter().filter(|&&l| l > tol).count()
    }

    pub fn distance(&self, other: &Self) -> Result<T> {
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim) {
            return Err(Error::DimensionMismatch(format!(
                "channels {}->{} and {}->{}",
                self.in_dim, self.out_dim, other.in_dim, other.out_dim
            )));
        }
        Ok((&self.matrix - &other.matrix).frobenius_norm() / T::from_usize(self.in_dim).unwrap())
    }

    /// Kraus operators `√λ · reshape(v)` from eigenpairs with `λ > tol`.
    pub fn to_kraus(&self, tol: T) -> Result<QuantumChannel<T>> {
        let (n, m) = (self.in_dim, self.out_dim);
        let eig = self.eigen();
        let min = eig.min_eigenvalue();
        if min < -tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min.as_f64() });
        }
        let kraus = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > tol)
            .map(|(k, &l)| {
                let s = l.sqrt();
                ComplexMatrix::from_fn(m, n, |r, i| eig.eigenvectors[(i * m + r, k)] * s)
            })
            .collect::<Vec<_>>();
        QuantumChannel::new(n, m, kraus)
    }
}
