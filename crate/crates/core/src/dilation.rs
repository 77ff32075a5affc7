//! Unitary dilations: a joint unitary on system ⊗ environment plus an
//! environment state, and the grouped Kraus operators they induce.
//!
//! Conventions: the system factor comes first in every tensor product.
//! The environment state is diagonal in the computational basis (any other
//! eigenbasis can be folded into the unitary). After the interaction the
//! joint space `n·d` is regrouped as `m ⊗ (n·d/m)` by splitting the row
//! index lexicographically, and the second factor is traced out in its
//! computational basis.

use num_complex::Complex;
use num_traits::Zero;

use crate::channel::{QuantumChannel, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Environment dimension and its (descending) eigenvalue spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentSpec<T> {
    spectrum: Vec<T>,
}

impl<T: Real> EnvironmentSpec<T> {
    pub fn new(spectrum: Vec<T>) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum".into()));
        }
        if spectrum.iter().any(|&l| !(l >= T::zero()) || !l.is_finite()) {
            return Err(Error::InvalidSpectrum("eigenvalues must be finite and nonnegative".into()));
        }
        let total: T = spectrum.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidSpectrum(format!("eigenvalues sum to {total}")));
        }
        if spectrum.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum("eigenvalues must be sorted descending".into()));
        }
        Ok(Self { spectrum })
    }

    /// `|0⟩⟨0|` in dimension `d`.
    pub fn pure(d: usize) -> Self {
        let mut spectrum = vec![T::zero(); d.max(1)];
        spectrum[0] = T::one();
        Self { spectrum }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let d = d.max(1);
        Self { spectrum: vec![T::one() / T::from_usize(d).unwrap(); d] }
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }
}

/// A channel implementation: `ρ ↦ Σ_j λ_j tr_res[U (ρ ⊗ |j⟩⟨j|) U†]`.
#[derive(Clone, Debug)]
pub struct DilationModel<T> {
    in_dim: usize,
    out_dim: usize,
    env: EnvironmentSpec<T>,
    unitary: ComplexMatrix<T>,
}

impl<T: Real> DilationModel<T> {
    pub fn new(in_dim: usize, out_dim: usize, env: EnvironmentSpec<T>, unitary: ComplexMatrix<T>) -> Result<Self> {
        let d = env.dim();
        let side = in_dim * d;
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidParameter("dimensions must be positive".into()));
        }
        if side % out_dim != 0 {
            return Err(Error::Indivisible { n: in_dim, m: out_dim, d });
        }
        if unitary.shape() != (side, side) {
            return Err(Error::DimensionMismatch(format!(
                "joint unitary must be {side}x{side}, got {}x{}",
                unitary.rows(),
                unitary.cols()
            )));
        }
        let residual = unitary.unitarity_residual();
        if residual > T::tol(1e-10) {
            return Err(Error::NotUnitary { residual: residual.as_f64() });
        }
        Ok(Self { in_dim, out_dim, env, unitary })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn env(&self) -> &EnvironmentSpec<T> {
        &self.env
    }

    pub fn unitary(&self) -> &ComplexMatrix<T> {
        &self.unitary
    }

    /// Dimension of the factor traced out after the interaction.
    pub fn residual_dim(&self) -> usize {
        self.in_dim * self.env.dim() / self.out_dim
    }

    /// `A_jk = √λ_j (1_m ⊗ ⟨e_k|) U (1_n ⊗ |j⟩)`.
    pub fn induced_channel(&self) -> GroupedKraus<T> {
        let (n, m, d) = (self.in_dim, self.out_dim, self.env.dim());
        let k_dim = self.residual_dim();
        let blocks = self
            .env
            .spectrum()
            .iter()
            .enumerate()
            .map(|(j, &lambda)| {
                let s = lambda.sqrt();
                (0..k_dim)
                    .map(|k| ComplexMatrix::from_fn(m, n, |a, i| self.unitary[(a * k_dim + k, i * d + j)] * s))
                    .collect()
            })
            .collect();
        GroupedKraus { in_dim: n, out_dim: m, spectrum: self.env.spectrum().to_vec(), blocks }
    }

    /// The physical map evaluated directly on a state, without going
    /// through Kraus operators.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let (n, m, d) = (self.in_dim, self.out_dim, self.env.dim());
        if rho.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("state must be {n}x{n}")));
        }
        let mut out = ComplexMatrix::zeros(m, m);
        let udag = self.unitary.adjoint();
        for (j, &lambda) in self.env.spectrum().iter().enumerate() {
            if lambda == T::zero() {
                continue;
            }
            let ket = ComplexMatrix::basis_ket(d, j);
            let joint = rho.kron(&(&ket * &ket.adjoint()));
            let evolved = &(&self.unitary * &joint) * &udag;
            let reduced = evolved.partial_trace(m, self.residual_dim(), true)?;
            out = &out + &reduced.scale_real(lambda);
        }
        Ok(out)
    }

    /// Pure-environment dilation of a trace-preserving channel: the
    /// isometry `|ψ⟩ ↦ Σ_k A_k|ψ⟩ ⊗ |e_k⟩` completed to a unitary.
    pub fn stinespring(ch: &QuantumChannel<T>) -> Result<Self> {
        let residual = ch.tp_residual();
        if residual > T::tol(DEFAULT_TOLERANCE) {
            return Err(Error::NotTracePreserving { residual: residual.as_f64() });
        }
        let (n, m) = (ch.in_dim(), ch.out_dim());
        let ops = ch.kraus().len();
        let d = (1..)
            .find(|&d| (n * d) % m == 0 && n * d / m >= ops)
            .expect("some environment dimension is always large enough");
        let k_dim = n * d / m;
        let side = n * d;

        let mut iso = ComplexMatrix::zeros(side, n);
        for (k, a) in ch.kraus().iter().enumerate() {
            for r in 0..m {
                for i in 0..n {
                    iso[(r * k_dim + k, i)] = a[(r, i)];
                }
            }
        }
        let completed = iso.complete_isometry()?;

        // Column i of the isometry is the image of |i⟩ ⊗ |0⟩, i.e. joint
        // column i·d. Completion columns fill the rest in order.
        let mut order = Vec::with_capacity(side);
        let mut extra = n..side;
        for col in 0..side {
            if col % d == 0 {
                order.push(col / d);
            } else {
                order.push(extra.next().expect("enough completion columns"));
            }
        }
        let unitary = ComplexMatrix::from_fn(side, side, |r, c| completed[(r, order[c])]);
        Self::new(n, m, EnvironmentSpec::pure(d), unitary)
    }
}

/// Kraus operators grouped by environment eigenvalue: block `j` holds the
/// `n·d/m` operators `A_jk` that carry weight `λ_j`.
#[derive(Clone, Debug)]
pub struct GroupedKraus<T> {
    in_dim: usize,
    out_dim: usize,
    spectrum: Vec<T>,
    blocks: Vec<Vec<ComplexMatrix<T>>>,
}

impl<T: Real> GroupedKraus<T> {
    pub fn new(in_dim: usize, out_dim: usize, spectrum: Vec<T>, blocks: Vec<Vec<ComplexMatrix<T>>>) -> Result<Self> {
        if spectrum.len() != blocks.len() {
            return Err(Error::RaggedBlocks(format!(
                "{} eigenvalues for {} blocks",
                spectrum.len(),
                blocks.len()
            )));
        }
        for (j, block) in blocks.iter().enumerate() {
            if let Some(a) = block.iter().find(|a| a.shape() != (out_dim, in_dim)) {
                return Err(Error::DimensionMismatch(format!(
                    "block {j} holds a {}x{} operator, expected {out_dim}x{in_dim}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self { in_dim, out_dim, spectrum, blocks })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }

    pub fn blocks(&self) -> &[Vec<ComplexMatrix<T>>] {
        &self.blocks
    }

    /// `max_ij ‖Σ_k A_ik† A_jk − δ_ij λ_i 1‖_F`.
    pub fn verify_env_constraint(&self) -> Result<T> {
        let len = self.blocks.first().map_or(0, Vec::len);
        if self.blocks.iter().any(|b| b.len() != len) {
            return Err(Error::RaggedBlocks("blocks hold different operator counts".into()));
        }
        let n = self.in_dim;
        let mut worst = T::zero();
        for (i, bi) in self.blocks.iter().enumerate() {
            for (j, bj) in self.blocks.iter().enumerate() {
                let mut sum = ComplexMatrix::zeros(n, n);
                for (a, b) in bi.iter().zip(bj) {
                    sum = &sum + &(&a.adjoint() * b);
                }
                if i == j {
                    sum = &sum - &ComplexMatrix::identity(n).scale_real(self.spectrum[i]);
                }
                worst = worst.max(sum.frobenius_norm());
            }
        }
        Ok(worst)
    }

    pub fn flatten(&self) -> Vec<ComplexMatrix<T>> {
        self.blocks.iter().flatten().cloned().collect()
    }

    /// All blocks concatenated into one (validated) channel.
    pub fn to_channel(&self) -> Result<QuantumChannel<T>> {
        QuantumChannel::new(self.in_dim, self.out_dim, self.flatten())
    }

    /// Shape-checked only; for diagnostics on inputs that may not be
    /// trace preserving.
    pub fn to_channel_unvalidated(&self) -> Result<QuantumChannel<T>> {
        QuantumChannel::unvalidated(self.in_dim, self.out_dim, self.flatten())
    }

    /// `B_jk = Σ_k' u_kk' A_jk'` with the same `u` in every block: a
    /// rotation of the traced factor after the interaction.
    pub fn mix_within_blocks(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        let len = self.blocks.first().map_or(0, Vec::len);
        if u.shape() != (len, len) {
            return Err(Error::DimensionMismatch(format!("mixing unitary must be {len}x{len}")));
        }
        let residual = u.unitarity_residual();
        if residual > T::tol(1e-10) {
            return Err(Error::NotUnitary { residual: residual.as_f64() });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|block| {
                (0..len)
                    .map(|k| {
                        block.iter().enumerate().fold(
                            ComplexMatrix::zeros(self.out_dim, self.in_dim),
                            |acc, (kk, a)| &acc + &a.scale(u[(k, kk)]),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(Self { in_dim: self.in_dim, out_dim: self.out_dim, spectrum: self.spectrum.clone(), blocks })
    }
}

fn check_divides(n: usize, m: usize, d: usize) -> Result<()> {
    if m == 0 || (n * d) % m != 0 {
        return Err(Error::Indivisible { n, m, d });
    }
    Ok(())
}

/// Real dimension of the set of `n → m` channels reachable with a pure
/// `d`-dimensional environment: `2n²d − (nd/m)² − n²`.
pub fn param_count_pure(n: usize, m: usize, d: usize) -> Result<i64> {
    check_divides(n, m, d)?;
    let (n, m, d) = (n as i64, m as i64, d as i64);
    Ok(2 * n * n * d - (n * d / m).pow(2) - n * n)
}

/// Real dimension of the full channel set, `n²(m² − 1)`.
pub fn param_count_tcp(n: usize, m: usize) -> i64 {
    let (n, m) = (n as i64, m as i64);
    n * n * (m * m - 1)
}

/// Lower and upper bounds on the dimension of channels reachable with a
/// mixed `d`-dimensional environment: the pure counts at `d` and `d²`.
/// Once a pure environment reaches `m²` it covers every channel, so both
/// ends are capped at the full count from there on.
pub fn mix_param_bounds(n: usize, m: usize, d: usize) -> Result<(i64, i64)> {
    check_divides(n, m, d)?;
    check_divides(n, m, d * d)?;
    let effective = |dim: usize| -> Result<i64> {
        if dim >= m * m {
            Ok(param_count_tcp(n, m))
        } else {
            Ok(param_count_pure(n, m, dim)?.min(param_count_tcp(n, m)))
        }
    };
    Ok((effective(d)?, effective(d * d)?))
}

/// Zero operator list of the right shape; convenient for padding blocks.
pub fn zero_block<T: Real>(count: usize, out_dim: usize, in_dim: usize) -> Vec<ComplexMatrix<T>> {
    vec![ComplexMatrix::from_fn(out_dim, in_dim, |_, _| Complex::zero()); count]
}
