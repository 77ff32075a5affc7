//! Generalized depolarizing qubit channels `ρ ↦ Σ ε_i P_i ρ P_i` with
//! `P = (1, σx, σy, σz)`, their tetrahedron coordinates, and the explicit
//! environments that implement them.

use num_complex::Complex;
use num_traits::{Num, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::channel::QuantumChannel;
use crate::dilation::{zero_block, GroupedKraus};
use crate::error::{Error, Result};
use crate::matrix::{paulis, ComplexMatrix};
use crate::scalar::Real;
use crate::search::{task_seed, SearchConfig};

/// Weights `(ε1, ε2, ε3, ε4)` on `(1, σx, σy, σz)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralizedDepolarizing<T> {
    eps: [T; 4],
}

/// Point in the cube `[-1, 1]³`; valid weights land in the tetrahedron with
/// vertices `(1,1,1)`, `(1,-1,-1)`, `(-1,1,-1)`, `(-1,-1,1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TetraPoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

fn four<T: Num + Copy>() -> T {
    let two = T::one() + T::one();
    two * two
}

/// Tetrahedron geometry needs only field operations, so it is available
/// for exact types (e.g. rationals) as well as floats.
impl<T> GeneralizedDepolarizing<T>
where
    T: Copy + Num + PartialOrd + ToPrimitive,
{
    /// Accepts weights with every `ε_i ≥ 0` and `|Σε − 1| ≤ tol`.
    pub fn with_tolerance(eps: [T; 4], tol: T) -> Result<Self> {
        if let Some(i) = eps.iter().position(|e| !(*e >= T::zero())) {
            return Err(Error::InvalidParameter(format!(
                "eps{} = {} is negative",
                i + 1,
                eps[i].to_f64().unwrap_or(f64::NAN)
            )));
        }
        let total = eps[0] + eps[1] + eps[2] + eps[3];
        let gap = if total > T::one() { total - T::one() } else { T::one() - total };
        if gap > tol {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {}",
                total.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self { eps })
    }

    pub fn weights(&self) -> [T; 4] {
        self.eps
    }

    pub fn to_tetra(&self) -> TetraPoint<T> {
        let [e1, e2, e3, e4] = self.eps;
        TetraPoint { x: e1 + e2 - e3 - e4, y: e1 - e2 + e3 - e4, z: e1 - e2 - e3 + e4 }
    }

    /// Inverse of [`Self::to_tetra`]; rejects points whose barycentric
    /// coordinates fall below `-tol`, and clamps those within it to zero.
    pub fn from_tetra(p: TetraPoint<T>, tol: T) -> Result<Self> {
        let eps = p.barycentric();
        for (i, &e) in eps.iter().enumerate() {
            if e < T::zero() - tol {
                return Err(Error::OutsideTetrahedron { index: i + 1, value: e.to_f64().unwrap_or(f64::NAN) });
            }
        }
        let eps = eps.map(|e| if e < T::zero() { T::zero() } else { e });
        Ok(Self { eps })
    }
}

impl<T> TetraPoint<T>
where
    T: Copy + Num + PartialOrd,
{
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    /// `(1 ± x ± y ± z) / 4` in weight order; all nonnegative exactly when
    /// the point is inside the tetrahedron.
    pub fn barycentric(&self) -> [T; 4] {
        let (x, y, z, one, q) = (self.x, self.y, self.z, T::one(), four::<T>());
        [(one + x + y + z) / q, (one + x - y - z) / q, (one - x + y - z) / q, (one - x - y + z) / q]
    }

    pub fn inside(&self, tol: T) -> bool {
        self.barycentric().iter().all(|&e| e >= T::zero() - tol)
    }
}

impl<T: Real> GeneralizedDepolarizing<T> {
    pub fn new(eps: [T; 4]) -> Result<Self> {
        Self::with_tolerance(eps, T::tol(1e-12))
    }

    /// Uniform (flat Dirichlet) draw from the probability simplex.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: [f64; 4] = std::array::from_fn(|_| Exp1.sample(&mut rng));
        let total: f64 = draws.iter().sum();
        Self { eps: draws.map(|x| T::lit(x / total)) }
    }

    /// Kraus operators `√ε_i P_i`, zero weights dropped.
    pub fn channel(&self) -> QuantumChannel<T> {
        let kraus: Vec<_> = paulis::<T>()
            .into_iter()
            .zip(self.eps)
            .filter(|(_, e)| *e > T::zero())
            .map(|(p, e)| p.scale_real(e.sqrt()))
            .collect();
        QuantumChannel::new(2, 2, kraus).expect("Pauli mixtures with unit total weight are trace preserving")
    }
}

/// Angles `(θ, φ1, φ2)` of the generalized root-of-SWAP interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitEnvAngles<T> {
    pub theta: T,
    pub phi1: T,
    pub phi2: T,
}

impl<T: Real> QubitEnvAngles<T> {
    pub fn new(theta: T, phi1: T, phi2: T) -> Result<Self> {
        let full = T::PI() + T::PI();
        for (name, a) in [("theta", theta), ("phi1", phi1), ("phi2", phi2)] {
            if !(a >= T::zero() && a <= full) {
                return Err(Error::InvalidParameter(format!("{name} = {a} outside [0, 2π]")));
            }
        }
        Ok(Self { theta, phi1, phi2 })
    }

    /// Reduces arbitrary real angles into `[0, 2π)`.
    pub fn wrapped(theta: T, phi1: T, phi2: T) -> Self {
        let full = T::PI() + T::PI();
        let wrap = |a: T| {
            let r = a % full;
            if r < T::zero() {
                r + full
            } else {
                r
            }
        };
        Self { theta: wrap(theta), phi1: wrap(phi1), phi2: wrap(phi2) }
    }

    /// Joint system ⊗ environment unitary: a phased rotation on the
    /// `{|00⟩, |11⟩}` pair and a plain rotation on `{|01⟩, |10⟩}`.
    pub fn unitary(&self) -> ComplexMatrix<T> {
        let phase = Complex::from_polar(T::one(), self.theta);
        let i = Complex::<T>::i();
        let (s1, c1) = self.phi1.sin_cos();
        let (s2, c2) = self.phi2.sin_cos();
        let o = Complex::zero();
        let re = |x: T| Complex::new(x, T::zero());
        let rows = [
            [phase * c1, o, o, i * phase * s1],
            [o, re(c2), i * s2, o],
            [o, i * s2, re(c2), o],
            [i * phase * s1, o, o, phase * c1],
        ];
        ComplexMatrix::from_fn(4, 4, |r, c| rows[r][c])
    }

    /// Depolarizing weights of the channel the unitary induces on a
    /// maximally mixed qubit environment. Each weight is evaluated as a
    /// squared modulus, which expands to
    /// `ε1 = (cos²φ1 + cos²φ2 + 2 cos φ1 cos φ2 cos θ)/4` and so on.
    pub fn epsilon(&self) -> GeneralizedDepolarizing<T> {
        let phase = Complex::from_polar(T::one(), self.theta);
        let (s1, c1) = self.phi1.sin_cos();
        let (s2, c2) = self.phi2.sin_cos();
        let q = T::lit(0.25);
        let eps = [
            (phase * c1 + c2).norm_sqr() * q,
            (phase * s1 + s2).norm_sqr() * q,
            (phase * s1 - s2).norm_sqr() * q,
            (phase * c1 - c2).norm_sqr() * q,
        ];
        GeneralizedDepolarizing { eps }
    }
}

/// Points on the depolarizing line reached by the `m`-th root of SWAP on a
/// maximally mixed qubit: `ε2 = ε3 = ε4 = sin²(π/2m)/4`.
pub fn root_swap_epsilon<T: Real>(m: u32) -> Result<GeneralizedDepolarizing<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter("root order must be at least 1".into()));
    }
    let s = (T::FRAC_PI_2() / T::from_u32(m).unwrap()).sin();
    let e = s * s * T::lit(0.25);
    Ok(GeneralizedDepolarizing { eps: [T::one() - e - e - e, e, e, e] })
}

/// Two-Pauli channel parameter `x ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPauliParam<T> {
    x: T,
}

impl<T: Copy + Num + PartialOrd> TwoPauliParam<T> {
    pub fn new(x: T) -> Result<Self> {
        if !(x >= T::zero() && x <= T::one()) {
            return Err(Error::InvalidParameter("two-Pauli parameter must lie in [0, 1]".into()));
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> T {
        self.x
    }

    /// `(x, (1−x)/2, (1−x)/2, 0)`.
    pub fn epsilon(&self) -> GeneralizedDepolarizing<T> {
        let two = T::one() + T::one();
        let side = (T::one() - self.x) / two;
        GeneralizedDepolarizing { eps: [self.x, side, side, T::zero()] }
    }
}

impl<T: Real> TwoPauliParam<T> {
    /// The channel with its original operators `√x·1`, `√((1−x)/2)·σx`,
    /// `√((1−x)/2)·iσy`.
    pub fn channel(&self) -> QuantumChannel<T> {
        let [id, x, y, _] = paulis::<T>();
        let side = ((T::one() - self.x) * T::lit(0.5)).sqrt();
        let kraus = vec![
            id.scale_real(self.x.sqrt()),
            x.scale_real(side),
            y.scale(Complex::new(T::zero(), side)),
        ];
        QuantumChannel::new(2, 2, kraus).expect("two-Pauli operators are trace preserving")
    }
}

/// Explicit three-level environment (third eigenvalue zero) for any
/// generalized depolarizing channel.
///
/// With `r = ε3ε4/ε1` when `ε1ε2 ≥ ε3ε4`, the blocks are
/// `{0, √ε3 σy, √ε1 1}` and `{√(ε2−r) σx, √ε4 σz, −i√r σx}` with spectrum
/// `(ε1+ε3, ε2+ε4, 0)`. Otherwise, with `s = ε1ε2/ε3`, they are
/// `{0, √ε1 1, √ε3 σy}` and `{√(ε4−s) σz, √ε2 σx, i√s σz}`. A ratio with a
/// zero numerator is taken as zero.
pub fn qutrit_construction<T: Real>(e: &GeneralizedDepolarizing<T>) -> GroupedKraus<T> {
    let [e1, e2, e3, e4] = e.eps;
    let [id, sx, sy, sz] = paulis::<T>();
    let zero = ComplexMatrix::zeros(2, 2);
    let ratio = |num: T, den: T| if num == T::zero() { T::zero() } else { num / den };
    let root = |x: T| x.max(T::zero()).sqrt();
    let i = Complex::<T>::i();

    let (first, second) = if e1 * e2 >= e3 * e4 {
        let r = ratio(e3 * e4, e1);
        (
            vec![zero, sy.scale_real(root(e3)), id.scale_real(root(e1))],
            vec![sx.scale_real(root(e2 - r)), sz.scale_real(root(e4)), sx.scale(-i * root(r))],
        )
    } else {
        let s = ratio(e1 * e2, e3);
        (
            vec![zero, id.scale_real(root(e1)), sy.scale_real(root(e3))],
            vec![sz.scale_real(root(e4 - s)), sx.scale_real(root(e2)), sz.scale(i * root(s))],
        )
    };
    let lambda1 = e1 + e3;
    let spectrum = vec![lambda1, T::one() - lambda1, T::zero()];
    GroupedKraus::new(2, 2, spectrum, vec![first, second, zero_block(3, 2, 2)])
        .expect("qutrit blocks have consistent shapes")
}

/// One point of the angle-grid sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub angles: QubitEnvAngles<f64>,
    pub eps: GeneralizedDepolarizing<f64>,
    pub tetra: TetraPoint<f64>,
}

/// Evaluates the angle family on a uniform `resolution³` grid spanning
/// `[0, 2π]` (endpoints included) in each angle.
pub fn solution_set_sweep(resolution: usize) -> Result<Vec<SweepPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter("sweep resolution must be at least 2".into()));
    }
    let step = 2.0 * std::f64::consts::PI / (resolution - 1) as f64;
    let grid: Vec<f64> = (0..resolution).map(|k| k as f64 * step).collect();
    let mut out = Vec::with_capacity(resolution.pow(3));
    for &theta in &grid {
        for &phi1 in &grid {
            for &phi2 in &grid {
                let angles = QubitEnvAngles { theta, phi1, phi2 };
                let eps = angles.epsilon();
                out.push(SweepPoint { angles, eps, tetra: eps.to_tetra() });
            }
        }
    }
    Ok(out)
}

/// Outcome of [`qubit_membership`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    /// Residual within tolerance: the angles are a certificate.
    pub member: bool,
    pub angles: QubitEnvAngles<f64>,
    /// Euclidean distance in weight space from the best family point.
    pub residual: f64,
}

/// Searches the angle family for a point with the given weights.
/// `member = true` is verifiable by re-evaluating the returned angles;
/// `false` only says the search did not find one within budget.
pub fn qubit_membership(e: &GeneralizedDepolarizing<f64>, tol: f64, cfg: &SearchConfig) -> Result<Membership> {
    cfg.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let target = e.eps;
    let sq_dist = |a: &[f64]| {
        let got = QubitEnvAngles { theta: a[0], phi1: a[1], phi2: a[2] }.epsilon().eps;
        got.iter().zip(&target).map(|(g, t)| (g - t).powi(2)).sum::<f64>()
    };
    let nm = cfg.optimizer();
    let mut best: Option<(f64, [f64; 3])> = None;
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(task_seed(cfg.seed, restart as u64));
        let x0: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI)).collect();
        let m = nm.minimize(sq_dist, &x0);
        if best.map_or(true, |(v, _)| m.value < v) {
            best = Some((m.value, [m.x[0], m.x[1], m.x[2]]));
        }
        if cfg.stop_on_success && m.value.sqrt() <= tol {
            break;
        }
    }
    let (value, x) = best.expect("at least one restart");
    let residual = value.sqrt();
    Ok(Membership { member: residual <= tol, angles: QubitEnvAngles::wrapped(x[0], x[1], x[2]), residual })
}
