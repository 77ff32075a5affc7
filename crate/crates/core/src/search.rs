//! Numerical searches for small environments.
//!
//! A successful search is a certificate: the returned parameters rebuild a
//! dilation whose channel matches the target. A failed search is only
//! evidence that no dilation of that size exists; the optimizer may simply
//! have missed it.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChoiMatrix, QuantumChannel};
use crate::dilation::{DilationModel, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::optim::NelderMead;

/// Base seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5EED_2001;

/// Restarts evaluated together before checking for an early stop. Fixed so
/// results do not depend on the thread count.
const RESTART_BATCH: usize = 8;

/// Smallest squared Choi distance found between the two-Pauli channel and
/// any qubit-environment dilation, per value of `x`, over a 2000-restart
/// calibration run (`cargo test --release -p qenv --test calibration -- --ignored`).
pub const TWO_PAULI_QUBIT_FLOOR: [(f64, f64); 3] = [(0.1, 4.938573e-3), (0.5, 1.096784e-2), (0.9, 9.564537e-6)];

/// Smallest value of [`two_pauli_poly_residual`] found over a 2000-restart
/// calibration run.
pub const POLY_SYSTEM_FLOOR: f64 = 2.706380e-1;

/// Calibrated qubit floor for a two-Pauli parameter, if one was recorded.
pub fn two_pauli_qubit_floor(x: f64) -> Option<f64> {
    TWO_PAULI_QUBIT_FLOOR.iter().find(|(px, _)| (px - x).abs() < 1e-12).map(|&(_, f)| f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_evals_per_restart: usize,
    pub success_tol: f64,
    pub seed: u64,
    /// Stop after the first batch of restarts that contains a success.
    #[serde(default = "default_true")]
    pub stop_on_success: bool,
}

fn default_true() -> bool {
    true
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 200, max_evals_per_restart: 20_000, success_tol: 1e-8, seed: DEFAULT_SEED, stop_on_success: true }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_evals_per_restart == 0 {
            return Err(Error::InvalidParameter("restarts and evaluation budget must be positive".into()));
        }
        if !(self.success_tol > 0.0) {
            return Err(Error::InvalidParameter("success tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn optimizer(&self) -> NelderMead {
        NelderMead { max_evals: self.max_evals_per_restart, ..NelderMead::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_residual: f64,
    pub best_unitary_params: Vec<f64>,
    pub best_spectrum: Vec<f64>,
    pub success: bool,
    pub evals_used: usize,
    pub per_restart_residuals: Vec<f64>,
}

/// Deterministic per-task seed (splitmix64 of the base seed and index).
pub fn task_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One local run: index, best point, best value, evaluations.
struct RestartOutcome {
    index: usize,
    x: Vec<f64>,
    value: f64,
    evals: usize,
}

/// Runs `restarts` local minimizations from `start(seed)` in fixed-size
/// batches; reduction is by minimum value with lowest index on ties.
fn multistart<S, F>(cfg: &SearchConfig, start: S, objective: F, stop: impl Fn(f64) -> bool) -> Vec<RestartOutcome>
where
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let nm = cfg.optimizer();
    let mut outcomes = Vec::with_capacity(cfg.restarts);
    let mut next = 0;
    while next < cfg.restarts {
        let end = (next + RESTART_BATCH).min(cfg.restarts);
        let batch: Vec<RestartOutcome> = (next..end)
            .into_par_iter()
            .map(|index| {
                let mut rng = ChaCha8Rng::seed_from_u64(task_seed(cfg.seed, index as u64));
                let x0 = start(&mut rng);
                let m = nm.minimize(&objective, &x0);
                RestartOutcome { index, x: m.x, value: m.value, evals: m.evals }
            })
            .collect();
        let hit = batch.iter().any(|o| stop(o.value));
        outcomes.extend(batch);
        next = end;
        if hit {
            break;
        }
    }
    outcomes
}

fn best_of(outcomes: &[RestartOutcome]) -> &RestartOutcome {
    outcomes
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.index.cmp(&b.index)))
        .expect("at least one restart")
}

/// Maps `d − 1` free reals to a descending probability vector through a
/// normalized exponential with the first logit pinned to zero.
pub fn spectrum_from_params(params: &[f64]) -> Vec<f64> {
    let mut spectrum: Vec<f64> = std::iter::once(0.0).chain(params.iter().copied()).collect();
    let top = spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    spectrum.iter_mut().for_each(|l| *l = (*l - top).exp());
    let total: f64 = spectrum.iter().sum();
    spectrum.iter_mut().for_each(|w| *w /= total);
    spectrum.sort_by(|a, b| b.total_cmp(a));
    spectrum
}

/// Squared Choi distance between a target and the channel of a dilation
/// with environment dimension `d`, as a function of `(nd)²` generator
/// entries followed by `d − 1` spectrum coordinates.
#[derive(Clone, Debug)]
pub struct DilationObjective {
    target: ChoiMatrix<f64>,
    env_dim: usize,
}

impl DilationObjective {
    pub fn new(target: ChoiMatrix<f64>, env_dim: usize) -> Result<Self> {
        let (n, m) = (target.in_dim(), target.out_dim());
        if env_dim == 0 || (n * env_dim) % m != 0 {
            return Err(Error::Indivisible { n, m, d: env_dim });
        }
        Ok(Self { target, env_dim })
    }

    pub fn joint_dim(&self) -> usize {
        self.target.in_dim() * self.env_dim
    }

    pub fn param_len(&self) -> usize {
        self.joint_dim().pow(2) + self.env_dim - 1
    }

    pub fn model(&self, params: &[f64]) -> Result<DilationModel<f64>> {
        if params.len() != self.param_len() {
            return Err(Error::GeneratorLength { expected: self.param_len(), got: params.len() });
        }
        let g = self.joint_dim().pow(2);
        let u = ComplexMatrix::unitary_from_generator(&params[..g], self.joint_dim())?;
        let env = EnvironmentSpec::new(spectrum_from_params(&params[g..]))?;
        DilationModel::new(self.target.in_dim(), self.target.out_dim(), env, u)
    }

    pub fn evaluate(&self, params: &[f64]) -> Result<f64> {
        if params.len() != self.param_len() {
            return Err(Error::GeneratorLength { expected: self.param_len(), got: params.len() });
        }
        let g = self.joint_dim().pow(2);
        let u = ComplexMatrix::unitary_from_generator(&params[..g], self.joint_dim())?;
        let spectrum = spectrum_from_params(&params[g..]);
        Ok(self.squared_distance(&u, &spectrum))
    }

    /// Objective value for an explicit joint unitary and environment
    /// spectrum (any order), bypassing the generator parameterization.
    pub fn evaluate_unitary(&self, u: &ComplexMatrix<f64>, spectrum: &[f64]) -> Result<f64> {
        let nd = self.joint_dim();
        if u.shape() != (nd, nd) || spectrum.len() != self.env_dim {
            return Err(Error::DimensionMismatch(format!(
                "expected a {nd}x{nd} unitary and {} eigenvalues",
                self.env_dim
            )));
        }
        Ok(self.squared_distance(u, spectrum))
    }

    /// Squared distance from the target to the channel of `u` on an
    /// environment with the given spectrum, without building the model.
    /// Both Choi matrices are Hermitian, so only the upper triangle is formed.
    fn squared_distance(&self, u: &ComplexMatrix<f64>, spectrum: &[f64]) -> f64 {
        let (n, m, d) = (self.target.in_dim(), self.target.out_dim(), self.env_dim);
        let k_dim = n * d / m;
        let side = n * m;
        let u = u.as_slice();
        let cols = n * d;
        let mut upper = vec![Complex::new(0.0, 0.0); side * side];
        let mut vec = vec![Complex::new(0.0, 0.0); side];
        for (j, &lambda) in spectrum.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            for k in 0..k_dim {
                for i in 0..n {
                    for a in 0..m {
                        vec[i * m + a] = u[(a * k_dim + k) * cols + i * d + j];
                    }
                }
                for p in 0..side {
                    let vp = vec[p] * lambda;
                    for q in p..side {
                        upper[p * side + q] += vp * vec[q].conj();
                    }
                }
            }
        }
        let target = self.target.matrix().as_slice();
        let mut sq = 0.0;
        for p in 0..side {
            sq += (upper[p * side + p] - target[p * side + p]).norm_sqr();
            for q in (p + 1)..side {
                sq += 2.0 * (upper[p * side + q] - target[p * side + q]).norm_sqr();
            }
        }
        sq / (n * n) as f64
    }
}

/// Free-function form of [`DilationObjective::evaluate`].
pub fn dilation_objective(target: &ChoiMatrix<f64>, d: usize, params: &[f64]) -> Result<f64> {
    DilationObjective::new(target.clone(), d)?.evaluate(params)
}

/// Multistart search for a dilation with a `d`-dimensional (mixed)
/// environment reproducing `target`.
pub fn search_environment(target: &QuantumChannel<f64>, d: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let objective = DilationObjective::new(target.choi(), d)?;
    let g = objective.joint_dim().pow(2);
    let len = objective.param_len();
    let start = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..len)
            .map(|i| if i < g { rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI) } else { rng.gen_range(-1.0..1.0) })
            .collect()
    };
    let f = |x: &[f64]| objective.evaluate(x).unwrap_or(f64::INFINITY);
    let tol = cfg.success_tol;
    let outcomes = multistart(cfg, start, f, |v| cfg.stop_on_success && v <= tol);
    let best = best_of(&outcomes);
    Ok(SearchResult {
        best_residual: best.value,
        best_unitary_params: best.x[..g].to_vec(),
        best_spectrum: spectrum_from_params(&best.x[g..]),
        success: best.value <= tol,
        evals_used: outcomes.iter().map(|o| o.evals).sum(),
        per_restart_residuals: outcomes.iter().map(|o| o.value).collect(),
    })
}

/// Rebuilds the dilation a search result describes.
pub fn rebuild_dilation(target: &QuantumChannel<f64>, result: &SearchResult) -> Result<DilationModel<f64>> {
    let d = result.best_spectrum.len();
    let n = target.in_dim();
    let u = ComplexMatrix::unitary_from_generator(&result.best_unitary_params, n * d)?;
    DilationModel::new(n, target.out_dim(), EnvironmentSpec::new(result.best_spectrum.clone())?, u)
}

/// Smallest `d ≤ d_max` whose search succeeds, or `d_max + 1` if none do.
/// Dimensions incompatible with the output dimension are skipped.
pub fn minimal_env_dimension(
    target: &QuantumChannel<f64>,
    d_max: usize,
    cfg: &SearchConfig,
) -> Result<(usize, Vec<SearchResult>)> {
    let (n, m) = (target.in_dim(), target.out_dim());
    let mut results = Vec::new();
    for d in 1..=d_max {
        if (n * d) % m != 0 {
            continue;
        }
        let r = search_environment(target, d, cfg)?;
        let ok = r.success;
        results.push(r);
        if ok {
            return Ok((d, results));
        }
    }
    Ok((d_max + 1, results))
}

/// Random channel from a Haar unitary on `n·m²` dimensions acting on a
/// pure `m²`-dimensional environment; carries `n·m` Kraus operators.
pub fn sample_random_channel(n: usize, m: usize, seed: u64) -> Result<QuantumChannel<f64>> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    let d = m * m;
    let u = ComplexMatrix::haar_random_unitary(n * d, seed);
    let model = DilationModel::new(n, m, EnvironmentSpec::pure(d), u)?;
    let blocks = model.induced_channel();
    QuantumChannel::new(n, m, blocks.blocks()[0].clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub seed: u64,
    pub success: bool,
    pub best_residual: f64,
    pub restarts_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionReport {
    pub env_dim: usize,
    pub count: usize,
    pub fraction: f64,
    pub samples: Vec<SampleOutcome>,
}

/// Fraction of Haar-sampled qubit channels reproduced by a `d`-dimensional
/// mixed environment. Sample `i` uses `task_seed(cfg.seed, i)` for the
/// channel and the same value as the search seed.
pub fn sampling_experiment(count: usize, env_dim: usize, cfg: &SearchConfig) -> Result<FractionReport> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let mut samples = Vec::with_capacity(count);
    for i in 0..count {
        let seed = task_seed(cfg.seed, i as u64);
        let ch = sample_random_channel(2, 2, seed)?;
        let r = search_environment(&ch, env_dim, &SearchConfig { seed, ..cfg.clone() })?;
        samples.push(SampleOutcome {
            seed,
            success: r.success,
            best_residual: r.best_residual,
            restarts_used: r.per_restart_residuals.len(),
        });
    }
    let hits = samples.iter().filter(|s| s.success).count();
    Ok(FractionReport { env_dim, count, fraction: hits as f64 / count as f64, samples })
}

/// [`sampling_experiment`] with a qubit environment.
pub fn qubit_fraction_experiment(count: usize, cfg: &SearchConfig) -> Result<FractionReport> {
    sampling_experiment(count, 2, cfg)
}

/// 24 reals packing the complex coefficients `a_0..a_3`, `b_0..b_3`,
/// `c_0..c_3` as consecutive `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystemPoint {
    pub coords: [f64; 24],
}

impl PolySystemPoint {
    pub fn new(coords: [f64; 24]) -> Result<Self> {
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("coordinates must be finite".into()));
        }
        Ok(Self { coords })
    }

    pub fn from_coefficients(a: [Complex<f64>; 4], b: [Complex<f64>; 4], c: [Complex<f64>; 4]) -> Self {
        let mut coords = [0.0; 24];
        for (slot, z) in a.iter().chain(&b).chain(&c).enumerate() {
            coords[2 * slot] = z.re;
            coords[2 * slot + 1] = z.im;
        }
        Self { coords }
    }

    fn coefficient(&self, slot: usize) -> Complex<f64> {
        Complex::new(self.coords[2 * slot], self.coords[2 * slot + 1])
    }

    pub fn a(&self, k: usize) -> Complex<f64> {
        self.coefficient(k)
    }

    pub fn b(&self, k: usize) -> Complex<f64> {
        self.coefficient(4 + k)
    }

    pub fn c(&self, k: usize) -> Complex<f64> {
        self.coefficient(8 + k)
    }
}

type Ket2 = [Complex<f64>; 2];

/// `⟨x|y⟩`, conjugate-linear in the left slot.
fn braket(x: &Ket2, y: &Ket2) -> Complex<f64> {
    x[0].conj() * y[0] + x[1].conj() * y[1]
}

/// The eleven complex constraints a qubit-environment dilation of the
/// two-Pauli channel would have to satisfy.
pub fn two_pauli_constraints(p: &PolySystemPoint) -> [Complex<f64>; 11] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u = |k: usize| -> Ket2 { [(p.a(k) + p.c(k)) * s, (p.a(k + 1) + p.c(k + 1)) * s] };
    let w = |k: usize| -> Ket2 { [(p.c(k) - p.a(k)) * s, (p.c(k + 1) - p.a(k + 1)) * s] };
    let v = |k: usize| -> Ket2 { [p.b(k), p.b(k + 1)] };
    let (u0, u1, w0, w1, v0, v1) = (u(0), u(2), w(0), w(2), v(0), v(2));
    let one = Complex::new(1.0, 0.0);
    [
        braket(&v0, &w0) + braket(&u0, &v0),
        braket(&v1, &w1) + braket(&u1, &v1),
        braket(&v0, &w1) + braket(&u0, &v1),
        braket(&w0, &v1) + braket(&v0, &u1),
        braket(&u0, &u0) - braket(&w0, &w0),
        braket(&u1, &u1) - braket(&w1, &w1),
        braket(&u0, &u0) + braket(&u1, &u1) - one,
        braket(&v0, &v0) + braket(&v1, &v1) - one,
        braket(&u0, &v0) + braket(&u1, &v1),
        braket(&u0, &w0) + braket(&u1, &w1),
        braket(&u0, &u1) - braket(&w0, &w1),
    ]
}

/// `Σ_j |g_j|²` over the eleven constraints. Zero exactly at a solution.
pub fn two_pauli_poly_residual(p: &PolySystemPoint) -> f64 {
    two_pauli_constraints(p).iter().map(|g| g.norm_sqr()).sum()
}

/// Multistart minimization of [`two_pauli_poly_residual`].
///
/// `success` here reports that the evidence held: every restart stayed
/// above `cfg.success_tol`. `best_unitary_params` carries the 24
/// coordinates of the best point; `best_spectrum` is empty.
pub fn two_pauli_infeasibility(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let start = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let f = |x: &[f64]| {
        let mut coords = [0.0; 24];
        coords.copy_from_slice(x);
        two_pauli_poly_residual(&PolySystemPoint { coords })
    };
    let outcomes = multistart(cfg, start, f, |_| false);
    let best = best_of(&outcomes);
    Ok(SearchResult {
        best_residual: best.value,
        best_unitary_params: best.x.clone(),
        best_spectrum: Vec::new(),
        success: best.value > cfg.success_tol,
        evals_used: outcomes.iter().map(|o| o.evals).sum(),
        per_restart_residuals: outcomes.iter().map(|o| o.value).collect(),
    })
}
