use proptest::prelude::*;
use qenv::search::{
    dilation_objective, minimal_env_dimension, rebuild_dilation, search_environment, spectrum_from_params,
    two_pauli_constraints, two_pauli_poly_residual, DilationObjective, PolySystemPoint, SearchConfig,
};
use qenv::{CMatrix, Channel, Depolarizing, TwoPauliParam, C64};

fn random_channel(seed: u64) -> Channel {
    let u = CMatrix::haar_random_unitary(6, seed);
    let kraus = (0..3).map(|k| CMatrix::from_fn(2, 2, |a, i| u[(a * 3 + k, i)])).collect();
    Channel::new(2, 2, kraus).unwrap()
}

fn params(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

/// `‖J(model) − J(target)‖²_F / n²` through the full model.
fn distance_oracle(target: &Channel, d: usize, x: &[f64]) -> f64 {
    let obj = DilationObjective::new(target.choi(), d).unwrap();
    let ch = obj.model(x).unwrap().induced_channel().to_channel_unvalidated().unwrap();
    let n = target.in_dim() as f64;
    let diff = ch.choi().matrix() - target.choi().matrix();
    diff.frobenius_norm().powi(2) / (n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_is_squared_channel_distance(x in params(17), seed in any::<u64>()) {
        let target = random_channel(seed);
        let got = dilation_objective(&target.choi(), 2, &x).unwrap();
        let expect = distance_oracle(&target, 2, &x);
        prop_assert!((got - expect).abs() <= 1e-12 * expect.max(1.0), "{got} vs {expect}");
        let model = DilationObjective::new(target.choi(), 2).unwrap().model(&x).unwrap();
        let direct = model.induced_channel().to_channel_unvalidated().unwrap().distance(&target).unwrap();
        prop_assert!((direct * direct - got).abs() < 1e-12);
    }

    /// Rotating the discarded factor after the interaction, rephasing the
    /// environment basis before it, or a global phase leave the channel alone.
    #[test]
    fn objective_ignores_gauge_freedom(x in params(17), seed in any::<u64>(), alpha in 0.0..6.3f64) {
        let target = random_channel(seed);
        let obj = DilationObjective::new(target.choi(), 2).unwrap();
        let u = CMatrix::unitary_from_generator(&x[..16], 4).unwrap();
        let spectrum = spectrum_from_params(&x[16..]);
        let base = obj.evaluate_unitary(&u, &spectrum).unwrap();

        let w = CMatrix::haar_random_unitary(2, seed ^ 0xA5);
        let rotated = CMatrix::identity(2).kron(&w).matmul(&u);
        prop_assert!((obj.evaluate_unitary(&rotated, &spectrum).unwrap() - base).abs() < 1e-10);

        let phases = CMatrix::from_diagonal(&[C64::from_polar(1.0, alpha), C64::from_polar(1.0, 2.0 * alpha + 1.0)]);
        let rephased = u.matmul(&CMatrix::identity(2).kron(&phases));
        prop_assert!((obj.evaluate_unitary(&rephased, &spectrum).unwrap() - base).abs() < 1e-12);

        let global = u.scale(C64::from_polar(1.0, alpha));
        prop_assert!((obj.evaluate_unitary(&global, &spectrum).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn poly_residual_matches_oracle(coords in prop::array::uniform24(-1.5f64..1.5)) {
        let p = PolySystemPoint::new(coords).unwrap();
        let got = two_pauli_poly_residual(&p);
        let expect = poly_oracle(&coords);
        prop_assert!((got - expect).abs() <= 1e-12 * expect.max(1.0));
    }

    #[test]
    fn poly_residual_is_phase_invariant(coords in prop::array::uniform24(-1.5f64..1.5), alpha in 0.0..6.3f64) {
        let p = PolySystemPoint::new(coords).unwrap();
        let phase = C64::from_polar(1.0, alpha);
        let rot = |f: &dyn Fn(usize) -> C64| std::array::from_fn(|k| f(k) * phase);
        let q = PolySystemPoint::from_coefficients(rot(&|k| p.a(k)), rot(&|k| p.b(k)), rot(&|k| p.c(k)));
        prop_assert!((two_pauli_poly_residual(&q) - two_pauli_poly_residual(&p)).abs() < 1e-12);
    }
}

/// The eleven constraints written out over the 24 real coordinates, with
/// `u = (a + c)/√2`, `w = (c − a)/√2` and `v = b` split into two-component
/// halves `(·0, ·1)` and `(·2, ·3)`.
fn poly_oracle(x: &[f64; 24]) -> f64 {
    let z = |slot: usize| (x[2 * slot], x[2 * slot + 1]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let add = |p: (f64, f64), q: (f64, f64), s: f64| ((p.0 + s * q.0) * h, (p.1 + s * q.1) * h);
    let u: Vec<(f64, f64)> = (0..4).map(|k| add(z(8 + k), z(k), 1.0)).collect();
    let w: Vec<(f64, f64)> = (0..4).map(|k| add(z(8 + k), z(k), -1.0)).collect();
    let v: Vec<(f64, f64)> = (0..4).map(|k| z(4 + k)).collect();
    // ⟨p|q⟩ for two-component kets starting at offsets i and j
    let ip = |p: &[(f64, f64)], i: usize, q: &[(f64, f64)], j: usize| {
        let mut re = 0.0;
        let mut im = 0.0;
        for t in 0..2 {
            let (a, b) = p[i + t];
            let (c, d) = q[j + t];
            re += a * c + b * d;
            im += a * d - b * c;
        }
        (re, im)
    };
    let sum = |p: (f64, f64), q: (f64, f64)| (p.0 + q.0, p.1 + q.1);
    let diff = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0, p.1 - q.1);
    let g = [
        sum(ip(&v, 0, &w, 0), ip(&u, 0, &v, 0)),
        sum(ip(&v, 2, &w, 2), ip(&u, 2, &v, 2)),
        sum(ip(&v, 0, &w, 2), ip(&u, 0, &v, 2)),
        sum(ip(&w, 0, &v, 2), ip(&v, 0, &u, 2)),
        diff(ip(&u, 0, &u, 0), ip(&w, 0, &w, 0)),
        diff(ip(&u, 2, &u, 2), ip(&w, 2, &w, 2)),
        diff(sum(ip(&u, 0, &u, 0), ip(&u, 2, &u, 2)), (1.0, 0.0)),
        diff(sum(ip(&v, 0, &v, 0), ip(&v, 2, &v, 2)), (1.0, 0.0)),
        sum(ip(&u, 0, &v, 0), ip(&u, 2, &v, 2)),
        sum(ip(&u, 0, &w, 0), ip(&u, 2, &w, 2)),
        diff(ip(&u, 0, &u, 2), ip(&w, 0, &w, 2)),
    ];
    g.iter().map(|(re, im)| re * re + im * im).sum()
}

#[test]
fn poly_residual_anchors() {
    let zero = PolySystemPoint::new([0.0; 24]).unwrap();
    assert_eq!(two_pauli_poly_residual(&zero), 2.0);

    let mut b0 = [0.0; 24];
    b0[8] = 1.0;
    assert!((two_pauli_poly_residual(&PolySystemPoint::new(b0).unwrap()) - 1.0).abs() < 1e-15);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u0 = [0.0; 24];
    u0[0] = s;
    u0[16] = s;
    let p = PolySystemPoint::new(u0).unwrap();
    assert!((two_pauli_poly_residual(&p) - 2.0).abs() < 1e-15);
    let g = two_pauli_constraints(&p);
    assert!((g[4].re - 1.0).abs() < 1e-15 && g[6].norm() < 1e-15 && (g[7].re + 1.0).abs() < 1e-15);
    assert!(PolySystemPoint::new([f64::NAN; 24]).is_err());
}

#[test]
fn certificates_rebuild() {
    let cfg = SearchConfig { restarts: 16, ..SearchConfig::default() };
    let target = Channel::identity(2);
    let r = search_environment(&target, 1, &cfg).unwrap();
    assert!(r.success && r.best_residual <= 1e-8);
    let model = rebuild_dilation(&target, &r).unwrap();
    let ch = model.induced_channel().to_channel().unwrap();
    let d = ch.distance(&target).unwrap();
    assert!((d * d - r.best_residual).abs() < 1e-12);

    let target = Depolarizing::new([0.25; 4]).unwrap().channel();
    let r = search_environment(&target, 2, &cfg).unwrap();
    assert!(r.success);
    let model = rebuild_dilation(&target, &r).unwrap();
    assert_eq!(model.env().dim(), 2);
    let d = model.induced_channel().to_channel().unwrap().distance(&target).unwrap();
    assert!((d * d - r.best_residual).abs() < 1e-12);
}

#[test]
fn minimal_dimensions() {
    let cfg = SearchConfig::default();
    let (d, results) = minimal_env_dimension(&Channel::identity(2), 3, &cfg).unwrap();
    assert_eq!((d, results.len()), (1, 1));

    let full = Depolarizing::new([0.25; 4]).unwrap().channel();
    let (d, results) = minimal_env_dimension(&full, 3, &SearchConfig { success_tol: 1e-10, ..cfg.clone() }).unwrap();
    assert_eq!(d, 2);
    assert!(!results[0].success && results[0].best_residual > 0.1);

    // preparing the maximally mixed qubit from a trivial input; odd d are skipped
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let basis = |a: usize| CMatrix::from_fn(2, 1, |r, _| C64::new(if r == a { h } else { 0.0 }, 0.0));
    let prep = Channel::new(1, 2, vec![basis(0), basis(1)]).unwrap();
    let (d, results) = minimal_env_dimension(&prep, 3, &cfg).unwrap();
    assert_eq!((d, results.len()), (2, 1));
}

#[test]
fn searches_are_deterministic() {
    let cfg = SearchConfig { restarts: 10, max_evals_per_restart: 2000, ..SearchConfig::default() };
    let target = TwoPauliParam::new(0.3).unwrap().channel();
    let a = search_environment(&target, 2, &cfg).unwrap();
    let b = search_environment(&target, 2, &cfg).unwrap();
    assert_eq!(a, b);
    let c = search_environment(&target, 2, &SearchConfig { seed: cfg.seed + 1, ..cfg }).unwrap();
    assert_ne!(a.per_restart_residuals, c.per_restart_residuals);
}

#[test]
fn search_rejects_bad_input() {
    let target = Channel::identity(2);
    assert!(search_environment(&target, 2, &SearchConfig { restarts: 0, ..SearchConfig::default() }).is_err());
    let narrow = Channel::new(2, 3, vec![CMatrix::from_fn(3, 2, |a, i| C64::new(if a == i { 1.0 } else { 0.0 }, 0.0))]).unwrap();
    assert!(search_environment(&narrow, 2, &SearchConfig::default()).is_err());
    assert!(dilation_objective(&target.choi(), 2, &[0.0; 3]).is_err());
}
