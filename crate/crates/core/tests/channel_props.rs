use proptest::prelude::*;
use qenv::{CMatrix, Channel, C64};

/// Channel with `count` Kraus operators (at least `⌈n/m⌉`) read off the
/// first `n` columns of a Haar unitary on `m * count` dimensions.
fn random_channel(n: usize, m: usize, count: usize, seed: u64) -> Channel {
    let count = count.max(n.div_ceil(m));
    let u = CMatrix::haar_random_unitary(m * count, seed);
    let kraus = (0..count).map(|k| CMatrix::from_fn(m, n, |a, i| u[(a * count + k, i)])).collect();
    Channel::new(n, m, kraus).unwrap()
}

fn random_state(n: usize, seed: u64) -> CMatrix {
    let g = CMatrix::haar_random_unitary(n, seed ^ 0xDEAD);
    let weights: Vec<f64> = (0..n).map(|i| 1.0 + ((seed as f64) * 0.37 + i as f64).sin()).collect();
    let total: f64 = weights.iter().sum();
    let d = CMatrix::from_real_diagonal(&weights.iter().map(|w| w / total).collect::<Vec<_>>());
    g.matmul(&d).matmul(&g.adjoint())
}

/// `Σ_ij E_ij ⊗ χ(E_ij)` assembled from the channel's action alone.
fn choi_oracle(ch: &Channel) -> CMatrix {
    let (n, m) = (ch.in_dim(), ch.out_dim());
    let mut j = CMatrix::zeros(n * m, n * m);
    for a in 0..n {
        for b in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(a, b)] = C64::new(1.0, 0.0);
            let out = ch.apply(&e).unwrap();
            for x in 0..m {
                for y in 0..m {
                    j[(a * m + x, b * m + y)] = out[(x, y)];
                }
            }
        }
    }
    j
}

fn shapes() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..4, 1usize..4, 1usize..5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trace_is_preserved((n, m, count, seed) in shapes()) {
        let ch = random_channel(n, m, count, seed);
        prop_assert!(ch.is_trace_preserving(1e-12));
        for s in 0..100u64 {
            let a = CMatrix::haar_random_unitary(n, seed.wrapping_add(s));
            let h = &a + &a.adjoint();
            prop_assert!((ch.apply(&h).unwrap().trace() - h.trace()).norm() < 1e-10);
        }
    }

    #[test]
    fn choi_matches_action((n, m, count, seed) in shapes()) {
        let ch = random_channel(n, m, count, seed);
        let choi = ch.choi();
        prop_assert!(choi.matrix().max_abs_diff(&choi_oracle(&ch)) < 1e-13);
        prop_assert!(choi.is_completely_positive(1e-12));
        prop_assert!((choi.matrix().trace().re - n as f64).abs() < 1e-12);
    }

    #[test]
    fn kraus_from_choi_round_trip((n, m, count, seed) in shapes()) {
        let ch = random_channel(n, m, count, seed);
        let back = ch.choi().to_kraus(1e-12).unwrap();
        prop_assert!(back.choi().matrix().max_abs_diff(ch.choi().matrix()) < 1e-9);
        prop_assert!(back.kraus().len() <= ch.kraus().len().min(n * m));
    }

    #[test]
    fn mixing_keeps_rank((n, m, count, seed) in shapes()) {
        let ch = random_channel(n, m, count, seed);
        let rank = ch.kraus_rank(1e-9);
        let count = ch.kraus().len();
        for s in 0..20u64 {
            let u = CMatrix::haar_random_unitary(count, seed.wrapping_mul(31).wrapping_add(s));
            let mixed = ch.mix_kraus(&u).unwrap();
            prop_assert_eq!(mixed.kraus_rank(1e-9), rank);
            prop_assert!(mixed.distance(&ch).unwrap() < 1e-12);
        }
    }
}

#[test]
fn zero_distance_means_same_action() {
    for seed in 0..10u64 {
        let ch = random_channel(2, 2, 3, seed);
        let u = CMatrix::haar_random_unitary(3, seed + 100);
        let other = ch.mix_kraus(&u).unwrap();
        assert!(ch.distance(&other).unwrap() < 1e-12);
        for s in 0..20u64 {
            let rho = random_state(2, seed * 100 + s);
            assert!(ch.apply(&rho).unwrap().max_abs_diff(&other.apply(&rho).unwrap()) < 1e-9);
        }
    }
}

#[test]
fn distance_of_distinct_channels() {
    let id = Channel::identity(2);
    let flip = Channel::unitary(qenv::matrix::paulis::<f64>()[1].clone()).unwrap();
    // The two Choi matrices are orthogonal projector multiples of norm 2.
    let expect = (4.0f64 + 4.0).sqrt() / 2.0;
    assert!((id.distance(&flip).unwrap() - expect).abs() < 1e-15);
}
