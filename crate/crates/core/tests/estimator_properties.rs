use proptest::prelude::*;

use usvt::checks::{key_lemma_case, key_lemma_holds};
use usvt::estimator::{usvt_estimate, EstimatorConfig, Interval, Mask, MaskedMatrix, SymmetryMode};
use usvt::generators::gen_low_rank;
use usvt::linalg::{singular_values, DenseMatrix};
use usvt::rng::RngSeed;

const ASYM: SymmetryMode = SymmetryMode::Asymmetric;

/// Values in [-1, 1] with a mask that is observed with probability ~0.7.
fn masked(max: usize) -> impl Strategy<Value = MaskedMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        (
            prop::collection::vec(-1.0f64..=1.0, r * c),
            prop::collection::vec(prop::bool::weighted(0.7), r * c),
        )
            .prop_map(move |(v, m)| {
                let mask = Mask::from_fn(r, c, |i, j| m[i * c + j]);
                MaskedMatrix::new(DenseMatrix::new(r, c, v).unwrap(), mask, ASYM).unwrap()
            })
    })
}

fn symmetric_masked(max: usize) -> impl Strategy<Value = MaskedMatrix> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0f64..=1.0, n * n),
            prop::collection::vec(prop::bool::weighted(0.6), n * n),
        )
            .prop_map(move |(v, m)| {
                let at = |i: usize, j: usize| (i.min(j), i.max(j));
                let values = DenseMatrix::from_fn(n, n, |i, j| {
                    let (a, b) = at(i, j);
                    v[a * n + b]
                });
                let mask = Mask::from_fn(n, n, |i, j| {
                    let (a, b) = at(i, j);
                    m[a * n + b]
                });
                MaskedMatrix::new(values, mask, SymmetryMode::Symmetric).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimate_stays_in_interval(data in masked(14), eta in 0.001f64..0.99) {
        let lo = -3.0;
        let hi = 5.0;
        let interval = Interval::new(lo, hi).unwrap();
        let mapped = data.map_values(|x| interval.denormalize(x)).unwrap();
        let cfg = EstimatorConfig::new(eta, ASYM).unwrap().with_interval(interval);
        let est = usvt_estimate(&mapped, &cfg).unwrap().estimate;
        prop_assert!(est.as_slice().iter().all(|&x| (lo..=hi).contains(&x)));
    }

    #[test]
    fn larger_eta_retains_no_more(data in masked(12), e1 in 0.0f64..0.99, e2 in 0.0f64..0.99) {
        let (small, large) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let r_small = usvt_estimate(&data, &EstimatorConfig::exploratory(small, ASYM).unwrap()).unwrap();
        let r_large = usvt_estimate(&data, &EstimatorConfig::exploratory(large, ASYM).unwrap()).unwrap();
        prop_assert!(r_large.retained_rank <= r_small.retained_rank);
        prop_assert!(r_large.threshold >= r_small.threshold);
    }

    #[test]
    fn transpose_equivariance(data in masked(12)) {
        let cfg = EstimatorConfig::new(0.01, ASYM).unwrap();
        let a = usvt_estimate(&data, &cfg).unwrap().estimate;
        let b = usvt_estimate(&data.transpose().unwrap(), &cfg).unwrap().estimate;
        prop_assert!(a.transpose().sub(&b).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn affine_equivariance(data in masked(12), a in -10.0f64..10.0, w in 0.1f64..20.0) {
        let from = Interval::new(a, a + w).unwrap();
        let to = Interval::new(-2.0 * a, -2.0 * a + 3.0 * w).unwrap();
        let x = data.map_values(|v| from.denormalize(v)).unwrap();
        let y = data.map_values(|v| to.denormalize(v)).unwrap();
        let ex = usvt_estimate(&x, &EstimatorConfig::new(0.05, ASYM).unwrap().with_interval(from)).unwrap().estimate;
        let ey = usvt_estimate(&y, &EstimatorConfig::new(0.05, ASYM).unwrap().with_interval(to)).unwrap().estimate;
        let mapped = ex.map(|v| to.denormalize(from.normalize(v)));
        prop_assert!(mapped.sub(&ey).unwrap().max_abs() <= 1e-10 * (1.0 + to.half_width()));
    }

    #[test]
    fn symmetric_mode_gives_symmetric_output(data in symmetric_masked(14)) {
        let cfg = EstimatorConfig::new(0.01, SymmetryMode::Symmetric).unwrap();
        let est = usvt_estimate(&data, &cfg).unwrap().estimate;
        prop_assert!(est.asymmetry() <= 1e-8);
    }

    #[test]
    fn key_lemma_random_pairs(seed in any::<u64>()) {
        let mut rng = RngSeed(seed).rng();
        let (a, b, delta) = key_lemma_case(&mut rng).unwrap();
        prop_assert!(key_lemma_holds(&a, &b, delta).unwrap());
    }
}

#[test]
fn strong_low_rank_is_retained_in_full() {
    for (r, seed) in [(1, 1), (2, 2), (3, 3)] {
        let m = gen_low_rank(120, 150, r, RngSeed(seed)).unwrap();
        let data = MaskedMatrix::fully_observed(m.clone(), ASYM).unwrap();
        let report = usvt_estimate(&data, &EstimatorConfig::new(0.01, ASYM).unwrap()).unwrap();
        let s = singular_values(&m).unwrap();
        if s[r - 1] > report.threshold {
            assert_eq!(report.retained_rank, r);
            assert!(report.estimate.sub(&m).unwrap().max_abs() < 1e-10);
        } else {
            assert!(report.retained_rank < r);
        }
    }
}

#[test]
fn rank_two_exact_recovery() {
    let n = 200;
    let m = DenseMatrix::from_fn(n, n, |i, j| {
        let u = if i % 2 == 0 { 1.0 } else { -1.0 };
        let v = if j % 5 < 2 { 1.0 } else { -1.0 };
        0.45 + 0.45 * u * v * (j as f64 / n as f64)
    });
    let data = MaskedMatrix::fully_observed(m.clone(), ASYM).unwrap();
    let report = usvt_estimate(&data, &EstimatorConfig::new(0.01, ASYM).unwrap()).unwrap();
    assert_eq!(report.retained_rank, 2);
    assert!(usvt::bounds::mse(&report.estimate, &m).unwrap() <= 1e-6);
}
