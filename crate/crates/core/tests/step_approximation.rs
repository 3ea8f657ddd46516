//! Uniform step-approximation battery: every regulated family the crate
//! ships must meet an explicit sup-norm budget, including functions with
//! jumps, removable points, and dense-in-the-limit atom sets.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gauge_spectral::interval::{Cell, Interval};
use gauge_spectral::regulated::{RegulatedFn, StepFn};

const BUDGETS: [f64; 3] = [0.1, 0.01, 0.001];

fn k01() -> Interval<f64> {
    Interval::new(0.0, 1.0).unwrap()
}

fn assert_budget(name: &str, f: &RegulatedFn<f64>, eps: f64) {
    let s = f.approximate_by_steps(eps).unwrap();
    let step = RegulatedFn::Step(s);
    let gap = f.sup_norm_gap(&step, 4096).unwrap();
    assert!(gap <= eps, "{name} at eps {eps}: sampled sup gap {gap}");
}

#[test]
fn heaviside_meets_all_budgets() {
    let f = RegulatedFn::heaviside(k01(), 0.5).unwrap();
    for eps in BUDGETS {
        assert_budget("heaviside", &f, eps);
    }
}

#[test]
fn sine_meets_all_budgets() {
    let f = RegulatedFn::continuous_re(k01(), |x: f64| (6.0 * x).sin()).unwrap();
    for eps in BUDGETS {
        assert_budget("sin", &f, eps);
    }
}

#[test]
fn square_meets_all_budgets() {
    let f = RegulatedFn::poly_re(k01(), &[0.0, 0.0, 1.0]).unwrap();
    for eps in BUDGETS {
        assert_budget("square", &f, eps);
    }
}

#[test]
fn thomae_truncations_meet_all_budgets() {
    let k = Interval::new(0.05, 0.95).unwrap();
    for level in 1..=8 {
        let f = RegulatedFn::thomae(k, level).unwrap();
        for eps in BUDGETS {
            assert_budget("thomae", &f, eps);
        }
    }
}

#[test]
fn random_piecewise_with_jumps_meets_all_budgets() {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let k = k01();
    for draw in 0..10 {
        // Random step skeleton carrying a few jump cells.
        let cut1 = rng.random_range(0.1..0.45);
        let cut2 = rng.random_range(0.55..0.9);
        let cells = vec![
            Cell::half_open(0.0, cut1).unwrap(),
            Cell::half_open(cut1, cut2).unwrap(),
            Cell::new(cut2, 1.0, true, true).unwrap(),
        ];
        let values = (0..3)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let base = RegulatedFn::Step(StepFn::new(k, cells, values).unwrap());
        // Smooth part riding on top of the jumps.
        let freq = rng.random_range(1.0..9.0);
        let smooth = RegulatedFn::continuous_re(k, move |x: f64| (freq * x).cos()).unwrap();
        let f = base.add(&smooth).unwrap();
        for eps in BUDGETS {
            assert_budget(&format!("piecewise draw {draw}"), &f, eps);
        }
    }
}

#[test]
fn approximation_cell_count_scales_inversely_with_eps() {
    let f = RegulatedFn::continuous_re(k01(), |x: f64| (6.0 * x).sin()).unwrap();
    let coarse = f.approximate_by_steps(0.1).unwrap().cells().len();
    let fine = f.approximate_by_steps(0.001).unwrap().cells().len();
    assert!(coarse < fine, "finer budgets need more cells: {coarse} vs {fine}");
    assert!(fine < 100_000, "cell count stays far below the global cap");
}

#[test]
fn budget_must_be_positive() {
    let f = RegulatedFn::heaviside(k01(), 0.5).unwrap();
    assert!(f.approximate_by_steps(0.0).is_err());
    assert!(f.approximate_by_steps(-0.1).is_err());
}
