//! Property battery across the gauge, regulated, measure, and calculus
//! layers. Strategies draw small random instances; the assertions are
//! the module invariants, not pinned values.

use num_complex::Complex;
use proptest::prelude::*;

use gauge_spectral::calculus::{apply_calculus, direct_apply, hk_sum, integrate_step, operator_norm};
use gauge_spectral::cauchy::{semigroup_apply, SemigroupModel};
use gauge_spectral::gauge::{build_fine_partition, build_fine_partition_stepped, is_fine, Gauge};
use gauge_spectral::interval::{Cell, Interval};
use gauge_spectral::matrix::Matrix;
use gauge_spectral::regulated::{RegulatedFn, StepFn};
use gauge_spectral::spectral::{
    default_cluster_tol, grid_model, jacobi_eigh, pvm_from_eigensystem, SpectralMeasure,
};

fn k_unit() -> Interval<f64> {
    Interval::new(-1.0, 1.0).unwrap()
}

fn cx() -> impl Strategy<Value = Complex<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex::new(re, im))
}

/// Step function on [-1, 1] from sorted interior cuts and cell values.
fn step_fn() -> impl Strategy<Value = StepFn<f64>> {
    (
        proptest::collection::vec(-0.99f64..0.99, 0..6),
        proptest::collection::vec(cx(), 7),
    )
        .prop_map(|(mut cuts, values)| {
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup();
            let k = k_unit();
            let mut cells = Vec::new();
            let mut lo = k.a;
            for &c in &cuts {
                cells.push(Cell::half_open(lo, c).unwrap());
                lo = c;
            }
            cells.push(Cell::new(lo, k.b, true, true).unwrap());
            let values = values[..cells.len()].to_vec();
            StepFn::new(k, cells, values).unwrap()
        })
}

/// Symmetric matrix with Gershgorin spectrum inside (-0.5, 0.5).
fn symmetric(n: usize) -> impl Strategy<Value = Matrix<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |entries| {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = entries[i * n + j] / (2.0 * n as f64);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    })
}

fn pvm_of(m: &Matrix<f64>) -> SpectralMeasure<f64> {
    let es = jacobi_eigh(m, 1e-14).unwrap();
    let tol = default_cluster_tol(&es);
    pvm_from_eigensystem(&es, tol)
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<Complex<f64>>> {
    proptest::collection::vec(cx(), n)
}

fn vnorm(v: &[Complex<f64>]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fine_partitions_exist_for_sine_gauges(
        base in 0.01f64..0.1,
        rel in 0.1f64..0.9,
        freq in 1.0f64..25.0,
        exceptional in proptest::collection::vec(-0.95f64..0.95, 0..4),
    ) {
        let gauge = Gauge::from_fn(move |t: f64| base * (1.0 + rel * (freq * t).sin()) / 2.0);
        let p = build_fine_partition(k_unit(), &gauge, &exceptional).unwrap();
        prop_assert!(is_fine(&p, &gauge));
        // Every requested exceptional point is some cell's tag.
        for &x in &exceptional {
            prop_assert!(p.items().iter().any(|item| item.tag == x));
        }
    }

    #[test]
    fn partition_tiles_are_disjoint_and_cover(
        base in 0.02f64..0.2,
    ) {
        let gauge = Gauge::constant(base).unwrap();
        let p = build_fine_partition(k_unit(), &gauge, &[]).unwrap();
        // Chained cells: consecutive closures abut, endpoints hit K.
        let items = p.items();
        prop_assert_eq!(items[0].cell.lo, -1.0);
        prop_assert_eq!(items[items.len() - 1].cell.hi, 1.0);
        for w in items.windows(2) {
            prop_assert_eq!(w[0].cell.hi, w[1].cell.lo);
            prop_assert!(w[0].cell.hi_closed != w[1].cell.lo_closed);
        }
    }

    #[test]
    fn step_algebra_is_pointwise(
        f in step_fn(),
        g in step_fn(),
        xs in proptest::collection::vec(-1.0f64..1.0, 8),
        alpha in cx(),
    ) {
        let rf = RegulatedFn::Step(f);
        let rg = RegulatedFn::Step(g);
        let sum = rf.add(&rg).unwrap();
        let prod = rf.mul(&rg).unwrap();
        let scaled = rf.scale(alpha);
        for &x in &xs {
            let (a, b) = (rf.eval(x).unwrap(), rg.eval(x).unwrap());
            prop_assert!((sum.eval(x).unwrap() - (a + b)).norm() <= 1e-14);
            prop_assert!((prod.eval(x).unwrap() - a * b).norm() <= 1e-14);
            prop_assert!((scaled.eval(x).unwrap() - alpha * a).norm() <= 1e-14);
        }
    }

    #[test]
    fn step_approximation_meets_any_budget(
        freq in 1.0f64..12.0,
        phase in 0.0f64..6.0,
        eps_exp in 1u32..4,
    ) {
        let eps = (0.1f64).powi(eps_exp as i32);
        let f = RegulatedFn::continuous_re(k_unit(), move |x: f64| (freq * x + phase).sin())
            .unwrap();
        let s = f.approximate_by_steps(eps).unwrap();
        let gap = f.sup_norm_gap(&RegulatedFn::Step(s), 512).unwrap();
        prop_assert!(gap <= eps, "gap {} above eps {}", gap, eps);
    }

    #[test]
    fn scalar_measure_respects_cauchy_schwarz(
        a in symmetric(5),
        x in cvec(5),
        y in cvec(5),
    ) {
        let e = pvm_of(&a);
        let mu = e.scalar_measure(&x, &y).unwrap();
        prop_assert!(mu.total_variation() <= vnorm(&x) * vnorm(&y) + 1e-12);
    }

    #[test]
    fn measure_is_additive_over_splits(
        a in symmetric(4),
        x in cvec(4),
        y in cvec(4),
        cut in -0.9f64..0.9,
    ) {
        let e = pvm_of(&a);
        let mu = e.scalar_measure(&x, &y).unwrap();
        let left = mu.mass_of_cell(&Cell::half_open(-1.0, cut).unwrap());
        let right = mu.mass_of_cell(&Cell::new(cut, 1.0, true, true).unwrap());
        prop_assert!((left + right - mu.total_mass()).norm() <= 1e-13);
    }

    #[test]
    fn hk_sum_is_linear_in_the_integrand(
        f in step_fn(),
        g in step_fn(),
        a in symmetric(4),
        x in cvec(4),
        y in cvec(4),
        alpha in cx(),
    ) {
        let e = pvm_of(&a);
        let mu = e.scalar_measure(&x, &y).unwrap();
        let rf = RegulatedFn::Step(f.clone());
        let rg = RegulatedFn::Step(g.clone());
        let combo = rf.scale(alpha).add(&rg).unwrap();
        let i_f = integrate_step(&f, &mu).value;
        let i_g = integrate_step(&g, &mu).value;
        let i_combo = match combo {
            RegulatedFn::Step(s) => integrate_step(&s, &mu).value,
            _ => unreachable!("step algebra stays step"),
        };
        prop_assert!((i_combo - (alpha * i_f + i_g)).norm() <= 1e-12);
    }

    #[test]
    fn riemann_sums_match_the_exact_step_integral(
        f in step_fn(),
        a in symmetric(4),
        x in cvec(4),
        y in cvec(4),
        factor in 0.5f64..0.9,
    ) {
        let e = pvm_of(&a);
        let mu = e.scalar_measure(&x, &y).unwrap();
        let exact = integrate_step(&f, &mu).value;
        let gauge = gauge_spectral::gauge::canonical_step_gauge(&f);
        let mut exceptional = f.boundary_points();
        exceptional.extend(e.spectrum_points());
        let rf = RegulatedFn::Step(f);
        let p = build_fine_partition_stepped(k_unit(), &gauge, &exceptional, |_| factor)
            .unwrap();
        let got = hk_sum(&rf, &mu, &p).unwrap();
        prop_assert!((got - exact).norm() <= 1e-12);
    }

    #[test]
    fn calculus_agrees_with_the_projector_sum(
        a in symmetric(3),
        f in step_fn(),
    ) {
        let e = pvm_of(&a);
        let rf = RegulatedFn::Step(f);
        let via_hk = apply_calculus(&rf, &e, 1e-6).unwrap();
        let direct = direct_apply(&rf, &e).unwrap();
        let gap = operator_norm(&(&via_hk - &direct), None).unwrap();
        prop_assert!(gap <= 1e-9);
    }

    #[test]
    fn semigroup_law_on_grid_models(
        t in 0.0f64..2.0,
        r in 0.0f64..2.0,
        psi in cvec(8),
    ) {
        let g = RegulatedFn::continuous_re(Interval::new(0.0, 1.0).unwrap(), |x: f64| {
            (2.0 * x).cos() - 0.5
        })
        .unwrap();
        let s = SemigroupModel::new(g, grid_model(0.0, 1.0, 8).unwrap(), vec![]).unwrap();
        let once = semigroup_apply(&s, t + r, &psi).unwrap();
        let twice = semigroup_apply(&s, t, &semigroup_apply(&s, r, &psi).unwrap()).unwrap();
        let gap: f64 = once
            .iter()
            .zip(&twice)
            .map(|(p, q)| (p - q).norm_sqr())
            .sum::<f64>()
            .sqrt();
        prop_assert!(gap <= 1e-12 * (1.0 + vnorm(&psi)));
    }
}
