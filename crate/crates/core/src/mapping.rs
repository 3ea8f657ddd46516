//! Point spectrum, the kernel/range identity, the spectral mapping
//! theorem for regulated functions, and essential ranges.
//!
//! Spectra of `f(A)` are reported as finite point sets at a stated
//! resolution. Exact closures of infinite sets (Thomae's `{1/q}` with
//! its accumulation at zero) are not finitely representable, so
//! accumulation is truncated and the truncation recorded in
//! `closure_note`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::matrix::Matrix;
use crate::regulated::RegulatedFn;
use crate::scalar::Real;
use crate::spectral::{default_cluster_tol, jacobi_eigh, SpectralMeasure};
use crate::util::linspace;

/// Finite approximation of a spectrum in the complex plane.
#[derive(Clone, Debug)]
pub struct SpectrumApprox<F: Real> {
    /// Deduplicated points (pairwise distance above `1e-10`).
    pub points: Vec<Complex<F>>,
    /// Sampling resolution behind the approximation; zero when the set
    /// was computed exactly.
    pub resolution: F,
    /// How accumulation was truncated, for human readers.
    pub closure_note: String,
}

fn dedup_tol<F: Real>() -> F {
    F::of(1e-10)
}

impl<F: Real> SpectrumApprox<F> {
    /// Sorts by real then imaginary part and drops points closer than
    /// the 1e-10 dedup tolerance to an earlier survivor.
    pub fn new(mut points: Vec<Complex<F>>, resolution: F, closure_note: String) -> Self {
        points.sort_by(|p, q| {
            p.re.partial_cmp(&q.re)
                .unwrap()
                .then(p.im.partial_cmp(&q.im).unwrap())
        });
        let mut kept: Vec<Complex<F>> = Vec::new();
        for p in points {
            if kept.iter().all(|q| (p - *q).norm() > dedup_tol()) {
                kept.push(p);
            }
        }
        SpectrumApprox {
            points: kept,
            resolution,
            closure_note,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `z` to the nearest point, infinity when empty.
    pub fn distance_to(&self, z: Complex<F>) -> F {
        self.points
            .iter()
            .map(|p| (*p - z).norm())
            .fold(F::infinity(), F::min)
    }

    /// `{ "points": [[re, im], ...], "resolution": r }`
    pub fn to_json(&self) -> String {
        let pts: Vec<[f64; 2]> = self
            .points
            .iter()
            .map(|p| [p.re.as_f64(), p.im.as_f64()])
            .collect();
        serde_json::json!({
            "points": pts,
            "resolution": self.resolution.as_f64(),
            "closure_note": self.closure_note,
        })
        .to_string()
    }
}

/// Hausdorff distance between two nonempty finite sets in the plane.
pub fn hausdorff_distance<F: Real>(
    s1: &SpectrumApprox<F>,
    s2: &SpectrumApprox<F>,
) -> Result<F> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Argument(
            "hausdorff distance needs two nonempty spectra".to_string(),
        ));
    }
    let directed = |from: &SpectrumApprox<F>, to: &SpectrumApprox<F>| {
        from.points
            .iter()
            .map(|p| to.distance_to(*p))
            .fold(F::zero(), F::max)
    };
    Ok(directed(s1, s2).max(directed(s2, s1)))
}

/// Eigenvalues carrying nonzero spectral projection.
///
/// Grid models keep the continuum convention: singletons are
/// Lebesgue-negligible, so the point spectrum is empty.
pub fn point_spectrum<F: Real>(e: &SpectralMeasure<F>, tol: F) -> SpectrumApprox<F> {
    match e {
        SpectralMeasure::Discrete { atoms } => {
            let points = atoms
                .iter()
                .filter(|a| a.projection.frobenius_norm() > tol)
                .map(|a| Complex::new(a.lambda, F::zero()))
                .collect();
            SpectrumApprox::new(points, F::zero(), "exact point spectrum".to_string())
        }
        SpectralMeasure::Grid { .. } => SpectrumApprox::new(
            Vec::new(),
            F::zero(),
            "grid continuum: singletons carry no mass".to_string(),
        ),
    }
}

/// Checks `Ran E({lambda}) = Ker(A - lambda I)` numerically.
///
/// Returns `(dim_ran, dim_ker, residual)` where `dim_ran` is the
/// rounded trace of the atom projection nearest `lambda`, `dim_ker`
/// counts eigenvalues of `a` within the cluster tolerance, and the
/// residual is `||(A - lambda I) E({lambda})||_op`. A `lambda` matching
/// no atom reports `(0, 0, 0)`; grid models report `(0, 0, 0)` by the
/// negligible-singleton convention.
pub fn kernel_range_check<F: Real>(
    a: &Matrix<F>,
    lambda: F,
    e: &SpectralMeasure<F>,
) -> Result<(usize, usize, F)> {
    let atoms = match e {
        SpectralMeasure::Grid { .. } => return Ok((0, 0, F::zero())),
        SpectralMeasure::Discrete { atoms } => atoms,
    };
    let es = jacobi_eigh(a, F::of(1e-14))?;
    let ctol = default_cluster_tol(&es);
    let Some(atom) = atoms
        .iter()
        .filter(|at| (at.lambda - lambda).abs() <= ctol)
        .min_by(|p, q| {
            (p.lambda - lambda)
                .abs()
                .partial_cmp(&(q.lambda - lambda).abs())
                .unwrap()
        })
    else {
        return Ok((0, 0, F::zero()));
    };
    let dim_ran = atom.projection.trace().as_f64().round() as usize;
    let dim_ker = es
        .values
        .iter()
        .filter(|&&v| (v - lambda).abs() <= ctol)
        .count();
    let n = a.rows();
    let shifted = a - &Matrix::identity(n).scale(lambda);
    let residual = shifted.matmul(&atom.projection)?.operator_norm()?;
    Ok((dim_ran, dim_ker, residual))
}

/// Which spectrum the mapping theorem is applied to.
#[derive(Clone, Copy, Debug)]
pub enum SpectrumModel<F> {
    /// All spectrum is point spectrum: `sigma(f(A)) = f(sigma_p(A))`.
    Finite,
    /// Continuum multiplication model on K: the spectrum is the closure
    /// of the one-sided limit values of `f` over K.
    Continuum(Interval<F>),
}

/// Number of uniform interior samples backing the continuum model.
const CONTINUUM_SAMPLES: usize = 1000;

/// The spectral mapping theorem at finite resolution.
///
/// Finite model: `f` evaluated at the spectrum points. Continuum model:
/// one-sided limit values over a dense sample of K plus all of `f`'s
/// own special points. Values attained only at a single point (the
/// `1_{{c}}` spike) are invisible to one-sided limits, which is exactly
/// the mapping theorem's verdict.
pub fn spectral_map<F: Real>(
    f: &RegulatedFn<F>,
    e: &SpectralMeasure<F>,
    model: SpectrumModel<F>,
) -> Result<SpectrumApprox<F>> {
    match model {
        SpectrumModel::Finite => {
            let mut points = Vec::new();
            for lambda in e.spectrum_points() {
                points.push(f.eval(lambda)?);
            }
            Ok(SpectrumApprox::new(
                points,
                F::zero(),
                "finite model: image of the point spectrum".to_string(),
            ))
        }
        SpectrumModel::Continuum(k) => {
            let mut sites = linspace(k.a, k.b, CONTINUUM_SAMPLES);
            sites.extend(f.special_points().into_iter().filter(|&x| k.contains(x)));
            sites.sort_by(|p, q| p.partial_cmp(q).unwrap());
            sites.dedup();
            let mut points = Vec::with_capacity(2 * sites.len());
            for x in sites {
                let (left, right) = f.side_limits(x)?;
                points.push(left);
                points.push(right);
            }
            let spacing = k.width() / F::of(CONTINUUM_SAMPLES as f64);
            Ok(SpectrumApprox::new(
                points,
                spacing,
                format!(
                    "continuum model: one-sided limits over {CONTINUUM_SAMPLES} uniform \
                     samples plus special points"
                ),
            ))
        }
    }
}

/// Essential range of `f` with respect to the spectral mass of `e`.
///
/// Candidates are the values of `f` on the atoms or nodes; a candidate
/// survives iff for every `eps` in `eps_grid` the set of spectrum
/// points mapped within `eps` of it carries nonzero projection.
pub fn essential_range<F: Real>(
    f: &RegulatedFn<F>,
    e: &SpectralMeasure<F>,
    eps_grid: &[F],
) -> Result<SpectrumApprox<F>> {
    let sites = e.spectrum_points();
    let mut values = Vec::with_capacity(sites.len());
    for &x in &sites {
        values.push(f.eval(x)?);
    }
    let mut kept = Vec::new();
    for &cand in &values {
        let survives = eps_grid.iter().all(|&eps| {
            values.iter().any(|&v| (v - cand).norm() < eps)
        });
        if survives {
            kept.push(cand);
        }
    }
    let min_eps = eps_grid
        .iter()
        .copied()
        .fold(F::infinity(), F::min);
    Ok(SpectrumApprox::new(
        kept,
        if min_eps.is_finite() { min_eps } else { F::zero() },
        format!("essential range over {} spectrum points", sites.len()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::direct_apply;
    use crate::interval::Cell;
    use crate::spectral::{grid_model, pvm_from_eigensystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn pvm_of(vals: &[f64]) -> SpectralMeasure<f64> {
        let a = Matrix::diag(vals);
        let es = jacobi_eigh(&a, 1e-14).unwrap();
        pvm_from_eigensystem(&es, default_cluster_tol(&es))
    }

    fn approx_of(pts: &[(f64, f64)]) -> SpectrumApprox<f64> {
        SpectrumApprox::new(
            pts.iter().map(|&(re, im)| c(re, im)).collect(),
            0.0,
            String::new(),
        )
    }

    #[test]
    fn point_spectrum_examples() {
        let s = point_spectrum(&pvm_of(&[1.0f64, 2.0, 2.0]), 1e-12);
        assert_eq!(s.points.len(), 2);
        assert!((s.points[0].re - 1.0).abs() < 1e-14);
        assert!((s.points[1].re - 2.0).abs() < 1e-14);

        let g = grid_model(0.0f64, 1.0, 64).unwrap();
        assert!(point_spectrum(&g, 1e-12).is_empty());

        let empty = SpectralMeasure::<f64>::Discrete { atoms: vec![] };
        assert!(point_spectrum(&empty, 1e-12).is_empty());
    }

    #[test]
    fn kernel_range_examples() {
        let a = Matrix::diag(&[1.0f64, 1.0, 2.0]);
        let e = pvm_of(&[1.0, 1.0, 2.0]);
        let (ran, ker, res) = kernel_range_check(&a, 1.0, &e).unwrap();
        assert_eq!((ran, ker), (2, 2));
        assert!(res <= 1e-12);

        let a2 = Matrix::diag(&[1.0f64, 2.0]);
        let e2 = pvm_of(&[1.0, 2.0]);
        assert_eq!(kernel_range_check(&a2, 3.0, &e2).unwrap(), (0, 0, 0.0));
    }

    /// Orthogonal conjugation by a Householder reflector plants exact
    /// multiplicities in a non-diagonal matrix.
    #[test]
    fn kernel_range_planted_multiplicities() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let planted = [1.0f64, 1.0, 2.0, 2.0, 2.0, 5.0];
        let n = planted.len();
        for _ in 0..5 {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            let q = Matrix::from_fn(n, n, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                id - 2.0 * v[i] * v[j] / vtv
            });
            let a = q
                .matmul(&Matrix::diag(&planted))
                .unwrap()
                .matmul(&q.transpose())
                .unwrap();
            // Symmetrize away the last-ulp asymmetry of the products.
            let a = Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
            let es = jacobi_eigh(&a, 1e-14).unwrap();
            let e = pvm_from_eigensystem(&es, default_cluster_tol(&es));
            for (lambda, mult) in [(1.0, 2usize), (2.0, 3), (5.0, 1)] {
                let (ran, ker, res) = kernel_range_check(&a, lambda, &e).unwrap();
                assert_eq!(ran, mult, "lambda {lambda}");
                assert_eq!(ker, mult, "lambda {lambda}");
                assert!(res <= 1e-10, "lambda {lambda} residual {res}");
            }
        }
    }

    #[test]
    fn spectral_map_thomae_two_eigenvalues() {
        let lam = std::f64::consts::FRAC_1_SQRT_2;
        let e = pvm_of(&[0.5, lam]);
        let k = Interval::new(0.05, 0.95).unwrap();
        let f = RegulatedFn::thomae(k, 8).unwrap();
        let s = spectral_map(&f, &e, SpectrumModel::Finite).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!(s.distance_to(c(0.0, 0.0)) <= 1e-12);
        assert!(s.distance_to(c(0.5, 0.0)) <= 1e-12);
    }

    #[test]
    fn spectral_map_pathology_singleton_indicator() {
        let e = pvm_of(&[0.25, 0.75]);
        let k = Interval::new(0.0, 1.0).unwrap();
        let f = RegulatedFn::indicator(k, Cell::singleton(0.5)).unwrap();
        let s = spectral_map(&f, &e, SpectrumModel::Finite).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0], c(0.0, 0.0));
        // The pointwise image still attains 1 at the spike.
        assert_eq!(f.eval(0.5).unwrap(), c(1.0, 0.0));
        // And the continuum model cannot see the spike either.
        let cont = spectral_map(&f, &e, SpectrumModel::Continuum(k)).unwrap();
        assert_eq!(cont.points.len(), 1);
        assert_eq!(cont.points[0], c(0.0, 0.0));
    }

    #[test]
    fn spectral_map_continuum_heaviside() {
        let k = Interval::new(0.0, 1.0).unwrap();
        let f = RegulatedFn::heaviside(k, 0.5).unwrap();
        let e = grid_model(0.0, 1.0, 16).unwrap();
        let s = spectral_map(&f, &e, SpectrumModel::Continuum(k)).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!(s.distance_to(c(0.0, 0.0)) == 0.0);
        assert!(s.distance_to(c(1.0, 0.0)) == 0.0);
    }

    #[test]
    fn essential_range_examples() {
        let grid_eps = [1e-1, 1e-2, 1e-3];
        let e = pvm_of(&[1.0, 2.0]);
        let k = Interval::new(0.0, 3.0).unwrap();
        let ident = RegulatedFn::poly_re(k, &[0.0, 1.0]).unwrap();
        let s = essential_range(&ident, &e, &grid_eps).unwrap();
        assert_eq!(s.points.len(), 2);

        let seven = RegulatedFn::constant_re(k, 7.0);
        let s7 = essential_range(&seven, &e, &grid_eps).unwrap();
        assert_eq!(s7.points.len(), 1);
        assert_eq!(s7.points[0], c(7.0, 0.0));

        let g = grid_model(0.0, 1.0, 32).unwrap();
        let k01 = Interval::new(0.0, 1.0).unwrap();
        let h = RegulatedFn::heaviside(k01, 0.5).unwrap();
        let sh = essential_range(&h, &g, &grid_eps).unwrap();
        assert_eq!(sh.points.len(), 2);
    }

    #[test]
    fn essential_range_matches_finite_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let k = Interval::new(-1.5, 1.5).unwrap();
        for _ in 0..5 {
            let vals: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let e = pvm_of(&vals);
            let coeffs = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let f = RegulatedFn::poly_re(k, &coeffs).unwrap();
            let map = spectral_map(&f, &e, SpectrumModel::Finite).unwrap();
            let ess = essential_range(&f, &e, &[1e-6]).unwrap();
            assert!(hausdorff_distance(&map, &ess).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let s = approx_of(&[(0.0, 0.0), (0.5, 0.0)]);
        assert_eq!(hausdorff_distance(&s, &s).unwrap(), 0.0);

        let a = approx_of(&[(0.0, 0.0)]);
        let b = approx_of(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 1.0);

        let p = approx_of(&[(0.0, 0.0), (0.5, 0.0)]);
        let q = approx_of(&[(0.01, 0.0), (0.5, 0.0)]);
        assert!((hausdorff_distance(&p, &q).unwrap() - 0.01).abs() < 1e-15);

        let empty = approx_of(&[]);
        assert!(hausdorff_distance(&empty, &s).is_err());
    }

    #[test]
    fn finite_map_matches_direct_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let k = Interval::new(-1.5, 1.5).unwrap();
        for _ in 0..10 {
            let n = 4;
            let mut a = Matrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = rng.random_range(-1.0..1.0) / (2.0 * n as f64);
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let es = jacobi_eigh(&a, 1e-14).unwrap();
            let e = pvm_from_eigensystem(&es, default_cluster_tol(&es));
            // Real-valued random step function keeps f(A) symmetric.
            let mut bounds: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
            bounds.extend([-1.5, 1.5]);
            bounds.sort_by(f64::total_cmp);
            bounds.dedup();
            let mut cells = Vec::new();
            for w in bounds.windows(2) {
                cells.push(Cell::half_open(w[0], w[1]).unwrap());
            }
            let last = cells.pop().unwrap();
            cells.push(Cell::new(last.lo, last.hi, true, true).unwrap());
            let values: Vec<Complex<f64>> = (0..cells.len())
                .map(|_| c(rng.random_range(-1.0..1.0), 0.0))
                .collect();
            let f = RegulatedFn::Step(crate::regulated::StepFn::new(k, cells, values).unwrap());

            let fa = direct_apply(&f, &e).unwrap();
            let fa_re = Matrix::from_fn(n, n, |i, j| fa[(i, j)].re);
            let fes = jacobi_eigh(&fa_re, 1e-14).unwrap();
            let from_matrix = SpectrumApprox::new(
                fes.values.iter().map(|&v| c(v, 0.0)).collect(),
                0.0,
                String::new(),
            );
            let map = spectral_map(&f, &e, SpectrumModel::Finite).unwrap();
            assert!(hausdorff_distance(&map, &from_matrix).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn grid_essential_range_approaches_continuum_map() {
        let k = Interval::new(0.0, 1.0).unwrap();
        let f = RegulatedFn::poly_re(k, &[0.0, 1.0]).unwrap();
        let mut last = f64::INFINITY;
        for n in [16usize, 32, 64] {
            let g = grid_model(0.0, 1.0, n).unwrap();
            let ess = essential_range(&f, &g, &[1e-6]).unwrap();
            let cont = spectral_map(&f, &g, SpectrumModel::Continuum(k)).unwrap();
            let d = hausdorff_distance(&ess, &cont).unwrap();
            assert!(d <= 0.5 / n as f64 + 1e-12, "n {n} d {d}");
            assert!(d <= last + 1e-15);
            last = d;
        }
    }

    #[test]
    fn dedup_and_json() {
        let s = SpectrumApprox::new(
            vec![c(1.0, 0.0), c(1.0 + 1e-12, 0.0), c(2.0, 0.0)],
            0.5,
            "note".to_string(),
        );
        assert_eq!(s.points.len(), 2);
        let json = s.to_json();
        assert!(json.contains("\"resolution\":0.5"), "{json}");
        assert!(json.contains("\"points\":[[1.0,0.0],[2.0,0.0]]"), "{json}");
    }
}
