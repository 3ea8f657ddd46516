//! Gauge integration against scalar spectral measures and the bounded
//! functional calculus `f(A)`.
//!
//! The integral of a step function against a finite atomic measure is
//! an exact finite sum, so the calculus is built in two stages: an
//! exact [`integrate_step`] kernel, and [`integrate_regulated`] which
//! step-approximates a general regulated integrand tightly enough that
//! the approximation error stays below the caller's budget.
//! [`apply_calculus`] assembles `f(A)` entrywise from the scalar
//! measures of basis-vector pairs and is checked against the direct
//! eigendecomposition oracle [`direct_apply`].

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gauge::TaggedPartition;
use crate::matrix::Matrix;
use crate::regulated::{RegulatedFn, StepFn};
use crate::scalar::{Element, Real};
use crate::spectral::{jacobi_eigh, ScalarMeasure, SpectralMeasure};

/// Outcome of a gauge-integral evaluation.
#[derive(Clone, Debug)]
pub struct HkIntegral<F: Real> {
    pub value: Complex<F>,
    /// Description of the gauge that produced the partition.
    pub gauge_used: String,
    pub partition_size: usize,
    /// Upper bound on the step-approximation error contributed to
    /// `value`; zero when the integrand was already a step function.
    pub tail_estimate: F,
}

/// Riemann-type sum `sum f(tag_i) mu(cell_i)` over a tagged partition.
///
/// The partition must cover the support of `mu`; atoms outside every
/// cell are silently missed, which is exactly the failure mode the
/// fineness tests guard against.
pub fn hk_sum<F: Real>(
    f: &RegulatedFn<F>,
    mu: &ScalarMeasure<F>,
    p: &TaggedPartition<F>,
) -> Result<Complex<F>> {
    let mut acc = Complex::zero();
    for item in p.items() {
        let mass = mu.mass_of_cell(&item.cell);
        if !mass.is_zero() {
            acc += f.eval(item.tag)? * mass;
        }
    }
    Ok(acc)
}

/// Exact integral of a step function: `sum c_i mu(C_i)`.
pub fn integrate_step<F: Real>(s: &StepFn<F>, mu: &ScalarMeasure<F>) -> HkIntegral<F> {
    let mut acc = Complex::zero();
    for (cell, &value) in s.cells().iter().zip(s.values()) {
        let mass = mu.mass_of_cell(cell);
        if !mass.is_zero() {
            acc += value * mass;
        }
    }
    HkIntegral {
        value: acc,
        gauge_used: format!("canonical-step({} cells)", s.cells().len()),
        partition_size: s.cells().len(),
        tail_estimate: F::zero(),
    }
}

/// Integral of a regulated function against a finite atomic measure.
///
/// Picks a step approximation with sup error `eps' = eps / (2 |mu|(K))`
/// so the reported `tail_estimate = eps' |mu|(K)` stays strictly below
/// `eps`. Step integrands bypass approximation and carry a zero tail.
pub fn integrate_regulated<F: Real>(
    f: &RegulatedFn<F>,
    mu: &ScalarMeasure<F>,
    eps: F,
) -> Result<HkIntegral<F>> {
    if !(eps > F::zero()) || !eps.is_finite() {
        return Err(Error::Argument(format!(
            "integration budget must be a positive real, got {}",
            eps.as_f64()
        )));
    }
    if let Some(s) = f.as_step() {
        return Ok(integrate_step(s, mu));
    }
    let tv = mu.total_variation();
    if tv.is_zero() {
        return Ok(HkIntegral {
            value: Complex::zero(),
            gauge_used: "empty-measure".to_string(),
            partition_size: 0,
            tail_estimate: F::zero(),
        });
    }
    let eps_prime = eps / (F::of(2.0) * tv);
    let s = f.approximate_by_steps(eps_prime)?;
    let mut result = integrate_step(&s, mu);
    result.tail_estimate = eps_prime * tv;
    Ok(result)
}

fn basis_vector<F: Real>(dim: usize, j: usize) -> Vec<Complex<F>> {
    let mut e = vec![Complex::zero(); dim];
    e[j] = Complex::one();
    e
}

/// `f(A)` through the gauge integral: entry `(i, j)` is the integral of
/// `f` against the scalar measure of the basis pair `(e_j, e_i)`.
///
/// On grid models the calculus acts diagonally, so `f` is evaluated at
/// the nodes directly. On discrete models one shared step approximation
/// serves every entry; the per-entry tail is below `eps` because each
/// basis-pair measure has total variation at most one.
pub fn apply_calculus<F: Real>(
    f: &RegulatedFn<F>,
    e: &SpectralMeasure<F>,
    eps: F,
) -> Result<Matrix<Complex<F>>> {
    if !(eps > F::zero()) || !eps.is_finite() {
        return Err(Error::Argument(format!(
            "calculus budget must be a positive real, got {}",
            eps.as_f64()
        )));
    }
    let k = f.k();
    for lambda in e.spectrum_points() {
        k.check(lambda)?;
    }
    match e {
        SpectralMeasure::Grid { .. } => {
            let nodes = e.spectrum_points();
            let mut m = Matrix::zeros(nodes.len(), nodes.len());
            for (j, &node) in nodes.iter().enumerate() {
                m[(j, j)] = f.eval(node)?;
            }
            Ok(m)
        }
        SpectralMeasure::Discrete { .. } => {
            let dim = e.dimension();
            let eps_prime = eps / F::of(2.0);
            let s = f.approximate_by_steps(eps_prime)?;
            let basis: Vec<Vec<Complex<F>>> =
                (0..dim).map(|j| basis_vector(dim, j)).collect();
            let mut m = Matrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    let mu = e.scalar_measure(&basis[j], &basis[i])?;
                    m[(i, j)] = integrate_step(&s, &mu).value;
                }
            }
            Ok(m)
        }
    }
}

/// Eigendecomposition oracle: `sum f(lambda) P_lambda` summed over the
/// spectral atoms (grid models act diagonally on the nodes).
pub fn direct_apply<F: Real>(
    f: &RegulatedFn<F>,
    e: &SpectralMeasure<F>,
) -> Result<Matrix<Complex<F>>> {
    match e {
        SpectralMeasure::Grid { .. } => {
            let nodes = e.spectrum_points();
            let mut m = Matrix::zeros(nodes.len(), nodes.len());
            for (j, &node) in nodes.iter().enumerate() {
                m[(j, j)] = f.eval(node)?;
            }
            Ok(m)
        }
        SpectralMeasure::Discrete { atoms } => {
            let dim = e.dimension();
            let mut m = Matrix::zeros(dim, dim);
            for atom in atoms {
                let fv = f.eval(atom.lambda)?;
                for r in 0..dim {
                    for c in 0..dim {
                        m[(r, c)] += fv.scale(atom.projection[(r, c)]);
                    }
                }
            }
            Ok(m)
        }
    }
}

/// Operator norm of a complex matrix, optionally in a weighted l2 inner
/// product `<x, y> = sum w_j x_j conj(y_j)`.
///
/// The weighted norm equals the plain operator norm of the similarity
/// transform `D^{1/2} M D^{-1/2}`; uniform weights leave the matrix
/// unchanged, which is why grid-model norms need no special casing.
pub fn operator_norm<F: Real>(
    m: &Matrix<Complex<F>>,
    weight: Option<&[F]>,
) -> Result<F> {
    match weight {
        None => hermitian_square_norm(m),
        Some(w) => {
            if w.len() != m.rows() || !m.is_square() {
                return Err(Error::Dimension(format!(
                    "weight vector of length {} against a {}x{} matrix",
                    w.len(),
                    m.rows(),
                    m.cols()
                )));
            }
            if w.iter().any(|&wj| !(wj > F::zero()) || !wj.is_finite()) {
                return Err(Error::Argument(
                    "inner-product weights must be positive reals".to_string(),
                ));
            }
            let roots: Vec<F> = w.iter().map(|&wj| wj.sqrt()).collect();
            let scaled = Matrix::from_fn(m.rows(), m.cols(), |i, j| {
                m[(i, j)].scale(roots[i] / roots[j])
            });
            hermitian_square_norm(&scaled)
        }
    }
}

/// Largest singular value through the spectrum of `m* m`, solved by
/// Jacobi rotations on its real-symmetric embedding. Exact-arithmetic
/// ties between singular values cost nothing here, unlike iterative
/// norm estimates. Diagonal input short-circuits to `max |m_jj|`.
fn hermitian_square_norm<F: Real>(m: &Matrix<Complex<F>>) -> Result<F> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "operator norm needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(F::zero());
    }
    let diagonal = (0..n).all(|i| {
        (0..n).all(|j| i == j || m[(i, j)] == Complex::zero())
    });
    if diagonal {
        return Ok((0..n).map(|i| m[(i, i)].norm()).fold(F::zero(), F::max));
    }
    let b = &m.conj_transpose() * m;
    // [Re(B) -Im(B); Im(B) Re(B)] is exactly symmetric for Hermitian B
    // and carries the same spectrum (doubled).
    let e = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = b[(i % n, j % n)];
        match (i >= n, j >= n) {
            (false, false) | (true, true) => z.re,
            (false, true) => -z.im,
            (true, false) => z.im,
        }
    });
    let es = jacobi_eigh(&e, F::of(1e-14))?;
    let top = es.values.iter().copied().fold(F::zero(), F::max);
    Ok(top.max(F::zero()).sqrt())
}

/// Residuals of the four *-homomorphism axioms, each an operator norm.
#[derive(Clone, Copy, Debug)]
pub struct HomomorphismReport<F> {
    /// `|| (alpha f + beta g)(A) - alpha f(A) - beta g(A) ||`
    pub linearity: F,
    /// `|| (f g)(A) - f(A) g(A) ||`
    pub multiplicativity: F,
    /// `|| conj(f)(A) - f(A)* ||`
    pub adjoint: F,
    /// `|| 1(A) - I ||`
    pub unit: F,
}

impl<F: Real> HomomorphismReport<F> {
    pub fn max_residual(&self) -> F {
        self.linearity
            .max(self.multiplicativity)
            .max(self.adjoint)
            .max(self.unit)
    }
}

/// Measures how far the calculus is from a *-algebra homomorphism on
/// the pair `(f, g)` with scalars `(alpha, beta)`.
pub fn homomorphism_report<F: Real>(
    e: &SpectralMeasure<F>,
    f: &RegulatedFn<F>,
    g: &RegulatedFn<F>,
    alpha: Complex<F>,
    beta: Complex<F>,
    eps: F,
) -> Result<HomomorphismReport<F>> {
    let fa = apply_calculus(f, e, eps)?;
    let ga = apply_calculus(g, e, eps)?;

    let combo = f.scale(alpha).add(&g.scale(beta))?;
    let lhs_lin = apply_calculus(&combo, e, eps)?;
    let rhs_lin = &fa.scale(alpha) + &ga.scale(beta);
    let linearity = (&lhs_lin - &rhs_lin).operator_norm()?;

    let product = f.mul(g)?;
    let lhs_mul = apply_calculus(&product, e, eps)?;
    let rhs_mul = fa.matmul(&ga)?;
    let multiplicativity = (&lhs_mul - &rhs_mul).operator_norm()?;

    let lhs_adj = apply_calculus(&f.conj(), e, eps)?;
    let adjoint = (&lhs_adj - &fa.conj_transpose()).operator_norm()?;

    let one = RegulatedFn::constant_re(f.k(), F::one());
    let lhs_one = apply_calculus(&one, e, eps)?;
    let unit = (&lhs_one - &Matrix::identity(e.dimension())).operator_norm()?;

    Ok(HomomorphismReport {
        linearity,
        multiplicativity,
        adjoint,
        unit,
    })
}

/// Both sides of the Lipschitz bound `||f(A) - g(A)|| <= ||f - g||_inf`:
/// the measured operator norm and the sup-norm gap over K.
pub fn lipschitz_gap<F: Real>(
    f: &RegulatedFn<F>,
    g: &RegulatedFn<F>,
    e: &SpectralMeasure<F>,
    eps: F,
) -> Result<(F, F)> {
    let minus_one = Complex::new(-F::one(), F::zero());
    let diff = f.add(&g.scale(minus_one))?;
    let lhs = operator_norm(&apply_calculus(&diff, e, eps)?, None)?;
    let rhs = f.sup_norm_gap(g, 2048)?;
    Ok((lhs, rhs))
}
