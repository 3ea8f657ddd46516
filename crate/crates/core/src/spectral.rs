//! Concrete self-adjoint models and their spectral measures.
//!
//! Two models cover every construction in the crate: dense real
//! symmetric matrices (eigendecomposed by cyclic Jacobi rotations into
//! a discrete projection-valued measure) and diagonal grid models of
//! multiplication operators on an interval (where the measure acts by
//! coordinate masking). Scalar measures `mu_{x,y}(B) = <E(B)x, y>` are
//! finite atomic complex measures in both cases.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::interval::{Cell, Interval};
use crate::matrix::{inner, norm2, Matrix};
use crate::scalar::Real;

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem<F> {
    pub values: Vec<F>,
    pub vectors: Matrix<F>,
}

impl<F: Real> EigenSystem<F> {
    /// Largest eigenpair residual `||A v - lambda v||`.
    pub fn residual(&self, a: &Matrix<F>) -> Result<F> {
        let n = self.values.len();
        let mut worst = F::zero();
        for j in 0..n {
            let v: Vec<F> = (0..n).map(|i| self.vectors[(i, j)]).collect();
            let av = a.matvec(&v)?;
            let r: Vec<F> = av
                .iter()
                .zip(&v)
                .map(|(&x, &y)| x - self.values[j] * y)
                .collect();
            worst = worst.max(norm2(&r));
        }
        Ok(worst)
    }
}

/// Eigendecomposition of an exactly symmetric matrix by cyclic Jacobi
/// rotations, run until the off-diagonal Frobenius norm drops below
/// `tol` times the full Frobenius norm.
pub fn jacobi_eigh<F: Real>(a: &Matrix<F>, tol: F) -> Result<EigenSystem<F>> {
    a.check_symmetric(F::zero())?;
    if tol <= F::zero() {
        return Err(Error::Argument("tol must be positive".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::<F>::identity(n);
    let scale = a.frobenius_norm();
    let off = |m: &Matrix<F>| {
        let mut s = F::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut converged = scale == F::zero() || off(&m) <= tol * scale;
    for _ in 0..100 {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == F::zero() {
                    continue;
                }
                let tau = (m[(q, q)] - m[(p, p)]) / (F::of(2.0) * apq);
                let t = if tau == F::zero() {
                    F::one()
                } else {
                    tau.signum() / (tau.abs() + (F::one() + tau * tau).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;
                let (app, aqq) = (m[(p, p)], m[(q, q)]);
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = F::zero();
                m[(q, p)] = F::zero();
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let (aip, aiq) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = c * aip - s * aiq;
                    m[(p, i)] = m[(i, p)];
                    m[(i, q)] = s * aip + c * aiq;
                    m[(q, i)] = m[(i, q)];
                }
                for i in 0..n {
                    let (vip, viq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
        converged = off(&m) <= tol * scale;
    }
    if !converged {
        return Err(Error::Convergence(
            "Jacobi sweeps did not reduce the off-diagonal norm".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

/// Default clustering width for [`pvm_from_eigensystem`]: the standard
/// backward-error scale for Jacobi, `64 n eps max(1, max |lambda|)`.
pub fn default_cluster_tol<F: Real>(es: &EigenSystem<F>) -> F {
    let n = F::of(es.values.len() as f64);
    let lam = es
        .values
        .iter()
        .map(|v| v.abs())
        .fold(F::one(), |a, b| a.max(b));
    F::of(64.0) * n * F::epsilon() * lam
}

/// One atom of a discrete projection-valued measure.
#[derive(Clone, Debug)]
pub struct PvmAtom<F> {
    pub lambda: F,
    pub projection: Matrix<F>,
}

/// A concrete projection-valued measure.
#[derive(Clone, Debug)]
pub enum SpectralMeasure<F> {
    /// Eigenvalue clusters with orthogonal projections summing to the
    /// identity.
    Discrete { atoms: Vec<PvmAtom<F>> },
    /// Multiplication operator on `[a, b]` sampled at `n` midpoint
    /// nodes; measures act by coordinate masking, inner products carry
    /// the node weight `(b - a) / n`.
    Grid { a: F, b: F, n: usize },
}

/// Groups eigenvalues closer than `cluster_tol` (an absolute gap) and
/// sums the corresponding rank-one projectors.
pub fn pvm_from_eigensystem<F: Real>(
    es: &EigenSystem<F>,
    cluster_tol: F,
) -> SpectralMeasure<F> {
    let n = es.values.len();
    let mut atoms: Vec<PvmAtom<F>> = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && es.values[end] - es.values[end - 1] <= cluster_tol {
            end += 1;
        }
        let mut p = Matrix::<F>::zeros(n, n);
        let mut lambda = F::zero();
        for j in start..end {
            lambda += es.values[j];
            for r in 0..n {
                for c in 0..n {
                    p[(r, c)] += es.vectors[(r, j)] * es.vectors[(c, j)];
                }
            }
        }
        lambda /= F::of((end - start) as f64);
        atoms.push(PvmAtom { lambda, projection: p });
        start = end;
    }
    SpectralMeasure::Discrete { atoms }
}

/// Grid model of the position operator on `[a, b]` with `n` midpoint
/// nodes.
pub fn grid_model<F: Real>(a: F, b: F, n: usize) -> Result<SpectralMeasure<F>> {
    if !(a < b) || n == 0 {
        return Err(Error::Argument(format!(
            "grid model needs a < b and n >= 1, got [{}, {}] with n = {n}",
            a.as_f64(),
            b.as_f64()
        )));
    }
    Ok(SpectralMeasure::Grid { a, b, n })
}

impl<F: Real> SpectralMeasure<F> {
    pub fn dimension(&self) -> usize {
        match self {
            SpectralMeasure::Discrete { atoms } => {
                atoms.first().map_or(0, |a| a.projection.rows())
            }
            SpectralMeasure::Grid { n, .. } => *n,
        }
    }

    /// Node weight for inner products: 1 on the discrete model, the
    /// grid spacing on the grid model.
    pub fn weight(&self) -> F {
        match self {
            SpectralMeasure::Discrete { .. } => F::one(),
            SpectralMeasure::Grid { a, b, n } => (*b - *a) / F::of(*n as f64),
        }
    }

    /// Spectrum of the underlying model: cluster representatives or
    /// grid nodes, ascending.
    pub fn spectrum_points(&self) -> Vec<F> {
        match self {
            SpectralMeasure::Discrete { atoms } => atoms.iter().map(|a| a.lambda).collect(),
            SpectralMeasure::Grid { a, b, n } => {
                let dx = (*b - *a) / F::of(*n as f64);
                (0..*n)
                    .map(|j| *a + dx * (F::of(j as f64) + F::of(0.5)))
                    .collect()
            }
        }
    }

    /// Smallest closed interval containing the spectrum.
    pub fn spectrum_interval(&self) -> Result<Interval<F>> {
        match self {
            SpectralMeasure::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::Argument("empty spectral measure".into()));
                }
                let lo = atoms.first().unwrap().lambda;
                let hi = atoms.last().unwrap().lambda;
                Interval::new(lo, hi)
            }
            SpectralMeasure::Grid { a, b, .. } => Interval::new(*a, *b),
        }
    }

    /// `E(B)` for B given as a finite union of cells (points are
    /// singleton cells).
    pub fn project(&self, b: &[Cell<F>]) -> Matrix<F> {
        match self {
            SpectralMeasure::Discrete { atoms } => {
                let n = self.dimension();
                let mut out = Matrix::<F>::zeros(n, n);
                for atom in atoms {
                    if b.iter().any(|c| c.contains(atom.lambda)) {
                        out = &out + &atom.projection;
                    }
                }
                out
            }
            SpectralMeasure::Grid { .. } => {
                let nodes = self.spectrum_points();
                let n = nodes.len();
                let mut out = Matrix::<F>::zeros(n, n);
                for (j, &x) in nodes.iter().enumerate() {
                    if b.iter().any(|c| c.contains(x)) {
                        out[(j, j)] = F::one();
                    }
                }
                out
            }
        }
    }

    /// The scalar complex measure `mu_{x,y}(B) = <E(B)x, y>`, one atom
    /// per spectral point. Inner products are conjugate-linear in `y`
    /// and carry the grid weight on the grid model.
    pub fn scalar_measure(
        &self,
        x: &[Complex<F>],
        y: &[Complex<F>],
    ) -> Result<ScalarMeasure<F>> {
        let dim = self.dimension();
        if x.len() != dim || y.len() != dim {
            return Err(Error::Dimension(format!(
                "vectors of length {} and {} against a dimension-{dim} measure",
                x.len(),
                y.len()
            )));
        }
        let mut atoms = Vec::new();
        match self {
            SpectralMeasure::Discrete { atoms: pvm } => {
                for atom in pvm {
                    let px = apply_real_to_complex(&atom.projection, x);
                    atoms.push((atom.lambda, inner(&px, y)));
                }
            }
            SpectralMeasure::Grid { .. } => {
                let w = self.weight();
                for (j, &node) in self.spectrum_points().iter().enumerate() {
                    atoms.push((node, x[j] * y[j].conj() * w));
                }
            }
        }
        Ok(ScalarMeasure { atoms })
    }

    /// Checks the projection-valued measure axioms on the discrete
    /// model: symmetry, idempotence, mutual orthogonality, and
    /// completeness, all within `tol`.
    pub fn validate(&self, tol: F) -> Result<()> {
        let SpectralMeasure::Discrete { atoms } = self else {
            return Ok(());
        };
        let n = self.dimension();
        let mut sum = Matrix::<F>::zeros(n, n);
        for (i, a) in atoms.iter().enumerate() {
            let p = &a.projection;
            if (p - &p.transpose()).max_abs() > tol {
                return Err(Error::Convergence(format!(
                    "projection {i} is not symmetric"
                )));
            }
            if (&p.matmul(p)? - p).max_abs() > tol {
                return Err(Error::Convergence(format!(
                    "projection {i} is not idempotent"
                )));
            }
            for (j, b) in atoms.iter().enumerate() {
                if i != j && a.projection.matmul(&b.projection)?.max_abs() > tol {
                    return Err(Error::Convergence(format!(
                        "projections {i} and {j} are not orthogonal"
                    )));
                }
            }
            sum = &sum + p;
        }
        if (&sum - &Matrix::identity(n)).max_abs() > tol {
            return Err(Error::Convergence("projections do not sum to identity".into()));
        }
        Ok(())
    }
}

/// Applies a real matrix to a complex vector.
pub fn apply_real_to_complex<F: Real>(
    m: &Matrix<F>,
    x: &[Complex<F>],
) -> Vec<Complex<F>> {
    (0..m.rows())
        .map(|i| {
            let mut acc = Complex::zero();
            for (j, &xj) in x.iter().enumerate() {
                acc += xj * m[(i, j)];
            }
            acc
        })
        .collect()
}

/// Lifts a real vector to complex.
pub fn complexify_vec<F: Real>(x: &[F]) -> Vec<Complex<F>> {
    x.iter().map(|&v| Complex::new(v, F::zero())).collect()
}

/// Finite atomic complex measure on the real line: `(point, weight)`
/// pairs, ascending by point.
#[derive(Clone, Debug)]
pub struct ScalarMeasure<F> {
    pub atoms: Vec<(F, Complex<F>)>,
}

impl<F: Real> ScalarMeasure<F> {
    pub fn total_variation(&self) -> F {
        self.atoms
            .iter()
            .map(|(_, w)| w.norm())
            .fold(F::zero(), |a, b| a + b)
    }

    /// `mu(B)` for B a single cell.
    pub fn mass_of_cell(&self, cell: &Cell<F>) -> Complex<F> {
        self.atoms
            .iter()
            .filter(|(p, _)| cell.contains(*p))
            .map(|(_, w)| *w)
            .fold(Complex::zero(), |a, b| a + b)
    }

    pub fn total_mass(&self) -> Complex<F> {
        self.atoms
            .iter()
            .map(|(_, w)| *w)
            .fold(Complex::zero(), |a, b| a + b)
    }
}
