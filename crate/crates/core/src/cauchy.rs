//! Multiplication-semigroup models on grid measures, step-semigroup
//! approximants, and mild solutions of the abstract inhomogeneous
//! Cauchy problem `u' = Au + f`, `u(0) = x0`.
//!
//! The generator is multiplication by a real regulated function `g`, so
//! `T(t)` acts diagonally as `e^{t g(x_j)}` on the grid nodes and every
//! bound is available in sharp form: `M = 1` and `omega` equal to the
//! sampled sup of `g`. Step approximants replace `g` by its level-`n`
//! step approximation with error halving in `n`; since both share the
//! grid, the semigroup laws survive discretization exactly.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gauge::{TaggedCell, TaggedPartition};
use crate::quad::simpson_fixed;
use crate::regulated::RegulatedFn;
use crate::scalar::{Element, Real};
use crate::spectral::SpectralMeasure;
use crate::util::linspace;

/// Time path of the forcing term: `t -> grid vector`.
pub type ForcingFn<F> = Arc<dyn Fn(F) -> Vec<Complex<F>> + Send + Sync>;

/// Multiplication semigroup `T(t) = e^{t g}` sampled on a grid measure.
#[derive(Clone)]
pub struct SemigroupModel<F: Real> {
    g: RegulatedFn<F>,
    grid: SpectralMeasure<F>,
    node_g: Vec<F>,
    /// Sampled `sup g`; houses the growth pair `(M, omega) = (1, this)`.
    pub growth_bound: F,
    perturbation: Vec<F>,
}

const REAL_TOL: f64 = 1e-12;
const GROWTH_SAMPLES: usize = 512;

impl<F: Real> SemigroupModel<F> {
    /// `g` must be real-valued on the grid interval and the
    /// perturbation points must avoid the nodes exactly (that is what
    /// makes them spectrally invisible).
    pub fn new(
        g: RegulatedFn<F>,
        grid: SpectralMeasure<F>,
        perturbation: Vec<F>,
    ) -> Result<Self> {
        if !matches!(grid, SpectralMeasure::Grid { .. }) {
            return Err(Error::Argument(
                "semigroup model needs a grid spectral measure".to_string(),
            ));
        }
        let k = g.k();
        let nodes = grid.spectrum_points();
        let mut node_g = Vec::with_capacity(nodes.len());
        let mut growth = F::neg_infinity();
        let real_part = |x: F| -> Result<F> {
            let v = g.eval(x)?;
            if v.im.abs() > F::of(REAL_TOL) * v.re.abs().max(F::one()) {
                return Err(Error::Argument(format!(
                    "g must be real-valued, got imaginary part {} at {}",
                    v.im.as_f64(),
                    x.as_f64()
                )));
            }
            Ok(v.re)
        };
        for &x in &nodes {
            k.check(x)?;
            let v = real_part(x)?;
            growth = growth.max(v);
            node_g.push(v);
        }
        let span = grid.spectrum_interval()?;
        for x in linspace(span.a.max(k.a), span.b.min(k.b), GROWTH_SAMPLES) {
            growth = growth.max(real_part(x)?);
        }
        for &d in &perturbation {
            k.check(d)?;
            if nodes.iter().any(|&x| x == d) {
                return Err(Error::Argument(format!(
                    "perturbation point {} sits on a grid node",
                    d.as_f64()
                )));
            }
        }
        Ok(SemigroupModel {
            g,
            grid,
            node_g,
            growth_bound: growth,
            perturbation,
        })
    }

    pub fn g(&self) -> &RegulatedFn<F> {
        &self.g
    }

    pub fn grid(&self) -> &SpectralMeasure<F> {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.node_g.len()
    }

    /// `g` at the grid nodes.
    pub fn node_values(&self) -> &[F] {
        &self.node_g
    }

    pub fn perturbation(&self) -> &[F] {
        &self.perturbation
    }

    /// Weighted l2 norm of a grid vector (node weight `(b-a)/n`).
    pub fn grid_norm(&self, v: &[Complex<F>]) -> F {
        let w = self.grid.weight();
        (v.iter().map(|z| z.norm_sqr()).fold(F::zero(), |a, b| a + b) * w).sqrt()
    }
}

fn check_len<F: Real>(dim: usize, v: &[Complex<F>], what: &str) -> Result<()> {
    if v.len() != dim {
        return Err(Error::Dimension(format!(
            "{what} has length {} against a dimension-{dim} model",
            v.len()
        )));
    }
    Ok(())
}

/// `T(t) psi`: componentwise `e^{t g(x_j)} psi_j`. Equals the direct
/// functional calculus of `lambda -> e^{t g(lambda)}` on the grid.
pub fn semigroup_apply<F: Real>(
    s: &SemigroupModel<F>,
    t: F,
    psi: &[Complex<F>],
) -> Result<Vec<Complex<F>>> {
    if !(t >= F::zero()) {
        return Err(Error::Argument(format!(
            "semigroup time must be nonnegative, got {}",
            t.as_f64()
        )));
    }
    check_len(s.dimension(), psi, "state")?;
    Ok(psi
        .iter()
        .zip(&s.node_g)
        .map(|(&z, &gj)| z.scale((t * gj).exp()))
        .collect())
}

/// Level-`n` step approximant `T_n(t) = sum e^{t g(eta_k)} E(I_k)`.
///
/// Built once from `approximate_by_steps(g, eps_n)` with
/// `eps_n = max(1, sup|g|) 2^{-n}`; all times share the tags, so the
/// semigroup laws hold exactly at every level.
pub struct StepSemigroup<F: Real> {
    partition: TaggedPartition<F>,
    node_g: Vec<F>,
    level: usize,
    eps_level: F,
}

impl<F: Real> StepSemigroup<F> {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Step-approximation error budget at this level.
    pub fn eps_level(&self) -> F {
        self.eps_level
    }

    /// The tagged partition carrying the step cells `I_k`.
    pub fn partition(&self) -> &TaggedPartition<F> {
        &self.partition
    }

    /// `T_n(t) psi` on the shared grid.
    pub fn apply(&self, t: F, psi: &[Complex<F>]) -> Result<Vec<Complex<F>>> {
        if !(t >= F::zero()) {
            return Err(Error::Argument(format!(
                "semigroup time must be nonnegative, got {}",
                t.as_f64()
            )));
        }
        check_len(self.node_g.len(), psi, "state")?;
        Ok(psi
            .iter()
            .zip(&self.node_g)
            .map(|(&z, &gj)| z.scale((t * gj).exp()))
            .collect())
    }

    /// `||T_n(t) - T(t)||_op`: both act diagonally, so the norm is the
    /// largest factor gap over the nodes.
    pub fn gap_to(&self, s: &SemigroupModel<F>, t: F) -> F {
        self.node_g
            .iter()
            .zip(s.node_values())
            .map(|(&gn, &g)| ((t * gn).exp() - (t * g).exp()).abs())
            .fold(F::zero(), F::max)
    }
}

pub fn step_semigroup<F: Real>(s: &SemigroupModel<F>, n: usize) -> Result<StepSemigroup<F>> {
    if n == 0 {
        return Err(Error::Argument(
            "step semigroup level must be at least 1".to_string(),
        ));
    }
    let scale = s
        .node_values()
        .iter()
        .map(|g| g.abs())
        .fold(F::one(), F::max);
    let eps_level = scale * F::of((2.0f64).powi(-(n as i32)));
    let approx = s.g.approximate_by_steps(eps_level)?;
    let items: Vec<TaggedCell<F>> = approx
        .cells()
        .iter()
        .map(|&cell| TaggedCell {
            tag: cell.representative(),
            cell,
        })
        .collect();
    let partition = TaggedPartition::new(s.g.k(), items)?;
    let mut node_g = Vec::with_capacity(s.dimension());
    for &x in &s.grid.spectrum_points() {
        node_g.push(approx.eval(x)?.re);
    }
    Ok(StepSemigroup {
        partition,
        node_g,
        level: n,
        eps_level,
    })
}

/// Initial state, forcing path, and time horizon of the problem.
#[derive(Clone)]
pub struct Datum<F: Real> {
    pub x0: Vec<Complex<F>>,
    pub forcing: ForcingFn<F>,
    pub horizon: F,
}

impl<F: Real> Datum<F> {
    pub fn new(
        x0: Vec<Complex<F>>,
        forcing: impl Fn(F) -> Vec<Complex<F>> + Send + Sync + 'static,
        horizon: F,
    ) -> Result<Self> {
        if !(horizon >= F::zero()) || !horizon.is_finite() {
            return Err(Error::Argument(format!(
                "horizon must be a nonnegative real, got {}",
                horizon.as_f64()
            )));
        }
        let forcing: ForcingFn<F> = Arc::new(forcing);
        let probe = forcing(F::zero());
        check_len(x0.len(), &probe, "forcing value")?;
        Ok(Datum { x0, forcing, horizon })
    }

    /// Homogeneous problem: forcing identically zero.
    pub fn homogeneous(x0: Vec<Complex<F>>, horizon: F) -> Result<Self> {
        let dim = x0.len();
        Datum::new(x0, move |_| vec![Complex::zero(); dim], horizon)
    }
}

/// Shared mild-solution kernel over any propagator `(dt, v) -> T(dt) v`.
fn mild_with<F: Real>(
    propagate: &dyn Fn(F, &[Complex<F>]) -> Result<Vec<Complex<F>>>,
    d: &Datum<F>,
    t: F,
    quad_steps: usize,
) -> Result<Vec<Complex<F>>> {
    if quad_steps < 2 || quad_steps % 2 != 0 {
        return Err(Error::Argument(format!(
            "quadrature steps must be even and >= 2, got {quad_steps}"
        )));
    }
    if !(t >= F::zero()) || t > d.horizon {
        return Err(Error::Argument(format!(
            "time {} outside [0, {}]",
            t.as_f64(),
            d.horizon.as_f64()
        )));
    }
    let mut u = propagate(t, &d.x0)?;
    if t == F::zero() {
        return Ok(u);
    }
    let m = quad_steps;
    let h = t / F::of(m as f64);
    for i in 0..=m {
        // Pin the endpoint so t - si never drifts below zero.
        let si = if i == m { t } else { h * F::of(i as f64) };
        let w = if i == 0 || i == m {
            F::one()
        } else if i % 2 == 1 {
            F::of(4.0)
        } else {
            F::of(2.0)
        };
        let fs = (d.forcing)(si);
        check_len(d.x0.len(), &fs, "forcing value")?;
        let moved = propagate(t - si, &fs)?;
        let scale = w * h / F::of(3.0);
        for (uj, mj) in u.iter_mut().zip(moved) {
            *uj += mj.scale(scale);
        }
    }
    Ok(u)
}

/// `u(t) = T(t) x0 + integral_0^t T(t-s) f(s) ds` with composite
/// Simpson on `quad_steps` subintervals.
pub fn mild_solution<F: Real>(
    s: &SemigroupModel<F>,
    d: &Datum<F>,
    t: F,
    quad_steps: usize,
) -> Result<Vec<Complex<F>>> {
    mild_with(&|dt, v| semigroup_apply(s, dt, v), d, t, quad_steps)
}

/// The level-`n` approximant `w_n(t)`: same formula with `T_n`.
pub fn mild_solution_stepped<F: Real>(
    step: &StepSemigroup<F>,
    d: &Datum<F>,
    t: F,
    quad_steps: usize,
) -> Result<Vec<Complex<F>>> {
    mild_with(&|dt, v| step.apply(dt, v), d, t, quad_steps)
}

/// One level of the uniform-convergence comparison.
#[derive(Clone, Copy, Debug)]
pub struct LevelRow<F> {
    pub level: usize,
    /// `sup_t ||w_n(t) - u(t)||` over the sample times.
    pub measured: F,
    /// `sup_t ||T_n(t) - T(t)||_op (||x0|| + ||f||_L1)`.
    pub bound: F,
    /// `measured <= bound + 1e-8`.
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport<F> {
    pub rows: Vec<LevelRow<F>>,
}

impl<F: Real> ConvergenceReport<F> {
    /// `level,measured,bound,ok` rows with shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,measured,bound,ok\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.level,
                r.measured.as_f64(),
                r.bound.as_f64(),
                r.ok
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "level": r.level,
                    "measured": r.measured.as_f64(),
                    "bound": r.bound.as_f64(),
                    "ok": r.ok,
                })
            })
            .collect();
        serde_json::json!({ "rows": rows }).to_string()
    }
}

/// Measures `sup_t ||w_n(t) - u(t)||` against the step-approximation
/// bound at each level. Both the L1 norm of the forcing and the mild
/// solutions use the same Simpson scheme, so the two sides of the
/// inequality share their quadrature error.
pub fn convergence_report<F: Real>(
    s: &SemigroupModel<F>,
    d: &Datum<F>,
    levels: &[usize],
    sample_times: &[F],
    quad_steps: usize,
) -> Result<ConvergenceReport<F>> {
    if levels.is_empty() || sample_times.is_empty() {
        return Err(Error::Argument(
            "convergence report needs at least one level and one sample time".to_string(),
        ));
    }
    let t_max = sample_times.iter().copied().fold(F::zero(), F::max);
    let exact: Vec<Vec<Complex<F>>> = sample_times
        .iter()
        .map(|&t| mild_solution(s, d, t, quad_steps))
        .collect::<Result<_>>()?;
    let forcing_l1 = if t_max > F::zero() {
        simpson_fixed(
            |t| s.grid_norm(&(d.forcing)(t)),
            F::zero(),
            t_max,
            quad_steps,
        )?
    } else {
        F::zero()
    };
    let x0_norm = s.grid_norm(&d.x0);
    // Dense time grid for the sup of the operator gap.
    let gap_times = {
        let mut ts = linspace(F::zero(), t_max, 4 * quad_steps + 1);
        ts.extend_from_slice(sample_times);
        ts
    };
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let step = step_semigroup(s, n)?;
        let mut measured = F::zero();
        for (&t, u) in sample_times.iter().zip(&exact) {
            let wn = mild_solution_stepped(&step, d, t, quad_steps)?;
            let diff: Vec<Complex<F>> =
                wn.iter().zip(u).map(|(&a, &b)| a - b).collect();
            measured = measured.max(s.grid_norm(&diff));
        }
        let gap_sup = gap_times
            .iter()
            .map(|&t| step.gap_to(s, t))
            .fold(F::zero(), F::max);
        let bound = gap_sup * (x0_norm + forcing_l1);
        rows.push(LevelRow {
            level: n,
            measured,
            bound,
            ok: measured <= bound + F::of(1e-8),
        });
    }
    Ok(ConvergenceReport { rows })
}
