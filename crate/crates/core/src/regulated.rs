//! Regulated functions on a compact interval.
//!
//! A function is regulated when its one-sided limits exist everywhere;
//! equivalently it is a uniform limit of step functions, and its
//! discontinuities (all jump or removable, at most countably many) can
//! be enumerated. Three representations are provided:
//!
//! * [`StepFn`]: finitely many constant values on disjoint cells that
//!   cover K exactly.
//! * [`PiecewiseFn`]: continuous evaluators between breakpoints, with
//!   stored point/left/right values at each breakpoint.
//! * [`AtomicFn`]: a base function perturbed on a countable atom set
//!   revealed level by level, with a vanishing envelope bound so the
//!   truncations converge uniformly (Thomae's function is the model
//!   case).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{check_cover, Cell, Interval};
use crate::scalar::Real;
use crate::util::{gcd, low_discrepancy_points, linspace};

/// Continuous piece evaluator. Must extend continuously to the closure
/// of the open span it is attached to.
pub type Evaluator<F> = Arc<dyn Fn(F) -> Complex<F> + Send + Sync>;

/// Enumerator of perturbation atoms: `atoms(n)` returns every atom
/// revealed up to truncation level `n`, deterministically.
pub type AtomEnumerator<F> = Arc<dyn Fn(usize) -> Vec<(F, Complex<F>)> + Send + Sync>;

/// Envelope bound: atoms revealed after level `n` deviate from the base
/// by at most `envelope(n)`, and `envelope(n) -> 0`.
pub type Envelope<F> = Arc<dyn Fn(usize) -> F + Send + Sync>;

/// Relative tolerance for classifying discontinuities and validating
/// stored one-sided values against probed limits.
fn limit_tol<F: Real>() -> F {
    let floor = F::epsilon() * F::of(32.0);
    let nominal = F::of(1e-9);
    if nominal > floor {
        nominal
    } else {
        floor
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Breakpoint<F> {
    pub x: F,
    pub left: Complex<F>,
    pub right: Complex<F>,
    pub value: Complex<F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscKind {
    Jump,
    Removable,
}

#[derive(Clone, Copy, Debug)]
pub struct Discontinuity<F> {
    pub x: F,
    pub kind: DiscKind,
    pub left: Complex<F>,
    pub right: Complex<F>,
    pub value: Complex<F>,
}

#[derive(Clone, Debug, Default)]
pub struct DiscontinuityReport<F> {
    pub entries: Vec<Discontinuity<F>>,
}

fn classify<F: Real>(
    x: F,
    left: Complex<F>,
    right: Complex<F>,
    value: Complex<F>,
) -> Option<Discontinuity<F>> {
    let scale = F::one()
        .max(left.norm())
        .max(right.norm())
        .max(value.norm());
    let tol = limit_tol::<F>() * scale;
    if (left - right).norm() > tol {
        Some(Discontinuity { x, kind: DiscKind::Jump, left, right, value })
    } else if (value - left).norm() > tol {
        Some(Discontinuity { x, kind: DiscKind::Removable, left, right, value })
    } else {
        None
    }
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// One-sided limit of `eval` at `x` by geometric approach `x +/- 2^-k h`,
/// `k = 1..=40`, accepted once successive probes are Cauchy within the
/// limit tolerance. Failure to settle suggests the input is not
/// regulated at `x`.
fn probe_limit<F: Real>(
    eval: &dyn Fn(F) -> Complex<F>,
    x: F,
    side: Side,
    h0: F,
) -> Result<Complex<F>> {
    let sign = match side {
        Side::Left => -F::one(),
        Side::Right => F::one(),
    };
    let mut prev: Option<Complex<F>> = None;
    let mut step = h0;
    for _ in 1..=40 {
        step = step / F::of(2.0);
        let probe_x = x + sign * step;
        if probe_x == x {
            // Step underflowed to zero relative to x; the last probe is
            // as close as the arithmetic permits.
            return prev.ok_or(Error::EssentialDiscontinuity { x: x.as_f64() });
        }
        let v = eval(probe_x);
        if let Some(p) = prev {
            let scale = F::one().max(v.norm());
            if (v - p).norm() <= limit_tol::<F>() * scale {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    Err(Error::EssentialDiscontinuity { x: x.as_f64() })
}

// ---------------------------------------------------------------------------
// StepFn
// ---------------------------------------------------------------------------

/// Finitely many constant values on disjoint cells covering K exactly.
#[derive(Clone, Debug)]
pub struct StepFn<F> {
    k: Interval<F>,
    cells: Vec<Cell<F>>,
    values: Vec<Complex<F>>,
}

impl<F: Real> StepFn<F> {
    pub fn new(k: Interval<F>, cells: Vec<Cell<F>>, values: Vec<Complex<F>>) -> Result<Self> {
        if cells.len() != values.len() {
            return Err(Error::Argument(format!(
                "{} cells but {} values",
                cells.len(),
                values.len()
            )));
        }
        check_cover(&k, &cells)?;
        Ok(Self { k, cells, values })
    }

    pub fn constant(k: Interval<F>, value: Complex<F>) -> Self {
        let cell = Cell { lo: k.a, hi: k.b, lo_closed: true, hi_closed: true };
        Self { k, cells: vec![cell], values: vec![value] }
    }

    pub fn k(&self) -> Interval<F> {
        self.k
    }

    pub fn cells(&self) -> &[Cell<F>] {
        &self.cells
    }

    pub fn values(&self) -> &[Complex<F>] {
        &self.values
    }

    fn cell_index(&self, x: F) -> Option<usize> {
        let idx = self
            .cells
            .partition_point(|c| c.hi < x || (c.hi == x && !c.hi_closed));
        (idx < self.cells.len() && self.cells[idx].contains(x)).then_some(idx)
    }

    pub fn eval(&self, x: F) -> Result<Complex<F>> {
        self.k.check(x)?;
        let i = self
            .cell_index(x)
            .expect("cells cover K, so every domain point lies in one");
        Ok(self.values[i])
    }

    /// One-sided limits; at the endpoints of K the outward limit equals
    /// the point value by convention.
    pub fn side_limits(&self, x: F) -> Result<(Complex<F>, Complex<F>)> {
        self.k.check(x)?;
        // Left limit comes from the non-singleton cell whose closure
        // meets (x - d, x); singletons never carry a limit.
        let left = self
            .cells
            .iter()
            .zip(&self.values)
            .find(|(c, _)| c.lo < x && x <= c.hi)
            .map(|(_, v)| *v);
        let right = self
            .cells
            .iter()
            .zip(&self.values)
            .find(|(c, _)| c.lo <= x && x < c.hi)
            .map(|(_, v)| *v);
        let at = self.eval(x)?;
        Ok((left.unwrap_or(at), right.unwrap_or(at)))
    }

    /// Interior cell boundaries plus the endpoints of K, sorted, unique.
    pub fn boundary_points(&self) -> Vec<F> {
        let mut pts = vec![self.k.a, self.k.b];
        for c in &self.cells {
            pts.push(c.lo);
            pts.push(c.hi);
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    pub fn max_abs(&self) -> F {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(F::zero(), |a, b| a.max(b))
    }

    /// Overrides the value at a single point, splitting the containing
    /// cell into (left part, singleton, right part) as needed.
    pub fn with_point(&self, p: F, value: Complex<F>) -> Result<Self> {
        self.k.check(p)?;
        let i = self.cell_index(p).expect("cells cover K");
        let cell = self.cells[i];
        let old = self.values[i];
        if cell.is_singleton() {
            let mut out = self.clone();
            out.values[i] = value;
            return Ok(out);
        }
        let mut new_cells = Vec::with_capacity(3);
        let mut new_values = Vec::with_capacity(3);
        if cell.lo < p {
            new_cells.push(Cell {
                lo: cell.lo,
                hi: p,
                lo_closed: cell.lo_closed,
                hi_closed: false,
            });
            new_values.push(old);
        }
        new_cells.push(Cell::singleton(p));
        new_values.push(value);
        if p < cell.hi {
            new_cells.push(Cell {
                lo: p,
                hi: cell.hi,
                lo_closed: false,
                hi_closed: cell.hi_closed,
            });
            new_values.push(old);
        }
        let mut cells = self.cells.clone();
        let mut values = self.values.clone();
        cells.splice(i..=i, new_cells);
        values.splice(i..=i, new_values);
        Self::new(self.k, cells, values)
    }

    /// Joins adjacent cells that carry exactly equal values.
    fn merged(self) -> Self {
        let mut cells: Vec<Cell<F>> = Vec::with_capacity(self.cells.len());
        let mut values: Vec<Complex<F>> = Vec::with_capacity(self.values.len());
        for (c, v) in self.cells.into_iter().zip(self.values) {
            if let (Some(last), Some(lv)) = (cells.last_mut(), values.last()) {
                if *lv == v && last.abuts(&c) {
                    last.hi = c.hi;
                    last.hi_closed = c.hi_closed;
                    continue;
                }
            }
            cells.push(c);
            values.push(v);
        }
        Self { k: self.k, cells, values }
    }
}

/// Common refinement of two step functions on the same K: elementary
/// cells (boundary singletons and open gaps between them) with the pair
/// of values each function takes there. Exact because both functions
/// are constant on every elementary cell.
fn overlay<F: Real>(
    f: &StepFn<F>,
    g: &StepFn<F>,
) -> Result<(Vec<Cell<F>>, Vec<(Complex<F>, Complex<F>)>)> {
    if f.k != g.k {
        return Err(Error::Argument("step functions on different K".into()));
    }
    let mut bounds: Vec<F> = f
        .boundary_points()
        .into_iter()
        .chain(g.boundary_points())
        .collect();
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bounds.dedup();
    let mut cells = Vec::new();
    let mut values = Vec::new();
    for (i, &p) in bounds.iter().enumerate() {
        cells.push(Cell::singleton(p));
        values.push((f.eval(p)?, g.eval(p)?));
        if i + 1 < bounds.len() {
            let q = bounds[i + 1];
            let cell = Cell { lo: p, hi: q, lo_closed: false, hi_closed: false };
            let rep = cell.representative();
            cells.push(cell);
            values.push((f.eval(rep)?, g.eval(rep)?));
        }
    }
    Ok((cells, values))
}

// ---------------------------------------------------------------------------
// PiecewiseFn
// ---------------------------------------------------------------------------

/// Continuous pieces between breakpoints with stored one-sided data.
#[derive(Clone)]
pub struct PiecewiseFn<F> {
    k: Interval<F>,
    breaks: Vec<Breakpoint<F>>,
    /// Distinct span boundaries: K endpoints plus breakpoint abscissae.
    nodes: Vec<F>,
    /// One evaluator per open span between consecutive nodes.
    pieces: Vec<Evaluator<F>>,
}

impl<F: fmt::Debug> fmt::Debug for PiecewiseFn<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseFn")
            .field("k", &self.k)
            .field("breaks", &self.breaks)
            .field("pieces", &self.pieces.len())
            .finish()
    }
}

impl<F: Real> PiecewiseFn<F> {
    /// Builds a piecewise function and validates every stored one-sided
    /// value against a probed limit of the adjacent evaluator.
    pub fn new(
        k: Interval<F>,
        breaks: Vec<Breakpoint<F>>,
        pieces: Vec<Evaluator<F>>,
    ) -> Result<Self> {
        for w in breaks.windows(2) {
            if w[0].x >= w[1].x {
                return Err(Error::Argument("breakpoints must be strictly ascending".into()));
            }
        }
        for b in &breaks {
            k.check(b.x)?;
        }
        let mut nodes = vec![k.a];
        nodes.extend(breaks.iter().map(|b| b.x));
        nodes.push(k.b);
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup();
        let expected = if k.is_degenerate() { 0 } else { nodes.len() - 1 };
        if pieces.len() != expected {
            return Err(Error::Argument(format!(
                "{} pieces supplied, {} spans between nodes",
                pieces.len(),
                expected
            )));
        }
        let pw = Self { k, breaks, nodes, pieces };
        pw.validate_break_values()?;
        Ok(pw)
    }

    /// A single continuous evaluator on all of K.
    pub fn continuous(k: Interval<F>, eval: Evaluator<F>) -> Result<Self> {
        Self::new(k, Vec::new(), vec![eval])
    }

    fn validate_break_values(&self) -> Result<()> {
        let tol = limit_tol::<F>();
        for b in &self.breaks {
            let scale = F::one()
                .max(b.left.norm())
                .max(b.right.norm())
                .max(b.value.norm());
            if b.x == self.k.a {
                if (b.left - b.value).norm() > tol * scale {
                    return Err(Error::Argument(format!(
                        "left limit at the lower endpoint {} must equal the point value",
                        b.x.as_f64()
                    )));
                }
            } else {
                let span = self.span_left_of(b.x);
                let h0 = (b.x - self.nodes[span]) / F::of(2.0);
                let ev = self.pieces[span].clone();
                let lim = probe_limit(&*ev, b.x, Side::Left, h0)?;
                if (lim - b.left).norm() > tol * scale {
                    return Err(Error::Argument(format!(
                        "stored left value at {} disagrees with the evaluator limit",
                        b.x.as_f64()
                    )));
                }
            }
            if b.x == self.k.b {
                if (b.right - b.value).norm() > tol * scale {
                    return Err(Error::Argument(format!(
                        "right limit at the upper endpoint {} must equal the point value",
                        b.x.as_f64()
                    )));
                }
            } else {
                let span = self.span_right_of(b.x);
                let h0 = (self.nodes[span + 1] - b.x) / F::of(2.0);
                let ev = self.pieces[span].clone();
                let lim = probe_limit(&*ev, b.x, Side::Right, h0)?;
                if (lim - b.right).norm() > tol * scale {
                    return Err(Error::Argument(format!(
                        "stored right value at {} disagrees with the evaluator limit",
                        b.x.as_f64()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> Interval<F> {
        self.k
    }

    pub fn breaks(&self) -> &[Breakpoint<F>] {
        &self.breaks
    }

    fn find_break(&self, x: F) -> Option<&Breakpoint<F>> {
        let i = self.breaks.partition_point(|b| b.x < x);
        (i < self.breaks.len() && self.breaks[i].x == x).then(|| &self.breaks[i])
    }

    /// Index of the span whose closure touches `x` from the left.
    fn span_left_of(&self, x: F) -> usize {
        let j = self.nodes.partition_point(|n| *n < x);
        j.saturating_sub(1).min(self.pieces.len().saturating_sub(1))
    }

    /// Index of the span whose closure touches `x` from the right.
    fn span_right_of(&self, x: F) -> usize {
        let j = self.nodes.partition_point(|n| *n <= x);
        j.saturating_sub(1).min(self.pieces.len().saturating_sub(1))
    }

    pub fn eval(&self, x: F) -> Result<Complex<F>> {
        self.k.check(x)?;
        if let Some(b) = self.find_break(x) {
            return Ok(b.value);
        }
        if self.pieces.is_empty() {
            return Err(Error::Argument("degenerate piecewise function without value".into()));
        }
        Ok(self.pieces[self.span_right_of(x).min(self.span_left_of(x).max(0))](x))
    }

    pub fn side_limits(&self, x: F) -> Result<(Complex<F>, Complex<F>)> {
        self.k.check(x)?;
        if let Some(b) = self.find_break(x) {
            return Ok((b.left, b.right));
        }
        let v = self.eval(x)?;
        Ok((v, v))
    }
}

// ---------------------------------------------------------------------------
// AtomicFn
// ---------------------------------------------------------------------------

/// Base function plus a countable family of point perturbations,
/// truncated at a configured level. The envelope guarantees uniform
/// convergence of the truncations: atoms revealed after level n deviate
/// from the base by at most `envelope(n)`.
#[derive(Clone)]
pub struct AtomicFn<F> {
    base: Box<RegulatedFn<F>>,
    enumerator: AtomEnumerator<F>,
    envelope: Envelope<F>,
    level: usize,
    /// `enumerator(level)`, sorted by point, for O(log n) lookup.
    atoms: Vec<(F, Complex<F>)>,
}

impl<F: fmt::Debug> fmt::Debug for AtomicFn<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AtomicFn")
            .field("base", &self.base)
            .field("level", &self.level)
            .field("atoms", &self.atoms.len())
            .finish()
    }
}

impl<F: Real> AtomicFn<F> {
    pub fn new(
        base: RegulatedFn<F>,
        enumerator: AtomEnumerator<F>,
        envelope: Envelope<F>,
        level: usize,
    ) -> Result<Self> {
        if matches!(base, RegulatedFn::Atomic(_)) {
            return Err(Error::Argument("atomic perturbations do not nest".into()));
        }
        let k = base.k();
        let mut atoms = enumerator(level);
        for (x, _) in &atoms {
            k.check(*x)?;
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Argument(format!(
                    "duplicate atom at {}",
                    w[0].0.as_f64()
                )));
            }
        }
        let this = Self { base: Box::new(base), enumerator, envelope, level, atoms };
        this.spot_check_envelope()?;
        Ok(this)
    }

    /// Light sanity check: the atoms newly revealed at level+1 deviate
    /// from the base by at most envelope(level), and the enumeration is
    /// monotone (old atoms persist with identical values).
    fn spot_check_envelope(&self) -> Result<()> {
        let next = (self.enumerator)(self.level + 1);
        let eta = (self.envelope)(self.level);
        let slack = eta * F::of(1e-9) + F::epsilon();
        for (x, v) in &next {
            let old = self
                .atoms
                .binary_search_by(|a| a.0.partial_cmp(x).unwrap())
                .is_ok();
            if old {
                continue;
            }
            let dev = (*v - self.base.eval(*x)?).norm();
            if dev > eta + slack {
                return Err(Error::Argument(format!(
                    "atom at {} deviates {} from base, above the envelope {}",
                    x.as_f64(),
                    dev.as_f64(),
                    eta.as_f64()
                )));
            }
        }
        for (x, v) in &self.atoms {
            match next.iter().find(|(y, _)| y == x) {
                Some((_, w)) if w == v => {}
                _ => {
                    return Err(Error::Argument(
                        "atom enumeration is not monotone across levels".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &RegulatedFn<F> {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Atoms at the configured level, sorted by point.
    pub fn atoms(&self) -> &[(F, Complex<F>)] {
        &self.atoms
    }

    pub fn atoms_at_level(&self, level: usize) -> Vec<(F, Complex<F>)> {
        let mut v = (self.enumerator)(level);
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v
    }

    pub fn envelope_at(&self, level: usize) -> F {
        (self.envelope)(level)
    }

    /// Rebuilds the same perturbation truncated at a different level.
    pub fn at_level(&self, level: usize) -> Result<Self> {
        Self::new(
            (*self.base).clone(),
            self.enumerator.clone(),
            self.envelope.clone(),
            level,
        )
    }

    fn atom_value(&self, x: F) -> Option<Complex<F>> {
        self.atoms
            .binary_search_by(|a| a.0.partial_cmp(&x).unwrap())
            .ok()
            .map(|i| self.atoms[i].1)
    }

    pub fn eval(&self, x: F) -> Result<Complex<F>> {
        self.base.k().check(x)?;
        if let Some(v) = self.atom_value(x) {
            return Ok(v);
        }
        self.base.eval(x)
    }
}

// ---------------------------------------------------------------------------
// RegulatedFn
// ---------------------------------------------------------------------------

/// A regulated function in one of the three concrete representations.
#[derive(Clone, Debug)]
pub enum RegulatedFn<F> {
    Step(StepFn<F>),
    Piecewise(PiecewiseFn<F>),
    Atomic(AtomicFn<F>),
}

#[derive(Clone, Copy, Debug)]
pub enum CombineOp<F> {
    Add,
    Mul,
    Scale(Complex<F>),
    Conj,
}

impl<F: Real> From<StepFn<F>> for RegulatedFn<F> {
    fn from(s: StepFn<F>) -> Self {
        RegulatedFn::Step(s)
    }
}

impl<F: Real> From<PiecewiseFn<F>> for RegulatedFn<F> {
    fn from(p: PiecewiseFn<F>) -> Self {
        RegulatedFn::Piecewise(p)
    }
}

impl<F: Real> RegulatedFn<F> {
    // -- constructors -------------------------------------------------------

    pub fn constant(k: Interval<F>, value: Complex<F>) -> Self {
        RegulatedFn::Step(StepFn::constant(k, value))
    }

    pub fn constant_re(k: Interval<F>, value: F) -> Self {
        Self::constant(k, Complex::new(value, F::zero()))
    }

    /// Right-continuous Heaviside step with impulse at `c`: 0 below c,
    /// 1 at and above c.
    pub fn heaviside(k: Interval<F>, c: F) -> Result<Self> {
        k.check(c)?;
        let one = Complex::new(F::one(), F::zero());
        if c == k.a {
            return Ok(Self::constant(k, one));
        }
        let cells = vec![Cell::half_open(k.a, c)?, Cell::closed(c, k.b)?];
        let values = vec![Complex::zero(), one];
        Ok(RegulatedFn::Step(StepFn::new(k, cells, values)?))
    }

    /// Indicator of a single cell within K.
    pub fn indicator(k: Interval<F>, cell: Cell<F>) -> Result<Self> {
        if cell.lo < k.a || cell.hi > k.b {
            return Err(Error::Argument(format!("cell {cell} outside {k}")));
        }
        let one = Complex::new(F::one(), F::zero());
        let mut cells = Vec::new();
        let mut values = Vec::new();
        if cell.lo > k.a {
            cells.push(Cell::new(k.a, cell.lo, true, !cell.lo_closed)?);
            values.push(Complex::zero());
        } else if !cell.lo_closed {
            cells.push(Cell::singleton(k.a));
            values.push(Complex::zero());
        }
        cells.push(cell);
        values.push(one);
        if cell.hi < k.b {
            cells.push(Cell::new(cell.hi, k.b, !cell.hi_closed, true)?);
            values.push(Complex::zero());
        } else if !cell.hi_closed {
            cells.push(Cell::singleton(k.b));
            values.push(Complex::zero());
        }
        Ok(RegulatedFn::Step(StepFn::new(k, cells, values)?))
    }

    /// Thomae's function truncated at `level`: value 1/q at reduced
    /// fractions p/q with q <= level, zero elsewhere. Requires K inside
    /// the open unit interval, where the classical definition applies.
    pub fn thomae(k: Interval<F>, level: usize) -> Result<Self> {
        if !(k.a > F::zero() && k.b < F::one()) {
            return Err(Error::Argument(format!(
                "thomae requires K inside (0, 1), got {k}"
            )));
        }
        let (a, b) = (k.a, k.b);
        let enumerator: AtomEnumerator<F> = Arc::new(move |n: usize| {
            let mut atoms = Vec::new();
            for q in 2..=(n as u64).max(1) {
                for p in 1..q {
                    if gcd(p, q) != 1 {
                        continue;
                    }
                    let x = F::of(p as f64) / F::of(q as f64);
                    if x >= a && x <= b {
                        atoms.push((x, Complex::new(F::one() / F::of(q as f64), F::zero())));
                    }
                }
            }
            atoms
        });
        let envelope: Envelope<F> = Arc::new(|n: usize| F::one() / F::of((n + 1) as f64));
        let base = Self::constant(k, Complex::zero());
        Ok(RegulatedFn::Atomic(AtomicFn::new(base, enumerator, envelope, level)?))
    }

    /// Polynomial with the given coefficients, `coeffs[i] * x^i`.
    pub fn poly(k: Interval<F>, coeffs: Vec<Complex<F>>) -> Result<Self> {
        let eval: Evaluator<F> = Arc::new(move |x: F| {
            let mut acc = Complex::zero();
            for &c in coeffs.iter().rev() {
                acc = acc * x + c;
            }
            acc
        });
        Ok(RegulatedFn::Piecewise(PiecewiseFn::continuous(k, eval)?))
    }

    pub fn poly_re(k: Interval<F>, coeffs: &[F]) -> Result<Self> {
        Self::poly(k, coeffs.iter().map(|&c| Complex::new(c, F::zero())).collect())
    }

    /// A single continuous real evaluator on K.
    pub fn continuous_re(
        k: Interval<F>,
        f: impl Fn(F) -> F + Send + Sync + 'static,
    ) -> Result<Self> {
        let eval: Evaluator<F> = Arc::new(move |x| Complex::new(f(x), F::zero()));
        Ok(RegulatedFn::Piecewise(PiecewiseFn::continuous(k, eval)?))
    }

    // -- accessors ----------------------------------------------------------

    pub fn k(&self) -> Interval<F> {
        match self {
            RegulatedFn::Step(s) => s.k,
            RegulatedFn::Piecewise(p) => p.k,
            RegulatedFn::Atomic(a) => a.base.k(),
        }
    }

    pub fn as_step(&self) -> Option<&StepFn<F>> {
        match self {
            RegulatedFn::Step(s) => Some(s),
            _ => None,
        }
    }

    // -- evaluation ---------------------------------------------------------

    pub fn eval(&self, x: F) -> Result<Complex<F>> {
        match self {
            RegulatedFn::Step(s) => s.eval(x),
            RegulatedFn::Piecewise(p) => p.eval(x),
            RegulatedFn::Atomic(a) => a.eval(x),
        }
    }

    /// Stored one-sided limits `(f(x-), f(x+))`. At K's endpoints the
    /// outward limit equals the point value. Atomic perturbations defer
    /// to their base: atoms never move limits.
    pub fn side_limits(&self, x: F) -> Result<(Complex<F>, Complex<F>)> {
        match self {
            RegulatedFn::Step(s) => s.side_limits(x),
            RegulatedFn::Piecewise(p) => p.side_limits(x),
            RegulatedFn::Atomic(a) => a.base.side_limits(x),
        }
    }

    /// All discontinuity points revealed up to `level` (level only
    /// matters for atomic perturbations), classified and sorted.
    pub fn discontinuities(&self, level: usize) -> Result<DiscontinuityReport<F>> {
        let mut entries = Vec::new();
        match self {
            RegulatedFn::Step(s) => {
                for x in s.boundary_points() {
                    let (l, r) = s.side_limits(x)?;
                    if let Some(d) = classify(x, l, r, s.eval(x)?) {
                        entries.push(d);
                    }
                }
            }
            RegulatedFn::Piecewise(p) => {
                for b in &p.breaks {
                    if let Some(d) = classify(b.x, b.left, b.right, b.value) {
                        entries.push(d);
                    }
                }
            }
            RegulatedFn::Atomic(a) => {
                let base_report = a.base.discontinuities(level)?;
                let atoms = a.atoms_at_level(level);
                let atom_xs: Vec<F> = atoms.iter().map(|(x, _)| *x).collect();
                for d in base_report.entries {
                    if atom_xs
                        .binary_search_by(|p| p.partial_cmp(&d.x).unwrap())
                        .is_err()
                    {
                        entries.push(d);
                    }
                }
                for (x, v) in atoms {
                    let (l, r) = a.base.side_limits(x)?;
                    if let Some(d) = classify(x, l, r, v) {
                        entries.push(d);
                    }
                }
                entries.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
            }
        }
        Ok(DiscontinuityReport { entries })
    }

    /// Abscissae of every structural special point at the configured
    /// truncation: cell boundaries, breakpoints, atoms.
    pub fn special_points(&self) -> Vec<F> {
        let mut pts = match self {
            RegulatedFn::Step(s) => s.boundary_points(),
            RegulatedFn::Piecewise(p) => p.breaks.iter().map(|b| b.x).collect(),
            RegulatedFn::Atomic(a) => {
                let mut v = a.base.special_points();
                v.extend(a.atoms.iter().map(|(x, _)| *x));
                v
            }
        };
        pts.push(self.k().a);
        pts.push(self.k().b);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    // -- step approximation -------------------------------------------------

    /// Step function within `eps` of `f` in sup norm, built by
    /// subdividing continuity spans until the local oscillation fits and
    /// isolating every special point in its own singleton cell.
    pub fn approximate_by_steps(&self, eps: F) -> Result<StepFn<F>> {
        if eps <= F::zero() {
            return Err(Error::Argument("eps must be positive".into()));
        }
        let out = match self {
            RegulatedFn::Step(s) => s.clone(),
            RegulatedFn::Piecewise(p) => approx_piecewise(p, eps)?,
            RegulatedFn::Atomic(a) => {
                let mut s = a.base.approximate_by_steps(eps)?;
                for &(x, v) in &a.atoms {
                    s = s.with_point(x, v)?;
                }
                s
            }
        };
        Ok(out)
    }

    // -- sup norm -----------------------------------------------------------

    /// Lower estimate of the sup norm distance from sampled points,
    /// every special point of both operands, and one-sided limits
    /// there. Exact for pairs of step functions and for atomic
    /// perturbations over step bases. Monotone nondecreasing in
    /// `samples` (nested low-discrepancy sample sets).
    pub fn sup_norm_gap(&self, other: &Self, samples: usize) -> Result<F> {
        if self.k() != other.k() {
            return Err(Error::Argument("operands live on different K".into()));
        }
        if samples < 2 {
            return Err(Error::Argument("need at least 2 samples".into()));
        }
        if let (Some((fb, fa)), Some((gb, ga))) =
            (step_with_atoms(self), step_with_atoms(other))
        {
            return exact_gap(fb, &fa, gb, &ga);
        }
        let k = self.k();
        let mut gap = F::zero();
        for x in low_discrepancy_points(k.a, k.b, samples) {
            gap = gap.max((self.eval(x)? - other.eval(x)?).norm());
        }
        let mut pts = self.special_points();
        pts.extend(other.special_points());
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        for x in pts {
            gap = gap.max((self.eval(x)? - other.eval(x)?).norm());
            let (fl, fr) = self.side_limits(x)?;
            let (gl, gr) = other.side_limits(x)?;
            gap = gap.max((fl - gl).norm()).max((fr - gr).norm());
        }
        Ok(gap)
    }

    /// Sampled sup-norm bound estimate of `|f|` itself.
    pub fn sup_norm_estimate(&self, samples: usize) -> Result<F> {
        self.sup_norm_gap(&Self::constant(self.k(), Complex::zero()), samples)
    }

    // -- algebra ------------------------------------------------------------

    pub fn combine(op: CombineOp<F>, f: &Self, g: Option<&Self>) -> Result<Self> {
        match op {
            CombineOp::Scale(alpha) => Ok(unary(f, move |v| v * alpha, alpha.norm())),
            CombineOp::Conj => Ok(unary(f, |v| v.conj(), F::one())),
            CombineOp::Add | CombineOp::Mul => {
                let g = g.ok_or_else(|| {
                    Error::Argument("binary combine needs a second operand".into())
                })?;
                if f.k() != g.k() {
                    return Err(Error::Argument("operands live on different K".into()));
                }
                binary(op, f, g)
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::combine(CombineOp::Add, self, Some(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::combine(CombineOp::Mul, self, Some(other))
    }

    pub fn scale(&self, alpha: Complex<F>) -> Self {
        Self::combine(CombineOp::Scale(alpha), self, None).expect("scale is total")
    }

    pub fn conj(&self) -> Self {
        Self::combine(CombineOp::Conj, self, None).expect("conj is total")
    }
}

/// Step function plus atom overrides when that view is exact: a plain
/// step function, or an atomic perturbation over a step base.
fn step_with_atoms<F: Real>(
    f: &RegulatedFn<F>,
) -> Option<(&StepFn<F>, Vec<(F, Complex<F>)>)> {
    match f {
        RegulatedFn::Step(s) => Some((s, Vec::new())),
        RegulatedFn::Atomic(a) => match a.base.as_ref() {
            RegulatedFn::Step(s) => Some((s, a.atoms.clone())),
            _ => None,
        },
        _ => None,
    }
}

fn atom_lookup<F: Real>(atoms: &[(F, Complex<F>)], x: F) -> Option<Complex<F>> {
    atoms
        .binary_search_by(|a| a.0.partial_cmp(&x).unwrap())
        .ok()
        .map(|i| atoms[i].1)
}

/// Exact sup distance between step-with-atoms representations: the
/// overlay is constant per elementary cell, and atom points are handled
/// individually.
fn exact_gap<F: Real>(
    fb: &StepFn<F>,
    fa: &[(F, Complex<F>)],
    gb: &StepFn<F>,
    ga: &[(F, Complex<F>)],
) -> Result<F> {
    let (cells, values) = overlay(fb, gb)?;
    let mut gap = F::zero();
    for (cell, (vf, vg)) in cells.iter().zip(&values) {
        if cell.is_singleton() {
            let p = cell.lo;
            let f_val = atom_lookup(fa, p).unwrap_or(*vf);
            let g_val = atom_lookup(ga, p).unwrap_or(*vg);
            gap = gap.max((f_val - g_val).norm());
        } else {
            // Atoms inside the open cell are measure-zero exceptions,
            // handled in the loop below; the base difference still
            // holds on the rest of the cell.
            gap = gap.max((*vf - *vg).norm());
        }
    }
    for &(p, _) in fa.iter().chain(ga.iter()) {
        let f_val = atom_lookup(fa, p).unwrap_or(fb.eval(p)?);
        let g_val = atom_lookup(ga, p).unwrap_or(gb.eval(p)?);
        gap = gap.max((f_val - g_val).norm());
    }
    Ok(gap)
}

// ---------------------------------------------------------------------------
// combine internals
// ---------------------------------------------------------------------------

fn unary<F: Real>(
    f: &RegulatedFn<F>,
    map: impl Fn(Complex<F>) -> Complex<F> + Send + Sync + Clone + 'static,
    envelope_factor: F,
) -> RegulatedFn<F> {
    match f {
        RegulatedFn::Step(s) => {
            let values = s.values.iter().map(|&v| map(v)).collect();
            RegulatedFn::Step(StepFn { k: s.k, cells: s.cells.clone(), values })
        }
        RegulatedFn::Piecewise(p) => {
            let breaks = p
                .breaks
                .iter()
                .map(|b| Breakpoint {
                    x: b.x,
                    left: map(b.left),
                    right: map(b.right),
                    value: map(b.value),
                })
                .collect();
            let pieces = p
                .pieces
                .iter()
                .map(|ev| {
                    let ev = ev.clone();
                    let map = map.clone();
                    let out: Evaluator<F> = Arc::new(move |x| map(ev(x)));
                    out
                })
                .collect();
            RegulatedFn::Piecewise(PiecewiseFn {
                k: p.k,
                breaks,
                nodes: p.nodes.clone(),
                pieces,
            })
        }
        RegulatedFn::Atomic(a) => {
            let base = unary(&a.base, map.clone(), envelope_factor);
            let inner = a.enumerator.clone();
            let enumerator: AtomEnumerator<F> = Arc::new(move |n| {
                inner(n).into_iter().map(|(x, v)| (x, map(v))).collect()
            });
            let inner_env = a.envelope.clone();
            let envelope: Envelope<F> = Arc::new(move |n| inner_env(n) * envelope_factor);
            RegulatedFn::Atomic(
                AtomicFn::new(base, enumerator, envelope, a.level)
                    .expect("unary image of a valid perturbation stays valid"),
            )
        }
    }
}

fn apply_op<F: Real>(op: CombineOp<F>, a: Complex<F>, b: Complex<F>) -> Complex<F> {
    match op {
        CombineOp::Add => a + b,
        CombineOp::Mul => a * b,
        _ => unreachable!("binary path only"),
    }
}

fn binary<F: Real>(
    op: CombineOp<F>,
    f: &RegulatedFn<F>,
    g: &RegulatedFn<F>,
) -> Result<RegulatedFn<F>> {
    match (f, g) {
        (RegulatedFn::Step(s), RegulatedFn::Step(t)) => {
            let (cells, values) = overlay(s, t)?;
            let combined = values.iter().map(|&(a, b)| apply_op(op, a, b)).collect();
            Ok(RegulatedFn::Step(StepFn::new(s.k, cells, combined)?.merged()))
        }
        (RegulatedFn::Atomic(_), _) | (_, RegulatedFn::Atomic(_)) => binary_atomic(op, f, g),
        _ => binary_piecewise(op, f, g),
    }
}

/// General path: merge breakpoints, combine one-sided data pointwise
/// and evaluate pieces through the full operands.
fn binary_piecewise<F: Real>(
    op: CombineOp<F>,
    f: &RegulatedFn<F>,
    g: &RegulatedFn<F>,
) -> Result<RegulatedFn<F>> {
    let k = f.k();
    let mut xs = f.special_points();
    xs.extend(g.special_points());
    xs.retain(|&x| x > k.a && x < k.b);
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();

    let mut breaks = Vec::with_capacity(xs.len());
    for &x in &xs {
        let (fl, fr) = f.side_limits(x)?;
        let (gl, gr) = g.side_limits(x)?;
        breaks.push(Breakpoint {
            x,
            left: apply_op(op, fl, gl),
            right: apply_op(op, fr, gr),
            value: apply_op(op, f.eval(x)?, g.eval(x)?),
        });
    }
    let spans = breaks.len() + 1;
    let f_arc = Arc::new(f.clone());
    let g_arc = Arc::new(g.clone());
    let pieces = (0..spans)
        .map(|_| {
            let f = f_arc.clone();
            let g = g_arc.clone();
            let out: Evaluator<F> = Arc::new(move |x| {
                let a = f.eval(x).expect("x within K by construction");
                let b = g.eval(x).expect("x within K by construction");
                apply_op(op, a, b)
            });
            out
        })
        .collect();
    let mut nodes = vec![k.a];
    nodes.extend(xs.iter().copied());
    nodes.push(k.b);
    nodes.dedup();
    Ok(RegulatedFn::Piecewise(PiecewiseFn { k, breaks, nodes, pieces }))
}

/// Atomic operand(s): combine the bases, then rebuild the atom set so
/// every atom of either side carries the combined point value.
fn binary_atomic<F: Real>(
    op: CombineOp<F>,
    f: &RegulatedFn<F>,
    g: &RegulatedFn<F>,
) -> Result<RegulatedFn<F>> {
    let f_base = match f {
        RegulatedFn::Atomic(a) => (*a.base).clone(),
        other => other.clone(),
    };
    let g_base = match g {
        RegulatedFn::Atomic(a) => (*a.base).clone(),
        other => other.clone(),
    };
    let base = binary(op, &f_base, &g_base)?;

    let level = match (f, g) {
        (RegulatedFn::Atomic(a), RegulatedFn::Atomic(b)) => a.level.max(b.level),
        (RegulatedFn::Atomic(a), _) => a.level,
        (_, RegulatedFn::Atomic(b)) => b.level,
        _ => unreachable!(),
    };

    let f_all = Arc::new(f.clone());
    let g_all = Arc::new(g.clone());
    let fc = f_all.clone();
    let gc = g_all.clone();
    let enumerator: AtomEnumerator<F> = Arc::new(move |n| {
        let mut xs: Vec<F> = Vec::new();
        if let RegulatedFn::Atomic(a) = fc.as_ref() {
            xs.extend(a.atoms_at_level(n).into_iter().map(|(x, _)| x));
        }
        if let RegulatedFn::Atomic(b) = gc.as_ref() {
            xs.extend(b.atoms_at_level(n).into_iter().map(|(x, _)| x));
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        xs.into_iter()
            .map(|x| {
                let fv = eval_at_level(&fc, x, n);
                let gv = eval_at_level(&gc, x, n);
                (x, apply_op(op, fv, gv))
            })
            .collect()
    });

    // Envelope: deviations of post-level atoms from the combined base.
    // Addition adds envelopes; multiplication scales each side's
    // envelope by a sup bound of the other operand.
    let f_env = envelope_of(f);
    let g_env = envelope_of(g);
    let envelope: Envelope<F> = match op {
        CombineOp::Add => Arc::new(move |n| f_env(n) + g_env(n)),
        CombineOp::Mul => {
            let bf = f.sup_norm_estimate(512)? + f_env(0);
            let bg = g.sup_norm_estimate(512)? + g_env(0);
            Arc::new(move |n| f_env(n) * bg + g_env(n) * bf + f_env(n) * g_env(n))
        }
        _ => unreachable!(),
    };

    Ok(RegulatedFn::Atomic(AtomicFn::new(base, enumerator, envelope, level)?))
}

fn envelope_of<F: Real>(f: &RegulatedFn<F>) -> Envelope<F> {
    match f {
        RegulatedFn::Atomic(a) => a.envelope.clone(),
        _ => Arc::new(|_| F::zero()),
    }
}

fn eval_at_level<F: Real>(f: &RegulatedFn<F>, x: F, level: usize) -> Complex<F> {
    match f {
        RegulatedFn::Atomic(a) => {
            let atoms = a.atoms_at_level(level);
            atom_lookup(&atoms, x)
                .unwrap_or_else(|| a.base.eval(x).expect("x within K"))
        }
        other => other.eval(x).expect("x within K"),
    }
}

// ---------------------------------------------------------------------------
// step approximation internals
// ---------------------------------------------------------------------------

fn diameter<F: Real>(vals: &[Complex<F>]) -> F {
    let mut d = F::zero();
    for i in 0..vals.len() {
        for j in (i + 1)..vals.len() {
            d = d.max((vals[i] - vals[j]).norm());
        }
    }
    d
}

fn approx_piecewise<F: Real>(p: &PiecewiseFn<F>, eps: F) -> Result<StepFn<F>> {
    let k = p.k;
    if k.is_degenerate() {
        return StepFn::new(k, vec![Cell::singleton(k.a)], vec![p.eval(k.a)?]);
    }
    let specials: Vec<F> = p.breaks.iter().map(|b| b.x).collect();
    let has_a = specials.first().is_some_and(|&x| x == k.a);
    let has_b = specials.last().is_some_and(|&x| x == k.b);

    let mut cells: Vec<Cell<F>> = Vec::new();
    let mut values: Vec<Complex<F>> = Vec::new();
    if has_a {
        cells.push(Cell::singleton(k.a));
        values.push(p.eval(k.a)?);
    }
    for (span, w) in p.nodes.windows(2).enumerate() {
        let (u, v) = (w[0], w[1]);
        let lo_closed = u == k.a && !has_a;
        let hi_closed = v == k.b && !has_b;
        // The span owns the open interval; values exactly at a break
        // node belong to the node's singleton cell. Substitute the
        // appropriate one-sided limits so the probe never sees the jump.
        let find = |x: F| {
            p.breaks
                .binary_search_by(|b| b.x.partial_cmp(&x).unwrap())
                .ok()
        };
        let u_sub = find(u).map(|i| p.breaks[i].right);
        let v_sub = find(v).map(|i| p.breaks[i].left);
        let inner = p.pieces[span].clone();
        let span_ev: Evaluator<F> = Arc::new(move |x| {
            if x == u {
                if let Some(s) = u_sub {
                    return s;
                }
            }
            if x == v {
                if let Some(s) = v_sub {
                    return s;
                }
            }
            inner(x)
        });
        subdivide_span(&span_ev, u, v, lo_closed, hi_closed, eps, &mut cells, &mut values)?;
        let interior = v < k.b;
        if interior || has_b {
            cells.push(Cell::singleton(v));
            values.push(p.eval(v)?);
        }
        if cells.len() > crate::error::MAX_CELLS {
            return Err(Error::Convergence(
                "step approximation exceeded the cell budget".into(),
            ));
        }
    }
    StepFn::new(k, cells, values)
}

/// Uniform first pass sized by the sampled oscillation, then bisection
/// of any subcell whose sampled deviation from its midpoint value still
/// exceeds the budget.
#[allow(clippy::too_many_arguments)]
fn subdivide_span<F: Real>(
    ev: &Evaluator<F>,
    u: F,
    v: F,
    lo_closed: bool,
    hi_closed: bool,
    eps: F,
    cells: &mut Vec<Cell<F>>,
    values: &mut Vec<Complex<F>>,
) -> Result<()> {
    let probe: Vec<Complex<F>> = linspace(u, v, 33).into_iter().map(|x| ev(x)).collect();
    let osc = diameter(&probe);
    let m0 = (osc / (F::of(0.9) * eps))
        .ceil()
        .as_f64()
        .max(1.0)
        .min(100_000.0) as usize;
    let cuts = linspace(u, v, m0 + 1);
    let mut flat: Vec<(F, F, Complex<F>)> = Vec::new();
    for j in 0..m0 {
        accept_or_bisect(ev, cuts[j], cuts[j + 1], eps, 0, &mut flat)?;
    }
    let n = flat.len();
    for (i, (lo, hi, val)) in flat.into_iter().enumerate() {
        let cell = Cell::new(
            lo,
            hi,
            if i == 0 { lo_closed } else { true },
            if i == n - 1 { hi_closed } else { false },
        )?;
        cells.push(cell);
        values.push(val);
    }
    Ok(())
}

fn accept_or_bisect<F: Real>(
    ev: &Evaluator<F>,
    lo: F,
    hi: F,
    eps: F,
    depth: usize,
    out: &mut Vec<(F, F, Complex<F>)>,
) -> Result<()> {
    // Smooth evaluators need about L |K| / eps cells, so a tight budget
    // must fail cleanly instead of grinding out billions of cells.
    if out.len() >= crate::error::MAX_CELLS {
        return Err(Error::Convergence(format!(
            "step approximation needs more than {} cells; loosen the budget",
            crate::error::MAX_CELLS
        )));
    }
    let mid = (lo + hi) / F::of(2.0);
    let center = ev(mid);
    let dev = linspace(lo, hi, 11)
        .into_iter()
        .map(|x| (ev(x) - center).norm())
        .fold(F::zero(), |a, b| a.max(b));
    if dev <= F::of(0.45) * eps {
        out.push((lo, hi, center));
        return Ok(());
    }
    if depth >= 48 || mid == lo || mid == hi {
        return Err(Error::Convergence(format!(
            "evaluator oscillates faster than the step budget near {}",
            mid.as_f64()
        )));
    }
    accept_or_bisect(ev, lo, mid, eps, depth + 1, out)?;
    accept_or_bisect(ev, mid, hi, eps, depth + 1, out)
}

// ---------------------------------------------------------------------------
// JSON piecewise specification
// ---------------------------------------------------------------------------

/// Either a plain real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Re(f64),
    ReIm([f64; 2]),
}

impl ComplexSpec {
    pub fn to_complex<F: Real>(self) -> Complex<F> {
        match self {
            ComplexSpec::Re(r) => Complex::new(F::of(r), F::zero()),
            ComplexSpec::ReIm([r, i]) => Complex::new(F::of(r), F::of(i)),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PieceSpec {
    /// Constant value.
    Const { c: ComplexSpec },
    /// `sum coeffs[i] x^i`.
    Poly { coeffs: Vec<f64> },
    /// `amp * sin(freq * x + phase)`.
    Sin {
        #[serde(default = "default_one")]
        amp: f64,
        #[serde(default = "default_one")]
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `scale * exp(rate * x)`.
    Exp {
        #[serde(default = "default_one")]
        rate: f64,
        #[serde(default = "default_one")]
        scale: f64,
    },
}

fn default_one() -> f64 {
    1.0
}

impl PieceSpec {
    pub fn to_evaluator<F: Real>(&self) -> Evaluator<F> {
        match self {
            PieceSpec::Const { c } => {
                let v = c.to_complex::<F>();
                Arc::new(move |_| v)
            }
            PieceSpec::Poly { coeffs } => {
                let coeffs: Vec<F> = coeffs.iter().map(|&c| F::of(c)).collect();
                Arc::new(move |x: F| {
                    let mut acc = F::zero();
                    for &c in coeffs.iter().rev() {
                        acc = acc * x + c;
                    }
                    Complex::new(acc, F::zero())
                })
            }
            PieceSpec::Sin { amp, freq, phase } => {
                let (a, w, p) = (F::of(*amp), F::of(*freq), F::of(*phase));
                Arc::new(move |x: F| Complex::new(a * (w * x + p).sin(), F::zero()))
            }
            PieceSpec::Exp { rate, scale } => {
                let (r, s) = (F::of(*rate), F::of(*scale));
                Arc::new(move |x: F| Complex::new(s * (r * x).exp(), F::zero()))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct BreakSpec {
    pub x: f64,
    pub left: ComplexSpec,
    pub right: ComplexSpec,
    pub value: ComplexSpec,
}

/// JSON document shape: `{ "k": [a, b], "pieces": [...], "breaks": [...] }`.
/// Pieces run between consecutive breakpoints (and the endpoints of K);
/// there must be exactly one more piece than interior breakpoints when
/// no break sits on an endpoint.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PiecewiseSpec {
    pub k: [f64; 2],
    pub pieces: Vec<PieceSpec>,
    #[serde(default)]
    pub breaks: Vec<BreakSpec>,
}

impl PiecewiseSpec {
    pub fn build<F: Real>(&self) -> Result<RegulatedFn<F>> {
        let k = Interval::new(F::of(self.k[0]), F::of(self.k[1]))?;
        let breaks: Vec<Breakpoint<F>> = self
            .breaks
            .iter()
            .map(|b| Breakpoint {
                x: F::of(b.x),
                left: b.left.to_complex(),
                right: b.right.to_complex(),
                value: b.value.to_complex(),
            })
            .collect();
        let pieces: Vec<Evaluator<F>> =
            self.pieces.iter().map(|p| p.to_evaluator()).collect();
        Ok(RegulatedFn::Piecewise(PiecewiseFn::new(k, breaks, pieces)?))
    }
}

impl<F: Real> RegulatedFn<F> {
    /// Parses the JSON piecewise document described by [`PiecewiseSpec`].
    pub fn from_json(doc: &str) -> Result<Self> {
        let spec: PiecewiseSpec = serde_json::from_str(doc)?;
        spec.build()
    }
}
