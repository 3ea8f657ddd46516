//! Gauges and gauge-fine tagged partitions.
//!
//! A gauge assigns every point of K a positive radius; a tagged
//! partition is fine for the gauge when each cell sits strictly inside
//! the open window around its tag. Fine partitions always exist
//! (Cousin's lemma); [`build_fine_partition`] constructs one with a
//! deterministic left-to-right sweep that anchors tags at a supplied
//! set of exceptional points.

use std::sync::Arc;

use crate::error::{Error, Result, MAX_CELLS};
use crate::interval::{Cell, Interval};
use crate::regulated::StepFn;
use crate::scalar::Real;

/// Positive radius function on K, with optional exact-point overrides.
#[derive(Clone)]
pub struct Gauge<F> {
    base: Arc<dyn Fn(F) -> F + Send + Sync>,
    overrides: Vec<(F, F)>,
}

impl<F: Real> Gauge<F> {
    pub fn from_fn(base: impl Fn(F) -> F + Send + Sync + 'static) -> Self {
        Self { base: Arc::new(base), overrides: Vec::new() }
    }

    pub fn constant(radius: F) -> Result<Self> {
        if radius <= F::zero() {
            return Err(Error::Argument("gauge radius must be positive".into()));
        }
        Ok(Self::from_fn(move |_| radius))
    }

    /// Pins the radius at one exact point (singleton-capturing radii).
    pub fn with_override(mut self, point: F, radius: F) -> Self {
        match self
            .overrides
            .binary_search_by(|(p, _)| p.partial_cmp(&point).unwrap())
        {
            Ok(i) => self.overrides[i].1 = radius,
            Err(i) => self.overrides.insert(i, (point, radius)),
        }
        self
    }

    pub fn gamma(&self, t: F) -> F {
        if let Ok(i) = self
            .overrides
            .binary_search_by(|(p, _)| p.partial_cmp(&t).unwrap())
        {
            return self.overrides[i].1;
        }
        (self.base)(t)
    }
}

/// The gauge attached to a step function: windows small enough that any
/// fine partition cell around an interior tag stays inside the tag's
/// step cell.
///
/// Rules, for the cell C = [lo, hi] containing t with width w:
/// * singleton C = {p}: half the distance to the nearest other cell
///   boundary;
/// * t equal to lo or hi: w/2;
/// * interior t: max(min(t - lo, hi - t) / 2, w / 8).
///
/// The w/8 floor keeps the radius bounded away from zero inside each
/// cell so that a left-anchored sweep crosses the cell in finitely many
/// steps; the pure half-distance rule decays geometrically toward cell
/// boundaries and would never terminate. Containment in a single step
/// cell is preserved for partitions produced by [`build_fine_partition`]
/// with the cell boundaries passed as exceptional points, because the
/// sweep clamps every emitted cell at the next boundary.
pub fn canonical_step_gauge<F: Real>(s: &StepFn<F>) -> Gauge<F> {
    let cells: Vec<Cell<F>> = s.cells().to_vec();
    let boundaries: Vec<F> = s.boundary_points();
    Gauge::from_fn(move |t: F| {
        let Some(cell) = cells.iter().find(|c| c.contains(t)) else {
            // Outside K; any positive radius is harmless here.
            return F::one();
        };
        if cell.is_singleton() {
            let d = boundaries
                .iter()
                .filter(|&&b| b != t)
                .map(|&b| (b - t).abs())
                .fold(F::infinity(), |a, b| a.min(b));
            return if d.is_finite() { d / F::of(2.0) } else { F::one() };
        }
        let w = cell.width();
        if t == cell.lo || t == cell.hi {
            return w / F::of(2.0);
        }
        let half_dist = (t - cell.lo).min(cell.hi - t) / F::of(2.0);
        half_dist.max(w / F::of(8.0))
    })
}

#[derive(Clone, Copy, Debug)]
pub struct TaggedCell<F> {
    pub tag: F,
    pub cell: Cell<F>,
}

/// Tagged cells, disjoint, covering K, each tag inside its own cell.
#[derive(Clone, Debug)]
pub struct TaggedPartition<F> {
    k: Interval<F>,
    items: Vec<TaggedCell<F>>,
}

impl<F: Real> TaggedPartition<F> {
    pub fn new(k: Interval<F>, items: Vec<TaggedCell<F>>) -> Result<Self> {
        let cells: Vec<Cell<F>> = items.iter().map(|i| i.cell).collect();
        crate::interval::check_cover(&k, &cells)?;
        for item in &items {
            if !item.cell.contains(item.tag) {
                return Err(Error::Argument(format!(
                    "tag {} outside its cell {}",
                    item.tag.as_f64(),
                    item.cell
                )));
            }
        }
        Ok(Self { k, items })
    }

    pub fn k(&self) -> Interval<F> {
        self.k
    }

    pub fn items(&self) -> &[TaggedCell<F>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// True iff every cell lies strictly inside its tag's open gauge window.
pub fn is_fine<F: Real>(p: &TaggedPartition<F>, gauge: &Gauge<F>) -> bool {
    p.items.iter().all(|item| {
        let g = gauge.gamma(item.tag);
        if g <= F::zero() {
            return false;
        }
        let (w1, w2) = (item.tag - g, item.tag + g);
        let lo_ok = if item.cell.lo_closed { item.cell.lo > w1 } else { item.cell.lo >= w1 };
        let hi_ok = if item.cell.hi_closed { item.cell.hi < w2 } else { item.cell.hi <= w2 };
        lo_ok && hi_ok
    })
}

/// Builds a gauge-fine tagged partition of K by a left-to-right sweep.
///
/// The sweep anchors a tag at K's lower endpoint and at every
/// exceptional point, emitting half-open cells `[t, min(t + 0.9 g(t),
/// next anchor))` tagged at their left end; the 0.9 safety factor keeps
/// containment strict. The upper endpoint becomes a closed cell end, or
/// a singleton when it is itself exceptional.
pub fn build_fine_partition<F: Real>(
    k: Interval<F>,
    gauge: &Gauge<F>,
    exceptional: &[F],
) -> Result<TaggedPartition<F>> {
    build_fine_partition_stepped(k, gauge, exceptional, |_| F::of(0.9))
}

/// Sweep with a caller-controlled per-step extension factor in (0, 0.9]
/// (used by property tests to exercise non-maximal steps).
pub fn build_fine_partition_stepped<F: Real>(
    k: Interval<F>,
    gauge: &Gauge<F>,
    exceptional: &[F],
    mut factor: impl FnMut(usize) -> F,
) -> Result<TaggedPartition<F>> {
    if k.is_degenerate() {
        return TaggedPartition::new(
            k,
            vec![TaggedCell { tag: k.a, cell: Cell::singleton(k.a) }],
        );
    }
    let mut nodes = vec![k.a];
    for &x in exceptional {
        k.check(x)?;
        nodes.push(x);
    }
    nodes.push(k.b);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup();
    let b_exceptional = exceptional.iter().any(|&x| x == k.b);

    let mut items: Vec<TaggedCell<F>> = Vec::new();
    for w in nodes.windows(2) {
        let (p, q) = (w[0], w[1]);
        let mut t = p;
        loop {
            if items.len() >= MAX_CELLS {
                return Err(Error::GaugeTooSmall { at: t.as_f64(), max_cells: MAX_CELLS });
            }
            let g = gauge.gamma(t);
            if g <= F::zero() {
                return Err(Error::Argument(format!(
                    "gauge must be positive, got {} at {}",
                    g.as_f64(),
                    t.as_f64()
                )));
            }
            let f = factor(items.len()).min(F::of(0.9)).max(F::of(1e-3));
            let r = (t + f * g).min(q);
            if r <= t {
                return Err(Error::GaugeTooSmall { at: t.as_f64(), max_cells: MAX_CELLS });
            }
            if r < q {
                items.push(TaggedCell { tag: t, cell: Cell::half_open(t, r)? });
                t = r;
            } else {
                // Reached the next anchor. Close at K's upper endpoint
                // unless that endpoint demands its own singleton tag.
                if q == k.b && !b_exceptional {
                    items.push(TaggedCell { tag: t, cell: Cell::closed(t, q)? });
                } else {
                    items.push(TaggedCell { tag: t, cell: Cell::half_open(t, q)? });
                }
                break;
            }
        }
    }
    if b_exceptional {
        items.push(TaggedCell { tag: k.b, cell: Cell::singleton(k.b) });
    }
    TaggedPartition::new(k, items)
}
