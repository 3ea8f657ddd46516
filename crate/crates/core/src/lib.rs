//! Gauge-integral functional calculus for self-adjoint operators.
//!
//! The crate builds `f(A)` for a regulated function `f` and a
//! self-adjoint operator `A` by integrating `f` against the spectral
//! measure of `A` with Henstock-Kurzweil (gauge) tagged partitions.
//! Discontinuities of `f` at eigenvalues are handled exactly by
//! anchoring partition tags at the discontinuity points, so no
//! continuity assumptions are needed beyond the existence of one-sided
//! limits.
//!
//! Modules, roughly bottom-up:
//!
//! * [`regulated`]: step, piecewise and atomic-overlay functions, their
//!   algebra, discontinuity classification, and uniform step
//!   approximation.
//! * [`gauge`]: gauges, tagged partitions, fineness checking and the
//!   compatible-partition construction.
//! * [`spectral`]: a cyclic Jacobi eigensolver, projection-valued
//!   measures for matrix and grid models, and scalar spectral measures.
//! * [`calculus`]: Henstock-Kurzweil sums against spectral measures and
//!   the operator map `f -> f(A)` with its homomorphism checks.
//! * [`mapping`]: spectrum approximation and the spectral mapping
//!   theorem, including its failure at removable discontinuities.
//! * [`unbounded`]: truncation-based calculus for unbounded operators,
//!   domain membership certificates and divergence detection.
//! * [`cauchy`]: step-function semigroup approximants and mild
//!   solutions of the abstract Cauchy problem.
//! * [`verify`]: a deterministic, seeded self-check battery.
//!
//! The numeric code is generic over the scalar via [`scalar::Real`]
//! (`f32` or `f64`); the crate root re-exports `f64` aliases for the
//! common types.

pub mod calculus;
pub mod cauchy;
pub mod error;
pub mod gauge;
pub mod interval;
pub mod mapping;
pub mod matrix;
pub mod quad;
pub mod regulated;
pub mod scalar;
pub mod spectral;
pub mod unbounded;
pub mod util;
pub mod verify;

pub use error::{Error, Result, MAX_CELLS};
pub use scalar::{Element, Real};

/// `f64` aliases for the main types.
pub mod f64_api {
    pub type Interval = crate::interval::Interval<f64>;
    pub type Cell = crate::interval::Cell<f64>;
    pub type RealMatrix = crate::matrix::Matrix<f64>;
    pub type ComplexMatrix = crate::matrix::Matrix<num_complex::Complex<f64>>;
    pub type RegulatedFn = crate::regulated::RegulatedFn<f64>;
    pub type StepFn = crate::regulated::StepFn<f64>;
    pub type Gauge = crate::gauge::Gauge<f64>;
    pub type TaggedPartition = crate::gauge::TaggedPartition<f64>;
    pub type EigenSystem = crate::spectral::EigenSystem<f64>;
    pub type SpectralMeasure = crate::spectral::SpectralMeasure<f64>;
    pub type ScalarMeasure = crate::spectral::ScalarMeasure<f64>;
    pub type HkIntegral = crate::calculus::HkIntegral<f64>;
    pub type SpectrumApprox = crate::mapping::SpectrumApprox<f64>;
    pub type UnboundedModel = crate::unbounded::UnboundedModel<f64>;
    pub type SemigroupModel = crate::cauchy::SemigroupModel<f64>;
    pub type StepSemigroup = crate::cauchy::StepSemigroup<f64>;
    pub type Datum = crate::cauchy::Datum<f64>;
}

pub use f64_api::*;
