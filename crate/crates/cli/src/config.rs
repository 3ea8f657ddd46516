//! JSON configuration for `cauchy-solve`.

use anyhow::{bail, Result};
use gauge_spectral::cauchy::{Datum, SemigroupModel};
use gauge_spectral::interval::Interval;
use gauge_spectral::regulated::RegulatedFn;
use gauge_spectral::spectral::grid_model;
use num_complex::Complex;
use serde::Deserialize;

use crate::fnspec;

fn default_quad_steps() -> usize {
    200
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyConfig {
    /// Spatial interval `[a, b]` carrying the grid multiplication model.
    pub interval: [f64; 2],
    /// Number of grid nodes.
    pub grid: usize,
    /// Generator symbol: a function DSL string or a piecewise document.
    pub g: GeneratorSpec,
    /// Off-node points of a spectrally invisible perturbation of `g`.
    #[serde(default)]
    pub perturbation: Vec<f64>,
    /// Initial state: `"ones"` or one real value per node.
    pub x0: StateSpec,
    pub forcing: ForcingSpec,
    /// Largest admissible solution time.
    pub horizon: f64,
    /// Times at which the trajectory is reported.
    pub times: Vec<f64>,
    /// Step-semigroup levels for the convergence report; empty skips it.
    #[serde(default)]
    pub levels: Vec<usize>,
    /// Simpson panel count for the Duhamel convolution (even).
    #[serde(default = "default_quad_steps")]
    pub quad_steps: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Dsl(String),
    Piecewise(serde_json::Value),
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Values(Vec<f64>),
}

/// Forcing `f(t)` as a scalar profile broadcast over the grid nodes.
#[derive(Deserialize, Clone, Copy)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "lowercase")]
pub enum ForcingSpec {
    Zero,
    Const { value: f64 },
    Sin {
        freq: f64,
        #[serde(default = "default_amp")]
        amp: f64,
    },
    Exp {
        rate: f64,
        #[serde(default = "default_amp")]
        scale: f64,
    },
}

fn default_amp() -> f64 {
    1.0
}

impl ForcingSpec {
    fn at(self, t: f64) -> f64 {
        match self {
            ForcingSpec::Zero => 0.0,
            ForcingSpec::Const { value } => value,
            ForcingSpec::Sin { freq, amp } => amp * (freq * t).sin(),
            ForcingSpec::Exp { rate, scale } => scale * (rate * t).exp(),
        }
    }
}

impl CauchyConfig {
    /// Builds the semigroup model and datum, validating every field.
    pub fn build(&self) -> Result<(SemigroupModel<f64>, Datum<f64>)> {
        let k = Interval::new(self.interval[0], self.interval[1])?;
        let g = match &self.g {
            GeneratorSpec::Dsl(s) => fnspec::load_fn(s, k)?,
            GeneratorSpec::Piecewise(v) => RegulatedFn::from_json(&v.to_string())?,
        };
        let grid = grid_model(k.a, k.b, self.grid)?;
        let s = SemigroupModel::new(g, grid, self.perturbation.clone())?;
        let dim = s.dimension();
        let x0: Vec<Complex<f64>> = match &self.x0 {
            StateSpec::Named(name) if name == "ones" => {
                vec![Complex::new(1.0, 0.0); dim]
            }
            StateSpec::Named(other) => bail!("unknown x0 {other:?}; expected \"ones\""),
            StateSpec::Values(v) => {
                if v.len() != dim {
                    bail!("x0 has {} entries for a grid of {dim} nodes", v.len());
                }
                v.iter().map(|&x| Complex::new(x, 0.0)).collect()
            }
        };
        if self.times.is_empty() {
            bail!("times must list at least one sample time");
        }
        for &t in &self.times {
            if !(0.0 <= t && t <= self.horizon) {
                bail!("time {t} outside [0, horizon = {}]", self.horizon);
            }
        }
        let forcing = self.forcing;
        let d = Datum::new(
            x0,
            move |t: f64| vec![Complex::new(forcing.at(t), 0.0); dim],
            self.horizon,
        )?;
        Ok((s, d))
    }
}
