//! Function specs accepted on the command line.
//!
//! Three spellings are recognized:
//!
//! * a path ending in `.json`, read and parsed as a piecewise document;
//! * an inline JSON object (starts with `{`), parsed the same way;
//! * a compact DSL `name[:args]` whose domain comes from context
//!   (`--domain`, the model interval, or the operator's spectral hull).
//!
//! DSL forms: `identity`, `square`, `const:RE[,IM]`, `poly:c0,c1,...`,
//! `sin:FREQ[,PHASE[,AMP]]`, `exp:RATE[,SCALE]`, `heaviside:C`,
//! `indicator:LO,HI`, `thomae:LEVEL`.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use gauge_spectral::interval::{Cell, Interval};
use gauge_spectral::regulated::RegulatedFn;
use num_complex::Complex;

/// Parses a function spec. `k` is the context domain used by DSL
/// forms; JSON documents carry their own.
pub fn load_fn(spec: &str, k: Interval<f64>) -> Result<RegulatedFn<f64>> {
    if spec.ends_with(".json") {
        let doc = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        return Ok(RegulatedFn::from_json(&doc)?);
    }
    if spec.trim_start().starts_with('{') {
        return Ok(RegulatedFn::from_json(spec)?);
    }
    parse_dsl(spec, k)
}

fn parse_dsl(spec: &str, k: Interval<f64>) -> Result<RegulatedFn<f64>> {
    let (head, tail) = match spec.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (spec, None),
    };
    let args = parse_args(tail)?;
    let arity = |lo: usize, hi: usize| -> Result<()> {
        if args.len() < lo || args.len() > hi {
            bail!("{head} takes {lo}..={hi} arguments, got {}", args.len());
        }
        Ok(())
    };
    let f = match head {
        "identity" => {
            arity(0, 0)?;
            RegulatedFn::poly_re(k, &[0.0, 1.0])?
        }
        "square" => {
            arity(0, 0)?;
            RegulatedFn::poly_re(k, &[0.0, 0.0, 1.0])?
        }
        "const" => {
            arity(1, 2)?;
            let im = args.get(1).copied().unwrap_or(0.0);
            RegulatedFn::constant(k, Complex::new(args[0], im))
        }
        "poly" => {
            arity(1, usize::MAX)?;
            RegulatedFn::poly_re(k, &args)?
        }
        "sin" => {
            arity(1, 3)?;
            let freq = args[0];
            let phase = args.get(1).copied().unwrap_or(0.0);
            let amp = args.get(2).copied().unwrap_or(1.0);
            RegulatedFn::continuous_re(k, move |x| amp * (freq * x + phase).sin())?
        }
        "exp" => {
            arity(1, 2)?;
            let rate = args[0];
            let scale = args.get(1).copied().unwrap_or(1.0);
            RegulatedFn::continuous_re(k, move |x| scale * (rate * x).exp())?
        }
        "heaviside" => {
            arity(1, 1)?;
            RegulatedFn::heaviside(k, args[0])?
        }
        "indicator" => {
            arity(2, 2)?;
            let cell = if args[0] == args[1] {
                Cell::singleton(args[0])
            } else {
                Cell::closed(args[0], args[1])?
            };
            RegulatedFn::indicator(k, cell)?
        }
        "thomae" => {
            arity(1, 1)?;
            let level = args[0];
            if level < 1.0 || level.fract() != 0.0 {
                bail!("thomae level must be a positive integer, got {level}");
            }
            RegulatedFn::thomae(k, level as usize).map_err(|e| {
                anyhow!("{e}; pass --domain LO,HI with 0 < LO < HI < 1")
            })?
        }
        other => bail!(
            "unknown function {other:?}; expected identity, square, const, poly, \
             sin, exp, heaviside, indicator or thomae"
        ),
    };
    Ok(f)
}

fn parse_args(tail: Option<&str>) -> Result<Vec<f64>> {
    let Some(tail) = tail else { return Ok(Vec::new()) };
    tail.split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .with_context(|| format!("bad numeric argument {a:?}"))
        })
        .collect()
}

/// `LO,HI` pair.
pub fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let nums = parse_args(Some(s))?;
    if nums.len() != 2 {
        bail!("expected LO,HI, got {s:?}");
    }
    Ok((nums[0], nums[1]))
}

/// `A,B,N` grid triple.
pub fn parse_grid(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        bail!("expected A,B,N, got {s:?}");
    }
    let a: f64 = parts[0].trim().parse().with_context(|| format!("bad grid bound {:?}", parts[0]))?;
    let b: f64 = parts[1].trim().parse().with_context(|| format!("bad grid bound {:?}", parts[1]))?;
    let n: usize = parts[2].trim().parse().with_context(|| format!("bad grid size {:?}", parts[2]))?;
    Ok((a, b, n))
}

/// Spectrum model selector: `finite` or `continuum:A,B`.
pub enum ModelSpec {
    Finite,
    Continuum(f64, f64),
}

pub fn parse_model(s: &str) -> Result<ModelSpec> {
    if s == "finite" {
        return Ok(ModelSpec::Finite);
    }
    if let Some(tail) = s.strip_prefix("continuum:") {
        let (a, b) = parse_pair(tail)?;
        return Ok(ModelSpec::Continuum(a, b));
    }
    bail!("unknown model {s:?}; expected finite or continuum:A,B");
}

/// Scalar symbol for unbounded models, evaluated on the whole line:
/// `identity`, `square`, `const:C` or `poly:c0,c1,...`.
pub fn parse_line_fn(spec: &str) -> Result<Box<dyn Fn(f64) -> Complex<f64>>> {
    let (head, tail) = match spec.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (spec, None),
    };
    let args = parse_args(tail)?;
    let f: Box<dyn Fn(f64) -> Complex<f64>> = match head {
        "identity" if args.is_empty() => Box::new(|x| Complex::new(x, 0.0)),
        "square" if args.is_empty() => Box::new(|x| Complex::new(x * x, 0.0)),
        "const" if args.len() == 1 => {
            let c = args[0];
            Box::new(move |_| Complex::new(c, 0.0))
        }
        "poly" if !args.is_empty() => Box::new(move |x| {
            let mut acc = 0.0;
            for &c in args.iter().rev() {
                acc = acc * x + c;
            }
            Complex::new(acc, 0.0)
        }),
        _ => bail!(
            "unknown line function {spec:?}; expected identity, square, const:C or poly:c0,c1,..."
        ),
    };
    Ok(f)
}

/// Density selector for unbounded models: `gauss[:SIGMA]` for a unit
/// Gaussian mass, `power:P` for `(1 + x^2)^{-P}`.
pub fn parse_density(s: &str) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    let (head, tail) = match s.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (s, None),
    };
    let args = parse_args(tail)?;
    let rho: Box<dyn Fn(f64) -> f64 + Send + Sync> = match head {
        "gauss" if args.len() <= 1 => {
            let sigma = args.first().copied().unwrap_or(1.0);
            if !(sigma > 0.0) {
                bail!("gauss sigma must be positive, got {sigma}");
            }
            let norm = sigma * (2.0 * std::f64::consts::PI).sqrt();
            Box::new(move |x| (-x * x / (2.0 * sigma * sigma)).exp() / norm)
        }
        "power" if args.len() == 1 => {
            let p = args[0];
            if !(p > 0.0) {
                bail!("power exponent must be positive, got {p}");
            }
            Box::new(move |x| (1.0 + x * x).powf(-p))
        }
        _ => bail!("unknown density {s:?}; expected gauss[:SIGMA] or power:P"),
    };
    Ok(rho)
}
