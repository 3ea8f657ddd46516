//! Command-line front end for the gauge-integral functional calculus.
//!
//! Outputs are deterministic: the only randomness lives in `verify`,
//! which draws everything from one seeded generator, and floats are
//! printed in shortest round-trip form. Identical invocations produce
//! byte-identical bytes.

mod config;
mod fnspec;
mod io;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gauge_spectral::calculus::{apply_calculus, operator_norm};
use gauge_spectral::cauchy::{convergence_report, mild_solution, ConvergenceReport};
use gauge_spectral::interval::Interval;
use gauge_spectral::mapping::{spectral_map, SpectrumModel};
use gauge_spectral::matrix::Matrix;
use gauge_spectral::regulated::RegulatedFn;
use gauge_spectral::spectral::{
    default_cluster_tol, grid_model, jacobi_eigh, pvm_from_eigensystem, SpectralMeasure,
};
use gauge_spectral::unbounded::{domain_member, UnboundedModel};
use gauge_spectral::util::linspace;
use gauge_spectral::verify::{all_passed, render, run_battery};
use num_complex::Complex;

use crate::fnspec::ModelSpec;

#[derive(Parser)]
#[command(
    name = "gauge-spectral",
    version,
    about = "Gauge-integral functional calculus: f(A), spectra, semigroups"
)]
struct Cli {
    /// Seed for the verification battery.
    #[arg(long, global = true, env = "GAUGE_SPECTRAL_SEED", default_value_t = 42)]
    seed: u64,
    /// On failure, print a JSON error object to stdout instead of text
    /// to stderr.
    #[arg(long, global = true)]
    error_json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply a regulated function to a symmetric matrix: f(A) as CSV.
    Apply(ApplyArgs),
    /// Spectrum of f(A) under the chosen spectrum model, as JSON.
    SpectrumMap(SpectrumMapArgs),
    /// Thomae truncations applied to a fixed two-point operator:
    /// operator-norm convergence table plus function samples.
    ThomaeDemo(ThomaeDemoArgs),
    /// Multiplication-operator norm of f on a grid model against the
    /// sampled sup norm.
    MultNorm(MultNormArgs),
    /// Domain membership test for an unbounded multiplication model.
    DomainTest(DomainTestArgs),
    /// Mild solution of u' = A u + f(t) with step-semigroup
    /// approximants and a convergence report.
    CauchySolve(CauchySolveArgs),
    /// Run the seeded invariant battery; exits nonzero on any failure.
    Verify,
}

#[derive(clap::Args)]
struct ApplyArgs {
    /// Square, exactly symmetric real matrix in CSV rows.
    #[arg(long, value_name = "FILE")]
    matrix: PathBuf,
    /// Function spec: DSL, inline JSON or a .json document path.
    #[arg(long = "fn", value_name = "SPEC")]
    func: String,
    /// Domain K = LO,HI for DSL functions; defaults to a hair beyond
    /// the spectral hull of the matrix.
    #[arg(long, value_name = "LO,HI")]
    domain: Option<String>,
    /// Step-approximation budget for f(A).
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SpectrumMapArgs {
    /// Function spec: DSL, inline JSON or a .json document path.
    #[arg(long = "fn", value_name = "SPEC")]
    func: String,
    /// Spectrum model: finite (needs --matrix) or continuum:A,B.
    #[arg(long, value_name = "MODEL")]
    model: String,
    /// Matrix CSV for the finite model.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    /// Domain K = LO,HI for DSL functions under the finite model.
    #[arg(long, value_name = "LO,HI")]
    domain: Option<String>,
    /// Node count of the grid measure backing the continuum model.
    #[arg(long, default_value_t = 256)]
    grid_n: usize,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ThomaeDemoArgs {
    /// Deepest truncation level L; the table compares levels 1..=L
    /// against level L.
    #[arg(long, default_value_t = 6)]
    levels: usize,
    /// Sample count for the function trace over [0.05, 0.95].
    #[arg(long, default_value_t = 257)]
    samples: usize,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct MultNormArgs {
    /// Function spec: DSL, inline JSON or a .json document path.
    #[arg(long = "fn", value_name = "SPEC")]
    func: String,
    /// Grid model A,B,N.
    #[arg(long, value_name = "A,B,N")]
    grid: String,
    /// Step-approximation budget.
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DomainTestArgs {
    /// Atomic model: CSV rows lambda,weight.
    #[arg(long, value_name = "FILE", conflicts_with = "density")]
    atoms: Option<PathBuf>,
    /// Density model: gauss[:SIGMA] or power:P for (1+x^2)^{-P}.
    #[arg(long, value_name = "SPEC")]
    density: Option<String>,
    /// Symbol to test: identity, square, const:C or poly:c0,c1,...
    #[arg(long = "fn", value_name = "SPEC", default_value = "identity")]
    func: String,
    /// Cauchy-tail certificate budget.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Atom / shell budget before divergence is suspected.
    #[arg(long, default_value_t = 200_000)]
    max_n: usize,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CauchySolveArgs {
    /// JSON problem description; see the README for the schema.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Trajectory output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Convergence-report output file; defaults to following the
    /// trajectory on its stream.
    #[arg(long, value_name = "FILE")]
    report_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            if cli.error_json {
                let kind = e
                    .downcast_ref::<gauge_spectral::Error>()
                    .map(error_kind)
                    .or_else(|| e.downcast_ref::<std::io::Error>().map(|_| "io"))
                    .unwrap_or("cli");
                let doc = serde_json::json!({
                    "error": { "kind": kind, "message": format!("{e:#}") }
                });
                println!("{doc}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Apply(args) => cmd_apply(args)?,
        Cmd::SpectrumMap(args) => cmd_spectrum_map(args)?,
        Cmd::ThomaeDemo(args) => cmd_thomae_demo(args)?,
        Cmd::MultNorm(args) => cmd_mult_norm(args)?,
        Cmd::DomainTest(args) => cmd_domain_test(args)?,
        Cmd::CauchySolve(args) => cmd_cauchy_solve(args)?,
        Cmd::Verify => return cmd_verify(cli.seed),
    }
    Ok(ExitCode::SUCCESS)
}

fn error_kind(e: &gauge_spectral::Error) -> &'static str {
    use gauge_spectral::Error::*;
    match e {
        Argument(_) => "argument",
        Dimension(_) => "dimension",
        NotSymmetric { .. } => "not-symmetric",
        OutsideDomain { .. } => "outside-domain",
        Convergence(_) => "convergence",
        EssentialDiscontinuity { .. } => "essential-discontinuity",
        GaugeTooSmall { .. } => "gauge-too-small",
        DivergenceSuspected { .. } => "divergence-suspected",
        Parse(_) => "parse",
        Io(_) => "io",
        Json(_) => "json",
    }
}

/// Reads, parses and symmetry-checks an operator CSV, returning it with
/// its projection-valued measure and eigenvalues.
fn load_operator(path: &PathBuf) -> Result<(Matrix<f64>, SpectralMeasure<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let a = io::parse_matrix_csv(&text)?;
    a.check_symmetric(0.0)?;
    let es = jacobi_eigh(&a, 1e-14)?;
    let e = pvm_from_eigensystem(&es, default_cluster_tol(&es));
    Ok((a, e, es.values))
}

/// DSL domain: an explicit LO,HI override, else the spectral hull
/// padded by a relative hair so endpoint eigenvalues stay interior.
fn dsl_domain(domain: Option<&str>, eigs: &[f64]) -> Result<Interval<f64>> {
    if let Some(d) = domain {
        let (lo, hi) = fnspec::parse_pair(d)?;
        return Ok(Interval::new(lo, hi)?);
    }
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
    Ok(Interval::new(lo - pad, hi + pad)?)
}

fn cmd_apply(args: &ApplyArgs) -> Result<()> {
    let (_, e, eigs) = load_operator(&args.matrix)?;
    let k = dsl_domain(args.domain.as_deref(), &eigs)?;
    let f = fnspec::load_fn(&args.func, k)?;
    let fa = apply_calculus(&f, &e, args.eps)?;
    io::emit(args.out.as_deref(), &io::matrix_to_csv(&fa))
}

fn cmd_spectrum_map(args: &SpectrumMapArgs) -> Result<()> {
    let (f, e, model) = match fnspec::parse_model(&args.model)? {
        ModelSpec::Continuum(a, b) => {
            let k = Interval::new(a, b)?;
            let f = fnspec::load_fn(&args.func, k)?;
            let fk = f.k();
            if fk.a > a || fk.b < b {
                bail!(
                    "function domain [{}, {}] does not cover the model interval [{a}, {b}]",
                    fk.a,
                    fk.b
                );
            }
            (f, grid_model(a, b, args.grid_n)?, SpectrumModel::Continuum(k))
        }
        ModelSpec::Finite => {
            let Some(path) = &args.matrix else {
                bail!("--model finite needs --matrix");
            };
            let (_, e, eigs) = load_operator(path)?;
            let k = dsl_domain(args.domain.as_deref(), &eigs)?;
            let f = fnspec::load_fn(&args.func, k)?;
            (f, e, SpectrumModel::Finite)
        }
    };
    let map = spectral_map(&f, &e, model)?;
    io::emit(args.out.as_deref(), &(map.to_json() + "\n"))
}

fn cmd_thomae_demo(args: &ThomaeDemoArgs) -> Result<()> {
    if args.levels < 1 {
        bail!("--levels must be at least 1");
    }
    if args.samples < 2 {
        bail!("--samples must be at least 2");
    }
    let k = Interval::new(0.05, 0.95)?;
    let a = Matrix::diag(&[0.5, std::f64::consts::FRAC_1_SQRT_2]);
    let es = jacobi_eigh(&a, 1e-14)?;
    let e = pvm_from_eigensystem(&es, default_cluster_tol(&es));
    let deep = RegulatedFn::thomae(k, args.levels)?;
    let ta = apply_calculus(&deep, &e, 1e-12)?;
    let mut out = String::from("kind,x,value\n");
    for n in 1..=args.levels {
        let tn = apply_calculus(&RegulatedFn::thomae(k, n)?, &e, 1e-12)?;
        let gap = operator_norm(&(&tn - &ta), None)?;
        out.push_str(&format!("gap,{n},{gap}\n"));
    }
    for x in linspace(k.a, k.b, args.samples) {
        out.push_str(&format!("sample,{x},{}\n", deep.eval(x)?.re));
    }
    io::emit(args.out.as_deref(), &out)
}

fn cmd_mult_norm(args: &MultNormArgs) -> Result<()> {
    let (a, b, n) = fnspec::parse_grid(&args.grid)?;
    let e = grid_model(a, b, n)?;
    let f = fnspec::load_fn(&args.func, Interval::new(a, b)?)?;
    let fa = apply_calculus(&f, &e, args.eps)?;
    let opn = operator_norm(&fa, None)?;
    let mut sup = 0.0f64;
    for x in e.spectrum_points() {
        sup = sup.max(f.eval(x)?.norm());
    }
    let text = match args.format {
        Format::Csv => format!("operator_norm,sup_norm\n{opn},{sup}\n"),
        Format::Json => {
            serde_json::json!({ "operator_norm": opn, "sup_norm": sup }).to_string() + "\n"
        }
    };
    io::emit(args.out.as_deref(), &text)
}

fn cmd_domain_test(args: &DomainTestArgs) -> Result<()> {
    let model = match (&args.atoms, &args.density) {
        (Some(path), None) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            UnboundedModel::from_atom_list(io::parse_atoms_csv(&text)?)?
        }
        (None, Some(d)) => UnboundedModel::density(fnspec::parse_density(d)?),
        _ => bail!("pass exactly one of --atoms or --density"),
    };
    let f = fnspec::parse_line_fn(&args.func)?;
    let verdict = domain_member(|x| f(x), &model, args.eps, args.max_n)?;
    let bound = if verdict.bound_used.is_finite() {
        serde_json::json!(verdict.bound_used)
    } else {
        serde_json::json!("infinity")
    };
    let doc = serde_json::json!({
        "member": verdict.member,
        "partial_sums": verdict.partial_sums,
        "bound_used": bound,
    });
    io::emit(args.out.as_deref(), &(doc.to_string() + "\n"))
}

fn cmd_cauchy_solve(args: &CauchySolveArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg: config::CauchyConfig =
        serde_json::from_str(&text).context("parsing cauchy config")?;
    if cfg.quad_steps < 2 || cfg.quad_steps % 2 != 0 {
        bail!("quad_steps must be even and at least 2, got {}", cfg.quad_steps);
    }
    let (s, d) = cfg.build()?;
    let states: Vec<Vec<Complex<f64>>> = cfg
        .times
        .iter()
        .map(|&t| mild_solution(&s, &d, t, cfg.quad_steps))
        .collect::<gauge_spectral::Result<_>>()?;
    let report: Option<ConvergenceReport<f64>> = if cfg.levels.is_empty() {
        None
    } else {
        Some(convergence_report(&s, &d, &cfg.levels, &cfg.times, cfg.quad_steps)?)
    };
    match args.format {
        Format::Csv => {
            let mut traj = String::from("t");
            for j in 0..s.dimension() {
                traj.push_str(&format!(",u{j}"));
            }
            traj.push('\n');
            for (t, u) in cfg.times.iter().zip(&states) {
                traj.push_str(&format!("{t}"));
                for &z in u {
                    traj.push(',');
                    traj.push_str(&io::fmt_complex(z));
                }
                traj.push('\n');
            }
            match (&args.report_out, &report) {
                (_, None) => io::emit(args.out.as_deref(), &traj)?,
                (Some(path), Some(r)) => {
                    io::emit(args.out.as_deref(), &traj)?;
                    io::emit(Some(path), &r.to_csv())?;
                }
                (None, Some(r)) => {
                    io::emit(args.out.as_deref(), &format!("{traj}\n{}", r.to_csv()))?;
                }
            }
        }
        Format::Json => {
            let states_json: Vec<Vec<[f64; 2]>> = states
                .iter()
                .map(|u| u.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            let report_json = match &report {
                Some(r) => serde_json::from_str::<serde_json::Value>(&r.to_json())?,
                None => serde_json::Value::Null,
            };
            let doc = serde_json::json!({
                "times": cfg.times,
                "states": states_json,
                "report": report_json,
            });
            io::emit(args.out.as_deref(), &(doc.to_string() + "\n"))?;
            if let (Some(path), Some(r)) = (&args.report_out, &report) {
                io::emit(Some(path), &(r.to_json() + "\n"))?;
            }
        }
    }
    Ok(())
}

fn cmd_verify(seed: u64) -> Result<ExitCode> {
    let results = run_battery(seed);
    io::emit(None, &render(&results))?;
    Ok(if all_passed(&results) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
