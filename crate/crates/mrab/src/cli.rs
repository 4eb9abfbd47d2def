//! Command-line front end. One subcommand per capability; artifacts are CSV
//! or JSON written atomically, with a one-line summary on stdout. Without
//! `--out` the artifact itself goes to stdout and the summary to stderr, so
//! pipelines stay clean either way.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or config), 2 numerical
//! failure (a computation rejected the problem).
//!
//! Commands that take a JSON config (`advect`, `advect-overset`,
//! `perf-model`) merge it with flags; flags win. Config schemas reject
//! unknown keys.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::coeffs::ab_weights;
use crate::eoc::estimate_order;
use crate::multirate::{mrab_bootstrap, mrab_integrate, mrab_macro_step, MrabConfig, TwoRateSystem};
use crate::output::{fmt_f64, write_json, CsvTable};
use crate::pde1d::{
    advection_rhs_with_inflow, compute_timestep, Grid1D, MetricPoint, OversetPair1D, SbpOperator,
};
use crate::perfmodel::{rhs_counts, PerfModelInput, AB34_STEP_RATIOS, AB45_STEP_RATIOS};
use crate::stability::{
    ab_stability_dim, ab_stability_layout, ab_stability_advance, boundary_locus,
    build_step_matrix, max_stable_dt, spectral_radius, DEFAULT_EPSILON,
};
use crate::steppers::{ab_bootstrap, ab_step, integrate_to, rk_step, RkKind, StepperSpec};

/// Entry point for the `mrab` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Integrate(a) => cmd_integrate(a),
        Command::Advect(a) => cmd_advect(a),
        Command::AdvectOverset(a) => cmd_advect_overset(a),
        Command::StabilityRegion(a) => cmd_stability_region(a),
        Command::MaxDt(a) => cmd_max_dt(a),
        Command::StepMatrix(a) => cmd_step_matrix(a),
        Command::PerfModel(a) => cmd_perf_model(a),
        Command::Eoc(a) => cmd_eoc(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            2
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
}

fn usage<E: Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn numerical<E: Display>(e: E) -> Failure {
    Failure::Numerical(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "mrab",
    version,
    about = "Multi-rate Adams-Bashforth toolkit: integrators, stability lab, advection testbed"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adams-Bashforth weights for one step over an interval
    Coeffs(CoeffsArgs),
    /// Integrate a built-in ODE problem and write the trajectory
    Integrate(IntegrateArgs),
    /// Periodic 1-D advection on the SBP testbed
    Advect(AdvectArgs),
    /// Two-grid overset advection channel driven by MRAB
    AdvectOverset(AdvectOversetArgs),
    /// Boundary-locus stability region of a scheme (500 rays)
    StabilityRegion(StabilityRegionArgs),
    /// Largest stable timestep on the advection testbed (bisection)
    MaxDt(MaxDtArgs),
    /// Finite-difference step matrix and its spectral radius
    StepMatrix(StepMatrixArgs),
    /// RHS-count performance model table
    PerfModel(PerfModelArgs),
    /// Estimated order of convergence over a dt refinement list
    Eoc(EocArgs),
}

// ---------------------------------------------------------------------------
// Flag vocabulary
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Rk3,
    Rk4,
    Ab,
    AbExt,
    Mrab,
    MrabExt,
}

impl SchemeArg {
    fn is_multirate(self) -> bool {
        matches!(self, SchemeArg::Mrab | SchemeArg::MrabExt)
    }

    fn label(self) -> &'static str {
        match self {
            SchemeArg::Rk3 => "rk3",
            SchemeArg::Rk4 => "rk4",
            SchemeArg::Ab => "ab",
            SchemeArg::AbExt => "ab-ext",
            SchemeArg::Mrab => "mrab",
            SchemeArg::MrabExt => "mrab-ext",
        }
    }

    fn default_order(self) -> usize {
        match self {
            SchemeArg::Rk4 => 4,
            _ => 3,
        }
    }

    /// Single-rate stepper spec, or a usage error for multi-rate schemes.
    fn single_rate(self, order: usize) -> Result<StepperSpec, Failure> {
        match self {
            SchemeArg::Rk3 => {
                if order != 3 {
                    return Err(Failure::Usage("rk3 has fixed order 3".into()));
                }
                Ok(StepperSpec::Rk3)
            }
            SchemeArg::Rk4 => {
                if order != 4 {
                    return Err(Failure::Usage("rk4 has fixed order 4".into()));
                }
                Ok(StepperSpec::Rk4)
            }
            SchemeArg::Ab => Ok(StepperSpec::ab(order)),
            SchemeArg::AbExt => Ok(StepperSpec::ab_extended(order)),
            SchemeArg::Mrab | SchemeArg::MrabExt => Err(Failure::Usage(format!(
                "{} is multi-rate; this command is single-rate",
                self.label()
            ))),
        }
    }

    /// MRAB history length for `order`, or a usage error for single-rate
    /// schemes.
    fn mrab_history(self, order: usize) -> Result<usize, Failure> {
        match self {
            SchemeArg::Mrab => Ok(order),
            SchemeArg::MrabExt => Ok(order + 1),
            _ => Err(Failure::Usage(format!(
                "{} is single-rate; use mrab or mrab-ext here",
                self.label()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    /// y' = -y, y(0) = 1
    Decay,
    /// Two-component linear system with a fast and a slow mode
    CoupledLinear,
    /// y' = 3t^2 - 2t + 1/2: quadratic RHS, integrated exactly by AB3
    Poly2,
}

/// Comma-separated float list (`-2,-1,0`).
#[derive(Debug, Clone, PartialEq)]
struct F64List(Vec<f64>);

impl FromStr for F64List {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("'{}': {e}", t.trim()))
            })
            .collect::<Result<Vec<f64>, _>>()
            .map(F64List)
    }
}

/// Comma-separated float pair (`0,1`).
#[derive(Debug, Clone, Copy, PartialEq)]
struct FloatPair(f64, f64);

impl FromStr for FloatPair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = F64List::from_str(s)?.0;
        if v.len() != 2 {
            return Err(format!("expected two comma-separated values, got {}", v.len()));
        }
        Ok(FloatPair(v[0], v[1]))
    }
}

fn order_in_range(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v == 3 || v == 4 {
        Ok(v)
    } else {
        Err("order must be 3 or 4".into())
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn emit_csv(table: &CsvTable, out: Option<&Path>, summary: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            table.write(p).map_err(numerical)?;
            println!("{summary} -> {}", p.display());
        }
        None => {
            print!("{}", table.render());
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, summary: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            write_json(p, value).map_err(numerical)?;
            println!("{summary} -> {}", p.display());
        }
        None => {
            let mut text = serde_json::to_string_pretty(value).map_err(numerical)?;
            text.push('\n');
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn load_config<T: Default + for<'de> Deserialize<'de>>(
    path: Option<&Path>,
) -> Result<T, Failure> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", p.display())))
        }
    }
}

fn scheme_from_name(name: &str) -> Result<SchemeArg, Failure> {
    SchemeArg::from_str(name, true)
        .map_err(|_| Failure::Usage(format!("unknown scheme '{name}'")))
}

/// Resolve the `dt`-vs-`cfl` choice after merging flags over a config file.
/// Exactly one source wins; flags shadow the file entirely.
fn resolve_step(
    flag_dt: Option<f64>,
    flag_cfl: Option<f64>,
    file_dt: Option<f64>,
    file_cfl: Option<f64>,
    default_cfl: f64,
) -> Result<(Option<f64>, f64), Failure> {
    if flag_dt.is_some() && flag_cfl.is_some() {
        return Err(Failure::Usage("--dt and --cfl are mutually exclusive".into()));
    }
    if flag_dt.is_some() || flag_cfl.is_some() {
        return Ok((flag_dt, flag_cfl.unwrap_or(0.0)));
    }
    if file_dt.is_some() && file_cfl.is_some() {
        return Err(Failure::Usage("config sets both dt and cfl".into()));
    }
    if file_dt.is_some() || file_cfl.is_some() {
        return Ok((file_dt, file_cfl.unwrap_or(0.0)));
    }
    Ok((None, default_cfl))
}

/// Built-in problems: dimension, initial state, RHS and exact solution.
struct Problem {
    dim: usize,
    y0: Vec<f64>,
    rhs: Box<dyn FnMut(f64, &[f64]) -> Vec<f64>>,
    exact: Box<dyn Fn(f64) -> Vec<f64>>,
}

fn make_problem(which: ProblemArg) -> Problem {
    match which {
        ProblemArg::Decay => Problem {
            dim: 1,
            y0: vec![1.0],
            rhs: Box::new(|_t, y| vec![-y[0]]),
            exact: Box::new(|t| vec![(-t).exp()]),
        },
        ProblemArg::CoupledLinear => Problem {
            dim: 2,
            y0: COUPLED_Y0.to_vec(),
            rhs: Box::new(|_t, y| vec![-y[0] + 0.1 * y[1], -0.05 * y[1] + 0.1 * y[0]]),
            exact: Box::new(|t| coupled_exact(t).to_vec()),
        },
        ProblemArg::Poly2 => Problem {
            dim: 1,
            y0: vec![0.2],
            rhs: Box::new(|t, _y| vec![3.0 * t * t - 2.0 * t + 0.5]),
            exact: Box::new(|t| vec![t * t * t - t * t + 0.5 * t + 0.2]),
        },
    }
}

/// Fast/slow benchmark system: y = (f, s) with f' = -f + 0.1 s and
/// s' = -0.05 s + 0.1 f.
const COUPLED_Y0: [f64; 2] = [1.0, 0.5];

fn coupled_exact(t: f64) -> [f64; 2] {
    // The coupling matrix is symmetric, so the exact propagator follows
    // from its eigendecomposition.
    let a = nalgebra::Matrix2::new(-1.0, 0.1, 0.1, -0.05);
    let se = nalgebra::SymmetricEigen::new(a);
    let w = se.eigenvectors.transpose() * nalgebra::Vector2::new(COUPLED_Y0[0], COUPLED_Y0[1]);
    let scaled = nalgebra::Vector2::new(
        w[0] * (se.eigenvalues[0] * t).exp(),
        w[1] * (se.eigenvalues[1] * t).exp(),
    );
    let y = se.eigenvectors * scaled;
    [y[0], y[1]]
}

// ---------------------------------------------------------------------------
// coeffs
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CoeffsArgs {
    /// History nodes, oldest first, e.g. -2,-1,0
    #[arg(long, allow_hyphen_values = true)]
    nodes: F64List,
    /// Quadrature order (number of exactly integrated monomials)
    #[arg(long, value_parser = order_in_range)]
    order: usize,
    /// Step interval a,b
    #[arg(long, allow_hyphen_values = true)]
    interval: FloatPair,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_coeffs(a: CoeffsArgs) -> Result<(), Failure> {
    let w = ab_weights(&a.nodes.0, a.order, (a.interval.0, a.interval.1)).map_err(usage)?;
    let mut table = CsvTable::new(&["node", "alpha"]);
    for (n, al) in w.nodes.iter().zip(&w.alpha) {
        table.push_row(vec![*n, *al]);
    }
    let summary = format!(
        "coeffs: order {} over [{}, {}], {} nodes",
        a.order,
        a.interval.0,
        a.interval.1,
        w.nodes.len()
    );
    emit_csv(&table, a.out.as_deref(), &summary)
}

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Ab)]
    scheme: SchemeArg,
    #[arg(long, value_parser = order_in_range)]
    order: Option<usize>,
    /// Step size (micro step for multi-rate schemes)
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    /// Total step count (macro steps for multi-rate schemes), bootstrap
    /// included
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Step ratio for multi-rate schemes
    #[arg(long)]
    sr: Option<usize>,
    #[arg(long, value_enum, default_value_t = ProblemArg::Decay)]
    problem: ProblemArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_integrate(a: IntegrateArgs) -> Result<(), Failure> {
    let order = a.order.unwrap_or_else(|| a.scheme.default_order());
    if !(a.dt > 0.0) {
        return Err(Failure::Usage(format!("--dt {} must be positive", a.dt)));
    }
    if a.steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    if a.scheme.is_multirate() {
        return integrate_mrab(a, order);
    }
    if a.sr.is_some() {
        return Err(Failure::Usage("--sr only applies to mrab schemes".into()));
    }
    let spec = a.scheme.single_rate(order)?;
    let mut p = make_problem(a.problem);
    let rows = march_single_rate(spec, &mut p.rhs, &p.y0, 0.0, a.dt, a.steps)?;

    let mut header = vec!["t".to_string()];
    header.extend((0..p.dim).map(|i| format!("y{i}")));
    let mut table = CsvTable::new(&header);
    for (t, y) in &rows {
        let mut row = vec![*t];
        row.extend_from_slice(y);
        table.push_row(row);
    }
    let (tf, yf) = rows.last().expect("at least the initial row");
    let want = (p.exact)(*tf);
    let err = yf
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let summary = format!(
        "integrate: {} order {order} to t = {tf}, max error {err:.3e}",
        a.scheme.label()
    );
    emit_csv(&table, a.out.as_deref(), &summary)
}

fn integrate_mrab(a: IntegrateArgs, order: usize) -> Result<(), Failure> {
    if a.problem != ProblemArg::CoupledLinear {
        return Err(Failure::Usage(
            "mrab schemes need a partitioned problem; use --problem coupled-linear".into(),
        ));
    }
    let sr = a.sr.unwrap_or(2);
    if sr == 0 {
        return Err(Failure::Usage("--sr must be >= 1".into()));
    }
    let m = a.scheme.mrab_history(order)?;
    if a.steps < m {
        return Err(Failure::Usage(format!(
            "--steps {} cannot hold the {}-macro-step bootstrap plus one step",
            a.steps,
            m - 1
        )));
    }
    // --dt is the micro step; the macro step is SR times it.
    let big_h = a.dt * sr as f64;
    let cfg = MrabConfig::new(order, m, sr, big_h);
    let mut sys = TwoRateSystem {
        dim_f: 1,
        dim_s: 1,
        rhs_f: |_t: f64, f: &[f64], s: &[f64]| vec![-f[0] + 0.1 * s[0]],
        rhs_s: |_t: f64, f: &[f64], s: &[f64]| vec![-0.05 * s[0] + 0.1 * f[0]],
    };
    let mut state =
        mrab_bootstrap(&mut sys, 0.0, &[COUPLED_Y0[0]], &[COUPLED_Y0[1]], &cfg).map_err(numerical)?;
    let mut rows = vec![
        (0.0, COUPLED_Y0[0], COUPLED_Y0[1]),
        (state.t, state.f[0], state.s[0]),
    ];
    for j in m - 1..a.steps {
        state.t = j as f64 * big_h;
        mrab_macro_step(&mut sys, &mut state, &cfg).map_err(numerical)?;
        rows.push((state.t, state.f[0], state.s[0]));
    }
    let mut table = CsvTable::new(&["t", "f", "s"]);
    for (t, f, s) in &rows {
        table.push_row(vec![*t, *f, *s]);
    }
    let (tf, ff, sf) = *rows.last().expect("bootstrap row exists");
    let want = coupled_exact(tf);
    let err = (ff - want[0]).abs().max((sf - want[1]).abs());
    let summary = format!(
        "integrate: {} order {order} sr {sr} to t = {tf}, max error {err:.3e}",
        a.scheme.label()
    );
    emit_csv(&table, a.out.as_deref(), &summary)
}

fn march_single_rate(
    spec: StepperSpec,
    rhs: &mut dyn FnMut(f64, &[f64]) -> Vec<f64>,
    y0: &[f64],
    t0: f64,
    dt: f64,
    steps: usize,
) -> Result<Vec<(f64, Vec<f64>)>, Failure> {
    // Re-wrap so the generic steppers see a sized closure.
    let mut rhs = |t: f64, y: &[f64]| rhs(t, y);
    let mut rows = vec![(t0, y0.to_vec())];
    match spec {
        StepperSpec::Rk3 | StepperSpec::Rk4 => {
            let kind = if spec == StepperSpec::Rk3 {
                RkKind::Rk3
            } else {
                RkKind::Rk4
            };
            let mut y = y0.to_vec();
            for j in 0..steps {
                let t = t0 + j as f64 * dt;
                y = rk_step(&mut rhs, t, &y, dt, kind).map_err(numerical)?;
                rows.push((t0 + (j + 1) as f64 * dt, y.clone()));
            }
        }
        StepperSpec::Ab { history_len: m, .. } => {
            if steps < m {
                return Err(Failure::Usage(format!(
                    "--steps {steps} cannot hold the {}-step bootstrap plus one step",
                    m - 1
                )));
            }
            let mut st = ab_bootstrap(&mut rhs, t0, y0, dt, spec).map_err(numerical)?;
            rows.push((st.t, st.y.clone()));
            for j in m - 1..steps {
                st.t = t0 + j as f64 * dt;
                ab_step(&mut rhs, &mut st, dt, spec).map_err(numerical)?;
                rows.push((st.t, st.y.clone()));
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// advect
// ---------------------------------------------------------------------------

#[derive(Args)]
struct AdvectArgs {
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Domain a,b
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<FloatPair>,
    #[arg(long)]
    wave_speed: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_parser = order_in_range)]
    order: Option<usize>,
    #[arg(long)]
    sr: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AdvectFileConfig {
    #[serde(alias = "N")]
    n: Option<usize>,
    domain: Option<(f64, f64)>,
    wave_speed: Option<f64>,
    scheme: Option<String>,
    order: Option<usize>,
    sr: Option<usize>,
    dt: Option<f64>,
    cfl: Option<f64>,
    steps: Option<usize>,
}

fn cmd_advect(a: AdvectArgs) -> Result<(), Failure> {
    let file: AdvectFileConfig = load_config(a.config.as_deref())?;
    let n = a.n.or(file.n).unwrap_or(61);
    let (da, db) = a
        .domain
        .map(|p| (p.0, p.1))
        .or(file.domain)
        .unwrap_or((0.0, 1.01666));
    let c = a.wave_speed.or(file.wave_speed).unwrap_or(1.0);
    let scheme = match (a.scheme, file.scheme.as_deref()) {
        (Some(s), _) => s,
        (None, Some(name)) => scheme_from_name(name)?,
        (None, None) => SchemeArg::Rk4,
    };
    let order = a.order.or(file.order).unwrap_or_else(|| scheme.default_order());
    let steps = a.steps.or(file.steps).unwrap_or(100);
    if scheme.is_multirate() {
        return Err(Failure::Usage(
            "advect is single-grid; use advect-overset for mrab schemes".into(),
        ));
    }
    if a.sr.or(file.sr).map_or(false, |s| s > 1) {
        return Err(Failure::Usage("sr > 1 needs advect-overset".into()));
    }
    let spec = scheme.single_rate(order)?;
    let (dt_opt, cfl) = resolve_step(a.dt, a.cfl, file.dt, file.cfl, 0.4)?;

    let grid = Grid1D::periodic(da, db, n).map_err(usage)?;
    let op = SbpOperator::order_4_2();
    let dt = match dt_opt {
        Some(dt) => dt,
        None => {
            let pt = MetricPoint::cartesian_1d(grid.dx, 0.0, c.abs(), 0.0);
            compute_timestep(&[pt], cfl, false).map_err(numerical)?
        }
    };
    let span = db - da;
    let wave = |x: f64, t: f64| (2.0 * std::f64::consts::PI * ((x - da) - c * t) / span).sin();
    let u0: Vec<f64> = grid.x.iter().map(|&x| wave(x, 0.0)).collect();
    let mut rhs = |_t: f64, y: &[f64]| {
        advection_rhs_with_inflow(&grid, &op, y, c, 0.0).expect("state matches grid")
    };
    let rows = march_single_rate(spec, &mut rhs, &u0, 0.0, dt, steps)?;
    let (tf, uf) = rows.last().expect("at least the initial row");

    let mut table = CsvTable::new(&["x", "u"]);
    for (x, u) in grid.x.iter().zip(uf) {
        table.push_row(vec![*x, *u]);
    }
    let err = grid
        .x
        .iter()
        .zip(uf)
        .map(|(&x, &u)| (u - wave(x, *tf)).abs())
        .fold(0.0f64, f64::max);
    let summary = format!(
        "advect: {} order {order}, {n} points, dt = {dt:.6e}, t = {tf:.6e}, max error {err:.3e}",
        scheme.label()
    );
    emit_csv(&table, a.out.as_deref(), &summary)
}

// ---------------------------------------------------------------------------
// advect-overset
// ---------------------------------------------------------------------------

#[derive(Args)]
struct AdvectOversetArgs {
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_slow: Option<usize>,
    #[arg(long)]
    i0: Option<usize>,
    #[arg(long)]
    i1: Option<usize>,
    #[arg(long)]
    refine: Option<usize>,
    /// Domain a,b
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<FloatPair>,
    #[arg(long)]
    wave_speed: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_parser = order_in_range)]
    order: Option<usize>,
    #[arg(long)]
    sr: Option<usize>,
    /// Micro step on the fast grid
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Macro step count, bootstrap included
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct OversetFileConfig {
    n_slow: Option<usize>,
    i0: Option<usize>,
    i1: Option<usize>,
    refine: Option<usize>,
    domain: Option<(f64, f64)>,
    wave_speed: Option<f64>,
    scheme: Option<String>,
    order: Option<usize>,
    sr: Option<usize>,
    dt: Option<f64>,
    cfl: Option<f64>,
    steps: Option<usize>,
}

fn cmd_advect_overset(a: AdvectOversetArgs) -> Result<(), Failure> {
    let file: OversetFileConfig = load_config(a.config.as_deref())?;
    let n_slow = a.n_slow.or(file.n_slow).unwrap_or(65);
    let i0 = a.i0.or(file.i0).unwrap_or(19);
    let i1 = a.i1.or(file.i1).unwrap_or(45);
    let refine = a.refine.or(file.refine).unwrap_or(4);
    let (da, db) = a
        .domain
        .map(|p| (p.0, p.1))
        .or(file.domain)
        .unwrap_or((0.0, 1.0));
    let c = a.wave_speed.or(file.wave_speed).unwrap_or(1.0);
    let scheme = match (a.scheme, file.scheme.as_deref()) {
        (Some(s), _) => s,
        (None, Some(name)) => scheme_from_name(name)?,
        (None, None) => SchemeArg::Mrab,
    };
    let order = a.order.or(file.order).unwrap_or(3);
    let m = scheme.mrab_history(order)?;
    let sr = a.sr.or(file.sr).unwrap_or(2);
    if sr == 0 {
        return Err(Failure::Usage("sr must be >= 1".into()));
    }
    let steps = a.steps.or(file.steps).unwrap_or(200);
    if steps < m {
        return Err(Failure::Usage(format!(
            "steps {steps} cannot hold the {}-macro-step bootstrap plus one step",
            m - 1
        )));
    }
    let (dt_opt, cfl) = resolve_step(a.dt, a.cfl, file.dt, file.cfl, 0.3)?;

    let pair = OversetPair1D::build((da, db), n_slow, i0, i1, refine).map_err(usage)?;
    if !(c > 0.0) {
        return Err(Failure::Usage(format!(
            "wave speed {c} must be positive on the overset channel"
        )));
    }
    let h = match dt_opt {
        Some(dt) => dt,
        None => {
            let pt = MetricPoint::cartesian_1d(pair.grid_fast().dx, 0.0, c, 0.0);
            compute_timestep(&[pt], cfl, false).map_err(numerical)?
        }
    };
    let big_h = sr as f64 * h;
    let span = db - da;
    let wave = move |x: f64, t: f64| (2.0 * std::f64::consts::PI * ((x - da) - c * t) / span).sin();
    let us0: Vec<f64> = pair.grid_slow().x.iter().map(|&x| wave(x, 0.0)).collect();
    let uf0: Vec<f64> = pair.grid_fast().x.iter().map(|&x| wave(x, 0.0)).collect();

    let pr = &pair;
    let mut sys = TwoRateSystem {
        dim_f: pair.grid_fast().len(),
        dim_s: pair.grid_slow().len(),
        rhs_f: move |t: f64, f: &[f64], s: &[f64]| {
            pr.rhs(s, f, c, wave(da, t)).expect("state matches pair").1
        },
        rhs_s: move |t: f64, f: &[f64], s: &[f64]| {
            pr.rhs(s, f, c, wave(da, t)).expect("state matches pair").0
        },
    };
    let cfg = MrabConfig::new(order, m, sr, big_h);
    let t_end = steps as f64 * big_h;
    let run = mrab_integrate(&mut sys, 0.0, &uf0, &us0, t_end, &cfg).map_err(numerical)?;

    // Artifact: grid column 0 = slow (active rows only), 1 = fast.
    let mut table = CsvTable::new(&["grid", "x", "u"]);
    for &i in &pair.active_slow_indices() {
        table.push_row(vec![0.0, pair.grid_slow().x[i], run.s[i]]);
    }
    for (i, &x) in pair.grid_fast().x.iter().enumerate() {
        table.push_row(vec![1.0, x, run.f[i]]);
    }
    let mut err = 0.0f64;
    for &i in &pair.active_slow_indices() {
        err = err.max((run.s[i] - wave(pair.grid_slow().x[i], run.t)).abs());
    }
    for (i, &x) in pair.grid_fast().x.iter().enumerate() {
        err = err.max((run.f[i] - wave(x, run.t)).abs());
    }
    let summary = format!(
        "advect-overset: {} order {order} sr {sr}, {}+{} points, h = {h:.6e}, t = {:.6e}, max error {err:.3e}",
        scheme.label(),
        n_slow,
        pair.grid_fast().len(),
        run.t
    );
    emit_csv(&table, a.out.as_deref(), &summary)
}

// ---------------------------------------------------------------------------
// stability-region
// ---------------------------------------------------------------------------

#[derive(Args)]
struct StabilityRegionArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Rk4)]
    scheme: SchemeArg,
    #[arg(long, value_parser = order_in_range)]
    order: Option<usize>,
    /// Divide radii by the scheme's RHS evaluations per step
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_stability_region(a: StabilityRegionArgs) -> Result<(), Failure> {
    let order = a.order.unwrap_or_else(|| a.scheme.default_order());
    let spec = a.scheme.single_rate(order)?;
    let region = boundary_locus(spec, a.normalized);
    let mut table = CsvTable::new(&["theta", "r", "re", "im"]);
    let pts = region.boundary_points();
    for ((&th, &r), &(re, im)) in region.thetas.iter().zip(&region.r_max).zip(&pts) {
        table.push_row(vec![th, r, re, im]);
    }
    let crossing = region
        .imaginary_axis_crossing()
        .map(|v| format!("{v:.6}"))
        .unwrap_or_else(|| "none".into());
    let summary = format!(
        "stability-region: {} order {order}{}, {} rays, r(pi) = {:.6}, real extent {:.6}, imaginary-axis crossing {crossing}",
        a.scheme.label(),
        if a.normalized { " (normalized)" } else { "" },
        region.thetas.len(),
        region.radius_at_pi(),
        region.negative_real_extent()
    );
    emit_csv(&table, a.out.as_deref(), &summary)
}

// ---------------------------------------------------------------------------
// max-dt and step-matrix (shared testbed advance)
// ---------------------------------------------------------------------------

#[derive(Args)]
struct MaxDtArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Rk4)]
    scheme: SchemeArg,
    #[arg(long, value_parser = order_in_range)]
    order: Option<usize>,
    /// Periodic testbed size
    #[arg(long, default_value_t = 61)]
    n: usize,
    /// Domain a,b
    #[arg(long, allow_hyphen_values = true, default_value = "0,1.01666")]
    domain: FloatPair,
    #[arg(long, default_value_t = 1.0)]
    wave_speed: f64,
    /// Bisection bracket lo,hi
    #[arg(long, default_value = "0.005,0.2")]
    bracket: FloatPair,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct MaxDtArtifact {
    dt_max: f64,
    iterations: usize,
    rho_at_dt_max: f64,
}

/// Spectral radius of the step matrix of `spec` on the periodic advection
/// testbed at step `dt`.
fn testbed_rho(
    spec: StepperSpec,
    grid: &Grid1D,
    op: &SbpOperator,
    c: f64,
    dt: f64,
    epsilon: f64,
) -> Result<f64, crate::stability::StabilityError> {
    let sm = testbed_step_matrix(spec, grid, op, c, dt, epsilon)?;
    spectral_radius(&sm.g)
}

fn testbed_step_matrix(
    spec: StepperSpec,
    grid: &Grid1D,
    op: &SbpOperator,
    c: f64,
    dt: f64,
    epsilon: f64,
) -> Result<crate::stability::StepMatrix, crate::stability::StabilityError> {
    let n = grid.len();
    let mut rhs = |_t: f64, y: &[f64]| {
        advection_rhs_with_inflow(grid, op, y, c, 0.0).expect("state matches grid")
    };
    match spec {
        StepperSpec::Rk3 | StepperSpec::Rk4 => {
            let kind = if spec == StepperSpec::Rk3 {
                RkKind::Rk3
            } else {
                RkKind::Rk4
            };
            let mut advance = |phi: &[f64]| rk_step(&mut rhs, 0.0, phi, dt, kind);
            let base = vec![0.0; n];
            let sm = build_step_matrix(&mut advance, &base, dt, epsilon)?;
            Ok(sm.with_layout((0..n).map(|i| format!("u[{i}]")).collect()))
        }
        StepperSpec::Ab { history_len: m, .. } => {
            let mut advance = |phi: &[f64]| ab_stability_advance(&mut rhs, n, spec, dt, phi);
            let base = vec![0.0; ab_stability_dim(n, m)];
            let sm = build_step_matrix(&mut advance, &base, dt, epsilon)?;
            Ok(sm.with_layout(ab_stability_layout(n, m)))
        }
    }
}

fn cmd_max_dt(a: MaxDtArgs) -> Result<(), Failure> {
    let order = a.order.unwrap_or_else(|| a.scheme.default_order());
    let spec = a.scheme.single_rate(order)?;
    let grid = Grid1D::periodic(a.domain.0, a.domain.1, a.n).map_err(usage)?;
    let op = SbpOperator::order_4_2();
    let rho_at = |dt: f64| testbed_rho(spec, &grid, &op, a.wave_speed, dt, DEFAULT_EPSILON);
    let res = max_stable_dt(rho_at, (a.bracket.0, a.bracket.1)).map_err(numerical)?;
    let artifact = MaxDtArtifact {
        dt_max: res.dt_max,
        iterations: res.iterations,
        rho_at_dt_max: res.rho_at_dt_max,
    };
    let summary = format!(
        "max-dt: {} order {order} on {} periodic points, dt_max = {} after {} bisections (rho = {})",
        a.scheme.label(),
        a.n,
        fmt_f64(res.dt_max),
        res.iterations,
        fmt_f64(res.rho_at_dt_max)
    );
    emit_json(&artifact, a.out.as_deref(), &summary)
}

#[derive(Args)]
struct StepMatrixArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Ab)]
    scheme: SchemeArg,
    #[arg(long, value_parser = order_in_range)]
    order: Option<usize>,
    #[arg(long, default_value_t = 61)]
    n: usize,
    /// Domain a,b
    #[arg(long, allow_hyphen_values = true, default_value = "0,1.01666")]
    domain: FloatPair,
    #[arg(long, default_value_t = 1.0)]
    wave_speed: f64,
    #[arg(long, default_value_t = 0.004)]
    dt: f64,
    /// Forward-difference perturbation
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct StepMatrixArtifact {
    scheme: String,
    order: usize,
    n: usize,
    dt: f64,
    epsilon: f64,
    dim: usize,
    rho: f64,
    layout: Vec<String>,
    g: Vec<Vec<f64>>,
}

fn cmd_step_matrix(a: StepMatrixArgs) -> Result<(), Failure> {
    let order = a.order.unwrap_or_else(|| a.scheme.default_order());
    let spec = a.scheme.single_rate(order)?;
    if !(a.dt > 0.0) {
        return Err(Failure::Usage(format!("--dt {} must be positive", a.dt)));
    }
    if !(a.epsilon > 0.0) {
        return Err(Failure::Usage(format!(
            "--epsilon {} must be positive",
            a.epsilon
        )));
    }
    let grid = Grid1D::periodic(a.domain.0, a.domain.1, a.n).map_err(usage)?;
    let op = SbpOperator::order_4_2();
    let sm =
        testbed_step_matrix(spec, &grid, &op, a.wave_speed, a.dt, a.epsilon).map_err(numerical)?;
    let rho = spectral_radius(&sm.g).map_err(numerical)?;
    let dim = sm.g.nrows();
    let artifact = StepMatrixArtifact {
        scheme: a.scheme.label().to_string(),
        order,
        n: a.n,
        dt: a.dt,
        epsilon: a.epsilon,
        dim,
        rho,
        layout: sm.layout.clone(),
        g: sm
            .g
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
    };
    let summary = format!(
        "step-matrix: {} order {order}, dim {dim}, dt = {}, rho = {}",
        a.scheme.label(),
        fmt_f64(a.dt),
        fmt_f64(rho)
    );
    emit_json(&artifact, a.out.as_deref(), &summary)
}

// ---------------------------------------------------------------------------
// perf-model
// ---------------------------------------------------------------------------

#[derive(Args)]
struct PerfModelArgs {
    /// Scenario JSON ({grids, sr_list, r_rk4_map | order, t, dt_rk4})
    #[arg(long, visible_alias = "case")]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerfCaseFile {
    grids: Vec<PerfGridEntry>,
    sr_list: Vec<usize>,
    #[serde(default)]
    r_rk4_map: Option<BTreeMap<String, f64>>,
    /// Picks the built-in measured ratio table when no map is given.
    #[serde(default)]
    order: Option<usize>,
    #[serde(default = "default_unit")]
    t: f64,
    #[serde(default = "default_unit")]
    dt_rk4: f64,
}

fn default_unit() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerfGridEntry {
    points: usize,
    rate: PerfRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PerfRate {
    Fast,
    Slow,
}

impl Default for PerfCaseFile {
    fn default() -> Self {
        // The cylinder benchmark: 121x40 fast O-grid plus 61x61 background,
        // third-order measured ratios, one RK4 step.
        PerfCaseFile {
            grids: vec![
                PerfGridEntry {
                    points: 4840,
                    rate: PerfRate::Fast,
                },
                PerfGridEntry {
                    points: 3721,
                    rate: PerfRate::Slow,
                },
            ],
            sr_list: vec![1, 2, 3, 4, 5, 6],
            r_rk4_map: None,
            order: Some(3),
            t: 1.0,
            dt_rk4: 1.0,
        }
    }
}

fn cmd_perf_model(a: PerfModelArgs) -> Result<(), Failure> {
    let case: PerfCaseFile = load_config(a.config.as_deref())?;
    let n_f: usize = case
        .grids
        .iter()
        .filter(|g| g.rate == PerfRate::Fast)
        .map(|g| g.points)
        .sum();
    let n_s: usize = case
        .grids
        .iter()
        .filter(|g| g.rate == PerfRate::Slow)
        .map(|g| g.points)
        .sum();
    if n_f == 0 || n_s == 0 {
        return Err(Failure::Usage(
            "case needs at least one fast and one slow grid".into(),
        ));
    }
    let ratio_for = |sr: usize| -> Result<f64, Failure> {
        if let Some(map) = &case.r_rk4_map {
            return map
                .get(&sr.to_string())
                .copied()
                .ok_or_else(|| Failure::Usage(format!("r_rk4_map has no entry for sr = {sr}")));
        }
        let table = match case.order.unwrap_or(3) {
            3 => &AB34_STEP_RATIOS[..],
            4 => &AB45_STEP_RATIOS[..],
            o => return Err(Failure::Usage(format!("order {o} has no built-in ratios"))),
        };
        table
            .iter()
            .find(|(s, _)| *s == sr)
            .map(|(_, r)| *r)
            .ok_or_else(|| Failure::Usage(format!("built-in ratios cover sr 1..6, got {sr}")))
    };

    let mut table = CsvTable::new(&[
        "sr",
        "r_rk4",
        "n_rhs_rk4",
        "n_rhs_ab",
        "speedup",
        "pct_reduction",
    ]);
    let mut text = String::new();
    let mut n_rhs_rk4 = 0.0;
    let _ = writeln!(
        text,
        "{:>4} {:>8} {:>14} {:>9} {:>10}",
        "SR", "r_rk4", "N_ab", "speedup", "reduction"
    );
    for &sr in &case.sr_list {
        let r = ratio_for(sr)?;
        let out = rhs_counts(&PerfModelInput {
            n_f,
            n_s,
            sr,
            r_rk4: r,
            t: case.t,
            dt_rk4: case.dt_rk4,
        })
        .map_err(usage)?;
        n_rhs_rk4 = out.n_rhs_rk4;
        table.push_row(vec![
            sr as f64,
            r,
            out.n_rhs_rk4,
            out.n_rhs_ab,
            out.speedup,
            out.pct_reduction,
        ]);
        let _ = writeln!(
            text,
            "{:>4} {:>8.3} {:>14.0} {:>9.2} {:>9.1}%",
            sr, r, out.n_rhs_ab, out.speedup, out.pct_reduction
        );
    }
    let summary = format!(
        "perf-model: n_f = {n_f}, n_s = {n_s}, N_rk4 = {:.0}, {} scenarios",
        n_rhs_rk4,
        case.sr_list.len()
    );
    match a.out.as_deref() {
        Some(p) => {
            table.write(p).map_err(numerical)?;
            println!("{summary} -> {}", p.display());
            print!("{text}");
        }
        None => {
            print!("{}", table.render());
            eprintln!("{summary}");
            eprint!("{text}");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// eoc
// ---------------------------------------------------------------------------

#[derive(Args)]
struct EocArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Ab)]
    scheme: SchemeArg,
    #[arg(long, value_parser = order_in_range)]
    order: Option<usize>,
    /// Refinement list (macro steps for multi-rate schemes)
    #[arg(long, allow_hyphen_values = true, default_value = "0.05,0.025,0.0125")]
    dts: F64List,
    #[arg(long)]
    sr: Option<usize>,
    #[arg(long, value_enum, default_value_t = ProblemArg::Decay)]
    problem: ProblemArg,
    /// Integration horizon (defaults to 1, or 2.5 for coupled-linear)
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_eoc(a: EocArgs) -> Result<(), Failure> {
    let order = a.order.unwrap_or_else(|| a.scheme.default_order());
    let dts = &a.dts.0;
    if dts.len() < 3 {
        return Err(Failure::Usage(format!(
            "--dts needs at least three values, got {}",
            dts.len()
        )));
    }
    if dts.iter().any(|d| !(*d > 0.0)) {
        return Err(Failure::Usage("--dts entries must be positive".into()));
    }
    let t_end = a.t_end.unwrap_or(match a.problem {
        ProblemArg::CoupledLinear => 2.5,
        _ => 1.0,
    });
    if !(t_end > 0.0) {
        return Err(Failure::Usage(format!("--t-end {t_end} must be positive")));
    }

    let errors: Vec<f64> = if a.scheme.is_multirate() {
        if a.problem != ProblemArg::CoupledLinear {
            return Err(Failure::Usage(
                "mrab schemes need a partitioned problem; use --problem coupled-linear".into(),
            ));
        }
        let m = a.scheme.mrab_history(order)?;
        let sr = a.sr.unwrap_or(2);
        if sr == 0 {
            return Err(Failure::Usage("--sr must be >= 1".into()));
        }
        let mut errs = Vec::with_capacity(dts.len());
        for &big_h in dts {
            let n_macro = (t_end / big_h).round().max((m + 1) as f64);
            let horizon = n_macro * big_h;
            let cfg = MrabConfig::new(order, m, sr, big_h);
            let mut sys = TwoRateSystem {
                dim_f: 1,
                dim_s: 1,
                rhs_f: |_t: f64, f: &[f64], s: &[f64]| vec![-f[0] + 0.1 * s[0]],
                rhs_s: |_t: f64, f: &[f64], s: &[f64]| vec![-0.05 * s[0] + 0.1 * f[0]],
            };
            let run = mrab_integrate(
                &mut sys,
                0.0,
                &[COUPLED_Y0[0]],
                &[COUPLED_Y0[1]],
                horizon,
                &cfg,
            )
            .map_err(numerical)?;
            let want = coupled_exact(run.t);
            errs.push((run.f[0] - want[0]).abs().max((run.s[0] - want[1]).abs()));
        }
        errs
    } else {
        if a.sr.is_some() {
            return Err(Failure::Usage("--sr only applies to mrab schemes".into()));
        }
        let spec = a.scheme.single_rate(order)?;
        let mut errs = Vec::with_capacity(dts.len());
        for &dt in dts {
            let mut p = make_problem(a.problem);
            let res = integrate_to(&mut p.rhs, &p.y0, 0.0, t_end, dt, spec).map_err(numerical)?;
            let want = (p.exact)(res.t);
            let err = res
                .y
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        errs
    };

    let fit = estimate_order(dts, &errors);
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    let mut table = CsvTable::new(&["dt", "error"]);
    for (&dt, &err) in dts.iter().zip(&errors) {
        table.push_row(vec![dt, err]);
    }
    let summary = format!(
        "eoc: {} order {order} on {:?}, slope {:.4} over {} points",
        a.scheme.label(),
        a.problem,
        fit.slope,
        dts.len()
    );
    emit_csv(&table, a.out.as_deref(), &summary)
}
