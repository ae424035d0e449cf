//! Command-line driver.
//!
//! Every subcommand builds an [`Output`] which is rendered as a versioned
//! JSON document or as CSV. Exit codes: 0 on success, 1 when an asserted
//! outcome fails, 2 on usage or input errors.

mod output;
mod reproduce;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clt::{clt_scan, r0_threshold, standardize};
use crate::counterexamples::{
    convolved_pair, epi_check, epi_check_refined, find_violating_p, g_criterion, h_prime_half,
    heat_expansion_study, k_r, nash_kr_check, nash_lhs, nash_lhs_with, nash_rhs, triangle_alpha_lower,
    NashMethod, Verdict, DEFAULT_VIOLATION_MARGIN, HEAT_STUDY_TIMES, SHARP_NASH_1D,
};
use crate::density::{common_step, discretize_step, AnalyticDensity, Family, GridConfig, GridDensity};
use crate::error::{Error, Result};
use crate::lemma::{critical_beta, minimize_psi, LocationClass};
use crate::renyi::{product_entropy, renyi_entropy, savare_toscani_power, RenyiOrder};
use crate::report::InequalityReport;
use crate::young::{
    a_r, alpha_of_r, equal_split_constant, optimize_exponents, young_power_bound, alpha_bracket,
    young_constant, YoungExponents,
};

pub use output::{sig12, Cell, Format, Output, Table, SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(name = "renyi-epi", version, about = "Rényi entropy power inequalities: checks, constants and counterexamples")]
pub struct Cli {
    /// Samples across the widest window (a power of two, at least 16).
    #[arg(long, global = true, default_value_t = 8192, value_parser = parse_grid_n)]
    pub grid_n: usize,
    /// Half-width of Gaussian-like windows, in standard deviations.
    #[arg(long, global = true, default_value_t = 12.0)]
    pub window_factor: f64,
    /// Relative tolerance for inequality verdicts.
    #[arg(long, global = true, default_value_t = 1e-6, value_parser = parse_positive)]
    pub tol: f64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; `lemma` and `clt` default to csv, the rest to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Holds,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CounterexampleKind {
    /// Beta pair at α = 1.
    Beta,
    /// First p > 2 where the Gamma-function criterion fails.
    GCriterion,
    /// Uniform pair at the smallest admissible exponent.
    Triangle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rényi entropy and entropy power of a density.
    Entropy {
        /// Density, e.g. `gaussian:1`, `uniform:0,1@2,0`.
        #[arg(long, conflicts_with = "grid")]
        density: Option<AnalyticDensity>,
        /// Grid density CSV (`x,f`) to use instead of an analytic density.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Order: a number > 0, `1` for Shannon, `inf` for the sup order.
        #[arg(long, default_value = "2")]
        r: RenyiOrder,
        /// Dimension of the i.i.d. product (analytic densities only).
        #[arg(long, default_value_t = 1)]
        dimension: u32,
        /// Also evaluate on a grid and report both values.
        #[arg(long)]
        numeric: bool,
        /// Write the discretized density as CSV.
        #[arg(long)]
        export_grid: Option<PathBuf>,
    },
    /// Young constants and the entropy-power bound they imply.
    Young {
        #[arg(long)]
        r: f64,
        #[arg(long, requires = "q")]
        p: Option<f64>,
        #[arg(long, requires = "p")]
        q: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        nx: f64,
        #[arg(long, default_value_t = 1.0)]
        ny: f64,
    },
    /// N_r(X+Y)^α ≥ N_r(X)^α + N_r(Y)^α for a pair of densities.
    EpiCheck {
        #[arg(long)]
        x: AnalyticDensity,
        #[arg(long)]
        y: AnalyticDensity,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        alpha: f64,
        /// Estimate the discretization error by halving the grid.
        #[arg(long)]
        refine: bool,
        /// Exit with status 1 unless the verdict matches.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        /// Write the grid of the sum as CSV.
        #[arg(long)]
        export_grid: Option<PathBuf>,
    },
    /// Sweep of the extremal-function lemma over (c, β).
    Lemma {
        /// Comma-separated c values in (0, 1).
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
        c: Vec<f64>,
        /// Comma-separated β values; default is 2/c-1, 2/c-1/2, 2(2/c-1) per c.
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        n_grid: usize,
    },
    /// Reproduce a counterexample.
    Counterexample {
        #[arg(long, value_enum, default_value_t = CounterexampleKind::Beta)]
        kind: CounterexampleKind,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        /// Upper end of the p scan (g-criterion).
        #[arg(long, default_value_t = 3.0)]
        p_max: f64,
        /// Relative margin below 2π required of G(p) (g-criterion).
        #[arg(long, default_value_t = DEFAULT_VIOLATION_MARGIN)]
        margin: f64,
    },
    /// First-order expansion of N_r along the heat flow.
    HeatExpand {
        #[arg(long)]
        density: AnalyticDensity,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        /// Comma-separated step sizes.
        #[arg(long, value_delimiter = ',', default_values_t = HEAT_STUDY_TIMES)]
        t: Vec<f64>,
    },
    /// Nash-type inequalities for a differentiable density.
    Nash {
        #[arg(long)]
        density: AnalyticDensity,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
    },
    /// Entropies of normalized sums along k = 1, 2, 4, ….
    Clt {
        /// Starting density; it is standardized first.
        #[arg(long)]
        density: AnalyticDensity,
        #[arg(long, default_value = "2")]
        r: RenyiOrder,
        #[arg(long, default_value_t = 64)]
        k_max: u32,
    },
    /// Recompute the named constants and checks of one topic.
    Reproduce {
        /// 1 entropies, 2 Young bound, 3 equal-power constant, 4 lemma,
        /// 5 heat flow and counterexamples, 6 uniform pair, 7 CLT.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        section: u8,
    },
}

fn parse_grid_n(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n >= 16 && n.is_power_of_two() {
        Ok(n)
    } else {
        Err(format!("{n} is not a power of two ≥ 16"))
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

/// Settings echoed in the JSON envelope.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunConfig {
    pub grid_n: usize,
    pub window_factor: f64,
    pub tol: f64,
    pub format: Format,
}

impl RunConfig {
    pub fn grid(&self) -> GridConfig {
        GridConfig {
            n: self.grid_n,
            window_factor: self.window_factor,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Entropy { .. } => "entropy",
            Command::Young { .. } => "young",
            Command::EpiCheck { .. } => "epi-check",
            Command::Lemma { .. } => "lemma",
            Command::Counterexample { .. } => "counterexample",
            Command::HeatExpand { .. } => "heat-expand",
            Command::Nash { .. } => "nash",
            Command::Clt { .. } => "clt",
            Command::Reproduce { .. } => "reproduce",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Lemma { .. } | Command::Clt { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(failed) => i32::from(failed),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs a parsed command and writes its output; returns whether an
/// asserted outcome failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    let config = RunConfig {
        grid_n: cli.grid_n,
        window_factor: cli.window_factor,
        tol: cli.tol,
        format: cli.format.unwrap_or_else(|| cli.command.default_format()),
    };
    let out = dispatch(&cli.command, &config)?;
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match config.format {
        Format::Json => output::render_json(&mut sink, cli.command.name(), &config, &out)?,
        Format::Csv => output::render_csv(&mut sink, &out)?,
    }
    sink.flush()?;
    Ok(out.failed)
}

pub fn dispatch(command: &Command, config: &RunConfig) -> Result<Output> {
    match command {
        Command::Entropy { density, grid, r, dimension, numeric, export_grid } => {
            entropy(density.as_ref(), grid.as_ref(), *r, *dimension, *numeric, export_grid.as_ref(), config)
        }
        Command::Young { r, p, q, nx, ny } => young(*r, p.zip(*q), *nx, *ny),
        Command::EpiCheck { x, y, r, alpha, refine, expect, export_grid } => {
            epi(x, y, *r, *alpha, *refine, *expect, export_grid.as_ref(), config)
        }
        Command::Lemma { c, beta, n_grid } => lemma(c, beta, *n_grid),
        Command::Counterexample { kind, r, p_max, margin } => counterexample(*kind, *r, *p_max, *margin, config),
        Command::HeatExpand { density, r, t } => heat_expand(density, *r, t, config),
        Command::Nash { density, r } => nash(density, *r, config),
        Command::Clt { density, r, k_max } => clt(density, *r, *k_max, config),
        Command::Reproduce { section } => reproduce::section(*section, config),
    }
}

fn write_grid(path: &PathBuf, g: &GridDensity) -> Result<()> {
    g.write_csv(BufWriter::new(File::create(path)?))
}

fn entropy(
    density: Option<&AnalyticDensity>,
    grid: Option<&PathBuf>,
    order: RenyiOrder,
    dimension: u32,
    numeric: bool,
    export: Option<&PathBuf>,
    config: &RunConfig,
) -> Result<Output> {
    let mut out = Output::default();
    out.value("order", order);
    match (density, grid) {
        (Some(d), _) => {
            out.value("density", d.to_string());
            let e = product_entropy(d, order, dimension)?;
            out.value("h", e.h);
            out.value("N", e.power);
            out.value("dimension", e.dimension);
            if let RenyiOrder::Finite(r) = order {
                if r > 1.0 {
                    out.value("savare_toscani", savare_toscani_power(d, r)?);
                }
            }
            if numeric || export.is_some() {
                let dx = common_step(std::slice::from_ref(d), &config.grid())?;
                let g = discretize_step(d, dx, config.window_factor)?;
                if numeric {
                    let ge = renyi_entropy(&g, order)?;
                    out.value("grid_h", ge.h);
                    out.value("grid_N", ge.power);
                    out.value("grid_rel_err", (ge.power - e.power).abs() / e.power);
                }
                if let Some(path) = export {
                    write_grid(path, &g)?;
                }
            }
        }
        (None, Some(path)) => {
            if dimension != 1 {
                return Err(Error::InvalidGrid("grid densities are one-dimensional".into()));
            }
            let g = GridDensity::read_csv(BufReader::new(File::open(path)?))?;
            out.value("grid_file", path.display().to_string());
            let e = renyi_entropy(&g, order)?;
            out.value("h", e.h);
            out.value("N", e.power);
            out.value("dimension", 1);
            if let RenyiOrder::Finite(r) = order {
                if r > 1.0 {
                    out.value("savare_toscani", savare_toscani_power(&g, r)?);
                }
            }
            if let Some(path) = export {
                write_grid(path, &g)?;
            }
        }
        (None, None) => return Err(Error::InvalidDensity("give --density or --grid".into())),
    }
    Ok(out)
}

fn young(r: f64, pq: Option<(f64, f64)>, nx: f64, ny: f64) -> Result<Output> {
    let mut out = Output::default();
    out.value("r", r);
    if let Some((p, q)) = pq {
        let e = YoungExponents::new(p, q, r)?;
        out.value("exponents", e);
        out.value("C", young_constant(&e));
        if r > 1.0 {
            out.value("bound", young_power_bound(nx, ny, &e)?);
        }
    }
    if r > 1.0 {
        let (e, bound) = optimize_exponents(nx, ny, r)?;
        out.value("optimal_exponents", e);
        out.value("optimal_C", young_constant(&e));
        out.value("optimal_bound", bound);
        out.value("A_r", a_r(r)?);
        out.value("alpha_of_r", alpha_of_r(r)?);
        let (lo, hi) = alpha_bracket(r)?;
        out.value("alpha_bracket", [lo, hi]);
        out.value("equal_split_C", equal_split_constant(r)?);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn epi(
    x: &AnalyticDensity,
    y: &AnalyticDensity,
    r: f64,
    alpha: f64,
    refine: bool,
    expect: Option<Expect>,
    export: Option<&PathBuf>,
    config: &RunConfig,
) -> Result<Output> {
    let mut out = Output::default();
    let grid = config.grid();
    let report = if refine {
        let (rep, verdict) = epi_check_refined(x, y, r, alpha, &grid)?;
        out.value("verdict", verdict);
        rep
    } else {
        epi_check(x, y, r, alpha, &grid)?
    };
    let report = {
        let tol = config.tol * report.rhs;
        report.with_tol(tol)
    };
    if let Some(expect) = expect {
        let ok = report.holds == (expect == Expect::Holds);
        out.check("expectation", ok);
    }
    if let Some(path) = export {
        let (_, _, sum) = convolved_pair(x, y, &grid)?;
        write_grid(path, &sum)?;
    }
    out.reports.push(report);
    Ok(out)
}

fn lemma(cs: &[f64], betas: &[f64], n_grid: usize) -> Result<Output> {
    let mut out = Output::default();
    let mut table = Table::new(&["c", "beta", "argmin", "min_value", "location_class"]);
    let mut others = 0;
    let mut critical_not_endpoint = 0;
    for &c in cs {
        let b0 = critical_beta(c);
        let list: Vec<f64> = if betas.is_empty() { vec![b0, b0 + 0.5, 2.0 * b0] } else { betas.to_vec() };
        for beta in list {
            let rep = minimize_psi(c, beta, n_grid)?;
            if rep.location_class == LocationClass::Other {
                others += 1;
            }
            if beta == b0 && rep.location_class != LocationClass::Endpoint {
                critical_not_endpoint += 1;
            }
            table.push(vec![c.into(), beta.into(), rep.argmin.into(), rep.min_value.into(), rep.location_class.to_string().into()]);
        }
    }
    out.check("no_other_minimizers", others == 0);
    out.check("endpoint_at_critical_beta", critical_not_endpoint == 0);
    out.table = Some(table);
    Ok(out)
}

fn counterexample(kind: CounterexampleKind, r: f64, p_max: f64, margin: f64, config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let grid = config.grid();
    match kind {
        CounterexampleKind::Beta => {
            let b = AnalyticDensity::q_gaussian_beta();
            let order = RenyiOrder::Finite(r);
            out.value("N_beta", renyi_entropy(&b, order)?.power);
            let (rep, verdict) = epi_check_refined(&b, &b, r, 1.0, &grid)?;
            out.value("verdict", verdict);
            out.check("violation_confirmed", verdict == Verdict::Violated);
            out.reports.push(rep);
        }
        CounterexampleKind::GCriterion => {
            out.value("G_at_2", g_criterion(2.0, r)?);
            out.value("two_pi", 2.0 * std::f64::consts::PI);
            out.value("h_prime_half", h_prime_half(r)?);
            match find_violating_p(r, p_max, margin)? {
                Some(p) => {
                    let d = AnalyticDensity::exp_power(p)?;
                    let closed = nash_lhs(&d, r)?;
                    let quad = nash_lhs_with(&d, r, NashMethod::Quadrature)?;
                    out.value("p_star", p);
                    out.value("G_at_p_star", g_criterion(p, r)?);
                    out.value("nash_lhs_closed", closed);
                    out.value("nash_lhs_quadrature", quad);
                    let rhs = nash_rhs(r)?;
                    out.reports.push(
                        InequalityReport::new(quad, rhs, config.tol * rhs)
                            .with("density", d.to_string())
                            .with("r", r),
                    );
                    out.check("nash_violated", quad < rhs);
                }
                None => {
                    out.value("p_star", serde_json::Value::Null);
                    out.check("violation_found", false);
                }
            }
        }
        CounterexampleKind::Triangle => {
            let u = AnalyticDensity::uniform(0.0, 1.0)?;
            let alpha = triangle_alpha_lower(r)?;
            out.value("alpha_lower", alpha);
            let (lo, hi) = alpha_bracket(r)?;
            out.value("alpha_bracket", [lo, hi]);
            let rep = epi_check(&u, &u, r, alpha, &grid)?;
            out.check("equality", rep.slack.abs() <= config.tol);
            out.reports.push(rep);
        }
    }
    Ok(out)
}

fn heat_expand(d: &AnalyticDensity, r: f64, times: &[f64], config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let study = heat_expansion_study(d, r, times, &config.grid())?;
    let mut table = Table::new(&["t", "numeric_slope", "analytic_slope", "rel_err"]);
    for s in &study {
        table.push(vec![s.t.into(), s.numeric_slope.into(), s.analytic_slope.into(), s.rel_err.into()]);
    }
    out.value("density", d.to_string());
    out.value("r", r);
    out.value("N_r_gaussian", nash_rhs(r)?);
    out.value("study", &study);
    out.table = Some(table);
    Ok(out)
}

fn nash(d: &AnalyticDensity, r: f64, config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let lhs = nash_lhs(d, r)?;
    let rhs = nash_rhs(r)?;
    out.reports.push(
        InequalityReport::new(lhs, rhs, config.tol * rhs)
            .with("density", d.to_string())
            .with("r", r)
            .with("form", "heat_slope"),
    );
    let rep = nash_kr_check(d, r)?;
    out.reports.push(rep.with_k_r);
    if let Some(sharp) = rep.with_sharp_constant {
        out.reports.push(sharp);
    }
    out.value("K_r", k_r(r)?);
    out.value("sharp_nash_constant", SHARP_NASH_1D);
    if let Family::ExpPower { p } = d.family() {
        out.value("G", g_criterion(p, r)?);
    }
    Ok(out)
}

fn clt(d: &AnalyticDensity, order: RenyiOrder, k_max: u32, config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let z = standardize(d)?;
    let res = clt_scan(&z, order, k_max, &config.grid())?;
    let mut table = Table::new(&["k", "h_r", "delta_k", "k_times_delta"]);
    for ((k, h), (delta, kd)) in res.ks.iter().zip(&res.h_values).zip(res.deltas.iter().zip(res.k_times_delta())) {
        table.push(vec![(*k).into(), (*h).into(), (*delta).into(), kd.into()]);
    }
    let c = z.cumulants();
    out.value("density", z.to_string());
    out.value("order", order);
    out.value("gamma3", c.gamma3);
    out.value("gamma4", c.gamma4);
    out.value("slope_estimate", res.slope_estimate);
    out.value("B_r", res.b_r_analytic);
    out.value("r0", r0_threshold(c.gamma3, c.gamma4));
    out.value("h_gaussian", res.h_gaussian);
    out.table = Some(table);
    Ok(out)
}
