//! Checks of the α-power entropy inequality on concrete pairs, the
//! heat-flow expansion that leads to a Nash-type inequality, and the
//! densities for which the `α = 1` version fails.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::density::{common_step, discretize_step, AnalyticDensity, GridConfig, GridDensity};
use crate::error::{domain, Error, Result};
use crate::numerics::{bisect, convolve, derivative, heat_evolve, integrate};
use crate::renyi::{product_entropy, renyi_power, EntropySource, RenyiOrder};
use crate::report::InequalityReport;
use crate::specfun::digamma;

fn require_r(func: &'static str, r: f64) -> Result<()> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain(func, r, "1 < r < ∞"))
    }
}

/// Grids of `fx`, `fy` on a shared spacing and the grid of `fx ⊛ fy`.
pub fn convolved_pair(
    fx: &AnalyticDensity,
    fy: &AnalyticDensity,
    config: &GridConfig,
) -> Result<(GridDensity, GridDensity, GridDensity)> {
    let dx = common_step(&[*fx, *fy], config)?;
    let gx = discretize_step(fx, dx, config.window_factor)?;
    let gy = discretize_step(fy, dx, config.window_factor)?;
    let sum = convolve(&gx, &gy)?;
    Ok((gx, gy, sum))
}

/// `N_r(X+Y)^α ≥ N_r(X)^α + N_r(Y)^α` for independent `X ~ fx`, `Y ~ fy`.
///
/// The left side comes from an FFT convolution on a common grid, the right
/// side from closed forms. The tolerance is `1e-6·rhs`. Exponents below 1
/// are accepted.
pub fn epi_check(
    fx: &AnalyticDensity,
    fy: &AnalyticDensity,
    r: f64,
    alpha: f64,
    config: &GridConfig,
) -> Result<InequalityReport> {
    require_r("epi_check", r)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("epi_check", alpha, "α > 0"));
    }
    let order = RenyiOrder::Finite(r);
    let (_, _, sum) = convolved_pair(fx, fy, config)?;
    let lhs = renyi_power(&sum, order)?.powf(alpha);
    let rhs = renyi_power(fx, order)?.powf(alpha) + renyi_power(fy, order)?.powf(alpha);
    Ok(InequalityReport::new(lhs, rhs, 1e-6 * rhs)
        .with("x", fx.to_string())
        .with("y", fy.to_string())
        .with("r", r)
        .with("alpha", alpha)
        .with("grid_n", config.n as u64)
        .with("dx", sum.dx()))
}

/// Outcome of a grid-refinement study of [`epi_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    /// The deficit is below ten times the estimated discretization error.
    Inconclusive,
}

/// [`epi_check`] at `config.n` plus an error estimate from the run at half
/// the resolution. A violation is only reported when the deficit exceeds
/// ten times that estimate.
pub fn epi_check_refined(
    fx: &AnalyticDensity,
    fy: &AnalyticDensity,
    r: f64,
    alpha: f64,
    config: &GridConfig,
) -> Result<(InequalityReport, Verdict)> {
    let coarse = GridConfig {
        n: config.n / 2,
        ..*config
    };
    let fine = epi_check(fx, fy, r, alpha, config)?;
    let rough = epi_check(fx, fy, r, alpha, &coarse)?;
    let error = (fine.lhs - rough.lhs).abs();
    let verdict = if fine.holds {
        Verdict::Holds
    } else if -fine.slack > 10.0 * error {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    let report = fine
        .with("refinement_error", error)
        .with("verdict", serde_json::to_value(verdict).unwrap_or_default());
    Ok((report, verdict))
}

/// `∫ f'^2 f^{r-2}` by quadrature of the analytic derivative.
pub fn fisher_like_quadrature(d: &AnalyticDensity, r: f64) -> Result<f64> {
    if !d.is_differentiable() {
        return Err(Error::NotDifferentiable(d.to_string()));
    }
    let value = d.integrate(12.0, |x| {
        let f = d.eval(x);
        if f <= 0.0 {
            return 0.0;
        }
        let df = d.derivative(x).unwrap_or(0.0);
        df * df * f.powf(r - 2.0)
    });
    Ok(value)
}

/// How [`nash_lhs_with`] evaluates `∫ f'^2 f^{r-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NashMethod {
    /// Closed form where available, quadrature otherwise.
    Auto,
    Quadrature,
}

/// `r (∫f^r)^{(1+r)/(1-r)} ∫ f^{r-2} f'^2`.
pub fn nash_lhs(d: &AnalyticDensity, r: f64) -> Result<f64> {
    nash_lhs_with(d, r, NashMethod::Auto)
}

pub fn nash_lhs_with(d: &AnalyticDensity, r: f64, method: NashMethod) -> Result<f64> {
    require_r("nash_lhs", r)?;
    if !d.is_differentiable() {
        return Err(Error::NotDifferentiable(d.to_string()));
    }
    let lr = d.lr_integral(r)?;
    let fisher = match (method, d.fisher_like_integral_closed(r)) {
        (NashMethod::Auto, Some(v)) => v,
        _ => fisher_like_quadrature(d, r)?,
    };
    Ok(r * lr.powf((1.0 + r) / (1.0 - r)) * fisher)
}

/// The same functional on a grid, with finite-difference derivatives and
/// Simpson quadrature. Samples below `1e-280` are skipped.
pub fn nash_lhs_grid(g: &GridDensity, r: f64) -> Result<f64> {
    require_r("nash_lhs_grid", r)?;
    let d = derivative(g);
    let integrand: Vec<f64> = g
        .values()
        .iter()
        .zip(&d)
        .map(|(&f, &df)| if f > 1e-280 { df * df * f.powf(r - 2.0) } else { 0.0 })
        .collect();
    let fisher = integrate(&integrand, g.dx())?;
    let lr = g.lr_integral(r)?;
    Ok(r * lr.powf((1.0 + r) / (1.0 - r)) * fisher)
}

/// `2π r^{1/(r-1)}`, the value of the Nash-type functional at a Gaussian.
pub fn nash_rhs(r: f64) -> Result<f64> {
    require_r("nash_rhs", r)?;
    Ok(2.0 * PI * r.powf(1.0 / (r - 1.0)))
}

/// `G(p) = 4 r^{-r(p-2)/(p(r-1))} Γ(1/p) Γ(2-1/p)`.
///
/// The gamma product is evaluated with the reflection formula
/// `Γ(x)Γ(2-x) = (1-x)π / sin(πx)`, so `G(2) = 2π` exactly.
pub fn g_criterion(p: f64, r: f64) -> Result<f64> {
    require_r("g_criterion", r)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain("g_criterion", p, "p > 1"));
    }
    let x = 1.0 / p;
    let gamma_pair = (1.0 - x) * PI / (PI * x).sin();
    let exponent = -r * (p - 2.0) / (p * (r - 1.0));
    Ok(4.0 * r.powf(exponent) * gamma_pair)
}

/// `H'(1/2) = (2r/(r-1)) log r - 2`, where `H(x) = log G(1/x)`.
pub fn h_prime_half(r: f64) -> Result<f64> {
    require_r("h_prime_half", r)?;
    Ok(2.0 * r / (r - 1.0) * r.ln() - 2.0)
}

/// `H'(x) = (2r/(r-1)) log r + ψ(x) - ψ(2-x)`, `0 < x < 2`.
pub fn h_prime(x: f64, r: f64) -> Result<f64> {
    require_r("h_prime", r)?;
    if !(x > 0.0 && x < 2.0) {
        return Err(domain("h_prime", x, "0 < x < 2"));
    }
    Ok(2.0 * r / (r - 1.0) * r.ln() + digamma(x)? - digamma(2.0 - x)?)
}

/// Relative margin below `2π` that [`find_violating_p`] requires by default.
pub const DEFAULT_VIOLATION_MARGIN: f64 = 1e-4;

const P_SCAN_POINTS: usize = 1000;

/// Smallest `p ∈ (2, p_max]` with `G(p) < 2π (1 - margin)`: the first such
/// point of a uniform scan, refined by bisection to `1e-8`. `None` when no
/// scan point qualifies.
pub fn find_violating_p(r: f64, p_max: f64, margin: f64) -> Result<Option<f64>> {
    require_r("find_violating_p", r)?;
    if !(p_max > 2.0 && p_max.is_finite()) {
        return Err(domain("find_violating_p", p_max, "p_max > 2"));
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(domain("find_violating_p", margin, "0 ≤ margin < 1"));
    }
    let target = 2.0 * PI * (1.0 - margin);
    let excess = |p: f64| g_criterion(p, r).map(|g| g - target).unwrap_or(f64::NAN);
    let step = (p_max - 2.0) / P_SCAN_POINTS as f64;
    let mut prev = 2.0;
    for i in 1..=P_SCAN_POINTS {
        let p = if i == P_SCAN_POINTS { p_max } else { 2.0 + i as f64 * step };
        if excess(p) < 0.0 {
            let root = bisect(excess, prev, p, 1e-8).unwrap_or(p);
            // keep a point on the violating side of the crossing
            let p_star = if excess(root) < 0.0 { root } else { (root + 1e-8).min(p) };
            return Ok(Some(p_star));
        }
        prev = p;
    }
    Ok(None)
}

/// First-order heat-flow expansion of `N_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatExpansionReport {
    pub t: f64,
    pub numeric_slope: f64,
    pub analytic_slope: f64,
    pub rel_err: f64,
}

/// Compares `(N_r(X_t) - N_r(X)) / t`, computed on a grid, with the
/// analytic first-order coefficient [`nash_lhs`].
pub fn heat_expansion_check(d: &AnalyticDensity, r: f64, t: f64, config: &GridConfig) -> Result<HeatExpansionReport> {
    let analytic_slope = nash_lhs(d, r)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("heat_expansion_check", t, "t > 0"));
    }
    let order = RenyiOrder::Finite(r);
    let dx = common_step(std::slice::from_ref(d), config)?;
    let grid = discretize_step(d, dx, config.window_factor)?;
    let evolved = heat_evolve(&grid, t, config.window_factor)?;
    let numeric_slope = (renyi_power(&evolved, order)? - renyi_power(&grid, order)?) / t;
    Ok(HeatExpansionReport {
        t,
        numeric_slope,
        analytic_slope,
        rel_err: (numeric_slope - analytic_slope).abs() / analytic_slope,
    })
}

/// Default step sizes for the convergence study of the expansion.
pub const HEAT_STUDY_TIMES: [f64; 3] = [4e-3, 2e-3, 1e-3];

pub fn heat_expansion_study(d: &AnalyticDensity, r: f64, times: &[f64], config: &GridConfig) -> Result<Vec<HeatExpansionReport>> {
    times.iter().map(|&t| heat_expansion_check(d, r, t, config)).collect()
}

/// `K_r = 2 / (π r^{r/(r-1)})`.
pub fn k_r(r: f64) -> Result<f64> {
    require_r("k_r", r)?;
    Ok(2.0 / (PI * r.powf(r / (r - 1.0))))
}

/// Sharp constant of the one-dimensional Nash inequality
/// `(∫u²)³ ≤ C ∫u'² (∫|u|)⁴`.
pub const SHARP_NASH_1D: f64 = 27.0 / (16.0 * PI * PI);

/// Both forms of the Nash-type inequality for `u = f^{r/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashKrReport {
    /// `K_r ∫u'² (∫u^{2/r})^{2r/(r-1)} ≥ (∫u²)^{(r+1)/(r-1)}`.
    pub with_k_r: InequalityReport,
    /// The same with the sharp Nash constant, for `r = 2` only.
    pub with_sharp_constant: Option<InequalityReport>,
}

/// `(∫u²)^{(r+1)/(r-1)} ≤ K_r ∫u'² (∫u^{2/r})^{2r/(r-1)}` with `u = f^{r/2}`,
/// all integrals by quadrature. The report's `lhs` is the larger side
/// claimed by the inequality, so `holds` has its usual meaning.
pub fn nash_kr_check(f: &AnalyticDensity, r: f64) -> Result<NashKrReport> {
    require_r("nash_kr_check", r)?;
    if !f.is_differentiable() {
        return Err(Error::NotDifferentiable(f.to_string()));
    }
    let u = |x: f64| f.eval(x).powf(0.5 * r);
    let u_sq = f.integrate(12.0, |x| u(x) * u(x));
    let u_low = f.integrate(12.0, |x| u(x).powf(2.0 / r));
    let du_sq = 0.25 * r * r * fisher_like_quadrature(f, r)?;
    let small = u_sq.powf((r + 1.0) / (r - 1.0));
    let large_without_constant = du_sq * u_low.powf(2.0 * r / (r - 1.0));
    let k = k_r(r)?;
    let build = |constant: f64, name: &str| {
        let large = constant * large_without_constant;
        InequalityReport::new(large, small, 1e-5 * small)
            .with("density", f.to_string())
            .with("r", r)
            .with("constant", constant)
            .with("constant_name", name)
    };
    let with_sharp_constant = (r == 2.0).then(|| build(SHARP_NASH_1D, "sharp_nash"));
    Ok(NashKrReport {
        with_k_r: build(k, "K_r"),
        with_sharp_constant,
    })
}

/// `(r-1) log 2 / (2 log((r+1)/2))`: the exponent at which the uniform pair
/// turns the α-power inequality into an equality.
pub fn triangle_alpha_lower(r: f64) -> Result<f64> {
    require_r("triangle_alpha_lower", r)?;
    Ok((r - 1.0) * LN_2 / (2.0 * ((r + 1.0) / 2.0).ln()))
}

/// Entropy power of the i.i.d. product `f^{⊗n}` against the one-dimensional
/// value; they coincide, so no dimension improves the exponent.
pub fn tensorization_check(f: &AnalyticDensity, order: RenyiOrder, dimension: u32) -> Result<InequalityReport> {
    let product = product_entropy(f, order, dimension)?;
    let single = renyi_power(f, order)?;
    Ok(InequalityReport::new(product.power, single, 1e-12 * single)
        .with("density", f.to_string())
        .with("order", order.to_string())
        .with("dimension", dimension))
}
