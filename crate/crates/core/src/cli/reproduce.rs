//! `reproduce --section N`: recompute the named constants of one topic and
//! record each expected outcome as a check.

use std::f64::consts::PI;

use super::output::Output;
use super::RunConfig;
use crate::clt::{clt_scan, standardize};
use crate::counterexamples::{
    convolved_pair, epi_check, epi_check_refined, find_violating_p, g_criterion, h_prime_half,
    heat_expansion_check, k_r, nash_kr_check, nash_lhs, nash_lhs_with, tensorization_check,
    triangle_alpha_lower, NashMethod, Verdict, DEFAULT_VIOLATION_MARGIN, SHARP_NASH_1D,
};
use crate::density::{common_step, discretize_step, AnalyticDensity};
use crate::error::Result;
use crate::lemma::{critical_alpha, split_inequality_check};
use crate::renyi::{renyi_power, RenyiOrder};
use crate::young::{
    a_r, alpha_of_r, equal_split_constant, optimize_exponents, alpha_bracket, young_constant,
    YoungExponents,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn r_grid() -> impl Iterator<Item = f64> {
    (1..=500).map(|i| 1.0 + 49.0 * i as f64 / 500.0)
}

pub fn section(n: u8, config: &RunConfig) -> Result<Output> {
    let mut out = match n {
        1 => entropies(config),
        2 => young_bound(),
        3 => equal_power(),
        4 => lemma_section(),
        5 => heat_flow(config),
        6 => uniform_pair(config),
        _ => clt_section(config),
    }?;
    out.value("section", n);
    Ok(out)
}

fn entropies(config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let grid = config.grid();
    let g = AnalyticDensity::gaussian(1.0)?;
    let dx = common_step(&[g], &grid)?;
    let gg = discretize_step(&g, dx, grid.window_factor)?;
    for r in [1.5f64, 2.0, 3.0] {
        let closed = 2.0 * PI * r.powf(1.0 / (r - 1.0));
        let numeric = renyi_power(&gg, RenyiOrder::Finite(r))?;
        out.value(&format!("gaussian_N_{r}"), numeric);
        out.check(&format!("gaussian_closed_form_r{r}"), rel(numeric, closed) <= 1e-6);
    }
    let u = AnalyticDensity::uniform(0.0, 1.0)?;
    let (_, _, tri) = convolved_pair(&u, &u, &grid)?;
    let n_inf = renyi_power(&tri, RenyiOrder::Sup)?;
    out.value("N_inf_uniform_sum", n_inf);
    out.check("sup_order_identity", (n_inf - 1.0).abs() <= 1e-3);
    let orders = [1.2, 1.5, 2.0, 3.0, 10.0];
    let monotone = [g, u, AnalyticDensity::q_gaussian_beta(), AnalyticDensity::exp_power(2.5)?]
        .iter()
        .all(|d| {
            let mut powers: Vec<f64> = orders
                .iter()
                .map(|&r| renyi_power(d, RenyiOrder::Finite(r)).unwrap_or(f64::NAN))
                .collect();
            powers.push(renyi_power(d, RenyiOrder::Sup).unwrap_or(f64::NAN));
            powers.windows(2).all(|w| w[0] - w[1] >= -1e-9)
        });
    out.check("monotone_in_order", monotone);
    Ok(out)
}

fn young_bound() -> Result<Output> {
    let mut out = Output::default();
    let c2 = equal_split_constant(2.0)?;
    out.value("C_equal_split_r2", c2);
    let e = YoungExponents::new(4.0 / 3.0, 4.0 / 3.0, 2.0)?;
    out.check("equal_split_formula", (young_constant(&e) - c2).abs() < 1e-12);
    out.check("equal_split_value", (c2 - 4.0 / 3f64.powf(1.5)).abs() < 1e-14);
    let mut max_c: f64 = 0.0;
    for i in 1..=100 {
        let r = 1.0 + 9.0 * i as f64 / 100.0;
        let s = (r - 1.0) / r;
        for j in 0..=100 {
            let e = YoungExponents::from_split(r, s * j as f64 / 100.0)?;
            max_c = max_c.max(young_constant(&e));
        }
    }
    out.value("max_C_sampled", max_c);
    out.check("C_at_most_one", max_c <= 1.0 + 1e-15);
    let n = 4.0 * PI;
    let (_, bound) = optimize_exponents(n, n, 2.0)?;
    out.value("gaussian_pair_bound_r2", bound);
    out.value("gaussian_pair_true_N2", 8.0 * PI);
    out.check("gaussian_pair_bound_valid", bound <= 8.0 * PI);
    Ok(out)
}

fn equal_power() -> Result<Output> {
    let mut out = Output::default();
    let a2 = a_r(2.0)?;
    out.value("A_2", a2);
    out.check("A_2_is_27_16", (a2 - 27.0 / 16.0).abs() < 1e-14);
    for r in [1.5, 2.0, 3.0, 5.0] {
        let (_, bound) = optimize_exponents(1.0, 1.0, r)?;
        out.value(&format!("A_r_optimizer_{r}"), bound);
        out.check(&format!("optimizer_matches_A_r_r{r}"), rel(bound, a_r(r)?) <= 1e-9);
    }
    let in_range = r_grid().all(|r| a_r(r).map(|a| a > 1.0 && a < 2.0).unwrap_or(false));
    out.check("A_r_between_1_and_2", in_range);
    let alpha_ok = r_grid().all(|r| alpha_of_r(r).map(|a| a <= (r + 1.0) / 2.0).unwrap_or(false));
    out.check("alpha_of_r_below_half_r_plus_1", alpha_ok);
    out.value("alpha_of_2", alpha_of_r(2.0)?);
    Ok(out)
}

fn lemma_section() -> Result<Output> {
    let mut out = super::lemma(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9], &[], 10_000)?;
    let mut worst: f64 = f64::INFINITY;
    for i in 1..100 {
        let c = i as f64 / 100.0;
        let alpha = critical_alpha(c)?;
        for j in 1..50 {
            let x = c * j as f64 / 50.0;
            worst = worst.min(split_inequality_check(x, c - x, alpha)?.slack);
        }
    }
    out.value("min_slack_critical_alpha", worst);
    out.check("inequality_at_critical_alpha", worst >= -1e-12);
    Ok(out)
}

fn heat_flow(config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let grid = config.grid();
    out.check("G_at_2_is_2pi", (2..=5).all(|r| g_criterion(2.0, r as f64).ok() == Some(2.0 * PI)));
    let hp = h_prime_half(2.0)?;
    out.value("h_prime_half_r2", hp);
    out.check("h_prime_half_positive", hp > 0.0);
    match find_violating_p(2.0, 3.0, DEFAULT_VIOLATION_MARGIN)? {
        Some(p) => {
            let d = AnalyticDensity::exp_power(p)?;
            let closed = nash_lhs(&d, 2.0)?;
            let quad = nash_lhs_with(&d, 2.0, NashMethod::Quadrature)?;
            out.value("p_star", p);
            out.value("G_at_p_star", g_criterion(p, 2.0)?);
            out.value("nash_lhs_p_star", quad);
            out.check("G_below_2pi", g_criterion(p, 2.0)? < 2.0 * PI);
            out.check("nash_quadrature_matches_closed", rel(quad, closed) <= 1e-5);
            out.check("nash_violated", quad < 4.0 * PI);
        }
        None => out.check("violation_found", false),
    }
    let b = AnalyticDensity::q_gaussian_beta();
    let n_beta = renyi_power(&b, RenyiOrder::Finite(2.0))?;
    out.value("N2_beta", n_beta);
    out.check("N2_beta_is_25_9", rel(n_beta, 25.0 / 9.0) < 1e-13);
    let (rep, verdict) = epi_check_refined(&b, &b, 2.0, 1.0, &grid)?;
    out.value("beta_pair_verdict", verdict);
    out.check("beta_pair_violates", verdict == Verdict::Violated);
    out.reports.push(rep);

    let g = AnalyticDensity::gaussian(1.0)?;
    let heat = heat_expansion_check(&g, 2.0, 1e-3, &grid)?;
    out.value("gaussian_heat_slope", heat.numeric_slope);
    out.check("gaussian_heat_slope", heat.rel_err <= 5e-3);

    let k2 = k_r(2.0)?;
    out.value("K_2", k2);
    out.value("sharp_nash_constant", SHARP_NASH_1D);
    out.check("K_2_below_sharp_constant", k2 < SHARP_NASH_1D);
    let nash = nash_kr_check(&g, 2.0)?;
    out.check(
        "gaussian_nash_equality",
        nash.with_k_r.slack.abs() <= 1e-5 * nash.with_k_r.rhs,
    );
    out.reports.push(nash.with_k_r);
    Ok(out)
}

fn uniform_pair(config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let grid = config.grid();
    let u = AnalyticDensity::uniform(0.0, 1.0)?;
    let (_, _, tri) = convolved_pair(&u, &u, &grid)?;
    for r in [1.5f64, 2.0, 3.0] {
        let numeric = renyi_power(&tri, RenyiOrder::Finite(r))?;
        let closed = ((r + 1.0) / 2.0).powf(2.0 / (r - 1.0));
        out.value(&format!("triangle_N_{r}"), numeric);
        out.check(&format!("triangle_closed_form_r{r}"), rel(numeric, closed) <= 1e-4);
    }
    out.check("bracket_r3", alpha_bracket(3.0)? == (1.0, 2.0));
    for r in [2.0, 3.0] {
        let alpha = triangle_alpha_lower(r)?;
        let rep = epi_check(&u, &u, r, alpha, &grid)?;
        out.check(&format!("equality_at_lower_exponent_r{r}"), rep.slack.abs() <= 1e-6);
        out.reports.push(rep);
    }
    let t = tensorization_check(&u, RenyiOrder::Finite(2.0), 3)?;
    out.check("tensorization", t.holds);
    Ok(out)
}

fn clt_section(config: &RunConfig) -> Result<Output> {
    let mut out = Output::default();
    let grid = config.grid();
    let z = standardize(&AnalyticDensity::uniform(0.0, 1.0)?)?;
    let res = clt_scan(&z, RenyiOrder::Finite(2.0), 64, &grid)?;
    let b = res.b_r_analytic.unwrap_or(f64::NAN);
    out.value("B_2", b);
    out.value("slope_estimate", res.slope_estimate);
    out.value("k_times_delta", res.k_times_delta());
    out.check("slope_within_20_percent", (res.slope_estimate - b).abs() <= 0.2 * b.abs());
    out.check("entropy_exceeds_gaussian", res.deltas.last().is_some_and(|d| *d < 0.0));
    let shannon = clt_scan(&z, RenyiOrder::Shannon, 64, &grid)?;
    out.value("shannon_h", &shannon.h_values);
    out.check(
        "shannon_non_decreasing",
        shannon.h_values.windows(2).all(|w| w[1] >= w[0] - 1e-6),
    );
    Ok(out)
}
