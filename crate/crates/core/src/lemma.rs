//! Numerical checks of the extremal-function lemma behind the
//! `α = (r+1)/2` entropy power inequality.
//!
//! With `y = c - x`, the function under study is
//! `ψ(x) = (1-x)^{β(1-x)} (1-y)^{β(1-y)} / (x^x y^y)` on `[0, c]`.
//! Everything is computed through `v = log ψ` with `0 log 0 = 0`.

use std::fmt;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::bisect;
use crate::report::InequalityReport;

fn xlogx(t: f64) -> f64 {
    if t > 0.0 {
        t * t.ln()
    } else {
        0.0
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(domain("lemma", c, "0 < c < 1"))
    }
}

/// `log ψ(x)`. The pair `(x, y)` is summed in sorted order so that
/// `v(x) = v(c - x)` holds bit for bit.
pub fn log_psi(x: f64, c: f64, beta: f64) -> f64 {
    let y = c - x;
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    let term = |t: f64| beta * xlogx(1.0 - t) - xlogx(t);
    term(a) + term(b)
}

/// `ψ(x)` with `y = c - x` and `0^0 = 1`.
pub fn psi(x: f64, c: f64, beta: f64) -> f64 {
    log_psi(x, c, beta).exp()
}

/// `v'(x) = -β (ln(1-x) - ln(1-y)) - (ln x - ln y)` on `(0, c)`.
pub fn log_psi_slope(x: f64, c: f64, beta: f64) -> f64 {
    let y = c - x;
    -beta * ((1.0 - x).ln() - (1.0 - y).ln()) - (x.ln() - y.ln())
}

/// `w(x) = β (2-c) x y - c (1-x)(1-y)`; it has the sign of `v''(x)`.
pub fn quadratic_w(x: f64, c: f64, beta: f64) -> f64 {
    let y = c - x;
    beta * (2.0 - c) * x * y - c * (1.0 - x) * (1.0 - y)
}

/// Smallest `β` covered by the lemma: `2/c - 1`.
pub fn critical_beta(c: f64) -> f64 {
    2.0 / c - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LocationClass {
    Endpoint,
    Center,
    Other,
}

impl fmt::Display for LocationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Endpoint => "endpoint",
            Self::Center => "center",
            Self::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizerReport {
    pub c: f64,
    pub beta: f64,
    pub argmin: f64,
    pub min_value: f64,
    pub location_class: LocationClass,
}

/// Relative tolerance (in units of `c`) for classifying the argmin.
pub const LOCATION_TOL: f64 = 1e-6;

/// Minimizes `ψ` over `[0, c]` on `n_grid` intervals (rounded up to even so
/// that `c/2` is a node), then refines every interior sign change of `v'`
/// from negative to positive by bisection.
pub fn minimize_psi(c: f64, beta: f64, n_grid: usize) -> Result<MinimizerReport> {
    check_c(c)?;
    let beta_min = critical_beta(c);
    if !(beta >= beta_min * (1.0 - 1e-12)) || !beta.is_finite() {
        return Err(Error::Inadmissible(format!("β = {beta} below 2/c - 1 = {beta_min}")));
    }
    if n_grid < 1000 {
        return Err(Error::InvalidGrid(format!("{n_grid} grid intervals, need at least 1000")));
    }
    let n = n_grid + n_grid % 2;
    let h = c / n as f64;
    let node = |i: usize| if i == n { c } else { i as f64 * h };

    let mut best = (0.0, log_psi(0.0, c, beta));
    let mut consider = |x: f64, v: f64| {
        // strict improvement beyond rounding, so exact ties keep the earlier
        // (endpoint, then center) candidate
        if v < best.1 - 1e-15 * best.1.abs().max(1.0) {
            best = (x, v);
        }
    };
    consider(c, log_psi(c, c, beta));
    consider(0.5 * c, log_psi(0.5 * c, c, beta));
    for i in 1..n {
        let x = node(i);
        consider(x, log_psi(x, c, beta));
    }
    let slope = |x: f64| log_psi_slope(x, c, beta);
    for i in 1..n - 1 {
        let (a, b) = (node(i), node(i + 1));
        if slope(a) < 0.0 && slope(b) > 0.0 {
            if let Some(root) = bisect(slope, a, b, 0.0) {
                consider(root, log_psi(root, c, beta));
            }
        }
    }

    let (argmin, v) = best;
    let tol = LOCATION_TOL * c;
    let location_class = if argmin <= tol || (c - argmin) <= tol {
        LocationClass::Endpoint
    } else if (argmin - 0.5 * c).abs() <= tol {
        LocationClass::Center
    } else {
        LocationClass::Other
    };
    Ok(MinimizerReport {
        c,
        beta,
        argmin,
        min_value: v.exp(),
        location_class,
    })
}

/// Both sides of
/// `(1-x)^{β(1-x)} (1-y)^{β(1-y)} / (x^x y^y) ≥ (1-x-y)^{β(1-x-y)} / (x+y)^{x+y}`
/// with `β = α/(α-1)`.
pub fn split_inequality_check(x: f64, y: f64, alpha: f64) -> Result<InequalityReport> {
    if !(x >= 0.0 && y >= 0.0 && x + y < 1.0 && x + y > 0.0) {
        return Err(Error::Domain {
            func: "split_inequality_check",
            value: x + y,
            expected: "x, y ≥ 0 and 0 < x + y < 1",
        });
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(domain("split_inequality_check", alpha, "α > 1"));
    }
    let beta = alpha / (alpha - 1.0);
    let c = x + y;
    let lhs = (beta * (xlogx(1.0 - x) + xlogx(1.0 - y)) - xlogx(x) - xlogx(y)).exp();
    let rhs = (beta * xlogx(1.0 - c) - xlogx(c)).exp();
    Ok(InequalityReport::new(lhs, rhs, 1e-12 * rhs.max(1.0))
        .with("x", x)
        .with("y", y)
        .with("alpha", alpha)
        .with("beta", beta))
}

/// `α = (r+1)/2` for `1/r' = x + y`, the exponent at which the lemma's
/// hypothesis `β = 2/c - 1` is tight.
pub fn critical_alpha(c: f64) -> Result<f64> {
    check_c(c)?;
    // r' = 1/c, r = r'/(r'-1) = 1/(1-c)
    let r = 1.0 / (1.0 - c);
    Ok(0.5 * (r + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// ψ from its definition with `powf`, away from the endpoints.
    fn psi_direct(x: f64, c: f64, beta: f64) -> f64 {
        let y = c - x;
        (1.0 - x).powf(beta * (1.0 - x)) * (1.0 - y).powf(beta * (1.0 - y)) / (x.powf(x) * y.powf(y))
    }

    /// The log form of `((x+y)^{x+y}/(x^x y^y))^{α-1} ≥ ((1-x-y)^{1-x-y}/((1-x)^{1-x}(1-y)^{1-y}))^α`.
    fn power_form_holds(x: f64, y: f64, alpha: f64) -> (bool, f64) {
        let l = |t: f64| t * t.ln();
        let left = (alpha - 1.0) * (l(x + y) - l(x) - l(y));
        let right = alpha * (l(1.0 - x - y) - l(1.0 - x) - l(1.0 - y));
        (left - right >= 0.0, left - right)
    }

    #[test]
    fn psi_examples() {
        // 0^0 = 1 gives ψ(0) = (1-c)^{β(1-c)} / c^c
        assert!((psi(0.0, 0.5, 3.0) - 0.5).abs() < 1e-15);
        assert!((psi(0.0, 0.5, 3.0) - 0.5f64.powf(1.5) / 0.5f64.powf(0.5)).abs() < 1e-15);
        for x in [0.01, 0.1, 0.2, 0.3] {
            assert_eq!(psi(x, 0.5, 3.0), psi(0.5 - x, 0.5, 3.0));
            assert!((psi(x, 0.5, 3.0) - psi_direct(x, 0.5, 3.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn endpoint_equality() {
        for i in 1..10 {
            let c = i as f64 / 10.0;
            for beta in [critical_beta(c), critical_beta(c) + 0.5, 7.0, 30.0] {
                assert!((psi(0.0, c, beta) - psi(c, c, beta)).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn minimizer_examples() {
        let r = minimize_psi(0.5, 3.0, 10_000).unwrap();
        assert_eq!(r.location_class, LocationClass::Endpoint);
        assert!((r.min_value - 0.5).abs() < 1e-15);
        let r = minimize_psi(0.5, 10.0, 10_000).unwrap();
        assert_ne!(r.location_class, LocationClass::Other);
        let r = minimize_psi(0.9, critical_beta(0.9), 10_000).unwrap();
        assert_eq!(r.location_class, LocationClass::Endpoint);
        assert!(minimize_psi(0.5, 2.0, 10_000).is_err());
        assert!(minimize_psi(1.0, 3.0, 10_000).is_err());
        assert!(minimize_psi(0.5, 3.0, 10).is_err());
    }

    #[test]
    fn lemma_sweep_never_other() {
        for i in 1..10 {
            let c = i as f64 / 10.0;
            let b0 = critical_beta(c);
            for beta in [b0, b0 + 0.5, 2.0 * b0] {
                let r = minimize_psi(c, beta, 10_000).unwrap();
                assert_ne!(r.location_class, LocationClass::Other, "c={c} β={beta}: {r:?}");
                if r.location_class == LocationClass::Center {
                    assert!(beta > b0);
                    assert!((r.argmin - 0.5 * c).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn minimum_is_below_every_sample() {
        let (c, beta) = (0.3, 8.0);
        let r = minimize_psi(c, beta, 2000).unwrap();
        for i in 0..=777 {
            let x = c * i as f64 / 777.0;
            assert!(psi(x, c, beta) >= r.min_value * (1.0 - 1e-14));
        }
    }

    #[test]
    fn w_examples() {
        for c in [0.2, 0.5, 0.8] {
            let b = critical_beta(c);
            assert!((quadratic_w(0.0, c, b) + c * (1.0 - c)).abs() < 1e-15);
            assert!((quadratic_w(c, c, b) + c * (1.0 - c)).abs() < 1e-15);
        }
    }

    #[test]
    fn w_has_sign_of_second_derivative() {
        let h = 1e-5;
        for (c, beta) in [(0.5, 3.0), (0.5, 10.0), (0.3, 20.0), (0.8, 2.0)] {
            let mut checked = 0;
            for i in 1..1000 {
                let x = c * i as f64 / 1000.0;
                if x < 2.0 * h || c - x < 2.0 * h {
                    continue;
                }
                let fd = (log_psi(x + h, c, beta) - 2.0 * log_psi(x, c, beta) + log_psi(x - h, c, beta)) / (h * h);
                let w = quadratic_w(x, c, beta);
                if w.abs() < 1e-4 {
                    continue;
                }
                assert_eq!(fd > 0.0, w > 0.0, "c={c} β={beta} x={x}: v''≈{fd}, w={w}");
                checked += 1;
            }
            assert!(checked > 900);
        }
    }

    #[test]
    fn split_inequality_examples() {
        let c: f64 = 0.5;
        let alpha = critical_alpha(c).unwrap();
        assert!((alpha / (alpha - 1.0) - 3.0).abs() < 1e-14);
        let r = split_inequality_check(0.25, 0.25, alpha).unwrap();
        assert!(r.holds && r.slack >= 0.0);
        // equality at the boundary
        let r = split_inequality_check(0.0, 0.5, alpha).unwrap();
        assert!(r.slack.abs() < 1e-15);
        let r = split_inequality_check(1e-12, 0.5 - 1e-12, alpha).unwrap();
        assert!(r.slack.abs() < 1e-9);
        assert!(split_inequality_check(0.6, 0.5, 2.0).is_err());
        assert!(split_inequality_check(0.1, 0.1, 1.0).is_err());
    }

    #[test]
    fn split_inequality_at_critical_alpha() {
        for i in 1..100 {
            let c = i as f64 / 100.0;
            let alpha = critical_alpha(c).unwrap();
            for j in 1..50 {
                let x = c * j as f64 / 50.0;
                let r = split_inequality_check(x, c - x, alpha).unwrap();
                assert!(r.slack >= -1e-12, "c={c} x={x}: {r:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn split_inequality_matches_power_form(c in 0.01f64..0.99, t in 0.001f64..0.999, alpha in 1.01f64..6.0) {
            let x = c * t;
            let y = c - x;
            let report = split_inequality_check(x, y, alpha).unwrap();
            let (holds42, margin) = power_form_holds(x, y, alpha);
            // both sides are the same inequality up to the positive factor 1/(α-1) in log form
            let log_margin45 = report.lhs.ln() - report.rhs.ln();
            prop_assert!((log_margin45 * (alpha - 1.0) - margin).abs() < 1e-10);
            if margin.abs() > 1e-10 {
                prop_assert_eq!(report.slack >= 0.0, holds42);
            }
        }
    }
}
