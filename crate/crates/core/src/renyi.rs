//! Rényi entropies and entropy powers of analytic and grid densities.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::density::{AnalyticDensity, Family, GridDensity};
use crate::error::{domain, Error, Result};

/// Order of a Rényi entropy: Shannon (`r = 1`), finite `r`, or `r = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrder {
    Shannon,
    Finite(f64),
    Sup,
}

impl RenyiOrder {
    /// Maps `1` to Shannon and `+∞` to the sup regime.
    pub fn new(r: f64) -> Result<Self> {
        if r == 1.0 {
            Ok(Self::Shannon)
        } else if r == f64::INFINITY {
            Ok(Self::Sup)
        } else if r > 0.0 && r.is_finite() {
            Ok(Self::Finite(r))
        } else {
            Err(domain("RenyiOrder", r, "r > 0"))
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Self::Shannon => 1.0,
            Self::Finite(r) => r,
            Self::Sup => f64::INFINITY,
        }
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shannon => write!(f, "1"),
            Self::Finite(r) => write!(f, "{r}"),
            Self::Sup => write!(f, "inf"),
        }
    }
}

impl FromStr for RenyiOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "shannon" => Ok(Self::Shannon),
            "inf" | "infinity" | "sup" => Ok(Self::Sup),
            t => {
                let r: f64 = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad Rényi order {s:?}")))?;
                Self::new(r)
            }
        }
    }
}

impl Serialize for RenyiOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Self::Finite(r) => s.serialize_f64(r),
            Self::Shannon => s.serialize_f64(1.0),
            Self::Sup => s.serialize_str("inf"),
        }
    }
}

/// Entropy `h` (nats) together with the entropy power `N = exp(2h/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyResult {
    pub h: f64,
    #[serde(rename = "N")]
    pub power: f64,
    pub dimension: u32,
}

impl EntropyResult {
    pub fn from_entropy(h: f64, dimension: u32) -> Self {
        Self {
            h,
            power: (2.0 * h / dimension as f64).exp(),
            dimension,
        }
    }
}

/// The functionals of a density that the entropies are built from.
pub trait EntropySource {
    /// `∫ f^r`, `r > 0`.
    fn lr_integral(&self, r: f64) -> Result<f64>;
    /// `-∫ f log f` with `0 log 0 = 0`.
    fn shannon(&self) -> Result<f64>;
    /// `sup f`.
    fn sup_norm(&self) -> Result<f64>;
}

impl EntropySource for AnalyticDensity {
    fn lr_integral(&self, r: f64) -> Result<f64> {
        match self.lr_integral_closed(r) {
            Some(v) => Ok(v),
            None => positive(self.integrate(12.0, |x| self.eval(x).powf(r)), "∫f^r"),
        }
    }

    fn shannon(&self) -> Result<f64> {
        match self.shannon_entropy_closed() {
            Some(v) => Ok(v),
            None => Ok(self.integrate(12.0, |x| neg_f_log_f(self.eval(x)))),
        }
    }

    fn sup_norm(&self) -> Result<f64> {
        Ok(self.sup_value())
    }
}

impl EntropySource for GridDensity {
    fn lr_integral(&self, r: f64) -> Result<f64> {
        non_empty(self)?;
        positive(self.integral_of(|v| if v > 0.0 { v.powf(r) } else { 0.0 }), "∫f^r")
    }

    fn shannon(&self) -> Result<f64> {
        non_empty(self)?;
        Ok(self.integral_of(neg_f_log_f))
    }

    fn sup_norm(&self) -> Result<f64> {
        non_empty(self)?;
        positive(self.max_value(), "sup f")
    }
}

fn neg_f_log_f(v: f64) -> f64 {
    if v > 0.0 {
        -v * v.ln()
    } else {
        0.0
    }
}

fn non_empty(g: &GridDensity) -> Result<()> {
    if g.is_empty() {
        Err(Error::InvalidGrid("empty grid".into()))
    } else {
        Ok(())
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} = {v} is not a positive finite number")))
    }
}

/// One-dimensional Rényi entropy of the given order.
pub fn renyi_entropy<S: EntropySource + ?Sized>(f: &S, order: RenyiOrder) -> Result<EntropyResult> {
    let h = match order {
        RenyiOrder::Shannon => f.shannon()?,
        RenyiOrder::Finite(r) => -f.lr_integral(r)?.ln() / (r - 1.0),
        RenyiOrder::Sup => -f.sup_norm()?.ln(),
    };
    Ok(EntropyResult::from_entropy(h, 1))
}

/// `N_r = exp(2 h_r)`.
pub fn renyi_power<S: EntropySource + ?Sized>(f: &S, order: RenyiOrder) -> Result<f64> {
    renyi_entropy(f, order).map(|e| e.power)
}

/// `(∫ f^r)^{-2/(r-1) - 1}`, `r > 1`.
pub fn savare_toscani_power<S: EntropySource + ?Sized>(f: &S, r: f64) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(domain("savare_toscani_power", r, "1 < r < ∞"));
    }
    let lr = f.lr_integral(r)?;
    Ok(lr.powf(-2.0 / (r - 1.0) - 1.0))
}

/// `N_r^α`. Any `α > 0` is accepted so that exponents below one, which
/// appear as lower ends of admissible ranges, can be evaluated.
pub fn renyi_power_alpha<S: EntropySource + ?Sized>(f: &S, order: RenyiOrder, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("renyi_power_alpha", alpha, "α > 0"));
    }
    Ok(renyi_power(f, order)?.powf(alpha))
}

/// Entropy of the isotropic Gaussian `N(0, σ² I_n)`.
pub fn gaussian_entropy(sigma: f64, order: RenyiOrder, dimension: u32) -> Result<EntropyResult> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(domain("gaussian_entropy", sigma, "σ > 0"));
    }
    if dimension == 0 {
        return Err(Error::Domain {
            func: "gaussian_entropy",
            value: 0.0,
            expected: "dimension ≥ 1",
        });
    }
    let half_n = 0.5 * dimension as f64;
    let base = half_n * (2.0 * std::f64::consts::PI * sigma * sigma).ln();
    let h = match order {
        RenyiOrder::Shannon => base + half_n,
        RenyiOrder::Finite(r) => base + half_n * r.ln() / (r - 1.0),
        RenyiOrder::Sup => base,
    };
    Ok(EntropyResult::from_entropy(h, dimension))
}

/// Entropy of the product density `f(x_1)…f(x_n)` on `R^n`: entropies add,
/// so the entropy power equals that of a single factor.
pub fn product_entropy(f: &AnalyticDensity, order: RenyiOrder, dimension: u32) -> Result<EntropyResult> {
    if dimension == 0 {
        return Err(Error::Domain {
            func: "product_entropy",
            value: 0.0,
            expected: "dimension ≥ 1",
        });
    }
    let one = renyi_entropy(f, order)?;
    Ok(EntropyResult::from_entropy(one.h * dimension as f64, dimension))
}

/// True when the density is a centered Gaussian, for which closed-form
/// entropies in any dimension are available.
pub fn gaussian_sigma(f: &AnalyticDensity) -> Option<f64> {
    match f.family() {
        Family::Gaussian { sigma } => Some(sigma * f.scale()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{common_step, discretize_step, GridConfig};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn all_variants() -> Vec<AnalyticDensity> {
        vec![
            AnalyticDensity::gaussian(1.0).unwrap(),
            AnalyticDensity::uniform(0.0, 1.0).unwrap(),
            AnalyticDensity::exp_power(2.5).unwrap(),
            AnalyticDensity::exp_power(1.5).unwrap(),
            AnalyticDensity::q_gaussian_beta(),
            AnalyticDensity::triangle(),
        ]
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn order_parsing() {
        assert_eq!("2".parse::<RenyiOrder>().unwrap(), RenyiOrder::Finite(2.0));
        assert_eq!("1".parse::<RenyiOrder>().unwrap(), RenyiOrder::Shannon);
        assert_eq!("inf".parse::<RenyiOrder>().unwrap(), RenyiOrder::Sup);
        assert!("0".parse::<RenyiOrder>().is_err());
        assert!("-2".parse::<RenyiOrder>().is_err());
        assert!("x".parse::<RenyiOrder>().is_err());
    }

    #[test]
    fn closed_form_examples() {
        let u = AnalyticDensity::uniform(0.0, 1.0).unwrap();
        let g = AnalyticDensity::gaussian(1.0).unwrap();
        let t = AnalyticDensity::triangle();
        for r in [1.5, 2.0, 3.0, 7.0] {
            let o = RenyiOrder::Finite(r);
            assert!(close(renyi_power(&u, o).unwrap(), 1.0, 1e-14));
            let want = 2.0 * PI * r.powf(1.0 / (r - 1.0));
            assert!(close(renyi_power(&g, o).unwrap(), want, 1e-13));
            let want = ((r + 1.0) / 2.0).powf(2.0 / (r - 1.0));
            assert!(close(renyi_power(&t, o).unwrap(), want, 1e-13));
        }
        assert!(close(renyi_power(&t, RenyiOrder::Finite(2.0)).unwrap(), 2.25, 1e-14));
        assert!(close(renyi_power(&u, RenyiOrder::Sup).unwrap(), 1.0, 1e-15));
        assert!(close(renyi_power(&t, RenyiOrder::Sup).unwrap(), 1.0, 1e-15));
        assert!(close(renyi_power(&g, RenyiOrder::Shannon).unwrap(), 2.0 * PI * std::f64::consts::E, 1e-13));
    }

    #[test]
    fn savare_toscani_examples() {
        let u = AnalyticDensity::uniform(0.0, 1.0).unwrap();
        let t = AnalyticDensity::triangle();
        let g = AnalyticDensity::gaussian(1.0).unwrap();
        assert!(close(savare_toscani_power(&u, 2.5).unwrap(), 1.0, 1e-14));
        assert!(close(savare_toscani_power(&t, 2.0).unwrap(), 3.375, 1e-13));
        assert!(close(savare_toscani_power(&g, 2.0).unwrap(), (4.0 * PI).powf(1.5), 1e-13));
        assert!(savare_toscani_power(&g, 1.0).is_err());
        // N~_r = N_r^{1 + (r-1)/2}
        for d in all_variants() {
            for r in [1.5, 2.0, 4.0] {
                let n = renyi_power(&d, RenyiOrder::Finite(r)).unwrap();
                let st = savare_toscani_power(&d, r).unwrap();
                assert!(close(st, n.powf(1.0 + (r - 1.0) / 2.0), 1e-12));
            }
        }
    }

    #[test]
    fn alpha_power_examples() {
        let o = RenyiOrder::Finite(2.0);
        let u = AnalyticDensity::uniform(0.0, 1.0).unwrap();
        let g = AnalyticDensity::gaussian(1.0).unwrap();
        let t = AnalyticDensity::triangle();
        assert!(close(renyi_power_alpha(&u, o, 1.5).unwrap(), 1.0, 1e-14));
        assert!(close(renyi_power_alpha(&g, o, 1.5).unwrap(), 44.546, 1e-4));
        assert!(close(renyi_power_alpha(&t, o, 1.5).unwrap(), 3.375, 1e-13));
        assert!(renyi_power_alpha(&t, o, 0.0).is_err());
    }

    #[test]
    fn power_matches_entropy_definition() {
        for d in all_variants() {
            for o in [RenyiOrder::Shannon, RenyiOrder::Finite(2.0), RenyiOrder::Sup] {
                let e = renyi_entropy(&d, o).unwrap();
                assert!(close(e.power, (2.0 * e.h).exp(), 1e-12));
            }
        }
    }

    #[test]
    fn monotone_in_order() {
        let orders = [
            RenyiOrder::Finite(1.2),
            RenyiOrder::Finite(1.5),
            RenyiOrder::Finite(2.0),
            RenyiOrder::Finite(3.0),
            RenyiOrder::Finite(10.0),
            RenyiOrder::Sup,
        ];
        for d in all_variants() {
            let powers: Vec<f64> = orders.iter().map(|&o| renyi_power(&d, o).unwrap()).collect();
            for w in powers.windows(2) {
                assert!(w[0] - w[1] >= -1e-9, "{d}: {powers:?}");
            }
            let shannon = renyi_power(&d, RenyiOrder::Shannon).unwrap();
            assert!(shannon - powers[0] >= -1e-9);
        }
    }

    #[test]
    fn scaling_law() {
        for d in all_variants() {
            for s in [0.5, 2.0, 7.0] {
                let scaled = d.affine(s, 0.3).unwrap();
                for o in [RenyiOrder::Shannon, RenyiOrder::Finite(1.5), RenyiOrder::Finite(3.0), RenyiOrder::Sup] {
                    let a = renyi_power(&scaled, o).unwrap();
                    let b = renyi_power(&d, o).unwrap();
                    assert!(close(a, s * s * b, 1e-9), "{d} scale {s} order {o}");
                }
            }
        }
    }

    #[test]
    fn finite_orders_bracket_shannon() {
        let g = AnalyticDensity::gaussian(1.0).unwrap();
        let below = renyi_entropy(&g, RenyiOrder::Finite(1.0 - 1e-4)).unwrap().h;
        let above = renyi_entropy(&g, RenyiOrder::Finite(1.0 + 1e-4)).unwrap().h;
        let shannon = renyi_entropy(&g, RenyiOrder::Shannon).unwrap().h;
        assert!(below >= shannon && shannon >= above);
        assert!(below - shannon < 1e-3 && shannon - above < 1e-3);
    }

    #[test]
    fn closed_form_matches_grid() {
        let config = GridConfig::with_n(1 << 13);
        for d in all_variants() {
            let dx = common_step(std::slice::from_ref(&d), &config).unwrap();
            let grid = discretize_step(&d, dx, config.window_factor).unwrap();
            for r in [1.5, 2.0, 3.0] {
                let o = RenyiOrder::Finite(r);
                let a = renyi_power(&d, o).unwrap();
                let g = renyi_power(&grid, o).unwrap();
                assert!(close(g, a, 1e-6), "{d} r={r}: grid {g} vs closed {a}");
            }
            let a = renyi_power(&d, RenyiOrder::Shannon).unwrap();
            let g = renyi_power(&grid, RenyiOrder::Shannon).unwrap();
            assert!(close(g, a, 1e-5), "{d} shannon: grid {g} vs closed {a}");
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for d in all_variants() {
            for r in [0.5, 1.5, 2.0, 3.0] {
                let quad = d.integrate(12.0, |x| d.eval(x).powf(r));
                assert!(close(d.lr_integral(r).unwrap(), quad, 1e-9), "{d} r={r}");
            }
        }
    }

    #[test]
    fn gaussian_closed_form_in_any_dimension() {
        for n in [1, 2, 5] {
            for r in [1.5, 2.0, 3.0] {
                let e = gaussian_entropy(1.0, RenyiOrder::Finite(r), n).unwrap();
                assert!(close(e.power, 2.0 * PI * r.powf(1.0 / (r - 1.0)), 1e-13));
                assert_eq!(e.dimension, n);
            }
        }
        let one = gaussian_entropy(1.3, RenyiOrder::Finite(2.0), 1).unwrap();
        let g = AnalyticDensity::gaussian(1.3).unwrap();
        assert!(close(one.h, renyi_entropy(&g, RenyiOrder::Finite(2.0)).unwrap().h, 1e-13));
        assert!(gaussian_entropy(1.0, RenyiOrder::Shannon, 0).is_err());
    }

    #[test]
    fn tensorization_keeps_power() {
        for d in all_variants() {
            for n in [1, 2, 3, 10] {
                let o = RenyiOrder::Finite(2.0);
                let p = product_entropy(&d, o, n).unwrap();
                assert!(close(p.power, renyi_power(&d, o).unwrap(), 1e-12));
                assert!(close(p.h, n as f64 * renyi_entropy(&d, o).unwrap().h, 1e-12));
            }
        }
    }

    proptest! {
        #[test]
        fn order_monotonicity_random(r1 in 1.01f64..20.0, r2 in 1.01f64..20.0, s in 0.1f64..10.0) {
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            for d in all_variants() {
                let d = d.affine(s, 0.0).unwrap();
                let a = renyi_power(&d, RenyiOrder::Finite(lo)).unwrap();
                let b = renyi_power(&d, RenyiOrder::Finite(hi)).unwrap();
                prop_assert!(a - b >= -1e-9 * a);
            }
        }

        #[test]
        fn scaling_random(s in 0.05f64..20.0, r in 1.05f64..8.0) {
            for d in all_variants() {
                let a = renyi_power(&d.affine(s, 0.0).unwrap(), RenyiOrder::Finite(r)).unwrap();
                let b = renyi_power(&d, RenyiOrder::Finite(r)).unwrap();
                prop_assert!(close(a, s * s * b, 1e-9));
            }
        }
    }
}
