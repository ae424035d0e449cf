//! Closed-form one-dimensional densities and their grid discretizations.

mod grid;
mod parse;

pub use grid::{common_step, discretize, discretize_step, GridConfig, GridDensity, DEFAULT_MASS_TOL};

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics;
use crate::specfun::{gamma, log_gamma};

/// Base shape of an [`AnalyticDensity`], before the affine pushforward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Centered normal with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Uniform on `[a, b]`.
    Uniform { a: f64, b: f64 },
    /// `B exp(-|x|^p / p)`; `p = 2` is the standard normal.
    ExpPower { p: f64 },
    /// `(3/4)(1 - x^2)` on `|x| < 1`.
    QGaussianBeta,
    /// `x` on `[0, 1]`, `2 - x` on `[1, 2]`.
    Triangle,
}

/// A density from [`Family`] pushed forward by `x ↦ scale·x + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticDensity {
    family: Family,
    scale: f64,
    shift: f64,
}

/// Standardized cumulants of a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulantSet {
    pub mean: f64,
    pub variance: f64,
    /// Third moment after standardization.
    pub gamma3: f64,
    /// Fourth moment minus 3 after standardization.
    pub gamma4: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidDensity(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Normalizer of the exponential-power density: `1 / (2 p^{1/p - 1} Γ(1/p))`.
pub fn exp_power_normalizer(p: f64) -> f64 {
    let log_inv = 2f64.ln() + (1.0 / p - 1.0) * p.ln() + log_gamma(1.0 / p).expect("p >= 1");
    (-log_inv).exp()
}

impl Family {
    fn validate(self) -> Result<Self> {
        match self {
            Family::Gaussian { sigma } => {
                positive("sigma", sigma)?;
            }
            Family::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidDensity(format!("uniform needs a < b, got [{a}, {b}]")));
                }
            }
            Family::ExpPower { p } => {
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(Error::InvalidDensity(format!("exp-power needs p >= 1, got {p}")));
                }
            }
            Family::QGaussianBeta | Family::Triangle => {}
        }
        Ok(self)
    }

    fn eval(self, u: f64) -> f64 {
        match self {
            Family::Gaussian { sigma } => {
                let z = u / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Family::Uniform { a, b } => {
                if (a..=b).contains(&u) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Family::ExpPower { p } => exp_power_normalizer(p) * (-u.abs().powf(p) / p).exp(),
            Family::QGaussianBeta => {
                if u.abs() < 1.0 {
                    0.75 * (1.0 - u) * (1.0 + u)
                } else {
                    0.0
                }
            }
            Family::Triangle => {
                if (0.0..=1.0).contains(&u) {
                    u
                } else if (1.0..=2.0).contains(&u) {
                    2.0 - u
                } else {
                    0.0
                }
            }
        }
    }

    fn derivative(self, u: f64) -> Option<f64> {
        match self {
            Family::Gaussian { sigma } => Some(-u / (sigma * sigma) * self.eval(u)),
            Family::ExpPower { p } => {
                Some(-u.signum() * u.abs().powf(p - 1.0) * self.eval(u))
            }
            Family::QGaussianBeta => Some(if u.abs() < 1.0 { -1.5 * u } else { 0.0 }),
            Family::Uniform { .. } | Family::Triangle => None,
        }
    }

    fn support(self) -> (f64, f64) {
        match self {
            Family::Gaussian { .. } | Family::ExpPower { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Uniform { a, b } => (a, b),
            Family::QGaussianBeta => (-1.0, 1.0),
            Family::Triangle => (0.0, 2.0),
        }
    }

    /// Interior points where the density or its derivative is not smooth.
    fn kinks(self) -> Vec<f64> {
        match self {
            Family::ExpPower { p } if p != 2.0 => vec![0.0],
            Family::Triangle => vec![1.0],
            _ => Vec::new(),
        }
    }

    fn sup(self) -> f64 {
        match self {
            Family::Gaussian { sigma } => 1.0 / (sigma * (2.0 * PI).sqrt()),
            Family::Uniform { a, b } => 1.0 / (b - a),
            Family::ExpPower { p } => exp_power_normalizer(p),
            Family::QGaussianBeta => 0.75,
            Family::Triangle => 1.0,
        }
    }

    fn lr_integral(self, r: f64) -> f64 {
        match self {
            Family::Gaussian { sigma } => {
                (2.0 * PI * sigma * sigma).powf(0.5 * (1.0 - r)) / r.sqrt()
            }
            Family::Uniform { a, b } => (b - a).powf(1.0 - r),
            Family::ExpPower { p } => exp_power_normalizer(p).powf(r - 1.0) * r.powf(-1.0 / p),
            // (3/4)^r B(1/2, r+1)
            Family::QGaussianBeta => {
                let log_beta = log_gamma(0.5).unwrap() + log_gamma(r + 1.0).unwrap()
                    - log_gamma(r + 1.5).unwrap();
                (r * 0.75f64.ln() + log_beta).exp()
            }
            Family::Triangle => 2.0 / (r + 1.0),
        }
    }

    fn shannon(self) -> f64 {
        match self {
            Family::Gaussian { sigma } => 0.5 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln(),
            Family::Uniform { a, b } => (b - a).ln(),
            Family::ExpPower { p } => -exp_power_normalizer(p).ln() + 1.0 / p,
            Family::QGaussianBeta => 5.0 / 3.0 - 3f64.ln(),
            Family::Triangle => 0.5,
        }
    }

    /// (mean, variance, third standardized moment, excess kurtosis).
    fn moments(self) -> (f64, f64, f64, f64) {
        match self {
            Family::Gaussian { sigma } => (0.0, sigma * sigma, 0.0, 0.0),
            Family::Uniform { a, b } => (0.5 * (a + b), (b - a) * (b - a) / 12.0, 0.0, -1.2),
            Family::ExpPower { p } => {
                let g1 = gamma(1.0 / p).unwrap();
                let g3 = gamma(3.0 / p).unwrap();
                let g5 = gamma(5.0 / p).unwrap();
                let var = p.powf(2.0 / p) * g3 / g1;
                (0.0, var, 0.0, g5 * g1 / (g3 * g3) - 3.0)
            }
            Family::QGaussianBeta => (0.0, 0.2, 0.0, 15.0 / 7.0 - 3.0),
            Family::Triangle => (1.0, 1.0 / 6.0, 0.0, -0.6),
        }
    }
}

impl AnalyticDensity {
    pub fn new(family: Family) -> Result<Self> {
        Ok(Self {
            family: family.validate()?,
            scale: 1.0,
            shift: 0.0,
        })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(Family::Gaussian { sigma })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Uniform { a, b })
    }

    pub fn exp_power(p: f64) -> Result<Self> {
        Self::new(Family::ExpPower { p })
    }

    pub fn q_gaussian_beta() -> Self {
        Self::new(Family::QGaussianBeta).expect("parameter-free")
    }

    pub fn triangle() -> Self {
        Self::new(Family::Triangle).expect("parameter-free")
    }

    /// Composes a further affine map `x ↦ scale·x + shift` onto this density.
    pub fn affine(self, scale: f64, shift: f64) -> Result<Self> {
        positive("scale", scale)?;
        if !shift.is_finite() {
            return Err(Error::InvalidDensity(format!("shift must be finite, got {shift}")));
        }
        Ok(Self {
            family: self.family,
            scale: scale * self.scale,
            shift: scale * self.shift + shift,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    fn to_base(self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    fn to_x(self, u: f64) -> f64 {
        self.scale * u + self.shift
    }

    /// Density value at `x`; zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        self.family.eval(self.to_base(x)) / self.scale
    }

    /// Classical derivative `f'(x)`, for the differentiable families.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.family
            .derivative(self.to_base(x))
            .map(|d| d / (self.scale * self.scale))
            .ok_or_else(|| Error::NotDifferentiable(self.to_string()))
    }

    /// Whether `f'` exists as a function (Uniform and Triangle only have
    /// distributional derivatives).
    pub fn is_differentiable(&self) -> bool {
        self.family.derivative(0.5).is_some()
    }

    /// Closed support; infinite ends for Gaussian-like families.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.family.support();
        (self.to_x(lo), self.to_x(hi))
    }

    /// Points where the density jumps.
    pub fn jump_points(&self) -> Vec<f64> {
        match self.family {
            Family::Uniform { a, b } => vec![self.to_x(a), self.to_x(b)],
            _ => Vec::new(),
        }
    }

    /// Finite support ends plus interior kinks, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let mut pts: Vec<f64> = self.family.kinks().into_iter().map(|u| self.to_x(u)).collect();
        pts.extend([lo, hi].into_iter().filter(|v| v.is_finite()));
        pts.sort_by(f64::total_cmp);
        pts
    }

    pub fn sup_value(&self) -> f64 {
        self.family.sup() / self.scale
    }

    /// Exact `∫ f^r`, `r > 0`. Every family has a closed form; the `Option`
    /// leaves room for families that only admit quadrature.
    pub fn lr_integral_closed(&self, r: f64) -> Option<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return None;
        }
        Some(self.family.lr_integral(r) * self.scale.powf(1.0 - r))
    }

    /// Exact `∫ f'^2 f^{r-2}` for the exponential-power family, `r > 1`.
    pub fn fisher_like_integral_closed(&self, r: f64) -> Option<f64> {
        let Family::ExpPower { p } = self.family else {
            return None;
        };
        if !(r > 1.0 && r.is_finite()) {
            return None;
        }
        let b = exp_power_normalizer(p);
        let base = 2.0 * b.powf(r) * (p / r).powf((2.0 * p - 1.0) / p) / p
            * gamma(2.0 - 1.0 / p).unwrap();
        Some(base * self.scale.powf(-(r + 1.0)))
    }

    /// Exact Shannon entropy `-∫ f log f`.
    pub fn shannon_entropy_closed(&self) -> Option<f64> {
        Some(self.family.shannon() + self.scale.ln())
    }

    /// Cumulants of the standardized pushforward, plus mean and variance.
    pub fn cumulants(&self) -> CumulantSet {
        let (mean, var, g3, g4) = self.family.moments();
        CumulantSet {
            mean: self.scale * mean + self.shift,
            variance: self.scale * self.scale * var,
            gamma3: g3,
            gamma4: g4,
        }
    }

    /// Default truncation window. Gaussians use `mean ± factor·σ`, the
    /// exponential-power family `|u| ≤ (factor·p)^{1/p}·max(1, p)`, compact
    /// families their support.
    pub fn default_window(&self, window_factor: f64) -> (f64, f64) {
        let half = match self.family {
            Family::Gaussian { sigma } => window_factor * sigma,
            // the second term keeps the tail below e^-40 for p < 2
            Family::ExpPower { p } => {
                ((window_factor * p).powf(1.0 / p) * p.max(1.0)).max((40.0 * p).powf(1.0 / p))
            }
            _ => return self.support(),
        };
        (self.to_x(-half), self.to_x(half))
    }

    /// `∫ g(x) dx` over `[lo, hi] ∩ support`, split at breakpoints and
    /// evaluated with double-exponential quadrature on each smooth piece.
    pub fn integrate_over(&self, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
        let (s_lo, s_hi) = self.support();
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi);
        if !(lo < hi) {
            return 0.0;
        }
        let mut cuts = vec![lo];
        cuts.extend(self.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        cuts.windows(2).map(|w| numerics::integrate_fn(&g, w[0], w[1])).sum()
    }

    /// `∫ g(x) dx` over the default window.
    pub fn integrate(&self, window_factor: f64, g: impl Fn(f64) -> f64) -> f64 {
        let (lo, hi) = self.default_window(window_factor);
        self.integrate_over(lo, hi, g)
    }
}

impl fmt::Display for AnalyticDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Gaussian { sigma } => write!(f, "gaussian:{sigma}")?,
            Family::Uniform { a, b } => write!(f, "uniform:{a},{b}")?,
            Family::ExpPower { p } => write!(f, "exppower:{p}")?,
            Family::QGaussianBeta => write!(f, "beta")?,
            Family::Triangle => write!(f, "triangle")?,
        }
        if self.scale != 1.0 || self.shift != 0.0 {
            write!(f, "@{},{}", self.scale, self.shift)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FACTOR: f64 = 12.0;

    fn all_variants() -> Vec<AnalyticDensity> {
        vec![
            AnalyticDensity::gaussian(1.0).unwrap(),
            AnalyticDensity::gaussian(0.5).unwrap().affine(1.0, 3.0).unwrap(),
            AnalyticDensity::uniform(0.0, 1.0).unwrap(),
            AnalyticDensity::uniform(-2.0, 5.0).unwrap(),
            AnalyticDensity::exp_power(2.0).unwrap(),
            AnalyticDensity::exp_power(2.2).unwrap(),
            AnalyticDensity::exp_power(3.0).unwrap().affine(2.0, -1.0).unwrap(),
            AnalyticDensity::q_gaussian_beta(),
            AnalyticDensity::triangle(),
        ]
    }

    /// Plain midpoint rule with many cells; independent of the library quadrature.
    fn midpoint(lo: f64, hi: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
        let h = (hi - lo) / n as f64;
        (0..n).map(|i| g(lo + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    #[test]
    fn point_values() {
        let u = AnalyticDensity::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.eval(0.5), 1.0);
        assert_eq!(u.eval(1.5), 0.0);
        assert_eq!(AnalyticDensity::q_gaussian_beta().eval(0.0), 0.75);
        let g = AnalyticDensity::exp_power(2.0).unwrap();
        assert!((g.eval(0.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((g.eval(0.0) - 0.39894).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AnalyticDensity::gaussian(0.0).is_err());
        assert!(AnalyticDensity::uniform(1.0, 1.0).is_err());
        assert!(AnalyticDensity::exp_power(0.5).is_err());
        assert!(AnalyticDensity::triangle().affine(-1.0, 0.0).is_err());
    }

    #[test]
    fn unit_mass_and_nonnegative() {
        for d in all_variants() {
            let mass = d.integrate(FACTOR, |x| d.eval(x));
            assert!((mass - 1.0).abs() < 1e-9, "{d}: mass {mass}");
            let (lo, hi) = d.default_window(FACTOR);
            for i in 0..=1000 {
                let x = lo - 1.0 + (hi - lo + 2.0) * i as f64 / 1000.0;
                assert!(d.eval(x) >= 0.0);
            }
        }
    }

    #[test]
    fn exp_power_normalizer_identity() {
        for p in [1.0, 1.5, 2.0, 2.2, 3.0, 5.0] {
            let b = exp_power_normalizer(p);
            let expected = 2.0 * p.powf(1.0 / p - 1.0) * gamma(1.0 / p).unwrap();
            assert!((1.0 / b - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn lr_integral_examples() {
        let u = AnalyticDensity::uniform(0.0, 1.0).unwrap();
        for r in [0.5, 1.5, 2.0, 7.0] {
            assert!((u.lr_integral_closed(r).unwrap() - 1.0).abs() < 1e-15);
        }
        let t = AnalyticDensity::triangle();
        assert!((t.lr_integral_closed(2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let g = AnalyticDensity::exp_power(2.0).unwrap();
        let want = (2.0 * PI).powf(-0.5) * 2f64.powf(-0.5);
        assert!((g.lr_integral_closed(2.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.2821).abs() < 1e-4);
        let beta = AnalyticDensity::q_gaussian_beta();
        assert!((beta.lr_integral_closed(2.0).unwrap() - 0.6).abs() < 1e-14);
        // (9/16) ∫ (1-x²)² on [-1, 1] by midpoint rule
        let oracle = midpoint(-1.0, 1.0, 200_000, |x| (0.75 * (1.0 - x * x)).powi(2));
        assert!((oracle - 0.6).abs() < 1e-9);
    }

    #[test]
    fn lr_integral_matches_quadrature() {
        for d in all_variants() {
            for r in [1.5, 2.0, 3.0] {
                let closed = d.lr_integral_closed(r).unwrap();
                let quad = d.integrate(FACTOR, |x| d.eval(x).powf(r));
                assert!((closed - quad).abs() <= 1e-8 * closed, "{d} r={r}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn fisher_like_examples() {
        let g = AnalyticDensity::exp_power(2.0).unwrap();
        let want = gamma(1.5).unwrap() / (2.0 * PI);
        assert!((g.fisher_like_integral_closed(2.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.14105).abs() < 1e-5);
        assert!(AnalyticDensity::gaussian(1.0).unwrap().fisher_like_integral_closed(2.0).is_none());
        assert!(g.fisher_like_integral_closed(1.0).is_none());
    }

    #[test]
    fn fisher_like_matches_central_difference_quadrature() {
        let h = 1e-5;
        for p in [2.0, 2.2, 2.5] {
            let d = AnalyticDensity::exp_power(p).unwrap();
            for r in [1.5, 2.0, 3.0] {
                let closed = d.fisher_like_integral_closed(r).unwrap();
                let integrand = |x: f64| {
                    let f = d.eval(x);
                    if f <= 1e-300 {
                        return 0.0;
                    }
                    let df = (d.eval(x + h) - d.eval(x - h)) / (2.0 * h);
                    df * df * f.powf(r - 2.0)
                };
                // even integrand: integrate the right half with a midpoint rule
                let (_, hi) = d.default_window(FACTOR);
                let quad = 2.0 * midpoint(0.0, hi, 400_000, integrand);
                assert!((quad - closed).abs() <= 1e-6 * closed, "p={p} r={r}: {quad} vs {closed}");
            }
        }
    }

    #[test]
    fn fisher_like_scaling() {
        let d = AnalyticDensity::exp_power(2.5).unwrap();
        for s in [0.5, 2.0, 7.0] {
            for r in [1.5, 2.0, 3.0] {
                let base = d.fisher_like_integral_closed(r).unwrap();
                let scaled = d.affine(s, 0.3).unwrap().fisher_like_integral_closed(r).unwrap();
                assert!((scaled / base - s.powf(-(r + 1.0))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        let h = 1e-6;
        for d in all_variants().into_iter().filter(|d| d.is_differentiable()) {
            for x in [-0.7, -0.2, 0.3, 0.9] {
                let fd = (d.eval(x + h) - d.eval(x - h)) / (2.0 * h);
                assert!((d.derivative(x).unwrap() - fd).abs() < 1e-7, "{d} at {x}");
            }
        }
        assert!(AnalyticDensity::triangle().derivative(0.5).is_err());
    }

    #[test]
    fn cumulant_examples() {
        let g = AnalyticDensity::gaussian(3.0).unwrap().cumulants();
        assert_eq!((g.gamma3, g.gamma4), (0.0, 0.0));
        let u = AnalyticDensity::uniform(2.0, 5.0).unwrap().cumulants();
        assert!((u.gamma4 + 1.2).abs() < 1e-15);
        assert!((u.mean - 3.5).abs() < 1e-15 && (u.variance - 0.75).abs() < 1e-15);
        let b = AnalyticDensity::q_gaussian_beta().cumulants();
        assert!((b.gamma4 + 6.0 / 7.0).abs() < 1e-15);
        assert!((b.variance - 0.2).abs() < 1e-15);
    }

    #[test]
    fn cumulants_match_quadrature_moments() {
        for d in all_variants() {
            let c = d.cumulants();
            let (lo, hi) = d.default_window(FACTOR);
            let mean = d.integrate_over(lo, hi, |x| x * d.eval(x));
            let var = d.integrate_over(lo, hi, |x| (x - mean).powi(2) * d.eval(x));
            let sd = var.sqrt();
            let m3 = d.integrate_over(lo, hi, |x| ((x - mean) / sd).powi(3) * d.eval(x));
            let m4 = d.integrate_over(lo, hi, |x| ((x - mean) / sd).powi(4) * d.eval(x));
            assert!((c.mean - mean).abs() < 1e-9, "{d}");
            assert!((c.variance - var).abs() < 1e-9 * var, "{d}");
            assert!((c.gamma3 - m3).abs() < 1e-9, "{d}");
            assert!((c.gamma4 - (m4 - 3.0)).abs() < 1e-8, "{d}: {} vs {}", c.gamma4, m4 - 3.0);
        }
    }

    #[test]
    fn shannon_closed_matches_quadrature() {
        for d in all_variants() {
            let closed = d.shannon_entropy_closed().unwrap();
            let quad = d.integrate(FACTOR, |x| {
                let f = d.eval(x);
                if f > 0.0 {
                    -f * f.ln()
                } else {
                    0.0
                }
            });
            assert!((closed - quad).abs() < 1e-9, "{d}: {closed} vs {quad}");
        }
    }

    #[test]
    fn display_round_trips_through_parser() {
        for d in all_variants() {
            let text = d.to_string();
            let back: AnalyticDensity = text.parse().unwrap();
            assert_eq!(back, d, "{text}");
        }
    }
}
