//! Rényi entropies along normalized sums `Z_k = (X_1 + … + X_k)/√k` and
//! the first-order Edgeworth constant governing `h_r(Z) - h_r(Z_k)`.

use serde::Serialize;

use crate::density::{common_step, discretize_step, AnalyticDensity, GridConfig, GridDensity};
use crate::error::{domain, Error, Result};
use crate::numerics::convolve;
use crate::renyi::{gaussian_entropy, renyi_entropy, RenyiOrder};

/// `B_r = (1/(4r)) [(2-r)/3 γ3² + (r-1)/2 γ4]`, `r ≥ 1`.
pub fn b_r(gamma3: f64, gamma4: f64, r: f64) -> Result<f64> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(domain("b_r", r, "1 ≤ r < ∞"));
    }
    Ok(((2.0 - r) / 3.0 * gamma3 * gamma3 + (r - 1.0) / 2.0 * gamma4) / (4.0 * r))
}

/// `r0 = (4γ3² - 3γ4) / (2γ3² - 3γ4)`, beyond which `B_r < 0`. Only defined
/// when `γ3 ≠ 0` and `γ4 < (2/3) γ3²`.
pub fn r0_threshold(gamma3: f64, gamma4: f64) -> Option<f64> {
    let s = gamma3 * gamma3;
    let denom = 2.0 * s - 3.0 * gamma4;
    if gamma3 == 0.0 || !(gamma4 < 2.0 / 3.0 * s) || denom == 0.0 {
        return None;
    }
    Some((4.0 * s - 3.0 * gamma4) / denom)
}

/// Affine pushforward with mean 0 and variance 1.
pub fn standardize(d: &AnalyticDensity) -> Result<AnalyticDensity> {
    let c = d.cumulants();
    let sd = c.variance.sqrt();
    d.affine(1.0 / sd, -c.mean / sd)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltScanResult {
    pub order: RenyiOrder,
    pub ks: Vec<u32>,
    pub h_values: Vec<f64>,
    /// `h_r(Z) - h_r(Z_k)` for the standard normal `Z`.
    pub deltas: Vec<f64>,
    /// Weighted least-squares fit of `Δ_k ≈ B/k` over the three largest `k`.
    pub slope_estimate: f64,
    /// `None` for the sup order, where the constant is not defined.
    pub b_r_analytic: Option<f64>,
    pub h_gaussian: f64,
}

impl CltScanResult {
    pub fn k_times_delta(&self) -> Vec<f64> {
        self.ks.iter().zip(&self.deltas).map(|(&k, d)| k as f64 * d).collect()
    }
}

/// Mass allowed to fall outside the working window after a doubling step.
const CROP_TOL: f64 = 1e-12;
const MAX_EXPANSIONS: usize = 4;

/// Density of `(X + X')/√2` for i.i.d. `X, X'` with grid density `g`.
///
/// The self-convolution is rescaled exactly by relabeling abscissae
/// (`dx → dx/√2`, values `× √2`), then cropped to `[-half_width,
/// half_width]`, widening the window by 1.5 when the cropped tails carry
/// more than `1e-12` of mass.
pub fn double_and_rescale(g: &GridDensity, half_width: f64) -> Result<GridDensity> {
    let sum = convolve(g, g)?;
    let z = sum.rescaled(std::f64::consts::FRAC_1_SQRT_2)?;
    let mut w = half_width;
    for _ in 0..=MAX_EXPANSIONS {
        let (cropped, removed) = z.cropped(-w, w)?;
        if removed <= CROP_TOL {
            return Ok(cropped);
        }
        w *= 1.5;
    }
    Err(Error::Numerical(format!(
        "normalized sum does not fit in [-{w}, {w}] after {MAX_EXPANSIONS} expansions"
    )))
}

/// Entropies of `Z_k` for `k = 1, 2, 4, …, k_max` by repeated doubling.
///
/// The start grid uses the spacing that `config` gives a standard Gaussian
/// (adjusted to align jumps of `d`), and `Z_k` is kept on
/// `[-window_factor, window_factor]`.
pub fn clt_scan(d: &AnalyticDensity, order: RenyiOrder, k_max: u32, config: &GridConfig) -> Result<CltScanResult> {
    let c = d.cumulants();
    if c.mean.abs() > 1e-9 || (c.variance - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDensity(format!(
            "{d} has mean {} and variance {}; standardize it first",
            c.mean, c.variance
        )));
    }
    if !k_max.is_power_of_two() || k_max > 256 {
        return Err(Error::Domain {
            func: "clt_scan",
            value: k_max as f64,
            expected: "k_max a power of two ≤ 256",
        });
    }
    let reference = AnalyticDensity::gaussian(1.0)?;
    let dx = common_step(&[*d, reference], config)?;
    let mut grid = discretize_step(d, dx, config.window_factor)?;
    let half_width = config.window_factor;

    let h_gaussian = gaussian_entropy(1.0, order, 1)?.h;
    let mut ks = Vec::new();
    let mut h_values = Vec::new();
    let mut k = 1u32;
    loop {
        let h = renyi_entropy(&grid, order)?.h;
        ks.push(k);
        h_values.push(h);
        if k == k_max {
            break;
        }
        grid = double_and_rescale(&grid, half_width)?;
        k *= 2;
    }
    let deltas: Vec<f64> = h_values.iter().map(|h| h_gaussian - h).collect();

    // weights k² make the least-squares slope the mean of k·Δ_k
    let tail = ks.len().saturating_sub(3);
    let fit: Vec<f64> = ks[tail..]
        .iter()
        .zip(&deltas[tail..])
        .map(|(&k, d)| k as f64 * d)
        .collect();
    let slope_estimate = fit.iter().sum::<f64>() / fit.len() as f64;

    let b_r_analytic = match order {
        RenyiOrder::Sup => None,
        other => Some(b_r(c.gamma3, c.gamma4, other.value())?),
    };
    Ok(CltScanResult {
        order,
        ks,
        h_values,
        deltas,
        slope_estimate,
        b_r_analytic,
        h_gaussian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn std_uniform() -> AnalyticDensity {
        standardize(&AnalyticDensity::uniform(0.0, 1.0).unwrap()).unwrap()
    }

    fn std_beta() -> AnalyticDensity {
        standardize(&AnalyticDensity::q_gaussian_beta()).unwrap()
    }

    #[test]
    fn b_r_examples() {
        for r in [1.5, 2.0, 3.0] {
            assert!((b_r(0.0, 0.7, r).unwrap() - (r - 1.0) / (8.0 * r) * 0.7).abs() < 1e-15);
        }
        assert!((b_r(0.9, 0.4, 1.0).unwrap() - 0.81 / 12.0).abs() < 1e-15);
        assert_eq!(b_r(0.0, 0.0, 2.0).unwrap(), 0.0);
        assert!((b_r(0.0, -1.2, 2.0).unwrap() + 0.075).abs() < 1e-15);
        assert!(b_r(0.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn r0_examples() {
        assert_eq!(r0_threshold(1.0, 0.0), Some(2.0));
        assert!(b_r(1.0, 0.0, 2.5).unwrap() < 0.0);
        assert!(b_r(1.0, 0.0, 1.5).unwrap() > 0.0);
        assert_eq!(r0_threshold(1.0, 1.0), None);
        let mut r = 1.01;
        while r < 10.0 {
            assert!(b_r(1.0, 1.0, r).unwrap() > 0.0);
            r += 0.1;
        }
        assert_eq!(r0_threshold(0.0, -1.0), None);
        for (g3, g4) in [(1.0, 0.0), (0.5, -0.3), (2.0, 1.0), (-1.3, 0.2)] {
            let r0 = r0_threshold(g3, g4).unwrap();
            assert!(b_r(g3, g4, r0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_examples() {
        let u = std_uniform();
        let (lo, hi) = u.support();
        assert!((lo + 3f64.sqrt()).abs() < 1e-12 && (hi - 3f64.sqrt()).abs() < 1e-12);
        let g = standardize(&AnalyticDensity::gaussian(3.0).unwrap()).unwrap();
        assert!((g.eval(0.3) - AnalyticDensity::gaussian(1.0).unwrap().eval(0.3)).abs() < 1e-15);
        let b = std_beta();
        assert!((b.scale() - 5f64.sqrt()).abs() < 1e-12);
        // variance 1/5 of the unscaled beta, by quadrature
        let raw = AnalyticDensity::q_gaussian_beta();
        assert!((raw.integrate(12.0, |x| x * x * raw.eval(x)) - 0.2).abs() < 1e-12);
        for d in [u, g, b] {
            let c = d.cumulants();
            assert!(c.mean.abs() < 1e-12 && (c.variance - 1.0).abs() < 1e-12);
        }
        assert!((std_uniform().cumulants().gamma4 + 1.2).abs() < 1e-12);
    }

    #[test]
    fn gaussian_is_fixed_point() {
        let g = AnalyticDensity::gaussian(1.0).unwrap();
        let res = clt_scan(&g, RenyiOrder::Finite(2.0), 64, &GridConfig::default()).unwrap();
        assert_eq!(res.ks, vec![1, 2, 4, 8, 16, 32, 64]);
        for d in &res.deltas {
            assert!(d.abs() < 1e-7, "{:?}", res.deltas);
        }
        assert_eq!(res.b_r_analytic, Some(0.0));
    }

    #[test]
    fn gaussian_anchor() {
        for r in [1.5, 2.0, 3.0] {
            let h = gaussian_entropy(1.0, RenyiOrder::Finite(r), 1).unwrap().h;
            assert!((h - 0.5 * (2.0 * PI * r.powf(1.0 / (r - 1.0))).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_start_converges_to_edgeworth_constant() {
        let res = clt_scan(&std_uniform(), RenyiOrder::Finite(2.0), 64, &GridConfig::default()).unwrap();
        let b = res.b_r_analytic.unwrap();
        assert!((b + 0.075).abs() < 1e-12);
        assert!((res.slope_estimate - b).abs() <= 0.2 * b.abs(), "{res:?}");
        assert!(*res.deltas.last().unwrap() < 0.0);
    }

    #[test]
    fn shannon_increases_along_doubling() {
        let res = clt_scan(&std_uniform(), RenyiOrder::Shannon, 64, &GridConfig::default()).unwrap();
        for w in res.h_values.windows(2) {
            assert!(w[1] >= w[0] - 1e-6, "{:?}", res.h_values);
        }
        assert!(res.b_r_analytic.unwrap() >= 0.0);
    }

    #[test]
    fn sign_law() {
        for d in [std_uniform(), std_beta()] {
            for r in [1.5, 2.0, 3.0] {
                let res = clt_scan(&d, RenyiOrder::Finite(r), 64, &GridConfig::default()).unwrap();
                let b = res.b_r_analytic.unwrap();
                if b.abs() > 0.01 {
                    assert_eq!(res.slope_estimate.signum(), b.signum(), "{d} r={r}: {res:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let u = AnalyticDensity::uniform(0.0, 1.0).unwrap();
        assert!(clt_scan(&u, RenyiOrder::Finite(2.0), 8, &GridConfig::default()).is_err());
        assert!(clt_scan(&std_uniform(), RenyiOrder::Finite(2.0), 12, &GridConfig::default()).is_err());
        assert!(clt_scan(&std_uniform(), RenyiOrder::Finite(2.0), 512, &GridConfig::default()).is_err());
    }

    #[test]
    fn doubling_preserves_moments() {
        let u = std_uniform();
        let dx = common_step(&[u], &GridConfig::with_n(4096)).unwrap();
        let g = discretize_step(&u, dx, 12.0).unwrap();
        let z = double_and_rescale(&g, 12.0).unwrap();
        assert!((z.mass() - 1.0).abs() < 1e-12);
        assert!(z.mean().abs() < 1e-9);
        assert!((z.variance() - g.variance()).abs() < 1e-9);
    }
}
