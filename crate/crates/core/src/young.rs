//! Sharp Young constants, the entropy-power bound they imply for sums of
//! independent variables, and the equal-power constants `A_r`, `α(r)`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::numerics::{bisect, golden_section_max};

/// A real number or `+∞`, used for conjugate exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    /// `1/self`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Self::Finite(v) => 1.0 / v,
            Self::Infinite => 0.0,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(v) => v,
            Self::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Self::Finite(v) => s.serialize_f64(v),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Hölder conjugate `p/(p-1)`; `∞` at `p = 1`.
pub fn conjugate(p: f64) -> Result<ExtReal> {
    if !(p >= 1.0) || p.is_nan() {
        return Err(domain("conjugate", p, "p ≥ 1"));
    }
    if p == 1.0 {
        Ok(ExtReal::Infinite)
    } else if p.is_infinite() {
        Ok(ExtReal::Finite(1.0))
    } else {
        Ok(ExtReal::Finite(p / (p - 1.0)))
    }
}

/// `ln c_α` written in `u = 1/α`: `-u ln u + (1-u) ln(1-u)`, `0 ln 0 = 0`.
fn log_c_from_recip(u: f64) -> f64 {
    let xlogx = |t: f64| if t > 0.0 { t * t.ln() } else { 0.0 };
    -xlogx(u) + xlogx(1.0 - u)
}

/// `c_α = α^{1/α} / α'^{1/α'}`, equal to 1 at `α = 1`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) || alpha.is_nan() {
        return Err(domain("c_alpha", alpha, "α ≥ 1"));
    }
    Ok(log_c_from_recip(1.0 / alpha).exp())
}

/// Exponents `p, q, r ≥ 1` with `1/p' + 1/q' = 1/r'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YoungExponents {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub p_conj: ExtReal,
    pub q_conj: ExtReal,
    pub r_conj: ExtReal,
}

impl YoungExponents {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        let p_conj = conjugate(p)?;
        let q_conj = conjugate(q)?;
        let r_conj = conjugate(r)?;
        let gap = p_conj.recip() + q_conj.recip() - r_conj.recip();
        if gap.abs() > 1e-12 {
            return Err(Error::Inadmissible(format!(
                "1/p' + 1/q' - 1/r' = {gap:e} for (p, q, r) = ({p}, {q}, {r})"
            )));
        }
        Ok(Self { p, q, r, p_conj, q_conj, r_conj })
    }

    /// The triple with `1/p' = x` and `1/q' = 1/r' - x`, `0 ≤ x ≤ 1/r'`.
    pub fn from_split(r: f64, x: f64) -> Result<Self> {
        conjugate(r)?;
        let s = (r - 1.0) / r;
        if !(x >= -1e-12 && x <= s + 1e-12) {
            return Err(Error::Inadmissible(format!("1/p' = {x} outside [0, {s}]")));
        }
        let x = x.clamp(0.0, s);
        let y = s - x;
        let from_recip = |t: f64| 1.0 / (1.0 - t);
        let conj = |t: f64| if t == 0.0 { ExtReal::Infinite } else { ExtReal::Finite(1.0 / t) };
        Ok(Self {
            p: from_recip(x),
            q: from_recip(y),
            r,
            p_conj: conj(x),
            q_conj: conj(y),
            r_conj: conj(s),
        })
    }

    /// `(1/p', 1/q')`.
    pub fn split(&self) -> (f64, f64) {
        (self.p_conj.recip(), self.q_conj.recip())
    }
}

/// `ln C` computed from the conjugate reciprocals, which is exact at the
/// boundary where an exponent equals 1.
fn log_young_constant(e: &YoungExponents) -> f64 {
    let (x, y) = e.split();
    let s = e.r_conj.recip();
    log_c_from_recip(1.0 - x) + log_c_from_recip(1.0 - y) - log_c_from_recip(1.0 - s)
}

/// `C = c_p c_q / c_r`.
pub fn young_constant(e: &YoungExponents) -> f64 {
    log_young_constant(e).exp()
}

/// `C = 2^{2/r} r (r+1)^{-(r+1)/r}` for `p = q = 2r/(r+1)`.
pub fn equal_split_constant(r: f64) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(domain("equal_split_constant", r, "1 ≤ r < ∞"));
    }
    Ok(2f64.powf(2.0 / r) * r * (r + 1.0).powf(-(r + 1.0) / r))
}

fn check_powers(nx: f64, ny: f64) -> Result<()> {
    for v in [nx, ny] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain("entropy power", v, "N > 0"));
        }
    }
    Ok(())
}

/// `ln` of the bound divided by `r'`: `-ln C + x ln N_x + y ln N_y`.
fn log_objective(log_nx: f64, log_ny: f64, r: f64, x: f64) -> f64 {
    let s = (r - 1.0) / r;
    let y = s - x;
    let xlogx = |t: f64| if t > 0.0 { t * t.ln() } else { 0.0 };
    (xlogx(1.0 - x) - xlogx(x)) + (xlogx(1.0 - y) - xlogx(y)) + log_c_from_recip(1.0 / r)
        + x * log_nx
        + y * log_ny
}

/// Derivative of [`log_objective`] in `x`.
fn log_objective_slope(log_nx: f64, log_ny: f64, r: f64, x: f64) -> f64 {
    let s = (r - 1.0) / r;
    let y = s - x;
    (y * (1.0 - y)).ln() - (x * (1.0 - x)).ln() + log_nx - log_ny
}

/// Lower bound on `N_r(X+Y)` implied by Young's inequality:
/// `[C^{-1} N_x^{1/p'} N_y^{1/q'}]^{r'}`.
pub fn young_power_bound(nx: f64, ny: f64, e: &YoungExponents) -> Result<f64> {
    check_powers(nx, ny)?;
    let ExtReal::Finite(r_conj) = e.r_conj else {
        return Err(domain("young_power_bound", e.r, "r > 1"));
    };
    let (x, y) = e.split();
    Ok((r_conj * (-log_young_constant(e) + x * nx.ln() + y * ny.ln())).exp())
}

const EDGE: f64 = 1e-9;
const COARSE_POINTS: usize = 64;
const GOLDEN_ITERATIONS: usize = 200;

/// Maximizes [`young_power_bound`] over admissible splits `x = 1/p' ∈ (0, 1/r')`.
///
/// A coarse scan picks the best bracket, golden-section search refines it,
/// and a final bisection on the analytic derivative pins the stationary
/// point to rounding level.
pub fn optimize_exponents(nx: f64, ny: f64, r: f64) -> Result<(YoungExponents, f64)> {
    check_powers(nx, ny)?;
    if !(r > 1.0 && r.is_finite()) {
        return Err(domain("optimize_exponents", r, "1 < r < ∞"));
    }
    let (lnx, lny) = (nx.ln(), ny.ln());
    let s = (r - 1.0) / r;
    let lo = EDGE;
    let hi = s - EDGE;
    let obj = |x: f64| log_objective(lnx, lny, r, x);

    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let best = (0..COARSE_POINTS)
        .map(|i| lo + i as f64 * step)
        .map(|x| (x, obj(x)))
        .fold((lo, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let a = (best.0 - step).max(lo);
    let b = (best.0 + step).min(hi);
    let (mut x, mut fx) = golden_section_max(obj, a, b, GOLDEN_ITERATIONS);

    let slope = |t: f64| log_objective_slope(lnx, lny, r, t);
    if let Some(root) = bisect(slope, a, b, 0.0) {
        let froot = obj(root);
        if froot >= fx - 1e-15 * fx.abs().max(1.0) {
            x = root;
            fx = froot;
        }
    }
    let e = YoungExponents::from_split(r, x)?;
    Ok((e, (fx / s).exp()))
}

fn require_above_one(func: &'static str, r: f64) -> Result<()> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain(func, r, "1 < r < ∞"))
    }
}

/// `A_r = 4^{-1/(r-1)} (r+1)^{(r+1)/(r-1)} r^{-r/(r-1)}`.
pub fn a_r(r: f64) -> Result<f64> {
    require_above_one("A_r", r)?;
    let k = 1.0 / (r - 1.0);
    Ok((-k * 4f64.ln() + (r + 1.0) * k * (r + 1.0).ln() - r * k * r.ln()).exp())
}

/// `α(r) = ln 2 / ln A_r`.
pub fn alpha_of_r(r: f64) -> Result<f64> {
    Ok(std::f64::consts::LN_2 / a_r(r)?.ln())
}

/// Range `[min{1, (r-1) ln 2 / (2 ln((r+1)/2))}, (r+1)/2]` known to contain
/// the optimal exponent.
pub fn alpha_bracket(r: f64) -> Result<(f64, f64)> {
    require_above_one("alpha_bracket", r)?;
    let lower = ((r - 1.0) * std::f64::consts::LN_2 / (2.0 * ((r + 1.0) / 2.0).ln())).min(1.0);
    Ok((lower, (r + 1.0) / 2.0))
}
