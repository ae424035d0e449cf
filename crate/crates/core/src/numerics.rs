//! Quadrature, FFT convolution, finite differences, heat-semigroup
//! smoothing, and the one-dimensional searches used by the optimizers.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::density::{AnalyticDensity, GridDensity};
use crate::error::{Error, Result};

/// Composite Simpson rule over equispaced samples. With an even number of
/// samples the last panel is integrated with the trapezoid rule.
pub fn integrate(values: &[f64], dx: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 {
        return Err(Error::InvalidGrid(format!("Simpson needs 3 samples, got {n}")));
    }
    let odd_end = if n % 2 == 1 { n } else { n - 1 };
    let mut acc = values[0] + values[odd_end - 1];
    for (i, v) in values[1..odd_end - 1].iter().enumerate() {
        acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = acc * dx / 3.0;
    if odd_end < n {
        total += 0.5 * dx * (values[n - 2] + values[n - 1]);
    }
    Ok(total)
}

/// Double-exponential (tanh-sinh) quadrature of `f` on `[a, b]`.
///
/// Abscissae cluster at the ends, so integrable endpoint singularities are
/// handled. Non-finite integrand values (only possible within rounding of
/// an endpoint, where the weights underflow) are skipped.
pub fn integrate_fn(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if !(a < b) {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let t_max = 4.5;

    let point = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        let cosh_u = u.cosh();
        let w = half_pi * t.cosh() / (cosh_u * cosh_u);
        // distance from the nearer end, computed without cancellation
        let offset = half * 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let x = if t < 0.0 {
            a + offset
        } else if t > 0.0 {
            b - offset
        } else {
            center
        };
        let v = f(x);
        if v.is_finite() {
            v * w * half
        } else {
            0.0
        }
    };

    let mut step = 0.5;
    let mut total = point(0.0);
    let mut k = 1;
    while k as f64 * step <= t_max {
        total += point(k as f64 * step) + point(-(k as f64) * step);
        k += 1;
    }
    let mut estimate = total * step;
    for _ in 0..8 {
        // add the midpoints of the current level
        let mut fresh = 0.0;
        let mut k = 1;
        while (k as f64) * step * 0.5 <= t_max {
            let t = k as f64 * step * 0.5;
            fresh += point(t) + point(-t);
            k += 2;
        }
        total += fresh;
        step *= 0.5;
        let refined = total * step;
        let converged = (refined - estimate).abs() <= 1e-15 * refined.abs().max(1e-300);
        estimate = refined;
        if converged && step < 0.05 {
            break;
        }
    }
    estimate
}

fn same_spacing(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Linear convolution of two grid densities with a zero-padded FFT.
///
/// The result lives on `a.x0 + b.x0 + i·dx` with `len(a) + len(b) - 1`
/// samples; roundoff negatives are clipped and the mass is renormalized.
pub fn convolve(a: &GridDensity, b: &GridDensity) -> Result<GridDensity> {
    if !same_spacing(a.dx(), b.dx()) {
        return Err(Error::SpacingMismatch(a.dx(), b.dx()));
    }
    let dx = a.dx();
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let pad = |v: &[f64]| {
        let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(size, Complex::new(0.0, 0.0));
        buf
    };
    let mut fa = pad(a.values());
    let mut fb = pad(b.values());
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse.process(&mut fa);

    let scale = dx / size as f64;
    let values: Vec<f64> = fa[..out_len].iter().map(|c| (c.re * scale).max(0.0)).collect();
    let raw = GridDensity::normalized(a.x0() + b.x0(), dx, values.clone())
        .map_err(|e| Error::Numerical(format!("convolution output invalid: {e}")))?;
    let mass = values.iter().sum::<f64>() * dx
        - 0.5 * dx * (values[0] + values[out_len - 1]);
    if (mass - 1.0).abs() > 1e-4 {
        return Err(Error::Numerical(format!("convolution mass {mass} deviates from 1")));
    }
    Ok(raw)
}

/// Derivative of the grid samples: central differences inside, second-order
/// one-sided differences at both ends.
pub fn derivative(a: &GridDensity) -> Vec<f64> {
    let v = a.values();
    let n = v.len();
    let h = a.dx();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d
}

/// Density of `X + √t Z`: convolution with a centered Gaussian sampled on
/// the same spacing, over `±window_factor·√t` (at least 8 cells each side).
pub fn heat_evolve(a: &GridDensity, t: f64, window_factor: f64) -> Result<GridDensity> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(crate::error::domain("heat_evolve", t, "t > 0"));
    }
    let sigma = t.sqrt();
    let dx = a.dx();
    let half = ((window_factor * sigma / dx).ceil() as usize).max(8);
    let kernel = AnalyticDensity::gaussian(sigma)?;
    let values = (0..=2 * half)
        .map(|i| kernel.eval((i as f64 - half as f64) * dx))
        .collect();
    let k = GridDensity::normalized(-(half as f64) * dx, dx, values)?;
    convolve(a, &k)
}

/// Maximizes `f` on `[lo, hi]` by golden-section search; returns `(x, f(x))`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to width `tol`.
/// Returns `None` when the end values have the same sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
