use std::io::{Read, Write};

use serde::Serialize;

use super::AnalyticDensity;
use crate::error::{Error, Result};

/// Default tolerance on the trapezoidal mass of a [`GridDensity`].
pub const DEFAULT_MASS_TOL: f64 = 1e-6;

/// Minimum number of samples in a grid.
pub const MIN_SAMPLES: usize = 16;

/// Zero-valued nodes added on each side of a compact support.
const PAD: usize = 2;

/// Resolution parameters shared by every grid computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    /// Target number of samples across the widest window.
    pub n: usize,
    /// Half-width of Gaussian-like windows in standard deviations.
    pub window_factor: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 1 << 13,
            window_factor: 12.0,
        }
    }
}

impl GridConfig {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }
}

/// Density sampled at `x0 + i·dx`, `i = 0..len`.
///
/// The trapezoidal mass is within [`DEFAULT_MASS_TOL`] of one. Grids built
/// here end in zero samples whenever the support is compact, so the
/// trapezoidal mass equals the plain Riemann sum and is preserved exactly
/// by discrete convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
}

fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values {
        [] => 0.0,
        [v] => v * dx,
        [first, .., last] => (values.iter().sum::<f64>() - 0.5 * (first + last)) * dx,
    }
}

impl GridDensity {
    /// Validates samples that already form a probability density.
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        let g = Self::unchecked_mass(x0, dx, values)?;
        let mass = g.mass();
        if (mass - 1.0).abs() > DEFAULT_MASS_TOL {
            return Err(Error::InvalidGrid(format!("trapezoidal mass {mass} is not 1")));
        }
        Ok(g)
    }

    /// Validates samples and divides them by their trapezoidal mass.
    pub fn normalized(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        let mut g = Self::unchecked_mass(x0, dx, values)?;
        let mass = g.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidGrid(format!("cannot normalize mass {mass}")));
        }
        g.values.iter_mut().for_each(|v| *v /= mass);
        Ok(g)
    }

    fn unchecked_mass(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) || !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("bad origin/spacing x0={x0}, dx={dx}")));
        }
        if values.len() < MIN_SAMPLES {
            return Err(Error::InvalidGrid(format!(
                "{} samples, need at least {MIN_SAMPLES}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidGrid(format!("sample {v} is negative or not finite")));
        }
        Ok(Self { x0, dx, values })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Abscissa of sample `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.values, self.dx)
    }

    /// Trapezoidal `∫ g(f(x)) dx`.
    pub fn integral_of(&self, g: impl Fn(f64) -> f64) -> f64 {
        let mapped: Vec<f64> = self.values.iter().map(|&v| g(v)).collect();
        trapezoid(&mapped, self.dx)
    }

    /// Trapezoidal `∫ g(x, f(x)) dx`.
    pub fn integral_with_x(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let mapped: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| g(self.x(i), v))
            .collect();
        trapezoid(&mapped, self.dx)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.integral_with_x(|x, f| x * f)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.integral_with_x(|x, f| (x - m) * (x - m) * f)
    }

    /// Density of `factor·X`: abscissae scale by `factor`, values by `1/factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidGrid(format!("scale factor {factor} must be positive")));
        }
        Ok(Self {
            x0: self.x0 * factor,
            dx: self.dx * factor,
            values: self.values.iter().map(|v| v / factor).collect(),
        })
    }

    /// Keeps samples with abscissa in `[lo, hi]`. Returns the cropped grid
    /// (not renormalized) and the trapezoidal mass that was removed.
    pub fn cropped(&self, lo: f64, hi: f64) -> Result<(Self, f64)> {
        let first = ((lo - self.x0) / self.dx).ceil().max(0.0) as usize;
        let last = (((hi - self.x0) / self.dx).floor() as isize).min(self.len() as isize - 1);
        if last < first as isize + MIN_SAMPLES as isize - 1 {
            return Err(Error::InvalidGrid(format!("crop [{lo}, {hi}] leaves too few samples")));
        }
        let last = last as usize;
        if first == 0 && last == self.len() - 1 {
            return Ok((self.clone(), 0.0));
        }
        let kept = self.values[first..=last].to_vec();
        let removed = self.mass() - trapezoid(&kept, self.dx);
        Ok((
            Self {
                x0: self.x(first),
                dx: self.dx,
                values: kept,
            },
            removed.max(0.0),
        ))
    }

    /// Writes the grid as CSV with header `x,f`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "f"]).map_err(csv_err)?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([self.x(i).to_string(), v.to_string()])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a CSV grid with header `x,f`. Abscissae must be uniformly
    /// spaced; samples are renormalized to unit trapezoidal mass.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = r.headers().map_err(csv_err)?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "f" {
            return Err(Error::Parse(format!("expected header x,f, got {headers:?}")));
        }
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for row in r.records() {
            let row = row.map_err(csv_err)?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
            };
            xs.push(parse(&row[0])?);
            fs.push(parse(&row[1])?);
        }
        if xs.len() < MIN_SAMPLES {
            return Err(Error::InvalidGrid(format!("{} rows, need {MIN_SAMPLES}", xs.len())));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, x) in xs.iter().enumerate() {
            let want = xs[0] + i as f64 * dx;
            if (x - want).abs() > 1e-9 * dx.abs().max(want.abs()) {
                return Err(Error::InvalidGrid(format!("row {i}: x={x} is off the uniform grid")));
            }
        }
        Self::normalized(xs[0], dx, fs)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Sample value with the midpoint convention at jump discontinuities.
fn sample(d: &AnalyticDensity, jumps: &[f64], x: f64, dx: f64) -> f64 {
    let eps = 1e-9 * dx;
    if jumps.iter().any(|j| (x - j).abs() <= eps) {
        let h = 1e-6 * dx;
        0.5 * (d.eval(x - h) + d.eval(x + h))
    } else {
        d.eval(x)
    }
}

fn check_captured(d: &AnalyticDensity, lo: f64, hi: f64) -> Result<()> {
    let captured = d.integrate_over(lo, hi, |x| d.eval(x));
    if captured < 1.0 - DEFAULT_MASS_TOL {
        return Err(Error::Truncation {
            lo,
            hi,
            captured,
            tol: DEFAULT_MASS_TOL,
        });
    }
    Ok(())
}

/// Samples `d` at `n` equispaced nodes spanning `[x_lo, x_hi]` and
/// renormalizes to unit trapezoidal mass.
pub fn discretize(d: &AnalyticDensity, x_lo: f64, x_hi: f64, n: usize) -> Result<GridDensity> {
    if !(x_lo < x_hi) || !x_lo.is_finite() || !x_hi.is_finite() {
        return Err(Error::InvalidGrid(format!("bad window [{x_lo}, {x_hi}]")));
    }
    if n < MIN_SAMPLES {
        return Err(Error::InvalidGrid(format!("{n} samples, need at least {MIN_SAMPLES}")));
    }
    check_captured(d, x_lo, x_hi)?;
    let dx = (x_hi - x_lo) / (n - 1) as f64;
    let jumps = d.jump_points();
    let values = (0..n)
        .map(|i| sample(d, &jumps, x_lo + i as f64 * dx, dx))
        .collect();
    GridDensity::normalized(x_lo, dx, values)
}

/// Samples `d` on its default window with spacing `dx`.
///
/// Node placement follows the shape of the density: a density with jumps is
/// sampled at cell centers of a partition whose cell edges include the left
/// jump, a compact continuous density has its left support end on a node,
/// and a Gaussian-like density has its center on a node. Compact supports
/// get zero-valued padding on both sides.
pub fn discretize_step(d: &AnalyticDensity, dx: f64, window_factor: f64) -> Result<GridDensity> {
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::InvalidGrid(format!("spacing {dx} must be positive")));
    }
    let (lo, hi) = d.default_window(window_factor);
    check_captured(d, lo, hi)?;
    let (s_lo, s_hi) = d.support();
    let compact = s_lo.is_finite() && s_hi.is_finite();
    let jumps = d.jump_points();

    let (x0, count) = if !jumps.is_empty() {
        let cells = ((hi - lo) / dx - 1e-9).ceil().max(1.0) as usize;
        (lo + 0.5 * dx - PAD as f64 * dx, cells + 2 * PAD)
    } else if compact {
        let steps = ((hi - lo) / dx - 1e-9).ceil() as usize;
        (lo - PAD as f64 * dx, steps + 1 + 2 * PAD)
    } else {
        let center = 0.5 * (lo + hi);
        let half_steps = ((hi - center) / dx).ceil() as usize;
        (center - half_steps as f64 * dx, 2 * half_steps + 1)
    };
    // widen tiny grids symmetrically with zeros
    let extra = MIN_SAMPLES.saturating_sub(count).div_ceil(2);
    let x0 = x0 - extra as f64 * dx;
    let count = count + 2 * extra;

    let values = (0..count)
        .map(|i| {
            let x = x0 + i as f64 * dx;
            if jumps.is_empty() {
                d.eval(x)
            } else {
                sample(d, &jumps, x, dx)
            }
        })
        .collect();
    GridDensity::normalized(x0, dx, values)
}

/// Common spacing for grids of several densities that will be convolved.
///
/// The widest default window gets `config.n` samples. When a density has
/// jumps the spacing is shrunk so that its support width is a whole number
/// of cells.
pub fn common_step(densities: &[AnalyticDensity], config: &GridConfig) -> Result<f64> {
    if config.n < MIN_SAMPLES {
        return Err(Error::InvalidGrid(format!(
            "grid size {} below {MIN_SAMPLES}",
            config.n
        )));
    }
    let widest = densities
        .iter()
        .map(|d| {
            let (lo, hi) = d.default_window(config.window_factor);
            hi - lo
        })
        .fold(0.0, f64::max);
    if !(widest > 0.0) {
        return Err(Error::InvalidGrid("no densities given".into()));
    }
    let target = widest / (config.n - 1) as f64;
    let jump_width = densities.iter().find_map(|d| {
        let j = d.jump_points();
        (j.len() >= 2).then(|| j[j.len() - 1] - j[0])
    });
    Ok(match jump_width {
        Some(w) => w / (w / target).ceil(),
        None => target,
    })
}
