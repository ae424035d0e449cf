//! Command-line density grammar: `name[:param[,param]][@scale,shift]`.
//!
//! Names: `gaussian:SIGMA`, `uniform:A,B`, `exppower:P`, `beta` (alias
//! `qgaussian`), `triangle`. The optional suffix applies `x ↦ scale·x + shift`.

use std::str::FromStr;

use super::{AnalyticDensity, Family};
use crate::error::{Error, Result};

fn numbers(text: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {t:?}")))
        })
        .collect()
}

fn arity(name: &str, params: &[f64], want: usize) -> Result<()> {
    if params.len() == want {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "{name} takes {want} parameter(s), got {}",
            params.len()
        )))
    }
}

impl FromStr for AnalyticDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, affine) = match s.split_once('@') {
            Some((b, a)) => (b, Some(a)),
            None => (s, None),
        };
        let (name, params) = match body.split_once(':') {
            Some((n, p)) => (n.trim(), numbers(p)?),
            None => (body.trim(), Vec::new()),
        };
        let family = match name.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => {
                let sigma = if params.is_empty() { 1.0 } else {
                    arity(name, &params, 1)?;
                    params[0]
                };
                Family::Gaussian { sigma }
            }
            "uniform" => {
                let (a, b) = if params.is_empty() { (0.0, 1.0) } else {
                    arity(name, &params, 2)?;
                    (params[0], params[1])
                };
                Family::Uniform { a, b }
            }
            "exppower" | "exp-power" => {
                arity(name, &params, 1)?;
                Family::ExpPower { p: params[0] }
            }
            "beta" | "qgaussian" | "q-gaussian" => {
                arity(name, &params, 0)?;
                Family::QGaussianBeta
            }
            "triangle" => {
                arity(name, &params, 0)?;
                Family::Triangle
            }
            other => return Err(Error::Parse(format!("unknown density {other:?}"))),
        };
        let d = AnalyticDensity::new(family)?;
        match affine {
            None => Ok(d),
            Some(text) => {
                let v = numbers(text)?;
                match v.as_slice() {
                    [scale] => d.affine(*scale, 0.0),
                    [scale, shift] => d.affine(*scale, *shift),
                    _ => Err(Error::Parse(format!("affine suffix needs scale[,shift], got {text:?}"))),
                }
            }
        }
    }
}
