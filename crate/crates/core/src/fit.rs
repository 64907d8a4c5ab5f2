//! Least-squares line fits on log-log data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// root-mean-square residual of the fit
    pub residual: f64,
}

/// Fits `y = slope·x + intercept` by ordinary least squares.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Numerical(format!("cannot fit a line to {} points", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Numerical("degenerate abscissae in line fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// Fits `log y = slope·log x + intercept`; all inputs must be positive.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Numerical("log-log fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let xs = [0.25, 0.125, 0.0625, 0.03125];
        let f = loglog_fit(&xs, &xs).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && f.residual < 1e-12);
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 0.5 * x.powf(1.3)).collect();
        let f = loglog_fit(&xs, &ys).unwrap();
        assert!((f.slope - 1.3).abs() < 1e-12);
        assert!((f.intercept - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(loglog_fit(&[1.0], &[1.0]).is_err());
        assert!(loglog_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }
}
