//! Ordinary least squares on a straight line, with standard errors.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub n: usize,
}

impl LinearFit {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Fits `y ≈ intercept + slope·x`. Needs at least two distinct `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return Err(LabError::InvalidArgument(format!("line fit needs >= 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..n {
        let dx = x[i] - mx;
        sxx += dx * dx;
        sxy += dx * (y[i] - my);
    }
    if sxx <= 0.0 {
        return Err(LabError::VanishingDenominator("spread of abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (slope_se, intercept_se) = if n > 2 {
        let ssr: f64 = (0..n).map(|i| (y[i] - intercept - slope * x[i]).powi(2)).sum();
        let sigma2 = ssr / (nf - 2.0);
        let slope_se = (sigma2 / sxx).sqrt();
        (slope_se, (sigma2 * (1.0 / nf + mx * mx / sxx)).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
        intercept_se,
        n,
    })
}
