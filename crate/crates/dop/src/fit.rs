//! Least-squares rates on `(log N, log err)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual in log space.
    pub residual: f64,
    pub used: usize,
    /// Points dropped because the error was not positive and finite.
    pub excluded: usize,
}

/// Fits `log err = intercept + slope·log N`; `None` with fewer than three usable points.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let good: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, e)| *n > 0.0 && *e > 0.0 && e.is_finite())
        .map(|(n, e)| (n.ln(), e.ln()))
        .collect();
    let excluded = points.len() - good.len();
    if good.len() < 3 {
        return None;
    }
    let k = good.len() as f64;
    let mx = good.iter().map(|p| p.0).sum::<f64>() / k;
    let my = good.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = good.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = good.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = good.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Some(SlopeFit {
        slope,
        intercept,
        residual: (rss / k).sqrt(),
        used: good.len(),
        excluded,
    })
}
