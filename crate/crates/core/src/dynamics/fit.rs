use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Least-squares slope of `ln y` against `t` over the last `tail_fraction`
/// of the samples.
pub fn decay_rate_fit(series: &[(f64, f64)], tail_fraction: f64) -> Result<RateFit> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    let take = ((series.len() as f64) * tail_fraction).ceil() as usize;
    if take < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 tail samples, got {take}")));
    }
    let tail = &series[series.len() - take..];
    if let Some(&(t, value)) = tail.iter().find(|&&(_, y)| !(y > 0.0)) {
        return Err(Error::NonPositiveNorm { t, value });
    }
    let n = tail.len() as f64;
    let (tm, lm) = tail.iter().fold((0.0, 0.0), |(a, b), &(t, y)| (a + t / n, b + y.ln() / n));
    let sxx: f64 = tail.iter().map(|&(t, _)| (t - tm).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|&(t, y)| (t - tm) * (y.ln() - lm)).sum();
    let rate = sxy / sxx;
    let sse: f64 = tail.iter().map(|&(t, y)| (y.ln() - lm - rate * (t - tm)).powi(2)).sum();
    Ok(RateFit { rate, stderr: (sse / (n - 2.0) / sxx).sqrt(), samples: tail.len() })
}
