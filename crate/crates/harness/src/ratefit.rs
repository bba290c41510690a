//! Log-log rate fitting: extracts the empirical decay exponent from
//! (n, distance) points by ordinary least squares on (ln n, ln distance).

use serde::Serialize;
use thiserror::Error;

use cltlab_core::stats::least_squares;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("distances must be positive (point {n} has {distance})")]
    NonPositiveDistance { n: usize, distance: f64 },
    #[error("degenerate fit: all n equal")]
    DegenerateFit,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatePoint {
    pub n: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<RatePoint>,
}

pub fn fit_rate(points: &[(usize, f64)]) -> Result<RateFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    for &(n, distance) in points {
        if !distance.is_finite() || distance <= 0.0 {
            return Err(FitError::NonPositiveDistance { n, distance });
        }
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, d)| ((n as f64).ln(), d.ln()))
        .collect();
    let fit = least_squares(&logs).ok_or(FitError::DegenerateFit)?;
    Ok(RateFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points: points
            .iter()
            .map(|&(n, distance)| RatePoint { n, distance })
            .collect(),
    })
}
