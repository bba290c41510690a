//! Uniform directions on the unit sphere: sampling, the single-coordinate
//! marginal density and its Bessel-type transform, an inequality check of
//! Carlen–Lieb–Loss type, and empirical tail curves of the cubic and
//! quartic direction statistics.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::{ArithmeticError, CoefficientVector};
use crate::laws::{self, DiscreteLaw, LawError, MomentProfile};
use crate::quad::{self, QuadError, QuadOptions};
use crate::rng::CounterRng;
use crate::stats::{least_squares, LinearFit};
use crate::sum::NeumaierSum;

use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Error)]
pub enum SphereError {
    #[error("dimension n = {n} too small, need {min}")]
    Dimension { n: usize, min: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// The cubic and quartic statistics of one direction against per-coordinate
/// moment profiles.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DirectionStats {
    /// `sum_j gamma_j^3 theta_j^3` (signed).
    pub skew_term: f64,
    /// `sum_j delta_j^4 theta_j^4`; dominates `skew_term^2` by
    /// Cauchy–Schwarz.
    pub quartic_term: f64,
    pub n: usize,
    /// `sum_j delta_j^4 / n`.
    pub delta4_mean: f64,
}

fn profile_at(profiles: &[MomentProfile], j: usize) -> &MomentProfile {
    if profiles.len() == 1 {
        &profiles[0]
    } else {
        &profiles[j]
    }
}

/// Evaluate both direction statistics.
pub fn direction_stats(
    profiles: &[MomentProfile],
    theta: &CoefficientVector,
) -> Result<DirectionStats, SphereError> {
    let n = theta.n();
    if profiles.len() != 1 && profiles.len() != n {
        return Err(SphereError::PreconditionViolated(format!(
            "profiles list has length {}, expected 1 or {n}",
            profiles.len()
        )));
    }
    let mut skew = NeumaierSum::new();
    let mut quartic = NeumaierSum::new();
    let mut d4 = NeumaierSum::new();
    for (j, &t) in theta.coords().iter().enumerate() {
        let p = profile_at(profiles, j);
        let t3 = t * t * t;
        skew.add(p.gamma3 * t3);
        quartic.add(p.delta4 * t3 * t);
        d4.add(p.delta4 / n as f64);
    }
    Ok(DirectionStats {
        skew_term: skew.value(),
        quartic_term: quartic.value(),
        n,
        delta4_mean: d4.value(),
    })
}

fn draw_direction(n: usize, rng: &mut CounterRng) -> CoefficientVector {
    loop {
        let coords: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mut s = NeumaierSum::new();
        for &c in &coords {
            s.add(c * c);
        }
        let norm = s.value().sqrt();
        if norm > 0.0 {
            return CoefficientVector::from_unnormalized(coords)
                .expect("nonzero gaussian vector normalizes");
        }
    }
}

/// Uniform direction on S^{n-1}: n i.i.d. normals, normalized.
/// Deterministic in `seed`.
pub fn sample_direction(n: usize, seed: u64) -> CoefficientVector {
    sample_direction_stream(n, seed, 0)
}

/// Stream variant for collections of independent directions.
pub fn sample_direction_stream(n: usize, seed: u64, stream: u64) -> CoefficientVector {
    let mut rng = CounterRng::from_seed_stream(seed, stream);
    draw_direction(n, &mut rng)
}

/// Normalizer `c_n = int_{-1}^{1} (1 - t^2)^{(n-3)/2} dt`, by the exact
/// half-integer Beta recurrence `c_n = c_{n-2} (n-3)/(n-2)`.
fn marginal_normalizer(n: usize) -> f64 {
    assert!(n >= 2);
    let (mut value, mut k) = if n.is_multiple_of(2) {
        (PI, 2)
    } else {
        (2.0, 3)
    };
    while k < n {
        k += 2;
        value *= (k - 3) as f64 / (k - 2) as f64;
    }
    value
}

/// Density of a single coordinate of a uniform point on S^{n-1}:
/// proportional to `(1 - t^2)^((n-3)/2)` on [-1, 1].
pub fn marginal_density(n: usize, t: f64) -> Result<f64, SphereError> {
    if n < 2 {
        return Err(SphereError::Dimension { n, min: 2 });
    }
    if t.abs() >= 1.0 {
        return Ok(0.0);
    }
    let exponent = (n as f64 - 3.0) / 2.0;
    Ok((1.0 - t * t).powf(exponent) / marginal_normalizer(n))
}

/// Integrate `g` against the marginal density via the substitution
/// `t = sin u`, which removes the endpoint singularity:
/// `int g(t) f_n(t) dt = (1/c_n) int g(sin u) cos(u)^{n-2} du`.
fn marginal_integral<G: Fn(f64) -> f64>(
    n: usize,
    g: G,
    abs_tol: f64,
    max_width: Option<f64>,
) -> Result<f64, SphereError> {
    if n == 0 {
        return Err(SphereError::Dimension { n, min: 1 });
    }
    if n == 1 {
        // S^0 = {-1, +1} with equal mass
        return Ok(0.5 * (g(-1.0) + g(1.0)));
    }
    let c_n = marginal_normalizer(n);
    let power = n as i32 - 2;
    let opts = QuadOptions {
        abs_tol,
        max_panels: 1_000_000,
        max_width,
    };
    let r = quad::integrate(
        |u| g(u.sin()) * u.cos().powi(power),
        -FRAC_PI_2,
        FRAC_PI_2,
        opts,
    )?;
    Ok(r.value / c_n)
}

/// The transform `J_n(xi) = E cos(xi Theta_1)` of a single coordinate of a
/// uniform direction; even, real, `|J_n| <= 1`.
pub fn bessel_transform(n: usize, xi: f64) -> Result<f64, SphereError> {
    // phase xi sin(u) has derivative at most |xi|: cap panels at a quarter
    // period of the fastest oscillation
    let width = if xi.abs() > 1.0 {
        Some(FRAC_PI_2 / xi.abs())
    } else {
        None
    };
    marginal_integral(n, |t| (xi * t).cos(), 1e-12, width)
}

/// Largest `c` such that `J_n(xi) <= 1 - c min(xi^2/n, 1)` at every grid
/// point; positive for any grid avoiding 0.
pub fn bessel_decay_fit(n: usize, xi_grid: &[f64]) -> Result<f64, SphereError> {
    if xi_grid.is_empty() {
        return Err(SphereError::PreconditionViolated("empty grid".into()));
    }
    let mut best = f64::INFINITY;
    for &xi in xi_grid {
        if xi == 0.0 {
            return Err(SphereError::PreconditionViolated(
                "grid must exclude 0".into(),
            ));
        }
        let j = bessel_transform(n, xi)?;
        let denom = (xi * xi / n as f64).min(1.0);
        best = best.min((1.0 - j) / denom);
    }
    Ok(best)
}

/// Largest `c` such that `E |phi(tau Theta_1)|^2 <= 1 - c min(tau^2/n,
/// delta^-4)` over the grid, for a standardized law with fourth moment
/// `delta^4`. The squared modulus is the characteristic function of the
/// symmetrized law, which keeps the integrand real.
pub fn squared_cf_decay_fit(
    law: &DiscreteLaw,
    n: usize,
    tau_grid: &[f64],
) -> Result<f64, SphereError> {
    if tau_grid.is_empty() {
        return Err(SphereError::PreconditionViolated("empty grid".into()));
    }
    let profile = laws::moments(law)?;
    let sym = laws::symmetrize(law);
    let scale = sym.max_abs_value();
    let mut best = f64::INFINITY;
    for &tau in tau_grid {
        if tau == 0.0 {
            return Err(SphereError::PreconditionViolated(
                "grid must exclude 0".into(),
            ));
        }
        let freq = tau.abs() * scale;
        let width = if freq > 1.0 {
            Some(FRAC_PI_2 / freq)
        } else {
            None
        };
        let second_moment =
            marginal_integral(n, |t| laws::charfun(&sym, tau * t).re, 1e-12, width)?;
        let denom = (tau * tau / n as f64).min(1.0 / profile.delta4);
        best = best.min((1.0 - second_moment) / denom);
    }
    Ok(best)
}

/// Monte-Carlo versus quadrature comparison of
/// `E prod_j f_j(Theta_j) <= prod_j (E f_j(Theta_j)^2)^(1/2)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CllResult {
    /// Monte Carlo estimate of the expectation of the product.
    pub lhs: f64,
    /// Product of per-coordinate second-moment square roots (quadrature).
    pub rhs: f64,
    /// Standard error of the Monte Carlo estimate.
    pub radius: f64,
}

pub fn cll_check(
    fs: &[Box<dyn Fn(f64) -> f64 + Sync>],
    n: usize,
    m: u64,
    seed: u64,
) -> Result<CllResult, SphereError> {
    if fs.len() != n {
        return Err(SphereError::PreconditionViolated(format!(
            "{} functions for dimension {n}",
            fs.len()
        )));
    }
    if m < 10_000 {
        return Err(SphereError::PreconditionViolated(format!(
            "m = {m} must be >= 10^4"
        )));
    }

    let products: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let theta = sample_direction_stream(n, seed, i);
            let mut p = 1.0;
            for (f, &t) in fs.iter().zip(theta.coords()) {
                p *= f(t);
            }
            p
        })
        .collect();

    let mut mean_acc = NeumaierSum::new();
    for &p in &products {
        mean_acc.add(p);
    }
    let lhs = mean_acc.value() / m as f64;
    let mut var_acc = NeumaierSum::new();
    for &p in &products {
        let d = p - lhs;
        var_acc.add(d * d);
    }
    let radius = (var_acc.value() / (m as f64 - 1.0)).sqrt() / (m as f64).sqrt();

    let mut rhs = 1.0;
    for f in fs {
        let second = marginal_integral(n, |t| f(t) * f(t), 1e-12, None)?;
        rhs *= second.max(0.0).sqrt();
    }
    Ok(CllResult { lhs, rhs, radius })
}

/// Empirical survival functions of the normalized direction statistics
/// `n |skew| / delta4_mean` and `n quartic / delta4_mean`, tabulated on a
/// fixed grid, with least-squares fits of `-ln(survival)` against `t^(2/3)`
/// (skew) and `t^(1/2)` (quartic).
#[derive(Clone, Debug, Serialize)]
pub struct TailCurves {
    pub t: Vec<f64>,
    pub survival_skew: Vec<f64>,
    pub survival_quartic: Vec<f64>,
    /// Absent when the skew statistic is degenerate (symmetric laws) or too
    /// few grid points qualify.
    pub skew_fit: Option<LinearFit>,
    pub quartic_fit: Option<LinearFit>,
    pub samples: u64,
}

/// Lower end of the fit window in `t`; the inequalities being probed hold
/// "for large t", so small-t rows are excluded from the fits.
pub const TAIL_FIT_T_MIN: f64 = 5.0;

pub fn default_t_grid() -> Vec<f64> {
    (1..=400).map(|i| 0.25 * i as f64).collect()
}

fn survival(sorted: &[f64], t: f64) -> f64 {
    let idx = sorted.partition_point(|&x| x < t);
    (sorted.len() - idx) as f64 / sorted.len() as f64
}

fn tail_fit(
    t_grid: &[f64],
    surv: &[f64],
    transform: impl Fn(f64) -> f64,
    min_survival: f64,
) -> Option<LinearFit> {
    let pts: Vec<(f64, f64)> = t_grid
        .iter()
        .zip(surv)
        .filter(|(&t, &s)| t >= TAIL_FIT_T_MIN && s >= min_survival && s < 1.0)
        .map(|(&t, &s)| (transform(t), -s.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    least_squares(&pts)
}

pub fn deviation_tail_curves(
    profiles: &[MomentProfile],
    n: usize,
    samples: u64,
    seed: u64,
    t_grid: &[f64],
) -> Result<TailCurves, SphereError> {
    if samples < 10_000 {
        return Err(SphereError::PreconditionViolated(format!(
            "samples = {samples} must be >= 10^4"
        )));
    }
    if t_grid.is_empty() {
        return Err(SphereError::PreconditionViolated("empty t grid".into()));
    }
    // validate broadcast length once up front
    direction_stats(profiles, &CoefficientVector::basis(n))?;

    let stats: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let theta = sample_direction_stream(n, seed, i);
            let s = direction_stats(profiles, &theta).expect("validated profiles");
            let scale = n as f64 / s.delta4_mean;
            (scale * s.skew_term.abs(), scale * s.quartic_term)
        })
        .collect();

    let mut skew: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let mut quartic: Vec<f64> = stats.iter().map(|s| s.1).collect();
    skew.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    quartic.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    let survival_skew: Vec<f64> = t_grid.iter().map(|&t| survival(&skew, t)).collect();
    let survival_quartic: Vec<f64> = t_grid.iter().map(|&t| survival(&quartic, t)).collect();

    let min_survival = 10.0 / samples as f64;
    let skew_fit = tail_fit(t_grid, &survival_skew, |t| t.powf(2.0 / 3.0), min_survival);
    let quartic_fit = tail_fit(t_grid, &survival_quartic, f64::sqrt, min_survival);

    Ok(TailCurves {
        t: t_grid.to_vec(),
        survival_skew,
        survival_quartic,
        skew_fit,
        quartic_fit,
        samples,
    })
}
