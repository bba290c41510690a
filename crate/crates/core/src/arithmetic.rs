//! Distances to the integer lattice and the arithmetic structure of
//! coefficient vectors.
//!
//! The central object is the lattice condition on a unit vector `theta`:
//! for every `|xi| <= n`,
//!
//! ```text
//!     d(xi * theta, Z^n) >= (1/10) * min(|xi|, (n/R)/|xi|)
//! ```
//!
//! The minimal `R >= 1` for which this and the two power-sum conditions
//! `n |sum theta_j^3| <= R`, `n sum theta_j^4 <= R` hold is the arithmetic
//! functional of `theta`; [`minimal_certified_r`] brackets it.
//!
//! Certification is grid-plus-Lipschitz: `xi -> d(xi theta, Z^n)` is
//! 1-Lipschitz for unit `theta` and the right-hand side is (1/10)-Lipschitz,
//! so a margin of `1.1 * grid_step` at every grid point proves the condition
//! between grid points. The grid step is snapped down to a power of two so
//! grid points `i * step` are exact in floating point; integer abscissae
//! (where lattice hits happen) are then hit exactly.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::laws::DiscreteLaw;
use crate::quad::{self, QuadError, QuadOptions};
use crate::sum::NeumaierSum;

/// Floating-point slack when deciding that a grid margin is a genuine
/// violation rather than rounding noise.
const FP_GUARD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ArithmeticError {
    #[error("dimension {n} is not a positive multiple of 4")]
    BadDimension { n: usize },
    #[error("coordinates have squared norm {norm2}, expected 1 within 1e-12")]
    NotUnit { norm2: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Unit coefficient vector in R^n.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientVector {
    coords: Vec<f64>,
}

impl CoefficientVector {
    /// Wrap coordinates, enforcing the unit-norm invariant.
    pub fn new(coords: Vec<f64>) -> Result<Self, ArithmeticError> {
        if coords.is_empty() {
            return Err(ArithmeticError::BadDimension { n: 0 });
        }
        let mut s = NeumaierSum::new();
        for &c in &coords {
            s.add(c * c);
        }
        let norm2 = s.value();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(ArithmeticError::NotUnit { norm2 });
        }
        Ok(Self { coords })
    }

    /// Normalize arbitrary nonzero coordinates to unit length.
    pub fn from_unnormalized(coords: Vec<f64>) -> Result<Self, ArithmeticError> {
        let mut s = NeumaierSum::new();
        for &c in &coords {
            s.add(c * c);
        }
        let norm = s.value().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(ArithmeticError::NotUnit { norm2: norm * norm });
        }
        Self::new(coords.iter().map(|c| c / norm).collect())
    }

    /// The vector (1, 1, ..., 1)/sqrt(n).
    pub fn uniform(n: usize) -> Self {
        let c = 1.0 / (n as f64).sqrt();
        Self { coords: vec![c; n] }
    }

    /// Standard basis vector e_1 in R^n.
    pub fn basis(n: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[0] = 1.0;
        Self { coords }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn max_abs_coord(&self) -> f64 {
        self.coords.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Hex SHA-256 of the coordinate bytes (little endian), for
    /// reproducibility records.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for c in &self.coords {
            hasher.update(c.to_le_bytes());
        }
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The alternating vector (1, sqrt2, -1, -sqrt2, ...)/sqrt(3n/2), defined
/// for n divisible by four. Its cubic power sum vanishes identically and
/// its quartic power sum is 10/(9n).
pub fn theta_zero(n: usize) -> Result<CoefficientVector, ArithmeticError> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(ArithmeticError::BadDimension { n });
    }
    let scale = (1.5 * n as f64).sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    let pattern = [1.0, sqrt2, -1.0, -sqrt2];
    CoefficientVector::new((0..n).map(|j| pattern[j % 4] / scale).collect())
}

/// Euclidean distance from `x` to the nearest integer lattice point.
pub fn dist_to_lattice(x: &[f64]) -> f64 {
    let mut s = NeumaierSum::new();
    for &c in x {
        let e = c - c.round();
        s.add(e * e);
    }
    s.value().sqrt()
}

/// Minimal `R` values making the cubic and quartic power-sum conditions
/// hold: `(n |sum theta^3|, n sum theta^4)`.
pub fn power_sum_conditions(theta: &CoefficientVector) -> (f64, f64) {
    let n = theta.n() as f64;
    let mut cubic = NeumaierSum::new();
    let mut quartic = NeumaierSum::new();
    for &c in theta.coords() {
        let c3 = c * c * c;
        cubic.add(c3);
        quartic.add(c3 * c);
    }
    (n * cubic.value().abs(), n * quartic.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertOutcome {
    /// Condition proven for all |xi| <= n (grid margins plus Lipschitz
    /// covering, small |xi| handled analytically).
    Certified,
    /// A grid point with a genuine violation was found.
    Refuted,
    /// The worst margin is neither large enough to certify nor negative
    /// enough to refute at this grid step.
    Inconclusive,
}

/// Outcome of one lattice-condition verification.
#[derive(Clone, Debug, Serialize)]
pub struct ArithmeticCertificate {
    pub outcome: CertOutcome,
    pub r: f64,
    /// Effective grid step (power of two, <= the requested step).
    pub grid_step: f64,
    /// Worst value of d(xi theta, Z^n) - RHS(xi) over the grid.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample_xi: Option<f64>,
    pub n: usize,
    pub theta_digest: String,
}

impl ArithmeticCertificate {
    pub fn is_certified(&self) -> bool {
        self.outcome == CertOutcome::Certified
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[inline]
fn condition_rhs(xi: f64, n_over_r: f64) -> f64 {
    0.1 * xi.min(n_over_r / xi)
}

#[inline]
fn margin_at(coords: &[f64], n_over_r: f64, xi: f64) -> f64 {
    let mut acc = 0.0;
    for &t in coords {
        let v = xi * t;
        let e = v - v.round();
        acc += e * e;
    }
    acc.sqrt() - condition_rhs(xi, n_over_r)
}

/// Largest power of two not exceeding `step`.
fn snap_step(step: f64) -> f64 {
    2.0f64.powi(step.log2().floor() as i32)
}

/// Verify the lattice condition for `theta` at level `r`.
///
/// For `|xi| <= 1/(2 max_j |theta_j|)` every coordinate of `xi theta` is
/// within [-1/2, 1/2], so `d(xi theta, Z^n) = |xi| >= RHS` holds
/// analytically. The grid covers the rest of `[0, n]`; negative `xi` follow
/// by symmetry of the lattice. A returned counterexample is the grid point
/// of worst margin (lowest `xi` on ties).
pub fn certify_lattice_condition(
    theta: &CoefficientVector,
    r: f64,
    grid_step: f64,
) -> Result<ArithmeticCertificate, ArithmeticError> {
    if !r.is_finite() || r < 1.0 {
        return Err(ArithmeticError::PreconditionViolated(format!(
            "condition level R = {r} must be >= 1"
        )));
    }
    if !(grid_step > 0.0 && grid_step <= 1e-2) {
        return Err(ArithmeticError::PreconditionViolated(format!(
            "grid step {grid_step} outside (0, 1e-2]"
        )));
    }
    let n = theta.n();
    let h = snap_step(grid_step);
    let n_over_r = n as f64 / r;

    let xi_analytic = 1.0 / (2.0 * theta.max_abs_coord());
    let i0 = ((xi_analytic / h).floor() as u64).max(1);
    let i1 = ((n as f64) / h).ceil() as u64;

    let certificate = |outcome, margin, counterexample_xi| ArithmeticCertificate {
        outcome,
        r,
        grid_step: h,
        margin,
        counterexample_xi,
        n,
        theta_digest: theta.digest(),
    };

    if i0 >= i1 {
        // the analytic regime already covers [0, n]
        return Ok(certificate(CertOutcome::Certified, f64::INFINITY, None));
    }

    // chunked sweep; the fold (min margin, lowest xi on ties) is
    // partition-independent
    const CHUNK: u64 = 1 << 16;
    let starts: Vec<u64> = (i0..=i1).step_by(CHUNK as usize).collect();
    let coords = theta.coords();
    let (worst, worst_xi) = starts
        .par_iter()
        .map(|&s| {
            let mut best = f64::INFINITY;
            let mut best_xi = f64::NAN;
            let end = (s + CHUNK).min(i1 + 1);
            for i in s..end {
                let xi = i as f64 * h;
                let m = margin_at(coords, n_over_r, xi);
                if m < best {
                    best = m;
                    best_xi = xi;
                }
            }
            (best, best_xi)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::INFINITY, f64::NAN), |acc, item| {
            if item.0 < acc.0 {
                item
            } else {
                acc
            }
        });

    if worst >= 1.1 * h {
        Ok(certificate(CertOutcome::Certified, worst, None))
    } else if worst < -FP_GUARD {
        Ok(certificate(CertOutcome::Refuted, worst, Some(worst_xi)))
    } else {
        Ok(certificate(CertOutcome::Inconclusive, worst, None))
    }
}

/// Bracket of the arithmetic functional found by bisection.
#[derive(Clone, Debug, Serialize)]
pub struct RBracket {
    /// Smallest certified level (multiplicative tolerance `r_tol`);
    /// infinity when no level up to n^2 certifies.
    pub r_upper: f64,
    /// Largest refuted level seen (0 when none was refuted).
    pub r_lower: f64,
}

/// Bisection for the minimal certified condition level.
///
/// The two power-sum conditions fix the floor `max(r_cubic, r_quartic, 1)`;
/// the lattice condition is monotone in `R` (larger `R` weakens it), so a
/// log-scale bisection on `[floor, n^2]` brackets the minimal certifiable
/// level to within the multiplicative tolerance.
pub fn minimal_certified_r(
    theta: &CoefficientVector,
    grid_step: f64,
    r_tol: f64,
) -> Result<RBracket, ArithmeticError> {
    if !r_tol.is_finite() || r_tol < 1e-3 {
        return Err(ArithmeticError::PreconditionViolated(format!(
            "R tolerance {r_tol} must be >= 1e-3"
        )));
    }
    let n = theta.n() as f64;
    let (r_cubic, r_quartic) = power_sum_conditions(theta);
    let floor = r_cubic.max(r_quartic).max(1.0);
    let ceiling = (n * n).max(floor);

    let mut r_lower = 0.0f64;
    let mut check = |r: f64| -> Result<bool, ArithmeticError> {
        let cert = certify_lattice_condition(theta, r, grid_step)?;
        if cert.outcome == CertOutcome::Refuted {
            r_lower = r_lower.max(r);
        }
        Ok(cert.is_certified())
    };

    if check(floor)? {
        return Ok(RBracket {
            r_upper: floor,
            r_lower,
        });
    }
    if !check(ceiling)? {
        return Ok(RBracket {
            r_upper: f64::INFINITY,
            r_lower,
        });
    }

    let mut lo = floor;
    let mut hi = ceiling;
    while hi / lo > 1.0 + r_tol {
        let mid = (lo * hi).sqrt();
        if check(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RBracket {
        r_upper: hi,
        r_lower,
    })
}

fn require_symmetric(law: &DiscreteLaw) -> Result<(), ArithmeticError> {
    let atoms = law.atoms();
    let k = atoms.len();
    for i in 0..k.div_ceil(2) {
        let a = atoms[i];
        let b = atoms[k - 1 - i];
        if (a.value + b.value).abs() > 1e-9 || (a.weight - b.weight).abs() > 1e-9 {
            return Err(ArithmeticError::PreconditionViolated(
                "law is not symmetric about 0".into(),
            ));
        }
    }
    Ok(())
}

/// Root-mean-square lattice distance of `(xi Y / 2 pi) theta` over the
/// symmetric law of `Y`. Even and subadditive in `xi`.
pub fn rms_lattice_distance(
    theta: &CoefficientVector,
    law_y: &DiscreteLaw,
    xi: f64,
) -> Result<f64, ArithmeticError> {
    require_symmetric(law_y)?;
    Ok(rms_lattice_distance_unchecked(theta, law_y, xi))
}

fn rms_lattice_distance_unchecked(theta: &CoefficientVector, law_y: &DiscreteLaw, xi: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut acc = NeumaierSum::new();
    for atom in law_y.atoms() {
        if atom.value == 0.0 {
            continue;
        }
        let scale = xi * atom.value / two_pi;
        let mut d2 = 0.0;
        for &t in theta.coords() {
            let v = scale * t;
            let e = v - v.round();
            d2 += e * e;
        }
        acc.add(atom.weight * d2);
    }
    acc.value().sqrt()
}

/// `int_{T^(1/6)}^{T} exp(-4 S(xi)^2) dxi / xi` where `S` is
/// [`rms_lattice_distance`], by adaptive quadrature to 1e-10 absolute.
pub fn tail_integral(
    theta: &CoefficientVector,
    law_y: &DiscreteLaw,
    t: f64,
) -> Result<f64, ArithmeticError> {
    if !t.is_finite() || t < 1.0 {
        return Err(ArithmeticError::PreconditionViolated(format!(
            "upper limit T = {t} must be >= 1"
        )));
    }
    require_symmetric(law_y)?;
    // S^2 has derivative kinks where a coordinate crosses a half-integer;
    // cap panels at a quarter of the finest kink spacing
    let fastest = law_y.max_abs_value() * theta.max_abs_coord() / (2.0 * std::f64::consts::PI);
    let max_width = if fastest > 0.0 {
        Some(0.25 / fastest)
    } else {
        None
    };
    let opts = QuadOptions {
        abs_tol: 1e-10,
        max_panels: 1_000_000,
        max_width,
    };
    let result = quad::integrate(
        |xi| {
            let s = rms_lattice_distance_unchecked(theta, law_y, xi);
            (-4.0 * s * s).exp() / xi
        },
        t.powf(1.0 / 6.0),
        t,
        opts,
    )?;
    Ok(result.value)
}

/// Largest constant `c` such that
/// `d^2(xi, Z) + d^2(xi sqrt2, Z) >= min(3 xi^2, c / xi^2)` holds at every
/// grid point of `[1/2, xi_max]`. Below `1/(2 sqrt2)` both distances are
/// exactly linear and the first branch holds with equality, so only the
/// grid range constrains `c`.
pub fn sqrt2_diophantine_check(xi_max: f64, grid_step: f64) -> Result<f64, ArithmeticError> {
    if !xi_max.is_finite() || xi_max < 1.0 {
        return Err(ArithmeticError::PreconditionViolated(format!(
            "xi_max = {xi_max} must be >= 1"
        )));
    }
    if !(grid_step > 0.0 && grid_step <= 1e-3) {
        return Err(ArithmeticError::PreconditionViolated(format!(
            "grid step {grid_step} outside (0, 1e-3]"
        )));
    }
    let h = snap_step(grid_step);
    let sqrt2 = std::f64::consts::SQRT_2;
    let i0 = (0.5 / h) as u64; // both powers of two: exact
    let i1 = (xi_max / h).ceil() as u64;

    const CHUNK: u64 = 1 << 16;
    let starts: Vec<u64> = (i0..=i1).step_by(CHUNK as usize).collect();
    let best = starts
        .par_iter()
        .map(|&s| {
            let mut min_c = f64::INFINITY;
            let end = (s + CHUNK).min(i1 + 1);
            for i in s..end {
                let xi = i as f64 * h;
                let d1 = xi - xi.round();
                let v = xi * sqrt2;
                let d2 = v - v.round();
                let sum = d1 * d1 + d2 * d2;
                if sum < 3.0 * xi * xi {
                    let c = xi * xi * sum;
                    if c < min_c {
                        min_c = c;
                    }
                }
            }
            min_c
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}
