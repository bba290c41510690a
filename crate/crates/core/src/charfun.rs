//! Products of characteristic functions, the smoothing (Esseen) upper bound
//! on the Kolmogorov distance, and regime diagnostics for the decomposition
//! of the characteristic-function integral.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::CoefficientVector;
use crate::laws::{self, DiscreteLaw, LawError, MomentProfile};
use crate::quad::{self, QuadError, QuadOptions};
use crate::sum::NeumaierSum;

#[derive(Debug, Error)]
pub enum CharfunError {
    #[error("laws list has length {got}, expected 1 (broadcast) or n = {n}")]
    LawCount { got: usize, n: usize },
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Leading constant of the smoothing remainder: `24 sup |Phi'| / pi`.
fn remainder_constant() -> f64 {
    24.0 / (std::f64::consts::PI * (2.0 * std::f64::consts::PI).sqrt())
}

fn law_at(laws: &[DiscreteLaw], j: usize) -> &DiscreteLaw {
    if laws.len() == 1 {
        &laws[0]
    } else {
        &laws[j]
    }
}

fn check_law_count(theta: &CoefficientVector, laws: &[DiscreteLaw]) -> Result<(), CharfunError> {
    if laws.len() != 1 && laws.len() != theta.n() {
        return Err(CharfunError::LawCount {
            got: laws.len(),
            n: theta.n(),
        });
    }
    Ok(())
}

/// `prod_j charfun(law_j, theta_j * xi)`; a single law broadcasts to all
/// coordinates (the i.i.d. case).
pub fn product_charfun(
    theta: &CoefficientVector,
    laws: &[DiscreteLaw],
    xi: f64,
) -> Result<Complex64, CharfunError> {
    check_law_count(theta, laws)?;
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, &t) in theta.coords().iter().enumerate() {
        acc *= laws::charfun(law_at(laws, j), t * xi);
    }
    Ok(acc)
}

/// Moment profiles per coordinate (broadcast resolves to one shared profile).
fn profiles(
    theta: &CoefficientVector,
    laws: &[DiscreteLaw],
) -> Result<Vec<MomentProfile>, CharfunError> {
    check_law_count(theta, laws)?;
    if laws.len() == 1 {
        let p = laws::moments(&laws[0])?;
        Ok(vec![p; theta.n()])
    } else {
        laws.iter()
            .map(|l| laws::moments(l).map_err(CharfunError::from))
            .collect()
    }
}

/// Diagnostics of the three-regime decomposition of
/// `int |phi_theta - exp(-xi^2/2)| dxi/|xi|`.
#[derive(Clone, Debug, Serialize)]
pub struct RegimeReport {
    /// `(sum_j theta_j^4 delta_j^4)^(1/4)`.
    pub epsilon: f64,
    /// `|sum_j gamma_j^3 theta_j^3|`; always at most epsilon^2.
    pub r1: f64,
    /// Smallest threshold at which the coordinates with
    /// `|theta_j| gamma_bar_j^3 <= threshold` carry squared mass >= 1/8.
    pub r2_min: f64,
    /// Reference scale `200 delta^2 / sqrt(n)`.
    pub r2_reference: f64,
    /// Integrals over the central, middle and tail segments.
    pub segment_integrals: [f64; 3],
}

/// Upper bound on the mass removed by the near-zero cutoff:
/// the integrand is O(xi^2) there because means and variances match.
/// For |xi| <= cutoff (<= 1e-3):
/// |phi_theta - exp(-xi^2/2)| <= (r1/6)|xi|^3 + ((eps^4 + 9)/24) xi^4,
/// where the 9/24 generously covers the Gaussian Taylor remainder and the
/// quadratic cross terms of the product expansion.
fn small_xi_mass_bound(r1: f64, epsilon: f64, cutoff: f64) -> f64 {
    let c3 = cutoff.powi(3);
    (r1 / 9.0) * c3 + ((epsilon.powi(4) + 9.0) / 48.0) * c3 * cutoff
}

fn gap_integrand<'a>(
    theta: &'a CoefficientVector,
    laws: &'a [DiscreteLaw],
) -> impl Fn(f64) -> f64 + 'a {
    move |xi: f64| {
        let mut acc = Complex64::new(1.0, 0.0);
        for (j, &t) in theta.coords().iter().enumerate() {
            acc *= laws::charfun(law_at(laws, j), t * xi);
        }
        let gauss = (-0.5 * xi * xi).exp();
        (acc - gauss).norm() / xi.abs()
    }
}

fn oscillation_width(theta: &CoefficientVector, laws: &[DiscreteLaw]) -> Option<f64> {
    let max_atom = laws
        .iter()
        .map(DiscreteLaw::max_abs_value)
        .fold(0.0, f64::max);
    let fastest = theta.max_abs_coord() * max_atom;
    if fastest > 0.0 {
        // quarter of the fastest factor's period
        Some(std::f64::consts::PI / (2.0 * fastest))
    } else {
        None
    }
}

/// Integral of the CF gap over `[lo, hi]`, with the near-zero cutoff and
/// series mass bound applied when `lo` is 0.
fn gap_integral(
    theta: &CoefficientVector,
    laws: &[DiscreteLaw],
    lo: f64,
    hi: f64,
    r1: f64,
    epsilon: f64,
) -> Result<f64, CharfunError> {
    if hi <= lo {
        return Ok(0.0);
    }
    let opts = QuadOptions {
        abs_tol: 1e-10,
        max_panels: 1_000_000,
        max_width: oscillation_width(theta, laws),
    };
    let f = gap_integrand(theta, laws);
    if lo == 0.0 {
        let cutoff = 1e-3f64.min(hi);
        let head = small_xi_mass_bound(r1, epsilon, cutoff) / 2.0; // one-sided
        let tail = if hi > cutoff {
            quad::integrate(&f, cutoff, hi, opts)?.value
        } else {
            0.0
        };
        Ok(head + tail)
    } else {
        Ok(quad::integrate(&f, lo, hi, opts)?.value)
    }
}

/// Smallest threshold at which the coordinate set
/// `{j : |theta_j| gamma_bar_j^3 <= threshold}` carries squared mass at
/// least 1/8, computed exactly by a sorted prefix scan.
pub fn r2_threshold(theta: &CoefficientVector, laws: &[DiscreteLaw]) -> Result<f64, CharfunError> {
    let profs = profiles(theta, laws)?;
    let mut keyed: Vec<(f64, f64)> = theta
        .coords()
        .iter()
        .zip(&profs)
        .map(|(&t, p)| (t.abs() * p.gamma_bar3, t * t))
        .collect();
    keyed.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    let mut mass = NeumaierSum::new();
    for (key, t2) in &keyed {
        mass.add(*t2);
        if mass.value() >= 0.125 {
            return Ok(*key);
        }
    }
    Ok(keyed.last().expect("n >= 1").0)
}

/// Compute the regime diagnostics for standardized laws. `middle_c` is the
/// configurable constant in the middle-segment boundary `middle_c / r2_min`
/// (the underlying universal constant is not pinned; 1 by default).
pub fn regime_report(
    theta: &CoefficientVector,
    laws: &[DiscreteLaw],
    middle_c: f64,
) -> Result<RegimeReport, CharfunError> {
    let n = theta.n();
    let profs = profiles(theta, laws)?;

    let mut eps4 = NeumaierSum::new();
    let mut r1_sum = NeumaierSum::new();
    let mut delta4_mean = NeumaierSum::new();
    for (&t, p) in theta.coords().iter().zip(&profs) {
        let t2 = t * t;
        eps4.add(t2 * t2 * p.delta4);
        r1_sum.add(p.gamma3 * t * t * t);
        delta4_mean.add(p.delta4 / n as f64);
    }
    let epsilon = eps4.value().powf(0.25);
    let r1 = r1_sum.value().abs();
    let delta4 = delta4_mean.value();

    let r2_min = r2_threshold(theta, laws)?;
    let r2_reference = 200.0 * delta4.sqrt() / (n as f64).sqrt();

    let b1 = epsilon.powf(-2.0 / 3.0);
    let b2 = middle_c / r2_min;
    let b3 = n as f64 / delta4;
    let central = gap_integral(theta, laws, 0.0, b1, r1, epsilon)?;
    let middle = gap_integral(theta, laws, b1, b2, r1, epsilon)?;
    let tail = gap_integral(theta, laws, b2.max(b1), b3, r1, epsilon)?;

    Ok(RegimeReport {
        epsilon,
        r1,
        r2_min,
        r2_reference,
        segment_integrals: [central, middle, tail],
    })
}

/// Smoothing upper bound for the Kolmogorov distance:
///
/// ```text
///   (1/pi) int_{-T}^{T} |phi_theta(xi) - exp(-xi^2/2)| / |xi| dxi
///       + 24 / (pi sqrt(2 pi) T)
/// ```
///
/// using the classical inversion constants. The integrand extends
/// continuously by 0 at the origin (means and variances match); below the
/// 1e-3 cutoff it is replaced by a closed-form upper bound on its mass, so
/// the result stays an upper bound up to quadrature error (<= 1e-10).
pub fn esseen_bound(
    theta: &CoefficientVector,
    laws: &[DiscreteLaw],
    t: f64,
) -> Result<f64, CharfunError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(CharfunError::PreconditionViolated(format!(
            "T = {t} must be positive"
        )));
    }
    let profs = profiles(theta, laws)?;
    let mut eps4 = NeumaierSum::new();
    let mut r1_sum = NeumaierSum::new();
    for (&c, p) in theta.coords().iter().zip(&profs) {
        let c2 = c * c;
        eps4.add(c2 * c2 * p.delta4);
        r1_sum.add(p.gamma3 * c * c * c);
    }
    let epsilon = eps4.value().powf(0.25);
    let r1 = r1_sum.value().abs();

    // even integrand: integrate one side and double
    let one_side = gap_integral(theta, laws, 0.0, t, r1, epsilon)?;
    Ok(2.0 * one_side / std::f64::consts::PI + remainder_constant() / t)
}
