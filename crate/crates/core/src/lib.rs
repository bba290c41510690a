//! Numerical laboratory for Kolmogorov distances between weighted sums of
//! independent discrete random variables and the standard Gaussian.
//!
//! The crate is organized around six concerns:
//!
//! * [`laws`]: finitely supported laws, standardization, moments and
//!   pointwise characteristic functions;
//! * [`arithmetic`]: distances to the integer lattice, the alternating
//!   `theta0` coefficient vector, and a certified verifier for the lattice
//!   condition behind the arithmetic functional `N(theta)`;
//! * [`charfun`]: products of characteristic functions, the smoothing
//!   (Esseen) upper bound and regime diagnostics;
//! * [`kolmogorov`]: ground-truth distances by exact enumeration or Monte Carlo
//!   with DKW confidence radii, plus the classical Berry–Esseen reference bound;
//! * [`sphere`]: uniform directions on the unit sphere, the marginal
//!   density and its Bessel-type transform, and empirical tail studies;
//! * support modules: [`quad`] (adaptive Gauss–Kronrod quadrature), [`rng`]
//!   (counter-based splittable generator), [`stats`] (least squares),
//!   [`sum`] (compensated summation), [`erf`] (error function).
//!
//! All operations are pure functions of immutable inputs. Monte Carlo
//! results are a deterministic function of `(seed, parameters)` alone and do
//! not depend on thread count.

pub mod arithmetic;
pub mod charfun;
pub mod erf;
pub mod kolmogorov;
pub mod laws;
pub mod quad;
pub mod rng;
pub mod sphere;
pub mod stats;
pub mod sum;

/// Absolute tolerance shared by law canonicalization and atom merging.
pub const MERGE_TOL: f64 = 1e-12;

/// Tolerance for "standardized" checks (mean 0, variance 1).
pub const STD_TOL: f64 = 1e-12;
