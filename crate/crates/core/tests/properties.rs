//! Property tests for the structural invariants: moment chains, Fourier
//! identities, lattice-distance geometry, subadditivity, and the
//! theorem-oracle checks that must hold on every valid random input.

use proptest::prelude::*;

use cltlab_core::arithmetic::{
    self, certify_lattice_condition, dist_to_lattice, theta_zero, CoefficientVector,
};
use cltlab_core::kolmogorov::{exact_distance, normal_cdf, weighted_sum_law};
use cltlab_core::laws::{self, DiscreteLaw};
use cltlab_core::rng::CounterRng;
use cltlab_core::sphere::{bessel_transform, direction_stats, sample_direction_stream};
use cltlab_core::{charfun, MERGE_TOL};

fn raw_atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0f64..3.0, 0.05f64..1.0), 2..6)
}

/// Random standardized law with at least two atoms.
fn standardized_law() -> impl Strategy<Value = DiscreteLaw> {
    raw_atoms().prop_filter_map("degenerate", |raw| {
        let total: f64 = raw.iter().map(|p| p.1).sum();
        let normalized: Vec<(f64, f64)> = raw.iter().map(|&(v, w)| (v, w / total)).collect();
        let law = DiscreteLaw::new(normalized).ok()?;
        if law.len() < 2 || law.variance() <= 1e-6 {
            return None;
        }
        laws::standardize(&law).ok()
    })
}

fn unit_vector(max_n: usize) -> impl Strategy<Value = CoefficientVector> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_n).prop_filter_map("zero vector", |coords| {
        if coords.iter().all(|c| c.abs() < 1e-3) {
            return None;
        }
        CoefficientVector::from_unnormalized(coords).ok()
    })
}

proptest! {
    /// Moment chain for standardized laws:
    /// |gamma| <= gamma_bar <= delta^(2/3), gamma_bar >= 1, delta >= 1.
    #[test]
    fn moment_chain(law in standardized_law()) {
        let m = laws::moments(&law).unwrap();
        let gamma = m.gamma();
        let gamma_bar = m.gamma_bar();
        let delta = m.delta();
        prop_assert!(gamma.abs() <= gamma_bar + 1e-12);
        prop_assert!(gamma_bar <= delta.powf(2.0 / 3.0) + 1e-12);
        prop_assert!(gamma_bar >= 1.0 - 1e-12);
        prop_assert!(delta >= 1.0 - 1e-12);
    }

    /// charfun(law, -xi) is the complex conjugate of charfun(law, xi).
    #[test]
    fn charfun_conjugate_symmetry(law in standardized_law(), xi in -50.0f64..50.0) {
        let plus = laws::charfun(&law, xi);
        let minus = laws::charfun(&law, -xi);
        prop_assert!((minus - plus.conj()).norm() < 1e-14);
    }

    /// The CF of the symmetrized law is the squared modulus of the original.
    #[test]
    fn symmetrize_cf_identity(law in standardized_law(), xi in -30.0f64..30.0) {
        let direct = laws::charfun(&law, xi).norm_sqr();
        let sym = laws::charfun(&laws::symmetrize(&law), xi);
        prop_assert!((sym.re - direct).abs() < 1e-12, "re {} vs {}", sym.re, direct);
        prop_assert!(sym.im.abs() < 1e-12);
    }

    /// Theorem oracle: both anti-concentration parts hold on every valid
    /// nonnegative unit-mean law.
    #[test]
    fn paley_zygmund_always_true(raw in prop::collection::vec((0.01f64..4.0, 0.05f64..1.0), 2..6)) {
        let total: f64 = raw.iter().map(|p| p.1).sum();
        let normalized: Vec<(f64, f64)> = raw.iter().map(|&(v, w)| (v, w / total)).collect();
        let law = match DiscreteLaw::new(normalized) {
            Ok(l) => l,
            Err(_) => return Ok(()),
        };
        let mean = law.mean();
        prop_assume!(mean > 1e-3);
        // rescale atoms to unit mean
        let unit = DiscreteLaw::new(
            law.atoms().iter().map(|a| (a.value / mean, a.weight)).collect(),
        ).unwrap();
        let second = unit.power_moment(2);
        let m_bound = second.max(1.0) * (1.0 + 1e-9);
        let (one, two) = laws::paley_zygmund_check(&unit, m_bound).unwrap();
        prop_assert!(one && two, "law {:?} M {}", unit, m_bound);
    }

    /// Triangle inequality for the distance to the lattice.
    #[test]
    fn lattice_triangle_inequality(
        x in prop::collection::vec(-10.0f64..10.0, 1..8),
        y in prop::collection::vec(-10.0f64..10.0, 1..8),
    ) {
        let n = x.len().min(y.len());
        let sum: Vec<f64> = x[..n].iter().zip(&y[..n]).map(|(a, b)| a + b).collect();
        prop_assert!(
            dist_to_lattice(&sum) <= dist_to_lattice(&x[..n]) + dist_to_lattice(&y[..n]) + 1e-12
        );
    }

    /// xi -> d(xi theta, Z^n) is 1-Lipschitz for unit theta.
    #[test]
    fn lattice_distance_lipschitz(
        theta in unit_vector(10),
        xi1 in -30.0f64..30.0,
        xi2 in -30.0f64..30.0,
    ) {
        let scaled = |xi: f64| -> Vec<f64> {
            theta.coords().iter().map(|t| t * xi).collect()
        };
        let d1 = dist_to_lattice(&scaled(xi1));
        let d2 = dist_to_lattice(&scaled(xi2));
        prop_assert!((d1 - d2).abs() <= (xi1 - xi2).abs() + 1e-9);
    }

    /// Subadditivity of the root-mean-square lattice distance.
    #[test]
    fn rms_distance_subadditive(
        law in standardized_law(),
        theta in unit_vector(8),
        xi1 in -20.0f64..20.0,
        xi2 in -20.0f64..20.0,
    ) {
        let y = laws::symmetrize(&law);
        let s = |xi: f64| arithmetic::rms_lattice_distance(&theta, &y, xi).unwrap();
        prop_assert!(s(xi1 + xi2) <= s(xi1) + s(xi2) + 1e-10);
    }

    /// The same function is sqrt(E Y^2)/(2 pi)-Lipschitz in xi.
    #[test]
    fn rms_distance_lipschitz(
        law in standardized_law(),
        theta in unit_vector(8),
        xi1 in -20.0f64..20.0,
        xi2 in -20.0f64..20.0,
    ) {
        let y = laws::symmetrize(&law);
        let lip = y.power_moment(2).sqrt() / (2.0 * std::f64::consts::PI);
        let s = |xi: f64| arithmetic::rms_lattice_distance(&theta, &y, xi).unwrap();
        prop_assert!((s(xi1) - s(xi2)).abs() <= lip * (xi1 - xi2).abs() + 1e-9);
    }

    /// Cauchy–Schwarz: r1 <= epsilon^2 for every (theta, law) pair.
    #[test]
    fn r1_dominated_by_epsilon_squared(law in standardized_law(), theta in unit_vector(10)) {
        let rep = charfun::regime_report(&theta, std::slice::from_ref(&law), 1.0);
        // segment quadratures can legitimately hit the panel budget for
        // wild laws; the algebraic invariant is what matters here
        if let Ok(rep) = rep {
            prop_assert!(rep.r1 <= rep.epsilon * rep.epsilon + 1e-12);
        }
    }

    /// |product_charfun| <= 1 and equals 1 at the origin.
    #[test]
    fn product_cf_modulus(law in standardized_law(), theta in unit_vector(10), xi in -40.0f64..40.0) {
        let z = charfun::product_charfun(&theta, std::slice::from_ref(&law), xi).unwrap();
        prop_assert!(z.norm() <= 1.0 + 1e-12);
        let at_zero = charfun::product_charfun(&theta, std::slice::from_ref(&law), 0.0).unwrap();
        prop_assert!((at_zero.re - 1.0).abs() <= 1e-12);
    }

    /// Exact weighted-sum law of a standardized law keeps mean 0, variance 1.
    #[test]
    fn weighted_sum_standardized(law in standardized_law(), theta in unit_vector(6)) {
        prop_assume!(law.len().pow(theta.n() as u32) <= 1 << 16);
        let sum_law = weighted_sum_law(&theta, &law, 1 << 20).unwrap();
        prop_assert!(sum_law.mean().abs() < 1e-10);
        prop_assert!((sum_law.variance() - 1.0).abs() < 1e-10);
    }

    /// Direction statistics: |skew| <= sqrt(quartic) <= sqrt(n * mean delta^4).
    #[test]
    fn direction_stats_cauchy_schwarz(law in standardized_law(), seed in 0u64..1000, n in 2usize..24) {
        let profile = laws::moments(&law).unwrap();
        let theta = sample_direction_stream(n, seed, 1);
        let s = direction_stats(&[profile], &theta).unwrap();
        prop_assert!(s.skew_term.abs() <= s.quartic_term.sqrt() + 1e-12);
        prop_assert!(s.quartic_term <= s.n as f64 * s.delta4_mean + 1e-12);
    }

    /// Monotonicity of the normal CDF on random pairs.
    #[test]
    fn normal_cdf_monotone(a in -9.0f64..9.0, b in -9.0f64..9.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(normal_cdf(lo) <= normal_cdf(hi));
    }
}

/// Certified outcomes survive an independent dense random probe: no point
/// in [-n, n] violates the lattice condition.
#[test]
fn certifier_soundness_random_probe() {
    for (n, r) in [(8usize, 40.0), (16, 2.0)] {
        let theta = theta_zero(n).unwrap();
        let cert = certify_lattice_condition(&theta, r, 1e-3).unwrap();
        assert!(cert.is_certified(), "n = {n}");
        let mut rng = CounterRng::from_seed(2024);
        let n_over_r = n as f64 / r;
        for _ in 0..100_000 {
            let xi = (2.0 * rng.uniform() - 1.0) * n as f64;
            let scaled: Vec<f64> = theta.coords().iter().map(|t| t * xi).collect();
            let d = dist_to_lattice(&scaled);
            let rhs = 0.1 * xi.abs().min(n_over_r / xi.abs().max(1e-300));
            assert!(
                d >= rhs - 1e-12,
                "violation at xi = {xi}: d = {d}, rhs = {rhs}"
            );
        }
    }
}

/// The scaled transform approaches the Gaussian CF: the sup over a fixed
/// grid of |J_n(sqrt(n) xi) - exp(-xi^2/2)| decreases along n = 8, 16, 32, 64.
#[test]
fn bessel_transform_gaussian_limit_trend() {
    let grid: Vec<f64> = (-20..=20).map(|i| 0.25 * i as f64).collect();
    let mut previous = f64::INFINITY;
    for n in [8usize, 16, 32, 64] {
        let sup = grid
            .iter()
            .map(|&xi| {
                let j = bessel_transform(n, (n as f64).sqrt() * xi).unwrap();
                (j - (-0.5 * xi * xi).exp()).abs()
            })
            .fold(0.0, f64::max);
        assert!(sup < previous, "n = {n}: sup {sup} vs previous {previous}");
        previous = sup;
    }
}

/// Exact distances for uniform coefficients against the central binomial
/// closed form, all even n up to 24 (brute-force equivalence).
#[test]
fn uniform_rademacher_closed_form() {
    let rad = DiscreteLaw::rademacher();
    for n in (2..=24).step_by(2) {
        let theta = CoefficientVector::uniform(n);
        let d = exact_distance(&theta, &rad, 1 << 26).unwrap().value;
        let mut binom = 1.0f64;
        for i in 0..n / 2 {
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
        let want = 0.5 * binom / (1u64 << n) as f64;
        assert!(
            (d - want).abs() <= 1e-10,
            "n = {n}: exact {d} vs closed form {want}"
        );
    }
}

/// Atom merge keeps laws canonical: values strictly increasing and at
/// least MERGE_TOL apart at construction scale.
#[test]
fn canonical_form_strictly_increasing() {
    let law = laws::symmetrize(&laws::standardize(&DiscreteLaw::bernoulli(0.3).unwrap()).unwrap());
    let atoms = law.atoms();
    for w in atoms.windows(2) {
        assert!(w[1].value > w[0].value + MERGE_TOL / 2.0);
    }
}
