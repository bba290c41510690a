//! Ground-truth Kolmogorov distances for weighted sums of i.i.d. discrete
//! variables: exact enumeration (iterated convolution plus a CDF scan
//! against the normal), and a Monte Carlo estimator with a
//! Dvoretzky–Kiefer–Wolfowitz confidence radius.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::CoefficientVector;
use crate::erf::erfc;
use crate::laws::{DiscreteLaw, LawError, MomentProfile};
use crate::rng::CounterRng;
use crate::sum::NeumaierSum;

#[derive(Debug, Error)]
pub enum KolmogorovError {
    #[error("atom budget exceeded: convolution step needs {required} atoms (budget {budget})")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Law(#[from] LawError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// A Kolmogorov distance value together with how it was obtained.
#[derive(Clone, Debug, Serialize)]
pub struct KolmogorovEstimate {
    pub value: f64,
    pub method: Method,
    /// DKW radius `sqrt(ln(2/alpha) / (2 m))`; 0 for exact values.
    pub confidence_radius: f64,
    pub sample_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl KolmogorovEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serializes")
    }
}

/// Standard normal CDF via the complementary error function;
/// absolute error below 1e-15 on |t| <= 8.
pub fn normal_cdf(t: f64) -> f64 {
    (0.5 * erfc(-t / std::f64::consts::SQRT_2)).clamp(0.0, 1.0)
}

/// Exact law of `sum_j theta_j X_j` for i.i.d. `X_j ~ law`, by iterated
/// convolution of scaled copies with canonical merging. Zero coordinates
/// contribute nothing and are skipped. Errors out before any convolution
/// step whose transient atom count would exceed the budget.
pub fn weighted_sum_law(
    theta: &CoefficientVector,
    law: &DiscreteLaw,
    atom_budget: u64,
) -> Result<DiscreteLaw, KolmogorovError> {
    let k = law.len() as u128;
    let mut current = DiscreteLaw::point_mass(0.0);
    for &t in theta.coords() {
        if t == 0.0 {
            continue;
        }
        let required = current.len() as u128 * k;
        if required > atom_budget as u128 {
            return Err(KolmogorovError::BudgetExceeded {
                required,
                budget: atom_budget,
            });
        }
        let mut raw = Vec::with_capacity(required as usize);
        for a in current.atoms() {
            for b in law.atoms() {
                raw.push((a.value + t * b.value, a.weight * b.weight));
            }
        }
        current = DiscreteLaw::new(raw)?;
    }
    Ok(current)
}

/// Scan a sorted discrete law against the normal CDF:
/// `max_t max(|F(t) - Phi(t)|, |F(t-) - Phi(t)|)` over the atoms.
fn sup_gap_against_normal(law: &DiscreteLaw) -> f64 {
    let mut cdf = NeumaierSum::new();
    let mut best = 0.0f64;
    for atom in law.atoms() {
        let phi = normal_cdf(atom.value);
        let before = cdf.value();
        best = best.max((before - phi).abs());
        cdf.add(atom.weight);
        best = best.max((cdf.value() - phi).abs());
    }
    best
}

/// Exact Kolmogorov distance of the weighted sum from the standard normal.
pub fn exact_distance(
    theta: &CoefficientVector,
    law: &DiscreteLaw,
    atom_budget: u64,
) -> Result<KolmogorovEstimate, KolmogorovError> {
    let sum_law = weighted_sum_law(theta, law, atom_budget)?;
    Ok(KolmogorovEstimate {
        value: sup_gap_against_normal(&sum_law),
        method: Method::Exact,
        confidence_radius: 0.0,
        sample_count: 0,
        seed: None,
    })
}

/// Monte Carlo estimate of the same distance from `m` i.i.d. samples of the
/// weighted sum. Each sample owns the stream `(seed, sample_index)`, so the
/// result is a deterministic function of `(seed, m)` at any thread count.
/// `|value - exact| <= confidence_radius` with probability at least
/// `1 - alpha` by the DKW inequality.
pub fn mc_distance(
    theta: &CoefficientVector,
    law: &DiscreteLaw,
    m: u64,
    alpha: f64,
    seed: u64,
) -> Result<KolmogorovEstimate, KolmogorovError> {
    if m < 1_000 {
        return Err(KolmogorovError::PreconditionViolated(format!(
            "sample count m = {m} must be >= 1000"
        )));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(KolmogorovError::PreconditionViolated(format!(
            "alpha = {alpha} outside (0, 1)"
        )));
    }
    let cumulative = law.cumulative_weights();
    let values: Vec<f64> = law.atoms().iter().map(|a| a.value).collect();
    let coords = theta.coords();

    let mut samples: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::from_seed_stream(seed, i);
            let mut s = 0.0;
            for &t in coords {
                let u = rng.uniform();
                let idx = cumulative.partition_point(|&c| c <= u);
                s += t * values[idx.min(values.len() - 1)];
            }
            s
        })
        .collect();
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    let mf = m as f64;
    let mut best = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let phi = normal_cdf(x);
        best = best.max(((i + 1) as f64 / mf - phi).max(phi - i as f64 / mf));
    }

    Ok(KolmogorovEstimate {
        value: best,
        method: Method::MonteCarlo,
        confidence_radius: ((2.0 / alpha).ln() / (2.0 * mf)).sqrt(),
        sample_count: m,
        seed: Some(seed),
    })
}

/// Classical Berry–Esseen reference curve `constant * E|X|^3 / sqrt(n)`.
pub fn classical_be_bound(moment: &MomentProfile, n: usize, constant: f64) -> f64 {
    assert!(n >= 1, "n must be positive");
    assert!(constant > 0.0, "constant must be positive");
    constant * moment.gamma_bar3 / (n as f64).sqrt()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle values keep full digits
mod tests {
    use super::*;
    use crate::laws;
    use approx::assert_relative_eq;

    fn frac_sqrt2() -> f64 {
        1.0 / std::f64::consts::SQRT_2
    }

    #[test]
    fn normal_cdf_reference_grid() {
        // mpmath (dps 40), nearest-f64 literals
        let cases: [(f64, f64); 14] = [
            (0.0, 0.5),
            (0.5, 0.6914624612740131036377),
            (1.0, 0.8413447460685429485852),
            (-1.0, 0.1586552539314570514148),
            (2.0, 0.9772498680518207927997),
            (-2.5, 0.006209665325776135166978),
            (3.0, 0.9986501019683699054733),
            (4.0, 0.9999683287581668800787),
            (-4.0, 0.00003167124183311992125377),
            (6.0, 0.9999999990134123549623),
            (-6.0, 9.865876450376981407009e-10),
            (8.0, 0.9999999999999993779039),
            (-8.0, 6.220960574271784123516e-16),
            (1.5, 0.9331927987311419339955),
        ];
        for (t, want) in cases {
            assert!(
                (normal_cdf(t) - want).abs() <= 1e-15,
                "Phi({t}) = {} want {want}",
                normal_cdf(t)
            );
        }
    }

    #[test]
    fn normal_cdf_symmetry_and_monotonicity() {
        let mut prev = -0.1;
        for i in 0..=16_000 {
            let t = -8.0 + i as f64 * 1e-3;
            let p = normal_cdf(t);
            assert!((normal_cdf(-t) - (1.0 - p)).abs() < 1e-15, "t = {t}");
            assert!(p >= prev, "monotonicity broken at t = {t}");
            prev = p;
        }
    }

    #[test]
    fn weighted_sum_two_coordinates() {
        let theta = CoefficientVector::new(vec![frac_sqrt2(), frac_sqrt2()]).unwrap();
        let law = weighted_sum_law(&theta, &DiscreteLaw::rademacher(), 1 << 20).unwrap();
        let atoms = law.atoms();
        assert_eq!(atoms.len(), 3);
        assert_relative_eq!(atoms[0].value, -std::f64::consts::SQRT_2, epsilon = 1e-14);
        assert_relative_eq!(atoms[0].weight, 0.25, epsilon = 1e-15);
        assert_relative_eq!(atoms[1].value, 0.0, epsilon = 1e-14);
        assert_relative_eq!(atoms[1].weight, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn weighted_sum_drops_zero_coordinate() {
        let theta = CoefficientVector::new(vec![1.0, 0.0]).unwrap();
        let law = weighted_sum_law(&theta, &DiscreteLaw::rademacher(), 16).unwrap();
        assert_eq!(law.atoms(), DiscreteLaw::rademacher().atoms());
    }

    #[test]
    fn weighted_sum_theta_zero_standardized() {
        let theta = crate::arithmetic::theta_zero(4).unwrap();
        let law = weighted_sum_law(&theta, &DiscreteLaw::rademacher(), 1 << 20).unwrap();
        assert!(law.len() <= 16);
        assert!(law.mean().abs() < 1e-12);
        assert_relative_eq!(law.variance(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn budget_error_carries_requirement() {
        let theta = CoefficientVector::uniform(30);
        let err = weighted_sum_law(&theta, &DiscreteLaw::rademacher(), 8).unwrap_err();
        match err {
            KolmogorovError::BudgetExceeded { required, budget } => {
                assert!(required > budget as u128);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn exact_distance_single_rademacher() {
        let theta = CoefficientVector::new(vec![1.0]).unwrap();
        let d = exact_distance(&theta, &DiscreteLaw::rademacher(), 16).unwrap();
        // attained approaching t = 1 from below: |1/2 - Phi(1)|
        assert_relative_eq!(d.value, normal_cdf(1.0) - 0.5, epsilon = 1e-15);
        assert_eq!(d.method, Method::Exact);
        assert_eq!(d.confidence_radius, 0.0);
    }

    #[test]
    fn exact_distance_two_coordinates() {
        let theta = CoefficientVector::new(vec![frac_sqrt2(), frac_sqrt2()]).unwrap();
        let d = exact_distance(&theta, &DiscreteLaw::rademacher(), 16).unwrap();
        assert_relative_eq!(d.value, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn exact_distance_matches_central_binomial() {
        // uniform theta, Rademacher: distance = (1/2) 2^-n C(n, n/2)
        for n in [2usize, 8, 16] {
            let theta = CoefficientVector::uniform(n);
            let d = exact_distance(&theta, &DiscreteLaw::rademacher(), 1 << 26).unwrap();
            let mut binom = 1.0f64;
            for i in 0..n / 2 {
                binom = binom * (n - i) as f64 / (i + 1) as f64;
            }
            let want = 0.5 * binom / (1u64 << n) as f64;
            assert_relative_eq!(d.value, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn mc_degenerate_law_is_half() {
        let theta = CoefficientVector::new(vec![1.0]).unwrap();
        let d = mc_distance(&theta, &DiscreteLaw::point_mass(0.0), 1_000, 0.05, 9).unwrap();
        assert_eq!(d.value, 0.5);
        assert_eq!(d.sample_count, 1_000);
    }

    #[test]
    fn mc_radius_formula() {
        let theta = CoefficientVector::new(vec![frac_sqrt2(), frac_sqrt2()]).unwrap();
        let d = mc_distance(&theta, &DiscreteLaw::rademacher(), 100_000, 0.01, 7).unwrap();
        assert_relative_eq!(
            d.confidence_radius,
            (200.0f64.ln() / 2e5).sqrt(),
            epsilon = 1e-15
        );
        // exact distance is 0.25; the estimate should be within the radius
        assert!((d.value - 0.25).abs() <= d.confidence_radius);
    }

    #[test]
    fn mc_deterministic_across_thread_counts() {
        let theta = CoefficientVector::uniform(8);
        let law = DiscreteLaw::rademacher();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| mc_distance(&theta, &law, 10_000, 0.05, 1234).unwrap().value)
        };
        let v1 = run(1);
        let v8 = run(8);
        assert_eq!(v1.to_bits(), v8.to_bits());
    }

    #[test]
    fn classical_be_examples() {
        let rad = laws::moments(&DiscreteLaw::rademacher()).unwrap();
        assert_relative_eq!(classical_be_bound(&rad, 100, 0.56), 0.056, epsilon = 1e-15);
        assert_relative_eq!(classical_be_bound(&rad, 400, 0.56), 0.028, epsilon = 1e-15);
        let tp = laws::moments(&DiscreteLaw::three_point(2.0f64.sqrt(), 0.25).unwrap()).unwrap();
        assert_relative_eq!(
            classical_be_bound(&tp, 100, 0.56),
            0.56 * 2.0f64.sqrt() / 10.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn estimate_json_shape() {
        let theta = CoefficientVector::uniform(4);
        let d = mc_distance(&theta, &DiscreteLaw::rademacher(), 2_000, 0.05, 3).unwrap();
        let json = d.to_json();
        assert!(json.contains("\"method\":\"monte_carlo\""));
        assert!(json.contains("\"seed\":3"));
        let exact = exact_distance(&theta, &DiscreteLaw::rademacher(), 1 << 10).unwrap();
        assert!(exact.to_json().contains("\"method\":\"exact\""));
    }

    #[test]
    fn exact_distance_symmetric_under_signs_and_permutation() {
        let law = DiscreteLaw::three_point(2.0f64.sqrt(), 0.25).unwrap();
        let d1 = exact_distance(
            &CoefficientVector::new(vec![1.0, 0.0, 0.0]).unwrap(),
            &law,
            64,
        )
        .unwrap();
        let d2 = exact_distance(
            &CoefficientVector::new(vec![0.0, -1.0, 0.0]).unwrap(),
            &law,
            64,
        )
        .unwrap();
        assert_eq!(d1.value.to_bits(), d2.value.to_bits());
    }
}
