//! Finitely supported random-variable models.
//!
//! A [`DiscreteLaw`] is a canonicalized list of atoms: values strictly
//! increasing, weights positive and summing to one. Laws are immutable
//! after construction, so they can be shared freely across threads.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sum::NeumaierSum;
use crate::{MERGE_TOL, STD_TOL};

#[derive(Debug, Error)]
pub enum LawError {
    #[error("invalid atom ({value}, {weight}): {reason}")]
    InvalidAtom {
        value: f64,
        weight: f64,
        reason: &'static str,
    },
    #[error("atom weights sum to {sum}, expected 1 within 1e-12")]
    WeightSum { sum: f64 },
    #[error("law has no atoms")]
    Empty,
    #[error("degenerate law: variance {variance:.3e} below 1e-14")]
    DegenerateLaw { variance: f64 },
    #[error("law is not standardized (mean {mean:.3e}, variance {variance})")]
    NotStandardized { mean: f64, variance: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// One atom of a finitely supported law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

/// Finitely supported probability law in canonical form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteLaw {
    atoms: Vec<Atom>,
}

impl DiscreteLaw {
    /// Canonicalize raw `(value, weight)` pairs into a law: zero-weight atoms
    /// dropped, values sorted, atoms with values within 1e-12 of the group
    /// anchor merged (representative = weighted mean of the group).
    pub fn new(raw: Vec<(f64, f64)>) -> Result<Self, LawError> {
        let mut pairs = Vec::with_capacity(raw.len());
        for (value, weight) in raw {
            if !value.is_finite() || !weight.is_finite() {
                return Err(LawError::InvalidAtom {
                    value,
                    weight,
                    reason: "non-finite",
                });
            }
            if !(0.0..=1.0 + MERGE_TOL).contains(&weight) {
                return Err(LawError::InvalidAtom {
                    value,
                    weight,
                    reason: "weight outside (0, 1]",
                });
            }
            if weight > 0.0 {
                pairs.push((value, weight));
            }
        }
        if pairs.is_empty() {
            return Err(LawError::Empty);
        }
        // total order on (value, weight) keeps the merge deterministic even
        // when equal values carry different weights
        pairs.sort_unstable_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
        });

        let mut atoms: Vec<Atom> = Vec::with_capacity(pairs.len());
        let mut i = 0;
        while i < pairs.len() {
            let anchor = pairs[i].0;
            let mut w = 0.0;
            let mut wv = 0.0;
            let mut j = i;
            while j < pairs.len() && pairs[j].0 - anchor <= MERGE_TOL {
                w += pairs[j].1;
                wv += pairs[j].1 * pairs[j].0;
                j += 1;
            }
            atoms.push(Atom {
                value: wv / w,
                weight: w,
            });
            i = j;
        }

        let total: f64 = {
            let mut s = NeumaierSum::new();
            for a in &atoms {
                s.add(a.weight);
            }
            s.value()
        };
        if (total - 1.0).abs() > 1e-12 {
            return Err(LawError::WeightSum { sum: total });
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(value: f64) -> Self {
        Self {
            atoms: vec![Atom { value, weight: 1.0 }],
        }
    }

    /// Symmetric two-point law on {-1, +1}.
    pub fn rademacher() -> Self {
        Self {
            atoms: vec![
                Atom {
                    value: -1.0,
                    weight: 0.5,
                },
                Atom {
                    value: 1.0,
                    weight: 0.5,
                },
            ],
        }
    }

    /// Bernoulli(p) on {0, 1}, not standardized.
    pub fn bernoulli(p: f64) -> Result<Self, LawError> {
        if !(0.0 < p && p < 1.0) {
            return Err(LawError::PreconditionViolated(format!(
                "bernoulli parameter p = {p} outside (0, 1)"
            )));
        }
        Self::new(vec![(0.0, 1.0 - p), (1.0, p)])
    }

    /// Symmetric three-point law {-a: p, 0: 1-2p, +a: p}, not standardized.
    pub fn three_point(a: f64, p: f64) -> Result<Self, LawError> {
        if !(0.0 < p && p <= 0.5) || a <= 0.0 {
            return Err(LawError::PreconditionViolated(format!(
                "three-point parameters (a = {a}, p = {p}) need a > 0, 0 < p <= 1/2"
            )));
        }
        Self::new(vec![(-a, p), (0.0, 1.0 - 2.0 * p), (a, p)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> f64 {
        let mut s = NeumaierSum::new();
        for a in &self.atoms {
            s.add(a.weight * a.value);
        }
        s.value()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let mut s = NeumaierSum::new();
        for a in &self.atoms {
            let d = a.value - mu;
            s.add(a.weight * d * d);
        }
        s.value()
    }

    /// Weighted power sum `E X^k` (no centering).
    pub fn power_moment(&self, k: u32) -> f64 {
        let mut s = NeumaierSum::new();
        for a in &self.atoms {
            s.add(a.weight * a.value.powi(k as i32));
        }
        s.value()
    }

    pub fn is_standardized(&self) -> bool {
        self.mean().abs() <= STD_TOL && (self.variance() - 1.0).abs() <= STD_TOL
    }

    /// Largest |value| over the support.
    pub fn max_abs_value(&self) -> f64 {
        self.atoms.iter().map(|a| a.value.abs()).fold(0.0, f64::max)
    }

    /// Running weight totals aligned with `atoms()`, for inverse-CDF sampling.
    /// The last entry is clamped to exactly 1.
    pub fn cumulative_weights(&self) -> Vec<f64> {
        let mut acc = NeumaierSum::new();
        let mut out = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            acc.add(a.weight);
            out.push(acc.value().min(1.0));
        }
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }
}

/// Third and fourth moment data of a standardized law:
/// `gamma3 = E X^3` (signed), `gamma_bar3 = E |X|^3`, `delta4 = E X^4`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentProfile {
    pub gamma3: f64,
    pub gamma_bar3: f64,
    pub delta4: f64,
}

impl MomentProfile {
    /// Signed cube root of the third moment.
    pub fn gamma(&self) -> f64 {
        self.gamma3.signum() * self.gamma3.abs().cbrt()
    }

    /// Cube root of the absolute third moment.
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar3.cbrt()
    }

    /// Fourth root of the fourth moment.
    pub fn delta(&self) -> f64 {
        self.delta4.powf(0.25)
    }
}

/// Affine image `(X - mean)/sd`: mean 0, variance 1 within 1e-12.
pub fn standardize(law: &DiscreteLaw) -> Result<DiscreteLaw, LawError> {
    if law.len() < 2 {
        return Err(LawError::DegenerateLaw {
            variance: law.variance(),
        });
    }
    let var = law.variance();
    if var <= 1e-14 {
        return Err(LawError::DegenerateLaw { variance: var });
    }
    let mu = law.mean();
    let sd = var.sqrt();
    DiscreteLaw::new(
        law.atoms()
            .iter()
            .map(|a| ((a.value - mu) / sd, a.weight))
            .collect(),
    )
}

/// Exact weighted power sums of a standardized law.
pub fn moments(law: &DiscreteLaw) -> Result<MomentProfile, LawError> {
    if !law.is_standardized() {
        return Err(LawError::NotStandardized {
            mean: law.mean(),
            variance: law.variance(),
        });
    }
    let mut g3 = NeumaierSum::new();
    let mut gb3 = NeumaierSum::new();
    let mut d4 = NeumaierSum::new();
    for a in law.atoms() {
        let v3 = a.value * a.value * a.value;
        g3.add(a.weight * v3);
        gb3.add(a.weight * v3.abs());
        d4.add(a.weight * v3 * a.value);
    }
    Ok(MomentProfile {
        gamma3: g3.value(),
        gamma_bar3: gb3.value(),
        delta4: d4.value(),
    })
}

/// Pointwise characteristic function `E exp(-i xi X)`.
pub fn charfun(law: &DiscreteLaw, xi: f64) -> Complex64 {
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for a in law.atoms() {
        let (s, c) = (xi * a.value).sin_cos();
        re.add(a.weight * c);
        im.add(-a.weight * s);
    }
    Complex64::new(re.value(), im.value())
}

/// Law of `X - X'` for independent copies; symmetric about 0, and its
/// characteristic function equals `|charfun(law, .)|^2`.
pub fn symmetrize(law: &DiscreteLaw) -> DiscreteLaw {
    let mut raw = Vec::with_capacity(law.len() * law.len());
    for a in law.atoms() {
        for b in law.atoms() {
            raw.push((a.value - b.value, a.weight * b.weight));
        }
    }
    DiscreteLaw::new(raw).expect("difference of a valid law with itself is a valid law")
}

/// Anti-concentration checks for a nonnegative law with unit mean and
/// `E Y^2 <= m_bound`: part one is `P(Y >= 1/2) >= 1/(4 m_bound)`, part two
/// is `E Y 1_{Y <= 5 m_bound} >= 4/5`. Both hold for every valid input
/// (they are theorems), which makes this a test oracle.
pub fn paley_zygmund_check(law: &DiscreteLaw, m_bound: f64) -> Result<(bool, bool), LawError> {
    if m_bound < 1.0 {
        return Err(LawError::PreconditionViolated(format!(
            "bound M = {m_bound} must be >= 1"
        )));
    }
    if law.atoms().iter().any(|a| a.value < 0.0) {
        return Err(LawError::PreconditionViolated(
            "law has a negative atom".into(),
        ));
    }
    let mean = law.mean();
    if (mean - 1.0).abs() > 1e-12 {
        return Err(LawError::PreconditionViolated(format!(
            "mean is {mean}, expected 1"
        )));
    }
    let second = law.power_moment(2);
    if second > m_bound * (1.0 + 1e-12) {
        return Err(LawError::PreconditionViolated(format!(
            "second moment {second} exceeds bound {m_bound}"
        )));
    }

    let p_half: f64 = law
        .atoms()
        .iter()
        .filter(|a| a.value >= 0.5)
        .map(|a| a.weight)
        .sum();
    let part_one = p_half >= 1.0 / (4.0 * m_bound);

    let mut trunc = NeumaierSum::new();
    for a in law.atoms() {
        if a.value <= 5.0 * m_bound {
            trunc.add(a.weight * a.value);
        }
    }
    let part_two = trunc.value() >= 4.0 / 5.0;
    Ok((part_one, part_two))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT_3: f64 = 1.7320508075688772;

    #[test]
    fn standardize_bernoulli_quarter() {
        let law = standardize(&DiscreteLaw::bernoulli(0.25).unwrap()).unwrap();
        let atoms = law.atoms();
        assert_eq!(atoms.len(), 2);
        // (B - 1/4) / (sqrt(3)/4)
        assert_relative_eq!(atoms[0].value, -1.0 / SQRT_3, epsilon = 1e-14);
        assert_relative_eq!(atoms[0].weight, 0.75, epsilon = 1e-15);
        assert_relative_eq!(atoms[1].value, SQRT_3, epsilon = 1e-14);
        assert_relative_eq!(atoms[1].weight, 0.25, epsilon = 1e-15);
        assert!(law.is_standardized());
    }

    #[test]
    fn standardize_rademacher_is_identity() {
        let rad = DiscreteLaw::rademacher();
        let std = standardize(&rad).unwrap();
        assert_eq!(std.atoms(), rad.atoms());
    }

    #[test]
    fn standardize_point_mass_degenerate() {
        let err = standardize(&DiscreteLaw::point_mass(0.0)).unwrap_err();
        assert!(matches!(err, LawError::DegenerateLaw { .. }));
    }

    #[test]
    fn moments_rademacher() {
        let m = moments(&DiscreteLaw::rademacher()).unwrap();
        assert_eq!(m.gamma3, 0.0);
        assert_eq!(m.gamma_bar3, 1.0);
        assert_eq!(m.delta4, 1.0);
    }

    #[test]
    fn moments_three_point() {
        let a = 2.0f64.sqrt();
        let law = DiscreteLaw::three_point(a, 0.25).unwrap();
        assert!(law.is_standardized());
        let m = moments(&law).unwrap();
        assert_relative_eq!(m.gamma3, 0.0, epsilon = 1e-15);
        assert_relative_eq!(m.gamma_bar3, 2.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(m.delta4, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn moments_standardized_bernoulli_quarter() {
        let law = standardize(&DiscreteLaw::bernoulli(0.25).unwrap()).unwrap();
        let m = moments(&law).unwrap();
        assert_relative_eq!(m.gamma3, 2.0 / SQRT_3, epsilon = 1e-13);
        assert_relative_eq!(m.gamma_bar3, 5.0 / (2.0 * SQRT_3), epsilon = 1e-13);
        assert_relative_eq!(m.delta4, 7.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn charfun_rademacher_is_cosine() {
        let rad = DiscreteLaw::rademacher();
        for xi in [-3.7, -1.0, 0.0, 0.4, 2.0, 11.0] {
            let z = charfun(&rad, xi);
            assert_relative_eq!(z.re, xi.cos(), epsilon = 1e-15);
            assert!(z.im.abs() < 1e-15);
        }
    }

    #[test]
    fn charfun_at_zero_is_one() {
        for law in [
            DiscreteLaw::rademacher(),
            standardize(&DiscreteLaw::bernoulli(0.1).unwrap()).unwrap(),
            DiscreteLaw::three_point(1.5, 0.3).unwrap(),
        ] {
            let z = charfun(&law, 0.0);
            assert!((z.re - 1.0).abs() <= 1e-12 && z.im == 0.0);
        }
    }

    #[test]
    fn charfun_three_point_closed_form() {
        let a = 2.0f64.sqrt();
        let law = DiscreteLaw::three_point(a, 0.25).unwrap();
        for xi in [0.3, 1.0, 5.7] {
            let z = charfun(&law, xi);
            assert_relative_eq!(z.re, 0.5 + 0.5 * (a * xi).cos(), epsilon = 1e-14);
            assert!(z.im.abs() < 1e-15);
        }
    }

    #[test]
    fn symmetrize_rademacher() {
        let sym = symmetrize(&DiscreteLaw::rademacher());
        let atoms = sym.atoms();
        assert_eq!(atoms.len(), 3);
        assert_eq!((atoms[0].value, atoms[0].weight), (-2.0, 0.25));
        assert_eq!((atoms[1].value, atoms[1].weight), (0.0, 0.5));
        assert_eq!((atoms[2].value, atoms[2].weight), (2.0, 0.25));
    }

    #[test]
    fn symmetrize_point_mass() {
        let sym = symmetrize(&DiscreteLaw::point_mass(3.25));
        assert_eq!(
            sym.atoms(),
            &[Atom {
                value: 0.0,
                weight: 1.0
            }]
        );
    }

    #[test]
    fn symmetrize_standardized_bernoulli() {
        let law = standardize(&DiscreteLaw::bernoulli(0.25).unwrap()).unwrap();
        let sym = symmetrize(&law);
        let atoms = sym.atoms();
        assert_eq!(atoms.len(), 3);
        let spread = SQRT_3 + 1.0 / SQRT_3;
        assert_relative_eq!(atoms[0].value, -spread, epsilon = 1e-13);
        assert_relative_eq!(atoms[0].weight, 3.0 / 16.0, epsilon = 1e-15);
        assert_relative_eq!(atoms[1].value, 0.0, epsilon = 1e-13);
        assert_relative_eq!(atoms[1].weight, 10.0 / 16.0, epsilon = 1e-15);
        assert_relative_eq!(atoms[2].value, spread, epsilon = 1e-13);
        assert_relative_eq!(atoms[2].weight, 3.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn paley_zygmund_examples() {
        let det = DiscreteLaw::point_mass(1.0);
        assert_eq!(paley_zygmund_check(&det, 1.0).unwrap(), (true, true));

        let law = DiscreteLaw::new(vec![(0.5, 2.0 / 3.0), (2.0, 1.0 / 3.0)]).unwrap();
        assert_eq!(paley_zygmund_check(&law, 2.0).unwrap(), (true, true));

        let law = DiscreteLaw::new(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert_eq!(paley_zygmund_check(&law, 2.0).unwrap(), (true, true));
    }

    #[test]
    fn paley_zygmund_preconditions() {
        let bad_mean = DiscreteLaw::point_mass(2.0);
        assert!(paley_zygmund_check(&bad_mean, 5.0).is_err());

        let law = DiscreteLaw::new(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        // second moment is 2 > 1
        assert!(paley_zygmund_check(&law, 1.0).is_err());
    }

    #[test]
    fn canonicalization_merges_near_duplicates() {
        let law = DiscreteLaw::new(vec![(1.0, 0.25), (1.0 + 4e-13, 0.25), (2.0, 0.5)]).unwrap();
        assert_eq!(law.len(), 2);
        assert_relative_eq!(law.atoms()[0].weight, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn weight_sum_enforced() {
        assert!(matches!(
            DiscreteLaw::new(vec![(0.0, 0.5), (1.0, 0.4)]),
            Err(LawError::WeightSum { .. })
        ));
    }
}
