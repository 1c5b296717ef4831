//! Multi-Bernoulli posterior with Dirac-located components.
//!
//! Each component holds an existence probability `r` and the location where
//! its target sits if it exists. The number of existing targets follows a
//! Poisson-binomial law, computed here by convolving the per-component
//! `(1 − r, r)` pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicator::{DetectionVector, ExistenceEvent};
use crate::numeric::compensated_sum;
use crate::set_metrics::{BaseDistance, LabeledPoint, TargetSet};

/// One potential target: existence probability and known location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComponent", into = "RawComponent")]
pub struct BernoulliComponent {
    r: f64,
    location: LabeledPoint,
}

#[derive(Serialize, Deserialize)]
struct RawComponent {
    r: f64,
    x: LabeledPoint,
}

impl BernoulliComponent {
    pub fn new(r: f64, location: LabeledPoint) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                reason: "existence probability must lie in [0, 1]",
            });
        }
        Ok(Self { r, location })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn location(&self) -> &LabeledPoint {
        &self.location
    }
}

impl TryFrom<RawComponent> for BernoulliComponent {
    type Error = Error;

    fn try_from(raw: RawComponent) -> Result<Self> {
        Self::new(raw.r, raw.x)
    }
}

impl From<BernoulliComponent> for RawComponent {
    fn from(c: BernoulliComponent) -> Self {
        RawComponent { r: c.r, x: c.location }
    }
}

/// Independent union of Bernoulli components.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMultiBernoulli", into = "RawMultiBernoulli")]
pub struct MultiBernoulli {
    components: Vec<BernoulliComponent>,
}

#[derive(Serialize, Deserialize)]
struct RawMultiBernoulli {
    components: Vec<BernoulliComponent>,
}

impl TryFrom<RawMultiBernoulli> for MultiBernoulli {
    type Error = Error;

    fn try_from(raw: RawMultiBernoulli) -> Result<Self> {
        Self::new(raw.components)
    }
}

impl From<MultiBernoulli> for RawMultiBernoulli {
    fn from(mb: MultiBernoulli) -> Self {
        RawMultiBernoulli {
            components: mb.components,
        }
    }
}

/// Probability mass function of the number of existing targets.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityPmf {
    rho: Vec<f64>,
}

impl CardinalityPmf {
    /// Poisson-binomial pmf of independent Bernoulli trials.
    pub fn from_probabilities<I: IntoIterator<Item = f64>>(probabilities: I) -> Self {
        let mut rho = vec![1.0];
        for r in probabilities {
            let mut next = vec![0.0; rho.len() + 1];
            for (n, &mass) in rho.iter().enumerate() {
                next[n] += mass * (1.0 - r);
                next[n + 1] += mass * r;
            }
            rho = next;
        }
        Self { rho }
    }

    /// `P(cardinality = n)`, zero beyond the support.
    pub fn get(&self, n: usize) -> f64 {
        self.rho.get(n).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.rho
    }

    /// Largest possible cardinality.
    pub fn max_cardinality(&self) -> usize {
        self.rho.len() - 1
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.rho.iter().enumerate().map(|(n, &p)| n as f64 * p))
    }

    /// Most probable cardinality; ties go to the smaller value.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (n, &p) in self.rho.iter().enumerate().skip(1) {
            if p > self.rho[best] {
                best = n;
            }
        }
        best
    }
}

/// Pairs of components closer than the separation threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub c: f64,
    /// `(i, j, distance)` with `i < j` and `distance <= c`.
    pub violations: Vec<(usize, usize, f64)>,
}

impl SeparationReport {
    pub fn is_separated(&self) -> bool {
        self.violations.is_empty()
    }

    /// `Ok` when separated, otherwise the first offending pair as an error.
    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(&(first, second, distance)) => Err(Error::SeparationViolated {
                first,
                second,
                distance,
                c: self.c,
            }),
        }
    }
}

impl MultiBernoulli {
    pub fn new(components: Vec<BernoulliComponent>) -> Result<Self> {
        if let Some(first) = components.first() {
            let dim = first.location.dim();
            if let Some(bad) = components.iter().find(|c| c.location.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bad.location.dim(),
                });
            }
        }
        Ok(Self { components })
    }

    /// Components at one-dimensional locations.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        pairs
            .iter()
            .map(|&(r, x)| BernoulliComponent::new(r, LabeledPoint::scalar(x)?))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }

    /// One-dimensional components placed at `0, spacing, 2·spacing, …`.
    pub fn evenly_spaced(probabilities: &[f64], spacing: f64) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = probabilities
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, i as f64 * spacing))
            .collect();
        Self::from_pairs(&pairs)
    }

    pub fn components(&self) -> &[BernoulliComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn existence_probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.components.iter().map(|c| c.r)
    }

    /// Same locations with component `i`'s existence probability replaced.
    pub fn with_probability(&self, i: usize, r: f64) -> Result<Self> {
        self.check_index(i)?;
        let mut components = self.components.clone();
        components[i] = BernoulliComponent::new(r, components[i].location.clone())?;
        Ok(Self { components })
    }

    /// `∏ᵢ [(1 − rᵢ)(1 − eᵢ) + rᵢ eᵢ]`.
    pub fn event_probability(&self, e: &ExistenceEvent) -> Result<f64> {
        self.check_len(e.len())?;
        Ok(self
            .components
            .iter()
            .zip(e.as_slice())
            .map(|(c, &exists)| if exists { c.r } else { 1.0 - c.r })
            .product())
    }

    /// The set of locations whose components exist in `e`.
    pub fn realize(&self, e: &ExistenceEvent) -> Result<TargetSet> {
        self.check_len(e.len())?;
        TargetSet::new(
            self.components
                .iter()
                .zip(e.as_slice())
                .filter(|(_, &exists)| exists)
                .map(|(c, _)| c.location.clone())
                .collect(),
        )
    }

    /// The estimate set reporting the locations selected by `e_hat`.
    pub fn report(&self, e_hat: &DetectionVector) -> Result<TargetSet> {
        self.realize(&ExistenceEvent::new(e_hat.as_slice().to_vec()))
    }

    pub fn cardinality_distribution(&self) -> CardinalityPmf {
        CardinalityPmf::from_probabilities(self.existence_probabilities())
    }

    /// Cardinality pmf of the model without component `i`, recomputed from
    /// the remaining components.
    pub fn leave_one_out_cardinality(&self, i: usize) -> Result<CardinalityPmf> {
        self.check_index(i)?;
        Ok(CardinalityPmf::from_probabilities(
            self.components
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, c)| c.r),
        ))
    }

    /// Draws every existence flag independently.
    pub fn sample_event<R: Rng + ?Sized>(&self, rng: &mut R) -> ExistenceEvent {
        ExistenceEvent::new(self.components.iter().map(|c| rng.gen::<f64>() < c.r).collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TargetSet {
        let e = self.sample_event(rng);
        self.realize(&e).expect("sampled event has the model's length")
    }

    /// One draw from a generator seeded with `seed`.
    pub fn sample_seeded(&self, seed: u64) -> TargetSet {
        self.sample(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Checks that every pair of locations is strictly further than `c`
    /// apart under the Euclidean distance.
    pub fn validate_separation(&self, c: f64) -> SeparationReport {
        let mut violations = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = BaseDistance::Euclidean.distance(
                    self.components[i].location.coords(),
                    self.components[j].location.coords(),
                );
                if d <= c {
                    violations.push((i, j, d));
                }
            }
        }
        SeparationReport { c, violations }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.len(),
                found: len,
            })
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mb(pairs: &[(f64, f64)]) -> MultiBernoulli {
        MultiBernoulli::from_pairs(pairs).unwrap()
    }

    fn assert_pmf(pmf: &CardinalityPmf, expected: &[f64]) {
        assert_eq!(pmf.as_slice().len(), expected.len());
        for (a, b) in pmf.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", pmf.as_slice(), expected);
        }
    }

    #[test]
    fn event_probability_examples() {
        let m = mb(&[(0.4, 0.0), (0.4, 10.0)]);
        let p = m.event_probability(&ExistenceEvent::zeros(2)).unwrap();
        assert!((p - 0.36).abs() < 1e-15);
        let certain = mb(&[(1.0, 0.0)]);
        assert_eq!(certain.event_probability(&ExistenceEvent::zeros(1)).unwrap(), 0.0);
        let empty = MultiBernoulli::default();
        assert_eq!(empty.event_probability(&ExistenceEvent::zeros(0)).unwrap(), 1.0);
        assert_eq!(
            m.event_probability(&ExistenceEvent::zeros(3)).unwrap_err(),
            Error::LengthMismatch { expected: 2, found: 3 }
        );
    }

    #[test]
    fn realize_examples() {
        let m = mb(&[(0.5, 0.0), (0.5, 10.0)]);
        let one = m.realize(&ExistenceEvent::new(vec![true, false])).unwrap();
        assert_eq!(one, TargetSet::from_scalars(&[0.0]).unwrap());
        assert!(m.realize(&ExistenceEvent::zeros(2)).unwrap().is_empty());
        assert_eq!(
            m.realize(&ExistenceEvent::ones(2)).unwrap(),
            TargetSet::from_scalars(&[0.0, 10.0]).unwrap()
        );
        assert!(m.realize(&ExistenceEvent::ones(1)).is_err());
    }

    #[test]
    fn cardinality_examples() {
        assert_pmf(
            &mb(&[(0.4, 0.0), (0.4, 10.0)]).cardinality_distribution(),
            &[0.36, 0.48, 0.16],
        );
        assert_pmf(&mb(&[(1.0, 0.0)]).cardinality_distribution(), &[0.0, 1.0]);
        assert_pmf(&MultiBernoulli::default().cardinality_distribution(), &[1.0]);
    }

    #[test]
    fn leave_one_out_examples() {
        let m = mb(&[(0.4, 0.0), (0.9, 10.0)]);
        assert_pmf(&m.leave_one_out_cardinality(0).unwrap(), &[0.1, 0.9]);
        let m = mb(&[(0.4, 0.0), (0.4, 10.0)]);
        assert_pmf(&m.leave_one_out_cardinality(1).unwrap(), &[0.6, 0.4]);
        assert_eq!(
            m.leave_one_out_cardinality(2).unwrap_err(),
            Error::IndexOutOfRange { index: 2, len: 2 }
        );
    }

    #[test]
    fn leave_one_out_identical_r_is_index_free() {
        let m = MultiBernoulli::evenly_spaced(&[0.3; 6], 10.0).unwrap();
        let first = m.leave_one_out_cardinality(0).unwrap();
        for i in 1..6 {
            assert_eq!(m.leave_one_out_cardinality(i).unwrap(), first);
        }
    }

    #[test]
    fn degenerate_samples() {
        let never = mb(&[(0.0, 0.0), (0.0, 10.0)]);
        let always = mb(&[(1.0, 0.0), (1.0, 10.0)]);
        for seed in 0..50 {
            assert!(never.sample_seeded(seed).is_empty());
            assert_eq!(always.sample_seeded(seed).len(), 2);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let m = MultiBernoulli::evenly_spaced(&[0.5; 8], 10.0).unwrap();
        assert_eq!(m.sample_seeded(17), m.sample_seeded(17));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a: Vec<_> = (0..20).map(|_| m.sample(&mut rng)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b: Vec<_> = (0..20).map(|_| m.sample(&mut rng)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn half_probability_nonempty_fraction() {
        let m = mb(&[(0.5, 0.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let hits = (0..n).filter(|_| !m.sample(&mut rng).is_empty()).count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 3.0 * (0.25f64 / n as f64).sqrt(), "{frac}");
    }

    #[test]
    fn sampled_cardinality_histogram_matches_pmf() {
        let m = MultiBernoulli::evenly_spaced(&[0.1, 0.45, 0.7, 0.95, 0.3], 10.0).unwrap();
        let pmf = m.cardinality_distribution();
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let n = 100_000usize;
        let mut counts = vec![0usize; m.len() + 1];
        for _ in 0..n {
            counts[m.sample_event(&mut rng).count()] += 1;
        }
        for (k, &count) in counts.iter().enumerate() {
            let p = pmf.get(k);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let freq = count as f64 / n as f64;
            assert!((freq - p).abs() <= 4.0 * se + 1e-12, "bin {k}: {freq} vs {p}");
        }
    }

    #[test]
    fn separation_examples() {
        assert!(mb(&[(0.5, 0.0), (0.5, 10.0)]).validate_separation(1.0).is_separated());
        let close = mb(&[(0.5, 0.0), (0.5, 0.5)]).validate_separation(1.0);
        assert!(!close.is_separated());
        assert_eq!(close.violations, vec![(0, 1, 0.5)]);
        assert!(matches!(
            close.into_result(),
            Err(Error::SeparationViolated {
                first: 0,
                second: 1,
                ..
            })
        ));
        assert!(mb(&[(0.5, 0.0)]).validate_separation(1.0).is_separated());
        // exactly c apart is not strictly further
        assert!(!mb(&[(0.5, 0.0), (0.5, 1.0)]).validate_separation(1.0).is_separated());
    }

    #[test]
    fn invalid_probability_rejected() {
        assert!(MultiBernoulli::from_pairs(&[(1.5, 0.0)]).is_err());
        assert!(MultiBernoulli::from_pairs(&[(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn json_round_trip_shape() {
        let text = r#"{"components": [{"r": 0.4, "x": [0.0]}, {"r": 0.9, "x": [10.0]}]}"#;
        let m: MultiBernoulli = serde_json::from_str(text).unwrap();
        assert_eq!(m, mb(&[(0.4, 0.0), (0.9, 10.0)]));
        let back = serde_json::to_string(&m).unwrap();
        assert_eq!(back, r#"{"components":[{"r":0.4,"x":[0.0]},{"r":0.9,"x":[10.0]}]}"#);
        assert!(serde_json::from_str::<MultiBernoulli>(r#"{"components": [{"r": 2.0, "x": [0.0]}]}"#).is_err());
    }

    fn enumerate_events(m: &MultiBernoulli) -> impl Iterator<Item = (ExistenceEvent, f64)> + '_ {
        (0..1u64 << m.len()).map(move |mask| {
            let e = ExistenceEvent::from_mask(m.len(), mask);
            let p = m.event_probability(&e).unwrap();
            (e, p)
        })
    }

    proptest! {
        #[test]
        fn events_sum_to_one(rs in prop::collection::vec(0.0f64..=1.0, 0..=12)) {
            let m = MultiBernoulli::evenly_spaced(&rs, 10.0).unwrap();
            let total = compensated_sum(enumerate_events(&m).map(|(_, p)| p));
            prop_assert!((total - 1.0).abs() < 1e-10);
        }

        #[test]
        fn pmf_matches_event_histogram(rs in prop::collection::vec(0.0f64..=1.0, 0..=10)) {
            let m = MultiBernoulli::evenly_spaced(&rs, 10.0).unwrap();
            let mut hist = vec![0.0; rs.len() + 1];
            for (e, p) in enumerate_events(&m) {
                hist[e.count()] += p;
            }
            let pmf = m.cardinality_distribution();
            for (n, h) in hist.iter().enumerate() {
                prop_assert!((pmf.get(n) - h).abs() < 1e-10);
            }
            prop_assert!((pmf.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!((pmf.mean() - rs.iter().sum::<f64>()).abs() < 1e-10);
        }
    }
}
