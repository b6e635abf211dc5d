//! Output types shared by the closed-form binomial chain and the
//! finite-model engine: predictive distributions over an outcome space and
//! two-term moment decompositions.

use crate::error::{Error, Result};
use crate::numerics::{CompensatedSum, LogProb};

/// How a predictive distribution was formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionKind {
    /// Models weighted by their prior probabilities.
    PriorPredictive,
    /// Models weighted by their posterior probabilities given observed data.
    PosteriorPredictive,
    /// A single best model stands in for the whole posterior.
    Abductive,
}

impl std::fmt::Display for PredictionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PredictionKind::PriorPredictive => "prior-predictive",
            PredictionKind::PosteriorPredictive => "posterior-predictive",
            PredictionKind::Abductive => "abductive",
        };
        f.write_str(s)
    }
}

/// Probability mass over a future outcome space, kept in log scale.
///
/// The outcome list covers the declared outcome space exactly once, in a
/// fixed order; downstream comparisons rely on that order.
#[derive(Debug, Clone)]
pub struct PredictiveDistribution<T> {
    kind: PredictionKind,
    outcomes: Vec<(T, LogProb)>,
}

impl<T> PredictiveDistribution<T> {
    pub fn new(kind: PredictionKind, outcomes: Vec<(T, LogProb)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptyLogSumExp);
        }
        Ok(PredictiveDistribution { kind, outcomes })
    }

    pub fn kind(&self) -> PredictionKind {
        self.kind
    }

    pub fn outcomes(&self) -> &[(T, LogProb)] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Linear-scale probabilities in outcome order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.outcomes.iter().map(|(_, lp)| lp.linear()).collect()
    }

    /// Total linear mass, compensated; 1 within tolerance when the outcome
    /// space is exhaustive.
    pub fn total_mass(&self) -> f64 {
        let mut sum = CompensatedSum::default();
        for (_, lp) in &self.outcomes {
            sum.add(lp.linear());
        }
        sum.value()
    }

    /// Mean and variance of `value(outcome)` under this distribution, by
    /// direct summation in outcome order.
    pub fn mean_variance_by(&self, value: impl Fn(&T) -> f64) -> (f64, f64) {
        let mut mean = CompensatedSum::default();
        for (x, lp) in &self.outcomes {
            mean.add(lp.linear() * value(x));
        }
        let mean = mean.value();
        let mut var = CompensatedSum::default();
        for (x, lp) in &self.outcomes {
            let d = value(x) - mean;
            var.add(lp.linear() * d * d);
        }
        (mean, var.value())
    }
}

impl<T: PartialEq> PredictiveDistribution<T> {
    /// Linear probability of one outcome, if it is in the space.
    pub fn probability_of(&self, outcome: &T) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|(x, _)| x == outcome)
            .map(|(_, lp)| lp.linear())
    }

    /// Total-variation distance ½ Σ |p − q| over a shared outcome space.
    pub fn total_variation_distance(&self, other: &Self) -> Result<f64> {
        if self.outcomes.len() != other.outcomes.len() {
            return Err(Error::MismatchedOutcomes);
        }
        let mut sum = CompensatedSum::default();
        for ((xa, pa), (xb, pb)) in self.outcomes.iter().zip(&other.outcomes) {
            if xa != xb {
                return Err(Error::MismatchedOutcomes);
            }
            sum.add((pa.linear() - pb.linear()).abs());
        }
        Ok(0.5 * sum.value())
    }
}

/// Mean and variance of a prediction, with the variance split into its
/// within-model and between-model terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
    pub within_model_variance: f64,
    pub between_model_variance: f64,
}

impl MomentPair {
    /// Build from the two variance terms; the total is their sum.
    pub fn from_split(mean: f64, within: f64, between: f64) -> Self {
        MomentPair {
            mean,
            variance: within + between,
            within_model_variance: within,
            between_model_variance: between,
        }
    }

    /// Moments under a single known model: no between-model spread.
    pub fn known_model(mean: f64, variance: f64) -> Self {
        MomentPair::from_split(mean, variance, 0.0)
    }

    pub fn standard_deviation(&self) -> f64 {
        self.variance.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(kind: PredictionKind, probs: &[(u64, f64)]) -> PredictiveDistribution<u64> {
        let outcomes = probs
            .iter()
            .map(|&(x, p)| (x, LogProb::from_linear(p).unwrap()))
            .collect();
        PredictiveDistribution::new(kind, outcomes).unwrap()
    }

    #[test]
    fn empty_outcome_space_is_rejected() {
        assert!(PredictiveDistribution::<u64>::new(PredictionKind::Abductive, vec![]).is_err());
    }

    #[test]
    fn total_mass_and_lookup() {
        let d = dist(PredictionKind::PosteriorPredictive, &[(0, 0.25), (1, 0.75)]);
        assert!((d.total_mass() - 1.0).abs() < 1e-15);
        assert_eq!(d.probability_of(&1), Some(0.75));
        assert_eq!(d.probability_of(&2), None);
    }

    #[test]
    fn tv_distance_matches_hand_value() {
        let a = dist(PredictionKind::PosteriorPredictive, &[(0, 0.4), (1, 0.6)]);
        let b = dist(PredictionKind::Abductive, &[(0, 0.1), (1, 0.9)]);
        let tv = a.total_variation_distance(&b).unwrap();
        assert!((tv - 0.3).abs() < 1e-15);
    }

    #[test]
    fn tv_distance_requires_matching_outcomes() {
        let a = dist(PredictionKind::Abductive, &[(0, 1.0)]);
        let b = dist(PredictionKind::Abductive, &[(1, 1.0)]);
        assert!(a.total_variation_distance(&b).is_err());
    }

    #[test]
    fn direct_moments_of_a_bernoulli() {
        let d = dist(PredictionKind::PosteriorPredictive, &[(0, 0.7), (1, 0.3)]);
        let (mean, var) = d.mean_variance_by(|&x| x as f64);
        assert!((mean - 0.3).abs() < 1e-15);
        assert!((var - 0.21).abs() < 1e-15);
    }

    #[test]
    fn moment_pair_split_sums_exactly() {
        let m = MomentPair::from_split(0.06, 5.528e-4, 5.584e-4);
        assert_eq!(
            m.variance,
            m.within_model_variance + m.between_model_variance
        );
    }
}
