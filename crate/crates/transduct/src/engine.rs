//! Generic engine over finite, explicit model spaces: induction (posterior
//! over models), prior/posterior predictive distributions, plug-in
//! (abductive) prediction with a fixed MAP tie-break, and the two-term
//! moment decomposition. Continuous parameters enter only through grids.

use crate::binomial::PriorSample;
use crate::error::{Error, Result};
use crate::numerics::{ln_choose, log_sum_exp, CompensatedSum, LogProb};
use crate::predictive::{MomentPair, PredictionKind, PredictiveDistribution};

/// A likelihood family. A model is defined entirely by what it predicts,
/// so the family is a likelihood function over (parameters, datum).
///
/// Batch conditioning assumes exchangeability: data are conditionally
/// independent given the model. That property is asserted when a family is
/// constructed, not checked at runtime — it cannot be verified from a
/// finite likelihood table.
pub trait Family {
    type Params;
    type Datum: Clone;

    fn log_likelihood(&self, params: &Self::Params, datum: &Self::Datum) -> LogProb;

    /// Joint log likelihood of an exchangeable data batch.
    fn batch_log_likelihood(&self, params: &Self::Params, data: &[Self::Datum]) -> LogProb {
        data.iter().map(|d| self.log_likelihood(params, d)).sum()
    }
}

/// Families whose per-model predictive mean and variance are known
/// functions of the parameters.
pub trait MomentFamily: Family {
    fn predictive_mean(&self, params: &Self::Params) -> f64;
    fn predictive_variance(&self, params: &Self::Params) -> f64;
}

/// One candidate model: an opaque label, its parameters, and its weight.
#[derive(Debug, Clone)]
pub struct Model<P> {
    pub id: String,
    pub params: P,
    log_weight: LogProb,
}

impl<P> Model<P> {
    /// Normalized log prior (or posterior, after conditioning).
    pub fn log_weight(&self) -> LogProb {
        self.log_weight
    }
}

/// A finite weighted set of candidate models over one likelihood family.
///
/// The listed models are treated as mutually exclusive and exhaustive: the
/// engine never reasons about models outside the list. Order is fixed at
/// construction; MAP tie-breaking and output determinism depend on it.
#[derive(Debug, Clone)]
pub struct ModelSpace<F: Family> {
    family: F,
    models: Vec<Model<F::Params>>,
}

impl<F: Family> ModelSpace<F> {
    /// Build a space from (id, params, unnormalized log weight) triples.
    /// Weights are normalized here, so a uniform rescaling of all
    /// likelihood or prior values never changes any result.
    pub fn new(family: F, models: Vec<(String, F::Params, LogProb)>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::EmptyModelSpace);
        }
        let weights: Vec<LogProb> = models.iter().map(|(_, _, w)| *w).collect();
        let total = log_sum_exp(&weights)?;
        if total.is_zero() {
            return Err(Error::ZeroPriorMass);
        }
        let models = models
            .into_iter()
            .map(|(id, params, w)| Model {
                id,
                params,
                log_weight: shift(w, total),
            })
            .collect();
        Ok(ModelSpace { family, models })
    }

    pub fn family(&self) -> &F {
        &self.family
    }

    pub fn models(&self) -> &[Model<F::Params>] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Normalized weights of the models, in model order.
    pub fn log_weights(&self) -> Vec<LogProb> {
        self.models.iter().map(|m| m.log_weight).collect()
    }

    /// Normalized posterior weights given an observed batch. An empty
    /// batch returns the current weights unchanged.
    fn log_posterior_weights(&self, data: &[F::Datum]) -> Result<Vec<LogProb>> {
        if data.is_empty() {
            return Ok(self.log_weights());
        }
        let joint: Vec<LogProb> = self
            .models
            .iter()
            .map(|m| m.log_weight + self.family.batch_log_likelihood(&m.params, data))
            .collect();
        let total = log_sum_exp(&joint)?;
        if total.is_zero() {
            return Err(Error::ImpossibleData);
        }
        Ok(joint.into_iter().map(|w| shift(w, total)).collect())
    }

    /// Bayes' rule over the model list: a new space whose weights are the
    /// normalized posteriors, model order preserved.
    pub fn posterior(&self, data: &[F::Datum]) -> Result<Self>
    where
        F: Clone,
        F::Params: Clone,
    {
        let weights = self.log_posterior_weights(data)?;
        Ok(ModelSpace {
            family: self.family.clone(),
            models: self
                .models
                .iter()
                .zip(weights)
                .map(|(m, w)| Model {
                    id: m.id.clone(),
                    params: m.params.clone(),
                    log_weight: w,
                })
                .collect(),
        })
    }

    /// p(x) = Σ_θ p(x|θ) p(θ): every model's prediction, weighted by its
    /// current weight.
    pub fn prior_predictive(
        &self,
        outcome_space: &[F::Datum],
    ) -> Result<PredictiveDistribution<F::Datum>> {
        let weights = self.log_weights();
        self.weighted_mixture(&weights, outcome_space, PredictionKind::PriorPredictive)
    }

    /// p(x_new | x_old) = Σ_θ p(x_new|θ) p(θ|x_old), computed by
    /// conditioning first and then mixing.
    pub fn posterior_predictive(
        &self,
        data: &[F::Datum],
        outcome_space: &[F::Datum],
    ) -> Result<PredictiveDistribution<F::Datum>> {
        let weights = self.log_posterior_weights(data)?;
        let kind = if data.is_empty() {
            PredictionKind::PriorPredictive
        } else {
            PredictionKind::PosteriorPredictive
        };
        self.weighted_mixture(&weights, outcome_space, kind)
    }

    /// The same distribution computed as a joint ratio:
    /// Σ p(x_new, x_old|θ) p(θ) over Σ p(x_old|θ) p(θ). Kept as a second,
    /// independent route; tests hold the two within 1e-12 of each other.
    pub fn posterior_predictive_joint(
        &self,
        data: &[F::Datum],
        outcome_space: &[F::Datum],
    ) -> Result<PredictiveDistribution<F::Datum>> {
        let joint_old: Vec<LogProb> = self
            .models
            .iter()
            .map(|m| m.log_weight + self.family.batch_log_likelihood(&m.params, data))
            .collect();
        let evidence = log_sum_exp(&joint_old)?;
        if evidence.is_zero() {
            return Err(Error::ImpossibleData);
        }
        let mut per_outcome = Vec::with_capacity(outcome_space.len());
        let mut terms = vec![LogProb::ZERO; self.models.len()];
        for outcome in outcome_space {
            for ((term, m), old) in terms.iter_mut().zip(&self.models).zip(&joint_old) {
                *term = *old + self.family.log_likelihood(&m.params, outcome);
            }
            let joint = log_sum_exp(&terms)?;
            per_outcome.push((outcome.clone(), shift(joint, evidence)));
        }
        PredictiveDistribution::new(PredictionKind::PosteriorPredictive, per_outcome)
    }

    /// Plug-in prediction: the MAP model alone stands in for the whole
    /// posterior. Exact ties go to the earliest model in construction
    /// order, reported through [`MapChoice::tied_with`].
    pub fn abductive_predictive(
        &self,
        data: &[F::Datum],
        outcome_space: &[F::Datum],
    ) -> Result<(PredictiveDistribution<F::Datum>, MapChoice)> {
        let weights = self.log_posterior_weights(data)?;
        let mut best = 0;
        for (i, w) in weights.iter().enumerate() {
            if w.value() > weights[best].value() {
                best = i;
            }
        }
        let tied_with: Vec<usize> = weights
            .iter()
            .enumerate()
            .filter(|&(i, w)| i != best && w.value() == weights[best].value())
            .map(|(i, _)| i)
            .collect();
        let model = &self.models[best];
        let outcomes = outcome_space
            .iter()
            .map(|o| (o.clone(), self.family.log_likelihood(&model.params, o)))
            .collect();
        let dist = PredictiveDistribution::new(PredictionKind::Abductive, outcomes)?;
        Ok((
            dist,
            MapChoice {
                index: best,
                id: model.id.clone(),
                log_posterior: weights[best],
                tied_with,
            },
        ))
    }

    fn weighted_mixture(
        &self,
        weights: &[LogProb],
        outcome_space: &[F::Datum],
        kind: PredictionKind,
    ) -> Result<PredictiveDistribution<F::Datum>> {
        let mut per_outcome = Vec::with_capacity(outcome_space.len());
        let mut terms = vec![LogProb::ZERO; self.models.len()];
        for outcome in outcome_space {
            for ((term, m), w) in terms.iter_mut().zip(&self.models).zip(weights) {
                *term = *w + self.family.log_likelihood(&m.params, outcome);
            }
            per_outcome.push((outcome.clone(), log_sum_exp(&terms)?));
        }
        PredictiveDistribution::new(kind, per_outcome)
    }
}

impl<F: MomentFamily> ModelSpace<F> {
    /// Total predictive moments: mean = E(E(x|θ)), and the law-of-total-
    /// variance split V = E(V(x|θ)) + V(E(x|θ)), both terms reported.
    pub fn predictive_moments(&self, data: &[F::Datum]) -> Result<MomentPair> {
        let weights = self.log_posterior_weights(data)?;
        let linear: Vec<f64> = weights.iter().map(|w| w.linear()).collect();
        let mut mean = CompensatedSum::default();
        for (w, m) in linear.iter().zip(&self.models) {
            mean.add(w * self.family.predictive_mean(&m.params));
        }
        let mean = mean.value();
        let mut within = CompensatedSum::default();
        let mut between = CompensatedSum::default();
        for (w, m) in linear.iter().zip(&self.models) {
            within.add(w * self.family.predictive_variance(&m.params));
            let d = self.family.predictive_mean(&m.params) - mean;
            between.add(w * d * d);
        }
        Ok(MomentPair::from_split(
            mean,
            within.value(),
            between.value(),
        ))
    }
}

/// Which model the plug-in route selected, and whether the choice was a tie.
#[derive(Debug, Clone)]
pub struct MapChoice {
    pub index: usize,
    pub id: String,
    pub log_posterior: LogProb,
    /// Indices whose posterior exactly equals the winner's; empty when the
    /// maximum is unique.
    pub tied_with: Vec<usize>,
}

fn shift(w: LogProb, total: LogProb) -> LogProb {
    LogProb::new(w.value() - total.value()).expect("finite normalizer")
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// Tabulated family: each model is an explicit pmf row over a shared,
/// ordered outcome list (addressed by index). `outcome_values` supply the
/// numeric value of each outcome for moment computations.
#[derive(Debug, Clone)]
pub struct TabulatedFamily {
    outcome_values: Vec<f64>,
}

impl TabulatedFamily {
    pub fn new(outcome_values: Vec<f64>) -> Self {
        TabulatedFamily { outcome_values }
    }

    /// 0..k, the full outcome space in declaration order.
    pub fn outcome_indices(&self) -> Vec<usize> {
        (0..self.outcome_values.len()).collect()
    }

    pub fn outcome_values(&self) -> &[f64] {
        &self.outcome_values
    }
}

impl Family for TabulatedFamily {
    type Params = Vec<LogProb>;
    type Datum = usize;

    fn log_likelihood(&self, row: &Vec<LogProb>, datum: &usize) -> LogProb {
        row.get(*datum).copied().unwrap_or(LogProb::ZERO)
    }
}

impl MomentFamily for TabulatedFamily {
    fn predictive_mean(&self, row: &Vec<LogProb>) -> f64 {
        let mut mean = CompensatedSum::default();
        for (lp, x) in row.iter().zip(&self.outcome_values) {
            mean.add(lp.linear() * x);
        }
        mean.value()
    }

    fn predictive_variance(&self, row: &Vec<LogProb>) -> f64 {
        let mean = self.predictive_mean(row);
        let mut var = CompensatedSum::default();
        for (lp, x) in row.iter().zip(&self.outcome_values) {
            let d = x - mean;
            var.add(lp.linear() * d * d);
        }
        var.value()
    }
}

/// Binomial likelihood over a grid of defect proportions; outcomes are
/// defect counts out of a fixed future sample of `trials`.
#[derive(Debug, Clone)]
pub struct ProportionGridFamily {
    trials: u64,
    // ln C(trials, r), cached once; the grid loop touches it a lot
    ln_coeffs: Vec<f64>,
}

impl ProportionGridFamily {
    pub fn new(trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::ZeroTrials);
        }
        let ln_coeffs = (0..=trials)
            .map(|r| ln_choose(trials, r))
            .collect::<Result<_>>()?;
        Ok(ProportionGridFamily { trials, ln_coeffs })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// 0..=trials, the full count outcome space.
    pub fn outcome_counts(&self) -> Vec<u64> {
        (0..=self.trials).collect()
    }
}

impl Family for ProportionGridFamily {
    type Params = f64;
    type Datum = u64;

    fn log_likelihood(&self, p: &f64, r: &u64) -> LogProb {
        if *r > self.trials {
            return LogProb::ZERO;
        }
        let ln = self.ln_coeffs[*r as usize]
            + *r as f64 * p.ln()
            + (self.trials - r) as f64 * (-p).ln_1p();
        LogProb::new(ln).expect("finite for p in (0,1)")
    }
}

impl MomentFamily for ProportionGridFamily {
    /// Moments of the future proportion r/trials given p.
    fn predictive_mean(&self, p: &f64) -> f64 {
        *p
    }

    fn predictive_variance(&self, p: &f64) -> f64 {
        p * (1.0 - p) / self.trials as f64
    }
}

/// Midpoint grid over the defect proportion with a caller-supplied
/// unnormalized log weight at each p.
pub fn proportion_grid_space(
    trials: u64,
    points: usize,
    log_weight: impl Fn(f64) -> f64,
) -> Result<ModelSpace<ProportionGridFamily>> {
    if points == 0 {
        return Err(Error::GridDomain {
            axis: "proportion",
            reason: "needs at least one grid point".into(),
        });
    }
    let family = ProportionGridFamily::new(trials)?;
    let h = 1.0 / points as f64;
    let models = (0..points)
        .map(|i| {
            let p = (i as f64 + 0.5) * h;
            Ok((format!("p={p:.8}"), p, LogProb::new(log_weight(p))?))
        })
        .collect::<Result<Vec<_>>>()?;
    ModelSpace::new(family, models)
}

/// Grid weight shaped like the beta posterior of a prior sample:
/// p^(r0−1) (1−p)^(n0−r0−1), unnormalized.
pub fn beta_shaped_log_weight(prior: &PriorSample) -> impl Fn(f64) -> f64 {
    let a = prior.r0();
    let b = prior.n0() - prior.r0();
    move |p: f64| (a - 1.0) * p.ln() + (b - 1.0) * (-p).ln_1p()
}

/// Location and spread of a normal process; the two parameters are
/// themselves the first two moments of the likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams {
    mean: f64,
    variance: f64,
}

impl NormalParams {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() || !variance.is_finite() || variance <= 0.0 {
            return Err(Error::GridDomain {
                axis: "variance",
                reason: format!(
                    "normal parameters need finite mean and variance > 0, got ({mean}, {variance})"
                ),
            });
        }
        Ok(NormalParams { mean, variance })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    fn log_density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (2.0 * std::f64::consts::PI * self.variance).ln() - d * d / (2.0 * self.variance)
    }
}

/// Independent normal process family over real-valued data.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalGridFamily;

impl Family for NormalGridFamily {
    type Params = NormalParams;
    type Datum = f64;

    fn log_likelihood(&self, params: &NormalParams, x: &f64) -> LogProb {
        LogProb::new(params.log_density(*x)).expect("finite normal log density")
    }
}

impl MomentFamily for NormalGridFamily {
    fn predictive_mean(&self, params: &NormalParams) -> f64 {
        params.mean()
    }

    fn predictive_variance(&self, params: &NormalParams) -> f64 {
        params.variance()
    }
}

fn grid_axis(
    axis: &'static str,
    range: (f64, f64),
    points: usize,
    strictly_positive: bool,
) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    let fail = |reason: String| Error::GridDomain { axis, reason };
    if !lo.is_finite() || !hi.is_finite() {
        return Err(fail(format!("bounds must be finite, got ({lo}, {hi})")));
    }
    if lo > hi {
        return Err(fail(format!("lower bound {lo} exceeds upper bound {hi}")));
    }
    if strictly_positive && lo <= 0.0 {
        return Err(fail(format!(
            "must be strictly positive, got lower bound {lo}"
        )));
    }
    match points {
        0 => Err(fail("needs at least one grid point".into())),
        1 => Ok(vec![0.5 * (lo + hi)]),
        _ if lo == hi => Err(fail(format!(
            "degenerate range ({lo}, {hi}) supports only a single point"
        ))),
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            Ok((0..points).map(|i| lo + i as f64 * step).collect())
        }
    }
}

/// Product grid over (mean, variance) with a caller-supplied unnormalized
/// log weight; a 1-point axis collapses to the midpoint of its range.
pub fn normal_grid_space(
    mean_range: (f64, f64),
    variance_range: (f64, f64),
    mean_points: usize,
    variance_points: usize,
    log_weight: impl Fn(&NormalParams) -> f64,
) -> Result<ModelSpace<NormalGridFamily>> {
    let means = grid_axis("mean", mean_range, mean_points, false)?;
    let variances = grid_axis("variance", variance_range, variance_points, true)?;
    let mut models = Vec::with_capacity(means.len() * variances.len());
    for &m in &means {
        for &v in &variances {
            let params = NormalParams::new(m, v)?;
            models.push((
                format!("mean={m:.8},var={v:.8}"),
                params,
                LogProb::new(log_weight(&params))?,
            ));
        }
    }
    ModelSpace::new(NormalGridFamily, models)
}

impl ModelSpace<NormalGridFamily> {
    /// Log density of the weighted normal mixture at x.
    pub fn mixture_log_density(&self, x: f64) -> Result<LogProb> {
        let terms: Vec<LogProb> = self
            .models
            .iter()
            .map(|m| m.log_weight + self.family.log_likelihood(&m.params, &x))
            .collect();
        log_sum_exp(&terms)
    }

    /// Excess kurtosis of the weighted normal mixture, from its exact
    /// central moments. Strictly positive for any non-degenerate posterior
    /// over the grid — the mixture is never normal.
    pub fn mixture_excess_kurtosis(&self) -> f64 {
        let weights: Vec<f64> = self.models.iter().map(|m| m.log_weight.linear()).collect();
        let mut mean = CompensatedSum::default();
        for (w, m) in weights.iter().zip(&self.models) {
            mean.add(w * m.params.mean());
        }
        let mean = mean.value();
        let mut m2 = CompensatedSum::default();
        let mut m4 = CompensatedSum::default();
        for (w, m) in weights.iter().zip(&self.models) {
            let d = m.params.mean() - mean;
            let v = m.params.variance();
            m2.add(w * (v + d * d));
            m4.add(w * (3.0 * v * v + 6.0 * v * d * d + d.powi(4)));
        }
        m4.value() / (m2.value() * m2.value()) - 3.0
    }
}

/// Normal core plus a flat outlier component on a fixed support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureParams {
    normal: NormalParams,
    outlier_prob: f64,
    outlier_support: (f64, f64),
}

impl MixtureParams {
    pub fn new(
        normal: NormalParams,
        outlier_prob: f64,
        outlier_support: (f64, f64),
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&outlier_prob) {
            return Err(Error::MixtureDomain(format!(
                "outlier probability must lie in [0, 1), got {outlier_prob}"
            )));
        }
        let (lo, hi) = outlier_support;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::MixtureDomain(format!(
                "outlier support must be a finite interval with lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(MixtureParams {
            normal,
            outlier_prob,
            outlier_support,
        })
    }

    pub fn normal(&self) -> &NormalParams {
        &self.normal
    }

    pub fn outlier_prob(&self) -> f64 {
        self.outlier_prob
    }

    pub fn outlier_support(&self) -> (f64, f64) {
        self.outlier_support
    }
}

/// ln[(1−q)·N(x; mean, var) + q·Flat(x; lo, hi)].
pub fn mixture_outlier_log_likelihood(datum: f64, params: &MixtureParams) -> LogProb {
    let q = params.outlier_prob;
    let normal_term = LogProb::new((1.0 - q).ln() + params.normal.log_density(datum))
        .expect("finite normal log density");
    let (lo, hi) = params.outlier_support;
    let flat_term = if q > 0.0 && datum >= lo && datum <= hi {
        LogProb::new(q.ln() - (hi - lo).ln()).expect("finite flat log density")
    } else {
        LogProb::ZERO
    };
    log_sum_exp(&[normal_term, flat_term]).expect("two terms")
}

/// Normal-plus-flat mixture family over real-valued data.
#[derive(Debug, Clone, Copy, Default)]
pub struct OutlierMixtureFamily;

impl Family for OutlierMixtureFamily {
    type Params = MixtureParams;
    type Datum = f64;

    fn log_likelihood(&self, params: &MixtureParams, x: &f64) -> LogProb {
        mixture_outlier_log_likelihood(*x, params)
    }
}

impl MomentFamily for OutlierMixtureFamily {
    fn predictive_mean(&self, params: &MixtureParams) -> f64 {
        let q = params.outlier_prob;
        let (lo, hi) = params.outlier_support;
        (1.0 - q) * params.normal.mean() + q * 0.5 * (lo + hi)
    }

    fn predictive_variance(&self, params: &MixtureParams) -> f64 {
        let q = params.outlier_prob;
        let (lo, hi) = params.outlier_support;
        let center = 0.5 * (lo + hi);
        let width = hi - lo;
        let normal = params.normal;
        let second = (1.0 - q) * (normal.variance() + normal.mean() * normal.mean())
            + q * (center * center + width * width / 12.0);
        let mean = self.predictive_mean(params);
        second - mean * mean
    }
}

/// Product grid over the normal core of the outlier mixture, with fixed
/// outlier probability and support.
pub fn outlier_mixture_grid_space(
    mean_range: (f64, f64),
    variance_range: (f64, f64),
    mean_points: usize,
    variance_points: usize,
    outlier_prob: f64,
    outlier_support: (f64, f64),
    log_weight: impl Fn(&MixtureParams) -> f64,
) -> Result<ModelSpace<OutlierMixtureFamily>> {
    let means = grid_axis("mean", mean_range, mean_points, false)?;
    let variances = grid_axis("variance", variance_range, variance_points, true)?;
    let mut models = Vec::with_capacity(means.len() * variances.len());
    for &m in &means {
        for &v in &variances {
            let params =
                MixtureParams::new(NormalParams::new(m, v)?, outlier_prob, outlier_support)?;
            models.push((
                format!("mean={m:.8},var={v:.8}"),
                params,
                LogProb::new(log_weight(&params))?,
            ));
        }
    }
    ModelSpace::new(OutlierMixtureFamily, models)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(p: f64) -> LogProb {
        LogProb::from_linear(p).unwrap()
    }

    /// Two models over outcomes {signal, no-signal}: the first predicts a
    /// signal with probability 0.2, the second with 0.9.
    fn two_site_space() -> ModelSpace<TabulatedFamily> {
        let family = TabulatedFamily::new(vec![1.0, 0.0]);
        ModelSpace::new(
            family,
            vec![
                ("site-a".into(), vec![lp(0.2), lp(0.8)], lp(0.7)),
                ("site-b".into(), vec![lp(0.9), lp(0.1)], lp(0.3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_empty_and_zero_mass() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        assert!(matches!(
            ModelSpace::new(family.clone(), vec![]),
            Err(Error::EmptyModelSpace)
        ));
        assert!(matches!(
            ModelSpace::new(
                family,
                vec![("a".into(), vec![lp(0.5), lp(0.5)], LogProb::ZERO)]
            ),
            Err(Error::ZeroPriorMass)
        ));
    }

    #[test]
    fn weights_normalize_at_construction() {
        let space = two_site_space();
        let total: f64 = space.log_weights().iter().map(|w| w.linear()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn posterior_hand_arithmetic() {
        let space = two_site_space();
        let post = space.posterior(&[0]).unwrap();
        let w = post.log_weights();
        assert!((w[0].linear() - 0.14 / 0.41).abs() < 1e-12);
        assert!((w[1].linear() - 0.27 / 0.41).abs() < 1e-12);
        assert_eq!(post.models()[0].id, "site-a");
    }

    #[test]
    fn posterior_is_prior_under_symmetric_likelihoods() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let row = vec![lp(0.4), lp(0.6)];
        let space = ModelSpace::new(
            family,
            vec![
                ("a".into(), row.clone(), lp(0.5)),
                ("b".into(), row, lp(0.5)),
            ],
        )
        .unwrap();
        let post = space.posterior(&[1, 0, 1]).unwrap();
        for (before, after) in space.log_weights().iter().zip(post.log_weights()) {
            assert!((before.linear() - after.linear()).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_prior_is_absorbing() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let space = ModelSpace::new(
            family,
            vec![
                ("dead".into(), vec![lp(0.99), lp(0.01)], LogProb::ZERO),
                ("live".into(), vec![lp(0.5), lp(0.5)], lp(1.0)),
            ],
        )
        .unwrap();
        let post = space.posterior(&[0, 0, 0]).unwrap();
        assert!(post.log_weights()[0].is_zero());
        assert!((post.log_weights()[1].linear() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn impossible_data_is_reported() {
        let family = TabulatedFamily::new(vec![0.0, 1.0, 2.0]);
        let space = ModelSpace::new(
            family,
            vec![
                ("a".into(), vec![lp(0.5), lp(0.5), LogProb::ZERO], lp(0.5)),
                ("b".into(), vec![lp(0.9), lp(0.1), LogProb::ZERO], lp(0.5)),
            ],
        )
        .unwrap();
        assert!(matches!(space.posterior(&[2]), Err(Error::ImpossibleData)));
    }

    #[test]
    fn prior_predictive_of_single_model_is_its_likelihood() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let row = vec![lp(0.3), lp(0.7)];
        let space = ModelSpace::new(family, vec![("only".into(), row.clone(), lp(1.0))]).unwrap();
        let pred = space.prior_predictive(&[0, 1]).unwrap();
        for ((_, got), want) in pred.outcomes().iter().zip(row) {
            assert_eq!(got.value(), want.value());
        }
    }

    #[test]
    fn two_fair_coins_average_to_half() {
        let family = TabulatedFamily::new(vec![1.0, 0.0]);
        let space = ModelSpace::new(
            family,
            vec![
                ("p=0.2".into(), vec![lp(0.2), lp(0.8)], lp(0.5)),
                ("p=0.8".into(), vec![lp(0.8), lp(0.2)], lp(0.5)),
            ],
        )
        .unwrap();
        let pred = space.prior_predictive(&[0, 1]).unwrap();
        assert!((pred.probability_of(&0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn posterior_predictive_hand_arithmetic() {
        let space = two_site_space();
        let pred = space.posterior_predictive(&[0], &[0, 1]).unwrap();
        let p_signal = pred.probability_of(&0).unwrap();
        assert!((p_signal - 0.660976).abs() < 1e-6);
        assert_eq!(pred.kind(), PredictionKind::PosteriorPredictive);
    }

    #[test]
    fn empty_batch_reduces_to_prior_predictive_exactly() {
        let space = two_site_space();
        let prior = space.prior_predictive(&[0, 1]).unwrap();
        let post = space.posterior_predictive(&[], &[0, 1]).unwrap();
        assert_eq!(post.kind(), PredictionKind::PriorPredictive);
        for ((_, a), (_, b)) in prior.outcomes().iter().zip(post.outcomes()) {
            assert_eq!(a.value(), b.value());
        }
    }

    #[test]
    fn joint_route_matches_two_step_route() {
        let space = two_site_space();
        let a = space.posterior_predictive(&[0, 1, 0], &[0, 1]).unwrap();
        let b = space
            .posterior_predictive_joint(&[0, 1, 0], &[0, 1])
            .unwrap();
        for ((_, x), (_, y)) in a.outcomes().iter().zip(b.outcomes()) {
            assert!((x.value() - y.value()).abs() < 1e-12);
        }
    }

    #[test]
    fn abductive_uses_the_map_model_alone() {
        let space = two_site_space();
        let (pred, choice) = space.abductive_predictive(&[0], &[0, 1]).unwrap();
        assert_eq!(choice.index, 1);
        assert_eq!(choice.id, "site-b");
        assert!(choice.tied_with.is_empty());
        assert!((pred.probability_of(&0).unwrap() - 0.9).abs() < 1e-14);
        assert_eq!(pred.kind(), PredictionKind::Abductive);
    }

    #[test]
    fn abductive_equals_transductive_on_concentrated_posterior() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let space = ModelSpace::new(
            family,
            vec![
                ("sure".into(), vec![lp(0.25), lp(0.75)], lp(1.0)),
                ("impossible".into(), vec![lp(0.5), lp(0.5)], LogProb::ZERO),
            ],
        )
        .unwrap();
        let trans = space.posterior_predictive(&[1], &[0, 1]).unwrap();
        let (abd, choice) = space.abductive_predictive(&[1], &[0, 1]).unwrap();
        assert_eq!(choice.index, 0);
        for ((_, t), (_, a)) in trans.outcomes().iter().zip(abd.outcomes()) {
            assert_eq!(t.value(), a.value());
        }
    }

    #[test]
    fn exact_tie_selects_the_earlier_model() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let row = vec![lp(0.5), lp(0.5)];
        let space = ModelSpace::new(
            family,
            vec![
                ("first".into(), row.clone(), lp(0.5)),
                ("second".into(), row, lp(0.5)),
            ],
        )
        .unwrap();
        let (_, choice) = space.abductive_predictive(&[0, 1], &[0, 1]).unwrap();
        assert_eq!(choice.index, 0);
        assert_eq!(choice.id, "first");
        assert_eq!(choice.tied_with, vec![1]);
    }

    #[test]
    fn posterior_invariant_under_uniform_likelihood_scaling() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let scale = 3.7f64;
        let rows = [vec![lp(0.2), lp(0.8)], vec![lp(0.6), lp(0.4)]];
        let scaled: Vec<Vec<LogProb>> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|l| LogProb::new(l.value() + scale).unwrap())
                    .collect()
            })
            .collect();
        let base = ModelSpace::new(
            family.clone(),
            vec![
                ("a".into(), rows[0].clone(), lp(0.35)),
                ("b".into(), rows[1].clone(), lp(0.65)),
            ],
        )
        .unwrap();
        let rescaled = ModelSpace::new(
            family,
            vec![
                ("a".into(), scaled[0].clone(), lp(0.35)),
                ("b".into(), scaled[1].clone(), lp(0.65)),
            ],
        )
        .unwrap();
        let wa = base.posterior(&[0, 1, 1]).unwrap();
        let wb = rescaled.posterior(&[0, 1, 1]).unwrap();
        for (x, y) in wa.log_weights().iter().zip(wb.log_weights()) {
            assert!((x.linear() - y.linear()).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_of_a_single_model_have_no_between_term() {
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let space = ModelSpace::new(
            family,
            vec![("only".into(), vec![lp(0.3), lp(0.7)], lp(1.0))],
        )
        .unwrap();
        let m = space.predictive_moments(&[]).unwrap();
        assert!((m.mean - 0.7).abs() < 1e-14);
        assert!((m.within_model_variance - 0.21).abs() < 1e-14);
        assert_eq!(m.between_model_variance, 0.0);
    }

    #[test]
    fn symmetric_two_point_case_is_all_between_model() {
        // two deterministic models predicting 0 and 1
        let family = TabulatedFamily::new(vec![0.0, 1.0]);
        let space = ModelSpace::new(
            family,
            vec![
                ("zero".into(), vec![LogProb::ONE, LogProb::ZERO], lp(0.5)),
                ("one".into(), vec![LogProb::ZERO, LogProb::ONE], lp(0.5)),
            ],
        )
        .unwrap();
        let m = space.predictive_moments(&[]).unwrap();
        assert!((m.mean - 0.5).abs() < 1e-14);
        assert!((m.variance - 0.25).abs() < 1e-14);
        assert_eq!(m.within_model_variance, 0.0);
    }

    #[test]
    fn grid_moments_match_closed_form() {
        let prior = PriorSample::new(6, 100).unwrap();
        let space = proportion_grid_space(100, 4000, beta_shaped_log_weight(&prior)).unwrap();
        let grid = space.predictive_moments(&[]).unwrap();
        let closed = crate::binomial::beta_binomial_moments(100, &prior).unwrap();
        assert!((grid.mean - closed.mean).abs() < 1e-4);
        assert!((grid.variance - closed.variance).abs() < 1e-4);
    }

    #[test]
    fn grid_predictive_matches_beta_binomial() {
        let prior = PriorSample::new(6, 100).unwrap();
        let space = proportion_grid_space(100, 4000, beta_shaped_log_weight(&prior)).unwrap();
        let outcomes = space.family().outcome_counts();
        let pred = space.prior_predictive(&outcomes).unwrap();
        for (r, lpb) in pred.outcomes() {
            let closed = crate::binomial::beta_binomial_log_pmf(*r, 100, &prior)
                .unwrap()
                .linear();
            assert!(
                (lpb.linear() - closed).abs() < 1e-4,
                "r={r}: grid {} vs closed {closed}",
                lpb.linear()
            );
        }
    }

    #[test]
    fn law_of_total_variance_against_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for round in 0..100 {
            let n_outcomes = rng.gen_range(2..8usize);
            let n_models = rng.gen_range(1..6usize);
            let values: Vec<f64> = (0..n_outcomes).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let family = TabulatedFamily::new(values.clone());
            let models: Vec<(String, Vec<LogProb>, LogProb)> = (0..n_models)
                .map(|i| {
                    let raw: Vec<f64> = (0..n_outcomes).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let total: f64 = raw.iter().sum();
                    let row = raw.iter().map(|x| lp(x / total)).collect();
                    (format!("m{i}"), row, lp(rng.gen_range(0.05..1.0)))
                })
                .collect();
            let space = ModelSpace::new(family, models).unwrap();
            let engine = space.predictive_moments(&[]).unwrap();

            let outcomes = space.family().outcome_indices();
            let mixture = space.prior_predictive(&outcomes).unwrap();
            let (bf_mean, bf_var) = mixture.mean_variance_by(|&i| values[i]);
            assert!(
                (engine.mean - bf_mean).abs() <= 1e-10 * bf_mean.abs().max(1e-3),
                "round {round}: mean {} vs {}",
                engine.mean,
                bf_mean
            );
            assert!(
                ((engine.variance - bf_var) / bf_var).abs() <= 1e-10,
                "round {round}: var {} vs {}",
                engine.variance,
                bf_var
            );
        }
    }

    #[test]
    fn degenerate_normal_grid_is_the_known_model() {
        let space = normal_grid_space((5.0, 5.0), (2.0, 2.0), 1, 1, |_| 0.0).unwrap();
        let m = space.predictive_moments(&[]).unwrap();
        assert_eq!(m.mean, 5.0);
        assert_eq!(m.variance, 2.0);
        assert_eq!(m.between_model_variance, 0.0);
    }

    #[test]
    fn grid_axis_validation() {
        assert!(normal_grid_space((0.0, 1.0), (1.0, 0.5), 3, 3, |_| 0.0).is_err());
        assert!(normal_grid_space((0.0, 1.0), (0.0, 1.0), 3, 3, |_| 0.0).is_err());
        assert!(normal_grid_space((f64::INFINITY, 1.0), (0.1, 1.0), 3, 3, |_| 0.0).is_err());
        assert!(normal_grid_space((0.0, 0.0), (0.1, 1.0), 3, 3, |_| 0.0).is_err());
        assert!(normal_grid_space((0.0, 1.0), (0.1, 1.0), 0, 3, |_| 0.0).is_err());
    }

    #[test]
    fn normal_grid_posterior_moment_identities() {
        let space = normal_grid_space((-2.0, 8.0), (0.5, 6.0), 21, 21, |_| 0.0).unwrap();
        let data = [4.9, 5.3, 5.1, 4.7, 5.6];
        let post = space.posterior(&data).unwrap();
        let m = post.predictive_moments(&[]).unwrap();

        // independent recomputation of E(mean | post) and the variance split
        let mut e_mean = 0.0;
        let mut e_var = 0.0;
        for model in post.models() {
            let w = model.log_weight().linear();
            e_mean += w * model.params.mean();
            e_var += w * model.params.variance();
        }
        let mut v_mean = 0.0;
        for model in post.models() {
            let w = model.log_weight().linear();
            v_mean += w * (model.params.mean() - e_mean).powi(2);
        }
        assert!((m.mean - e_mean).abs() < 1e-10);
        assert!((m.within_model_variance - e_var).abs() < 1e-10);
        assert!((m.between_model_variance - v_mean).abs() < 1e-10);
        assert!((m.variance - (e_var + v_mean)).abs() < 1e-10);
    }

    #[test]
    fn normal_grid_variance_against_mixture_quadrature() {
        let space = normal_grid_space((0.0, 10.0), (0.5, 4.0), 15, 15, |_| 0.0).unwrap();
        let data = [4.9, 5.3, 5.1];
        let post = space.posterior(&data).unwrap();
        let m = post.predictive_moments(&[]).unwrap();

        // E(x²) − E(x)² from the mixture density, by midpoint quadrature
        let (lo, hi, cells) = (-20.0, 30.0, 200_000);
        let h = (hi - lo) / cells as f64;
        let mut mass = CompensatedSum::default();
        let mut first = CompensatedSum::default();
        let mut second = CompensatedSum::default();
        for i in 0..cells {
            let x = lo + (i as f64 + 0.5) * h;
            let d = post.mixture_log_density(x).unwrap().linear();
            mass.add(d * h);
            first.add(x * d * h);
            second.add(x * x * d * h);
        }
        assert!((mass.value() - 1.0).abs() < 1e-8);
        let var = second.value() - first.value() * first.value();
        assert!(
            (m.variance - var).abs() < 1e-6,
            "engine {} vs quadrature {var}",
            m.variance
        );
    }

    #[test]
    fn normal_grid_posterior_has_positive_excess_kurtosis() {
        let space = normal_grid_space((-2.0, 8.0), (0.5, 6.0), 21, 21, |_| 0.0).unwrap();
        let data = [4.9, 5.3, 5.1, 4.7, 5.6];
        let post = space.posterior(&data).unwrap();
        let kurt = post.mixture_excess_kurtosis();
        assert!(kurt > 0.0, "excess kurtosis {kurt}");
    }

    #[test]
    fn mixture_likelihood_degenerate_cases() {
        let normal = NormalParams::new(0.0, 1.0).unwrap();
        // q = 0: exactly the normal log density
        let pure = MixtureParams::new(normal, 0.0, (-10.0, 10.0)).unwrap();
        let got = mixture_outlier_log_likelihood(0.7, &pure).value();
        assert_eq!(got, normal.log_density(0.7));
        // far outside the support: only the normal term survives
        let half = MixtureParams::new(normal, 0.5, (-10.0, 10.0)).unwrap();
        let far = mixture_outlier_log_likelihood(25.0, &half).value();
        assert_eq!(far, 0.5f64.ln() + normal.log_density(25.0));
    }

    #[test]
    fn mixture_likelihood_direct_density() {
        let normal = NormalParams::new(0.0, 1.0).unwrap();
        let params = MixtureParams::new(normal, 0.1, (-10.0, 10.0)).unwrap();
        let got = mixture_outlier_log_likelihood(0.0, &params).linear();
        let expected = 0.9 / (2.0 * std::f64::consts::PI).sqrt() + 0.1 * 0.05;
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn mixture_params_validation() {
        let normal = NormalParams::new(0.0, 1.0).unwrap();
        assert!(MixtureParams::new(normal, 1.0, (-1.0, 1.0)).is_err());
        assert!(MixtureParams::new(normal, -0.1, (-1.0, 1.0)).is_err());
        assert!(MixtureParams::new(normal, 0.1, (1.0, 1.0)).is_err());
        assert!(NormalParams::new(0.0, 0.0).is_err());
        assert!(NormalParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn outlier_mixture_grid_moments_match_tabulated_mixture() {
        let space =
            outlier_mixture_grid_space((0.0, 4.0), (0.5, 2.0), 5, 5, 0.05, (-50.0, 50.0), |_| 0.0)
                .unwrap();
        let data = [1.9, 2.2, 2.0, 40.0];
        let post = space.posterior(&data).unwrap();
        let m = post.predictive_moments(&[]).unwrap();
        assert!(m.variance > 0.0);
        assert!((m.variance - (m.within_model_variance + m.between_model_variance)).abs() < 1e-15);
    }

    #[test]
    fn abduction_approaches_transduction_with_prior_sample_size() {
        let mut previous = f64::INFINITY;
        for n0 in [100u64, 1_000, 10_000, 100_000] {
            let r0 = (n0 as f64 * 0.06).round() as u64;
            let prior = PriorSample::new(r0, n0).unwrap();
            let space = proportion_grid_space(100, 2000, beta_shaped_log_weight(&prior)).unwrap();
            let outcomes = space.family().outcome_counts();
            let trans = space.prior_predictive(&outcomes).unwrap();
            let (abd, _) = space.abductive_predictive(&[], &outcomes).unwrap();
            let tv = trans.total_variation_distance(&abd).unwrap();
            assert!(
                tv < previous,
                "n0={n0}: tv {tv} did not decrease from {previous}"
            );
            previous = tv;
        }
    }

    mod properties {
        use super::{lp, TabulatedFamily};
        use crate::engine::ModelSpace;
        use crate::numerics::LogProb;
        use proptest::prelude::*;

        fn arb_space_and_data() -> impl Strategy<Value = (ModelSpace<TabulatedFamily>, Vec<usize>)>
        {
            (2usize..6, 1usize..5).prop_flat_map(|(n_outcomes, n_models)| {
                let rows = proptest::collection::vec(
                    proptest::collection::vec(0.01f64..1.0, n_outcomes),
                    n_models,
                );
                let priors = proptest::collection::vec(0.01f64..1.0, n_models);
                let data = proptest::collection::vec(0..n_outcomes, 1..6);
                (rows, priors, data).prop_map(move |(rows, priors, data)| {
                    let family = TabulatedFamily::new((0..n_outcomes).map(|i| i as f64).collect());
                    let models = rows
                        .into_iter()
                        .zip(priors)
                        .enumerate()
                        .map(|(i, (raw, prior))| {
                            let total: f64 = raw.iter().sum();
                            let row: Vec<LogProb> = raw.iter().map(|x| lp(x / total)).collect();
                            (format!("m{i}"), row, lp(prior))
                        })
                        .collect();
                    (ModelSpace::new(family, models).unwrap(), data)
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(50))]

            #[test]
            fn two_route_equality((space, data) in arb_space_and_data()) {
                let outcomes = space.family().outcome_indices();
                let two_step = space.posterior_predictive(&data, &outcomes).unwrap();
                let joint = space.posterior_predictive_joint(&data, &outcomes).unwrap();
                for ((_, a), (_, b)) in two_step.outcomes().iter().zip(joint.outcomes()) {
                    prop_assert!((a.value() - b.value()).abs() < 1e-12);
                }
            }

            #[test]
            fn posterior_weights_normalize((space, data) in arb_space_and_data()) {
                let post = space.posterior(&data).unwrap();
                let total: f64 = post.log_weights().iter().map(|w| w.linear()).sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
            }

            #[test]
            fn predictive_normalizes_over_exhaustive_outcomes(
                (space, data) in arb_space_and_data()
            ) {
                let outcomes = space.family().outcome_indices();
                let pred = space.posterior_predictive(&data, &outcomes).unwrap();
                prop_assert!((pred.total_mass() - 1.0).abs() < 1e-10);
            }
        }
    }
}
