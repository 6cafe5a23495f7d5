//! Entropy-constrained risk minimization as a two-player zero-sum game.
//!
//! The learner picks hypotheses minimizing the Lagrangian
//! `L(h, lambda) = risk(h) + lambda * (entropy(h) - gamma)`, Nature plays
//! `lambda` from the two-point set `{0, lambda_max}` with multiplicative
//! weights, and the uniform average of the learner's best responses is the
//! randomized output classifier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::accum::Accumulator;
use crate::bounds::entropy_upper_bound;
use crate::entropy::{
    decompose, entropy_from_counts, BenefitParams, BenefitVector, EntropyOrder, GroupPartition,
    OutcomeCounts,
};
use crate::error::{Error, Result};
use crate::fairness::{compute_group_rates, GroupRates, LabeledPredictions};
use crate::learner::{HypothesisSpace, ThresholdHypothesis};

/// How Nature turns its weight pair into a lambda each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LambdaMode {
    /// Sample lambda from `{0, lambda_max}` proportionally to the weights.
    Sampled,
    /// Play the weight-averaged lambda deterministically.
    Expected,
}

/// Solver settings: the entropy budget, the order of the index, the range
/// and accuracy of the game, and the iteration cap.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig {
    /// Upper bound `gamma` demanded of the mixture's entropy.
    pub gamma: f64,
    pub order: EntropyOrder,
    pub lambda_max: f64,
    /// Target equilibrium accuracy `nu`.
    pub nu: f64,
    /// Hard cap on iterations; the theoretical horizon for small `nu` far
    /// exceeds what convergence needs in practice.
    pub t_cap: usize,
    pub seed: u64,
    pub lambda_mode: LambdaMode,
}

impl SolverConfig {
    pub fn new(gamma: f64, order: EntropyOrder) -> Self {
        Self {
            gamma,
            order,
            lambda_max: 20.0,
            nu: 0.005,
            t_cap: 10_000,
            seed: 0,
            lambda_mode: LambdaMode::Sampled,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.gamma.is_nan() || self.gamma <= 0.0 {
            return Err(Error::input(format!(
                "entropy budget must be positive, got {}",
                self.gamma
            )));
        }
        if self.lambda_max.is_nan() || self.lambda_max <= 0.0 || self.nu.is_nan() || self.nu <= 0.0
        {
            return Err(Error::input(
                "lambda_max and nu must be positive".to_string(),
            ));
        }
        if self.t_cap < 1 {
            return Err(Error::input("iteration cap must be at least 1"));
        }
        Ok(())
    }
}

/// Affine rescaling that maps the Lagrangian into `[0, 1]` for every grid
/// hypothesis and every lambda in range: `payoff = (L + offset) / scale`
/// with `scale = 1 + lambda_max (gamma + cap)` and `offset = gamma lambda_max`,
/// where `cap` bounds the index for the benefit ratio in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffScaling {
    pub scale: f64,
    pub offset: f64,
}

impl PayoffScaling {
    pub fn new(config: &SolverConfig, params: &BenefitParams) -> Result<Self> {
        config.validate()?;
        let cap = entropy_upper_bound(config.order, params.ratio())?;
        Ok(Self {
            scale: 1.0 + config.lambda_max * (config.gamma + cap),
            offset: config.gamma * config.lambda_max,
        })
    }

    pub fn rescale(&self, lagrangian_value: f64) -> f64 {
        (lagrangian_value + self.offset) / self.scale
    }
}

/// Nature's multiplicative-weights state, kept in the log domain so the
/// products `(1 + kappa)^(sum of payoffs)` cannot overflow over long runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeState {
    pub log_weight_zero: f64,
    pub log_weight_max: f64,
    pub iteration: usize,
    pub kappa: f64,
    /// Theoretical horizon `4 scale^2 ln 2 / nu^2`.
    pub horizon: f64,
    log_base: f64,
}

impl HedgeState {
    pub fn new(config: &SolverConfig, scaling: &PayoffScaling) -> Self {
        let kappa = config.nu / (2.0 * scaling.scale);
        Self {
            log_weight_zero: 0.0,
            log_weight_max: 0.0,
            iteration: 0,
            kappa,
            horizon: 4.0 * scaling.scale * scaling.scale * std::f64::consts::LN_2
                / (config.nu * config.nu),
            log_base: kappa.ln_1p(),
        }
    }

    /// Probability of playing `lambda_max` this round.
    pub fn prob_max(&self) -> f64 {
        1.0 / (1.0 + (self.log_weight_zero - self.log_weight_max).exp())
    }

    /// Multiply each weight by `(1 + kappa)` raised to its payoff.
    pub fn update(&mut self, payoff_zero: f64, payoff_max: f64) {
        self.log_weight_zero += payoff_zero * self.log_base;
        self.log_weight_max += payoff_max * self.log_base;
        self.iteration += 1;
    }
}

/// The Lagrangian of a single hypothesis at a given lambda.
pub fn lagrangian(
    counts: &OutcomeCounts,
    lambda: f64,
    config: &SolverConfig,
    params: &BenefitParams,
) -> Result<f64> {
    let entropy = entropy_from_counts(counts, params, config.order)?;
    Ok(counts.error_rate() + lambda * (entropy - config.gamma))
}

/// The grid hypothesis minimizing the Lagrangian at `lambda`; ties break
/// toward the smallest threshold index.
pub fn best_response(
    lambda: f64,
    space: &HypothesisSpace,
    config: &SolverConfig,
    params: &BenefitParams,
) -> Result<ThresholdHypothesis> {
    let mut best = 0usize;
    let mut best_value = f64::INFINITY;
    for index in 0..space.len() {
        let value = lagrangian(space.counts(index), lambda, config, params)?;
        if value < best_value {
            best_value = value;
            best = index;
        }
    }
    Ok(space.hypothesis(best))
}

/// A finite mixture over threshold hypotheses, with the average lambda the
/// game settled on.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RandomizedClassifier {
    pub support: Vec<ThresholdHypothesis>,
    pub weights: Vec<f64>,
    pub lambda_bar: f64,
}

impl RandomizedClassifier {
    pub fn new(
        support: Vec<ThresholdHypothesis>,
        weights: Vec<f64>,
        lambda_bar: f64,
    ) -> Result<Self> {
        if support.len() != weights.len() || support.is_empty() {
            return Err(Error::input("mixture support and weights must align"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::input("mixture weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!(
                "mixture weights must sum to 1, got {total}"
            )));
        }
        Ok(Self {
            support,
            weights,
            lambda_bar,
        })
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }
}

/// One iteration of the solve, with the running time averages that the
/// convergence traces plot.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TraceRecord {
    pub lambda_hat: f64,
    pub hypothesis_index: usize,
    pub average_error: f64,
    pub average_entropy: f64,
}

/// Per-iteration record of a full solve.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
}

impl SolveTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Run the game for `min(theoretical horizon, t_cap)` rounds and return the
/// uniform mixture over the learner's choices together with the trace.
/// Deterministic for a fixed (config, space, params) triple.
pub fn hedge_solve(
    space: &HypothesisSpace,
    config: &SolverConfig,
    params: &BenefitParams,
) -> Result<(RandomizedClassifier, SolveTrace)> {
    let scaling = PayoffScaling::new(config, params)?;
    let mut state = HedgeState::new(config, &scaling);
    let rounds = if state.horizon <= config.t_cap as f64 {
        state.horizon.ceil() as usize
    } else {
        config.t_cap
    }
    .max(1);

    // risk and entropy per grid hypothesis, computed once
    let risks: Vec<f64> = space.all_counts().iter().map(|c| c.error_rate()).collect();
    let entropies: Vec<f64> = space
        .all_counts()
        .iter()
        .map(|c| entropy_from_counts(c, params, config.order))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut chosen = vec![0usize; space.len()];
    let mut lambda_sum = Accumulator::new();
    let mut error_sum = Accumulator::new();
    let mut entropy_sum = Accumulator::new();
    let mut records = Vec::with_capacity(rounds);

    for t in 1..=rounds {
        let prob_max = state.prob_max();
        let lambda_hat = match config.lambda_mode {
            LambdaMode::Sampled => {
                if rng.gen::<f64>() < prob_max {
                    config.lambda_max
                } else {
                    0.0
                }
            }
            LambdaMode::Expected => prob_max * config.lambda_max,
        };

        let mut best = 0usize;
        let mut best_value = f64::INFINITY;
        for index in 0..space.len() {
            let value = risks[index] + lambda_hat * (entropies[index] - config.gamma);
            if value < best_value {
                best_value = value;
                best = index;
            }
        }

        let lagrangian_at = |lambda: f64| risks[best] + lambda * (entropies[best] - config.gamma);
        state.update(
            scaling.rescale(lagrangian_at(0.0)),
            scaling.rescale(lagrangian_at(config.lambda_max)),
        );

        chosen[best] += 1;
        lambda_sum.add(lambda_hat);
        error_sum.add(risks[best]);
        entropy_sum.add(entropies[best]);
        records.push(TraceRecord {
            lambda_hat,
            hypothesis_index: best,
            average_error: error_sum.total() / t as f64,
            average_entropy: entropy_sum.total() / t as f64,
        });
    }

    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (index, &count) in chosen.iter().enumerate() {
        if count > 0 {
            support.push(space.hypothesis(index));
            weights.push(count as f64 / rounds as f64);
        }
    }
    // counts sum to the number of rounds, so the weights sum to 1 up to
    // division rounding; renormalize the residue away
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let classifier =
        RandomizedClassifier::new(support, weights, lambda_sum.total() / rounds as f64)?;
    Ok((classifier, SolveTrace { records }))
}

/// Mixture risk: the weight-averaged error rate over the support.
pub fn mixture_risk(d: &RandomizedClassifier, space: &HypothesisSpace) -> f64 {
    let mut acc = Accumulator::new();
    for (h, &w) in d.support.iter().zip(&d.weights) {
        acc.add(w * space.counts(h.index).error_rate());
    }
    acc.total()
}

/// Mixture entropy: the weight-averaged index over the support (the linear
/// functional the constraint is stated in, not the index of pooled benefits).
pub fn mixture_entropy(
    d: &RandomizedClassifier,
    space: &HypothesisSpace,
    params: &BenefitParams,
    order: EntropyOrder,
) -> Result<f64> {
    let mut acc = Accumulator::new();
    for (h, &w) in d.support.iter().zip(&d.weights) {
        acc.add(w * entropy_from_counts(space.counts(h.index), params, order)?);
    }
    Ok(acc.total())
}

/// The Lagrangian of the mixture at a given lambda.
pub fn mixture_lagrangian(
    d: &RandomizedClassifier,
    space: &HypothesisSpace,
    lambda: f64,
    config: &SolverConfig,
    params: &BenefitParams,
) -> Result<f64> {
    Ok(mixture_risk(d, space)
        + lambda * (mixture_entropy(d, space, params, config.order)? - config.gamma))
}

/// How to evaluate the mixture on held-out data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Linear-mixture expectations, the infinite-draw limit.
    Exact,
    /// Average over `draws` pure hypotheses sampled from the mixture, with
    /// normal-approximation 95% confidence half-widths.
    Sampled { draws: usize, seed: u64 },
}

/// Test metrics of a randomized classifier.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MixtureEvaluation {
    pub error: f64,
    pub entropy: f64,
    /// Between-group term of the decomposition, averaged over the mixture.
    pub between: f64,
    /// 95% confidence half-widths; present only for sampled evaluation.
    pub error_ci: Option<f64>,
    pub entropy_ci: Option<f64>,
    pub group_rates: GroupRates,
}

struct HypothesisTestMetrics {
    error: f64,
    entropy: f64,
    between: f64,
    rates: GroupRates,
}

fn metrics_per_hypothesis(
    d: &RandomizedClassifier,
    scores: &[f64],
    labels: &[bool],
    groups: &[usize],
    params: &BenefitParams,
    order: EntropyOrder,
) -> Result<Vec<HypothesisTestMetrics>> {
    let partition = GroupPartition::new(groups.to_vec())?;
    d.support
        .iter()
        .map(|h| {
            let predictions: Vec<bool> = scores.iter().map(|&s| s >= h.threshold).collect();
            let benefits = BenefitVector::from_predictions(&predictions, labels, params)?;
            let counts = crate::learner::evaluate_hypothesis(h, scores, labels);
            let report = decompose(&benefits, &partition, order)?;
            let data =
                LabeledPredictions::new(labels.to_vec(), predictions, groups.to_vec())?;
            Ok(HypothesisTestMetrics {
                error: counts.error_rate(),
                entropy: report.total,
                between: report.between,
                rates: compute_group_rates(&data),
            })
        })
        .collect()
}

fn average_rates(per_h: &[HypothesisTestMetrics], weights: &[f64]) -> GroupRates {
    let group_count = per_h[0].rates.group_count();
    let combine = |select: &dyn Fn(&GroupRates) -> Option<f64>| -> Option<f64> {
        let mut acc = 0.0;
        for (m, &w) in per_h.iter().zip(weights) {
            acc += w * select(&m.rates)?;
        }
        Some(acc)
    };
    let per_group = (0..group_count)
        .map(|g| {
            crate::fairness::GroupRateRow {
                fp_fraction: per_h
                    .iter()
                    .zip(weights)
                    .map(|(m, &w)| w * m.rates.per_group[g].fp_fraction)
                    .sum(),
                fn_fraction: per_h
                    .iter()
                    .zip(weights)
                    .map(|(m, &w)| w * m.rates.per_group[g].fn_fraction)
                    .sum(),
                fp_rate: combine(&|r| r.per_group[g].fp_rate),
                fn_rate: combine(&|r| r.per_group[g].fn_rate),
                base_rate: per_h[0].rates.per_group[g].base_rate,
                size: per_h[0].rates.per_group[g].size,
            }
        })
        .collect();
    GroupRates {
        per_group,
        fp_rate_total: combine(&|r| r.fp_rate_total),
        fn_rate_total: combine(&|r| r.fn_rate_total),
    }
}

/// Evaluate the mixture on a held-out sample. Exact mode computes the linear
/// expectations directly; sampled mode repeatedly draws a pure hypothesis
/// from the mixture and averages, reporting confidence half-widths.
pub fn evaluate_on_test(
    d: &RandomizedClassifier,
    scores: &[f64],
    labels: &[bool],
    groups: &[usize],
    params: &BenefitParams,
    order: EntropyOrder,
    mode: EvalMode,
) -> Result<MixtureEvaluation> {
    if scores.len() != labels.len() || scores.len() != groups.len() {
        return Err(Error::input("scores, labels, and groups must align"));
    }
    if scores.is_empty() {
        return Err(Error::input("test sample must not be empty"));
    }
    let per_h = metrics_per_hypothesis(d, scores, labels, groups, params, order)?;

    match mode {
        EvalMode::Exact => {
            let weighted = |f: &dyn Fn(&HypothesisTestMetrics) -> f64| -> f64 {
                per_h
                    .iter()
                    .zip(&d.weights)
                    .map(|(m, &w)| w * f(m))
                    .sum()
            };
            Ok(MixtureEvaluation {
                error: weighted(&|m| m.error),
                entropy: weighted(&|m| m.entropy),
                between: weighted(&|m| m.between),
                error_ci: None,
                entropy_ci: None,
                group_rates: average_rates(&per_h, &d.weights),
            })
        }
        EvalMode::Sampled { draws, seed } => {
            if draws == 0 {
                return Err(Error::input("need at least one draw"));
            }
            let mut cumulative = Vec::with_capacity(d.weights.len());
            let mut acc = 0.0;
            for &w in &d.weights {
                acc += w;
                cumulative.push(acc);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw_weights = vec![0usize; d.support.len()];
            for _ in 0..draws {
                let u: f64 = rng.gen();
                let idx = cumulative.partition_point(|&c| c < u);
                draw_weights[idx.min(d.support.len() - 1)] += 1;
            }
            let empirical: Vec<f64> = draw_weights
                .iter()
                .map(|&c| c as f64 / draws as f64)
                .collect();
            let mean_and_ci = |f: &dyn Fn(&HypothesisTestMetrics) -> f64| -> (f64, f64) {
                let mean: f64 = per_h
                    .iter()
                    .zip(&empirical)
                    .map(|(m, &w)| w * f(m))
                    .sum();
                let variance: f64 = per_h
                    .iter()
                    .zip(&empirical)
                    .map(|(m, &w)| w * (f(m) - mean).powi(2))
                    .sum();
                (mean, 1.96 * (variance / draws as f64).sqrt())
            };
            let (error, error_ci) = mean_and_ci(&|m| m.error);
            let (entropy, entropy_ci) = mean_and_ci(&|m| m.entropy);
            let (between, _) = mean_and_ci(&|m| m.between);
            Ok(MixtureEvaluation {
                error,
                entropy,
                between,
                error_ci: Some(error_ci),
                entropy_ci: Some(entropy_ci),
                group_rates: average_rates(&per_h, &empirical),
            })
        }
    }
}
