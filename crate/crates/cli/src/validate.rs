//! Monte-Carlo validation of the deviation bounds: resample a fixed
//! finite-support population, compare the sample index against the exact one,
//! and count how often the deviation exceeds the bound. The bound claims the
//! violation frequency stays below the confidence parameter; in practice it
//! is loose and violations are rare to nonexistent.

use gefair::error::Result;
use gefair::{
    entropy_index, fairness_deviation_bound, population_entropy_exact, psi_tilde, vc_deviation,
    BenefitParams, BenefitVector, EntropyOrder, FiniteDistribution, LogArgument, SupportPoint,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Settings of one validation experiment.
#[derive(Debug, Clone)]
pub struct BoundValidationConfig {
    pub distribution: FiniteDistribution,
    pub params: BenefitParams,
    pub alphas: Vec<f64>,
    /// Size of each resample.
    pub sample_size: usize,
    /// Number of resamples.
    pub resamples: usize,
    pub delta: f64,
    /// VC dimension used for the accuracy-dependent epsilon.
    pub vc_dim: usize,
    pub seed: u64,
}

impl BoundValidationConfig {
    /// The default experiment: a 20-point two-group population induced by a
    /// fixed hypothesis with benefits from the given parameters, roughly 10%
    /// error mass split between false positives and false negatives.
    pub fn standard(params: BenefitParams) -> Self {
        Self {
            distribution: standard_distribution(&params),
            params,
            alphas: vec![0.0, 1.0, 2.0],
            sample_size: 1000,
            resamples: 500,
            delta: 0.1,
            vc_dim: 1,
            seed: 2024,
        }
    }
}

/// Fixed 20-point population over the three benefit levels of `params`,
/// split across two groups with slightly different error mass.
pub fn standard_distribution(params: &BenefitParams) -> FiniteDistribution {
    let (a, c) = (params.spread(), params.offset());
    let mut points = Vec::with_capacity(20);
    // group 0: 6 correct atoms, one FP atom, one FN atom
    for i in 0..6 {
        points.push(SupportPoint { benefit: c, mass: 0.088 - 0.002 * i as f64, group: 0 });
    }
    points.push(SupportPoint { benefit: c + a, mass: 0.03, group: 0 });
    points.push(SupportPoint { benefit: c - a, mass: 0.025, group: 0 });
    // group 1: 10 correct atoms, one FP atom, one FN atom
    for i in 0..10 {
        points.push(SupportPoint { benefit: c, mass: 0.0357 - 0.001 * i as f64, group: 1 });
    }
    points.push(SupportPoint { benefit: c + a, mass: 0.02, group: 1 });
    points.push(SupportPoint { benefit: c - a, mass: 0.027, group: 1 });
    let total: f64 = points.iter().map(|p| p.mass).sum();
    for p in &mut points {
        p.mass /= total;
    }
    FiniteDistribution::new(points).expect("masses normalized")
}

/// Outcome of the validation for one order of the index.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlphaValidation {
    pub alpha: f64,
    pub exact_entropy: f64,
    pub deviation_bound: f64,
    pub resamples: usize,
    pub violations: usize,
    pub violation_frequency: f64,
    pub max_observed_deviation: f64,
    /// Resamples where the accuracy-dependent bound applied, and how often
    /// it was violated there.
    pub tighter_bound_applicable: usize,
    pub tighter_bound_violations: usize,
}

/// Full validation report.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundValidationReport {
    pub delta: f64,
    pub sample_size: usize,
    pub per_alpha: Vec<AlphaValidation>,
}

impl BoundValidationReport {
    /// True when every order stayed within the promised violation frequency.
    pub fn all_within_confidence(&self) -> bool {
        self.per_alpha
            .iter()
            .all(|a| a.violation_frequency <= self.delta)
    }
}

/// Run the resampling experiment.
pub fn validate_bounds(config: &BoundValidationConfig) -> Result<BoundValidationReport> {
    let eps2 = vc_deviation(
        config.sample_size,
        config.vc_dim,
        config.delta,
        LogArgument::EightOverDelta,
    )?;
    let correct_benefit = config.params.offset();

    let mut per_alpha = Vec::with_capacity(config.alphas.len());
    for &alpha in &config.alphas {
        let order = EntropyOrder::new(alpha)?;
        let exact = population_entropy_exact(&config.distribution, order)?;
        let bound =
            fairness_deviation_bound(order, &config.params, config.sample_size, config.delta)?;

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(alpha.to_bits()));
        let mut violations = 0usize;
        let mut max_dev = 0.0f64;
        let mut tighter_applicable = 0usize;
        let mut tighter_violations = 0usize;
        for _ in 0..config.resamples {
            let draws = config.distribution.sample(&mut rng, config.sample_size);
            let empirical = entropy_index(&BenefitVector::new(draws.clone())?, order)?;
            let deviation = (exact - empirical).abs();
            max_dev = max_dev.max(deviation);
            if deviation > bound {
                violations += 1;
            }
            // empirical risk of the fixed hypothesis = share of error benefits
            let risk = draws
                .iter()
                .filter(|&&b| b != correct_benefit)
                .count() as f64
                / config.sample_size as f64;
            if let Ok(coeff) = psi_tilde(order, &config.params, risk, eps2) {
                tighter_applicable += 1;
                if deviation > coeff * eps2 {
                    tighter_violations += 1;
                }
            }
        }
        per_alpha.push(AlphaValidation {
            alpha,
            exact_entropy: exact,
            deviation_bound: bound,
            resamples: config.resamples,
            violations,
            violation_frequency: violations as f64 / config.resamples as f64,
            max_observed_deviation: max_dev,
            tighter_bound_applicable: tighter_applicable,
            tighter_bound_violations: tighter_violations,
        });
    }
    Ok(BoundValidationReport {
        delta: config.delta,
        sample_size: config.sample_size,
        per_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_experiment_stays_within_confidence() {
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let mut config = BoundValidationConfig::standard(params);
        config.resamples = 120; // module-scale smoke; the acceptance suite runs 500
        let report = validate_bounds(&config).unwrap();
        assert!(report.all_within_confidence());
        for a in &report.per_alpha {
            assert!(a.exact_entropy > 0.0);
            assert!(a.max_observed_deviation < a.deviation_bound);
            assert_eq!(a.tighter_bound_applicable, config.resamples);
        }
    }

    #[test]
    fn constant_population_never_deviates() {
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let dist = FiniteDistribution::from_masses(vec![(8.0, 0.6), (8.0, 0.4)]).unwrap();
        let config = BoundValidationConfig {
            distribution: dist,
            resamples: 50,
            ..BoundValidationConfig::standard(params)
        };
        let report = validate_bounds(&config).unwrap();
        for a in &report.per_alpha {
            assert_eq!(a.exact_entropy, 0.0);
            assert_eq!(a.violations, 0);
            assert_eq!(a.max_observed_deviation, 0.0);
        }
    }

    #[test]
    fn higher_order_bound_is_larger_here() {
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let report = validate_bounds(&BoundValidationConfig {
            resamples: 10,
            ..BoundValidationConfig::standard(params)
        })
        .unwrap();
        let bound_of = |alpha: f64| {
            report
                .per_alpha
                .iter()
                .find(|a| a.alpha == alpha)
                .unwrap()
                .deviation_bound
        };
        assert!(bound_of(2.0) > bound_of(0.0));
    }
}
