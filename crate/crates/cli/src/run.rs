//! A single train-solve-evaluate run: fit the score model on the training
//! split, build the threshold grid, run the game, and evaluate the mixture
//! on held-out data both exactly and by repeated draws.

use gefair::error::Result;
use gefair::{
    best_response, entropy_from_counts, evaluate_hypothesis, evaluate_on_test, hedge_solve,
    mixture_entropy, mixture_risk, predict_scores, train_logistic, vc_deviation, BenefitParams,
    EvalMode, HypothesisSpace, LambdaMode, LogArgument, LogisticModel, MixtureEvaluation,
    SolveTrace, SolverConfig, Standardizer, TrainConfig,
};

use crate::dataset::{load_dataset, split_indices, DatasetSpec, LoadedDataset};

/// Confidence level used for the recorded deviation bounds.
const BOUND_DELTA: f64 = 0.1;

/// VC dimension of the one-dimensional threshold family the oracle searches.
const THRESHOLD_VC_DIM: usize = 1;

/// Evaluation settings for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    /// Number of mixture draws for the sampled evaluation; 0 skips it and
    /// leaves the sampled fields empty.
    pub draws: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { draws: 10_000 }
    }
}

/// Everything a sweep cell records; also the payload of the per-run JSON.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunRecord {
    pub alpha: f64,
    pub gamma: f64,
    pub benefit_spread: f64,
    pub benefit_offset: f64,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub iterations: usize,
    pub support_size: usize,
    pub lambda_bar: f64,
    /// Threshold and errors of the unconstrained risk minimizer.
    pub erm_threshold: f64,
    pub erm_train_error: f64,
    pub erm_test_error: f64,
    pub erm_test_entropy: f64,
    /// Training-split metrics of the mixture (exact expectations).
    pub train_error: f64,
    pub train_entropy: f64,
    /// Held-out metrics, exact mixture expectations.
    pub test_error_exact: f64,
    pub test_entropy_exact: f64,
    pub test_between_exact: f64,
    /// Held-out metrics averaged over mixture draws, with 95% half-widths.
    pub draws: usize,
    pub test_error_sampled: Option<f64>,
    pub test_error_ci: Option<f64>,
    pub test_entropy_sampled: Option<f64>,
    pub test_entropy_ci: Option<f64>,
    pub test_between_sampled: Option<f64>,
    /// Exact per-group error rates on the test split (first two groups) and
    /// their differences against the population rates.
    pub fp_rate_g0: Option<f64>,
    pub fp_rate_g1: Option<f64>,
    pub fn_rate_g0: Option<f64>,
    pub fn_rate_g1: Option<f64>,
    pub fp_rate_total: Option<f64>,
    pub fn_rate_total: Option<f64>,
    pub fp_rate_diff_g0: Option<f64>,
    pub fp_rate_diff_g1: Option<f64>,
    pub fn_rate_diff_g0: Option<f64>,
    pub fn_rate_diff_g1: Option<f64>,
    /// Deviation coefficient and the resulting bound at the test size.
    pub psi_value: f64,
    pub fairness_dev_bound: f64,
    /// Accuracy-dependent deviation, absent when inapplicable at this size.
    pub psi_tilde_dev_bound: Option<f64>,
}

/// A finished run: the record plus the solve trace and fitted model for
/// export.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub trace: SolveTrace,
    pub model: LogisticModel,
}

/// Load a dataset and run one cell.
pub fn run_single(
    spec: &DatasetSpec,
    config: &SolverConfig,
    params: &BenefitParams,
    eval: &EvalConfig,
) -> Result<RunOutput> {
    let data = load_dataset(spec)?;
    run_on_loaded(&data, spec, config, params, eval)
}

/// Run one cell on an already-loaded dataset (sweeps share the load).
pub fn run_on_loaded(
    data: &LoadedDataset,
    spec: &DatasetSpec,
    config: &SolverConfig,
    params: &BenefitParams,
    eval: &EvalConfig,
) -> Result<RunOutput> {
    let (train_idx, test_idx) = split_indices(data.len(), spec.split_fraction, spec.split_seed);
    let select = |indices: &[usize]| -> (Vec<bool>, Vec<usize>) {
        (
            indices.iter().map(|&i| data.labels[i]).collect(),
            indices.iter().map(|&i| data.groups[i]).collect(),
        )
    };
    let (y_train, _) = select(&train_idx);
    let (y_test, g_test) = select(&test_idx);

    let raw_train = data.features.select(&train_idx);
    let raw_test = data.features.select(&test_idx);
    let standardizer = Standardizer::fit(&raw_train);
    let x_train = standardizer.transform(&raw_train)?;
    let x_test = standardizer.transform(&raw_test)?;

    let model = train_logistic(&x_train, &y_train, &TrainConfig::default())?;
    let train_scores = predict_scores(&model, &x_train)?;
    let test_scores = predict_scores(&model, &x_test)?;
    let space = HypothesisSpace::from_scores(&train_scores, &y_train)?;

    let (mixture, trace) = hedge_solve(&space, config, params)?;

    let erm = best_response(0.0, &space, config, params)?;
    let erm_test_counts = evaluate_hypothesis(&erm, &test_scores, &y_test);

    let exact = evaluate_on_test(
        &mixture,
        &test_scores,
        &y_test,
        &g_test,
        params,
        config.order,
        EvalMode::Exact,
    )?;
    let sampled: Option<MixtureEvaluation> = if eval.draws > 0 {
        Some(evaluate_on_test(
            &mixture,
            &test_scores,
            &y_test,
            &g_test,
            params,
            config.order,
            EvalMode::Sampled {
                draws: eval.draws,
                seed: config.seed.wrapping_add(0x5EED),
            },
        )?)
    } else {
        None
    };

    let train_error = mixture_risk(&mixture, &space);
    let train_entropy = mixture_entropy(&mixture, &space, params, config.order)?;

    let psi_value = gefair::psi(config.order, params);
    let fairness_dev =
        fairness_deviation_bound_checked(config, params, y_test.len())?;
    let psi_tilde_dev = accuracy_dependent_bound(config, params, y_train.len(), train_error);

    let rate = |g: usize, f: &dyn Fn(&gefair::GroupRateRow) -> Option<f64>| -> Option<f64> {
        exact.group_rates.per_group.get(g).and_then(f)
    };
    let fp_g0 = rate(0, &|r| r.fp_rate);
    let fp_g1 = rate(1, &|r| r.fp_rate);
    let fn_g0 = rate(0, &|r| r.fn_rate);
    let fn_g1 = rate(1, &|r| r.fn_rate);
    let diff = |g: Option<f64>, tot: Option<f64>| -> Option<f64> {
        match (g, tot) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        }
    };

    let record = RunRecord {
        alpha: config.order.value(),
        gamma: config.gamma,
        benefit_spread: params.spread(),
        benefit_offset: params.offset(),
        seed: config.seed,
        n_train: y_train.len(),
        n_test: y_test.len(),
        iterations: trace.len(),
        support_size: mixture.support_size(),
        lambda_bar: mixture.lambda_bar,
        erm_threshold: erm.threshold,
        erm_train_error: space.counts(erm.index).error_rate(),
        erm_test_error: erm_test_counts.error_rate(),
        erm_test_entropy: entropy_from_counts(&erm_test_counts, params, config.order)?,
        train_error,
        train_entropy,
        test_error_exact: exact.error,
        test_entropy_exact: exact.entropy,
        test_between_exact: exact.between,
        draws: eval.draws,
        test_error_sampled: sampled.as_ref().map(|s| s.error),
        test_error_ci: sampled.as_ref().and_then(|s| s.error_ci),
        test_entropy_sampled: sampled.as_ref().map(|s| s.entropy),
        test_entropy_ci: sampled.as_ref().and_then(|s| s.entropy_ci),
        test_between_sampled: sampled.as_ref().map(|s| s.between),
        fp_rate_g0: fp_g0,
        fp_rate_g1: fp_g1,
        fn_rate_g0: fn_g0,
        fn_rate_g1: fn_g1,
        fp_rate_total: exact.group_rates.fp_rate_total,
        fn_rate_total: exact.group_rates.fn_rate_total,
        fp_rate_diff_g0: diff(fp_g0, exact.group_rates.fp_rate_total),
        fp_rate_diff_g1: diff(fp_g1, exact.group_rates.fp_rate_total),
        fn_rate_diff_g0: diff(fn_g0, exact.group_rates.fn_rate_total),
        fn_rate_diff_g1: diff(fn_g1, exact.group_rates.fn_rate_total),
        psi_value,
        fairness_dev_bound: fairness_dev,
        psi_tilde_dev_bound: psi_tilde_dev,
    };
    Ok(RunOutput {
        record,
        trace,
        model,
    })
}

fn fairness_deviation_bound_checked(
    config: &SolverConfig,
    params: &BenefitParams,
    n_test: usize,
) -> Result<f64> {
    gefair::fairness_deviation_bound(config.order, params, n_test, BOUND_DELTA)
}

/// The accuracy-dependent bound at the training size, or `None` when its
/// denominator closes at this sample size.
fn accuracy_dependent_bound(
    config: &SolverConfig,
    params: &BenefitParams,
    n_train: usize,
    risk: f64,
) -> Option<f64> {
    let eps2 = vc_deviation(
        n_train,
        THRESHOLD_VC_DIM,
        BOUND_DELTA,
        LogArgument::EightOverDelta,
    )
    .ok()?;
    gefair::psi_tilde(config.order, params, risk, eps2)
        .ok()
        .map(|v| v * eps2)
}

/// Defaulted solver configuration used by the command line.
pub fn solver_config(
    gamma: f64,
    order: gefair::EntropyOrder,
    lambda_max: f64,
    nu: f64,
    t_cap: usize,
    seed: u64,
    lambda_mode: LambdaMode,
) -> SolverConfig {
    SolverConfig {
        gamma,
        order,
        lambda_max,
        nu,
        t_cap,
        seed,
        lambda_mode,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::write_synthetic_csv;
    use gefair::EntropyOrder;

    fn synthetic_spec(dir: &tempfile::TempDir, n: usize) -> DatasetSpec {
        let path = dir.path().join("synt.csv");
        write_synthetic_csv(&path, n, 7).unwrap();
        let mut spec = DatasetSpec::new(&path, "label", "group", "1");
        spec.categorical_columns = vec!["segment".into()];
        spec
    }

    #[test]
    fn loose_budget_tracks_risk_minimizer() {
        let dir = tempfile::tempdir().unwrap();
        let spec = synthetic_spec(&dir, 600);
        let mut config = SolverConfig::new(1.0, EntropyOrder::One);
        config.t_cap = 2000;
        config.nu = 0.05;
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let out = run_single(&spec, &config, &params, &EvalConfig { draws: 2000 }).unwrap();
        let r = &out.record;
        // constraint is slack, so the mixture cannot do meaningfully worse
        assert!(r.train_error <= r.erm_train_error + 2.0 * config.nu);
        // sampled and exact test errors agree within the reported widths
        let gap = (r.test_error_exact - r.test_error_sampled.unwrap()).abs();
        assert!(gap <= 4.0 * (r.test_error_ci.unwrap() / 1.96).max(1e-6), "gap {gap}");
    }

    #[test]
    fn tight_budget_obeys_feasibility_cap() {
        let dir = tempfile::tempdir().unwrap();
        let spec = synthetic_spec(&dir, 600);
        let mut config = SolverConfig::new(0.01, EntropyOrder::One);
        config.t_cap = 5000;
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let out = run_single(&spec, &config, &params, &EvalConfig { draws: 0 }).unwrap();
        let cap = config.gamma + (1.0 + 2.0 * config.nu) / config.lambda_max;
        assert!(
            out.record.train_entropy <= cap,
            "{} > {cap}",
            out.record.train_entropy
        );
        assert!(out.record.test_error_sampled.is_none());
    }

    #[test]
    fn record_carries_group_rate_columns() {
        let dir = tempfile::tempdir().unwrap();
        let spec = synthetic_spec(&dir, 400);
        let config = SolverConfig {
            t_cap: 500,
            ..SolverConfig::new(0.05, EntropyOrder::One)
        };
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let out = run_single(&spec, &config, &params, &EvalConfig { draws: 500 }).unwrap();
        let r = &out.record;
        assert!(r.fp_rate_g0.is_some() && r.fp_rate_g1.is_some());
        assert!(r.fn_rate_total.is_some());
        let diff = r.fp_rate_diff_g0.unwrap();
        assert!((diff - (r.fp_rate_g0.unwrap() - r.fp_rate_total.unwrap())).abs() < 1e-15);
        assert!(r.psi_value > 0.0 && r.fairness_dev_bound > 0.0);
        assert_eq!(out.trace.len(), 500);
    }
}
