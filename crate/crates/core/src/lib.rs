//! Measuring algorithmic unfairness with the generalized entropy index and
//! learning under an entropy constraint.
//!
//! The crate covers four layers:
//!
//! * [`entropy`]: the index itself, benefit conversion, between/within-group
//!   decomposition, and exact evaluation on finite-support distributions;
//! * [`fairness`]: per-group error statistics and the equal-prediction /
//!   equal-error / equal-benefit / equalized-odds predicates;
//! * [`bounds`]: closed-form deviation bounds relating sample-level and
//!   population-level values of the index;
//! * [`learner`] and [`solver`]: a logistic score model with a 201-point
//!   threshold grid, and the Hedge game that minimizes empirical risk subject
//!   to an entropy budget, returning a randomized classifier.
//!
//! All metric and bound routines are pure functions and safe to call from
//! any number of threads.

mod accum;
pub mod bounds;
pub mod entropy;
pub mod error;
pub mod fairness;
pub mod learner;
pub mod solver;

pub use bounds::{
    entropy_upper_bound, fairness_deviation_bound, psi, psi_corollary, psi_tilde, vc_deviation,
    BoundInputs, LogArgument,
};
pub use entropy::{
    apply_transfer, benefit_of, decompose, decompose_distribution, entropy_from_counts,
    entropy_index, eval_f_alpha, population_entropy_exact, BenefitParams, BenefitVector,
    DecompositionReport, EntropyOrder, FiniteDistribution, GroupPartition, OutcomeCounts,
    SupportPoint,
};
pub use error::{Error, Result};
pub use fairness::{
    check_predicates, compute_group_rates, verify_equivalence_under_equal_base_rates,
    FairnessPredicateReport, GroupRateRow, GroupRates, LabeledPredictions,
};
pub use learner::{
    evaluate_hypothesis, predict_scores, train_logistic, FeatureMatrix, HypothesisSpace,
    LogisticModel, Standardizer, ThresholdHypothesis, TrainConfig, THRESHOLD_GRID_SIZE,
};
pub use solver::{
    best_response, evaluate_on_test, hedge_solve, lagrangian, mixture_entropy, mixture_lagrangian,
    mixture_risk, EvalMode, HedgeState, LambdaMode, MixtureEvaluation, PayoffScaling,
    RandomizedClassifier, SolveTrace, SolverConfig, TraceRecord,
};
