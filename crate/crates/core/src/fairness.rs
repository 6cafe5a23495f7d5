//! Group-level error statistics and fairness predicates.
//!
//! Two families of per-group statistics are distinguished throughout:
//! *fractions* condition only on group membership (what share of the group
//! received a false positive), while *rates* additionally condition on the
//! true label (what share of the group's negatives were predicted positive).
//! They are linked by `fraction_fp = rate_fp * (1 - base_rate)`.

use crate::entropy::{benefit_of, BenefitParams, BenefitVector, GroupPartition};
use crate::error::{Error, Result};

/// Ground-truth labels, binary predictions, and dense group ids for a sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPredictions {
    labels: Vec<bool>,
    predictions: Vec<bool>,
    groups: Vec<usize>,
    group_count: usize,
}

impl LabeledPredictions {
    pub fn new(labels: Vec<bool>, predictions: Vec<bool>, groups: Vec<usize>) -> Result<Self> {
        if labels.len() != predictions.len() || labels.len() != groups.len() {
            return Err(Error::input(format!(
                "length mismatch: {} labels, {} predictions, {} group ids",
                labels.len(),
                predictions.len(),
                groups.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::input("sample must not be empty"));
        }
        let group_count = groups.iter().max().unwrap() + 1;
        let mut seen = vec![false; group_count];
        for &g in &groups {
            seen[g] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::input(format!(
                "group ids must be dense, group {missing} is empty"
            )));
        }
        Ok(Self {
            labels,
            predictions,
            groups,
            group_count,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn predictions(&self) -> &[bool] {
        &self.predictions
    }

    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    /// Benefit vector induced by the predictions.
    pub fn benefits(&self, params: &BenefitParams) -> BenefitVector {
        BenefitVector::from_predictions(&self.predictions, &self.labels, params)
            .expect("lengths validated at construction")
    }

    /// The group assignment as a partition over the sample.
    pub fn partition(&self) -> GroupPartition {
        GroupPartition::new(self.groups.clone()).expect("density validated at construction")
    }
}

/// Error statistics of one group.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroupRateRow {
    /// Share of the group that received a false positive.
    pub fp_fraction: f64,
    /// Share of the group that received a false negative.
    pub fn_fraction: f64,
    /// False positive rate over the group's negatives; absent when the group
    /// has no negative labels (0/0 is not a rate).
    pub fp_rate: Option<f64>,
    /// False negative rate over the group's positives; absent when the group
    /// has no positive labels.
    pub fn_rate: Option<f64>,
    /// Share of positive labels in the group.
    pub base_rate: f64,
    /// Group size.
    pub size: usize,
}

/// Per-group statistics plus the population-level rates.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroupRates {
    pub per_group: Vec<GroupRateRow>,
    pub fp_rate_total: Option<f64>,
    pub fn_rate_total: Option<f64>,
}

impl GroupRates {
    pub fn group_count(&self) -> usize {
        self.per_group.len()
    }
}

/// Empirical conditional frequencies per group.
pub fn compute_group_rates(data: &LabeledPredictions) -> GroupRates {
    let g = data.group_count();
    let mut fp = vec![0usize; g];
    let mut fnn = vec![0usize; g];
    let mut pos = vec![0usize; g];
    let mut size = vec![0usize; g];
    for i in 0..data.len() {
        let group = data.groups[i];
        size[group] += 1;
        if data.labels[i] {
            pos[group] += 1;
            if !data.predictions[i] {
                fnn[group] += 1;
            }
        } else if data.predictions[i] {
            fp[group] += 1;
        }
    }

    let ratio = |num: usize, den: usize| -> Option<f64> {
        (den > 0).then(|| num as f64 / den as f64)
    };

    let per_group = (0..g)
        .map(|i| {
            let neg = size[i] - pos[i];
            GroupRateRow {
                fp_fraction: fp[i] as f64 / size[i] as f64,
                fn_fraction: fnn[i] as f64 / size[i] as f64,
                fp_rate: ratio(fp[i], neg),
                fn_rate: ratio(fnn[i], pos[i]),
                base_rate: pos[i] as f64 / size[i] as f64,
                size: size[i],
            }
        })
        .collect();

    let total_pos: usize = pos.iter().sum();
    let total_neg: usize = data.len() - total_pos;
    GroupRates {
        per_group,
        fp_rate_total: ratio(fp.iter().sum(), total_neg),
        fn_rate_total: ratio(fnn.iter().sum(), total_pos),
    }
}

/// Boolean fairness predicates, each true when the max pairwise gap of the
/// corresponding statistic stays within the tolerance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FairnessPredicateReport {
    /// Equal false positive and false negative fractions across groups.
    pub equal_prediction: bool,
    /// Equal per-group error probability (sum of the two fractions).
    pub equal_error: bool,
    /// Equal per-group mean benefit (difference of the two fractions).
    pub equal_benefit: bool,
    /// Equal false positive and false negative rates across groups.
    pub equalized_odds: bool,
    /// Equal share of positive labels across groups.
    pub equal_base_rates: bool,
    /// Larger of the two fraction gaps behind `equal_prediction`.
    pub prediction_gap: f64,
    pub error_gap: f64,
    pub benefit_gap: f64,
    /// Larger of the two rate gaps, over groups where the rates exist;
    /// absent when fewer than two groups are comparable on both rates.
    pub odds_gap: Option<f64>,
    pub base_rate_gap: f64,
    /// Groups left out of the equalized-odds comparison because one of
    /// their rates is undefined.
    pub odds_excluded_groups: Vec<usize>,
}

fn max_gap(values: impl Iterator<Item = f64>) -> f64 {
    let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if min.is_finite() && max.is_finite() {
        max - min
    } else {
        0.0
    }
}

/// Evaluate all predicates at a tolerance.
///
/// Groups with undefined rates are excluded from the equalized-odds
/// comparison and listed in the report; a comparison with fewer than two
/// remaining groups is vacuously satisfied.
pub fn check_predicates(rates: &GroupRates, tolerance: f64) -> FairnessPredicateReport {
    let rows = &rates.per_group;

    let fp_fraction_gap = max_gap(rows.iter().map(|r| r.fp_fraction));
    let fn_fraction_gap = max_gap(rows.iter().map(|r| r.fn_fraction));
    let prediction_gap = fp_fraction_gap.max(fn_fraction_gap);
    let error_gap = max_gap(rows.iter().map(|r| r.fp_fraction + r.fn_fraction));
    let benefit_gap = max_gap(rows.iter().map(|r| r.fp_fraction - r.fn_fraction));
    let base_rate_gap = max_gap(rows.iter().map(|r| r.base_rate));

    let odds_excluded_groups: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.fp_rate.is_none() || r.fn_rate.is_none())
        .map(|(i, _)| i)
        .collect();
    let fp_rates: Vec<f64> = rows.iter().filter_map(|r| r.fp_rate).collect();
    let fn_rates: Vec<f64> = rows.iter().filter_map(|r| r.fn_rate).collect();
    let fp_rate_gap = (fp_rates.len() >= 2).then(|| max_gap(fp_rates.iter().copied()));
    let fn_rate_gap = (fn_rates.len() >= 2).then(|| max_gap(fn_rates.iter().copied()));
    let odds_gap = match (fp_rate_gap, fn_rate_gap) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };

    FairnessPredicateReport {
        equal_prediction: prediction_gap <= tolerance,
        equal_error: error_gap <= tolerance,
        equal_benefit: benefit_gap <= tolerance,
        equalized_odds: odds_gap.is_none_or(|g| g <= tolerance),
        equal_base_rates: base_rate_gap <= tolerance,
        prediction_gap,
        error_gap,
        benefit_gap,
        odds_gap,
        base_rate_gap,
        odds_excluded_groups,
    }
}

/// Self-check of the base-rate equivalence: under equal base rates, the
/// equal-prediction and equalized-odds predicates must agree. Returns `None`
/// when the base rates differ beyond the tolerance (the check does not
/// apply), otherwise whether the two predicates agreed.
pub fn verify_equivalence_under_equal_base_rates(
    rates: &GroupRates,
    tolerance: f64,
) -> Option<bool> {
    let report = check_predicates(rates, tolerance);
    if report.base_rate_gap > tolerance {
        return None;
    }
    Some(report.equal_prediction == report.equalized_odds)
}

/// Benefit of each individual, in sample order.
pub fn benefits_of_sample(data: &LabeledPredictions, params: &BenefitParams) -> Vec<f64> {
    data.predictions
        .iter()
        .zip(&data.labels)
        .map(|(&p, &y)| benefit_of(p, y, params))
        .collect()
}
