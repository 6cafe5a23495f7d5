//! Generalized entropy index over benefit vectors, its between/within-group
//! decomposition, and exact evaluation on finite-support distributions.
//!
//! The index of order `alpha` over a benefit vector `b` with mean `mu` is the
//! average of the convex kernel `f_alpha(b_i / mu)`:
//!
//! ```text
//!   f_0(x) = -ln x        f_1(x) = x ln x        f_a(x) = (x^a - 1) / (a (a - 1))
//! ```
//!
//! It is zero exactly when every individual receives the same benefit, and it
//! is invariant under permutation, replication, and rescaling of the vector.

use rand::Rng;

use crate::accum::{self, Accumulator};
use crate::error::{Error, Result};

/// Relative spread below which a benefit vector counts as constant.
/// Benefits are small exact rationals in practice, so this is tight.
const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Mass bookkeeping tolerance for finite-support distributions.
const MASS_TOLERANCE: f64 = 1e-12;

/// Order of the generalized entropy index, with the logarithmic branches
/// selected explicitly rather than by floating-point closeness.
///
/// `Other(alpha)` is reserved for `alpha` not equal to 0 or 1; use
/// [`EntropyOrder::new`] to classify a literal, which compares exactly.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum EntropyOrder {
    /// Mean log deviation branch (`alpha = 0`).
    Zero,
    /// Theil branch (`alpha = 1`).
    One,
    /// Power branch for any other non-negative order.
    Other(f64),
}

impl EntropyOrder {
    /// Classify a non-negative order, mapping exactly 0.0 and 1.0 to their
    /// dedicated branches.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::input(format!(
                "entropy order must be a finite non-negative real, got {alpha}"
            )));
        }
        Ok(if alpha == 0.0 {
            EntropyOrder::Zero
        } else if alpha == 1.0 {
            EntropyOrder::One
        } else {
            EntropyOrder::Other(alpha)
        })
    }

    /// Numeric value of the order.
    pub fn value(&self) -> f64 {
        match self {
            EntropyOrder::Zero => 0.0,
            EntropyOrder::One => 1.0,
            EntropyOrder::Other(alpha) => *alpha,
        }
    }
}

/// The convex kernel of the index: `-ln x`, `x ln x`, or
/// `(x^alpha - 1) / (alpha (alpha - 1))` depending on the branch.
///
/// Requires `x > 0`; the kernel satisfies `f(1) = 0` on every branch.
pub fn eval_f_alpha(order: EntropyOrder, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(format!(
            "f_alpha requires a positive argument, got {x}"
        )));
    }
    Ok(kernel(order, x))
}

/// Kernel without the positivity gate: the power branch extends continuously
/// to `x = 0` (a zero benefit is legal there), the log branches do not.
fn kernel(order: EntropyOrder, x: f64) -> f64 {
    match order {
        EntropyOrder::Zero => -x.ln(),
        EntropyOrder::One => x * x.ln(),
        EntropyOrder::Other(alpha) => (x.powf(alpha) - 1.0) / (alpha * (alpha - 1.0)),
    }
}

/// Benefit conversion constants. A correct prediction is worth `c`, a false
/// positive `c + a`, a false negative `c - a`, with `c > a > 0` and
/// `c - a >= 1` so benefits stay at least 1.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenefitParams {
    spread: f64,
    offset: f64,
}

impl BenefitParams {
    pub fn new(spread: f64, offset: f64) -> Result<Self> {
        if !spread.is_finite() || !offset.is_finite() {
            return Err(Error::input("benefit parameters must be finite"));
        }
        if !(offset > spread && spread > 0.0) {
            return Err(Error::input(format!(
                "benefit parameters require c > a > 0, got a = {spread}, c = {offset}"
            )));
        }
        if offset - spread < 1.0 {
            return Err(Error::input(format!(
                "benefit parameters require c - a >= 1, got a = {spread}, c = {offset}"
            )));
        }
        Ok(Self { spread, offset })
    }

    /// Spread `a` between adjacent benefit levels.
    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// Offset `c`, the benefit of a correct prediction.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Derived ratio `r = c / a`, always above 1.
    pub fn ratio(&self) -> f64 {
        self.offset / self.spread
    }
}

/// Benefit of one individual given a binary prediction and ground-truth label.
pub fn benefit_of(prediction: bool, label: bool, params: &BenefitParams) -> f64 {
    let diff = prediction as i8 - label as i8;
    params.offset + params.spread * f64::from(diff)
}

/// A non-empty vector of non-negative individual benefits.
#[derive(Debug, Clone, PartialEq)]
pub struct BenefitVector {
    values: Vec<f64>,
}

impl BenefitVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("benefit vector must not be empty"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::input(
                "benefit values must be finite and non-negative",
            ));
        }
        Ok(Self { values })
    }

    /// Map prediction/label pairs through the benefit conversion.
    pub fn from_predictions(
        predictions: &[bool],
        labels: &[bool],
        params: &BenefitParams,
    ) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::input(format!(
                "got {} predictions for {} labels",
                predictions.len(),
                labels.len()
            )));
        }
        Self::new(
            predictions
                .iter()
                .zip(labels)
                .map(|(&p, &y)| benefit_of(p, y, params))
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Population mean benefit.
    pub fn mean(&self) -> f64 {
        accum::sum(self.values.iter().copied()) / self.values.len() as f64
    }
}

/// Confusion summary of a hypothesis over a sample: population size plus
/// false positive and false negative counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OutcomeCounts {
    pub n: usize,
    pub n_fp: usize,
    pub n_fn: usize,
}

impl OutcomeCounts {
    pub fn new(n: usize, n_fp: usize, n_fn: usize) -> Result<Self> {
        if n_fp + n_fn > n {
            return Err(Error::input(format!(
                "error counts {n_fp} + {n_fn} exceed population {n}"
            )));
        }
        Ok(Self { n, n_fp, n_fn })
    }

    /// Empirical risk `(n_fp + n_fn) / n`.
    pub fn error_rate(&self) -> f64 {
        (self.n_fp + self.n_fn) as f64 / self.n as f64
    }
}

/// Assignment of each individual to one of `G` non-empty groups with dense
/// ids `0..G-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
}

impl GroupPartition {
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::input("partition must cover at least one individual"));
        }
        let group_count = assignment.iter().max().unwrap() + 1;
        let mut sizes = vec![0usize; group_count];
        for &g in &assignment {
            sizes[g] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::input(format!(
                "group ids must be dense, group {empty} is empty"
            )));
        }
        Ok(Self { assignment, sizes })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn group_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Between/within split of the index over a partitioned population.
///
/// `total` equals `within + between` up to accumulated rounding; the weights
/// are `(n_g / n) (mu_g / mu)^alpha` and sum to 1 exactly when the order is
/// 0 or 1.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecompositionReport {
    pub total: f64,
    pub global_mean: f64,
    pub group_means: Vec<f64>,
    pub weights: Vec<f64>,
    pub group_entropies: Vec<f64>,
    pub within: f64,
    pub between: f64,
}

fn check_log_branch(order: EntropyOrder, values: impl Iterator<Item = f64>) -> Result<()> {
    if matches!(order, EntropyOrder::Zero | EntropyOrder::One) {
        for v in values {
            if v <= 0.0 {
                return Err(Error::domain(
                    "zero benefit is outside the domain of the logarithmic branches",
                ));
            }
        }
    }
    Ok(())
}

fn spread_is_negligible(min: f64, max: f64) -> bool {
    max - min <= EQUALITY_TOLERANCE * max.abs()
}

/// Index of a raw slice; shared by the vector, count, and group paths.
fn entropy_of_slice(values: &[f64], order: EntropyOrder) -> Result<f64> {
    let n = values.len() as f64;
    let mu = accum::sum(values.iter().copied()) / n;
    if mu <= 0.0 {
        return Err(Error::domain("mean benefit must be positive"));
    }
    check_log_branch(order, values.iter().copied())?;
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if spread_is_negligible(min, max) {
        return Ok(0.0);
    }
    let mut acc = Accumulator::new();
    for &v in values {
        acc.add(kernel(order, v / mu));
    }
    // The index is non-negative by convexity; clip rounding residue.
    Ok((acc.total() / n).max(0.0))
}

/// Generalized entropy index of a benefit vector.
///
/// Returns 0 exactly when all benefits agree (within 1e-12 relative spread);
/// a single individual therefore always scores 0. Zero benefits are rejected
/// on the logarithmic branches.
pub fn entropy_index(b: &BenefitVector, order: EntropyOrder) -> Result<f64> {
    entropy_of_slice(&b.values, order)
}

/// Index computed in closed form from a confusion summary, equal to
/// [`entropy_index`] applied to the expanded benefit vector.
pub fn entropy_from_counts(
    counts: &OutcomeCounts,
    params: &BenefitParams,
    order: EntropyOrder,
) -> Result<f64> {
    if counts.n == 0 {
        return Err(Error::input("population must be non-empty"));
    }
    let n = counts.n as f64;
    let fp = counts.n_fp as f64;
    let fnn = counts.n_fn as f64;
    let correct = n - fp - fnn;
    let (a, c) = (params.spread, params.offset);
    // Only one benefit level present: perfect equality.
    if (counts.n_fp == 0 && counts.n_fn == 0) || counts.n_fp == counts.n || counts.n_fn == counts.n
    {
        return Ok(0.0);
    }
    let mu = (correct * c + fp * (c + a) + fnn * (c - a)) / n;
    let mut acc = Accumulator::new();
    for (count, benefit) in [(correct, c), (fp, c + a), (fnn, c - a)] {
        if count > 0.0 {
            acc.add(count * kernel(order, benefit / mu));
        }
    }
    Ok((acc.total() / n).max(0.0))
}

/// Between-group term: the index of the population in which every member is
/// replaced by their group's mean benefit.
fn between_term(
    order: EntropyOrder,
    sizes: &[usize],
    group_means: &[f64],
    n: f64,
    mu: f64,
) -> Result<f64> {
    let mut acc = Accumulator::new();
    for (&size, &mean) in sizes.iter().zip(group_means) {
        let share = size as f64 / n;
        acc.add(share * kernel(order, mean / mu));
    }
    Ok(acc.total().max(0.0))
}

/// Additive decomposition of the index over a group partition.
///
/// Group weights are `(n_g / n) (mu_g / mu)^alpha`; the report's `total` is
/// computed directly from the full vector so the `within + between` identity
/// is a genuine cross-check rather than a definition.
pub fn decompose(
    b: &BenefitVector,
    partition: &GroupPartition,
    order: EntropyOrder,
) -> Result<DecompositionReport> {
    if partition.len() != b.len() {
        return Err(Error::input(format!(
            "partition covers {} individuals, benefit vector has {}",
            partition.len(),
            b.len()
        )));
    }
    let group_count = partition.group_count();
    let n = b.len() as f64;
    let mu = b.mean();
    if mu <= 0.0 {
        return Err(Error::domain("mean benefit must be positive"));
    }

    let mut grouped: Vec<Vec<f64>> = vec![Vec::new(); group_count];
    for (&g, &v) in partition.assignment().iter().zip(b.values()) {
        grouped[g].push(v);
    }

    let alpha = order.value();
    let mut group_means = Vec::with_capacity(group_count);
    let mut weights = Vec::with_capacity(group_count);
    let mut group_entropies = Vec::with_capacity(group_count);
    let mut within = Accumulator::new();
    for values in &grouped {
        let mean = accum::sum(values.iter().copied()) / values.len() as f64;
        let weight = (values.len() as f64 / n) * (mean / mu).powf(alpha);
        let entropy = entropy_of_slice(values, order)?;
        within.add(weight * entropy);
        group_means.push(mean);
        weights.push(weight);
        group_entropies.push(entropy);
    }

    let between = between_term(order, partition.sizes(), &group_means, n, mu)?;
    let total = entropy_of_slice(b.values(), order)?;

    Ok(DecompositionReport {
        total,
        global_mean: mu,
        group_means,
        weights,
        group_entropies,
        within: within.total(),
        between,
    })
}

/// One atom of a finite-support distribution: a benefit level, its
/// probability mass, and the group the atom belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPoint {
    pub benefit: f64,
    pub mass: f64,
    pub group: usize,
}

/// A finite-support probability distribution over benefit values, the exact
/// stand-in for population-level (as opposed to sample-level) fairness.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    points: Vec<SupportPoint>,
}

impl FiniteDistribution {
    pub fn new(points: Vec<SupportPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("distribution needs at least one support point"));
        }
        for p in &points {
            if !p.mass.is_finite() || p.mass <= 0.0 {
                return Err(Error::input("every mass must be positive and finite"));
            }
            if !p.benefit.is_finite() || p.benefit < 0.0 {
                return Err(Error::input("benefits must be finite and non-negative"));
            }
        }
        let total = accum::sum(points.iter().map(|p| p.mass));
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::input(format!(
                "masses must sum to 1 within {MASS_TOLERANCE}, got {total}"
            )));
        }
        Ok(Self { points })
    }

    /// Ungrouped constructor from (benefit, mass) pairs.
    pub fn from_masses(pairs: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(benefit, mass)| SupportPoint {
                    benefit,
                    mass,
                    group: 0,
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[SupportPoint] {
        &self.points
    }

    /// Expected benefit under the distribution.
    pub fn mean(&self) -> f64 {
        accum::sum(self.points.iter().map(|p| p.mass * p.benefit))
    }

    /// Draw `n` i.i.d. benefit values.
    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let mut cumulative = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        for p in &self.points {
            acc += p.mass;
            cumulative.push(acc);
        }
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                let idx = cumulative.partition_point(|&c| c < u);
                self.points[idx.min(self.points.len() - 1)].benefit
            })
            .collect()
    }
}

/// Exact index of a finite-support distribution: the mass-weighted average
/// of `f_alpha(b / E[b])`. A uniform distribution over a finite sample gives
/// back [`entropy_index`] of that sample.
pub fn population_entropy_exact(dist: &FiniteDistribution, order: EntropyOrder) -> Result<f64> {
    let mu = dist.mean();
    if mu <= 0.0 {
        return Err(Error::domain("expected benefit must be positive"));
    }
    check_log_branch(order, dist.points.iter().map(|p| p.benefit))?;
    let (min, max) = dist
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.benefit), hi.max(p.benefit))
        });
    if spread_is_negligible(min, max) {
        return Ok(0.0);
    }
    let mut acc = Accumulator::new();
    for p in &dist.points {
        acc.add(p.mass * kernel(order, p.benefit / mu));
    }
    Ok(acc.total().max(0.0))
}

/// Additive decomposition of [`population_entropy_exact`] over the groups of
/// the support, with weights `m_g (mu_g / mu)^alpha` and the between term
/// `sum_g m_g f_alpha(mu_g / mu)`.
pub fn decompose_distribution(
    dist: &FiniteDistribution,
    order: EntropyOrder,
) -> Result<DecompositionReport> {
    let group_count = dist.points.iter().map(|p| p.group).max().unwrap() + 1;
    let mut masses = vec![0.0f64; group_count];
    for p in &dist.points {
        masses[p.group] += p.mass;
    }
    if let Some(empty) = masses.iter().position(|&m| m == 0.0) {
        return Err(Error::input(format!("group {empty} carries no mass")));
    }

    let mu = dist.mean();
    if mu <= 0.0 {
        return Err(Error::domain("expected benefit must be positive"));
    }
    let alpha = order.value();

    let mut group_means = Vec::with_capacity(group_count);
    let mut weights = Vec::with_capacity(group_count);
    let mut group_entropies = Vec::with_capacity(group_count);
    let mut within = Accumulator::new();
    let mut between = Accumulator::new();
    for (g, &mass) in masses.iter().enumerate() {
        let mean = accum::sum(
            dist.points
                .iter()
                .filter(|p| p.group == g)
                .map(|p| p.mass * p.benefit),
        ) / mass;
        // Index of the conditional distribution on group g.
        let restricted: Vec<SupportPoint> = dist
            .points
            .iter()
            .filter(|p| p.group == g)
            .map(|p| SupportPoint {
                benefit: p.benefit,
                mass: p.mass / mass,
                group: 0,
            })
            .collect();
        let entropy = conditional_entropy(&restricted, mean, order)?;
        let weight = mass * (mean / mu).powf(alpha);
        within.add(weight * entropy);
        between.add(mass * kernel(order, mean / mu));
        group_means.push(mean);
        weights.push(weight);
        group_entropies.push(entropy);
    }

    Ok(DecompositionReport {
        total: population_entropy_exact(dist, order)?,
        global_mean: mu,
        group_means,
        weights,
        group_entropies,
        within: within.total(),
        between: between.total().max(0.0),
    })
}

fn conditional_entropy(points: &[SupportPoint], mean: f64, order: EntropyOrder) -> Result<f64> {
    check_log_branch(order, points.iter().map(|p| p.benefit))?;
    let (min, max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.benefit), hi.max(p.benefit))
        });
    if spread_is_negligible(min, max) {
        return Ok(0.0);
    }
    let mut acc = Accumulator::new();
    for p in points {
        acc.add(p.mass * kernel(order, p.benefit / mean));
    }
    Ok(acc.total().max(0.0))
}

/// Move `delta` of benefit from a richer individual to a poorer one without
/// letting them cross, preserving the mean. Every order of the index strictly
/// decreases under such a transfer.
pub fn apply_transfer(
    b: &BenefitVector,
    from_index: usize,
    to_index: usize,
    delta: f64,
) -> Result<BenefitVector> {
    if from_index >= b.len() || to_index >= b.len() || from_index == to_index {
        return Err(Error::input("transfer indices must be distinct and in range"));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::input("transfer amount must be positive"));
    }
    let from = b.values[from_index];
    let to = b.values[to_index];
    if from <= to {
        return Err(Error::input(format!(
            "transfer must flow from richer to poorer, got {from} -> {to}"
        )));
    }
    if from - delta <= to + delta {
        return Err(Error::input(format!(
            "transfer of {delta} would let {from} and {to} cross"
        )));
    }
    let mut values = b.values.clone();
    values[from_index] = from - delta;
    values[to_index] = to + delta;
    BenefitVector::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(alpha: f64) -> EntropyOrder {
        EntropyOrder::new(alpha).unwrap()
    }

    fn bv(values: &[f64]) -> BenefitVector {
        BenefitVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn f_alpha_reference_points() {
        assert_eq!(eval_f_alpha(order(1.0), 1.0).unwrap(), 0.0);
        assert!((eval_f_alpha(order(0.0), std::f64::consts::E).unwrap() + 1.0).abs() < 1e-15);
        assert!((eval_f_alpha(order(2.0), 3.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(eval_f_alpha(order(2.0), 0.0).is_err());
        assert!(eval_f_alpha(order(0.0), -1.0).is_err());
    }

    #[test]
    fn f_alpha_vanishes_at_one() {
        for alpha in [0.0, 0.5, 1.0, 2.0, 3.7] {
            assert_eq!(eval_f_alpha(order(alpha), 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn order_classification_is_exact() {
        assert_eq!(EntropyOrder::new(0.0).unwrap(), EntropyOrder::Zero);
        assert_eq!(EntropyOrder::new(1.0).unwrap(), EntropyOrder::One);
        assert_eq!(EntropyOrder::new(2.0).unwrap(), EntropyOrder::Other(2.0));
        assert!(EntropyOrder::new(-0.5).is_err());
        assert!(EntropyOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn benefit_levels() {
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        assert_eq!(benefit_of(true, true, &params), 8.0);
        assert_eq!(benefit_of(true, false, &params), 13.0);
        assert_eq!(benefit_of(false, true, &params), 3.0);
        assert_eq!(benefit_of(false, false, &params), 8.0);
    }

    #[test]
    fn benefit_params_validation() {
        assert!(BenefitParams::new(1.0, 3.0).is_ok());
        assert!(BenefitParams::new(5.0, 5.0).is_err()); // c > a fails
        assert!(BenefitParams::new(5.0, 5.5).is_err()); // c - a >= 1 fails
        assert!(BenefitParams::new(0.0, 2.0).is_err()); // a > 0 fails
    }

    #[test]
    fn constant_vector_scores_zero() {
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let i = entropy_index(&bv(&[3.0, 3.0, 3.0, 3.0]), order(alpha)).unwrap();
            assert_eq!(i, 0.0);
        }
        // single individual
        assert_eq!(entropy_index(&bv(&[7.0]), order(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn two_point_vector_reference_value() {
        // direct evaluation of the power branch on (1, 2)
        let i = entropy_index(&bv(&[1.0, 2.0]), order(2.0)).unwrap();
        assert!((i - 1.0 / 18.0).abs() < 1e-15, "got {i}");
    }

    #[test]
    fn worked_ten_person_example() {
        // Two groups of five with benefits built from a = 1, c = 3.
        let b = bv(&[3.0, 2.0, 3.0, 2.0, 4.0, 3.0, 4.0, 3.0, 3.0, 2.0]);
        let i = entropy_index(&b, order(1.0)).unwrap();
        assert!((i - 0.029372790674483534).abs() < 1e-14, "got {i}");

        let partition = GroupPartition::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]).unwrap();
        let report = decompose(&b, &partition, order(1.0)).unwrap();
        assert!((report.global_mean - 2.9).abs() < 1e-15);
        assert!((report.group_means[0] - 2.8).abs() < 1e-15);
        assert!((report.group_means[1] - 3.0).abs() < 1e-15);
        assert!((report.weights[0] - 14.0 / 29.0).abs() < 1e-14);
        assert!((report.weights[1] - 15.0 / 29.0).abs() < 1e-14);
        assert!((report.group_entropies[0] - 0.03534057558512761).abs() < 1e-14);
        assert!((report.group_entropies[1] - 0.022653204906052972).abs() < 1e-14);
        assert!((report.between - 0.0005946481992220281).abs() < 1e-14);
        let identity = (report.within + report.between - report.total).abs() / report.total;
        assert!(identity < 1e-12, "identity off by {identity}");
    }

    #[test]
    fn counts_match_expanded_vector_exhaustively() {
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let ord = order(alpha);
            for n in 1..=12usize {
                for fp in 0..=n {
                    for fnn in 0..=(n - fp) {
                        let counts = OutcomeCounts::new(n, fp, fnn).unwrap();
                        let closed = entropy_from_counts(&counts, &params, ord).unwrap();
                        let mut values = vec![8.0; n - fp - fnn];
                        values.extend(std::iter::repeat_n(13.0, fp));
                        values.extend(std::iter::repeat_n(3.0, fnn));
                        let expanded = entropy_index(&bv(&values), ord).unwrap();
                        assert!(
                            (closed - expanded).abs() < 1e-12,
                            "n={n} fp={fp} fn={fnn} alpha={alpha}: {closed} vs {expanded}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn counts_reference_values() {
        let params = BenefitParams::new(1.0, 3.0).unwrap();
        let counts = OutcomeCounts::new(10, 2, 3).unwrap();
        let i = entropy_from_counts(&counts, &params, order(1.0)).unwrap();
        assert!((i - 0.029372790674483534).abs() < 1e-14);

        let perfect = OutcomeCounts::new(10, 0, 0).unwrap();
        assert_eq!(
            entropy_from_counts(&perfect, &params, order(2.0)).unwrap(),
            0.0
        );

        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let counts = OutcomeCounts::new(4, 1, 1).unwrap();
        let i = entropy_from_counts(&counts, &params, order(2.0)).unwrap();
        assert!((i - 0.09765625).abs() < 1e-14, "got {i}");
    }

    #[test]
    fn zero_benefit_rejected_on_log_branches() {
        let b = bv(&[0.0, 1.0]);
        assert!(entropy_index(&b, order(0.0)).is_err());
        assert!(entropy_index(&b, order(1.0)).is_err());
        assert!(entropy_index(&b, order(2.0)).is_ok());
    }

    #[test]
    fn single_group_decomposition_is_trivial() {
        let b = bv(&[1.0, 2.0, 3.0]);
        let partition = GroupPartition::new(vec![0, 0, 0]).unwrap();
        for alpha in [0.0, 1.0, 2.0] {
            let report = decompose(&b, &partition, order(alpha)).unwrap();
            assert!((report.within - report.total).abs() < 1e-15);
            assert_eq!(report.between, 0.0);
            assert!((report.weights[0] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_distribution_reduces_to_sample_index() {
        let values = [3.0, 2.0, 3.0, 2.0, 4.0, 3.0, 4.0, 3.0, 3.0, 2.0];
        let dist = FiniteDistribution::from_masses(
            values.iter().map(|&v| (v, 0.1)).collect(),
        )
        .unwrap();
        let exact = population_entropy_exact(&dist, order(1.0)).unwrap();
        let sample = entropy_index(&bv(&values), order(1.0)).unwrap();
        assert!((exact - sample).abs() < 1e-12);
    }

    #[test]
    fn two_point_distribution_matches_mass_expansion() {
        let dist = FiniteDistribution::from_masses(vec![(2.0, 0.25), (4.0, 0.75)]).unwrap();
        let exact = population_entropy_exact(&dist, order(2.0)).unwrap();
        assert!((exact - 0.030612244897959134).abs() < 1e-14, "got {exact}");
        let expansion = entropy_index(&bv(&[2.0, 4.0, 4.0, 4.0]), order(2.0)).unwrap();
        assert!((exact - expansion).abs() < 1e-14);
    }

    #[test]
    fn constant_distribution_scores_zero() {
        let dist = FiniteDistribution::from_masses(vec![(5.0, 0.3), (5.0, 0.7)]).unwrap();
        for alpha in [0.0, 1.0, 2.0] {
            assert_eq!(population_entropy_exact(&dist, order(alpha)).unwrap(), 0.0);
        }
    }

    #[test]
    fn distribution_masses_validated() {
        assert!(FiniteDistribution::from_masses(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(FiniteDistribution::from_masses(vec![(1.0, 0.0), (2.0, 1.0)]).is_err());
        assert!(FiniteDistribution::from_masses(vec![]).is_err());
    }

    #[test]
    fn grouped_distribution_decomposes() {
        let dist = FiniteDistribution::new(vec![
            SupportPoint { benefit: 2.0, mass: 0.2, group: 0 },
            SupportPoint { benefit: 3.0, mass: 0.3, group: 0 },
            SupportPoint { benefit: 4.0, mass: 0.1, group: 1 },
            SupportPoint { benefit: 3.0, mass: 0.4, group: 1 },
        ])
        .unwrap();
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let report = decompose_distribution(&dist, order(alpha)).unwrap();
            let gap = (report.within + report.between - report.total).abs();
            assert!(gap < 1e-12, "alpha={alpha}: identity off by {gap}");
        }
        // single group: between term vanishes
        let single = FiniteDistribution::from_masses(vec![(2.0, 0.5), (4.0, 0.5)]).unwrap();
        let report = decompose_distribution(&single, order(2.0)).unwrap();
        assert_eq!(report.between, 0.0);
    }

    #[test]
    fn uniform_grouped_distribution_mirrors_vector_decomposition() {
        let values = [3.0, 2.0, 3.0, 2.0, 4.0, 3.0, 4.0, 3.0, 3.0, 2.0];
        let groups = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let dist = FiniteDistribution::new(
            values
                .iter()
                .zip(groups)
                .map(|(&benefit, group)| SupportPoint {
                    benefit,
                    mass: 0.1,
                    group,
                })
                .collect(),
        )
        .unwrap();
        let b = bv(&values);
        let partition = GroupPartition::new(groups.to_vec()).unwrap();
        for alpha in [0.0, 1.0, 2.0] {
            let from_dist = decompose_distribution(&dist, order(alpha)).unwrap();
            let from_vector = decompose(&b, &partition, order(alpha)).unwrap();
            assert!((from_dist.total - from_vector.total).abs() < 1e-12);
            assert!((from_dist.between - from_vector.between).abs() < 1e-12);
            for g in 0..2 {
                assert!((from_dist.weights[g] - from_vector.weights[g]).abs() < 1e-12);
                assert!(
                    (from_dist.group_entropies[g] - from_vector.group_entropies[g]).abs() < 1e-12
                );
            }
        }
    }

    #[test]
    fn distribution_transfer_reduces_entropy() {
        // shift benefit from the richest atom to the poorest one (equal
        // masses keep the expectation fixed); every order must decrease
        let base = FiniteDistribution::from_masses(vec![(6.0, 0.25), (2.0, 0.25), (4.0, 0.5)])
            .unwrap();
        let transferred =
            FiniteDistribution::from_masses(vec![(5.0, 0.25), (3.0, 0.25), (4.0, 0.5)]).unwrap();
        assert!((base.mean() - transferred.mean()).abs() < 1e-15);
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let before = population_entropy_exact(&base, order(alpha)).unwrap();
            let after = population_entropy_exact(&transferred, order(alpha)).unwrap();
            assert!(after < before, "alpha={alpha}: {after} !< {before}");
        }
    }

    #[test]
    fn transfer_reduces_every_order() {
        let b = bv(&[4.0, 2.0]);
        let after = apply_transfer(&b, 0, 1, 0.5).unwrap();
        assert_eq!(after.values(), &[3.5, 2.5]);
        assert!((after.mean() - b.mean()).abs() < 1e-15);
        for alpha in [0.0, 1.0, 2.0] {
            let before = entropy_index(&b, order(alpha)).unwrap();
            let reduced = entropy_index(&after, order(alpha)).unwrap();
            assert!(reduced < before, "alpha={alpha}: {reduced} !< {before}");
        }
    }

    #[test]
    fn transfer_boundary_case() {
        // 5 - 1.9 = 3.1 still above 1 + 1.9 = 2.9, so the transfer is legal.
        let b = bv(&[5.0, 1.0, 3.0]);
        let after = apply_transfer(&b, 0, 1, 1.9).unwrap();
        assert_eq!(after.values(), &[3.1, 2.9, 3.0]);
        // crossing transfers are rejected
        assert!(apply_transfer(&b, 0, 1, 2.0).is_err());
        assert!(apply_transfer(&b, 1, 0, 0.5).is_err());
    }

    #[test]
    fn sampling_hits_every_support_point() {
        use rand::SeedableRng;
        let dist =
            FiniteDistribution::from_masses(vec![(1.0, 0.2), (2.0, 0.5), (3.0, 0.3)]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let draws = dist.sample(&mut rng, 5000);
        assert_eq!(draws.len(), 5000);
        let count2 = draws.iter().filter(|&&v| v == 2.0).count() as f64 / 5000.0;
        assert!((count2 - 0.5).abs() < 0.05, "got {count2}");
    }
}
