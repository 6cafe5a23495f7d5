//! Shared fixtures for the benchmark targets.

use gefair::{BenefitVector, GroupPartition, HypothesisSpace, OutcomeCounts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random benefit vector on the three-level alphabet of a = 5, c = 8.
pub fn random_benefits(n: usize, seed: u64) -> BenefitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BenefitVector::new(
        (0..n)
            .map(|_| match rng.gen_range(0..10) {
                0 => 13.0,
                1 => 3.0,
                _ => 8.0,
            })
            .collect(),
    )
    .unwrap()
}

/// A dense random partition into `groups` groups.
pub fn random_partition(n: usize, groups: usize, seed: u64) -> GroupPartition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..groups)).collect();
    for (g, slot) in assignment.iter_mut().take(groups.min(n)).enumerate() {
        *slot = g;
    }
    GroupPartition::new(assignment).unwrap()
}

/// Random scores/labels of a weak scorer for hypothesis-space benchmarks.
pub fn random_scored_sample(n: usize, seed: u64) -> (Vec<f64>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let labels: Vec<bool> = scores
        .iter()
        .map(|&s| rng.gen::<f64>() < 0.25 + 0.5 * s)
        .collect();
    (scores, labels)
}

/// A 201-hypothesis space over a random scored sample.
pub fn random_space(n: usize, seed: u64) -> HypothesisSpace {
    let (scores, labels) = random_scored_sample(n, seed);
    HypothesisSpace::from_scores(&scores, &labels).unwrap()
}

/// A small synthetic space from explicit confusion summaries.
pub fn synthetic_space(n: usize, pairs: &[(usize, usize)]) -> HypothesisSpace {
    HypothesisSpace::from_counts(
        pairs
            .iter()
            .map(|&(fp, fnn)| OutcomeCounts::new(n, fp, fnn).unwrap())
            .collect(),
    )
    .unwrap()
}
