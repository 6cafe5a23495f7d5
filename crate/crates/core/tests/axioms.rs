//! Property suite for the defining axioms of the index: symmetry,
//! non-negativity with equality only at constant vectors, replication and
//! scale invariance, strict decrease under progressive transfers, and the
//! additive decomposition identity.

use gefair::{
    apply_transfer, decompose, entropy_from_counts, entropy_index, BenefitParams, BenefitVector,
    EntropyOrder, GroupPartition, OutcomeCounts,
};
use proptest::prelude::*;

const ORDERS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.0];

fn order(alpha: f64) -> EntropyOrder {
    EntropyOrder::new(alpha).unwrap()
}

fn benefit_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5f64..20.0, 2..40)
}

proptest! {
    #[test]
    fn symmetry_under_permutation(values in benefit_values(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = values.clone();
        shuffled.shuffle(&mut rng);
        for alpha in ORDERS {
            let a = entropy_index(&BenefitVector::new(values.clone()).unwrap(), order(alpha)).unwrap();
            let b = entropy_index(&BenefitVector::new(shuffled.clone()).unwrap(), order(alpha)).unwrap();
            let scale = a.abs().max(1e-30);
            prop_assert!((a - b).abs() / scale <= 1e-12, "alpha={alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn non_negative_and_zero_only_at_constants(values in benefit_values()) {
        for alpha in ORDERS {
            let i = entropy_index(&BenefitVector::new(values.clone()).unwrap(), order(alpha)).unwrap();
            prop_assert!(i >= 0.0);
            let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let constant = max - min <= 1e-12 * max;
            if constant {
                prop_assert_eq!(i, 0.0);
            } else {
                prop_assert!(i > 0.0, "alpha={alpha}: {i} for spread {}", max - min);
            }
        }
    }

    #[test]
    fn replication_invariance(values in benefit_values()) {
        for alpha in ORDERS {
            let base = entropy_index(&BenefitVector::new(values.clone()).unwrap(), order(alpha)).unwrap();
            for k in [2usize, 3, 5] {
                let mut repeated = Vec::with_capacity(values.len() * k);
                for _ in 0..k {
                    repeated.extend_from_slice(&values);
                }
                let rep = entropy_index(&BenefitVector::new(repeated).unwrap(), order(alpha)).unwrap();
                prop_assert!((rep - base).abs() <= 1e-10 * base.max(1.0), "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn scale_invariance(values in benefit_values()) {
        for alpha in ORDERS {
            let base = entropy_index(&BenefitVector::new(values.clone()).unwrap(), order(alpha)).unwrap();
            for r in [0.5, 2.0, 10.0] {
                let scaled: Vec<f64> = values.iter().map(|v| v * r).collect();
                let s = entropy_index(&BenefitVector::new(scaled).unwrap(), order(alpha)).unwrap();
                prop_assert!((s - base).abs() <= 1e-10 * base.max(1.0), "alpha={alpha} r={r}");
            }
        }
    }

    #[test]
    fn progressive_transfer_strictly_decreases(values in prop::collection::vec(0.5f64..20.0, 3..30)) {
        // pick the extremes so a legal transfer always exists when they differ enough
        let from = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let to = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        prop_assume!(values[from] - values[to] > 0.1);
        let delta = (values[from] - values[to]) / 4.0;
        let b = BenefitVector::new(values).unwrap();
        let transferred = apply_transfer(&b, from, to, delta).unwrap();
        prop_assert!((transferred.mean() - b.mean()).abs() <= 1e-12 * b.mean());
        for alpha in ORDERS {
            let before = entropy_index(&b, order(alpha)).unwrap();
            let after = entropy_index(&transferred, order(alpha)).unwrap();
            prop_assert!(after < before, "alpha={alpha}: {after} !< {before}");
        }
    }

    #[test]
    fn decomposition_identity(
        values in prop::collection::vec(0.5f64..20.0, 2..50),
        group_seed in any::<u64>(),
        group_count in 1usize..=5,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(group_seed);
        let n = values.len();
        let group_count = group_count.min(n);
        let mut assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..group_count)).collect();
        // force density
        for (g, slot) in assignment.iter_mut().take(group_count).enumerate() {
            *slot = g;
        }
        let b = BenefitVector::new(values).unwrap();
        let partition = GroupPartition::new(assignment).unwrap();
        for alpha in ORDERS {
            let report = decompose(&b, &partition, order(alpha)).unwrap();
            let direct = entropy_index(&b, order(alpha)).unwrap();
            let gap = (report.within + report.between - direct).abs();
            prop_assert!(gap <= 1e-10 * direct.max(1.0), "alpha={alpha}: gap {gap}");
            prop_assert!(report.between >= 0.0);
            if alpha == 0.0 || alpha == 1.0 {
                let weight_sum: f64 = report.weights.iter().sum();
                prop_assert!((weight_sum - 1.0).abs() <= 1e-12, "weights sum {weight_sum}");
            }
        }
    }

    #[test]
    fn counts_equal_expanded_vector(n in 1usize..=60, fp_share in 0.0f64..1.0, fn_share in 0.0f64..1.0) {
        let fp = ((n as f64) * fp_share) as usize;
        let fnn = (((n - fp) as f64) * fn_share) as usize;
        let params = BenefitParams::new(5.0, 8.0).unwrap();
        let counts = OutcomeCounts::new(n, fp, fnn).unwrap();
        let mut values = vec![8.0; n - fp - fnn];
        values.extend(std::iter::repeat_n(13.0, fp));
        values.extend(std::iter::repeat_n(3.0, fnn));
        for alpha in ORDERS {
            let closed = entropy_from_counts(&counts, &params, order(alpha)).unwrap();
            let expanded = entropy_index(&BenefitVector::new(values.clone()).unwrap(), order(alpha)).unwrap();
            prop_assert!((closed - expanded).abs() <= 1e-12, "alpha={alpha}");
        }
    }
}

/// The compensated accumulation must hold the decomposition identity to
/// 1e-10 relative error at a population of 1e5.
#[test]
fn decomposition_identity_at_scale() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let n = 100_000;
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..20.0)).collect();
    let assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..7)).collect();
    let b = BenefitVector::new(values).unwrap();
    let partition = GroupPartition::new(assignment).unwrap();
    for alpha in ORDERS {
        let report = decompose(&b, &partition, order(alpha)).unwrap();
        let gap = (report.within + report.between - report.total).abs() / report.total;
        assert!(gap <= 1e-10, "alpha={alpha}: relative gap {gap}");
    }
}
