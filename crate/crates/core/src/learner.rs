//! Logistic-regression score model trained by full-batch gradient descent,
//! plus the 201-point threshold grid that serves as the hypothesis space for
//! the best-response oracle.

use crate::entropy::OutcomeCounts;
use crate::error::{Error, Result};

/// Number of thresholds in the oracle grid: 0, 0.005, ..., 1.0.
pub const THRESHOLD_GRID_SIZE: usize = 201;

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl FeatureMatrix {
    pub fn new(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "matrix data length {} does not match {rows} x {cols}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("feature values must be finite"));
        }
        Ok(Self { data, rows, cols })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::input("ragged feature rows"));
        }
        Self::new(rows.iter().flatten().copied().collect(), n, d)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Select a subset of rows by index.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            data,
            rows: indices.len(),
            cols: self.cols,
        }
    }
}

/// Column means and standard deviations fitted on the training split and
/// applied unchanged to any later split.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &FeatureMatrix) -> Self {
        let n = x.rows as f64;
        let mut means = vec![0.0; x.cols];
        for i in 0..x.rows {
            for (j, m) in means.iter_mut().enumerate() {
                *m += x.get(i, j);
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; x.cols];
        for i in 0..x.rows {
            for (j, s) in stds.iter_mut().enumerate() {
                let d = x.get(i, j) - means[j];
                *s += d * d;
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            // constant columns pass through unscaled
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Self { means, stds }
    }

    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.cols != self.means.len() {
            return Err(Error::input(format!(
                "standardizer fitted on {} columns, got {}",
                self.means.len(),
                x.cols
            )));
        }
        let mut data = Vec::with_capacity(x.data.len());
        for i in 0..x.rows {
            for j in 0..x.cols {
                data.push((x.get(i, j) - self.means[j]) / self.stds[j]);
            }
        }
        FeatureMatrix::new(data, x.rows, x.cols)
    }
}

/// Gradient-descent settings for the logistic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop once the gradient infinity norm drops below this.
    pub gradient_tolerance: f64,
    pub l2_penalty: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_iterations: 5000,
            gradient_tolerance: 1e-6,
            l2_penalty: 0.0,
        }
    }
}

/// Fitted logistic score model. Scores are kept strictly inside (0, 1) so
/// the inclusive threshold rule behaves at the grid endpoints.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub final_loss: f64,
}

fn sigmoid(z: f64) -> f64 {
    // clamp keeps scores strictly inside (0, 1) in f64
    let z = z.clamp(-35.0, 35.0);
    1.0 / (1.0 + (-z).exp())
}

/// Mean binary cross-entropy plus the L2 penalty, the objective minimized by
/// [`train_logistic`].
pub fn logistic_loss(
    weights: &[f64],
    bias: f64,
    x: &FeatureMatrix,
    y: &[bool],
    l2_penalty: f64,
) -> f64 {
    let n = x.rows() as f64;
    let mut loss = 0.0;
    for (i, &label) in y.iter().enumerate() {
        let z: f64 = x.row(i).iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() + bias;
        let p = sigmoid(z);
        loss -= if label { p.ln() } else { (1.0 - p).ln() };
    }
    loss / n + 0.5 * l2_penalty * weights.iter().map(|w| w * w).sum::<f64>()
}

fn loss_gradient(
    weights: &[f64],
    bias: f64,
    x: &FeatureMatrix,
    y: &[bool],
    l2_penalty: f64,
) -> (Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (i, &label) in y.iter().enumerate() {
        let z: f64 = x.row(i).iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() + bias;
        let residual = sigmoid(z) - if label { 1.0 } else { 0.0 };
        for (g, v) in grad_w.iter_mut().zip(x.row(i)) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2_penalty * w;
    }
    (grad_w, grad_b / n)
}

/// Fit the logistic model by deterministic full-batch gradient descent from
/// zero initial weights. Both classes must be present; a single-class sample
/// would push scores to a degenerate constant.
pub fn train_logistic(x: &FeatureMatrix, y: &[bool], config: &TrainConfig) -> Result<LogisticModel> {
    if x.rows() != y.len() {
        return Err(Error::input(format!(
            "got {} rows for {} labels",
            x.rows(),
            y.len()
        )));
    }
    if x.rows() < 2 {
        return Err(Error::input("need at least two samples"));
    }
    let positives = y.iter().filter(|&&v| v).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::input(
            "labels are single-class; scores would be degenerate",
        ));
    }

    let mut weights = vec![0.0; x.cols()];
    let mut bias = 0.0;
    let mut iterations = 0;
    for _ in 0..config.max_iterations {
        let (grad_w, grad_b) = loss_gradient(&weights, bias, x, y, config.l2_penalty);
        let inf_norm = grad_w
            .iter()
            .chain(std::iter::once(&grad_b))
            .fold(0.0f64, |m, g| m.max(g.abs()));
        if inf_norm < config.gradient_tolerance {
            break;
        }
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_b;
        iterations += 1;
    }
    let final_loss = logistic_loss(&weights, bias, x, y, config.l2_penalty);
    Ok(LogisticModel {
        weights,
        bias,
        iterations,
        final_loss,
    })
}

/// Scores of the fitted model on a feature matrix, strictly inside (0, 1).
pub fn predict_scores(model: &LogisticModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    if x.cols() != model.weights.len() {
        return Err(Error::input(format!(
            "model has {} weights, matrix has {} columns",
            model.weights.len(),
            x.cols()
        )));
    }
    Ok((0..x.rows())
        .map(|i| {
            let z: f64 = x
                .row(i)
                .iter()
                .zip(&model.weights)
                .map(|(v, w)| v * w)
                .sum::<f64>()
                + model.bias;
            sigmoid(z)
        })
        .collect())
}

/// A decision threshold on scores: predict positive iff `score >= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThresholdHypothesis {
    pub threshold: f64,
    pub index: usize,
}

/// Confusion summary of one threshold on a score/label sample.
pub fn evaluate_hypothesis(
    h: &ThresholdHypothesis,
    scores: &[f64],
    labels: &[bool],
) -> OutcomeCounts {
    debug_assert_eq!(scores.len(), labels.len());
    let mut n_fp = 0;
    let mut n_fn = 0;
    for (&s, &y) in scores.iter().zip(labels) {
        let predicted = s >= h.threshold;
        if predicted && !y {
            n_fp += 1;
        } else if !predicted && y {
            n_fn += 1;
        }
    }
    OutcomeCounts {
        n: scores.len(),
        n_fp,
        n_fn,
    }
}

/// An ordered grid of threshold hypotheses with their confusion summaries
/// cached on a fixed sample.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSpace {
    thresholds: Vec<f64>,
    counts: Vec<OutcomeCounts>,
    sample_size: usize,
}

impl HypothesisSpace {
    /// Build the standard 201-point grid over `[0, 1]` with step 5/1000 and
    /// cache each threshold's counts on the given sample.
    pub fn from_scores(scores: &[f64], labels: &[bool]) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::input(format!(
                "got {} scores for {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if scores.is_empty() {
            return Err(Error::input("sample must not be empty"));
        }
        let thresholds: Vec<f64> = (0..THRESHOLD_GRID_SIZE)
            .map(|i| i as f64 / (THRESHOLD_GRID_SIZE - 1) as f64)
            .collect();
        let counts = thresholds
            .iter()
            .enumerate()
            .map(|(index, &threshold)| {
                evaluate_hypothesis(&ThresholdHypothesis { threshold, index }, scores, labels)
            })
            .collect();
        Ok(Self {
            thresholds,
            counts,
            sample_size: scores.len(),
        })
    }

    /// A synthetic space defined directly by confusion summaries, for solver
    /// studies on hand-built grids. Thresholds are evenly spaced stand-ins.
    pub fn from_counts(counts: Vec<OutcomeCounts>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::input("hypothesis space must not be empty"));
        }
        let n = counts[0].n;
        if counts.iter().any(|c| c.n != n) {
            return Err(Error::input("all hypotheses must share one sample size"));
        }
        let m = counts.len();
        let thresholds = (0..m)
            .map(|i| if m == 1 { 0.0 } else { i as f64 / (m - 1) as f64 })
            .collect();
        Ok(Self {
            thresholds,
            counts,
            sample_size: n,
        })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn hypothesis(&self, index: usize) -> ThresholdHypothesis {
        ThresholdHypothesis {
            threshold: self.thresholds[index],
            index,
        }
    }

    pub fn counts(&self, index: usize) -> &OutcomeCounts {
        &self.counts[index]
    }

    pub fn all_counts(&self) -> &[OutcomeCounts] {
        &self.counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable_toy() -> (FeatureMatrix, Vec<bool>) {
        let x = FeatureMatrix::from_rows(&[
            vec![-2.0, -1.5],
            vec![-1.6, -2.2],
            vec![-2.4, -0.8],
            vec![-1.0, -1.0],
            vec![1.8, 1.2],
            vec![2.2, 2.4],
            vec![1.1, 1.9],
            vec![2.7, 0.9],
        ])
        .unwrap();
        let y = vec![false, false, false, false, true, true, true, true];
        (x, y)
    }

    #[test]
    fn separable_data_reaches_full_accuracy() {
        let (x, y) = separable_toy();
        let model = train_logistic(&x, &y, &TrainConfig::default()).unwrap();
        let scores = predict_scores(&model, &x).unwrap();
        let half = ThresholdHypothesis {
            threshold: 0.5,
            index: 100,
        };
        let counts = evaluate_hypothesis(&half, &scores, &y);
        assert_eq!(counts.n_fp + counts.n_fn, 0);
    }

    #[test]
    fn single_class_labels_rejected() {
        let (x, _) = separable_toy();
        let y = vec![true; 8];
        assert!(train_logistic(&x, &y, &TrainConfig::default()).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (x, y) = separable_toy();
        let weights = vec![0.3, -0.7];
        let bias = 0.1;
        let l2 = 0.05;
        let (grad_w, grad_b) = loss_gradient(&weights, bias, &x, &y, l2);
        let h = 1e-6;
        for j in 0..weights.len() {
            let mut up = weights.clone();
            let mut down = weights.clone();
            up[j] += h;
            down[j] -= h;
            let numeric = (logistic_loss(&up, bias, &x, &y, l2)
                - logistic_loss(&down, bias, &x, &y, l2))
                / (2.0 * h);
            assert!(
                (numeric - grad_w[j]).abs() <= 1e-6,
                "weight {j}: {numeric} vs {}",
                grad_w[j]
            );
        }
        let numeric_b = (logistic_loss(&weights, bias + h, &x, &y, l2)
            - logistic_loss(&weights, bias - h, &x, &y, l2))
            / (2.0 * h);
        assert!((numeric_b - grad_b).abs() <= 1e-6);
    }

    #[test]
    fn loss_non_increasing_over_training_prefixes() {
        let (x, y) = separable_toy();
        let mut previous = f64::INFINITY;
        for max_iterations in [10, 50, 100, 500, 1000] {
            let cfg = TrainConfig {
                max_iterations,
                ..TrainConfig::default()
            };
            let model = train_logistic(&x, &y, &cfg).unwrap();
            assert!(model.final_loss <= previous + 1e-12);
            previous = model.final_loss;
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (x, y) = separable_toy();
        let a = train_logistic(&x, &y, &TrainConfig::default()).unwrap();
        let b = train_logistic(&x, &y, &TrainConfig::default()).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn zero_model_scores_half() {
        let model = LogisticModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            iterations: 0,
            final_loss: 0.0,
        };
        let x = FeatureMatrix::from_rows(&[vec![3.0, -1.0], vec![0.5, 2.0]]).unwrap();
        let scores = predict_scores(&model, &x).unwrap();
        assert!(scores.iter().all(|&s| s == 0.5));
    }

    #[test]
    fn scores_stay_strictly_inside_unit_interval() {
        let model = LogisticModel {
            weights: vec![1000.0],
            bias: 0.0,
            iterations: 0,
            final_loss: 0.0,
        };
        let x = FeatureMatrix::from_rows(&[vec![100.0], vec![-100.0]]).unwrap();
        let scores = predict_scores(&model, &x).unwrap();
        assert!(scores[0] < 1.0 && scores[0] > 0.99);
        assert!(scores[1] > 0.0 && scores[1] < 0.01);
    }

    #[test]
    fn sigmoid_agrees_with_hand_values() {
        let model = LogisticModel {
            weights: vec![2.0, -1.0],
            bias: 0.5,
            iterations: 0,
            final_loss: 0.0,
        };
        let x = FeatureMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![-1.0, 2.0],
        ])
        .unwrap();
        let scores = predict_scores(&model, &x).unwrap();
        let expect = |z: f64| 1.0 / (1.0 + (-z).exp());
        assert!((scores[0] - expect(0.5)).abs() < 1e-15);
        assert!((scores[1] - expect(1.5)).abs() < 1e-15);
        assert!((scores[2] - expect(-3.5)).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let model = LogisticModel {
            weights: vec![1.0, 2.0],
            bias: 0.0,
            iterations: 0,
            final_loss: 0.0,
        };
        let x = FeatureMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(predict_scores(&model, &x).is_err());
    }

    #[test]
    fn threshold_grid_shape() {
        let scores = [0.1, 0.4, 0.6, 0.9];
        let labels = [false, false, true, true];
        let space = HypothesisSpace::from_scores(&scores, &labels).unwrap();
        assert_eq!(space.len(), 201);
        assert_eq!(space.hypothesis(0).threshold, 0.0);
        assert_eq!(space.hypothesis(200).threshold, 1.0);
        assert!((space.hypothesis(1).threshold - 0.005).abs() < 1e-15);
    }

    #[test]
    fn extreme_thresholds() {
        let scores = [0.2, 0.7, 0.4];
        let labels = [false, true, true];
        // threshold 0 predicts everything positive
        let all_pos = evaluate_hypothesis(
            &ThresholdHypothesis { threshold: 0.0, index: 0 },
            &scores,
            &labels,
        );
        assert_eq!(all_pos.n_fn, 0);
        assert_eq!(all_pos.n_fp, 1);
        // threshold 1 with scores strictly below 1 predicts everything negative
        let all_neg = evaluate_hypothesis(
            &ThresholdHypothesis { threshold: 1.0, index: 200 },
            &scores,
            &labels,
        );
        assert_eq!(all_neg.n_fp, 0);
        assert_eq!(all_neg.n_fn, 2);
    }

    #[test]
    fn cached_counts_match_fresh_evaluation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let scores: Vec<f64> = (0..80).map(|_| rng.gen::<f64>()).collect();
        let labels: Vec<bool> = (0..80).map(|_| rng.gen::<bool>()).collect();
        let space = HypothesisSpace::from_scores(&scores, &labels).unwrap();
        for i in 0..space.len() {
            let fresh = evaluate_hypothesis(&space.hypothesis(i), &scores, &labels);
            assert_eq!(*space.counts(i), fresh);
        }
    }

    #[test]
    fn counts_monotone_in_threshold() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let scores: Vec<f64> = (0..120).map(|_| rng.gen::<f64>()).collect();
        let labels: Vec<bool> = (0..120).map(|_| rng.gen::<bool>()).collect();
        let space = HypothesisSpace::from_scores(&scores, &labels).unwrap();
        for pair in space.all_counts().windows(2) {
            assert!(pair[1].n_fp <= pair[0].n_fp);
            assert!(pair[1].n_fn >= pair[0].n_fn);
        }
    }

    #[test]
    fn brute_force_count_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let scores: Vec<f64> = (0..60).map(|_| rng.gen::<f64>()).collect();
        let labels: Vec<bool> = (0..60).map(|_| rng.gen::<bool>()).collect();
        let h = ThresholdHypothesis { threshold: 0.37, index: 0 };
        let counts = evaluate_hypothesis(&h, &scores, &labels);
        let mut fp = 0;
        let mut fnn = 0;
        for i in 0..60 {
            match (scores[i] >= 0.37, labels[i]) {
                (true, false) => fp += 1,
                (false, true) => fnn += 1,
                _ => {}
            }
        }
        assert_eq!(counts.n_fp, fp);
        assert_eq!(counts.n_fn, fnn);
    }
}
