//! CSV ingestion: binary label mapping, dense group ids, one-hot encoding of
//! categorical columns, and the seeded train/test split.

use std::collections::BTreeSet;
use std::path::PathBuf;

use gefair::error::{Error, Result};
use gefair::FeatureMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Where and how to read a dataset.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub label_column: String,
    pub group_column: String,
    /// Raw cell value mapped to the positive label.
    pub positive_label: String,
    /// Feature columns to one-hot encode; every other feature column is
    /// parsed as a number.
    pub categorical_columns: Vec<String>,
    /// Fraction of rows assigned to the training split.
    pub split_fraction: f64,
    pub split_seed: u64,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>, label: &str, group: &str, positive: &str) -> Self {
        Self {
            path: path.into(),
            label_column: label.to_string(),
            group_column: group.to_string(),
            positive_label: positive.to_string(),
            categorical_columns: Vec::new(),
            split_fraction: 0.7,
            split_seed: 0,
        }
    }
}

/// Fully decoded dataset: features are encoded but not yet standardized
/// (standardization statistics belong to the training split).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub features: FeatureMatrix,
    pub labels: Vec<bool>,
    pub groups: Vec<usize>,
    pub group_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl LoadedDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Read and encode a CSV dataset. Categorical values and group
/// names are indexed in order of first appearance, which makes the encoding
/// deterministic for a fixed file.
pub fn load_dataset(spec: &DatasetSpec) -> Result<LoadedDataset> {
    let mut reader = csv::Reader::from_path(&spec.path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", spec.path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::InvalidInput(format!("bad header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();

    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("column '{name}' not found in header")))
    };
    let label_idx = find(&spec.label_column)?;
    let group_idx = find(&spec.group_column)?;
    for c in &spec.categorical_columns {
        find(c)?;
    }
    let categorical: BTreeSet<usize> = spec
        .categorical_columns
        .iter()
        .map(|c| find(c))
        .collect::<Result<_>>()?;

    let records: Vec<csv::StringRecord> = reader
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidInput(format!("bad record: {e}")))?;
    if records.is_empty() {
        return Err(Error::InvalidInput("dataset has no rows".into()));
    }

    // labels: must be binary with the declared positive value present
    let mut distinct_labels = BTreeSet::new();
    for r in &records {
        distinct_labels.insert(r[label_idx].to_string());
    }
    if distinct_labels.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "label column '{}' must take exactly 2 values, found {:?}",
            spec.label_column, distinct_labels
        )));
    }
    if !distinct_labels.contains(&spec.positive_label) {
        return Err(Error::InvalidInput(format!(
            "positive label '{}' never appears in column '{}'",
            spec.positive_label, spec.label_column
        )));
    }
    let labels: Vec<bool> = records
        .iter()
        .map(|r| r[label_idx] == *spec.positive_label)
        .collect();

    // groups: dense ids in order of first appearance
    let mut group_names: Vec<String> = Vec::new();
    let groups: Vec<usize> = records
        .iter()
        .map(|r| {
            let name = &r[group_idx];
            match group_names.iter().position(|g| g == name) {
                Some(i) => i,
                None => {
                    group_names.push(name.to_string());
                    group_names.len() - 1
                }
            }
        })
        .collect();

    // feature columns in header order, categorical ones expanded one-hot
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != label_idx && i != group_idx)
        .collect();
    let mut feature_names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &col in &feature_cols {
        if categorical.contains(&col) {
            let mut categories: Vec<String> = Vec::new();
            for r in &records {
                let v = &r[col];
                if !categories.iter().any(|c| c == v) {
                    categories.push(v.to_string());
                }
            }
            for cat in &categories {
                feature_names.push(format!("{}={cat}", headers[col]));
                columns.push(
                    records
                        .iter()
                        .map(|r| if r[col] == **cat { 1.0 } else { 0.0 })
                        .collect(),
                );
            }
        } else {
            feature_names.push(headers[col].clone());
            columns.push(
                records
                    .iter()
                    .enumerate()
                    .map(|(row, r)| {
                        r[col].trim().parse::<f64>().map_err(|_| {
                            Error::InvalidInput(format!(
                                "row {}, column '{}': cannot parse '{}' as a number \
                                 (declare the column categorical?)",
                                row + 2,
                                headers[col],
                                &r[col]
                            ))
                        })
                    })
                    .collect::<Result<_>>()?,
            );
        }
    }

    let n = records.len();
    let d = columns.len();
    let mut data = Vec::with_capacity(n * d);
    for row in 0..n {
        for col in &columns {
            data.push(col[row]);
        }
    }
    Ok(LoadedDataset {
        features: FeatureMatrix::new(data, n, d)?,
        labels,
        groups,
        group_names,
        feature_names,
    })
}

/// Seeded shuffle split; both sides are guaranteed non-empty.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let train_size = ((n as f64 * fraction).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let test = indices.split_off(train_size.min(n));
    (indices, test)
}
