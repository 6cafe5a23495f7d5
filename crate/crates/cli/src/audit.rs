//! Metrics-only audit of a predictions file: index values, decomposition,
//! group rates, and the fairness predicates, with no training involved.

use std::path::Path;

use gefair::error::{Error, Result};
use gefair::{
    check_predicates, compute_group_rates, decompose, BenefitParams, DecompositionReport,
    EntropyOrder, FairnessPredicateReport, GroupRates, LabeledPredictions,
};

/// Column layout of a predictions CSV.
#[derive(Debug, Clone)]
pub struct AuditSpec {
    pub label_column: String,
    pub prediction_column: String,
    pub group_column: String,
    pub positive_label: String,
}

impl Default for AuditSpec {
    fn default() -> Self {
        Self {
            label_column: "label".into(),
            prediction_column: "prediction".into(),
            group_column: "group".into(),
            positive_label: "1".into(),
        }
    }
}

/// Index and decomposition at one order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AuditEntropy {
    pub alpha: f64,
    pub total: f64,
    pub within: f64,
    pub between: f64,
    pub group_entropies: Vec<f64>,
    pub group_means: Vec<f64>,
}

/// Full audit payload.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AuditReport {
    pub n: usize,
    pub group_names: Vec<String>,
    pub error_rate: f64,
    pub entropies: Vec<AuditEntropy>,
    pub rates: GroupRates,
    pub predicates: FairnessPredicateReport,
}

/// Read a predictions CSV into labels, predictions, and groups.
pub fn load_predictions(
    path: &Path,
    spec: &AuditSpec,
) -> Result<(LabeledPredictions, Vec<String>)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
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
    let pred_idx = find(&spec.prediction_column)?;
    let group_idx = find(&spec.group_column)?;

    let mut labels = Vec::new();
    let mut predictions = Vec::new();
    let mut groups = Vec::new();
    let mut group_names: Vec<String> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::InvalidInput(format!("bad record: {e}")))?;
        labels.push(record[label_idx] == *spec.positive_label);
        predictions.push(record[pred_idx] == *spec.positive_label);
        let name = &record[group_idx];
        let id = match group_names.iter().position(|g| g == name) {
            Some(i) => i,
            None => {
                group_names.push(name.to_string());
                group_names.len() - 1
            }
        };
        groups.push(id);
    }
    Ok((LabeledPredictions::new(labels, predictions, groups)?, group_names))
}

/// Run the audit at several orders.
pub fn audit(
    data: &LabeledPredictions,
    group_names: Vec<String>,
    alphas: &[f64],
    params: &BenefitParams,
    tolerance: f64,
) -> Result<AuditReport> {
    let benefits = data.benefits(params);
    let partition = data.partition();
    let entropies = alphas
        .iter()
        .map(|&alpha| {
            let order = EntropyOrder::new(alpha)?;
            let report: DecompositionReport = decompose(&benefits, &partition, order)?;
            Ok(AuditEntropy {
                alpha,
                total: report.total,
                within: report.within,
                between: report.between,
                group_entropies: report.group_entropies,
                group_means: report.group_means,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rates = compute_group_rates(data);
    let predicates = check_predicates(&rates, tolerance);
    let errors = data
        .labels()
        .iter()
        .zip(data.predictions())
        .filter(|(y, h)| y != h)
        .count();
    Ok(AuditReport {
        n: data.len(),
        group_names,
        error_rate: errors as f64 / data.len() as f64,
        entropies,
        rates,
        predicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn audit_of_worked_example() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        // the ten-person two-group sample with a = 1, c = 3 benefits
        let rows = [
            (1, 1, "g1"), (1, 0, "g1"), (1, 1, "g1"), (1, 0, "g1"), (0, 1, "g1"),
            (1, 1, "g2"), (0, 1, "g2"), (1, 1, "g2"), (1, 1, "g2"), (1, 0, "g2"),
        ];
        writeln!(f, "label,prediction,group").unwrap();
        for (y, h, g) in rows {
            writeln!(f, "{y},{h},{g}").unwrap();
        }
        f.flush().unwrap();

        let (data, names) = load_predictions(f.path(), &AuditSpec::default()).unwrap();
        assert_eq!(names, vec!["g1", "g2"]);
        let params = BenefitParams::new(1.0, 3.0).unwrap();
        let report = audit(&data, names, &[1.0], &params, 0.01).unwrap();
        assert_eq!(report.n, 10);
        assert!((report.error_rate - 0.5).abs() < 1e-15);
        let e = &report.entropies[0];
        assert!((e.total - 0.029372790674483534).abs() < 1e-14);
        assert!((e.group_means[0] - 2.8).abs() < 1e-15);
        assert!(!report.predicates.equal_prediction);
    }
}
