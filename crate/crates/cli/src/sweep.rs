//! Grid sweeps over (order, budget, benefit offset, seed) cells, with CSV
//! emission, per-cell isolation, cross-seed aggregation, and the soft trend
//! report over the budget axis.

use std::path::Path;

use gefair::error::{Error, Result};
use gefair::{BenefitParams, EntropyOrder, LambdaMode, SolverConfig};
use rayon::prelude::*;

use crate::dataset::{load_dataset, DatasetSpec, LoadedDataset};
use crate::run::{run_on_loaded, EvalConfig, RunOutput, RunRecord};

/// Solver settings shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverSettings {
    pub lambda_max: f64,
    pub nu: f64,
    pub t_cap: usize,
    pub lambda_mode: LambdaMode,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            lambda_max: 20.0,
            nu: 0.005,
            t_cap: 10_000,
            lambda_mode: LambdaMode::Sampled,
        }
    }
}

/// The grid of a sweep: entropy budgets, index orders, one benefit spread
/// with several offsets, and one seed per repetition.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepConfig {
    pub gammas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub benefit_spread: f64,
    pub benefit_offsets: Vec<f64>,
    pub seeds: Vec<u64>,
    pub solver: SolverSettings,
    pub draws: usize,
}

impl SweepConfig {
    pub fn new(gammas: Vec<f64>) -> Self {
        Self {
            gammas,
            alphas: vec![0.0, 1.0, 2.0],
            benefit_spread: 5.0,
            benefit_offsets: vec![8.0, 9.0, 10.0],
            seeds: vec![0],
            solver: SolverSettings::default(),
            draws: 10_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() || self.alphas.is_empty() || self.benefit_offsets.is_empty() {
            return Err(Error::InvalidInput("sweep grids must be non-empty".into()));
        }
        if self.gammas.iter().any(|&g| g.is_nan() || g <= 0.0) {
            return Err(Error::InvalidInput(
                "every entropy budget must be positive".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidInput("need at least one seed".into()));
        }
        Ok(())
    }
}

/// One sweep cell: identifiers plus either a record or an error message.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub alpha: f64,
    pub gamma: f64,
    pub benefit_offset: f64,
    pub seed: u64,
    pub record: Option<RunRecord>,
    pub error: Option<String>,
    pub output: Option<RunOutput>,
}

/// Cross-seed aggregate of one (alpha, offset, gamma) cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CellSummary {
    pub alpha: f64,
    pub benefit_offset: f64,
    pub gamma: f64,
    pub seeds: usize,
    pub mean_test_error: f64,
    pub test_error_ci: f64,
    pub mean_test_entropy: f64,
    pub test_entropy_ci: f64,
    pub mean_test_between: f64,
    pub mean_train_entropy: f64,
}

/// Direction counts of the budget curves for one (alpha, offset) slice:
/// how often the cross-seed means move up or down as the budget grows.
/// A soft diagnostic, not a gate.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrendReport {
    pub alpha: f64,
    pub benefit_offset: f64,
    pub gamma_points: usize,
    pub entropy_up_steps: usize,
    pub entropy_down_steps: usize,
    pub error_up_steps: usize,
    pub error_down_steps: usize,
}

impl TrendReport {
    pub fn describe(&self) -> String {
        format!(
            "alpha={} c={}: over {} budgets, entropy moved up {} / down {} steps, \
             error up {} / down {} steps",
            self.alpha,
            self.benefit_offset,
            self.gamma_points,
            self.entropy_up_steps,
            self.entropy_down_steps,
            self.error_up_steps,
            self.error_down_steps
        )
    }
}

/// Everything a sweep produces.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub cells: Vec<CellResult>,
    pub summaries: Vec<CellSummary>,
    pub trends: Vec<TrendReport>,
}

fn derive_seed(base: u64, cell_index: usize) -> u64 {
    // splitmix-style mix keeps per-cell streams independent
    let mut z = base ^ (cell_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run every cell of the grid. Cells execute concurrently; a failed cell is
/// recorded with its error and never disturbs the others. Results come back
/// sorted by (alpha, offset, gamma, seed).
pub fn run_sweep(spec: &DatasetSpec, sweep: &SweepConfig) -> Result<SweepOutcome> {
    sweep.validate()?;
    let data = load_dataset(spec)?;
    run_sweep_on_loaded(&data, spec, sweep)
}

pub fn run_sweep_on_loaded(
    data: &LoadedDataset,
    spec: &DatasetSpec,
    sweep: &SweepConfig,
) -> Result<SweepOutcome> {
    sweep.validate()?;
    let mut grid = Vec::new();
    for &alpha in &sweep.alphas {
        for &offset in &sweep.benefit_offsets {
            for &gamma in &sweep.gammas {
                for &seed in &sweep.seeds {
                    grid.push((alpha, offset, gamma, seed));
                }
            }
        }
    }

    let mut cells: Vec<CellResult> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &(alpha, offset, gamma, seed))| {
            let attempt = || -> Result<RunOutput> {
                let order = EntropyOrder::new(alpha)?;
                let params = BenefitParams::new(sweep.benefit_spread, offset)?;
                let config = SolverConfig {
                    gamma,
                    order,
                    lambda_max: sweep.solver.lambda_max,
                    nu: sweep.solver.nu,
                    t_cap: sweep.solver.t_cap,
                    seed: derive_seed(seed, index),
                    lambda_mode: sweep.solver.lambda_mode,
                };
                run_on_loaded(data, spec, &config, &params, &EvalConfig { draws: sweep.draws })
            };
            match attempt() {
                Ok(output) => CellResult {
                    alpha,
                    gamma,
                    benefit_offset: offset,
                    seed,
                    record: Some(output.record.clone()),
                    error: None,
                    output: Some(output),
                },
                Err(e) => CellResult {
                    alpha,
                    gamma,
                    benefit_offset: offset,
                    seed,
                    record: None,
                    error: Some(e.to_string()),
                    output: None,
                },
            }
        })
        .collect();

    cells.sort_by(|a, b| {
        (a.alpha, a.benefit_offset, a.gamma, a.seed)
            .partial_cmp(&(b.alpha, b.benefit_offset, b.gamma, b.seed))
            .unwrap()
    });

    let summaries = aggregate(&cells);
    let trends = trend_report(&summaries);
    Ok(SweepOutcome {
        cells,
        summaries,
        trends,
    })
}

fn mean_and_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

fn aggregate(cells: &[CellResult]) -> Vec<CellSummary> {
    let mut keys: Vec<(f64, f64, f64)> = cells
        .iter()
        .map(|c| (c.alpha, c.benefit_offset, c.gamma))
        .collect();
    keys.dedup();
    keys.iter()
        .filter_map(|&(alpha, offset, gamma)| {
            let records: Vec<&RunRecord> = cells
                .iter()
                .filter(|c| {
                    c.alpha == alpha && c.benefit_offset == offset && c.gamma == gamma
                })
                .filter_map(|c| c.record.as_ref())
                .collect();
            if records.is_empty() {
                return None;
            }
            let collect = |f: &dyn Fn(&RunRecord) -> f64| -> Vec<f64> {
                records.iter().map(|r| f(r)).collect()
            };
            let (mean_err, err_ci) = mean_and_ci(&collect(&|r| r.test_error_exact));
            let (mean_ent, ent_ci) = mean_and_ci(&collect(&|r| r.test_entropy_exact));
            let (mean_between, _) = mean_and_ci(&collect(&|r| r.test_between_exact));
            let (mean_train_ent, _) = mean_and_ci(&collect(&|r| r.train_entropy));
            Some(CellSummary {
                alpha,
                benefit_offset: offset,
                gamma,
                seeds: records.len(),
                mean_test_error: mean_err,
                test_error_ci: err_ci,
                mean_test_entropy: mean_ent,
                test_entropy_ci: ent_ci,
                mean_test_between: mean_between,
                mean_train_entropy: mean_train_ent,
            })
        })
        .collect()
}

fn trend_report(summaries: &[CellSummary]) -> Vec<TrendReport> {
    let mut keys: Vec<(f64, f64)> = summaries
        .iter()
        .map(|s| (s.alpha, s.benefit_offset))
        .collect();
    keys.dedup();
    keys.iter()
        .map(|&(alpha, offset)| {
            let mut slice: Vec<&CellSummary> = summaries
                .iter()
                .filter(|s| s.alpha == alpha && s.benefit_offset == offset)
                .collect();
            slice.sort_by(|a, b| a.gamma.partial_cmp(&b.gamma).unwrap());
            let mut report = TrendReport {
                alpha,
                benefit_offset: offset,
                gamma_points: slice.len(),
                entropy_up_steps: 0,
                entropy_down_steps: 0,
                error_up_steps: 0,
                error_down_steps: 0,
            };
            for pair in slice.windows(2) {
                if pair[1].mean_test_entropy > pair[0].mean_test_entropy {
                    report.entropy_up_steps += 1;
                } else if pair[1].mean_test_entropy < pair[0].mean_test_entropy {
                    report.entropy_down_steps += 1;
                }
                if pair[1].mean_test_error > pair[0].mean_test_error {
                    report.error_up_steps += 1;
                } else if pair[1].mean_test_error < pair[0].mean_test_error {
                    report.error_down_steps += 1;
                }
            }
            report
        })
        .collect()
}

/// Flat CSV row of one cell, identifiers first, then the record fields.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub benefit_offset: f64,
    pub gamma: f64,
    pub seed: u64,
    pub status: String,
    pub error: String,
    pub n_train: Option<usize>,
    pub n_test: Option<usize>,
    pub iterations: Option<usize>,
    pub support_size: Option<usize>,
    pub lambda_bar: Option<f64>,
    pub erm_threshold: Option<f64>,
    pub erm_train_error: Option<f64>,
    pub erm_test_error: Option<f64>,
    pub erm_test_entropy: Option<f64>,
    pub train_error: Option<f64>,
    pub train_entropy: Option<f64>,
    pub test_error_exact: Option<f64>,
    pub test_entropy_exact: Option<f64>,
    pub test_between_exact: Option<f64>,
    pub draws: Option<usize>,
    pub test_error_sampled: Option<f64>,
    pub test_error_ci: Option<f64>,
    pub test_entropy_sampled: Option<f64>,
    pub test_entropy_ci: Option<f64>,
    pub test_between_sampled: Option<f64>,
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
    pub psi_value: Option<f64>,
    pub fairness_dev_bound: Option<f64>,
    pub psi_tilde_dev_bound: Option<f64>,
}

impl From<&CellResult> for SweepRow {
    fn from(cell: &CellResult) -> Self {
        let r = cell.record.as_ref();
        SweepRow {
            alpha: cell.alpha,
            benefit_offset: cell.benefit_offset,
            gamma: cell.gamma,
            seed: cell.seed,
            status: if r.is_some() { "ok" } else { "error" }.to_string(),
            error: cell.error.clone().unwrap_or_default(),
            n_train: r.map(|r| r.n_train),
            n_test: r.map(|r| r.n_test),
            iterations: r.map(|r| r.iterations),
            support_size: r.map(|r| r.support_size),
            lambda_bar: r.map(|r| r.lambda_bar),
            erm_threshold: r.map(|r| r.erm_threshold),
            erm_train_error: r.map(|r| r.erm_train_error),
            erm_test_error: r.map(|r| r.erm_test_error),
            erm_test_entropy: r.map(|r| r.erm_test_entropy),
            train_error: r.map(|r| r.train_error),
            train_entropy: r.map(|r| r.train_entropy),
            test_error_exact: r.map(|r| r.test_error_exact),
            test_entropy_exact: r.map(|r| r.test_entropy_exact),
            test_between_exact: r.map(|r| r.test_between_exact),
            draws: r.map(|r| r.draws),
            test_error_sampled: r.and_then(|r| r.test_error_sampled),
            test_error_ci: r.and_then(|r| r.test_error_ci),
            test_entropy_sampled: r.and_then(|r| r.test_entropy_sampled),
            test_entropy_ci: r.and_then(|r| r.test_entropy_ci),
            test_between_sampled: r.and_then(|r| r.test_between_sampled),
            fp_rate_g0: r.and_then(|r| r.fp_rate_g0),
            fp_rate_g1: r.and_then(|r| r.fp_rate_g1),
            fn_rate_g0: r.and_then(|r| r.fn_rate_g0),
            fn_rate_g1: r.and_then(|r| r.fn_rate_g1),
            fp_rate_total: r.and_then(|r| r.fp_rate_total),
            fn_rate_total: r.and_then(|r| r.fn_rate_total),
            fp_rate_diff_g0: r.and_then(|r| r.fp_rate_diff_g0),
            fp_rate_diff_g1: r.and_then(|r| r.fp_rate_diff_g1),
            fn_rate_diff_g0: r.and_then(|r| r.fn_rate_diff_g0),
            fn_rate_diff_g1: r.and_then(|r| r.fn_rate_diff_g1),
            psi_value: r.map(|r| r.psi_value),
            fairness_dev_bound: r.map(|r| r.fairness_dev_bound),
            psi_tilde_dev_bound: r.and_then(|r| r.psi_tilde_dev_bound),
        }
    }
}

/// Write the per-cell sweep CSV, one row per (alpha, offset, gamma, seed).
pub fn write_sweep_csv(path: &Path, cells: &[CellResult]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    for cell in cells {
        writer
            .serialize(SweepRow::from(cell))
            .map_err(|e| Error::InvalidInput(format!("csv serialization failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))
}

/// Parse a sweep CSV back into rows.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    reader
        .deserialize()
        .map(|row| row.map_err(|e| Error::InvalidInput(format!("csv parse failed: {e}"))))
        .collect()
}

/// Write the cross-seed aggregate CSV.
pub fn write_summary_csv(path: &Path, summaries: &[CellSummary]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    for s in summaries {
        writer
            .serialize(s)
            .map_err(|e| Error::InvalidInput(format!("csv serialization failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))
}

/// Write one solve trace as CSV with columns
/// `t,lambda_hat,threshold_index,avg_error,avg_entropy`.
pub fn write_trace_csv(path: &Path, trace: &gefair::SolveTrace) -> Result<()> {
    #[derive(serde::Serialize)]
    struct TraceRow {
        t: usize,
        lambda_hat: f64,
        threshold_index: usize,
        avg_error: f64,
        avg_entropy: f64,
    }
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    for (i, r) in trace.records.iter().enumerate() {
        writer
            .serialize(TraceRow {
                t: i + 1,
                lambda_hat: r.lambda_hat,
                threshold_index: r.hypothesis_index,
                avg_error: r.average_error,
                avg_entropy: r.average_entropy,
            })
            .map_err(|e| Error::InvalidInput(format!("csv serialization failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::write_synthetic_csv;

    fn tiny_sweep() -> SweepConfig {
        SweepConfig {
            gammas: vec![0.05, 0.2],
            alphas: vec![1.0],
            benefit_spread: 5.0,
            benefit_offsets: vec![8.0, 9.0],
            seeds: vec![0],
            solver: SolverSettings {
                t_cap: 300,
                ..SolverSettings::default()
            },
            draws: 200,
        }
    }

    fn synthetic_spec(dir: &tempfile::TempDir) -> DatasetSpec {
        let path = dir.path().join("synt.csv");
        write_synthetic_csv(&path, 400, 11).unwrap();
        let mut spec = DatasetSpec::new(&path, "label", "group", "1");
        spec.categorical_columns = vec!["segment".into()];
        spec
    }

    #[test]
    fn sweep_has_one_cell_per_grid_point() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_sweep(&synthetic_spec(&dir), &tiny_sweep()).unwrap();
        assert_eq!(outcome.cells.len(), 4); // 1 alpha x 2 offsets x 2 gammas x 1 seed
        assert!(outcome.cells.iter().all(|c| c.record.is_some()));
        assert_eq!(outcome.summaries.len(), 4);
        assert_eq!(outcome.trends.len(), 2);
    }

    #[test]
    fn failed_cells_are_isolated() {
        let dir = tempfile::tempdir().unwrap();
        let mut sweep = tiny_sweep();
        // offset 4 violates c > a = 5, so half the cells must fail cleanly
        sweep.benefit_offsets = vec![8.0, 4.0];
        let outcome = run_sweep(&synthetic_spec(&dir), &sweep).unwrap();
        let failed: Vec<_> = outcome.cells.iter().filter(|c| c.error.is_some()).collect();
        let ok: Vec<_> = outcome.cells.iter().filter(|c| c.record.is_some()).collect();
        assert_eq!(failed.len(), 2);
        assert_eq!(ok.len(), 2);
        assert!(failed.iter().all(|c| c.benefit_offset == 4.0));
    }

    #[test]
    fn sweep_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut sweep = tiny_sweep();
        sweep.benefit_offsets = vec![8.0, 4.0]; // include an error row
        let outcome = run_sweep(&synthetic_spec(&dir), &sweep).unwrap();
        let path = dir.path().join("sweep.csv");
        write_sweep_csv(&path, &outcome.cells).unwrap();
        let rows = read_sweep_csv(&path).unwrap();
        let original: Vec<SweepRow> = outcome.cells.iter().map(SweepRow::from).collect();
        assert_eq!(rows, original);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let spec = synthetic_spec(&dir);
        let sweep = tiny_sweep();
        let a = run_sweep(&spec, &sweep).unwrap();
        let b = run_sweep(&spec, &sweep).unwrap();
        let pa = dir.path().join("a.csv");
        let pb = dir.path().join("b.csv");
        write_sweep_csv(&pa, &a.cells).unwrap();
        write_sweep_csv(&pb, &b.cells).unwrap();
        assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    }

    #[test]
    fn derived_seeds_differ_between_cells() {
        let s: Vec<u64> = (0..8).map(|i| derive_seed(0, i)).collect();
        let mut dedup = s.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), s.len());
    }
}
