//! Command-line interface: audit predictions, train a single
//! entropy-constrained classifier, sweep a parameter grid, validate the
//! deviation bounds, or print bound values.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gefair::{
    entropy_upper_bound, fairness_deviation_bound, psi, psi_corollary, psi_tilde, vc_deviation,
    BenefitParams, EntropyOrder, LambdaMode, LogArgument, SolverConfig,
};
use gefair_cli::{
    audit, load_predictions, run_single, validate_bounds, write_summary_csv, write_sweep_csv,
    write_trace_csv, AuditSpec, BoundValidationConfig, DatasetSpec, EvalConfig, SolverSettings,
    SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "gefair",
    about = "Entropy-index fairness metrics and entropy-constrained training",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LambdaModeArg {
    Sampled,
    Expected,
}

impl From<LambdaModeArg> for LambdaMode {
    fn from(v: LambdaModeArg) -> Self {
        match v {
            LambdaModeArg::Sampled => LambdaMode::Sampled,
            LambdaModeArg::Expected => LambdaMode::Expected,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalArg {
    /// Exact mixture expectations only.
    Exact,
    /// Exact expectations plus repeated-draw averages with intervals.
    Sampled,
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV file (header row required, UTF-8, comma-separated).
    #[arg(long)]
    data: PathBuf,
    /// Column holding the ground-truth label.
    #[arg(long, default_value = "label")]
    label_col: String,
    /// Column holding the sensitive group.
    #[arg(long, default_value = "group")]
    group_col: String,
    /// Raw label value that counts as the positive outcome.
    #[arg(long, default_value = "1")]
    positive_label: String,
    /// Feature columns to one-hot encode (repeatable).
    #[arg(long = "categorical")]
    categorical: Vec<String>,
    /// Use a known dataset's column map (adult, compas, law, dutch);
    /// explicit flags override the preset.
    #[arg(long)]
    preset: Option<String>,
}

impl DataArgs {
    fn spec(&self, split: f64, split_seed: u64) -> anyhow::Result<DatasetSpec> {
        let mut spec = DatasetSpec::new(
            &self.data,
            &self.label_col,
            &self.group_col,
            &self.positive_label,
        );
        if let Some(name) = &self.preset {
            let preset = gefair_cli::presets::preset(name)
                .with_context(|| format!("unknown preset '{name}'"))?;
            spec.label_column = preset.label_column.to_string();
            spec.positive_label = preset.positive_label.to_string();
            spec.group_column = preset.group_column.to_string();
            spec.categorical_columns = preset
                .categorical_columns
                .iter()
                .map(|s| s.to_string())
                .collect();
        }
        if self.label_col != "label" || self.preset.is_none() {
            spec.label_column = self.label_col.clone();
        }
        if self.group_col != "group" || self.preset.is_none() {
            spec.group_column = self.group_col.clone();
        }
        if self.positive_label != "1" || self.preset.is_none() {
            spec.positive_label = self.positive_label.clone();
        }
        if !self.categorical.is_empty() {
            spec.categorical_columns = self.categorical.clone();
        }
        spec.split_fraction = split;
        spec.split_seed = split_seed;
        Ok(spec)
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Upper bound on the benefit-to-ratio lambda player (lambda range).
    #[arg(long, default_value_t = 20.0)]
    lambda_max: f64,
    /// Equilibrium accuracy target.
    #[arg(long, default_value_t = 0.005)]
    nu: f64,
    /// Iteration cap of the game.
    #[arg(long = "t-max", default_value_t = 10_000)]
    t_max: usize,
    #[arg(long, value_enum, default_value_t = LambdaModeArg::Sampled)]
    lambda_mode: LambdaModeArg,
}

#[derive(Subcommand)]
enum Command {
    /// Compute fairness metrics on a predictions CSV; no training.
    Audit {
        /// Predictions CSV with label, prediction, and group columns.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
        #[arg(long, default_value = "prediction")]
        prediction_col: String,
        #[arg(long, default_value = "group")]
        group_col: String,
        #[arg(long, default_value = "1")]
        positive_label: String,
        /// Index orders to report (repeatable).
        #[arg(long = "alpha", default_values_t = vec![0.0, 1.0, 2.0])]
        alphas: Vec<f64>,
        /// Benefit spread a.
        #[arg(long = "a", default_value_t = 5.0)]
        benefit_spread: f64,
        /// Benefit offset c.
        #[arg(long = "c", default_value_t = 8.0)]
        benefit_offset: f64,
        /// Gap tolerance for the fairness predicates.
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        /// Write the full report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the score model and solve one entropy-constrained cell.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Entropy budget.
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        #[arg(long = "a", default_value_t = 5.0)]
        benefit_spread: f64,
        #[arg(long = "c", default_value_t = 8.0)]
        benefit_offset: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = EvalArg::Sampled)]
        eval: EvalArg,
        /// Mixture draws for the sampled evaluation.
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        /// Training fraction of the split.
        #[arg(long, default_value_t = 0.7)]
        split: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for run.json, trace.csv, and model.json.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Sweep a grid of budgets, orders, and benefit offsets.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long = "alpha", default_values_t = vec![0.0, 1.0, 2.0])]
        alphas: Vec<f64>,
        /// Entropy budgets (repeatable).
        #[arg(long = "gamma", required = true)]
        gammas: Vec<f64>,
        #[arg(long = "a", default_value_t = 5.0)]
        benefit_spread: f64,
        /// Benefit offsets (repeatable).
        #[arg(long = "c", default_values_t = vec![8.0, 9.0, 10.0])]
        benefit_offsets: Vec<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = EvalArg::Sampled)]
        eval: EvalArg,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long, default_value_t = 0.7)]
        split: f64,
        /// Repetition seeds (repeatable).
        #[arg(long = "seed", default_values_t = vec![0])]
        seeds: Vec<u64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Do not write the per-cell trace CSVs and JSON records.
        #[arg(long, default_value_t = false)]
        skip_traces: bool,
    },
    /// Resample a synthetic population and check the deviation bounds.
    ValidateBounds {
        #[arg(long = "alpha", default_values_t = vec![0.0, 1.0, 2.0])]
        alphas: Vec<f64>,
        #[arg(long = "a", default_value_t = 5.0)]
        benefit_spread: f64,
        #[arg(long = "c", default_value_t = 8.0)]
        benefit_offset: f64,
        /// Size of each resample.
        #[arg(long = "n", default_value_t = 1000)]
        sample_size: usize,
        #[arg(long, default_value_t = 500)]
        resamples: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print deviation-bound values for given parameters.
    Bounds {
        #[arg(long = "alpha", default_values_t = vec![0.0, 1.0, 2.0])]
        alphas: Vec<f64>,
        #[arg(long = "a", default_value_t = 5.0)]
        benefit_spread: f64,
        #[arg(long = "c", default_values_t = vec![8.0, 9.0, 10.0])]
        benefit_offsets: Vec<f64>,
        #[arg(long = "n", default_value_t = 10_000)]
        sample_size: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        vc_dim: usize,
        /// Empirical risk plugged into the accuracy-dependent bound.
        #[arg(long, default_value_t = 0.1)]
        risk: f64,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Audit {
            data,
            label_col,
            prediction_col,
            group_col,
            positive_label,
            alphas,
            benefit_spread,
            benefit_offset,
            tolerance,
            out,
        } => {
            let spec = AuditSpec {
                label_column: label_col,
                prediction_column: prediction_col,
                group_column: group_col,
                positive_label,
            };
            let (predictions, group_names) = load_predictions(&data, &spec)?;
            let params = BenefitParams::new(benefit_spread, benefit_offset)?;
            let report = audit(&predictions, group_names, &alphas, &params, tolerance)?;
            print_audit(&report, tolerance);
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("report written to {}", path.display());
            }
        }
        Command::Train {
            data,
            alpha,
            gamma,
            benefit_spread,
            benefit_offset,
            solver,
            eval,
            draws,
            split,
            seed,
            out_dir,
        } => {
            let spec = data.spec(split, seed)?;
            let params = BenefitParams::new(benefit_spread, benefit_offset)?;
            let config = SolverConfig {
                gamma,
                order: EntropyOrder::new(alpha)?,
                lambda_max: solver.lambda_max,
                nu: solver.nu,
                t_cap: solver.t_max,
                seed,
                lambda_mode: solver.lambda_mode.into(),
            };
            let eval_cfg = EvalConfig {
                draws: if eval == EvalArg::Exact { 0 } else { draws },
            };
            let output = run_single(&spec, &config, &params, &eval_cfg)?;
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(
                out_dir.join("run.json"),
                serde_json::to_string_pretty(&output.record)?,
            )?;
            std::fs::write(
                out_dir.join("model.json"),
                serde_json::to_string_pretty(&output.model)?,
            )?;
            write_trace_csv(&out_dir.join("trace.csv"), &output.trace)?;
            print_run(&output.record);
            println!("artifacts written to {}", out_dir.display());
        }
        Command::Sweep {
            data,
            alphas,
            gammas,
            benefit_spread,
            benefit_offsets,
            solver,
            eval,
            draws,
            split,
            seeds,
            out_dir,
            skip_traces,
        } => {
            let spec = data.spec(split, seeds.first().copied().unwrap_or(0))?;
            let sweep = SweepConfig {
                gammas,
                alphas,
                benefit_spread,
                benefit_offsets,
                seeds,
                solver: SolverSettings {
                    lambda_max: solver.lambda_max,
                    nu: solver.nu,
                    t_cap: solver.t_max,
                    lambda_mode: solver.lambda_mode.into(),
                },
                draws: if eval == EvalArg::Exact { 0 } else { draws },
            };
            let outcome = gefair_cli::run_sweep(&spec, &sweep)?;
            std::fs::create_dir_all(&out_dir)?;
            write_sweep_csv(&out_dir.join("sweep.csv"), &outcome.cells)?;
            write_summary_csv(&out_dir.join("sweep_summary.csv"), &outcome.summaries)?;
            std::fs::write(
                out_dir.join("trends.json"),
                serde_json::to_string_pretty(&outcome.trends)?,
            )?;
            if !skip_traces {
                for cell in &outcome.cells {
                    if let Some(output) = &cell.output {
                        let stem = format!(
                            "a{}_c{}_g{}_s{}",
                            cell.alpha, cell.benefit_offset, cell.gamma, cell.seed
                        );
                        write_trace_csv(&out_dir.join(format!("trace_{stem}.csv")), &output.trace)?;
                        std::fs::write(
                            out_dir.join(format!("run_{stem}.json")),
                            serde_json::to_string_pretty(&output.record)?,
                        )?;
                    }
                }
            }
            let failed = outcome.cells.iter().filter(|c| c.error.is_some()).count();
            println!(
                "{} cells ({} failed); outputs in {}",
                outcome.cells.len(),
                failed,
                out_dir.display()
            );
            for trend in &outcome.trends {
                println!("trend: {}", trend.describe());
            }
        }
        Command::ValidateBounds {
            alphas,
            benefit_spread,
            benefit_offset,
            sample_size,
            resamples,
            delta,
            seed,
            out,
        } => {
            let params = BenefitParams::new(benefit_spread, benefit_offset)?;
            let config = BoundValidationConfig {
                alphas,
                sample_size,
                resamples,
                delta,
                seed,
                ..BoundValidationConfig::standard(params)
            };
            let report = validate_bounds(&config)?;
            println!(
                "deviation bound validation: {} resamples of n = {}, delta = {}",
                resamples, sample_size, delta
            );
            for a in &report.per_alpha {
                println!(
                    "  alpha={}: exact={:.6} bound={:.6} violations={}/{} (max dev {:.6}) \
                     tighter bound applicable {}/{} violated {}",
                    a.alpha,
                    a.exact_entropy,
                    a.deviation_bound,
                    a.violations,
                    a.resamples,
                    a.max_observed_deviation,
                    a.tighter_bound_applicable,
                    a.resamples,
                    a.tighter_bound_violations,
                );
            }
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
            }
            if report.all_within_confidence() {
                println!("PASS: every violation frequency within delta");
            } else {
                bail!("violation frequency exceeded delta");
            }
        }
        Command::Bounds {
            alphas,
            benefit_spread,
            benefit_offsets,
            sample_size,
            delta,
            vc_dim,
            risk,
        } => {
            let vc = vc_deviation(sample_size, vc_dim, delta, LogArgument::FourOverDelta)?;
            let eps2 = vc_deviation(sample_size, vc_dim, delta, LogArgument::EightOverDelta)?;
            println!("n = {sample_size}, delta = {delta}, vc_dim = {vc_dim}, risk = {risk}");
            println!("vc deviation (risk side): {vc:.6}");
            for &c in &benefit_offsets {
                let params = BenefitParams::new(benefit_spread, c)?;
                println!(
                    "a = {benefit_spread}, c = {c} (ratio {:.3}):",
                    params.ratio()
                );
                for &alpha in &alphas {
                    let order = EntropyOrder::new(alpha)?;
                    let coeff = psi(order, &params);
                    let bound = fairness_deviation_bound(order, &params, sample_size, delta)?;
                    let corollary = psi_corollary(order, benefit_spread);
                    let cap = entropy_upper_bound(order, params.ratio())?;
                    let tighter = psi_tilde(order, &params, risk, eps2)
                        .map(|v| format!("{:.6}", v * eps2))
                        .unwrap_or_else(|_| "inapplicable".to_string());
                    println!(
                        "  alpha={alpha}: psi={coeff:.4} bound={bound:.6} \
                         accuracy-dependent={tighter} corollary={corollary:.4} index-cap={cap:.4}"
                    );
                }
            }
        }
    }
    Ok(())
}

fn print_audit(report: &gefair_cli::AuditReport, tolerance: f64) {
    println!("audited {} predictions, error rate {:.4}", report.n, report.error_rate);
    for e in &report.entropies {
        println!(
            "alpha={}: index={:.6} within={:.6} between={:.6}",
            e.alpha, e.total, e.within, e.between
        );
    }
    for (i, row) in report.rates.per_group.iter().enumerate() {
        let name = report
            .group_names
            .get(i)
            .map(String::as_str)
            .unwrap_or("?");
        println!(
            "group {name}: n={} base_rate={:.4} fp_fraction={:.4} fn_fraction={:.4} \
             fp_rate={} fn_rate={}",
            row.size,
            row.base_rate,
            row.fp_fraction,
            row.fn_fraction,
            row.fp_rate.map_or("n/a".into(), |v| format!("{v:.4}")),
            row.fn_rate.map_or("n/a".into(), |v| format!("{v:.4}")),
        );
    }
    let p = &report.predicates;
    println!(
        "predicates at tolerance {tolerance}: equal_prediction={} equal_error={} \
         equal_benefit={} equalized_odds={} equal_base_rates={}",
        p.equal_prediction, p.equal_error, p.equal_benefit, p.equalized_odds, p.equal_base_rates
    );
}

fn print_run(record: &gefair_cli::RunRecord) {
    println!(
        "alpha={} gamma={} c={}: train error {:.4} (risk minimizer {:.4}), train index {:.6}",
        record.alpha,
        record.gamma,
        record.benefit_offset,
        record.train_error,
        record.erm_train_error,
        record.train_entropy
    );
    println!(
        "test: exact error {:.4}, exact index {:.6}, between {:.6}",
        record.test_error_exact, record.test_entropy_exact, record.test_between_exact
    );
    if let (Some(err), Some(ci)) = (record.test_error_sampled, record.test_error_ci) {
        println!(
            "test over {} draws: error {:.4} +/- {:.4}, index {:.6} +/- {:.6}",
            record.draws,
            err,
            ci,
            record.test_entropy_sampled.unwrap_or(f64::NAN),
            record.test_entropy_ci.unwrap_or(f64::NAN)
        );
    }
}
