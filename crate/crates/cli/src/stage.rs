//! Stage runners. Each loads its inputs, computes one section of the
//! study, writes machine-readable artifacts into the output directory, and
//! returns the report it wrote. All randomness is derived from the config
//! seed, so rerunning a stage with the same config rewrites every artifact
//! byte for byte (`timings.json`, which holds wall-clock measurements, is
//! the single exception).

use std::fs;
use std::path::Path;
use std::time::Instant;

use landslide_core::dataset::{self, DataTable, FeatureKind, TrainTestSplit};
use landslide_core::explain::{self, FeatureImportance, ReductionPlan, SummaryPoint};
use landslide_core::metrics::{
    class_report, confusion, learning_curve, percent, roc_auc, ClassReport, ConfusionMatrix,
    LearningCurve, RocCurve,
};
use landslide_core::model::{Classifier, ClassifierKind, ModelParams, TrainedModel};
use landslide_core::modelsel::{grid_search, stratified_kfold, CvResult, ParamGrid};
use landslide_core::seed;
use landslide_core::stats::{build_contingency, chi_square_test, shapiro_wilk, Binning};
use landslide_core::synthetic;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Serialize a report as pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports always serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text)
        .map_err(|source| CliError::JsonParse { path: path.display().to_string(), source })
}

/// One JSON value per line; infinite means (failed grid points) become null.
fn write_jsonl<T: Serialize>(path: &Path, values: &[T]) -> Result<(), CliError> {
    let mut text = String::new();
    for v in values {
        text.push_str(&serde_json::to_string(v).expect("log lines always serialize"));
        text.push('\n');
    }
    fs::write(path, text).map_err(io_err(path))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn load_table(cfg: &RunConfig) -> Result<DataTable, CliError> {
    if !cfg.data.exists() {
        return Err(CliError::Io {
            path: cfg.data.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "data file not found"),
        });
    }
    Ok(dataset::load_csv(&cfg.data, &cfg.schema)?)
}

fn prepare_out(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    write_json(&cfg.artifact("config.json"), cfg)
}

// ---------------------------------------------------------------------------
// stats

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityRow {
    pub feature: String,
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareRow {
    pub feature: String,
    /// How the feature was grouped: `quantile(k)` or `distinct`.
    pub binning: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<usize>,
    /// Degrees of freedom under the instance-count convention
    /// `(N - 1) * (V - 1)`, reported alongside for comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof_paper: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub config: RunConfig,
    pub n_rows: usize,
    /// `(negatives, positives)`.
    pub class_counts: (usize, usize),
    pub normality: Vec<NormalityRow>,
    pub chi_square: Vec<ChiSquareRow>,
}

/// Screen every feature: Shapiro-Wilk normality and a chi-square
/// independence test against the label. A feature whose test cannot run
/// (constant column, say) gets its error recorded and screening continues.
pub fn run_stats(cfg: &RunConfig) -> Result<StatsReport, CliError> {
    prepare_out(cfg)?;
    let table = load_table(cfg)?;
    let mut normality = Vec::with_capacity(table.n_features());
    let mut chi_square = Vec::with_capacity(table.n_features());
    for j in 0..table.n_features() {
        let name = cfg.schema.names()[j].clone();
        let kind = cfg.schema.kind(j);
        let column = table.column(j);

        normality.push(match shapiro_wilk(name.clone(), &column) {
            Ok(r) => NormalityRow {
                feature: name.clone(),
                kind: kind.to_string(),
                n: r.n,
                w: Some(r.w),
                p_value: Some(r.p_value),
                error: None,
            },
            Err(e) => NormalityRow {
                feature: name.clone(),
                kind: kind.to_string(),
                n: column.len(),
                w: None,
                p_value: None,
                error: Some(e.to_string()),
            },
        });

        let (binning, binning_name) = match kind {
            FeatureKind::Continuous => (
                Binning::Quantile(cfg.chi_square_bins),
                format!("quantile({})", cfg.chi_square_bins),
            ),
            FeatureKind::Categorical => (Binning::Distinct, "distinct".to_string()),
        };
        chi_square.push(
            match build_contingency(&column, table.labels(), binning)
                .and_then(|t| chi_square_test(name.clone(), &t))
            {
                Ok(r) => ChiSquareRow {
                    feature: name,
                    binning: binning_name,
                    statistic: Some(r.statistic),
                    dof: Some(r.dof),
                    dof_paper: Some(r.dof_paper),
                    p_value: Some(r.p_value),
                    error: None,
                },
                Err(e) => ChiSquareRow {
                    feature: name,
                    binning: binning_name,
                    statistic: None,
                    dof: None,
                    dof_paper: None,
                    p_value: None,
                    error: Some(e.to_string()),
                },
            },
        );
    }
    let report = StatsReport {
        config: cfg.clone(),
        n_rows: table.n_rows(),
        class_counts: table.class_counts(),
        normality,
        chi_square,
    };
    write_json(&cfg.artifact("stats.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// search + evaluation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub seed: u64,
    pub test_fraction: f64,
    pub stratified: bool,
    pub n_rows: usize,
    /// `(negatives, positives)` on each side.
    pub train_class_counts: (usize, usize),
    pub test_class_counts: (usize, usize),
    /// Row indices into the source table, ascending.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub k: usize,
    pub seed: u64,
    pub fold_sizes: Vec<usize>,
    /// `(negatives, positives)` held out by each fold.
    pub fold_class_counts: Vec<(usize, usize)>,
    /// `assignment[i]` is the fold that holds train row `i` out.
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: RunConfig,
    pub model: String,
    pub n_grid_points: usize,
    pub n_failed_points: usize,
    pub best_index: usize,
    pub best: CvResult,
    pub cv_mean_pct: f64,
    pub cv_std_pct: f64,
}

/// Two-decimal percentage renderings of an evaluation, table-style.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentBlock {
    pub accuracy: f64,
    pub precision_pos: f64,
    pub recall_pos: f64,
    pub f1_pos: f64,
    pub precision_neg: f64,
    pub recall_neg: f64,
    pub f1_neg: f64,
    pub weighted_f1: f64,
    pub auc: f64,
}

impl PercentBlock {
    fn new(report: &ClassReport, auc: f64) -> Self {
        Self {
            accuracy: percent(report.accuracy),
            precision_pos: percent(report.precision_pos),
            recall_pos: percent(report.recall_pos),
            f1_pos: percent(report.f1_pos),
            precision_neg: percent(report.precision_neg),
            recall_neg: percent(report.recall_neg),
            f1_neg: percent(report.f1_neg),
            weighted_f1: percent(report.weighted_f1),
            auc: percent(auc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: RunConfig,
    pub model: String,
    pub params: ModelParams,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub report: ClassReport,
    pub auc: f64,
    pub percent: PercentBlock,
}

/// In-memory result of one search stage: the persisted search report plus
/// the held-out evaluation of the refit winner.
#[derive(Debug, Clone)]
pub struct SearchStage {
    pub search: SearchReport,
    pub eval: EvalReport,
}

fn write_split_artifacts(cfg: &RunConfig, split: &TrainTestSplit) -> Result<(), CliError> {
    let report = SplitReport {
        seed: cfg.seed,
        test_fraction: cfg.test_fraction,
        stratified: true,
        n_rows: split.train.n_rows() + split.test.n_rows(),
        train_class_counts: split.train.class_counts(),
        test_class_counts: split.test.class_counts(),
        train_indices: split.train_indices.clone(),
        test_indices: split.test_indices.clone(),
    };
    write_json(&cfg.artifact("split.json"), &report)?;

    let folds = stratified_kfold(&split.train, cfg.folds, cfg.seed)?;
    let fold_class_counts = (0..folds.k)
        .map(|f| {
            let mut neg = 0;
            let mut pos = 0;
            for i in folds.test_indices(f) {
                match split.train.label(i) {
                    0 => neg += 1,
                    _ => pos += 1,
                }
            }
            (neg, pos)
        })
        .collect();
    let report = FoldReport {
        k: folds.k,
        seed: folds.seed,
        fold_sizes: folds.fold_sizes(),
        fold_class_counts,
        assignment: folds.folds,
    };
    write_json(&cfg.artifact("folds.json"), &report)
}

fn write_roc_csv(path: &Path, roc: &RocCurve) -> Result<(), CliError> {
    let mut text = String::from("fpr,tpr\n");
    for (fpr, tpr) in &roc.points {
        text.push_str(&format!("{fpr},{tpr}\n"));
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Grid-search `grid` on the split's training side, refit the winner on the
/// whole training side, and evaluate it on the held-out side. `suffix`
/// distinguishes reduced-feature artifacts (`search_gbt_reduced.json` etc.)
/// from the all-feature ones.
fn search_on(
    cfg: &RunConfig,
    kind: ClassifierKind,
    split: &TrainTestSplit,
    grid: &ParamGrid,
    suffix: &str,
) -> Result<SearchStage, CliError> {
    let outcome = grid_search(&split.train, grid, cfg.folds, cfg.seed)?;
    let stem = format!("{}{}", kind.as_str(), suffix);
    write_jsonl(&cfg.artifact(&format!("search_{stem}.jsonl")), &outcome.results)?;

    let best = outcome.best_result().clone();
    let search = SearchReport {
        config: cfg.clone(),
        model: kind.as_str().to_string(),
        n_grid_points: outcome.results.len(),
        n_failed_points: outcome.results.iter().filter(|r| r.error.is_some()).count(),
        best_index: outcome.best,
        cv_mean_pct: percent(best.mean),
        cv_std_pct: percent(best.std),
        best,
    };
    write_json(&cfg.artifact(&format!("search_{stem}.json")), &search)?;

    let refit_seed = seed::derive(cfg.seed, &[seed::TAG_REFIT, outcome.best as u64]);
    let model = search.best.params.fit(&split.train, refit_seed)?;
    write_json(&cfg.artifact(&format!("model_{stem}.json")), &model)?;

    let predictions = model.predict_labels(&split.test)?;
    let scores = model.predict_scores(&split.test)?;
    let cm = confusion(split.test.labels(), &predictions)?;
    let report = class_report(&cm);
    let roc = roc_auc(split.test.labels(), &scores)?;
    write_roc_csv(&cfg.artifact(&format!("roc_{stem}.csv")), &roc)?;
    let eval = EvalReport {
        config: cfg.clone(),
        model: kind.as_str().to_string(),
        params: search.best.params.clone(),
        n_train: split.train.n_rows(),
        n_test: split.test.n_rows(),
        confusion: cm,
        report,
        auc: roc.auc,
        percent: PercentBlock::new(&report, roc.auc),
    };
    write_json(&cfg.artifact(&format!("eval_{stem}.json")), &eval)?;
    Ok(SearchStage { search, eval })
}

/// Split the data, exhaustively cross-validate one family's grid on the
/// training side, refit the winner, and evaluate it on the test side.
pub fn run_search(cfg: &RunConfig, kind: ClassifierKind) -> Result<SearchStage, CliError> {
    prepare_out(cfg)?;
    let table = load_table(cfg)?;
    let split = dataset::train_test_split(&table, &cfg.split_spec())?;
    write_split_artifacts(cfg, &split)?;
    search_on(cfg, kind, &split, cfg.grids.for_kind(kind), "")
}

// ---------------------------------------------------------------------------
// explain

/// Contents of `importance.json`: the ranking and the explainer baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainReport {
    pub config: RunConfig,
    pub model_path: String,
    pub n_rows: usize,
    pub n_features: usize,
    /// Margin of the empty explanation; `expected_value + Σ φ` reproduces
    /// each row's margin exactly.
    pub expected_value: f64,
    pub ranking: FeatureImportance,
}

fn write_summary_csv(path: &Path, points: &[SummaryPoint]) -> Result<(), CliError> {
    let mut text = String::from("rank,feature,row,shap,normalized_value\n");
    for p in points {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            p.rank,
            csv_field(&p.feature),
            p.row,
            p.shap,
            p.normalized_value
        ));
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Explain the stored boosted-tree model on the training rows: Shapley
/// value matrix, mean-|φ| importance ranking, and per-value summary points.
pub fn run_explain(cfg: &RunConfig, model_path: Option<&Path>) -> Result<ExplainReport, CliError> {
    prepare_out(cfg)?;
    let default_path = cfg.artifact("model_gbt.json");
    let path = model_path.unwrap_or(&default_path);
    let envelope: TrainedModel = read_json(path)?;
    let Some(gbt) = envelope.as_gbt() else {
        return Err(CliError::WrongModelKind {
            path: path.display().to_string(),
            got: envelope.kind().to_string(),
        });
    };

    let table = load_table(cfg)?;
    let split = dataset::train_test_split(&table, &cfg.split_spec())?;
    let shap = explain::tree_shap(gbt, &split.train)?;
    write_json(&cfg.artifact("shap_matrix.json"), &shap)?;
    let ranking = explain::rank_features(&shap, cfg.schema.names());
    let points = explain::summary_points(&shap, &split.train);
    write_summary_csv(&cfg.artifact("shap_values.csv"), &points)?;

    let report = ExplainReport {
        config: cfg.clone(),
        model_path: path.display().to_string(),
        n_rows: shap.n_rows(),
        n_features: shap.n_features(),
        expected_value: shap.expected_value,
        ranking,
    };
    write_json(&cfg.artifact("importance.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// reduce

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub config: RunConfig,
    pub plan: ReductionPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub mean: f64,
    pub std: f64,
    pub mean_pct: f64,
    pub std_pct: f64,
}

impl CvSummary {
    fn new(mean: f64, std: f64) -> Self {
        Self { mean, std, mean_pct: percent(mean), std_pct: percent(std) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSummary {
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub auc: f64,
    pub accuracy_pct: f64,
    pub weighted_f1_pct: f64,
    pub auc_pct: f64,
}

impl From<&EvalReport> for TestSummary {
    fn from(eval: &EvalReport) -> Self {
        Self {
            accuracy: eval.report.accuracy,
            weighted_f1: eval.report.weighted_f1,
            auc: eval.auc,
            accuracy_pct: percent(eval.report.accuracy),
            weighted_f1_pct: percent(eval.report.weighted_f1),
            auc_pct: percent(eval.auc),
        }
    }
}

/// Before/after comparison of the feature reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub config: RunConfig,
    pub drop_count: usize,
    pub dropped: Vec<String>,
    pub retained: Vec<String>,
    pub best_params_before: ModelParams,
    pub best_params_after: ModelParams,
    pub cv_before: CvSummary,
    pub cv_after: CvSummary,
    pub test_before: TestSummary,
    pub test_after: TestSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub config: RunConfig,
    pub params: ModelParams,
    pub k: usize,
    pub curve: LearningCurve,
}

/// In-memory result of the reduction stage.
#[derive(Debug, Clone)]
pub struct ReduceStage {
    pub plan: ReductionPlan,
    pub comparison: ComparisonReport,
    pub search: SearchStage,
    pub curve: LearningCurve,
}

/// Drop the lowest-ranked features, rerun the boosted-tree search on the
/// reduced schema, and compare cross-validated and held-out scores before
/// and after. Prior search/explain artifacts are reused when they were
/// produced under this exact config; anything missing or stale is
/// recomputed in place.
pub fn run_reduce(cfg: &RunConfig) -> Result<ReduceStage, CliError> {
    prepare_out(cfg)?;
    let table = load_table(cfg)?;
    let split = dataset::train_test_split(&table, &cfg.split_spec())?;
    write_split_artifacts(cfg, &split)?;

    let prior: Option<(SearchReport, EvalReport)> = (|| {
        let s: SearchReport = read_json(&cfg.artifact("search_gbt.json")).ok()?;
        let e: EvalReport = read_json(&cfg.artifact("eval_gbt.json")).ok()?;
        let model_present = cfg.artifact("model_gbt.json").exists();
        (s.config == *cfg && e.config == *cfg && model_present).then_some((s, e))
    })();
    let (search_before, eval_before) = match prior {
        Some(pair) => pair,
        None => {
            let stage = search_on(cfg, ClassifierKind::Gbt, &split, &cfg.grids.gbt, "")?;
            (stage.search, stage.eval)
        }
    };
    let importance = match read_json::<ExplainReport>(&cfg.artifact("importance.json")) {
        Ok(r) if r.config == *cfg => r,
        _ => run_explain(cfg, None)?,
    };

    let plan = explain::select_features(&importance.ranking, cfg.drop_count)?;
    write_json(
        &cfg.artifact("reduction.json"),
        &ReductionReport { config: cfg.clone(), plan: plan.clone() },
    )?;

    let reduced = table.select_features(&plan.retained)?;
    let reduced_split = dataset::train_test_split(&reduced, &cfg.split_spec())?;
    let stage = search_on(cfg, ClassifierKind::Gbt, &reduced_split, &cfg.grids.gbt, "_reduced")?;

    let curve = learning_curve(
        &reduced_split.train,
        &stage.search.best.params,
        &cfg.learning_curve_fractions,
        cfg.folds,
        cfg.seed,
    )?;
    write_json(
        &cfg.artifact("learning_curve.json"),
        &CurveReport {
            config: cfg.clone(),
            params: stage.search.best.params.clone(),
            k: cfg.folds,
            curve: curve.clone(),
        },
    )?;

    let comparison = ComparisonReport {
        config: cfg.clone(),
        drop_count: cfg.drop_count,
        dropped: plan.dropped.clone(),
        retained: plan.retained.clone(),
        best_params_before: search_before.best.params.clone(),
        best_params_after: stage.search.best.params.clone(),
        cv_before: CvSummary::new(search_before.best.mean, search_before.best.std),
        cv_after: CvSummary::new(stage.search.best.mean, stage.search.best.std),
        test_before: TestSummary::from(&eval_before),
        test_after: TestSummary::from(&stage.eval),
    };
    write_json(&cfg.artifact("comparison.json"), &comparison)?;
    Ok(ReduceStage { plan, comparison, search: stage, curve })
}

// ---------------------------------------------------------------------------
// pipeline

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: String,
    pub best_params: ModelParams,
    pub cv_mean: f64,
    pub cv_std: f64,
    pub cv_mean_pct: f64,
    pub test: TestSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: RunConfig,
    pub n_rows: usize,
    pub n_features: usize,
    pub models: Vec<ModelSummary>,
    pub expected_value: f64,
    pub importance: FeatureImportance,
    pub dropped: Vec<String>,
    pub retained: Vec<String>,
    pub best_params_before: ModelParams,
    pub best_params_after: ModelParams,
    pub cv_before: CvSummary,
    pub cv_after: CvSummary,
    pub test_before: TestSummary,
    pub test_after: TestSummary,
    pub artifacts: Vec<String>,
}

/// Everything the pipeline produced, for rendering.
#[derive(Debug, Clone)]
pub struct PipelineStage {
    pub report: PipelineReport,
    pub stats: StatsReport,
    pub reduce: ReduceStage,
}

/// Run every stage in order: screening, one search per classifier family,
/// the SHAP explanation of the boosted-tree winner, and the feature
/// reduction. Writes `pipeline_report.json` plus per-stage wall-clock
/// seconds in `timings.json`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineStage, CliError> {
    prepare_out(cfg)?;
    let total = Instant::now();
    let mut timings: Vec<(String, f64)> = Vec::new();
    let mut artifacts: Vec<String> =
        vec!["config.json".into(), "stats.json".into(), "split.json".into(), "folds.json".into()];

    let t = Instant::now();
    let stats = run_stats(cfg)?;
    timings.push(("stats".into(), t.elapsed().as_secs_f64()));

    let mut models = Vec::new();
    for kind in ClassifierKind::ALL {
        let t = Instant::now();
        let stage = run_search(cfg, kind)?;
        timings.push((format!("search_{kind}"), t.elapsed().as_secs_f64()));
        for prefix in ["search_", "model_", "eval_", "roc_"] {
            let ext = match prefix {
                "roc_" => "csv",
                _ => "json",
            };
            artifacts.push(format!("{prefix}{kind}.{ext}"));
        }
        artifacts.push(format!("search_{kind}.jsonl"));
        models.push(ModelSummary {
            model: kind.as_str().to_string(),
            best_params: stage.search.best.params.clone(),
            cv_mean: stage.search.best.mean,
            cv_std: stage.search.best.std,
            cv_mean_pct: stage.search.cv_mean_pct,
            test: TestSummary::from(&stage.eval),
        });
    }

    let t = Instant::now();
    let importance = run_explain(cfg, None)?;
    timings.push(("explain".into(), t.elapsed().as_secs_f64()));
    artifacts.extend(["shap_matrix.json".into(), "shap_values.csv".into(), "importance.json".into()]);

    let t = Instant::now();
    let reduce = run_reduce(cfg)?;
    timings.push(("reduce".into(), t.elapsed().as_secs_f64()));
    artifacts.extend([
        "reduction.json".into(),
        "search_gbt_reduced.jsonl".into(),
        "search_gbt_reduced.json".into(),
        "model_gbt_reduced.json".into(),
        "eval_gbt_reduced.json".into(),
        "roc_gbt_reduced.csv".into(),
        "learning_curve.json".into(),
        "comparison.json".into(),
        "pipeline_report.json".into(),
        "timings.json".into(),
    ]);

    let report = PipelineReport {
        config: cfg.clone(),
        n_rows: stats.n_rows,
        n_features: cfg.schema.len(),
        models,
        expected_value: importance.expected_value,
        importance: importance.ranking,
        dropped: reduce.comparison.dropped.clone(),
        retained: reduce.comparison.retained.clone(),
        best_params_before: reduce.comparison.best_params_before.clone(),
        best_params_after: reduce.comparison.best_params_after.clone(),
        cv_before: reduce.comparison.cv_before.clone(),
        cv_after: reduce.comparison.cv_after.clone(),
        test_before: reduce.comparison.test_before.clone(),
        test_after: reduce.comparison.test_after.clone(),
        artifacts,
    };
    write_json(&cfg.artifact("pipeline_report.json"), &report)?;

    timings.push(("total".into(), total.elapsed().as_secs_f64()));
    write_json(&cfg.artifact("timings.json"), &timings)?;
    Ok(PipelineStage { report, stats, reduce })
}

// ---------------------------------------------------------------------------
// synth

/// Write the built-in synthetic benchmark stand-in (fifteen features, 392
/// rows, planted signal in nine features) as a CSV.
pub fn run_synth(path: &Path, seed: u64) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
    }
    let table = synthetic::surrogate_table(seed);
    table.write_csv(path)?;
    Ok(())
}
