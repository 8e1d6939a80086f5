//! End-to-end behavior of the stage runners on small datasets: artifact
//! contracts, error isolation, reuse semantics, and the identity reduction.

use std::fs;
use std::path::Path;
use std::process::Command;

use landslide_cli::config::{
    resolve, AdaBoostGridConfig, FlagOverrides, GbtGridConfig, KnnGridConfig, LogRegGridConfig,
    PipelineConfig, RunConfig, SchemaConfig, SvmGridConfig,
};
use landslide_cli::error::CliError;
use landslide_cli::stage::{
    self, run_explain, run_reduce, run_search, run_stats, run_synth, ExplainReport, StatsReport,
};
use landslide_core::gbt::{GbtModel, GbtParams};
use landslide_core::model::{ClassifierKind, TrainedModel};
use landslide_core::synthetic::surrogate_table;
use tempfile::TempDir;

/// A config over the synthetic dataset with singleton grids, sized so each
/// stage finishes in well under a second.
fn small_config(dir: &Path) -> RunConfig {
    let data = dir.join("data.csv");
    if !data.exists() {
        run_synth(&data, 15).unwrap();
    }
    let mut file = PipelineConfig {
        data: Some(data),
        out: Some(dir.join("out")),
        folds: Some(4),
        learning_curve_fractions: Some(vec![0.5, 1.0]),
        ..PipelineConfig::default()
    };
    file.grids.gbt = GbtGridConfig {
        max_depth: Some(vec![3]),
        n_estimators: Some(vec![40]),
        learning_rate: Some(vec![0.3]),
        gamma: Some(vec![0.0]),
        subsample: Some(vec![1.0]),
    };
    file.grids.knn = KnnGridConfig { n_neighbors: Some(vec![7]), p: Some(vec![1]) };
    file.grids.log_reg = LogRegGridConfig { c: Some(vec![0.1]) };
    file.grids.svm = SvmGridConfig { c: Some(vec![10.0]), kernel: None };
    file.grids.ada_boost =
        AdaBoostGridConfig { n_estimators: Some(vec![40]), learning_rate: Some(vec![0.5]) };
    resolve(file, &FlagOverrides::default()).unwrap()
}

#[test]
fn stats_screens_every_feature_and_isolates_constant_columns() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("toy.csv");
    let mut csv = String::from("a,b,y\n");
    for i in 0..8 {
        csv.push_str(&format!("5,{},{}\n", i as f64 + 0.5 * (i % 3) as f64, i % 2));
    }
    fs::write(&data, csv).unwrap();
    let file = PipelineConfig {
        data: Some(data),
        out: Some(tmp.path().join("out")),
        drop_count: Some(0),
        chi_square_bins: Some(2),
        schema: Some(SchemaConfig {
            names: vec!["a".into(), "b".into()],
            categorical: vec![],
            label: "y".into(),
        }),
        ..PipelineConfig::default()
    };
    let cfg = resolve(file, &FlagOverrides::default()).unwrap();
    let report = run_stats(&cfg).unwrap();

    assert_eq!(report.normality.len(), 2);
    assert_eq!(report.chi_square.len(), 2);
    let constant = &report.normality[0];
    assert!(constant.w.is_none());
    assert!(constant.error.as_deref().unwrap().contains("constant"));
    assert!(report.chi_square[0].error.is_some());
    // The varying column is still fully tested.
    assert!(report.normality[1].w.is_some());
    assert!(report.chi_square[1].p_value.is_some());

    let persisted: StatsReport =
        stage::read_json(&cfg.artifact("stats.json")).unwrap();
    assert_eq!(persisted.normality, report.normality);
}

#[test]
fn two_feature_toy_file_gives_two_row_report() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("toy.csv");
    let mut csv = String::from("left,right,y\n");
    for i in 0..12 {
        let y = usize::from(i >= 6);
        csv.push_str(&format!("{}.25,{},{y}\n", i, (i * 7) % 13));
    }
    fs::write(&data, csv).unwrap();
    let file = PipelineConfig {
        data: Some(data),
        out: Some(tmp.path().join("out")),
        drop_count: Some(1),
        chi_square_bins: Some(2),
        schema: Some(SchemaConfig {
            names: vec!["left".into(), "right".into()],
            categorical: vec![],
            label: "y".into(),
        }),
        ..PipelineConfig::default()
    };
    let cfg = resolve(file, &FlagOverrides::default()).unwrap();
    let report = run_stats(&cfg).unwrap();
    assert_eq!(report.normality.len(), 2);
    assert_eq!(report.chi_square.len(), 2);
    assert_eq!(report.n_rows, 12);
}

#[test]
fn singleton_grid_search_logs_one_record_and_persists_the_model() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let outcome = run_search(&cfg, ClassifierKind::Knn).unwrap();

    let log = fs::read_to_string(cfg.artifact("search_knn.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 1);
    assert_eq!(outcome.search.n_grid_points, 1);
    assert_eq!(outcome.search.best_index, 0);

    let model: TrainedModel = stage::read_json(&cfg.artifact("model_knn.json")).unwrap();
    assert_eq!(model.kind(), ClassifierKind::Knn);
    assert!(outcome.eval.auc > 0.5 && outcome.eval.auc <= 1.0);
    assert!(cfg.artifact("split.json").exists());
    assert!(cfg.artifact("folds.json").exists());
    assert!(cfg.artifact("roc_knn.csv").exists());
}

#[test]
fn explain_exports_one_row_per_train_cell_and_rejects_foreign_models() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    run_search(&cfg, ClassifierKind::Gbt).unwrap();
    let report = run_explain(&cfg, None).unwrap();

    let csv = fs::read_to_string(cfg.artifact("shap_values.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + report.n_rows * report.n_features);
    assert_eq!(report.n_features, 15);
    assert_eq!(report.ranking.entries.len(), 15);

    run_search(&cfg, ClassifierKind::Knn).unwrap();
    let err = run_explain(&cfg, Some(&cfg.artifact("model_knn.json"))).unwrap_err();
    match err {
        CliError::WrongModelKind { got, .. } => assert_eq!(got, "knn"),
        other => panic!("expected WrongModelKind, got {other:?}"),
    }
}

#[test]
fn single_leaf_model_exports_all_zero_shap_values() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());

    // A pruning threshold far above any attainable gain leaves every tree
    // a bare root, so no feature can receive credit.
    let table = surrogate_table(15);
    let params = GbtParams { n_estimators: 5, gamma: 1e12, ..GbtParams::default() };
    let model = GbtModel::fit(&table, &params).unwrap();
    assert!(model.trees.iter().all(|t| t.is_leaf()));
    let path = tmp.path().join("stump.json");
    stage::write_json(&path, &TrainedModel::Gbt(model)).unwrap();

    let report = run_explain(&cfg, Some(&path)).unwrap();
    assert!(report.ranking.entries.iter().all(|e| e.mean_abs_shap == 0.0));
    let csv = fs::read_to_string(cfg.artifact("shap_values.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let shap = line.split(',').nth(3).unwrap();
        assert_eq!(shap.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn reduce_with_drop_zero_reproduces_the_full_stage_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_config(tmp.path());
    cfg.drop_count = 0;
    run_reduce(&cfg).unwrap();

    let full = fs::read(cfg.artifact("eval_gbt.json")).unwrap();
    let reduced = fs::read(cfg.artifact("eval_gbt_reduced.json")).unwrap();
    assert_eq!(full, reduced);
    let full = fs::read(cfg.artifact("model_gbt.json")).unwrap();
    let reduced = fs::read(cfg.artifact("model_gbt_reduced.json")).unwrap();
    assert_eq!(full, reduced);
}

#[test]
fn reduce_drops_features_and_reuses_only_artifacts_from_the_same_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let outcome = run_reduce(&cfg).unwrap();
    assert_eq!(outcome.plan.dropped.len(), 6);
    assert_eq!(outcome.plan.retained.len(), 9);
    // Retained features keep schema order, so the reduced table's columns
    // line up with the original declaration.
    let schema_order: Vec<&str> = cfg
        .schema
        .names()
        .iter()
        .filter(|n| outcome.plan.retained.contains(n))
        .map(|s| s.as_str())
        .collect();
    assert_eq!(outcome.plan.retained, schema_order);

    // A different seed invalidates the persisted search artifacts; the
    // stage must recompute them rather than mixing configurations.
    let mut other = cfg.clone();
    other.seed = 99;
    let fresh = run_reduce(&other).unwrap();
    let reread: landslide_cli::stage::SearchReport =
        stage::read_json(&other.artifact("search_gbt.json")).unwrap();
    assert_eq!(reread.config.seed, 99);
    assert_eq!(fresh.comparison.cv_before.mean, reread.best.mean);
}

#[test]
fn binary_reports_errors_as_json_on_stderr() {
    let tmp = TempDir::new().unwrap();
    let cfg_path = tmp.path().join("cfg.toml");
    fs::write(&cfg_path, "data = \"no-such-file.csv\"\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_landslide"))
        .current_dir(tmp.path())
        .args(["stats", "--config", "cfg.toml"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    let payload: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert!(payload["error"]["kind"].is_string());
    assert!(payload["error"]["message"].as_str().unwrap().contains("no-such-file.csv"));
}

#[test]
fn explain_recomputes_the_same_split_as_search() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    run_search(&cfg, ClassifierKind::Gbt).unwrap();
    let split: landslide_cli::stage::SplitReport =
        stage::read_json(&cfg.artifact("split.json")).unwrap();
    let explain: ExplainReport = {
        run_explain(&cfg, None).unwrap();
        stage::read_json(&cfg.artifact("importance.json")).unwrap()
    };
    assert_eq!(explain.n_rows, split.train_indices.len());
}
