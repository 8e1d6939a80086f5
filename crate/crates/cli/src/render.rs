//! Plain-text renderings of the stage reports for stdout. The JSON
//! artifacts are the source of truth; these are readable summaries.

use landslide_core::model::ModelParams;

use crate::stage::{
    ExplainReport, PipelineStage, ReduceStage, SearchStage, StatsReport,
};

fn opt(x: Option<f64>, width: usize, precision: usize) -> String {
    match x {
        Some(v) => format!("{v:>width$.precision$}"),
        None => format!("{:>width$}", "-"),
    }
}

fn opt_sci(x: Option<f64>, width: usize) -> String {
    match x {
        Some(v) => format!("{v:>width$.3e}"),
        None => format!("{:>width$}", "-"),
    }
}

fn params_line(params: &ModelParams) -> String {
    serde_json::to_string(params).expect("params serialize")
}

pub fn stats(report: &StatsReport) -> String {
    let (neg, pos) = report.class_counts;
    let mut out = format!(
        "screened {} rows ({neg} negative / {pos} positive), {} features\n\n",
        report.n_rows,
        report.normality.len()
    );
    out.push_str(&format!(
        "{:<12} {:<12} {:>5} {:>8} {:>11} {:>10} {:>5} {:>11}\n",
        "feature", "kind", "n", "W", "p(W)", "chi2", "dof", "p(chi2)"
    ));
    for (norm, chi) in report.normality.iter().zip(&report.chi_square) {
        out.push_str(&format!(
            "{:<12} {:<12} {:>5} {} {} {} {} {}\n",
            norm.feature,
            norm.kind,
            norm.n,
            opt(norm.w, 8, 4),
            opt_sci(norm.p_value, 11),
            opt(chi.statistic, 10, 3),
            match chi.dof {
                Some(d) => format!("{d:>5}"),
                None => format!("{:>5}", "-"),
            },
            opt_sci(chi.p_value, 11),
        ));
    }
    let mut notes: Vec<String> = Vec::new();
    for n in &report.normality {
        if let Some(e) = &n.error {
            notes.push(format!("  {} normality: {e}", n.feature));
        }
    }
    for c in &report.chi_square {
        if let Some(e) = &c.error {
            notes.push(format!("  {} chi-square: {e}", c.feature));
        }
    }
    if !notes.is_empty() {
        out.push_str("\nskipped tests:\n");
        for n in notes {
            out.push_str(&n);
            out.push('\n');
        }
    }
    out
}

pub fn search(stage: &SearchStage) -> String {
    let s = &stage.search;
    let e = &stage.eval;
    let mut out = format!(
        "model {} — {} grid points, {}-fold cross-validation on {} train rows\n",
        s.model, s.n_grid_points, s.config.folds, e.n_train
    );
    if s.n_failed_points > 0 {
        out.push_str(&format!("  {} grid points failed (see the search log)\n", s.n_failed_points));
    }
    out.push_str(&format!("  best (grid point #{}): {}\n", s.best_index, params_line(&s.best.params)));
    out.push_str(&format!(
        "  cv weighted F1: {:.2}% ± {:.2}%\n",
        s.cv_mean_pct, s.cv_std_pct
    ));
    out.push_str(&format!(
        "  test ({} rows): accuracy {:.2}%, weighted F1 {:.2}%, AUC {:.4}\n",
        e.n_test, e.percent.accuracy, e.percent.weighted_f1, e.auc
    ));
    let cm = &e.confusion;
    out.push_str(&format!(
        "  confusion: tp {}  fp {}  tn {}  fn {}\n",
        cm.tp, cm.fp, cm.tn, cm.fn_
    ));
    out
}

pub fn explain(report: &ExplainReport) -> String {
    let mut out = format!(
        "explained {} train rows × {} features (expected value {:.6})\n\n",
        report.n_rows, report.n_features, report.expected_value
    );
    out.push_str(&format!("{:>4}  {:<12} {:>12}\n", "rank", "feature", "mean |phi|"));
    for (rank, entry) in report.ranking.entries.iter().enumerate() {
        out.push_str(&format!(
            "{:>4}  {:<12} {:>12.6}\n",
            rank + 1,
            entry.feature,
            entry.mean_abs_shap
        ));
    }
    out
}

pub fn reduce(stage: &ReduceStage) -> String {
    let c = &stage.comparison;
    let mut out = format!(
        "dropped {} of {} features: {}\n",
        c.drop_count,
        c.dropped.len() + c.retained.len(),
        if c.dropped.is_empty() { "(none)".to_string() } else { c.dropped.join(", ") }
    );
    out.push_str(&format!("retained: {}\n", c.retained.join(", ")));
    out.push_str(&format!(
        "cv weighted F1: {:.2}% ± {:.2}%  →  {:.2}% ± {:.2}%\n",
        c.cv_before.mean_pct, c.cv_before.std_pct, c.cv_after.mean_pct, c.cv_after.std_pct
    ));
    out.push_str(&format!(
        "test weighted F1: {:.2}%  →  {:.2}%    AUC: {:.4}  →  {:.4}\n",
        c.test_before.weighted_f1_pct, c.test_after.weighted_f1_pct, c.test_before.auc, c.test_after.auc
    ));
    out.push_str(&format!("best params after reduction: {}\n", params_line(&c.best_params_after)));
    out
}

pub fn pipeline(stage: &PipelineStage) -> String {
    let r = &stage.report;
    let mut out = format!(
        "pipeline finished: {} rows, {} features, {} classifier families\n\n",
        r.n_rows,
        r.n_features,
        r.models.len()
    );
    out.push_str(&format!(
        "{:<10} {:>14} {:>12} {:>10} {:>9}\n",
        "model", "cv wF1 (mean)", "test wF1", "test acc", "AUC"
    ));
    for m in &r.models {
        out.push_str(&format!(
            "{:<10} {:>13.2}% {:>11.2}% {:>9.2}% {:>9.4}\n",
            m.model, m.cv_mean_pct, m.test.weighted_f1_pct, m.test.accuracy_pct, m.test.auc
        ));
    }
    out.push_str("\ntop features by mean |phi|:\n");
    for entry in r.importance.entries.iter().take(4) {
        out.push_str(&format!("  {:<12} {:.6}\n", entry.feature, entry.mean_abs_shap));
    }
    out.push_str(&format!(
        "\nreduction (dropped {}): cv weighted F1 {:.2}% → {:.2}%, test AUC {:.4} → {:.4}\n",
        r.dropped.join(", "),
        r.cv_before.mean_pct,
        r.cv_after.mean_pct,
        r.test_before.auc,
        r.test_after.auc
    ));
    out.push_str(&format!("artifacts in {}: {}\n", r.config.out.display(), r.artifacts.join(", ")));
    out
}
