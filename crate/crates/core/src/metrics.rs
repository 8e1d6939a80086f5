//! Classification metrics: confusion matrices, per-class precision, recall
//! and F1, support-weighted F1, ROC curves with exact tie handling, and
//! learning curves over growing training fractions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{stratified_sample_indices, DataTable};
use crate::model::{Classifier, ModelParams};
use crate::modelsel::{cross_validate, ModelSelError};
use crate::seed;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("labels and predictions differ in length: {labels} vs {predictions}")]
    LengthMismatch { labels: usize, predictions: usize },
    #[error("scores must be finite")]
    NonFiniteScore,
    #[error("ROC needs both classes present in the labels")]
    SingleClassLabels,
    #[error("empty input")]
    EmptyInput,
    #[error("learning-curve fractions must be strictly increasing within (0, 1]")]
    BadFractions,
}

/// Binary confusion counts. The positive class is label 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Rows with true label 1 / 0 respectively.
    pub fn support_pos(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn support_neg(&self) -> usize {
        self.tn + self.fp
    }
}

/// Tally a confusion matrix from labels and hard predictions.
pub fn confusion(labels: &[u8], predictions: &[u8]) -> Result<ConfusionMatrix, MetricsError> {
    if labels.len() != predictions.len() {
        return Err(MetricsError::LengthMismatch {
            labels: labels.len(),
            predictions: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut cm = ConfusionMatrix { tp: 0, fp: 0, tn: 0, fn_: 0 };
    for (&y, &p) in labels.iter().zip(predictions) {
        match (y, p) {
            (1, 1) => cm.tp += 1,
            (0, 1) => cm.fp += 1,
            (0, 0) => cm.tn += 1,
            (1, 0) => cm.fn_ += 1,
            _ => return Err(MetricsError::EmptyInput),
        }
    }
    Ok(cm)
}

/// Per-class precision/recall/F1 plus accuracy and support-weighted F1.
/// Ratios whose denominator is zero are reported as 0 with `degenerate`
/// set, never as NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub accuracy: f64,
    pub precision_pos: f64,
    pub recall_pos: f64,
    pub f1_pos: f64,
    pub precision_neg: f64,
    pub recall_neg: f64,
    pub f1_neg: f64,
    pub weighted_f1: f64,
    pub degenerate: bool,
}

fn ratio(num: f64, den: f64, degenerate: &mut bool) -> f64 {
    if den == 0.0 {
        *degenerate = true;
        0.0
    } else {
        num / den
    }
}

/// Derive the full per-class report from a confusion matrix.
pub fn class_report(cm: &ConfusionMatrix) -> ClassReport {
    let (tp, fp, tn, fn_) = (cm.tp as f64, cm.fp as f64, cm.tn as f64, cm.fn_ as f64);
    let mut degenerate = false;
    let accuracy = ratio(tp + tn, tp + fp + tn + fn_, &mut degenerate);
    let precision_pos = ratio(tp, tp + fp, &mut degenerate);
    let recall_pos = ratio(tp, tp + fn_, &mut degenerate);
    let f1_pos = ratio(2.0 * precision_pos * recall_pos, precision_pos + recall_pos, &mut degenerate);
    let precision_neg = ratio(tn, tn + fn_, &mut degenerate);
    let recall_neg = ratio(tn, tn + fp, &mut degenerate);
    let f1_neg = ratio(2.0 * precision_neg * recall_neg, precision_neg + recall_neg, &mut degenerate);
    let support_pos = tp + fn_;
    let support_neg = tn + fp;
    let weighted_f1 = ratio(
        f1_pos * support_pos + f1_neg * support_neg,
        support_pos + support_neg,
        &mut degenerate,
    );
    ClassReport {
        accuracy,
        precision_pos,
        recall_pos,
        f1_pos,
        precision_neg,
        recall_neg,
        f1_neg,
        weighted_f1,
        degenerate,
    }
}

/// Round a proportion to a percentage with two decimals (report formatting).
pub fn percent(x: f64) -> f64 {
    (x * 10_000.0).round() / 100.0
}

/// ROC curve points plus the exact area under it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)` pairs from (0,0) to
    /// (1,1); tied scores advance both coordinates in one step.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC curve and AUC from scores (higher score = more positive).
///
/// The AUC is the Mann-Whitney probability that a random positive outscores
/// a random negative, counting ties as one half — exactly the trapezoid
/// area under the tie-aware curve.
pub fn roc_auc(labels: &[u8], scores: &[f64]) -> Result<RocCurve, MetricsError> {
    if labels.len() != scores.len() {
        return Err(MetricsError::LengthMismatch {
            labels: labels.len(),
            predictions: scores.len(),
        });
    }
    if labels.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(MetricsError::NonFiniteScore);
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::SingleClassLabels);
    }

    // Curve: sweep thresholds from high to low; a group of tied scores
    // moves the point diagonally in a single step.
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));
    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        i = j;
    }

    // AUC via midranks (ascending): AUC = (R_pos - n_pos (n_pos+1)/2) / (n_pos n_neg).
    let mut asc: Vec<usize> = (0..labels.len()).collect();
    asc.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < asc.len() {
        let mut j = i;
        while j < asc.len() && scores[asc[j]] == scores[asc[i]] {
            j += 1;
        }
        // Ranks are 1-based; tied block [i, j) shares the midrank.
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &idx in &asc[i..j] {
            if labels[idx] == 1 {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }
    let auc = (rank_sum_pos - n_pos as f64 * (n_pos as f64 + 1.0) / 2.0)
        / (n_pos as f64 * n_neg as f64);
    Ok(RocCurve { points, auc })
}

/// Cross-validated and training scores over growing training fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub fractions: Vec<f64>,
    /// Weighted F1 of a model fit on the subsample, scored on that same
    /// subsample.
    pub train_scores: Vec<f64>,
    /// Mean cross-validated weighted F1 on the subsample.
    pub cv_scores: Vec<f64>,
}

/// Fit models on stratified subsamples of growing size and record train
/// and cross-validated weighted F1 for each fraction.
///
/// Fractions must be strictly increasing within (0, 1]; a final fraction of
/// 1.0 reproduces `cross_validate` on the full table exactly, since the
/// subsample then is the identity and the CV seed is unchanged.
pub fn learning_curve(
    table: &DataTable,
    params: &ModelParams,
    fractions: &[f64],
    k: usize,
    seed: u64,
) -> Result<LearningCurve, ModelSelError> {
    if fractions.is_empty()
        || fractions.windows(2).any(|w| w[0] >= w[1])
        || fractions.iter().any(|&f| !(0.0..=1.0).contains(&f) || f == 0.0)
    {
        return Err(MetricsError::BadFractions.into());
    }
    let mut train_scores = Vec::with_capacity(fractions.len());
    let mut cv_scores = Vec::with_capacity(fractions.len());
    for (fi, &fraction) in fractions.iter().enumerate() {
        let mut rng = seed::rng(seed, &[seed::TAG_LEARNING_CURVE, fi as u64]);
        let indices = stratified_sample_indices(table, fraction, &mut rng);
        let sub = table.subset_rows(&indices);

        let cv = cross_validate(&sub, params, k, seed)?;
        cv_scores.push(cv.mean);

        let fit_seed = seed::derive(seed, &[seed::TAG_LEARNING_CURVE, fi as u64]);
        let model = params.fit(&sub, fit_seed).map_err(|source| ModelSelError::FoldFit {
            fold: 0,
            source,
        })?;
        let predictions = model.predict_labels(&sub).map_err(|source| {
            ModelSelError::FoldFit { fold: 0, source }
        })?;
        let report = class_report(&confusion(sub.labels(), &predictions)?);
        train_scores.push(report.weighted_f1);
    }
    Ok(LearningCurve { fractions: fractions.to_vec(), train_scores, cv_scores })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_counts_each_quadrant() {
        let cm = confusion(&[1, 1, 0, 0], &[1, 0, 0, 1]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 1, fp: 1, tn: 1, fn_: 1 });
        assert_eq!(cm.total(), 4);
        let report = class_report(&cm);
        assert_eq!(report.accuracy, 0.5);
        assert_eq!(report.precision_pos, 0.5);
        assert_eq!(report.recall_neg, 0.5);
        assert_eq!(report.weighted_f1, 0.5);
        assert!(!report.degenerate);
    }

    #[test]
    fn confusion_rejects_mismatched_lengths() {
        assert!(matches!(
            confusion(&[1, 0], &[1]).unwrap_err(),
            MetricsError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn all_positive_predictions_flag_degenerate_ratios() {
        let cm = confusion(&[1, 0, 1], &[1, 1, 1]).unwrap();
        let report = class_report(&cm);
        assert!(report.degenerate);
        assert_eq!(report.precision_neg, 0.0);
        assert_eq!(report.f1_neg, 0.0);
        assert!(report.accuracy > 0.0);
        assert!(!report.accuracy.is_nan());
    }

    #[test]
    fn perfect_predictions_score_one_everywhere() {
        let labels = [1, 0, 1, 0, 1, 1, 0];
        let cm = confusion(&labels, &labels).unwrap();
        let report = class_report(&cm);
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.f1_pos, 1.0);
        assert_eq!(report.f1_neg, 1.0);
        assert_eq!(report.weighted_f1, 1.0);
    }

    #[test]
    fn weighted_f1_weights_by_support() {
        // 8 positives, 2 negatives.
        let cm = ConfusionMatrix { tp: 6, fn_: 2, tn: 1, fp: 1 };
        let report = class_report(&cm);
        let expected =
            (report.f1_pos * 8.0 + report.f1_neg * 2.0) / 10.0;
        assert!((report.weighted_f1 - expected).abs() < 1e-15);
        // On balanced data weighted F1 is the plain macro average.
        let balanced = ConfusionMatrix { tp: 4, fn_: 1, tn: 3, fp: 2 };
        let r = class_report(&balanced);
        assert!((r.weighted_f1 - (r.f1_pos + r.f1_neg) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn roc_matches_hand_computed_example() {
        let curve = roc_auc(&[0, 0, 1, 1], &[0.1, 0.4, 0.35, 0.8]).unwrap();
        assert!((curve.auc - 0.75).abs() < 1e-15);
        assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn roc_on_perfectly_separated_scores_is_one() {
        let labels = [0, 0, 0, 1, 1];
        let scores = [0.1, 0.2, 0.3, 0.9, 0.8];
        assert_eq!(roc_auc(&labels, &scores).unwrap().auc, 1.0);
        // Reversed scores give zero.
        let rev: Vec<f64> = scores.iter().map(|s| -s).collect();
        assert_eq!(roc_auc(&labels, &rev).unwrap().auc, 0.0);
    }

    #[test]
    fn roc_with_all_scores_equal_is_half() {
        let curve = roc_auc(&[0, 1, 0, 1, 1], &[0.7; 5]).unwrap();
        assert!((curve.auc - 0.5).abs() < 1e-15);
        assert_eq!(curve.points, vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn roc_rejects_single_class_and_non_finite() {
        assert!(matches!(
            roc_auc(&[1, 1], &[0.5, 0.6]).unwrap_err(),
            MetricsError::SingleClassLabels
        ));
        assert!(matches!(
            roc_auc(&[1, 0], &[f64::NAN, 0.6]).unwrap_err(),
            MetricsError::NonFiniteScore
        ));
    }

    fn trapezoid_area(points: &[(f64, f64)]) -> f64 {
        points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }

    #[test]
    fn rank_auc_equals_trapezoid_area_under_ties() {
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::default();
        runner
            .run(
                &proptest::collection::vec((0u8..2, 0i32..6), 4..60),
                |rows| {
                    let labels: Vec<u8> = rows.iter().map(|r| r.0).collect();
                    // Coarse score grid to force plenty of ties.
                    let scores: Vec<f64> = rows.iter().map(|r| r.1 as f64 / 5.0).collect();
                    if !labels.contains(&0) || !labels.contains(&1) {
                        return Ok(());
                    }
                    let curve = roc_auc(&labels, &scores).unwrap();
                    let area = trapezoid_area(&curve.points);
                    prop_assert!(
                        (curve.auc - area).abs() < 1e-12,
                        "rank AUC {} vs trapezoid {}",
                        curve.auc,
                        area
                    );
                    prop_assert!((0.0..=1.0).contains(&curve.auc));
                    Ok(())
                },
            )
            .unwrap();
    }

    #[test]
    fn roc_is_invariant_under_row_permutation() {
        let labels = [0, 1, 1, 0, 1, 0, 0, 1];
        let scores = [0.2, 0.8, 0.5, 0.5, 0.9, 0.1, 0.55, 0.4];
        let base = roc_auc(&labels, &scores).unwrap();
        let perm = [3usize, 0, 7, 5, 2, 6, 1, 4];
        let plabels: Vec<u8> = perm.iter().map(|&i| labels[i]).collect();
        let pscores: Vec<f64> = perm.iter().map(|&i| scores[i]).collect();
        let permuted = roc_auc(&plabels, &pscores).unwrap();
        assert_eq!(base.auc, permuted.auc);
        assert_eq!(base.points, permuted.points);
    }

    #[test]
    fn percent_rounds_to_two_decimals() {
        assert_eq!(percent(0.923076923), 92.31);
        assert_eq!(percent(1.0), 100.0);
        assert_eq!(percent(0.0), 0.0);
    }
}
