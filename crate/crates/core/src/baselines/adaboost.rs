//! AdaBoost over depth-one decision stumps with exponential reweighting.

use serde::{Deserialize, Serialize};

use super::{check_schema, BaselineError};
use crate::dataset::DataTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaBoostParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        Self { n_estimators: 1000, learning_rate: 1.0 }
    }
}

impl AdaBoostParams {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.n_estimators == 0 {
            return Err(BaselineError::BadParams("n_estimators must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(BaselineError::BadParams(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// One weak learner: `sign(x[feature] >= threshold) * polarity`, voting
/// with weight `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// `1` keeps the orientation (high values vote +1), `-1` flips it.
    pub polarity: i8,
    pub alpha: f64,
}

impl Stump {
    /// Raw vote in `{-1, +1}`.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let base = if row[self.feature] >= self.threshold { 1.0 } else { -1.0 };
        base * f64::from(self.polarity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub params: AdaBoostParams,
    pub feature_names: Vec<String>,
    pub stumps: Vec<Stump>,
}

/// Candidate thresholds for one sorted column: the minimum itself (which
/// yields a constant rule, since every value satisfies `>= min`) plus the
/// midpoints between consecutive distinct values.
fn candidate_thresholds(sorted: &[f64]) -> Vec<f64> {
    let mut out = vec![sorted[0]];
    for w in sorted.windows(2) {
        if w[1] > w[0] {
            let mid = 0.5 * (w[0] + w[1]);
            // Degenerate midpoints (adjacent floats) would duplicate the
            // upper value's cell; keep only genuine separators.
            if mid > w[0] && mid < w[1] {
                out.push(mid);
            }
        }
    }
    out
}

impl AdaBoostModel {
    pub fn fit(train: &DataTable, params: &AdaBoostParams) -> Result<Self, BaselineError> {
        params.validate()?;
        if train.n_rows() == 0 {
            return Err(BaselineError::EmptyTrain);
        }
        let (neg, pos) = train.class_counts();
        if neg == 0 || pos == 0 {
            return Err(BaselineError::SingleClassTrain);
        }
        let n = train.n_rows();
        let m = train.n_features();
        let y: Vec<f64> = train.labels().iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();

        // Sort row indices once per feature; the per-round error scan walks
        // each column in ascending value order.
        let mut order: Vec<Vec<usize>> = Vec::with_capacity(m);
        let mut thresholds: Vec<Vec<f64>> = Vec::with_capacity(m);
        for f in 0..m {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| train.value(a, f).total_cmp(&train.value(b, f)));
            let sorted: Vec<f64> = idx.iter().map(|&i| train.value(i, f)).collect();
            thresholds.push(candidate_thresholds(&sorted));
            order.push(idx);
        }

        let mut weights = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        for _ in 0..params.n_estimators {
            // For each (feature, threshold), the +1-polarity error is the
            // weight of positives below the cut plus negatives at or above
            // it. Walking the sorted column keeps this a prefix sum: start
            // with the threshold at the minimum (nothing below the cut) and
            // move rows below it one by one.
            let mut best: Option<(f64, usize, f64, i8)> = None;
            for f in 0..m {
                let total_neg: f64 = weights
                    .iter()
                    .zip(&y)
                    .filter(|&(_, &yi)| yi < 0.0)
                    .map(|(w, _)| w)
                    .sum();
                let mut err_plus = total_neg;
                let mut cursor = 0usize;
                for &t in &thresholds[f] {
                    while cursor < n {
                        let i = order[f][cursor];
                        if train.value(i, f) >= t {
                            break;
                        }
                        // Row i drops below the cut: a positive below the
                        // cut is now wrong, a negative is now right.
                        err_plus += y[i] * weights[i];
                        cursor += 1;
                    }
                    for (err, polarity) in [(err_plus, 1i8), (1.0 - err_plus, -1i8)] {
                        if best.is_none_or(|(e, ..)| err < e) {
                            best = Some((err, f, t, polarity));
                        }
                    }
                }
            }
            let (eps, feature, threshold, polarity) =
                best.expect("at least one candidate threshold per feature");
            if eps >= 0.5 {
                // No stump beats coin-flipping on the current weights.
                break;
            }
            let eps_c = eps.clamp(1e-10, 1.0 - 1e-10);
            let alpha = params.learning_rate * 0.5 * ((1.0 - eps_c) / eps_c).ln();
            let stump = Stump { feature, threshold, polarity, alpha };

            let mut sum = 0.0;
            for i in 0..n {
                weights[i] *= (-alpha * y[i] * stump.predict(train.row(i))).exp();
                sum += weights[i];
            }
            for w in &mut weights {
                *w /= sum;
            }
            debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);

            stumps.push(stump);
            if eps <= 1e-10 {
                // The ensemble is already perfect on the training weights.
                break;
            }
        }

        Ok(Self {
            params: *params,
            feature_names: train.schema().names().to_vec(),
            stumps,
        })
    }

    /// Weighted vote sum for one row.
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.stumps.iter().map(|s| s.alpha * s.predict(row)).sum()
    }

    pub fn predict_scores(&self, rows: &DataTable) -> Result<Vec<f64>, BaselineError> {
        check_schema(&self.feature_names, rows)?;
        Ok((0..rows.n_rows()).map(|i| self.decision(rows.row(i))).collect())
    }

    pub fn predict_labels(&self, rows: &DataTable) -> Result<Vec<u8>, BaselineError> {
        Ok(self.predict_scores(rows)?.into_iter().map(|d| (d > 0.0) as u8).collect())
    }
}
