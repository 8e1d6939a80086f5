//! Baseline classifiers benchmarked against the boosted trees: k-nearest
//! neighbours, L2-regularized logistic regression, an SMO-trained support
//! vector machine, and AdaBoost over decision stumps.

pub mod adaboost;
pub mod knn;
pub mod logreg;
pub mod svm;

pub use adaboost::{AdaBoostModel, AdaBoostParams, Stump};
pub use knn::{KnnModel, KnnParams};
pub use logreg::{LogRegModel, LogRegParams};
pub use svm::{Kernel, SvmModel, SvmParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DataTable;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("training data is empty")]
    EmptyTrain,
    #[error("training data must contain both classes")]
    SingleClassTrain,
    #[error("k = {k} exceeds the {n} training rows")]
    KTooLarge { k: usize, n: usize },
    #[error("bad parameter: {0}")]
    BadParams(String),
    #[error("Newton solver stopped after {iterations} iterations with gradient norm {grad_norm:e}")]
    NonConvergence { grad_norm: f64, iterations: usize },
    #[error("SMO stopped after {passes} passes with {violations} KKT violations")]
    SmoNonConvergence { violations: usize, passes: usize },
    #[error("feature names do not match the model: expected {expected:?}, got {got:?}")]
    SchemaMismatch { expected: Vec<String>, got: Vec<String> },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Minkowski distance of order `p` between two equal-length vectors
/// (`p = 1` Manhattan, `p = 2` Euclidean).
pub fn minkowski_distance(x: &[f64], y: &[f64], p: u32) -> Result<f64, BaselineError> {
    if x.len() != y.len() {
        return Err(BaselineError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if p == 0 {
        return Err(BaselineError::BadParams("minkowski order must be at least 1".into()));
    }
    let d = match p {
        1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        2 => x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
        _ => x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs().powi(p as i32))
            .sum::<f64>()
            .powf(1.0 / p as f64),
    };
    Ok(d)
}

/// Per-feature z-score transform fitted on training data (population
/// standard deviation; constant features fall back to unit scale).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(table: &DataTable) -> Self {
        let n = table.n_rows() as f64;
        let m = table.n_features();
        let mut means = vec![0.0; m];
        for i in 0..table.n_rows() {
            for (j, v) in table.row(i).iter().enumerate() {
                means[j] += v;
            }
        }
        for mean in &mut means {
            *mean /= n;
        }
        let mut stds = vec![0.0; m];
        for i in 0..table.n_rows() {
            for (j, v) in table.row(i).iter().enumerate() {
                let d = v - means[j];
                stds[j] += d * d;
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Self { means, stds }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (mean, std))| (v - mean) / std)
            .collect()
    }

    pub fn transform(&self, table: &DataTable) -> Vec<Vec<f64>> {
        (0..table.n_rows()).map(|i| self.transform_row(table.row(i))).collect()
    }
}

/// Solve `A x = b` for a symmetric positive-definite `A` via Cholesky.
/// Returns `None` when the factorization breaks down.
pub(crate) fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // Forward then back substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    Some(x)
}

pub(crate) fn check_schema(
    feature_names: &[String],
    rows: &DataTable,
) -> Result<(), BaselineError> {
    if rows.schema().names() != feature_names {
        return Err(BaselineError::SchemaMismatch {
            expected: feature_names.to_vec(),
            got: rows.schema().names().to_vec(),
        });
    }
    Ok(())
}
