//! L2-regularized logistic regression fitted by damped Newton iterations.

use serde::{Deserialize, Serialize};

use super::{check_schema, cholesky_solve, BaselineError, Standardizer};
use crate::dataset::DataTable;
use crate::numeric::{sigmoid, softplus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegParams {
    /// Inverse regularization strength; the penalty on the weights is
    /// `|w|^2 / (2 c)`. The intercept is never penalized.
    pub c: f64,
    pub max_iter: usize,
    /// Convergence threshold on the gradient norm.
    pub tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        // c matches the benchmark's tuned configuration.
        Self { c: 0.01, max_iter: 100, tol: 1e-8 }
    }
}

impl LogRegParams {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(BaselineError::BadParams(format!("c must be positive, got {}", self.c)));
        }
        if self.max_iter == 0 {
            return Err(BaselineError::BadParams("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(BaselineError::BadParams(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// A fitted logistic-regression model. Weights apply to standardized
/// features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub params: LogRegParams,
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Gradient norm at the accepted iterate (at most `params.tol`).
    pub grad_norm: f64,
    pub n_iter: usize,
}

impl LogRegModel {
    pub fn fit(train: &DataTable, params: &LogRegParams) -> Result<Self, BaselineError> {
        params.validate()?;
        if train.n_rows() == 0 {
            return Err(BaselineError::EmptyTrain);
        }
        let (neg, pos) = train.class_counts();
        if neg == 0 || pos == 0 {
            return Err(BaselineError::SingleClassTrain);
        }
        let standardizer = Standardizer::fit(train);
        let x = standardizer.transform(train);
        let y: Vec<f64> = train.labels().iter().map(|&v| v as f64).collect();
        let m = train.n_features();
        let inv_c = 1.0 / params.c;

        let objective = |w: &[f64], b: f64| -> f64 {
            let mut nll = 0.0;
            for (xi, yi) in x.iter().zip(&y) {
                let z: f64 = b + xi.iter().zip(w).map(|(v, wj)| v * wj).sum::<f64>();
                nll += softplus(z) - yi * z;
            }
            nll + 0.5 * inv_c * w.iter().map(|v| v * v).sum::<f64>()
        };

        let mut w = vec![0.0; m];
        let mut b = 0.0;
        let mut obj = objective(&w, b);
        let mut n_iter = 0;

        for iter in 0..params.max_iter {
            n_iter = iter;
            // Gradient and Hessian of the penalized negative log-likelihood;
            // index m is the intercept.
            let mut grad = vec![0.0; m + 1];
            let mut hess = vec![vec![0.0; m + 1]; m + 1];
            for (xi, yi) in x.iter().zip(&y) {
                let z: f64 = b + xi.iter().zip(&w).map(|(v, wj)| v * wj).sum::<f64>();
                let p = sigmoid(z);
                let r = p - yi;
                let wt = (p * (1.0 - p)).max(1e-12);
                for j in 0..m {
                    grad[j] += r * xi[j];
                    for k in 0..=j {
                        hess[j][k] += wt * xi[j] * xi[k];
                    }
                    hess[m][j] += wt * xi[j];
                }
                grad[m] += r;
                hess[m][m] += wt;
            }
            for j in 0..m {
                grad[j] += inv_c * w[j];
                hess[j][j] += inv_c;
                for k in 0..j {
                    hess[k][j] = hess[j][k];
                }
            }
            for j in 0..m {
                hess[j][m] = hess[m][j];
            }

            let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if grad_norm <= params.tol {
                return Ok(Self {
                    params: *params,
                    feature_names: train.schema().names().to_vec(),
                    standardizer,
                    weights: w,
                    intercept: b,
                    grad_norm,
                    n_iter,
                });
            }

            let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
            let direction = cholesky_solve(&hess, &neg_grad).ok_or(
                BaselineError::NonConvergence { grad_norm, iterations: iter },
            )?;

            // Backtracking line search (Armijo) along the Newton direction.
            let slope: f64 = grad.iter().zip(&direction).map(|(g, d)| g * d).sum();
            let mut step = 1.0;
            loop {
                let w_new: Vec<f64> =
                    w.iter().zip(&direction).map(|(wj, d)| wj + step * d).collect();
                let b_new = b + step * direction[m];
                let obj_new = objective(&w_new, b_new);
                if obj_new <= obj + 1e-4 * step * slope || step < 1e-12 {
                    w = w_new;
                    b = b_new;
                    obj = obj_new;
                    break;
                }
                step /= 2.0;
            }
        }

        // One final gradient check after the last update.
        let mut grad = vec![0.0; m + 1];
        for (xi, yi) in x.iter().zip(&y) {
            let z: f64 = b + xi.iter().zip(&w).map(|(v, wj)| v * wj).sum::<f64>();
            let r = sigmoid(z) - yi;
            for j in 0..m {
                grad[j] += r * xi[j];
            }
            grad[m] += r;
        }
        for j in 0..m {
            grad[j] += inv_c * w[j];
        }
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm <= params.tol {
            return Ok(Self {
                params: *params,
                feature_names: train.schema().names().to_vec(),
                standardizer,
                weights: w,
                intercept: b,
                grad_norm,
                n_iter: n_iter + 1,
            });
        }
        Err(BaselineError::NonConvergence { grad_norm, iterations: params.max_iter })
    }

    fn margin(&self, row: &[f64]) -> f64 {
        let z = self.standardizer.transform_row(row);
        self.intercept + z.iter().zip(&self.weights).map(|(v, w)| v * w).sum::<f64>()
    }

    /// Positive-class probabilities.
    pub fn predict_scores(&self, rows: &DataTable) -> Result<Vec<f64>, BaselineError> {
        check_schema(&self.feature_names, rows)?;
        Ok((0..rows.n_rows()).map(|i| sigmoid(self.margin(rows.row(i)))).collect())
    }

    /// Hard predictions at probability one half.
    pub fn predict_labels(&self, rows: &DataTable) -> Result<Vec<u8>, BaselineError> {
        check_schema(&self.feature_names, rows)?;
        Ok((0..rows.n_rows()).map(|i| (self.margin(rows.row(i)) >= 0.0) as u8).collect())
    }
}
