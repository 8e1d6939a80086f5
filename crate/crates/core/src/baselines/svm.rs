//! Soft-margin support vector machine trained by sequential minimal
//! optimization (SMO) with deterministic pair selection.

use serde::{Deserialize, Serialize};

use super::{check_schema, BaselineError, Standardizer};
use crate::dataset::DataTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Rbf,
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Linear => write!(f, "linear"),
            Kernel::Rbf => write!(f, "rbf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    /// Box constraint on the dual variables.
    pub c: f64,
    pub kernel: Kernel,
    /// RBF bandwidth; `None` defaults to `sqrt(n_features / 2)`, matching
    /// the common `gamma = 1 / n_features` convention for
    /// `exp(-|x-z|^2 / (2 sigma^2))`.
    pub sigma: Option<f64>,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Maximum number of full sweeps over the training set.
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        // c and kernel match the benchmark's tuned configuration.
        Self { c: 10.0, kernel: Kernel::Rbf, sigma: None, tol: 1e-3, max_passes: 200 }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(BaselineError::BadParams(format!("c must be positive, got {}", self.c)));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(BaselineError::BadParams(format!("sigma must be positive, got {s}")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(BaselineError::BadParams(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_passes == 0 {
            return Err(BaselineError::BadParams("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

/// A fitted SVM. Only rows with positive dual weight are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub params: SvmParams,
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    /// Resolved RBF bandwidth (also recorded for linear kernels).
    pub sigma: f64,
    /// Standardized support vectors.
    pub support_vectors: Vec<Vec<f64>>,
    /// Dual weights, each in `(0, c]`.
    pub alphas: Vec<f64>,
    /// Support-vector labels in `{-1, +1}`.
    pub support_labels: Vec<f64>,
    pub bias: f64,
}

fn kernel_eval(kernel: Kernel, sigma: f64, a: &[f64], b: &[f64]) -> f64 {
    match kernel {
        Kernel::Linear => a.iter().zip(b).map(|(x, z)| x * z).sum(),
        Kernel::Rbf => {
            let sq: f64 = a.iter().zip(b).map(|(x, z)| (x - z) * (x - z)).sum();
            (-sq / (2.0 * sigma * sigma)).exp()
        }
    }
}

impl SvmModel {
    /// Train with full-sweep SMO: every pass visits each row in order,
    /// pairs a KKT violator `i` with the `j` maximizing `|E_i - E_j|`, and
    /// updates the pair analytically. No randomness is involved, so
    /// training is deterministic.
    pub fn fit(train: &DataTable, params: &SvmParams) -> Result<Self, BaselineError> {
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
        let y: Vec<f64> = train.labels().iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();
        let n = x.len();
        let sigma = params.sigma.unwrap_or_else(|| (train.n_features() as f64 / 2.0).sqrt());
        let c = params.c;
        let tol = params.tol;

        let kernel: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| kernel_eval(params.kernel, sigma, &x[i], &x[j])).collect())
            .collect();

        let mut alphas = vec![0.0; n];
        let mut bias = 0.0;
        // g[i] = sum_j alpha_j y_j K_ij (bias excluded).
        let mut g = vec![0.0; n];
        let error = |g: &[f64], bias: f64, i: usize| g[i] + bias - y[i];

        let violates = |alphas: &[f64], g: &[f64], bias: f64, i: usize| -> bool {
            let r = y[i] * error(g, bias, i);
            (r < -tol && alphas[i] < c) || (r > tol && alphas[i] > 0.0)
        };

        let mut converged = false;
        let mut passes = 0;
        while passes < params.max_passes {
            passes += 1;
            let mut changed = 0usize;
            for i in 0..n {
                if !violates(&alphas, &g, bias, i) {
                    continue;
                }
                let e_i = error(&g, bias, i);
                // Second index: maximize |E_i - E_j|, lowest j on ties.
                let mut j_best = usize::MAX;
                let mut gap_best = -1.0;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let gap = (e_i - error(&g, bias, j)).abs();
                    if gap > gap_best {
                        gap_best = gap;
                        j_best = j;
                    }
                }
                let j = j_best;
                let e_j = error(&g, bias, j);

                let (lo, hi) = if y[i] != y[j] {
                    ((alphas[j] - alphas[i]).max(0.0), (c + alphas[j] - alphas[i]).min(c))
                } else {
                    ((alphas[i] + alphas[j] - c).max(0.0), (alphas[i] + alphas[j]).min(c))
                };
                if lo >= hi {
                    continue;
                }
                let eta = 2.0 * kernel[i][j] - kernel[i][i] - kernel[j][j];
                if eta >= 0.0 {
                    continue;
                }
                let mut alpha_j = alphas[j] - y[j] * (e_i - e_j) / eta;
                alpha_j = alpha_j.clamp(lo, hi);
                let delta_j = alpha_j - alphas[j];
                if delta_j.abs() < 1e-12 {
                    continue;
                }
                let delta_i = -y[i] * y[j] * delta_j;
                let alpha_i = alphas[i] + delta_i;

                let b1 = bias - e_i - y[i] * delta_i * kernel[i][i] - y[j] * delta_j * kernel[i][j];
                let b2 = bias - e_j - y[i] * delta_i * kernel[i][j] - y[j] * delta_j * kernel[j][j];
                bias = if alpha_i > 0.0 && alpha_i < c {
                    b1
                } else if alpha_j > 0.0 && alpha_j < c {
                    b2
                } else {
                    (b1 + b2) / 2.0
                };

                for k in 0..n {
                    g[k] += y[i] * delta_i * kernel[i][k] + y[j] * delta_j * kernel[j][k];
                }
                alphas[i] = alpha_i;
                alphas[j] = alpha_j;
                changed += 1;
            }
            if changed == 0 {
                converged = true;
                break;
            }
        }

        let violations = (0..n).filter(|&i| violates(&alphas, &g, bias, i)).count();
        if !converged && violations > 0 {
            return Err(BaselineError::SmoNonConvergence { violations, passes });
        }

        let mut support_vectors = Vec::new();
        let mut support_alphas = Vec::new();
        let mut support_labels = Vec::new();
        for i in 0..n {
            if alphas[i] > 0.0 {
                support_vectors.push(x[i].clone());
                support_alphas.push(alphas[i]);
                support_labels.push(y[i]);
            }
        }
        Ok(Self {
            params: *params,
            feature_names: train.schema().names().to_vec(),
            standardizer,
            sigma,
            support_vectors,
            alphas: support_alphas,
            support_labels,
            bias,
        })
    }

    /// Signed decision value for one raw (unstandardized) row.
    pub fn decision(&self, row: &[f64]) -> f64 {
        let z = self.standardizer.transform_row(row);
        self.support_vectors
            .iter()
            .zip(self.alphas.iter().zip(&self.support_labels))
            .map(|(sv, (a, y))| a * y * kernel_eval(self.params.kernel, self.sigma, sv, &z))
            .sum::<f64>()
            + self.bias
    }

    /// Signed margins (decision values).
    pub fn predict_scores(&self, rows: &DataTable) -> Result<Vec<f64>, BaselineError> {
        check_schema(&self.feature_names, rows)?;
        Ok((0..rows.n_rows()).map(|i| self.decision(rows.row(i))).collect())
    }

    /// Hard predictions at margin zero.
    pub fn predict_labels(&self, rows: &DataTable) -> Result<Vec<u8>, BaselineError> {
        Ok(self.predict_scores(rows)?.into_iter().map(|d| (d >= 0.0) as u8).collect())
    }
}
