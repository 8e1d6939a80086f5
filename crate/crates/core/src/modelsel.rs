//! Stratified k-fold cross-validation and exhaustive grid search that
//! selects hyperparameters on mean weighted F1.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::Kernel;
use crate::dataset::{DataTable, DatasetError};
use crate::gbt::GbtParams;
use crate::metrics::{class_report, confusion, MetricsError};
use crate::model::{Classifier, ClassifierKind, ModelError, ModelParams};
use crate::seed::{self, TAG_FOLD_FIT, TAG_KFOLD};

#[derive(Debug, Error)]
pub enum ModelSelError {
    #[error("k must be at least 2, got {0}")]
    BadK(usize),
    #[error("class {class} has {count} rows, fewer than the {k} folds")]
    ClassSmallerThanK { class: u8, count: usize, k: usize },
    #[error("fold {fold} failed: {source}")]
    FoldFit { fold: usize, source: ModelError },
    #[error("the parameter grid is empty")]
    EmptyGrid,
    #[error("every grid point failed cross-validation")]
    AllPointsFailed,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Deterministic assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    /// `folds[i]` is the fold holding row `i` out for validation.
    pub folds: Vec<usize>,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn n_rows(&self) -> usize {
        self.folds.len()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffle each class independently, then deal rows round-robin into the
/// folds with a single cursor that continues from one class to the next.
/// This keeps both the per-class counts and the overall fold sizes within
/// one of each other.
pub fn stratified_kfold(
    table: &DataTable,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment, ModelSelError> {
    if k < 2 {
        return Err(ModelSelError::BadK(k));
    }
    let (neg, pos) = table.class_counts();
    for (class, count) in [(0u8, neg), (1u8, pos)] {
        if count < k {
            return Err(ModelSelError::ClassSmallerThanK { class, count, k });
        }
    }
    let mut folds = vec![0usize; table.n_rows()];
    let mut cursor = 0usize;
    for class in [0u8, 1u8] {
        let mut idx: Vec<usize> =
            (0..table.n_rows()).filter(|&i| table.label(i) == class).collect();
        let mut rng = seed::rng(seed, &[TAG_KFOLD, u64::from(class)]);
        idx.shuffle(&mut rng);
        for i in idx {
            folds[i] = cursor % k;
            cursor += 1;
        }
    }
    Ok(FoldAssignment { k, folds, seed })
}

/// Per-fold weighted F1 scores with their mean and population standard
/// deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvScores {
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl CvScores {
    fn from_fold_scores(fold_scores: Vec<f64>) -> Self {
        let n = fold_scores.len() as f64;
        let mean = fold_scores.iter().sum::<f64>() / n;
        let var = fold_scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        Self { fold_scores, mean, std: var.sqrt() }
    }
}

/// Run one cross-validation round with an arbitrary per-fold predictor.
/// `predict_fold(fold, train, test)` must return hard labels for `test`'s
/// rows; each fold is scored by support-weighted F1.
pub fn cross_validate_with<F>(
    table: &DataTable,
    folds: &FoldAssignment,
    mut predict_fold: F,
) -> Result<CvScores, ModelSelError>
where
    F: FnMut(usize, &DataTable, &DataTable) -> Result<Vec<u8>, ModelSelError>,
{
    let mut fold_scores = Vec::with_capacity(folds.k);
    for fold in 0..folds.k {
        let train = table.subset_rows(&folds.train_indices(fold));
        let test = table.subset_rows(&folds.test_indices(fold));
        let predictions = predict_fold(fold, &train, &test)?;
        let report = class_report(&confusion(test.labels(), &predictions)?);
        fold_scores.push(report.weighted_f1);
    }
    Ok(CvScores::from_fold_scores(fold_scores))
}

/// Cross-validate one parameter set. Equivalent to
/// [`cross_validate_salted`] with salt 0.
pub fn cross_validate(
    table: &DataTable,
    params: &ModelParams,
    k: usize,
    seed: u64,
) -> Result<CvScores, ModelSelError> {
    cross_validate_salted(table, params, k, seed, 0)
}

/// Cross-validate with an extra `salt` mixed into every per-fold training
/// seed. Grid search salts each point with its grid index so that points
/// could be evaluated concurrently and still reproduce exactly.
pub fn cross_validate_salted(
    table: &DataTable,
    params: &ModelParams,
    k: usize,
    seed: u64,
    salt: u64,
) -> Result<CvScores, ModelSelError> {
    let folds = stratified_kfold(table, k, seed)?;
    cross_validate_with(table, &folds, |fold, train, test| {
        let fit_seed = seed::derive(seed, &[TAG_FOLD_FIT, salt, fold as u64]);
        let model = params
            .fit(train, fit_seed)
            .map_err(|source| ModelSelError::FoldFit { fold, source })?;
        model.predict_labels(test).map_err(|source| ModelSelError::FoldFit { fold, source })
    })
}

/// Candidate lists for one classifier family. The cartesian product is
/// enumerated in declaration order with the last list varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamGrid {
    Gbt {
        max_depth: Vec<usize>,
        n_estimators: Vec<usize>,
        learning_rate: Vec<f64>,
        gamma: Vec<f64>,
        subsample: Vec<f64>,
    },
    Knn {
        n_neighbors: Vec<usize>,
        p: Vec<u32>,
    },
    LogReg {
        c: Vec<f64>,
    },
    Svm {
        c: Vec<f64>,
        kernel: Vec<Kernel>,
    },
    AdaBoost {
        n_estimators: Vec<usize>,
        learning_rate: Vec<f64>,
    },
}

impl ParamGrid {
    /// The stock search space for each family.
    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::Gbt => ParamGrid::Gbt {
                max_depth: vec![2, 3, 5, 6, 8],
                n_estimators: vec![500, 1500, 3000, 5000],
                learning_rate: vec![0.01, 0.1, 0.05, 0.3, 0.5],
                gamma: vec![0.0, 0.1, 0.5, 1.0, 2.0],
                subsample: vec![0.5, 0.7, 0.8, 0.9, 1.0],
            },
            ClassifierKind::Knn => ParamGrid::Knn {
                n_neighbors: vec![3, 5, 7, 9, 11, 13],
                p: vec![1, 2],
            },
            ClassifierKind::LogReg => ParamGrid::LogReg {
                c: vec![0.001, 0.01, 0.1, 1.0, 10.0, 100.0],
            },
            ClassifierKind::Svm => ParamGrid::Svm {
                c: vec![0.01, 0.1, 1.0, 10.0, 100.0],
                kernel: vec![Kernel::Linear, Kernel::Rbf],
            },
            ClassifierKind::AdaBoost => ParamGrid::AdaBoost {
                n_estimators: vec![10, 50, 100, 500, 1000, 1500, 3000],
                learning_rate: vec![0.001, 0.01, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0],
            },
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            ParamGrid::Gbt { .. } => ClassifierKind::Gbt,
            ParamGrid::Knn { .. } => ClassifierKind::Knn,
            ParamGrid::LogReg { .. } => ClassifierKind::LogReg,
            ParamGrid::Svm { .. } => ClassifierKind::Svm,
            ParamGrid::AdaBoost { .. } => ClassifierKind::AdaBoost,
        }
    }

    /// Number of cartesian points.
    pub fn len(&self) -> usize {
        match self {
            ParamGrid::Gbt { max_depth, n_estimators, learning_rate, gamma, subsample } => {
                max_depth.len()
                    * n_estimators.len()
                    * learning_rate.len()
                    * gamma.len()
                    * subsample.len()
            }
            ParamGrid::Knn { n_neighbors, p } => n_neighbors.len() * p.len(),
            ParamGrid::LogReg { c } => c.len(),
            ParamGrid::Svm { c, kernel } => c.len() * kernel.len(),
            ParamGrid::AdaBoost { n_estimators, learning_rate } => {
                n_estimators.len() * learning_rate.len()
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Enumerate every point in deterministic order. Parameters not in the
    /// grid keep their defaults.
    pub fn points(&self) -> Result<Vec<ModelParams>, ModelSelError> {
        if self.is_empty() {
            return Err(ModelSelError::EmptyGrid);
        }
        let mut out = Vec::with_capacity(self.len());
        match self {
            ParamGrid::Gbt { max_depth, n_estimators, learning_rate, gamma, subsample } => {
                for &md in max_depth {
                    for &ne in n_estimators {
                        for &lr in learning_rate {
                            for &g in gamma {
                                for &ss in subsample {
                                    out.push(ModelParams::Gbt(GbtParams {
                                        max_depth: md,
                                        n_estimators: ne,
                                        learning_rate: lr,
                                        gamma: g,
                                        subsample: ss,
                                        ..GbtParams::default()
                                    }));
                                }
                            }
                        }
                    }
                }
            }
            ParamGrid::Knn { n_neighbors, p } => {
                for &k in n_neighbors {
                    for &p in p {
                        out.push(ModelParams::Knn(crate::baselines::KnnParams {
                            n_neighbors: k,
                            p,
                        }));
                    }
                }
            }
            ParamGrid::LogReg { c } => {
                for &c in c {
                    out.push(ModelParams::LogReg(crate::baselines::LogRegParams {
                        c,
                        ..Default::default()
                    }));
                }
            }
            ParamGrid::Svm { c, kernel } => {
                for &c in c {
                    for &kernel in kernel {
                        out.push(ModelParams::Svm(crate::baselines::SvmParams {
                            c,
                            kernel,
                            ..Default::default()
                        }));
                    }
                }
            }
            ParamGrid::AdaBoost { n_estimators, learning_rate } => {
                for &ne in n_estimators {
                    for &lr in learning_rate {
                        out.push(ModelParams::AdaBoost(crate::baselines::AdaBoostParams {
                            n_estimators: ne,
                            learning_rate: lr,
                        }));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Cross-validation outcome for one grid point. A point whose fit failed
/// carries `mean = -inf`, empty fold scores, and the error text; the search
/// notes it and moves on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub params: ModelParams,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// One entry per grid point, in grid order.
    pub results: Vec<CvResult>,
    /// Index of the winner: maximal mean, earliest point on ties.
    pub best: usize,
}

impl SearchResult {
    pub fn best_result(&self) -> &CvResult {
        &self.results[self.best]
    }
}

/// Cross-validate every grid point and pick the best mean weighted F1.
/// Per-point training seeds mix in the grid index, so the outcome does not
/// depend on evaluation order.
pub fn grid_search(
    table: &DataTable,
    grid: &ParamGrid,
    k: usize,
    seed: u64,
) -> Result<SearchResult, ModelSelError> {
    let points = grid.points()?;
    let mut results = Vec::with_capacity(points.len());
    for (gi, params) in points.into_iter().enumerate() {
        match cross_validate_salted(table, &params, k, seed, gi as u64) {
            Ok(cv) => results.push(CvResult {
                params,
                fold_scores: cv.fold_scores,
                mean: cv.mean,
                std: cv.std,
                error: None,
            }),
            Err(ModelSelError::FoldFit { fold, source }) => results.push(CvResult {
                params,
                fold_scores: Vec::new(),
                mean: f64::NEG_INFINITY,
                std: 0.0,
                error: Some(format!("fold {fold}: {source}")),
            }),
            // Structural failures (bad k, class too small) would hit every
            // point identically; abort instead of logging them N times.
            Err(other) => return Err(other),
        }
    }
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.mean > results[best].mean {
            best = i;
        }
    }
    if results[best].error.is_some() {
        return Err(ModelSelError::AllPointsFailed);
    }
    Ok(SearchResult { results, best })
}
