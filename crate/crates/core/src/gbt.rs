//! Gradient-boosted decision trees for binary classification with logistic
//! loss, built from scratch.
//!
//! Each boosting round fits a regression tree to the current residuals
//! `y - p`. Splits maximize the gain in similarity score
//! `(sum residuals)^2 / (sum covers + lambda)` where a row's cover is
//! `p (1 - p)`; splits whose gain falls below `gamma` are discarded. Leaf
//! outputs are `sum residuals / (sum covers + lambda)`, shrunk by the
//! learning rate, and rows can be subsampled per round without replacement
//! from a seeded stream.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DataTable;
use crate::numeric::{sigmoid, softplus};
use crate::seed;

#[derive(Debug, Error)]
pub enum GbtError {
    #[error("training data must contain both classes")]
    SingleClassTrain,
    #[error("bad parameter: {0}")]
    BadParams(String),
    #[error("feature names do not match the model: expected {expected:?}, got {got:?}")]
    SchemaMismatch { expected: Vec<String>, got: Vec<String> },
}

/// Boosting hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtParams {
    /// Maximum tree depth (a single split is depth 1).
    pub max_depth: usize,
    /// Number of boosting rounds.
    pub n_estimators: usize,
    /// Shrinkage applied to every leaf output.
    pub learning_rate: f64,
    /// Minimum similarity gain a split must reach to be kept.
    pub gamma: f64,
    /// Fraction of rows drawn (without replacement) per round.
    pub subsample: f64,
    /// L2 regularization added to the cover in similarity and leaf output.
    pub lambda: f64,
    /// Minimum summed cover each child of a split must retain.
    pub min_child_weight: f64,
    /// Seed for the row-subsampling stream (unused when `subsample == 1`).
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            max_depth: 3,
            n_estimators: 1500,
            learning_rate: 0.1,
            gamma: 0.0,
            subsample: 1.0,
            lambda: 1.0,
            min_child_weight: 1.0,
            seed: 15,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<(), GbtError> {
        if self.max_depth == 0 {
            return Err(GbtError::BadParams("max_depth must be at least 1".into()));
        }
        if self.n_estimators == 0 {
            return Err(GbtError::BadParams("n_estimators must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(GbtError::BadParams(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if !(self.gamma >= 0.0) {
            return Err(GbtError::BadParams(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(GbtError::BadParams(format!(
                "subsample must lie in (0, 1], got {}",
                self.subsample
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(GbtError::BadParams(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.min_child_weight >= 0.0) {
            return Err(GbtError::BadParams(format!(
                "min_child_weight must be >= 0, got {}",
                self.min_child_weight
            )));
        }
        Ok(())
    }
}

/// A regression tree node. Rows with `feature value < threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        /// Summed cover of the training rows that reached this node.
        cover: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        output: f64,
        cover: f64,
    },
}

impl TreeNode {
    pub fn cover(&self) -> f64 {
        match self {
            TreeNode::Split { cover, .. } | TreeNode::Leaf { cover, .. } => *cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    /// Output of the leaf this row falls into.
    pub fn eval(&self, row: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { output, .. } => *output,
            TreeNode::Split { feature, threshold, left, right, .. } => {
                if row[*feature] < *threshold {
                    left.eval(row)
                } else {
                    right.eval(row)
                }
            }
        }
    }

    /// Cover-weighted mean leaf output — the tree's prediction for a row
    /// drawn from the training distribution.
    pub fn expected_output(&self) -> f64 {
        fn walk(node: &TreeNode) -> (f64, f64) {
            match node {
                TreeNode::Leaf { output, cover } => (output * cover, *cover),
                TreeNode::Split { left, right, .. } => {
                    let (ls, lc) = walk(left);
                    let (rs, rc) = walk(right);
                    (ls + rs, lc + rc)
                }
            }
        }
        let (sum, cover) = walk(self);
        sum / cover
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// A fitted boosted ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub params: GbtParams,
    /// Log-odds of the positive class on the training data; the margin all
    /// trees correct from.
    pub base_margin: f64,
    pub feature_names: Vec<String>,
    pub trees: Vec<TreeNode>,
}

/// Similarity score of a node: `(sum residuals)^2 / (sum covers + lambda)`.
pub fn similarity_score(residuals: &[f64], covers: &[f64], lambda: f64) -> f64 {
    assert_eq!(residuals.len(), covers.len(), "residuals and covers must align");
    let r: f64 = residuals.iter().sum();
    let c: f64 = covers.iter().sum();
    similarity_from_sums(r, c, lambda)
}

fn similarity_from_sums(sum_residual: f64, sum_cover: f64, lambda: f64) -> f64 {
    sum_residual * sum_residual / (sum_cover + lambda)
}

/// Gain of a split: what the children's similarity adds over the parent's.
pub fn split_gain(left: f64, right: f64, parent: f64) -> f64 {
    left + right - parent
}

/// Probabilities are clamped away from 0 and 1 so covers stay positive even
/// when margins saturate.
const P_CLAMP: f64 = 1e-15;

struct FitContext<'a> {
    train: &'a DataTable,
    residuals: Vec<f64>,
    covers: Vec<f64>,
    lambda: f64,
    gamma: f64,
    min_child_weight: f64,
    max_depth: usize,
}

impl GbtModel {
    /// Train an ensemble. The training table must contain both classes.
    pub fn fit(train: &DataTable, params: &GbtParams) -> Result<Self, GbtError> {
        params.validate()?;
        let (neg, pos) = train.class_counts();
        if neg == 0 || pos == 0 {
            return Err(GbtError::SingleClassTrain);
        }
        let n = train.n_rows();
        let m = train.n_features();
        let p_mean = pos as f64 / n as f64;
        let base_margin = (p_mean / (1.0 - p_mean)).ln();

        // Rows sorted per feature once; node row lists stay sorted by
        // filtering these.
        let presorted: Vec<Vec<u32>> = (0..m)
            .map(|j| {
                let mut order: Vec<u32> = (0..n as u32).collect();
                order.sort_by(|&a, &b| {
                    train
                        .value(a as usize, j)
                        .partial_cmp(&train.value(b as usize, j))
                        .expect("finite values")
                });
                order
            })
            .collect();

        let mut margins = vec![base_margin; n];
        let mut trees = Vec::with_capacity(params.n_estimators);
        let mut ctx = FitContext {
            train,
            residuals: vec![0.0; n],
            covers: vec![0.0; n],
            lambda: params.lambda,
            gamma: params.gamma,
            min_child_weight: params.min_child_weight,
            max_depth: params.max_depth,
        };

        for round in 0..params.n_estimators {
            for i in 0..n {
                let p = sigmoid(margins[i]).clamp(P_CLAMP, 1.0 - P_CLAMP);
                ctx.residuals[i] = train.label(i) as f64 - p;
                ctx.covers[i] = p * (1.0 - p);
            }

            let lists: Vec<Vec<u32>> = if params.subsample < 1.0 {
                let n_sub = ((n as f64 * params.subsample).round() as usize).clamp(1, n);
                let mut pool: Vec<u32> = (0..n as u32).collect();
                let mut rng = seed::rng(params.seed, &[seed::TAG_SUBSAMPLE, round as u64]);
                pool.shuffle(&mut rng);
                let mut member = vec![false; n];
                for &i in &pool[..n_sub] {
                    member[i as usize] = true;
                }
                presorted
                    .iter()
                    .map(|order| {
                        order.iter().copied().filter(|&i| member[i as usize]).collect()
                    })
                    .collect()
            } else {
                presorted.clone()
            };

            let tree = grow(&ctx, lists, 0);
            for i in 0..n {
                margins[i] += params.learning_rate * tree.eval(train.row(i));
            }
            trees.push(tree);
        }

        Ok(Self {
            params: params.clone(),
            base_margin,
            feature_names: train.schema().names().to_vec(),
            trees,
        })
    }

    fn check_schema(&self, rows: &DataTable) -> Result<(), GbtError> {
        if rows.schema().names() != self.feature_names.as_slice() {
            return Err(GbtError::SchemaMismatch {
                expected: self.feature_names.clone(),
                got: rows.schema().names().to_vec(),
            });
        }
        Ok(())
    }

    /// Raw additive margin (log-odds) per row.
    pub fn predict_margin(&self, rows: &DataTable) -> Result<Vec<f64>, GbtError> {
        self.check_schema(rows)?;
        Ok((0..rows.n_rows())
            .map(|i| {
                let row = rows.row(i);
                self.base_margin
                    + self.params.learning_rate
                        * self.trees.iter().map(|t| t.eval(row)).sum::<f64>()
            })
            .collect())
    }

    /// Positive-class probability per row.
    pub fn predict_proba(&self, rows: &DataTable) -> Result<Vec<f64>, GbtError> {
        Ok(self.predict_margin(rows)?.into_iter().map(sigmoid).collect())
    }

    /// Hard 0/1 predictions (positive when the margin is non-negative,
    /// i.e. probability at least one half).
    pub fn predict_labels(&self, rows: &DataTable) -> Result<Vec<u8>, GbtError> {
        Ok(self.predict_margin(rows)?.into_iter().map(|m| (m >= 0.0) as u8).collect())
    }

    /// Mean logistic loss on `rows` after each boosting round, starting
    /// from the bare base margin (index 0). Useful for convergence audits.
    pub fn staged_logloss(&self, rows: &DataTable) -> Result<Vec<f64>, GbtError> {
        self.check_schema(rows)?;
        let n = rows.n_rows();
        let mut margins = vec![self.base_margin; n];
        let loss = |margins: &[f64]| -> f64 {
            margins
                .iter()
                .zip(rows.labels())
                .map(|(&m, &y)| softplus(m) - y as f64 * m)
                .sum::<f64>()
                / n as f64
        };
        let mut losses = Vec::with_capacity(self.trees.len() + 1);
        losses.push(loss(&margins));
        for tree in &self.trees {
            for i in 0..n {
                margins[i] += self.params.learning_rate * tree.eval(rows.row(i));
            }
            losses.push(loss(&margins));
        }
        Ok(losses)
    }
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn grow(ctx: &FitContext<'_>, lists: Vec<Vec<u32>>, depth: usize) -> TreeNode {
    let rows = &lists[0];
    let sum_r: f64 = rows.iter().map(|&i| ctx.residuals[i as usize]).sum();
    let sum_c: f64 = rows.iter().map(|&i| ctx.covers[i as usize]).sum();
    let leaf = |sum_r: f64, sum_c: f64| TreeNode::Leaf {
        output: if sum_c + ctx.lambda > 0.0 { sum_r / (sum_c + ctx.lambda) } else { 0.0 },
        cover: sum_c,
    };

    if depth >= ctx.max_depth || rows.len() < 2 {
        return leaf(sum_r, sum_c);
    }
    let best = match find_best_split(ctx, &lists, sum_r, sum_c) {
        Some(b) if b.gain >= ctx.gamma => b,
        _ => return leaf(sum_r, sum_c),
    };

    // Partition every feature's sorted list so children inherit the order.
    let mut left_lists = Vec::with_capacity(lists.len());
    let mut right_lists = Vec::with_capacity(lists.len());
    for list in &lists {
        let (l, r): (Vec<u32>, Vec<u32>) = list
            .iter()
            .partition(|&&i| ctx.train.value(i as usize, best.feature) < best.threshold);
        left_lists.push(l);
        right_lists.push(r);
    }
    let left = grow(ctx, left_lists, depth + 1);
    let right = grow(ctx, right_lists, depth + 1);
    TreeNode::Split {
        feature: best.feature,
        threshold: best.threshold,
        cover: sum_c,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Scan all midpoint thresholds of all features. Ties are broken toward
/// the lower feature index, then the lower threshold (by scanning in that
/// order and replacing only on strictly larger gain).
fn find_best_split(
    ctx: &FitContext<'_>,
    lists: &[Vec<u32>],
    sum_r: f64,
    sum_c: f64,
) -> Option<BestSplit> {
    let parent = similarity_from_sums(sum_r, sum_c, ctx.lambda);
    let mut best: Option<BestSplit> = None;
    for (feature, order) in lists.iter().enumerate() {
        let mut left_r = 0.0;
        let mut left_c = 0.0;
        for idx in 0..order.len() - 1 {
            let i = order[idx] as usize;
            left_r += ctx.residuals[i];
            left_c += ctx.covers[i];
            let v = ctx.train.value(i, feature);
            let v_next = ctx.train.value(order[idx + 1] as usize, feature);
            if v == v_next {
                continue;
            }
            let threshold = (v + v_next) / 2.0;
            if !(threshold > v) {
                // Adjacent floats; the midpoint cannot separate them.
                continue;
            }
            let right_c = sum_c - left_c;
            if left_c < ctx.min_child_weight || right_c < ctx.min_child_weight {
                continue;
            }
            let gain = split_gain(
                similarity_from_sums(left_r, left_c, ctx.lambda),
                similarity_from_sums(sum_r - left_r, right_c, ctx.lambda),
                parent,
            );
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit { gain, feature, threshold });
            }
        }
    }
    best
}
