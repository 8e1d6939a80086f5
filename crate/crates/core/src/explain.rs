//! Shapley-value explanations for the boosted-tree ensemble: an exact
//! polynomial-time path recursion, a brute-force subset-enumeration oracle,
//! mean-|φ| feature ranking, summary-plot points, and SHAP-driven feature
//! reduction.
//!
//! Explanations live in margin (log-odds) space so they add across trees.
//! Conditional expectations are cover-weighted: when a split's feature is
//! outside the conditioning set, both children contribute in proportion to
//! their share of the parent's cover.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DataTable;
use crate::gbt::{GbtModel, TreeNode};

/// Brute-force enumeration walks all `2^M` feature subsets; cap the width.
pub const BRUTE_FORCE_MAX_FEATURES: usize = 20;

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("feature names do not match the model: expected {expected:?}, got {got:?}")]
    SchemaMismatch { expected: Vec<String>, got: Vec<String> },
    #[error("every tree node must carry positive cover")]
    NonPositiveCover,
    #[error("brute-force Shapley enumeration supports at most {max} features, got {m}")]
    TooManyFeatures { m: usize, max: usize },
    #[error("drop_count {drop_count} must be smaller than the {m} features")]
    DropCountOutOfRange { drop_count: usize, m: usize },
}

/// Per-instance, per-feature Shapley values in margin space.
///
/// Local accuracy holds by construction: for every explained row,
/// `expected_value + Σⱼ values[row][j]` equals the model margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapMatrix {
    /// `values[row][feature]` = φ of that feature for that row.
    pub values: Vec<Vec<f64>>,
    /// Margin of the "empty" explanation: the base margin plus each tree's
    /// cover-weighted mean leaf output, scaled by the learning rate.
    pub expected_value: f64,
}

impl ShapMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_features(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }
}

/// One step of the unique-feature path maintained by the recursion.
#[derive(Debug, Clone, Copy)]
struct PathElement {
    /// Splitting feature, or `usize::MAX` for the root sentinel.
    feature: usize,
    /// Fraction of paths that flow through when the feature is not in the
    /// conditioning set (cover ratio product).
    zero_fraction: f64,
    /// 1 if the instance's value follows this branch, else 0.
    one_fraction: f64,
    /// Proportion of subset permutations of each size flowing through.
    pweight: f64,
}

/// Append one element and redistribute the subset-size weights.
fn extend(path: &mut Vec<PathElement>, zero_fraction: f64, one_fraction: f64, feature: usize) {
    let d = path.len();
    path.push(PathElement {
        feature,
        zero_fraction,
        one_fraction,
        pweight: if d == 0 { 1.0 } else { 0.0 },
    });
    for i in (0..d).rev() {
        path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) as f64 / (d + 1) as f64;
        path[i].pweight = zero_fraction * path[i].pweight * (d - i) as f64 / (d + 1) as f64;
    }
}

/// Remove the element at `index`, exactly inverting the [`extend`] that
/// introduced it. The recomputed weights are per subset size, so they stay
/// at their positions; only the identity fields shift down.
fn unwind(path: &mut Vec<PathElement>, index: usize) {
    let d = path.len() - 1;
    let one_fraction = path[index].one_fraction;
    let zero_fraction = path[index].zero_fraction;
    let mut next = path[d].pweight;
    for i in (0..d).rev() {
        if one_fraction != 0.0 {
            let tmp = path[i].pweight;
            path[i].pweight = next * (d + 1) as f64 / ((i + 1) as f64 * one_fraction);
            next = tmp - path[i].pweight * zero_fraction * (d - i) as f64 / (d + 1) as f64;
        } else {
            path[i].pweight = path[i].pweight * (d + 1) as f64 / (zero_fraction * (d - i) as f64);
        }
    }
    for i in index..d {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
    path.truncate(d);
}

/// Total permutation weight of the path with element `index` removed.
fn unwound_sum(path: &[PathElement], index: usize) -> f64 {
    let mut copy = path.to_vec();
    unwind(&mut copy, index);
    copy.iter().map(|e| e.pweight).sum()
}

fn shap_recurse(
    node: &TreeNode,
    row: &[f64],
    phi: &mut [f64],
    mut path: Vec<PathElement>,
    parent_zero: f64,
    parent_one: f64,
    parent_feature: usize,
) {
    extend(&mut path, parent_zero, parent_one, parent_feature);
    match node {
        TreeNode::Leaf { output, .. } => {
            // Skip index 0, the root sentinel.
            for i in 1..path.len() {
                let w = unwound_sum(&path, i);
                phi[path[i].feature] +=
                    w * (path[i].one_fraction - path[i].zero_fraction) * output;
            }
        }
        TreeNode::Split { feature, threshold, cover, left, right } => {
            let (hot, cold) =
                if row[*feature] < *threshold { (left, right) } else { (right, left) };
            let hot_fraction = hot.cover() / cover;
            let cold_fraction = cold.cover() / cover;
            // A feature met twice on one path must be collapsed: undo its
            // earlier extension and fold its fractions into this one.
            let mut incoming_zero = 1.0;
            let mut incoming_one = 1.0;
            if let Some(k) = path.iter().position(|e| e.feature == *feature) {
                incoming_zero = path[k].zero_fraction;
                incoming_one = path[k].one_fraction;
                unwind(&mut path, k);
            }
            shap_recurse(
                hot,
                row,
                phi,
                path.clone(),
                hot_fraction * incoming_zero,
                incoming_one,
                *feature,
            );
            shap_recurse(cold, row, phi, path, cold_fraction * incoming_zero, 0.0, *feature);
        }
    }
}

fn check_covers(node: &TreeNode) -> Result<(), ExplainError> {
    if !(node.cover() > 0.0) {
        return Err(ExplainError::NonPositiveCover);
    }
    if let TreeNode::Split { left, right, .. } = node {
        check_covers(left)?;
        check_covers(right)?;
    }
    Ok(())
}

fn check_schema(model: &GbtModel, rows: &DataTable) -> Result<(), ExplainError> {
    if model.feature_names != rows.schema().names() {
        return Err(ExplainError::SchemaMismatch {
            expected: model.feature_names.clone(),
            got: rows.schema().names().to_vec(),
        });
    }
    Ok(())
}

/// Exact Shapley values of the cover-weighted conditional expectation for
/// every row, by the polynomial-time path recursion. Per-tree values are
/// scaled by the learning rate and summed.
pub fn tree_shap(model: &GbtModel, rows: &DataTable) -> Result<ShapMatrix, ExplainError> {
    check_schema(model, rows)?;
    for tree in &model.trees {
        check_covers(tree)?;
    }
    let m = model.feature_names.len();
    let lr = model.params.learning_rate;
    let expected_value = model.base_margin
        + lr * model.trees.iter().map(TreeNode::expected_output).sum::<f64>();

    let mut values = Vec::with_capacity(rows.n_rows());
    let mut scratch = vec![0.0; m];
    for r in 0..rows.n_rows() {
        let row = rows.row(r);
        let mut phi = vec![0.0; m];
        for tree in &model.trees {
            scratch.fill(0.0);
            shap_recurse(tree, row, &mut scratch, Vec::new(), 1.0, 1.0, usize::MAX);
            for (total, part) in phi.iter_mut().zip(&scratch) {
                *total += lr * part;
            }
        }
        values.push(phi);
    }
    Ok(ShapMatrix { values, expected_value })
}

/// Cover-weighted conditional expectation of one tree given the feature
/// subset in `mask` (bit `f` set ⇒ feature `f` is conditioned on).
fn cond_exp(node: &TreeNode, row: &[f64], mask: u32) -> f64 {
    match node {
        TreeNode::Leaf { output, .. } => *output,
        TreeNode::Split { feature, threshold, cover, left, right } => {
            if mask & (1 << feature) != 0 {
                if row[*feature] < *threshold {
                    cond_exp(left, row, mask)
                } else {
                    cond_exp(right, row, mask)
                }
            } else {
                (left.cover() * cond_exp(left, row, mask)
                    + right.cover() * cond_exp(right, row, mask))
                    / cover
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut out: u64 = 1;
    for i in 0..k {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out
}

/// Shapley values for one row by direct enumeration of all `2^M` feature
/// subsets: φᵢ = Σ_S |S|!·(M−|S|−1)!/M! · (f(S ∪ {i}) − f(S)), with `f` the
/// same cover-weighted expectation the path recursion uses. Exponential —
/// an oracle for testing, not a production path.
pub fn brute_force_shap(model: &GbtModel, row: &[f64]) -> Result<Vec<f64>, ExplainError> {
    let m = model.feature_names.len();
    if m > BRUTE_FORCE_MAX_FEATURES {
        return Err(ExplainError::TooManyFeatures { m, max: BRUTE_FORCE_MAX_FEATURES });
    }
    for tree in &model.trees {
        check_covers(tree)?;
    }
    let lr = model.params.learning_rate;
    // One conditional-expectation evaluation per subset, shared by all
    // features' marginal differences.
    let f: Vec<f64> = (0..1u32 << m)
        .map(|mask| {
            model.base_margin
                + lr * model.trees.iter().map(|t| cond_exp(t, row, mask)).sum::<f64>()
        })
        .collect();
    // weight(s) = s!(M−1−s)!/M! = 1 / (M · C(M−1, s)), exact in u64.
    let weight: Vec<f64> =
        (0..m).map(|s| 1.0 / (m as f64 * binomial(m - 1, s) as f64)).collect();

    let mut phi = vec![0.0; m];
    for i in 0..m {
        let bit = 1u32 << i;
        for mask in 0..1u32 << m {
            if mask & bit == 0 {
                let s = mask.count_ones() as usize;
                phi[i] += weight[s] * (f[(mask | bit) as usize] - f[mask as usize]);
            }
        }
    }
    Ok(phi)
}

/// One feature's aggregate importance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub feature: String,
    /// Column index in the explained table's schema.
    pub feature_index: usize,
    pub mean_abs_shap: f64,
}

/// Features sorted by decreasing mean |φ|; ties keep declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub entries: Vec<ImportanceEntry>,
}

/// Rank features by the mean absolute Shapley value over all explained
/// rows. `names` must parallel the matrix columns; the matrix must be
/// nonempty.
pub fn rank_features(shap: &ShapMatrix, names: &[String]) -> FeatureImportance {
    assert!(shap.n_rows() > 0, "cannot rank features of an empty explanation");
    assert_eq!(names.len(), shap.n_features(), "names must match the matrix columns");
    let n = shap.n_rows() as f64;
    let mut entries: Vec<ImportanceEntry> = names
        .iter()
        .enumerate()
        .map(|(j, name)| ImportanceEntry {
            feature: name.clone(),
            feature_index: j,
            mean_abs_shap: shap.values.iter().map(|row| row[j].abs()).sum::<f64>() / n,
        })
        .collect();
    // Stable sort: ties keep ascending feature_index (declaration order).
    entries.sort_by(|a, b| b.mean_abs_shap.total_cmp(&a.mean_abs_shap));
    FeatureImportance { entries }
}

/// One dot of a beeswarm-style summary plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryPoint {
    /// Importance rank of the feature, 0 = most important.
    pub rank: usize,
    pub feature: String,
    pub row: usize,
    pub shap: f64,
    /// The raw feature value min-max normalized into [0, 1] over the
    /// explained rows; constant columns map to 0.5.
    pub normalized_value: f64,
}

/// Flatten a Shapley matrix into plot points, ordered by feature rank and
/// then row index.
pub fn summary_points(shap: &ShapMatrix, rows: &DataTable) -> Vec<SummaryPoint> {
    assert_eq!(shap.n_rows(), rows.n_rows(), "matrix and table row counts must agree");
    let importance = rank_features(shap, rows.schema().names());
    let mut points = Vec::with_capacity(shap.n_rows() * shap.n_features());
    for (rank, entry) in importance.entries.iter().enumerate() {
        let j = entry.feature_index;
        let column = rows.column(j);
        let min = column.iter().copied().fold(f64::INFINITY, f64::min);
        let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (r, &value) in column.iter().enumerate() {
            let normalized_value =
                if max > min { (value - min) / (max - min) } else { 0.5 };
            points.push(SummaryPoint {
                rank,
                feature: entry.feature.clone(),
                row: r,
                shap: shap.values[r][j],
                normalized_value,
            });
        }
    }
    points
}

/// Which features to keep and which to drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub drop_count: usize,
    /// The dropped features, least important last.
    pub dropped: Vec<String>,
    /// The surviving features in schema declaration order.
    pub retained: Vec<String>,
}

/// Drop the `drop_count` lowest-ranked features.
pub fn select_features(
    importance: &FeatureImportance,
    drop_count: usize,
) -> Result<ReductionPlan, ExplainError> {
    let m = importance.entries.len();
    if drop_count >= m {
        return Err(ExplainError::DropCountOutOfRange { drop_count, m });
    }
    let keep = m - drop_count;
    let dropped: Vec<String> =
        importance.entries[keep..].iter().map(|e| e.feature.clone()).collect();
    let mut retained_entries: Vec<&ImportanceEntry> = importance.entries[..keep].iter().collect();
    retained_entries.sort_by_key(|e| e.feature_index);
    let retained = retained_entries.into_iter().map(|e| e.feature.clone()).collect();
    Ok(ReductionPlan { drop_count, dropped, retained })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureKind, FeatureSchema};
    use crate::gbt::GbtParams;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table(names: &[&str], rows: Vec<Vec<f64>>, labels: Vec<u8>) -> DataTable {
        let schema = FeatureSchema::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![FeatureKind::Continuous; names.len()],
            "y",
        )
        .unwrap();
        DataTable::new(schema, rows, labels).unwrap()
    }

    fn leaf(output: f64, cover: f64) -> TreeNode {
        TreeNode::Leaf { output, cover }
    }

    fn split(feature: usize, threshold: f64, left: TreeNode, right: TreeNode) -> TreeNode {
        TreeNode::Split {
            feature,
            threshold,
            cover: left.cover() + right.cover(),
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    fn model_of(trees: Vec<TreeNode>, names: &[&str], lr: f64, base: f64) -> GbtModel {
        GbtModel {
            params: GbtParams { learning_rate: lr, ..GbtParams::default() },
            base_margin: base,
            feature_names: names.iter().map(|s| s.to_string()).collect(),
            trees,
        }
    }

    #[test]
    fn a_constant_tree_attributes_nothing() {
        let model = model_of(vec![leaf(2.0, 5.0)], &["a", "b"], 0.3, 0.25);
        let rows = table(&["a", "b"], vec![vec![1.0, -1.0]], vec![1]);
        let shap = tree_shap(&model, &rows).unwrap();
        assert_eq!(shap.values, vec![vec![0.0, 0.0]]);
        assert!((shap.expected_value - (0.25 + 0.3 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn depth_one_split_gives_half_the_leaf_gap() {
        let (a, b) = (1.4, -0.6);
        let model =
            model_of(vec![split(0, 0.5, leaf(a, 3.0), leaf(b, 3.0))], &["a", "b"], 0.7, 0.0);
        let rows = table(&["a", "b"], vec![vec![0.0, 9.0]], vec![1]); // routed left
        let shap = tree_shap(&model, &rows).unwrap();
        assert!((shap.values[0][0] - 0.7 * (a - b) / 2.0).abs() < 1e-12);
        assert_eq!(shap.values[0][1], 0.0);
        // Local accuracy: expected + φ = margin = lr·a.
        let margin = shap.expected_value + shap.values[0].iter().sum::<f64>();
        assert!((margin - 0.7 * a).abs() < 1e-12);
    }

    #[test]
    fn unequal_covers_shift_the_expected_value() {
        // Leaf covers 1 and 3: expectation (1·a + 3·b)/4.
        let (a, b) = (2.0, -1.0);
        let model = model_of(vec![split(0, 0.0, leaf(a, 1.0), leaf(b, 3.0))], &["x"], 1.0, 0.0);
        let rows = table(&["x"], vec![vec![-1.0], vec![1.0]], vec![0, 1]);
        let shap = tree_shap(&model, &rows).unwrap();
        let expected = (a + 3.0 * b) / 4.0;
        assert!((shap.expected_value - expected).abs() < 1e-12);
        assert!((shap.values[0][0] - (a - expected)).abs() < 1e-12);
        assert!((shap.values[1][0] - (b - expected)).abs() < 1e-12);
    }

    #[test]
    fn dummy_features_get_zero_phi() {
        // Feature 1 never splits anywhere.
        let tree = split(0, 0.0, split(2, 1.0, leaf(1.0, 1.0), leaf(2.0, 1.0)), leaf(-1.0, 2.0));
        let model = model_of(vec![tree], &["a", "b", "c"], 0.5, 0.1);
        let rows = table(
            &["a", "b", "c"],
            vec![vec![-1.0, 5.0, 0.0], vec![1.0, -5.0, 2.0], vec![0.5, 0.0, 0.5]],
            vec![0, 1, 1],
        );
        let shap = tree_shap(&model, &rows).unwrap();
        for row in &shap.values {
            assert_eq!(row[1], 0.0, "untouched feature must have zero attribution");
        }
    }

    #[test]
    fn shap_adds_across_trees() {
        let t1 = split(0, 0.5, leaf(1.0, 2.0), leaf(-1.0, 2.0));
        let t2 = split(1, -0.5, split(0, 1.5, leaf(0.3, 1.0), leaf(-0.2, 2.0)), leaf(0.9, 1.0));
        let names = &["a", "b"];
        let rows = table(names, vec![vec![0.2, -0.7], vec![1.8, 0.1]], vec![1, 0]);
        let both = tree_shap(&model_of(vec![t1.clone(), t2.clone()], names, 0.4, 0.0), &rows)
            .unwrap();
        let first = tree_shap(&model_of(vec![t1], names, 0.4, 0.0), &rows).unwrap();
        let second = tree_shap(&model_of(vec![t2], names, 0.4, 0.0), &rows).unwrap();
        for r in 0..rows.n_rows() {
            for j in 0..2 {
                let sum = first.values[r][j] + second.values[r][j];
                assert!((both.values[r][j] - sum).abs() < 1e-12);
            }
        }
        let ev = first.expected_value + second.expected_value;
        assert!((both.expected_value - ev).abs() < 1e-12);
    }

    #[test]
    fn repeated_feature_on_one_path_is_collapsed_correctly() {
        // Same feature splits twice along the left spine.
        let tree = split(
            0,
            0.0,
            split(0, -1.0, leaf(3.0, 1.0), leaf(1.0, 1.0)),
            leaf(-2.0, 2.0),
        );
        let model = model_of(vec![tree], &["x", "pad"], 1.0, 0.0);
        let rows =
            table(&["x", "pad"], vec![vec![-2.0, 0.0], vec![-0.5, 0.0], vec![2.0, 0.0]], vec![1, 1, 0]);
        let shap = tree_shap(&model, &rows).unwrap();
        for (r, row) in shap.values.iter().enumerate() {
            let brute = brute_force_shap(&model, rows.row(r)).unwrap();
            for j in 0..2 {
                assert!(
                    (row[j] - brute[j]).abs() < 1e-12,
                    "row {r} feature {j}: path {} vs brute {}",
                    row[j],
                    brute[j]
                );
            }
        }
    }

    #[test]
    fn brute_force_single_feature_is_the_two_term_formula() {
        let model = model_of(vec![split(0, 0.0, leaf(1.0, 1.0), leaf(5.0, 3.0))], &["x"], 0.5, 0.2);
        let row = [1.0];
        let phi = brute_force_shap(&model, &row).unwrap();
        // f({0}) − f(∅): conditioned margin minus cover-weighted mean.
        let f_full = 0.2 + 0.5 * 5.0;
        let f_empty = 0.2 + 0.5 * (1.0 + 15.0) / 4.0;
        assert!((phi[0] - (f_full - f_empty)).abs() < 1e-12);
    }

    #[test]
    fn symmetric_duplicate_features_share_credit() {
        // Two mirrored trees, one per feature; a row with equal values make
        // the features exchangeable, so their φ must match.
        let t0 = split(0, 0.0, leaf(-1.0, 2.0), leaf(1.0, 2.0));
        let t1 = split(1, 0.0, leaf(-1.0, 2.0), leaf(1.0, 2.0));
        let model = model_of(vec![t0, t1], &["u", "v"], 1.0, 0.0);
        let phi = brute_force_shap(&model, &[0.7, 0.7]).unwrap();
        assert!((phi[0] - phi[1]).abs() < 1e-12);
        let rows = table(&["u", "v"], vec![vec![0.7, 0.7]], vec![1]);
        let path = tree_shap(&model, &rows).unwrap();
        assert!((path.values[0][0] - path.values[0][1]).abs() < 1e-12);
    }

    fn random_node(rng: &mut ChaCha8Rng, m: usize, depth: usize) -> TreeNode {
        if depth == 0 || rng.random::<f64>() < 0.3 {
            leaf(rng.random::<f64>() * 4.0 - 2.0, 0.5 + 2.5 * rng.random::<f64>())
        } else {
            let left = random_node(rng, m, depth - 1);
            let right = random_node(rng, m, depth - 1);
            split(rng.random_range(0..m), rng.random::<f64>() * 2.0 - 1.0, left, right)
        }
    }

    fn random_model(rng: &mut ChaCha8Rng, m: usize) -> GbtModel {
        let n_trees = rng.random_range(1..=8);
        let trees = (0..n_trees)
            .map(|_| {
                let depth = rng.random_range(1..=4);
                random_node(rng, m, depth)
            })
            .collect();
        let names: Vec<&str> = ["a", "b", "c", "d", "e", "f", "g", "h"][..m].to_vec();
        let mut model = model_of(trees, &names, 0.05 + rng.random::<f64>(), 0.0);
        model.base_margin = rng.random::<f64>() - 0.5;
        model
    }

    /// The independent subset-enumeration oracle agrees with the path
    /// recursion on random ensembles, and both satisfy local accuracy.
    #[test]
    fn path_recursion_matches_brute_force_on_random_ensembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for trial in 0..40 {
            let m = rng.random_range(1..=6);
            let model = random_model(&mut rng, m);
            let names = model.feature_names.clone();
            let rows: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..m).map(|_| rng.random::<f64>() * 2.4 - 1.2).collect())
                .collect();
            let labels = vec![0; rows.len()];
            let schema = FeatureSchema::new(
                names.clone(),
                vec![FeatureKind::Continuous; m],
                "y",
            )
            .unwrap();
            let data = DataTable::new(schema, rows, labels).unwrap();
            let shap = tree_shap(&model, &data).unwrap();
            let margins = model.predict_margin(&data).unwrap();
            for r in 0..data.n_rows() {
                let brute = brute_force_shap(&model, data.row(r)).unwrap();
                for j in 0..m {
                    assert!(
                        (shap.values[r][j] - brute[j]).abs() < 1e-9,
                        "trial {trial} row {r} feature {j}: {} vs {}",
                        shap.values[r][j],
                        brute[j]
                    );
                }
                let reconstructed = shap.expected_value + shap.values[r].iter().sum::<f64>();
                assert!(
                    (reconstructed - margins[r]).abs() < 1e-9,
                    "trial {trial} local accuracy: {reconstructed} vs {}",
                    margins[r]
                );
            }
        }
    }

    #[test]
    fn brute_force_satisfies_efficiency_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let m = rng.random_range(1..=5);
            let model = random_model(&mut rng, m);
            let row: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let phi = brute_force_shap(&model, &row).unwrap();
            let lr = model.params.learning_rate;
            let full = model.base_margin
                + lr * model
                    .trees
                    .iter()
                    .map(|t| cond_exp(t, &row, u32::MAX))
                    .sum::<f64>();
            let empty = model.base_margin
                + lr * model.trees.iter().map(TreeNode::expected_output).sum::<f64>();
            let total: f64 = phi.iter().sum();
            assert!(
                (total - (full - empty)).abs() < 1e-12,
                "Σφ {total} vs f(N)−f(∅) {}",
                full - empty
            );
        }
    }

    #[test]
    fn guards_reject_bad_inputs() {
        let model = model_of(vec![leaf(1.0, 0.0)], &["x"], 0.1, 0.0);
        let rows = table(&["x"], vec![vec![0.0]], vec![0]);
        assert!(matches!(
            tree_shap(&model, &rows).unwrap_err(),
            ExplainError::NonPositiveCover
        ));
        let ok = model_of(vec![leaf(1.0, 1.0)], &["x"], 0.1, 0.0);
        let wrong = table(&["z"], vec![vec![0.0]], vec![0]);
        assert!(matches!(
            tree_shap(&ok, &wrong).unwrap_err(),
            ExplainError::SchemaMismatch { .. }
        ));
        let wide = GbtModel {
            params: GbtParams::default(),
            base_margin: 0.0,
            feature_names: (0..21).map(|i| format!("f{i}")).collect(),
            trees: vec![leaf(1.0, 1.0)],
        };
        assert!(matches!(
            brute_force_shap(&wide, &vec![0.0; 21]).unwrap_err(),
            ExplainError::TooManyFeatures { m: 21, .. }
        ));
    }

    fn importance_fixture() -> FeatureImportance {
        let shap = ShapMatrix {
            values: vec![vec![0.1, -0.9, 0.0, 0.4], vec![-0.3, 0.7, 0.0, -0.4]],
            expected_value: 0.0,
        };
        let names: Vec<String> =
            ["p", "q", "r", "s"].iter().map(|s| s.to_string()).collect();
        rank_features(&shap, &names)
    }

    #[test]
    fn ranking_orders_by_mean_abs_value() {
        let importance = importance_fixture();
        let order: Vec<&str> =
            importance.entries.iter().map(|e| e.feature.as_str()).collect();
        // mean |φ|: p 0.2, q 0.8, r 0.0, s 0.4.
        assert_eq!(order, vec!["q", "s", "p", "r"]);
        assert!((importance.entries[0].mean_abs_shap - 0.8).abs() < 1e-15);
        assert_eq!(importance.entries[3].mean_abs_shap, 0.0, "zero column ranks last");
    }

    #[test]
    fn ranking_breaks_ties_by_declaration_order() {
        let shap = ShapMatrix {
            values: vec![vec![0.5, 0.5, 0.5]],
            expected_value: 0.0,
        };
        let names: Vec<String> = ["c3", "a1", "b2"].iter().map(|s| s.to_string()).collect();
        let importance = rank_features(&shap, &names);
        let order: Vec<usize> = importance.entries.iter().map(|e| e.feature_index).collect();
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn single_feature_ranks_first() {
        let shap = ShapMatrix { values: vec![vec![-0.2]], expected_value: 0.0 };
        let importance = rank_features(&shap, &["only".to_string()]);
        assert_eq!(importance.entries.len(), 1);
        assert_eq!(importance.entries[0].feature, "only");
    }

    #[test]
    fn summary_points_cover_every_cell() {
        let model =
            model_of(vec![split(0, 0.5, leaf(1.0, 1.0), leaf(-1.0, 1.0))], &["a", "b"], 0.3, 0.0);
        let rows = table(
            &["a", "b"],
            vec![vec![0.0, 7.0], vec![1.0, 7.0], vec![0.25, 7.0]],
            vec![1, 0, 1],
        );
        let shap = tree_shap(&model, &rows).unwrap();
        let points = summary_points(&shap, &rows);
        assert_eq!(points.len(), 6);
        // Feature b is constant: normalized value pegged to 0.5.
        for p in points.iter().filter(|p| p.feature == "b") {
            assert_eq!(p.normalized_value, 0.5);
        }
        // Feature a spans [0, 1]: row 0 normalizes to 0, row 1 to 1.
        let a_points: Vec<&SummaryPoint> = points.iter().filter(|p| p.feature == "a").collect();
        assert_eq!(a_points[0].normalized_value, 0.0);
        assert_eq!(a_points[1].normalized_value, 1.0);
        assert!((a_points[2].normalized_value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn selection_drops_the_bottom_of_the_ranking() {
        let importance = importance_fixture(); // order q, s, p, r
        let plan = select_features(&importance, 2).unwrap();
        assert_eq!(plan.dropped, vec!["p".to_string(), "r".to_string()]);
        // Retained features come back in schema order: q is index 1, s is 3.
        assert_eq!(plan.retained, vec!["q".to_string(), "s".to_string()]);

        let keep_all = select_features(&importance, 0).unwrap();
        assert!(keep_all.dropped.is_empty());
        assert_eq!(keep_all.retained, vec!["p", "q", "r", "s"]);

        let top_only = select_features(&importance, 3).unwrap();
        assert_eq!(top_only.retained, vec!["q".to_string()]);

        assert!(matches!(
            select_features(&importance, 4).unwrap_err(),
            ExplainError::DropCountOutOfRange { drop_count: 4, m: 4 }
        ));
    }
}
