//! Tabular dataset handling: schema definition, CSV ingestion with strict
//! validation, stratified train/test splitting, and quantile discretization.

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

/// The conditioning factors of the landslide benchmark, in report order.
pub const DEFAULT_FACTORS: [&str; 15] = [
    "PROFILE",
    "PLAN",
    "CHANGE",
    "LANDUSE",
    "ELEVATION",
    "SLOPE",
    "ASPECT",
    "TWI",
    "SPI",
    "DRAINAGE",
    "NDVI",
    "RAINFALL",
    "FAULTLINES",
    "ROAD",
    "GEOLOGY",
];

/// Factors that hold category codes rather than measurements.
pub const DEFAULT_CATEGORICAL: [&str; 3] = ["CHANGE", "LANDUSE", "GEOLOGY"];

/// Default label column name.
pub const DEFAULT_LABEL: &str = "Target";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("no data rows in {path}")]
    EmptyFile { path: String },
    #[error("missing column '{name}' in header")]
    MissingColumn { name: String },
    #[error("row {row}, column '{column}': missing value")]
    MissingValue { row: usize, column: String },
    #[error("row {row}, column '{column}': non-numeric cell '{value}'")]
    NonNumericCell { row: usize, column: String, value: String },
    #[error("row {row}: label must be 0 or 1, got '{value}'")]
    InvalidLabel { row: usize, value: String },
    #[error("class {class} would receive no test rows; enlarge the test fraction or the dataset")]
    DegenerateClass { class: u8 },
    #[error("split fraction must lie in (0, 1), got {fraction}")]
    BadFraction { fraction: f64 },
    #[error("column has fewer than 2 distinct values")]
    TooFewDistinctValues,
    #[error("quantile binning into {k} bins needs at least {k} rows, got {len}")]
    TooFewRows { len: usize, k: usize },
    #[error("bin count must be at least 2, got {k}")]
    BadBinCount { k: usize },
    #[error("bad schema: {0}")]
    BadSchema(String),
    #[error("row {row}: value for '{column}' is not finite")]
    NonFiniteValue { row: usize, column: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Whether a feature holds continuous measurements or discrete category
/// codes. Categorical features skip normality testing and are
/// cross-tabulated by distinct value rather than by quantile bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Continuous,
    Categorical,
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKind::Continuous => write!(f, "continuous"),
            FeatureKind::Categorical => write!(f, "categorical"),
        }
    }
}

/// Ordered feature declaration: names, kinds, and the label column name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    names: Vec<String>,
    kinds: Vec<FeatureKind>,
    label: String,
}

impl FeatureSchema {
    pub fn new(
        names: Vec<String>,
        kinds: Vec<FeatureKind>,
        label: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        let label = label.into();
        if names.is_empty() {
            return Err(DatasetError::BadSchema("no features declared".into()));
        }
        if names.len() != kinds.len() {
            return Err(DatasetError::BadSchema(format!(
                "{} names but {} kinds",
                names.len(),
                kinds.len()
            )));
        }
        let mut seen = names.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != names.len() {
            return Err(DatasetError::BadSchema("duplicate feature name".into()));
        }
        if names.iter().any(|n| *n == label) {
            return Err(DatasetError::BadSchema(format!(
                "label column '{label}' also declared as a feature"
            )));
        }
        Ok(Self { names, kinds, label })
    }

    /// The fifteen benchmark conditioning factors with their default kinds
    /// and the default label column.
    pub fn default_factors() -> Self {
        let names: Vec<String> = DEFAULT_FACTORS.iter().map(|s| s.to_string()).collect();
        let kinds = names
            .iter()
            .map(|n| {
                if DEFAULT_CATEGORICAL.contains(&n.as_str()) {
                    FeatureKind::Categorical
                } else {
                    FeatureKind::Continuous
                }
            })
            .collect();
        Self { names, kinds, label: DEFAULT_LABEL.to_string() }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn kind(&self, feature: usize) -> FeatureKind {
        self.kinds[feature]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Schema restricted to `keep` (indices into this schema), preserving
    /// declaration order.
    fn subset(&self, keep: &[usize]) -> Self {
        Self {
            names: keep.iter().map(|&j| self.names[j].clone()).collect(),
            kinds: keep.iter().map(|&j| self.kinds[j]).collect(),
            label: self.label.clone(),
        }
    }
}

/// An in-memory table of feature values plus binary labels. Row order is
/// the ingestion order and is preserved by every operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    schema: FeatureSchema,
    /// Row-major values, `n_rows * schema.len()` long.
    values: Vec<f64>,
    labels: Vec<u8>,
}

impl DataTable {
    pub fn new(
        schema: FeatureSchema,
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
    ) -> Result<Self, DatasetError> {
        if rows.len() != labels.len() {
            return Err(DatasetError::BadSchema(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let width = schema.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(DatasetError::BadSchema(format!(
                    "row {i} has {} values, schema has {width}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DatasetError::NonFiniteValue {
                        row: i + 1,
                        column: schema.names[j].clone(),
                    });
                }
                values.push(v);
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y > 1 {
                return Err(DatasetError::InvalidLabel { row: i + 1, value: y.to_string() });
            }
        }
        Ok(Self { schema, values, labels })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.values[row * self.schema.len() + feature]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let w = self.schema.len();
        &self.values[row * w..(row + 1) * w]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> u8 {
        self.labels[row]
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.value(i, feature)).collect()
    }

    /// `(negatives, positives)` — rows per class.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        (self.labels.len() - pos, pos)
    }

    /// New table holding the given rows (in the given order).
    pub fn subset_rows(&self, indices: &[usize]) -> Self {
        let w = self.schema.len();
        let mut values = Vec::with_capacity(indices.len() * w);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self { schema: self.schema.clone(), values, labels }
    }

    /// New table keeping only the named features, in this table's
    /// declaration order. Unknown names are an error.
    pub fn select_features(&self, keep: &[String]) -> Result<Self, DatasetError> {
        for name in keep {
            if self.schema.index_of(name).is_none() {
                return Err(DatasetError::MissingColumn { name: name.clone() });
            }
        }
        let keep_idx: Vec<usize> = (0..self.schema.len())
            .filter(|&j| keep.contains(&self.schema.names[j]))
            .collect();
        if keep_idx.is_empty() {
            return Err(DatasetError::BadSchema("no features retained".into()));
        }
        let schema = self.schema.subset(&keep_idx);
        let mut values = Vec::with_capacity(self.n_rows() * keep_idx.len());
        for i in 0..self.n_rows() {
            for &j in &keep_idx {
                values.push(self.value(i, j));
            }
        }
        Ok(Self { schema, values, labels: self.labels.clone() })
    }

    /// Write the table as CSV with a header row (features in schema order,
    /// label last).
    pub fn write_csv(&self, path: &Path) -> Result<(), DatasetError> {
        let mut wtr = csv::Writer::from_path(path)?;
        let mut header: Vec<&str> = self.schema.names.iter().map(|s| s.as_str()).collect();
        header.push(self.schema.label());
        wtr.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut record: Vec<String> = self.row(i).iter().map(|v| format_cell(*v)).collect();
            record.push(self.labels[i].to_string());
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Format a value so a write/load round trip is exact: integers print
/// without a fraction, everything else with full precision.
fn format_cell(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        // 17 significant digits round-trip any f64 exactly.
        format!("{v:.17e}")
    }
}

/// Load a CSV file against a schema. Header must contain every declared
/// feature and the label column (extra columns are ignored); cells must be
/// finite numbers and labels must be 0 or 1. Row order is preserved.
pub fn load_csv(path: &Path, schema: &FeatureSchema) -> Result<DataTable, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)?;

    let headers = match rdr.headers() {
        Ok(h) if !h.is_empty() => h.clone(),
        _ => return Err(DatasetError::EmptyFile { path: path.display().to_string() }),
    };
    let find = |name: &str| -> Result<usize, DatasetError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::MissingColumn { name: name.to_string() })
    };
    let feature_cols: Vec<usize> =
        schema.names().iter().map(|n| find(n)).collect::<Result<_, _>>()?;
    let label_col = find(schema.label())?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let row_no = idx + 1;
        let mut row = Vec::with_capacity(feature_cols.len());
        for (&col, name) in feature_cols.iter().zip(schema.names()) {
            let cell = record.get(col).unwrap_or("");
            row.push(parse_cell(cell, row_no, name)?);
        }
        let raw_label = record.get(label_col).unwrap_or("");
        labels.push(parse_label(raw_label, row_no)?);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DatasetError::EmptyFile { path: path.display().to_string() });
    }
    DataTable::new(schema.clone(), rows, labels)
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64, DatasetError> {
    if cell.is_empty() {
        return Err(DatasetError::MissingValue { row, column: column.to_string() });
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DatasetError::NonNumericCell {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

fn parse_label(cell: &str, row: usize) -> Result<u8, DatasetError> {
    if cell.is_empty() {
        return Err(DatasetError::InvalidLabel { row, value: cell.to_string() });
    }
    match cell.parse::<f64>() {
        Ok(v) if v == 0.0 => Ok(0),
        Ok(v) if v == 1.0 => Ok(1),
        _ => Err(DatasetError::InvalidLabel { row, value: cell.to_string() }),
    }
}

/// How to carve a table into train and test portions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Fraction of rows assigned to the test side, strictly inside (0, 1).
    pub test_fraction: f64,
    pub seed: u64,
    /// Preserve per-class proportions (the default). When false the split
    /// is a plain shuffled cut.
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { test_fraction: 0.33, seed: 15, stratified: true }
    }
}

/// Result of a train/test split. Index vectors refer to rows of the
/// original table and are sorted ascending.
#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub train: DataTable,
    pub test: DataTable,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Split a table into train/test portions.
///
/// Stratified mode shuffles each class independently with a seed-derived
/// substream and assigns `round(class_count * test_fraction)` rows of each
/// class to the test side, so class balance carries over to both portions.
pub fn train_test_split(
    table: &DataTable,
    spec: &SplitSpec,
) -> Result<TrainTestSplit, DatasetError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(DatasetError::BadFraction { fraction: spec.test_fraction });
    }
    let mut test_indices: Vec<usize> = Vec::new();
    if spec.stratified {
        for class in [0u8, 1u8] {
            let members: Vec<usize> = (0..table.n_rows())
                .filter(|&i| table.label(i) == class)
                .collect();
            let n_test = (members.len() as f64 * spec.test_fraction).round() as usize;
            if n_test == 0 || n_test >= members.len().max(1) {
                return Err(DatasetError::DegenerateClass { class });
            }
            let mut shuffled = members;
            let mut rng = seed::rng(spec.seed, &[seed::TAG_SPLIT, class as u64]);
            shuffled.shuffle(&mut rng);
            test_indices.extend_from_slice(&shuffled[..n_test]);
        }
    } else {
        let n = table.n_rows();
        let n_test = (n as f64 * spec.test_fraction).round() as usize;
        if n_test == 0 || n_test >= n.max(1) {
            return Err(DatasetError::BadFraction { fraction: spec.test_fraction });
        }
        let mut shuffled: Vec<usize> = (0..n).collect();
        let mut rng = seed::rng(spec.seed, &[seed::TAG_SPLIT]);
        shuffled.shuffle(&mut rng);
        test_indices.extend_from_slice(&shuffled[..n_test]);
    }
    test_indices.sort_unstable();
    let in_test: Vec<bool> = {
        let mut mask = vec![false; table.n_rows()];
        for &i in &test_indices {
            mask[i] = true;
        }
        mask
    };
    let train_indices: Vec<usize> = (0..table.n_rows()).filter(|&i| !in_test[i]).collect();
    Ok(TrainTestSplit {
        train: table.subset_rows(&train_indices),
        test: table.subset_rows(&test_indices),
        train_indices,
        test_indices,
    })
}

/// Draw a stratified subsample of about `fraction` of the rows (per class,
/// rounded), returning sorted row indices. `fraction = 1` returns every row.
pub fn stratified_sample_indices(
    table: &DataTable,
    fraction: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    assert!(fraction > 0.0 && fraction <= 1.0, "fraction must lie in (0, 1]");
    if fraction == 1.0 {
        return (0..table.n_rows()).collect();
    }
    let mut picked = Vec::new();
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> =
            (0..table.n_rows()).filter(|&i| table.label(i) == class).collect();
        let take = ((members.len() as f64 * fraction).round() as usize).max(1).min(members.len());
        members.shuffle(rng);
        picked.extend_from_slice(&members[..take]);
    }
    picked.sort_unstable();
    picked
}

/// Discretize a column into `k` quantile bins.
///
/// Bin edges are the empirical quantiles `sorted[ceil(len * j / k) - 1]`
/// for `j = 1..k`; a value's bin is the number of edges strictly below it.
/// Equal values always land in the same bin and the mapping is monotone.
pub fn quantile_bin(column: &[f64], k: usize) -> Result<Vec<usize>, DatasetError> {
    if k < 2 {
        return Err(DatasetError::BadBinCount { k });
    }
    if column.len() < k {
        return Err(DatasetError::TooFewRows { len: column.len(), k });
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    if sorted.first() == sorted.last() {
        return Err(DatasetError::TooFewDistinctValues);
    }
    let n = sorted.len();
    // Interior quantile edges; the last one (j = k) is the maximum and
    // never separates anything, so only j = 1..k-1... include j=k-1 edges.
    let edges: Vec<f64> = (1..k).map(|j| sorted[(n * j).div_ceil(k) - 1]).collect();
    Ok(column
        .iter()
        .map(|&x| edges.iter().take_while(|&&e| x > e).count())
        .collect())
}
