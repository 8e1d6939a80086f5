//! k-nearest-neighbour classification under Minkowski distance.

use serde::{Deserialize, Serialize};

use super::{check_schema, minkowski_distance, BaselineError};
use crate::dataset::DataTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    /// Number of neighbours; must be odd so votes cannot tie.
    pub n_neighbors: usize,
    /// Minkowski order (1 = Manhattan, 2 = Euclidean).
    pub p: u32,
}

impl Default for KnnParams {
    fn default() -> Self {
        // The benchmark's tuned configuration.
        Self { n_neighbors: 7, p: 1 }
    }
}

impl KnnParams {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.n_neighbors == 0 || self.n_neighbors % 2 == 0 {
            return Err(BaselineError::BadParams(format!(
                "n_neighbors must be odd and positive, got {}",
                self.n_neighbors
            )));
        }
        if !(1..=2).contains(&self.p) {
            return Err(BaselineError::BadParams(format!(
                "minkowski order must be 1 or 2, got {}",
                self.p
            )));
        }
        Ok(())
    }
}

/// A fitted nearest-neighbour model; stores the training table verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub params: KnnParams,
    pub train: DataTable,
}

impl KnnModel {
    pub fn fit(train: &DataTable, params: &KnnParams) -> Result<Self, BaselineError> {
        params.validate()?;
        if train.n_rows() == 0 {
            return Err(BaselineError::EmptyTrain);
        }
        if params.n_neighbors > train.n_rows() {
            return Err(BaselineError::KTooLarge { k: params.n_neighbors, n: train.n_rows() });
        }
        Ok(Self { params: *params, train: train.clone() })
    }

    /// Positive votes among the k nearest training rows. Distance ties are
    /// broken by the lower training-row index, deterministically.
    fn positive_votes(&self, row: &[f64]) -> Result<usize, BaselineError> {
        let mut distances: Vec<(f64, usize)> = (0..self.train.n_rows())
            .map(|i| {
                minkowski_distance(self.train.row(i), row, self.params.p).map(|d| (d, i))
            })
            .collect::<Result<_, _>>()?;
        distances.sort_by(|a, b| {
            a.0.partial_cmp(&b.0).expect("finite distances").then(a.1.cmp(&b.1))
        });
        Ok(distances[..self.params.n_neighbors]
            .iter()
            .filter(|&&(_, i)| self.train.label(i) == 1)
            .count())
    }

    /// Fraction of the k nearest neighbours that are positive.
    pub fn predict_scores(&self, rows: &DataTable) -> Result<Vec<f64>, BaselineError> {
        check_schema(self.train.schema().names(), rows)?;
        (0..rows.n_rows())
            .map(|i| {
                self.positive_votes(rows.row(i))
                    .map(|v| v as f64 / self.params.n_neighbors as f64)
            })
            .collect()
    }

    /// Majority vote; with odd k a tie is impossible, and any residual tie
    /// resolves toward class 0.
    pub fn predict_labels(&self, rows: &DataTable) -> Result<Vec<u8>, BaselineError> {
        check_schema(self.train.schema().names(), rows)?;
        (0..rows.n_rows())
            .map(|i| {
                self.positive_votes(rows.row(i))
                    .map(|v| (2 * v > self.params.n_neighbors) as u8)
            })
            .collect()
    }
}
