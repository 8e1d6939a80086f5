//! Uniform envelope over the five classifier families, so that model
//! selection, evaluation, and serialization can treat them
//! interchangeably.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{
    AdaBoostModel, AdaBoostParams, BaselineError, KnnModel, KnnParams, LogRegModel, LogRegParams,
    SvmModel, SvmParams,
};
use crate::dataset::DataTable;
use crate::gbt::{GbtError, GbtModel, GbtParams};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Gbt(#[from] GbtError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Gbt,
    Knn,
    LogReg,
    Svm,
    AdaBoost,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::Gbt,
        ClassifierKind::Knn,
        ClassifierKind::LogReg,
        ClassifierKind::Svm,
        ClassifierKind::AdaBoost,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::Gbt => "gbt",
            ClassifierKind::Knn => "knn",
            ClassifierKind::LogReg => "log_reg",
            ClassifierKind::Svm => "svm",
            ClassifierKind::AdaBoost => "ada_boost",
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
#[error("unknown classifier kind {0:?}; expected one of gbt, knn, log_reg, svm, ada_boost")]
pub struct UnknownKind(String);

impl FromStr for ClassifierKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // Accept a few informal spellings alongside the canonical names.
        match s.to_ascii_lowercase().as_str() {
            "gbt" | "xgboost" | "boost" => Ok(ClassifierKind::Gbt),
            "knn" => Ok(ClassifierKind::Knn),
            "log_reg" | "logreg" | "lr" => Ok(ClassifierKind::LogReg),
            "svm" => Ok(ClassifierKind::Svm),
            "ada_boost" | "adaboost" | "ada" => Ok(ClassifierKind::AdaBoost),
            _ => Err(UnknownKind(s.to_string())),
        }
    }
}

/// Untrained hyper-parameter set for any classifier family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Gbt(GbtParams),
    Knn(KnnParams),
    LogReg(LogRegParams),
    Svm(SvmParams),
    AdaBoost(AdaBoostParams),
}

impl ModelParams {
    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::Gbt => ModelParams::Gbt(GbtParams::default()),
            ClassifierKind::Knn => ModelParams::Knn(KnnParams::default()),
            ClassifierKind::LogReg => ModelParams::LogReg(LogRegParams::default()),
            ClassifierKind::Svm => ModelParams::Svm(SvmParams::default()),
            ClassifierKind::AdaBoost => ModelParams::AdaBoost(AdaBoostParams::default()),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            ModelParams::Gbt(_) => ClassifierKind::Gbt,
            ModelParams::Knn(_) => ClassifierKind::Knn,
            ModelParams::LogReg(_) => ClassifierKind::LogReg,
            ModelParams::Svm(_) => ClassifierKind::Svm,
            ModelParams::AdaBoost(_) => ClassifierKind::AdaBoost,
        }
    }

    /// Train on `train`. `seed` drives any stochastic part of the fit; the
    /// boosted trees take it as their subsampling seed, the deterministic
    /// families ignore it.
    pub fn fit(&self, train: &DataTable, seed: u64) -> Result<TrainedModel, ModelError> {
        Ok(match self {
            ModelParams::Gbt(p) => {
                let p = GbtParams { seed, ..p.clone() };
                TrainedModel::Gbt(GbtModel::fit(train, &p)?)
            }
            ModelParams::Knn(p) => TrainedModel::Knn(KnnModel::fit(train, p)?),
            ModelParams::LogReg(p) => TrainedModel::LogReg(LogRegModel::fit(train, p)?),
            ModelParams::Svm(p) => TrainedModel::Svm(SvmModel::fit(train, p)?),
            ModelParams::AdaBoost(p) => TrainedModel::AdaBoost(AdaBoostModel::fit(train, p)?),
        })
    }
}

/// Common prediction surface. Scores are family-specific but consistently
/// oriented: larger means more confidently positive.
pub trait Classifier {
    fn predict_labels(&self, rows: &DataTable) -> Result<Vec<u8>, ModelError>;
    fn predict_scores(&self, rows: &DataTable) -> Result<Vec<f64>, ModelError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    Gbt(GbtModel),
    Knn(KnnModel),
    LogReg(LogRegModel),
    Svm(SvmModel),
    AdaBoost(AdaBoostModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedModel::Gbt(_) => ClassifierKind::Gbt,
            TrainedModel::Knn(_) => ClassifierKind::Knn,
            TrainedModel::LogReg(_) => ClassifierKind::LogReg,
            TrainedModel::Svm(_) => ClassifierKind::Svm,
            TrainedModel::AdaBoost(_) => ClassifierKind::AdaBoost,
        }
    }

    pub fn as_gbt(&self) -> Option<&GbtModel> {
        match self {
            TrainedModel::Gbt(m) => Some(m),
            _ => None,
        }
    }
}

impl Classifier for TrainedModel {
    fn predict_labels(&self, rows: &DataTable) -> Result<Vec<u8>, ModelError> {
        Ok(match self {
            TrainedModel::Gbt(m) => m.predict_labels(rows)?,
            TrainedModel::Knn(m) => m.predict_labels(rows)?,
            TrainedModel::LogReg(m) => m.predict_labels(rows)?,
            TrainedModel::Svm(m) => m.predict_labels(rows)?,
            TrainedModel::AdaBoost(m) => m.predict_labels(rows)?,
        })
    }

    fn predict_scores(&self, rows: &DataTable) -> Result<Vec<f64>, ModelError> {
        Ok(match self {
            TrainedModel::Gbt(m) => m.predict_proba(rows)?,
            TrainedModel::Knn(m) => m.predict_scores(rows)?,
            TrainedModel::LogReg(m) => m.predict_scores(rows)?,
            TrainedModel::Svm(m) => m.predict_scores(rows)?,
            TrainedModel::AdaBoost(m) => m.predict_scores(rows)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureKind, FeatureSchema};

    fn blobs() -> DataTable {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let d = (i as f64) * 0.1;
            rows.push(vec![d, d + 0.2]);
            labels.push(0);
            rows.push(vec![d + 5.0, d + 5.2]);
            labels.push(1);
        }
        let schema = FeatureSchema::new(
            vec!["a".into(), "b".into()],
            vec![FeatureKind::Continuous; 2],
            "y",
        )
        .unwrap();
        DataTable::new(schema, rows, labels).unwrap()
    }

    #[test]
    fn kind_names_round_trip_through_from_str() {
        for kind in ClassifierKind::ALL {
            assert_eq!(kind.as_str().parse::<ClassifierKind>().unwrap(), kind);
        }
        assert!("mystery".parse::<ClassifierKind>().is_err());
        assert_eq!("XGBoost".parse::<ClassifierKind>().unwrap(), ClassifierKind::Gbt);
    }

    #[test]
    fn every_family_fits_and_separates_the_blobs() {
        let t = blobs();
        for kind in ClassifierKind::ALL {
            let params = ModelParams::default_for(kind);
            assert_eq!(params.kind(), kind);
            let model = params.fit(&t, 7).unwrap();
            assert_eq!(model.kind(), kind);
            assert_eq!(model.predict_labels(&t).unwrap(), t.labels(), "{kind} mislabeled");
            assert_eq!(model.predict_scores(&t).unwrap().len(), t.n_rows());
        }
    }

    #[test]
    fn params_envelope_serializes_with_a_kind_tag() {
        let params = ModelParams::Knn(KnnParams::default());
        let json = serde_json::to_value(&params).unwrap();
        assert_eq!(json["kind"], "knn");
        let back: ModelParams = serde_json::from_value(json).unwrap();
        assert_eq!(back, params);
    }

    #[test]
    fn trained_envelope_round_trips_as_json() {
        let t = blobs();
        for kind in ClassifierKind::ALL {
            let model = ModelParams::default_for(kind).fit(&t, 7).unwrap();
            let json = serde_json::to_string(&model).unwrap();
            let back: TrainedModel = serde_json::from_str(&json).unwrap();
            assert_eq!(back, model, "{kind} did not round-trip");
            assert_eq!(
                back.predict_labels(&t).unwrap(),
                model.predict_labels(&t).unwrap()
            );
        }
    }

    #[test]
    fn gbt_fit_threads_the_seed_through() {
        let t = blobs();
        let params = ModelParams::Gbt(GbtParams {
            n_estimators: 5,
            subsample: 0.8,
            ..GbtParams::default()
        });
        let TrainedModel::Gbt(m) = params.fit(&t, 99).unwrap() else { unreachable!() };
        assert_eq!(m.params.seed, 99);
    }
}
