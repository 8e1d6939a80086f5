use landslide_core::baselines::BaselineError;
use landslide_core::dataset::DatasetError;
use landslide_core::explain::ExplainError;
use landslide_core::gbt::GbtError;
use landslide_core::metrics::MetricsError;
use landslide_core::model::ModelError;
use landslide_core::modelsel::ModelSelError;
use landslide_core::stats::StatsError;
use thiserror::Error;

/// Anything a stage can fail with. `kind()` gives the stable identifier
/// used in the error JSON printed on stderr.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    TomlParse {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("failed to parse {path}: {source}")]
    JsonParse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("model at {path} is a {got} model; this stage needs a gradient-boosted tree model")]
    WrongModelKind { path: String, got: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    ModelSel(#[from] ModelSelError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::TomlParse { .. } => "toml_parse",
            CliError::JsonParse { .. } => "json_parse",
            CliError::WrongModelKind { .. } => "wrong_model_kind",
            CliError::Dataset(_) => "dataset",
            CliError::Stats(_) => "stats",
            CliError::Model(_) => "model",
            CliError::ModelSel(_) => "model_selection",
            CliError::Explain(_) => "explain",
            CliError::Metrics(_) => "metrics",
        }
    }
}

impl From<GbtError> for CliError {
    fn from(e: GbtError) -> Self {
        CliError::Model(ModelError::from(e))
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        CliError::Model(ModelError::from(e))
    }
}
