//! Run configuration: the TOML file format, command-line overrides, and the
//! fully resolved settings that every stage report embeds so each artifact
//! records exactly what produced it.

use std::fs;
use std::path::{Path, PathBuf};

use landslide_core::baselines::Kernel;
use landslide_core::dataset::{FeatureKind, FeatureSchema, SplitSpec, DEFAULT_LABEL};
use landslide_core::model::ClassifierKind;
use landslide_core::modelsel::ParamGrid;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// The on-disk TOML configuration. Every field is optional; omitted values
/// fall back to the benchmark defaults so a config listing only `data` runs
/// the full study as published.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// CSV file with one column per feature plus the label column.
    pub data: Option<PathBuf>,
    /// Directory receiving all reports and models.
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Test share of the stratified train/test split.
    pub test_fraction: Option<f64>,
    /// Cross-validation fold count.
    pub folds: Option<usize>,
    /// How many of the lowest-ranked features the reduction stage drops.
    pub drop_count: Option<usize>,
    /// Quantile bins used when cross-tabulating a continuous feature.
    pub chi_square_bins: Option<usize>,
    /// Training-set fractions of the learning curve, increasing, in (0, 1].
    pub learning_curve_fractions: Option<Vec<f64>>,
    pub schema: Option<SchemaConfig>,
    pub grids: GridsConfig,
}

/// Column declaration override. Features not listed in `categorical` are
/// treated as continuous.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaConfig {
    pub names: Vec<String>,
    #[serde(default)]
    pub categorical: Vec<String>,
    #[serde(default = "default_label")]
    pub label: String,
}

fn default_label() -> String {
    DEFAULT_LABEL.to_string()
}

impl SchemaConfig {
    fn resolve(&self) -> Result<FeatureSchema, CliError> {
        for cat in &self.categorical {
            if !self.names.contains(cat) {
                return Err(CliError::Config(format!(
                    "schema.categorical lists {cat:?}, which is not in schema.names"
                )));
            }
        }
        let kinds = self
            .names
            .iter()
            .map(|n| {
                if self.categorical.contains(n) {
                    FeatureKind::Categorical
                } else {
                    FeatureKind::Continuous
                }
            })
            .collect();
        FeatureSchema::new(self.names.clone(), kinds, self.label.clone()).map_err(CliError::from)
    }
}

/// Per-family search-space overrides. Any list left out keeps the stock
/// search space for that family.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridsConfig {
    pub gbt: GbtGridConfig,
    pub knn: KnnGridConfig,
    pub log_reg: LogRegGridConfig,
    pub svm: SvmGridConfig,
    pub ada_boost: AdaBoostGridConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtGridConfig {
    pub max_depth: Option<Vec<usize>>,
    pub n_estimators: Option<Vec<usize>>,
    pub learning_rate: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub subsample: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnGridConfig {
    pub n_neighbors: Option<Vec<usize>>,
    pub p: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegGridConfig {
    pub c: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmGridConfig {
    pub c: Option<Vec<f64>>,
    pub kernel: Option<Vec<Kernel>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaBoostGridConfig {
    pub n_estimators: Option<Vec<usize>>,
    pub learning_rate: Option<Vec<f64>>,
}

fn override_list<T: Clone>(slot: &mut Vec<T>, value: &Option<Vec<T>>) {
    if let Some(v) = value {
        slot.clone_from(v);
    }
}

impl GridsConfig {
    fn resolve(&self) -> ResolvedGrids {
        let ParamGrid::Gbt {
            mut max_depth,
            mut n_estimators,
            mut learning_rate,
            mut gamma,
            mut subsample,
        } = ParamGrid::default_for(ClassifierKind::Gbt)
        else {
            unreachable!()
        };
        override_list(&mut max_depth, &self.gbt.max_depth);
        override_list(&mut n_estimators, &self.gbt.n_estimators);
        override_list(&mut learning_rate, &self.gbt.learning_rate);
        override_list(&mut gamma, &self.gbt.gamma);
        override_list(&mut subsample, &self.gbt.subsample);
        let gbt = ParamGrid::Gbt { max_depth, n_estimators, learning_rate, gamma, subsample };

        let ParamGrid::Knn { mut n_neighbors, mut p } =
            ParamGrid::default_for(ClassifierKind::Knn)
        else {
            unreachable!()
        };
        override_list(&mut n_neighbors, &self.knn.n_neighbors);
        override_list(&mut p, &self.knn.p);
        let knn = ParamGrid::Knn { n_neighbors, p };

        let ParamGrid::LogReg { mut c } = ParamGrid::default_for(ClassifierKind::LogReg) else {
            unreachable!()
        };
        override_list(&mut c, &self.log_reg.c);
        let log_reg = ParamGrid::LogReg { c };

        let ParamGrid::Svm { mut c, mut kernel } = ParamGrid::default_for(ClassifierKind::Svm)
        else {
            unreachable!()
        };
        override_list(&mut c, &self.svm.c);
        override_list(&mut kernel, &self.svm.kernel);
        let svm = ParamGrid::Svm { c, kernel };

        let ParamGrid::AdaBoost { mut n_estimators, mut learning_rate } =
            ParamGrid::default_for(ClassifierKind::AdaBoost)
        else {
            unreachable!()
        };
        override_list(&mut n_estimators, &self.ada_boost.n_estimators);
        override_list(&mut learning_rate, &self.ada_boost.learning_rate);
        let ada_boost = ParamGrid::AdaBoost { n_estimators, learning_rate };

        ResolvedGrids { gbt, knn, log_reg, svm, ada_boost }
    }
}

/// Fully materialized search spaces, one per classifier family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedGrids {
    pub gbt: ParamGrid,
    pub knn: ParamGrid,
    pub log_reg: ParamGrid,
    pub svm: ParamGrid,
    pub ada_boost: ParamGrid,
}

impl ResolvedGrids {
    pub fn for_kind(&self, kind: ClassifierKind) -> &ParamGrid {
        match kind {
            ClassifierKind::Gbt => &self.gbt,
            ClassifierKind::Knn => &self.knn,
            ClassifierKind::LogReg => &self.log_reg,
            ClassifierKind::Svm => &self.svm,
            ClassifierKind::AdaBoost => &self.ada_boost,
        }
    }
}

/// Command-line flags that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub folds: Option<usize>,
    pub drop: Option<usize>,
}

/// Settings every stage runs under, resolved from file defaults and flag
/// overrides and validated up front. Serialized verbatim into each report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub test_fraction: f64,
    pub folds: usize,
    pub drop_count: usize,
    pub chi_square_bins: usize,
    pub learning_curve_fractions: Vec<f64>,
    pub schema: FeatureSchema,
    pub grids: ResolvedGrids,
}

impl RunConfig {
    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec { test_fraction: self.test_fraction, seed: self.seed, stratified: true }
    }

    /// Path of an artifact inside the output directory.
    pub fn artifact(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

/// Read a TOML config file; `None` yields the all-defaults configuration.
pub fn load_config(path: Option<&Path>) -> Result<PipelineConfig, CliError> {
    let Some(path) = path else {
        return Ok(PipelineConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    toml::from_str(&text).map_err(|source| CliError::TomlParse {
        path: path.display().to_string(),
        source: Box::new(source),
    })
}

/// Merge file values and flag overrides into a validated [`RunConfig`].
pub fn resolve(file: PipelineConfig, flags: &FlagOverrides) -> Result<RunConfig, CliError> {
    let data = file
        .data
        .ok_or_else(|| CliError::Config("config must set `data`, the training CSV path".into()))?;
    let schema = match &file.schema {
        Some(s) => s.resolve()?,
        None => FeatureSchema::default_factors(),
    };
    let cfg = RunConfig {
        data,
        out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        seed: flags.seed.or(file.seed).unwrap_or(15),
        test_fraction: file.test_fraction.unwrap_or(0.33),
        folds: flags.folds.or(file.folds).unwrap_or(10),
        drop_count: flags.drop.or(file.drop_count).unwrap_or(6),
        chi_square_bins: file.chi_square_bins.unwrap_or(10),
        learning_curve_fractions: file
            .learning_curve_fractions
            .unwrap_or_else(|| vec![0.1, 0.325, 0.55, 0.775, 1.0]),
        schema,
        grids: file.grids.resolve(),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        return Err(CliError::Config(format!(
            "test_fraction must be inside (0, 1), got {}",
            cfg.test_fraction
        )));
    }
    if cfg.folds < 2 {
        return Err(CliError::Config(format!("folds must be at least 2, got {}", cfg.folds)));
    }
    if cfg.chi_square_bins < 2 {
        return Err(CliError::Config(format!(
            "chi_square_bins must be at least 2, got {}",
            cfg.chi_square_bins
        )));
    }
    if cfg.drop_count >= cfg.schema.len() {
        return Err(CliError::Config(format!(
            "drop_count {} would drop every one of the {} features",
            cfg.drop_count,
            cfg.schema.len()
        )));
    }
    let fr = &cfg.learning_curve_fractions;
    if fr.is_empty()
        || fr.windows(2).any(|w| w[0] >= w[1])
        || fr.iter().any(|&f| !(f > 0.0 && f <= 1.0))
    {
        return Err(CliError::Config(format!(
            "learning_curve_fractions must increase strictly within (0, 1], got {fr:?}"
        )));
    }
    for kind in ClassifierKind::ALL {
        if cfg.grids.for_kind(kind).is_empty() {
            return Err(CliError::Config(format!("the {kind} grid has an empty candidate list")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_data_config_uses_benchmark_defaults() {
        let file: PipelineConfig = toml::from_str(r#"data = "rows.csv""#).unwrap();
        let cfg = resolve(file, &FlagOverrides::default()).unwrap();
        assert_eq!(cfg.data, PathBuf::from("rows.csv"));
        assert_eq!(cfg.out, PathBuf::from("out"));
        assert_eq!(cfg.seed, 15);
        assert_eq!(cfg.test_fraction, 0.33);
        assert_eq!(cfg.folds, 10);
        assert_eq!(cfg.drop_count, 6);
        assert_eq!(cfg.chi_square_bins, 10);
        assert_eq!(cfg.schema, FeatureSchema::default_factors());
        assert_eq!(cfg.grids.gbt, ParamGrid::default_for(ClassifierKind::Gbt));
        assert_eq!(cfg.grids.svm, ParamGrid::default_for(ClassifierKind::Svm));
    }

    #[test]
    fn flags_override_file_values() {
        let file: PipelineConfig =
            toml::from_str("data = \"rows.csv\"\nseed = 7\nfolds = 5\n").unwrap();
        let flags = FlagOverrides {
            seed: Some(99),
            out: Some(PathBuf::from("elsewhere")),
            folds: None,
            drop: Some(2),
        };
        let cfg = resolve(file, &flags).unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.out, PathBuf::from("elsewhere"));
        assert_eq!(cfg.folds, 5);
        assert_eq!(cfg.drop_count, 2);
    }

    #[test]
    fn partial_grid_override_keeps_other_lists() {
        let file: PipelineConfig = toml::from_str(
            "data = \"rows.csv\"\n[grids.gbt]\nmax_depth = [3]\nn_estimators = [100]\n",
        )
        .unwrap();
        let cfg = resolve(file, &FlagOverrides::default()).unwrap();
        let ParamGrid::Gbt { max_depth, n_estimators, learning_rate, .. } = &cfg.grids.gbt else {
            panic!("wrong family");
        };
        assert_eq!(max_depth, &[3]);
        assert_eq!(n_estimators, &[100]);
        let ParamGrid::Gbt { learning_rate: stock, .. } =
            ParamGrid::default_for(ClassifierKind::Gbt)
        else {
            panic!();
        };
        assert_eq!(learning_rate, &stock);
    }

    #[test]
    fn svm_kernel_list_parses_from_names() {
        let file: PipelineConfig =
            toml::from_str("data = \"rows.csv\"\n[grids.svm]\nkernel = [\"linear\"]\n").unwrap();
        let cfg = resolve(file, &FlagOverrides::default()).unwrap();
        assert_eq!(cfg.grids.svm, ParamGrid::Svm { c: vec![0.01, 0.1, 1.0, 10.0, 100.0], kernel: vec![Kernel::Linear] });
    }

    #[test]
    fn schema_override_assigns_kinds() {
        let file: PipelineConfig = toml::from_str(
            "data = \"rows.csv\"\ndrop_count = 0\n[schema]\nnames = [\"a\", \"b\"]\ncategorical = [\"b\"]\nlabel = \"y\"\n",
        )
        .unwrap();
        let cfg = resolve(file, &FlagOverrides::default()).unwrap();
        assert_eq!(cfg.schema.kind(0), FeatureKind::Continuous);
        assert_eq!(cfg.schema.kind(1), FeatureKind::Categorical);
        assert_eq!(cfg.schema.label(), "y");
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(toml::from_str::<PipelineConfig>("bogus = 1").is_err());
        assert!(toml::from_str::<PipelineConfig>("[grids.gbt]\ndepth = [1]").is_err());

        let mut file: PipelineConfig = toml::from_str(r#"data = "rows.csv""#).unwrap();
        file.folds = Some(1);
        assert!(matches!(
            resolve(file, &FlagOverrides::default()),
            Err(CliError::Config(msg)) if msg.contains("folds")
        ));

        let mut file: PipelineConfig = toml::from_str(r#"data = "rows.csv""#).unwrap();
        file.drop_count = Some(15);
        assert!(resolve(file, &FlagOverrides::default()).is_err());

        let missing: PipelineConfig = toml::from_str("seed = 3").unwrap();
        assert!(matches!(
            resolve(missing, &FlagOverrides::default()),
            Err(CliError::Config(msg)) if msg.contains("data")
        ));

        let mut file: PipelineConfig = toml::from_str(r#"data = "rows.csv""#).unwrap();
        file.learning_curve_fractions = Some(vec![0.5, 0.5]);
        assert!(resolve(file, &FlagOverrides::default()).is_err());

        let mut file: PipelineConfig = toml::from_str(r#"data = "rows.csv""#).unwrap();
        file.grids.knn.n_neighbors = Some(vec![]);
        assert!(matches!(
            resolve(file, &FlagOverrides::default()),
            Err(CliError::Config(msg)) if msg.contains("knn")
        ));
    }

    #[test]
    fn schema_categorical_must_name_a_feature() {
        let schema = SchemaConfig {
            names: vec!["a".into()],
            categorical: vec!["zzz".into()],
            label: "y".into(),
        };
        let file = PipelineConfig {
            data: Some(PathBuf::from("rows.csv")),
            schema: Some(schema),
            ..PipelineConfig::default()
        };
        assert!(resolve(file, &FlagOverrides::default()).is_err());
    }
}
