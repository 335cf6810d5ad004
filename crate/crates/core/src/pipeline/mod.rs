//! End-to-end unseen-label experiments: load, hold out, normalize, select
//! features, induce rules, predict and report.

mod io;
mod report;
mod scenario;
mod synth;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use io::{load_csv, load_features, parse_label, write_csv};
pub use report::{ClassSummary, PredictionReport};
pub use scenario::split_scenario;
pub use synth::{generate_synthetic, path_loss, CorridorSpec};

use crate::cfs::{rank_features_with, CfsOptions, FeatureRanking, SelectionRule};
use crate::dataset::{fit_normalization, Dataset, Label};
use crate::error::{Error, Result};
use crate::fuzzy::SimilarityParams;
use crate::inference::predict_batch;
use crate::rulebase::{extract_rules, ConsequentStrategy, RuleBase, TrainingConfig, DEFAULT_K_MAX};

pub const RULEBASE_FILE: &str = "rulebase.json";
pub const REPORT_FILE: &str = "report.json";
pub const CONFUSION_FILE: &str = "confusion.txt";

/// Labels a deployment may emit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelUniverse {
    /// Inclusive range.
    Range {
        start: Label,
        end: Label,
    },
    List(Vec<Label>),
}

impl LabelUniverse {
    /// Sorted, de-duplicated labels.
    pub fn labels(&self) -> Result<Vec<Label>> {
        let mut labels: Vec<Label> = match self {
            LabelUniverse::Range { start, end } => {
                if start > end {
                    return Err(Error::Config(format!("empty label range {start}..={end}")));
                }
                (*start..=*end).collect()
            }
            LabelUniverse::List(l) => l.clone(),
        };
        labels.sort_unstable();
        labels.dedup();
        if labels.is_empty() {
            return Err(Error::Config("label universe is empty".into()));
        }
        Ok(labels)
    }

    /// Contiguous range spanning the labels present in `dataset`.
    pub fn spanning(dataset: &Dataset) -> Result<Self> {
        let labels = dataset.labels();
        match (labels.first(), labels.last()) {
            (Some(&start), Some(&end)) => Ok(LabelUniverse::Range { start, end }),
            _ => Err(Error::InvalidInput("dataset has no labels".into())),
        }
    }
}

impl FromStr for LabelUniverse {
    type Err = Error;

    /// `1..=21`, `c1..=c21` or a comma-separated list such as `1,2,5`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some((a, b)) = s.split_once("..=") {
            return Ok(LabelUniverse::Range {
                start: parse_label(a)?,
                end: parse_label(b)?,
            });
        }
        Ok(LabelUniverse::List(parse_label_list(s)?))
    }
}

impl fmt::Display for LabelUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelUniverse::Range { start, end } => write!(f, "{start}..={end}"),
            LabelUniverse::List(l) => {
                let parts: Vec<String> = l.iter().map(Label::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Comma-separated labels, each `c<N>` or an integer.
pub fn parse_label_list(s: &str) -> Result<Vec<Label>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_label).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfsConfig {
    pub enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub sort_panels: bool,
}

impl CfsConfig {
    pub const DEFAULT_TOP_N: usize = 8;

    pub fn top_n(n: usize) -> Self {
        Self {
            enabled: true,
            top_n: Some(n),
            ..Default::default()
        }
    }

    /// Scoring options, or `None` when selection is disabled.
    pub fn options(&self) -> Result<Option<CfsOptions>> {
        if !self.enabled {
            return Ok(None);
        }
        let rule = match (self.top_n, self.epsilon) {
            (Some(_), Some(_)) => return Err(Error::Config("give either a CFS top-n or an epsilon, not both".into())),
            (Some(n), None) => SelectionRule::TopN(n),
            (None, Some(e)) => SelectionRule::Epsilon(e),
            (None, None) => SelectionRule::TopN(Self::DEFAULT_TOP_N),
        };
        Ok(Some(CfsOptions {
            rule,
            sort_panels: self.sort_panels,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilarityConfig {
    pub h: f64,
    pub omega: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            h: SimilarityParams::DEFAULT_H,
            omega: SimilarityParams::DEFAULT_OMEGA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringConfig {
    pub strategy: ConsequentStrategy,
    pub k_max: usize,
    pub seed: u64,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            strategy: ConsequentStrategy::PerClass,
            k_max: DEFAULT_K_MAX,
            seed: 0,
        }
    }
}

/// Everything one experiment depends on. Runs are a pure function of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub input_path: PathBuf,
    pub label_column: String,
    /// Empty selects every non-label column.
    #[serde(default)]
    pub feature_columns: Vec<String>,
    pub unseen_labels: Vec<Label>,
    #[serde(default)]
    pub cfs: CfsConfig,
    #[serde(default)]
    pub similarity: SimilarityConfig,
    #[serde(default)]
    pub clustering: ClusteringConfig,
    /// Defaults to the contiguous range spanning the input's labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_universe: Option<LabelUniverse>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(
        input_path: impl Into<PathBuf>,
        label_column: impl Into<String>,
        unseen_labels: Vec<Label>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            input_path: input_path.into(),
            label_column: label_column.into(),
            feature_columns: Vec::new(),
            unseen_labels,
            cfs: CfsConfig::default(),
            similarity: SimilarityConfig::default(),
            clustering: ClusteringConfig::default(),
            label_universe: None,
            output_dir: output_dir.into(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_toml(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn similarity_params(&self) -> Result<SimilarityParams> {
        SimilarityParams::new(self.similarity.h, self.similarity.omega).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks everything that does not need the input file.
    pub fn validate(&self) -> Result<()> {
        if self.unseen_labels.is_empty() {
            return Err(Error::Config("no unseen labels given".into()));
        }
        self.similarity_params()?;
        self.cfs.options()?;
        if self.clustering.k_max < 2 {
            return Err(Error::Config(format!(
                "k_max must be at least 2, got {}",
                self.clustering.k_max
            )));
        }
        if let Some(u) = &self.label_universe {
            check_unseen_in_universe(&self.unseen_labels, &u.labels()?)?;
        }
        Ok(())
    }
}

fn check_unseen_in_universe(unseen: &[Label], universe: &[Label]) -> Result<()> {
    match unseen.iter().find(|l| universe.binary_search(l).is_err()) {
        Some(l) => Err(Error::Config(format!("unseen label {l} is not in the label universe"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub rulebase: RuleBase,
    pub ranking: Option<FeatureRanking>,
}

/// Normalizes a raw training set, optionally selects features by curvature
/// and induces the rule base.
pub fn train_model(train: &Dataset, cfs: Option<CfsOptions>, training: &TrainingConfig) -> Result<TrainedModel> {
    let normalized = fit_normalization(train).map_err(Error::at_stage("normalize"))?;
    let (selected, ranking) = match cfs {
        Some(options) => {
            let ranking = rank_features_with(&normalized, options).map_err(Error::at_stage("feature selection"))?;
            let selected = ranking.selected_indices();
            if selected.is_empty() {
                return Err(Error::at_stage("feature selection")(Error::Config(
                    "curvature threshold rejects every feature".into(),
                )));
            }
            (selected, Some(ranking))
        }
        None => ((0..normalized.n_features()).collect(), None),
    };
    let rulebase = extract_rules(&normalized, &selected, training).map_err(Error::at_stage("training"))?;
    Ok(TrainedModel { rulebase, ranking })
}

/// Scores the features of a raw dataset after min-max normalization.
pub fn rank_dataset(raw: &Dataset, options: CfsOptions) -> Result<FeatureRanking> {
    rank_features_with(&fit_normalization(raw)?, options)
}

/// Predicts a labelled raw dataset and builds a report. `unseen_labels`
/// only affects the unseen-label distance diagnostic.
pub fn evaluate(rb: &RuleBase, test: &Dataset, unseen_labels: &[Label]) -> Result<PredictionReport> {
    let batch = predict_batch(rb, test).map_err(Error::at_stage("prediction"))?;
    Ok(PredictionReport::assemble(
        batch,
        unseen_labels,
        None,
        rb.rules().len() as u64,
        selected_names(rb),
        None,
        None,
    ))
}

fn selected_names(rb: &RuleBase) -> Vec<String> {
    let ranges = rb.normalization().ranges();
    rb.selected_features().iter().map(|&f| ranges[f].name.clone()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub rulebase: RuleBase,
    pub report: PredictionReport,
}

/// Runs an experiment in memory without writing anything.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let dataset =
        load_csv(&config.input_path, &config.label_column, &config.feature_columns).map_err(Error::at_stage("load"))?;
    let universe = match &config.label_universe {
        Some(u) => u.labels()?,
        None => LabelUniverse::spanning(&dataset)?.labels()?,
    };
    check_unseen_in_universe(&config.unseen_labels, &universe)?;

    let (train, test) = split_scenario(&dataset, &config.unseen_labels).map_err(Error::at_stage("split"))?;
    let training = TrainingConfig {
        strategy: config.clustering.strategy,
        k_max: config.clustering.k_max,
        seed: config.clustering.seed,
        params: config.similarity_params()?,
        label_universe: Some(universe),
    };
    let model = train_model(&train, config.cfs.options()?, &training)?;
    let batch = predict_batch(&model.rulebase, &test).map_err(Error::at_stage("prediction"))?;
    let report = PredictionReport::assemble(
        batch,
        &config.unseen_labels,
        Some(train.len() as u64),
        model.rulebase.rules().len() as u64,
        selected_names(&model.rulebase),
        model.ranking,
        Some(config.clone()),
    );
    Ok(ExperimentOutcome {
        rulebase: model.rulebase,
        report,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the rule base, the JSON report and the text summary into `dir`.
pub fn write_artifacts(dir: &Path, rulebase: &RuleBase, report: &PredictionReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(RULEBASE_FILE), &rulebase.to_json())?;
    write_file(&dir.join(REPORT_FILE), &report.to_json())?;
    write_file(&dir.join(CONFUSION_FILE), &report.to_text())
}

/// Full pipeline: [`execute`] followed by [`write_artifacts`] into the
/// configured output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<PredictionReport> {
    let outcome = execute(config)?;
    write_artifacts(&config.output_dir, &outcome.rulebase, &outcome.report).map_err(Error::at_stage("report"))?;
    Ok(outcome.report)
}
