//! Sparse TSK rule bases induced from clustered training data.
//!
//! Every cluster becomes one rule. Per selected feature the antecedent is the
//! triangle `(cluster min, cluster centroid, cluster max)`; the consequent is
//! the class label the cluster was drawn from (or the mean member label).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{elbow_k, kmeans};
use crate::dataset::{Dataset, FeatureRange, Label, Normalization};
use crate::error::{Error, Result};
use crate::fuzzy::{SimilarityParams, TriangularFuzzySet};

pub const FORMAT_VERSION: u64 = 1;

/// Default upper bound of the elbow sweep.
pub const DEFAULT_K_MAX: usize = 10;

/// Classes smaller than this form a single cluster without an elbow sweep.
const MIN_CLASS_FOR_ELBOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ConsequentStrategy {
    /// Cluster each class separately; consequent = class label.
    #[default]
    #[serde(rename = "per-class")]
    PerClass,
    /// Cluster all instances together; consequent = mean member label.
    #[serde(rename = "global-mean")]
    GlobalMean,
}

impl fmt::Display for ConsequentStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConsequentStrategy::PerClass => "per-class",
            ConsequentStrategy::GlobalMean => "global-mean",
        })
    }
}

impl FromStr for ConsequentStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-class" => Ok(ConsequentStrategy::PerClass),
            "global-mean" => Ok(ConsequentStrategy::GlobalMean),
            other => Err(Error::Config(format!(
                "unknown consequent strategy '{other}' (expected per-class or global-mean)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedents: Vec<TriangularFuzzySet>,
    pub consequent: f64,
    pub support_count: usize,
}

impl Rule {
    /// Representative of every antecedent, the rule's position in
    /// normalized feature space.
    pub fn center(&self) -> Vec<f64> {
        self.antecedents
            .iter()
            .map(TriangularFuzzySet::representative)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    rules: Vec<Rule>,
    params: SimilarityParams,
    normalization: Normalization,
    selected_features: Vec<usize>,
    label_universe: Vec<Label>,
    consequent_strategy: ConsequentStrategy,
    seed: u64,
}

impl RuleBase {
    pub fn new(
        rules: Vec<Rule>,
        params: SimilarityParams,
        normalization: Normalization,
        selected_features: Vec<usize>,
        label_universe: Vec<Label>,
        consequent_strategy: ConsequentStrategy,
        seed: u64,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Validation("rule base has no rules".into()));
        }
        if selected_features.is_empty() {
            return Err(Error::Validation("rule base selects no features".into()));
        }
        if let Some(&bad) = selected_features.iter().find(|&&f| f >= normalization.len()) {
            return Err(Error::Validation(format!(
                "selected feature {bad} out of range for {} normalized features",
                normalization.len()
            )));
        }
        if label_universe.is_empty() {
            return Err(Error::Validation("label universe is empty".into()));
        }
        if label_universe.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("label universe must be strictly increasing".into()));
        }
        for (i, rule) in rules.iter().enumerate() {
            if rule.antecedents.len() != selected_features.len() {
                return Err(Error::Validation(format!(
                    "rule {i} has {} antecedents, expected {}",
                    rule.antecedents.len(),
                    selected_features.len()
                )));
            }
            if !rule.consequent.is_finite() {
                return Err(Error::Validation(format!("rule {i} has non-finite consequent")));
            }
        }
        Ok(Self {
            rules,
            params,
            normalization,
            selected_features,
            label_universe,
            consequent_strategy,
            seed,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn params(&self) -> SimilarityParams {
        self.params
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn selected_features(&self) -> &[usize] {
        &self.selected_features
    }

    pub fn label_universe(&self) -> &[Label] {
        &self.label_universe
    }

    pub fn consequent_strategy(&self) -> ConsequentStrategy {
        self.consequent_strategy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of raw input features expected by prediction.
    pub fn input_arity(&self) -> usize {
        self.normalization.len()
    }

    /// Same rules with different similarity parameters.
    pub fn with_params(mut self, params: SimilarityParams) -> Self {
        self.params = params;
        self
    }

    pub fn to_json(&self) -> String {
        let doc = RuleBaseDocument::from(self);
        let mut out = serde_json::to_string_pretty(&doc).expect("rule base document serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Probe {
            format_version: u64,
        }
        let probe: Probe = serde_json::from_str(text).map_err(parse_error)?;
        if probe.format_version != FORMAT_VERSION {
            return Err(Error::Version {
                found: probe.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let doc: RuleBaseDocument = serde_json::from_str(text).map_err(parse_error)?;
        doc.try_into()
    }
}

pub(crate) fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// On-disk layout of a rule base.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleBaseDocument {
    format_version: u64,
    similarity_params: ParamsDocument,
    normalization: Vec<FeatureRange>,
    selected_features: Vec<usize>,
    consequent_strategy: ConsequentStrategy,
    label_universe: Vec<Label>,
    seed: u64,
    rules: Vec<RuleDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDocument {
    h: f64,
    omega: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDocument {
    antecedents: Vec<[f64; 3]>,
    consequent: f64,
    support_count: usize,
}

impl From<&RuleBase> for RuleBaseDocument {
    fn from(rb: &RuleBase) -> Self {
        RuleBaseDocument {
            format_version: FORMAT_VERSION,
            similarity_params: ParamsDocument {
                h: rb.params.h(),
                omega: rb.params.omega(),
            },
            normalization: rb.normalization.ranges().to_vec(),
            selected_features: rb.selected_features.clone(),
            consequent_strategy: rb.consequent_strategy,
            label_universe: rb.label_universe.clone(),
            seed: rb.seed,
            rules: rb
                .rules
                .iter()
                .map(|r| RuleDocument {
                    antecedents: r.antecedents.iter().map(TriangularFuzzySet::params).collect(),
                    consequent: r.consequent,
                    support_count: r.support_count,
                })
                .collect(),
        }
    }
}

impl TryFrom<RuleBaseDocument> for RuleBase {
    type Error = Error;

    fn try_from(doc: RuleBaseDocument) -> Result<Self> {
        let params = SimilarityParams::new(doc.similarity_params.h, doc.similarity_params.omega)
            .map_err(|e| Error::Validation(e.to_string()))?;
        let rules = doc
            .rules
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let antecedents = r
                    .antecedents
                    .iter()
                    .enumerate()
                    .map(|(j, &[a1, a2, a3])| {
                        TriangularFuzzySet::new(a1, a2, a3)
                            .map_err(|e| Error::Validation(format!("rule {i}, antecedent {j}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Rule {
                    antecedents,
                    consequent: r.consequent,
                    support_count: r.support_count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RuleBase::new(
            rules,
            params,
            Normalization::new(doc.normalization)?,
            doc.selected_features,
            doc.label_universe,
            doc.consequent_strategy,
            doc.seed,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub strategy: ConsequentStrategy,
    pub k_max: usize,
    pub seed: u64,
    pub params: SimilarityParams,
    /// Every label the model may emit. `None` means the contiguous integer
    /// range spanned by the training labels.
    pub label_universe: Option<Vec<Label>>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            strategy: ConsequentStrategy::PerClass,
            k_max: DEFAULT_K_MAX,
            seed: 0,
            params: SimilarityParams::default(),
            label_universe: None,
        }
    }
}

/// Triangle `(min, mean, max)` of each coordinate over `members`.
fn cluster_antecedents(points: &[Vec<f64>], members: &[usize]) -> Vec<TriangularFuzzySet> {
    let dim = points[members[0]].len();
    (0..dim)
        .map(|f| {
            let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for &m in members {
                let v = points[m][f];
                lo = lo.min(v);
                hi = hi.max(v);
                sum += v;
            }
            // the rounded mean of equal values can land an ulp outside [lo, hi]
            let core = (sum / members.len() as f64).clamp(lo, hi);
            TriangularFuzzySet::new(lo, core, hi).expect("min <= clamped mean <= max")
        })
        .collect()
}

/// Elbow-selected k-means over `points`; one entry per non-empty cluster.
fn cluster(points: &[Vec<f64>], k_max: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if points.len() < MIN_CLASS_FOR_ELBOW {
        return Ok(vec![(0..points.len()).collect()]);
    }
    let k = elbow_k(points, k_max.min(points.len()), seed)?;
    let fit = kmeans(points, k, seed)?;
    Ok(fit.members().into_iter().filter(|m| !m.is_empty()).collect())
}

/// Induces a rule base from a normalized training set.
///
/// `selected_features` index the dataset's columns; antecedents follow that
/// order.
pub fn extract_rules(dataset: &Dataset, selected_features: &[usize], config: &TrainingConfig) -> Result<RuleBase> {
    if dataset.is_empty() {
        return Err(Error::InvalidInput("cannot extract rules from an empty dataset".into()));
    }
    let normalization = dataset
        .normalization()
        .cloned()
        .ok_or_else(|| Error::InvalidInput("dataset must be normalized before rule extraction".into()))?;
    if config.k_max < 2 {
        return Err(Error::Config(format!("k_max must be at least 2, got {}", config.k_max)));
    }
    let projected = dataset.project(selected_features)?;

    let present = dataset.labels();
    let label_universe = match &config.label_universe {
        Some(u) => u.clone(),
        None => {
            let lo = *present.first().unwrap();
            let hi = *present.last().unwrap();
            (lo..=hi).collect()
        }
    };
    if let Some(missing) = present.iter().find(|l| label_universe.binary_search(l).is_err()) {
        return Err(Error::Config(format!(
            "training label {missing} is not in the label universe"
        )));
    }

    let rules = match config.strategy {
        ConsequentStrategy::PerClass => {
            let mut by_class: BTreeMap<Label, Vec<Vec<f64>>> = BTreeMap::new();
            for inst in projected.instances() {
                by_class.entry(inst.label).or_default().push(inst.features.clone());
            }
            let per_class: Vec<Vec<Rule>> = by_class
                .into_par_iter()
                .map(|(label, points)| {
                    let clusters = cluster(&points, config.k_max, config.seed)?;
                    Ok(clusters
                        .iter()
                        .map(|members| Rule {
                            antecedents: cluster_antecedents(&points, members),
                            consequent: label as f64,
                            support_count: members.len(),
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;
            per_class.into_iter().flatten().collect()
        }
        ConsequentStrategy::GlobalMean => {
            let points: Vec<Vec<f64>> = projected.instances().iter().map(|i| i.features.clone()).collect();
            let labels: Vec<Label> = projected.instances().iter().map(|i| i.label).collect();
            cluster(&points, config.k_max, config.seed)?
                .iter()
                .map(|members| Rule {
                    antecedents: cluster_antecedents(&points, members),
                    consequent: members.iter().map(|&m| labels[m] as f64).sum::<f64>() / members.len() as f64,
                    support_count: members.len(),
                })
                .collect()
        }
    };

    RuleBase::new(
        rules,
        config.params,
        normalization,
        selected_features.to_vec(),
        label_universe,
        config.strategy,
        config.seed,
    )
}
