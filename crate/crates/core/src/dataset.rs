//! Labelled feature tables and min-max normalization.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class labels are integers on an ordinal scale (room `c8` is label 8).
pub type Label = i64;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<f64>,
    pub label: Label,
}

impl Instance {
    pub fn new(features: Vec<f64>, label: Label) -> Self {
        Self { features, label }
    }
}

/// Training-time range of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl FeatureRange {
    pub fn is_constant(&self) -> bool {
        self.max == self.min
    }

    /// Maps `v` into training units; values outside the training range are
    /// passed through unclamped, constant features map to 0.
    pub fn normalize(&self, v: f64) -> f64 {
        if self.is_constant() {
            0.0
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Normalization {
    ranges: Vec<FeatureRange>,
}

impl Normalization {
    pub fn new(ranges: Vec<FeatureRange>) -> Result<Self> {
        for r in &ranges {
            if !(r.min.is_finite() && r.max.is_finite()) || r.min > r.max {
                return Err(Error::Validation(format!(
                    "feature '{}' has invalid range [{}, {}]",
                    r.name, r.min, r.max
                )));
            }
        }
        Ok(Self { ranges })
    }

    pub fn ranges(&self) -> &[FeatureRange] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn normalize_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.ranges.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} features, got {}",
                self.ranges.len(),
                row.len()
            )));
        }
        Ok(row.iter().zip(&self.ranges).map(|(&v, r)| r.normalize(v)).collect())
    }

    /// Normalizes another raw table with these (training) ranges.
    pub fn apply(&self, raw: &Dataset) -> Result<Dataset> {
        let instances = raw
            .instances
            .iter()
            .map(|inst| Ok(Instance::new(self.normalize_row(&inst.features)?, inst.label)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            feature_names: raw.feature_names.clone(),
            instances,
            normalization: Some(self.clone()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    instances: Vec<Instance>,
    normalization: Option<Normalization>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, instances: Vec<Instance>) -> Result<Self> {
        let arity = feature_names.len();
        for (i, inst) in instances.iter().enumerate() {
            if inst.features.len() != arity {
                return Err(Error::InvalidInput(format!(
                    "instance {i} has {} features, expected {arity}",
                    inst.features.len()
                )));
            }
            if let Some(v) = inst.features.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "instance {i} has non-finite feature value {v}"
                )));
            }
        }
        Ok(Self {
            feature_names,
            instances,
            normalization: None,
        })
    }

    /// Builds a dataset with generated names `f1..fn`.
    pub fn from_rows(rows: Vec<(Vec<f64>, Label)>) -> Result<Self> {
        let arity = rows.first().map_or(0, |(f, _)| f.len());
        let names = (1..=arity).map(|i| format!("f{i}")).collect();
        Self::new(names, rows.into_iter().map(|(f, l)| Instance::new(f, l)).collect())
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        self.instances.iter().map(|i| i.features[feature]).collect()
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.instances.iter().map(|i| i.label).collect()
    }

    /// Keeps the instances matching `keep`, preserving order and metadata.
    pub fn filter(&self, mut keep: impl FnMut(&Instance) -> bool) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            instances: self.instances.iter().filter(|i| keep(i)).cloned().collect(),
            normalization: self.normalization.clone(),
        }
    }

    /// Restricts every instance (and the normalization table, if present)
    /// to the given feature indices, in the given order.
    pub fn project(&self, features: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = features.iter().find(|&&f| f >= self.n_features()) {
            return Err(Error::InvalidInput(format!(
                "feature index {bad} out of range for {} features",
                self.n_features()
            )));
        }
        let normalization = self.normalization.as_ref().map(|n| Normalization {
            ranges: features.iter().map(|&f| n.ranges[f].clone()).collect(),
        });
        Ok(Dataset {
            feature_names: features.iter().map(|&f| self.feature_names[f].clone()).collect(),
            instances: self
                .instances
                .iter()
                .map(|inst| Instance::new(features.iter().map(|&f| inst.features[f]).collect(), inst.label))
                .collect(),
            normalization,
        })
    }
}

/// Fits per-feature min/max on `raw` and returns the normalized table with
/// the fitted ranges attached.
pub fn fit_normalization(raw: &Dataset) -> Result<Dataset> {
    if raw.is_empty() {
        return Err(Error::InvalidInput(
            "cannot fit normalization on an empty dataset".into(),
        ));
    }
    let ranges = raw
        .feature_names
        .iter()
        .enumerate()
        .map(|(f, name)| {
            let (min, max) = raw
                .instances
                .iter()
                .map(|i| i.features[f])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            FeatureRange {
                name: name.clone(),
                min,
                max,
            }
        })
        .collect();
    Normalization::new(ranges)?.apply(raw)
}
