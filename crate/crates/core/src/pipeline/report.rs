//! Evaluation reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::cfs::FeatureRanking;
use crate::dataset::Label;
use crate::inference::{BatchPrediction, ConfusionMatrix, InstancePrediction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub label: Label,
    pub total: u64,
    pub correct: u64,
    /// Percent.
    pub accuracy: f64,
    /// Predictions within one label of the truth.
    pub within_1: u64,
    /// Predictions within two labels of the truth.
    pub within_2: u64,
    /// Mean |gamma - truth|.
    pub mean_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_echo: Option<ExperimentConfig>,
    /// Absent when the rule base was trained elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_instances: Option<u64>,
    pub rule_count: u64,
    pub selected_features: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_ranking: Option<FeatureRanking>,
    pub total: u64,
    pub correct: u64,
    /// Percent; absent when there were no test instances.
    pub accuracy: Option<f64>,
    pub no_instances: bool,
    pub fallback_count: u64,
    /// Mean |gamma - truth| over instances whose label was held out of
    /// training.
    pub distance_diag: Option<f64>,
    pub per_class: Vec<ClassSummary>,
    pub confusion: ConfusionMatrix,
    pub per_instance: Vec<InstancePrediction>,
}

pub(crate) fn percent(num: u64, den: u64) -> f64 {
    100.0 * num as f64 / den as f64
}

pub(crate) fn summarize_classes(per_instance: &[InstancePrediction]) -> Vec<ClassSummary> {
    let mut groups: BTreeMap<Label, Vec<&InstancePrediction>> = BTreeMap::new();
    for p in per_instance {
        groups.entry(p.truth).or_default().push(p);
    }
    groups
        .into_iter()
        .map(|(label, preds)| {
            let total = preds.len() as u64;
            let off = |p: &&InstancePrediction| (p.prediction.label - p.truth).abs();
            let correct = preds.iter().filter(|p| off(p) == 0).count() as u64;
            ClassSummary {
                label,
                total,
                correct,
                accuracy: percent(correct, total),
                within_1: preds.iter().filter(|p| off(p) <= 1).count() as u64,
                within_2: preds.iter().filter(|p| off(p) <= 2).count() as u64,
                mean_abs_error: preds
                    .iter()
                    .map(|p| (p.prediction.gamma - p.truth as f64).abs())
                    .sum::<f64>()
                    / total as f64,
            }
        })
        .collect()
}

impl PredictionReport {
    pub(crate) fn assemble(
        batch: BatchPrediction,
        unseen_labels: &[Label],
        train_instances: Option<u64>,
        rule_count: u64,
        selected_features: Vec<String>,
        feature_ranking: Option<FeatureRanking>,
        config_echo: Option<ExperimentConfig>,
    ) -> Self {
        let unseen_errors: Vec<f64> = batch
            .per_instance
            .iter()
            .filter(|p| unseen_labels.contains(&p.truth))
            .map(|p| (p.prediction.gamma - p.truth as f64).abs())
            .collect();
        let distance_diag =
            (!unseen_errors.is_empty()).then(|| unseen_errors.iter().sum::<f64>() / unseen_errors.len() as f64);
        PredictionReport {
            config_echo,
            train_instances,
            rule_count,
            selected_features,
            feature_ranking,
            total: batch.total,
            correct: batch.correct,
            accuracy: batch.accuracy.map(|a| 100.0 * a),
            no_instances: batch.no_instances,
            fallback_count: batch.per_instance.iter().filter(|p| p.prediction.fallback_used).count() as u64,
            distance_diag,
            per_class: summarize_classes(&batch.per_instance),
            confusion: batch.confusion,
            per_instance: batch.per_instance,
        }
    }

    pub fn class(&self, label: Label) -> Option<&ClassSummary> {
        self.per_class.iter().find(|c| c.label == label)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Human-readable summary followed by the confusion matrix.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(n) = self.train_instances {
            out.push_str(&format!("training instances: {n}\n"));
        }
        out.push_str(&format!(
            "rules: {}\nfeatures ({}): {}\n",
            self.rule_count,
            self.selected_features.len(),
            self.selected_features.join(", ")
        ));
        match self.accuracy {
            Some(a) => out.push_str(&format!("accuracy: {}/{} = {a:.2}%\n", self.correct, self.total)),
            None => out.push_str("accuracy: no instances\n"),
        }
        if let Some(d) = self.distance_diag {
            out.push_str(&format!("mean |gamma - truth| on unseen labels: {d:.4}\n"));
        }
        out.push_str(&format!("fallback predictions: {}\n\n", self.fallback_count));
        out.push_str("class  total  correct  accuracy  within1  within2  mean|err|\n");
        for c in &self.per_class {
            out.push_str(&format!(
                "{:>5}  {:>5}  {:>7}  {:>7.2}%  {:>7}  {:>7}  {:>9.4}\n",
                c.label, c.total, c.correct, c.accuracy, c.within_1, c.within_2, c.mean_abs_error
            ));
        }
        out.push_str("\nconfusion (rows = truth, columns = prediction)\n");
        out.push_str(&self.confusion.to_text());
        out
    }
}
