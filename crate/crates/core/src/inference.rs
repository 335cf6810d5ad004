//! TSK+ prediction over a sparse rule base.
//!
//! Observations are normalized with the rule base's training ranges,
//! projected onto its selected features and matched against every rule. The
//! continuous output is snapped to the nearest label of the label universe,
//! which may be a label no training instance carried.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::fuzzy::{aggregate, firing_degree, similarity, TriangularFuzzySet};
use crate::rulebase::RuleBase;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub gamma: f64,
    pub label: Label,
    pub total_firing: f64,
    pub fallback_used: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_rule_firings: Option<Vec<f64>>,
}

/// Nearest member of a sorted label universe; ties go to the smaller label.
pub fn discretize(gamma: f64, universe: &[Label]) -> Label {
    let mut best = universe[0];
    let mut best_d = (gamma - best as f64).abs();
    for &l in &universe[1..] {
        let d = (gamma - l as f64).abs();
        if d < best_d {
            best = l;
            best_d = d;
        }
    }
    best
}

fn observe_crisp(rb: &RuleBase, raw: &[f64]) -> Result<Vec<TriangularFuzzySet>> {
    if raw.len() != rb.input_arity() {
        return Err(Error::InvalidInput(format!(
            "expected {} features, got {}",
            rb.input_arity(),
            raw.len()
        )));
    }
    if let Some(v) = raw.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite feature value {v}")));
    }
    let ranges = rb.normalization().ranges();
    rb.selected_features()
        .iter()
        .map(|&f| TriangularFuzzySet::singleton(ranges[f].normalize(raw[f])))
        .collect()
}

fn observe_fuzzy(rb: &RuleBase, raw: &[TriangularFuzzySet]) -> Result<Vec<TriangularFuzzySet>> {
    if raw.len() != rb.input_arity() {
        return Err(Error::InvalidInput(format!(
            "expected {} fuzzy observations, got {}",
            rb.input_arity(),
            raw.len()
        )));
    }
    let ranges = rb.normalization().ranges();
    rb.selected_features()
        .iter()
        .map(|&f| {
            let r = &ranges[f];
            let s = raw[f];
            // min-max scaling is increasing, so vertex order is preserved
            TriangularFuzzySet::new(r.normalize(s.a1()), r.normalize(s.a2()), r.normalize(s.a3()))
        })
        .collect()
}

fn infer(rb: &RuleBase, observation: &[TriangularFuzzySet], diagnostics: bool) -> Result<Prediction> {
    let params = rb.params();
    let firings: Vec<f64> = rb
        .rules()
        .iter()
        .map(|rule| {
            let matches: Vec<f64> = rule
                .antecedents
                .iter()
                .zip(observation)
                .map(|(a, o)| similarity(a, o, params))
                .collect();
            firing_degree(&matches)
        })
        .collect::<Result<_>>()?;
    let consequents: Vec<f64> = rb.rules().iter().map(|r| r.consequent).collect();
    let total_firing: f64 = firings.iter().sum();

    let (gamma, fallback_used) = match aggregate(&firings, &consequents) {
        Ok(g) => (g, false),
        Err(Error::ZeroFiring) => {
            let point: Vec<f64> = observation.iter().map(TriangularFuzzySet::representative).collect();
            let nearest = rb
                .rules()
                .iter()
                .map(|r| {
                    r.center()
                        .iter()
                        .zip(&point)
                        .map(|(c, x)| (c - x) * (c - x))
                        .sum::<f64>()
                })
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |best, (i, d)| if d < best.1 { (i, d) } else { best },
                )
                .0;
            (consequents[nearest], true)
        }
        Err(e) => return Err(e),
    };

    Ok(Prediction {
        gamma,
        label: discretize(gamma, rb.label_universe()),
        total_firing,
        fallback_used,
        per_rule_firings: diagnostics.then_some(firings),
    })
}

/// Predicts the label of one raw (unnormalized) feature vector.
pub fn predict(rb: &RuleBase, raw_features: &[f64]) -> Result<Prediction> {
    infer(rb, &observe_crisp(rb, raw_features)?, false)
}

/// Like [`predict`], also reporting every rule's firing degree.
pub fn explain(rb: &RuleBase, raw_features: &[f64]) -> Result<Prediction> {
    infer(rb, &observe_crisp(rb, raw_features)?, true)
}

/// Prediction for fuzzy observations given in raw feature units, one per
/// input feature.
pub fn predict_fuzzy(rb: &RuleBase, observation: &[TriangularFuzzySet]) -> Result<Prediction> {
    infer(rb, &observe_fuzzy(rb, observation)?, false)
}

/// Label-by-label counts, rows = truth, columns = prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<Label>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<Label>) -> Self {
        let n = labels.len();
        Self {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    fn index(&self, label: Label) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn record(&mut self, truth: Label, predicted: Label) -> Result<()> {
        let t = self
            .index(truth)
            .ok_or_else(|| Error::InvalidInput(format!("true label {truth} not in label universe")))?;
        let p = self
            .index(predicted)
            .ok_or_else(|| Error::Internal(format!("predicted label {predicted} not in label universe")))?;
        self.counts[t][p] += 1;
        Ok(())
    }

    pub fn count(&self, truth: Label, predicted: Label) -> u64 {
        match (self.index(truth), self.index(predicted)) {
            (Some(t), Some(p)) => self.counts[t][p],
            _ => 0,
        }
    }

    pub fn row_total(&self, truth: Label) -> u64 {
        self.index(truth).map_or(0, |t| self.counts[t].iter().sum())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Plain-text grid. Only rows with at least one instance are printed;
    /// every column of the label universe is kept.
    pub fn to_text(&self) -> String {
        let width = self
            .counts
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .chain(self.labels.iter().map(|l| l.to_string().len()))
            .max()
            .unwrap_or(1)
            .max(3);
        let mut out = format!("{:>width$} |", "t\\p");
        for l in &self.labels {
            out.push_str(&format!(" {l:>width$}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(width + 2 + (width + 1) * self.labels.len()));
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            if self.counts[i].iter().all(|&c| c == 0) {
                continue;
            }
            out.push_str(&format!("{l:>width$} |"));
            for c in &self.counts[i] {
                out.push_str(&format!(" {c:>width$}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstancePrediction {
    pub truth: Label,
    pub prediction: Prediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchPrediction {
    pub per_instance: Vec<InstancePrediction>,
    pub correct: u64,
    pub total: u64,
    /// Fraction in [0, 1]; `None` when there were no instances.
    pub accuracy: Option<f64>,
    pub no_instances: bool,
    pub confusion: ConfusionMatrix,
}

/// Predicts every instance of a raw (unnormalized) dataset.
///
/// Instances are evaluated in parallel; results keep input order.
pub fn predict_batch(rb: &RuleBase, dataset: &Dataset) -> Result<BatchPrediction> {
    let predictions: Vec<Prediction> = dataset
        .instances()
        .par_iter()
        .enumerate()
        .map(|(index, inst)| {
            predict(rb, &inst.features).map_err(|e| Error::Instance {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut confusion = ConfusionMatrix::new(rb.label_universe().to_vec());
    let mut per_instance = Vec::with_capacity(predictions.len());
    for (index, (inst, prediction)) in dataset.instances().iter().zip(predictions).enumerate() {
        confusion
            .record(inst.label, prediction.label)
            .map_err(|e| Error::Instance {
                index,
                source: Box::new(e),
            })?;
        per_instance.push(InstancePrediction {
            truth: inst.label,
            prediction,
        });
    }
    let total = per_instance.len() as u64;
    let correct = per_instance.iter().filter(|p| p.truth == p.prediction.label).count() as u64;
    Ok(BatchPrediction {
        per_instance,
        correct,
        total,
        accuracy: (total > 0).then(|| correct as f64 / total as f64),
        no_instances: total == 0,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureRange, Normalization};
    use crate::fuzzy::SimilarityParams;
    use crate::rulebase::{ConsequentStrategy, Rule};

    fn unit_normalization(n: usize) -> Normalization {
        Normalization::new(
            (0..n)
                .map(|i| FeatureRange {
                    name: format!("f{}", i + 1),
                    min: 0.0,
                    max: 1.0,
                })
                .collect(),
        )
        .unwrap()
    }

    fn rule(core: &[f64], spread: f64, consequent: f64) -> Rule {
        Rule {
            antecedents: core
                .iter()
                .map(|&c| TriangularFuzzySet::new(c - spread, c, c + spread).unwrap())
                .collect(),
            consequent,
            support_count: 1,
        }
    }

    fn rulebase(rules: Vec<Rule>, universe: Vec<Label>) -> RuleBase {
        let n = rules[0].antecedents.len();
        RuleBase::new(
            rules,
            SimilarityParams::default(),
            unit_normalization(n),
            (0..n).collect(),
            universe,
            ConsequentStrategy::PerClass,
            0,
        )
        .unwrap()
    }

    #[test]
    fn dominant_rule_decides() {
        // opposite corners of the unit square: the far rule's shape term is 0
        let rb = rulebase(
            vec![rule(&[0.0, 0.0], 0.0, 2.0), rule(&[1.0, 1.0], 0.0, 9.0)],
            (1..=10).collect(),
        );
        let p = explain(&rb, &[1.0, 1.0]).unwrap();
        assert!(!p.fallback_used);
        assert_eq!(p.per_rule_firings.unwrap()[0], 0.0);
        assert_eq!(p.gamma, 9.0);
        assert_eq!(p.label, 9);
    }

    #[test]
    fn in_range_rules_still_fire_under_default_params() {
        // with h = 5, omega = 5 a rule 0.8 away keeps a visible share
        let rb = rulebase(
            vec![rule(&[0.1], 0.05, 2.0), rule(&[0.9], 0.05, 9.0)],
            (1..=10).collect(),
        );
        let p = explain(&rb, &[0.9]).unwrap();
        let f = p.per_rule_firings.unwrap();
        assert!(f[0] > 0.1 && f[1] > 0.9);
        assert!(p.gamma > 8.0 && p.gamma < 9.0);
    }

    #[test]
    fn symmetric_firing_reaches_an_unseen_label() {
        let rb = rulebase(
            vec![rule(&[0.25], 0.125, 4.0), rule(&[0.75], 0.125, 6.0)],
            (1..=10).collect(),
        );
        let p = explain(&rb, &[0.5]).unwrap();
        let firings = p.per_rule_firings.unwrap();
        assert_eq!(firings[0], firings[1]);
        assert_eq!(p.gamma, 5.0);
        assert_eq!(p.label, 5);
    }

    #[test]
    fn discretization_ties_go_down() {
        let universe: Vec<Label> = (1..=10).collect();
        assert_eq!(discretize(4.5, &universe), 4);
        assert_eq!(discretize(4.51, &universe), 5);
        assert_eq!(discretize(-3.0, &universe), 1);
        assert_eq!(discretize(42.0, &universe), 10);
        assert_eq!(discretize(7.0, &[2, 5, 9]), 5);
    }

    #[test]
    fn zero_firing_falls_back_to_nearest_rule() {
        let rb = rulebase(
            vec![rule(&[0.1], 0.05, 2.0), rule(&[0.9], 0.05, 8.0)],
            (1..=10).collect(),
        );
        // normalized 6.0 is far enough that every shape term clips to zero
        let p = predict(&rb, &[6.0]).unwrap();
        assert!(p.fallback_used);
        assert_eq!(p.total_firing, 0.0);
        assert_eq!(p.gamma, 8.0);
        assert_eq!(p.label, 8);
    }

    #[test]
    fn input_validation() {
        let rb = rulebase(vec![rule(&[0.1, 0.2], 0.05, 2.0)], vec![2]);
        assert!(predict(&rb, &[0.1]).is_err());
        assert!(predict(&rb, &[0.1, f64::NAN]).is_err());
    }

    #[test]
    fn fuzzy_singletons_match_crisp() {
        let rb = rulebase(
            vec![rule(&[0.2, 0.4], 0.1, 3.0), rule(&[0.7, 0.6], 0.1, 7.0)],
            (1..=10).collect(),
        );
        let crisp = predict(&rb, &[0.5, 0.5]).unwrap();
        let s = TriangularFuzzySet::singleton(0.5).unwrap();
        assert_eq!(predict_fuzzy(&rb, &[s, s]).unwrap(), crisp);
        let wide = TriangularFuzzySet::new(0.4, 0.5, 0.6).unwrap();
        assert!(predict_fuzzy(&rb, &[wide, wide]).is_ok());
    }

    #[test]
    fn batch_on_rule_cores_is_perfect() {
        let rb = rulebase(
            vec![
                rule(&[0.1], 0.02, 1.0),
                rule(&[0.5], 0.02, 5.0),
                rule(&[0.9], 0.02, 9.0),
            ],
            (1..=9).collect(),
        )
        .with_params(SimilarityParams::new(20.0, 5.0).unwrap());
        let ds = Dataset::from_rows(vec![(vec![0.1], 1), (vec![0.5], 5), (vec![0.9], 9)]).unwrap();
        let report = predict_batch(&rb, &ds).unwrap();
        assert_eq!(report.accuracy, Some(1.0));
        assert_eq!(report.confusion.trace(), 3);
        assert_eq!(report.confusion.count(5, 5), 1);
    }

    #[test]
    fn empty_batch_is_flagged() {
        let rb = rulebase(vec![rule(&[0.1], 0.02, 1.0)], vec![1]);
        let ds = Dataset::new(vec!["f1".into()], vec![]).unwrap();
        let report = predict_batch(&rb, &ds).unwrap();
        assert!(report.no_instances);
        assert_eq!(report.accuracy, None);
        assert_eq!(report.total, 0);
    }

    #[test]
    fn batch_errors_carry_instance_index() {
        let rb = rulebase(vec![rule(&[0.1], 0.02, 1.0)], vec![1, 2]);
        let ds = Dataset::from_rows(vec![(vec![0.1], 1), (vec![0.1], 7)]).unwrap();
        match predict_batch(&rb, &ds) {
            Err(Error::Instance { index: 1, .. }) => {}
            other => panic!("expected instance error, got {other:?}"),
        }
    }

    #[test]
    fn confusion_text_skips_empty_rows() {
        let mut cm = ConfusionMatrix::new(vec![1, 2, 3]);
        cm.record(2, 3).unwrap();
        let text = cm.to_text();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().trim_start().starts_with("2 |"));
    }
}
