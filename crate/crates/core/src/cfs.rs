//! Curvature-based feature selection.
//!
//! Each feature is viewed as a 2-D panel of `(instance index, normalized
//! value)` points. Its weight is the mean Menger curvature over every run of
//! three consecutive points; features are ranked by descending weight.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Reciprocal circumradius of the triangle `(p, q, r)`, with the turning
/// angle taken at `q`.
///
/// Collinear or coincident points yield 0. Triples whose turn is below the
/// rounding noise of the cross product count as collinear.
pub fn menger_curvature(p: Point2D, q: Point2D, r: Point2D) -> f64 {
    let (ux, uy) = (q.x - p.x, q.y - p.y);
    let (vx, vy) = (r.x - q.x, r.y - q.y);
    let pq = ux.hypot(uy);
    let qr = vx.hypot(vy);
    let pr = (r.x - p.x).hypot(r.y - p.y);
    if pq == 0.0 || qr == 0.0 || pr == 0.0 {
        return 0.0;
    }

    let cross = ux * vy - uy * vx;
    let magnitude = [p.x, p.y, q.x, q.y, r.x, r.y]
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.abs()));
    let noise = 8.0 * f64::EPSILON * ((ux * vy).abs() + (uy * vx).abs() + magnitude * pq.max(qr));
    if cross.abs() <= noise {
        return 0.0;
    }

    // 2 sin(phi) / |pr| with sin(phi) = |cross| / (|pq| |qr|)
    let sin_phi = cross.abs() / (pq * qr);
    2.0 * sin_phi / pr
}

/// Mean Menger curvature of one feature's panel, points at unit index
/// spacing in the given order.
pub fn feature_curvature(values: &[f64]) -> Result<f64> {
    if values.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: values.len(),
        });
    }
    // curvature is translation invariant, so each window uses local x = 0, 1, 2
    let total: f64 = values
        .windows(3)
        .map(|w| {
            menger_curvature(
                Point2D::new(0.0, w[0]),
                Point2D::new(1.0, w[1]),
                Point2D::new(2.0, w[2]),
            )
        })
        .sum();
    Ok(total / (values.len() - 2) as f64)
}

/// How many features survive ranking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Keep features whose mean curvature is strictly greater than epsilon.
    Epsilon(f64),
    /// Keep the `n` best-ranked features.
    TopN(usize),
}

impl SelectionRule {
    fn validate(&self) -> Result<()> {
        match *self {
            SelectionRule::Epsilon(e) if !e.is_finite() => {
                Err(Error::Config(format!("CFS threshold must be finite, got {e}")))
            }
            SelectionRule::TopN(0) => Err(Error::Config("CFS top-n must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub feature_names: Vec<String>,
    /// Mean curvature per feature, in feature order.
    pub scores: Vec<f64>,
    /// Ordinal rank per feature, 1 = most important.
    pub ranks: Vec<usize>,
    pub selected: Vec<bool>,
    pub selection_rule: SelectionRule,
    pub sorted_panels: bool,
}

impl FeatureRanking {
    /// Selected feature indices in ascending index order.
    pub fn selected_indices(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }

    /// Feature indices from most to least important.
    pub fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.ranks.len()).collect();
        order.sort_by_key(|&i| self.ranks[i]);
        order
    }

    /// Fixed-width text table, best feature first.
    pub fn to_table(&self) -> String {
        let width = self.feature_names.iter().map(String::len).max().unwrap_or(0).max(7);
        let mut out = format!(
            "{:>4}  {:<width$}  {:>14}  selected\n",
            "rank", "feature", "mean_curvature"
        );
        for i in self.order() {
            out.push_str(&format!(
                "{:>4}  {:<width$}  {:>14.8}  {}\n",
                self.ranks[i],
                self.feature_names[i],
                self.scores[i],
                if self.selected[i] { "yes" } else { "no" }
            ));
        }
        out
    }
}

/// Feature scoring options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfsOptions {
    pub rule: SelectionRule,
    /// Sort each panel's values before scoring instead of using dataset
    /// order.
    #[serde(default)]
    pub sort_panels: bool,
}

impl Default for CfsOptions {
    fn default() -> Self {
        Self {
            rule: SelectionRule::TopN(8),
            sort_panels: false,
        }
    }
}

/// Scores every feature of a normalized dataset (in dataset order) and
/// applies `rule`.
pub fn rank_features(dataset: &Dataset, rule: SelectionRule) -> Result<FeatureRanking> {
    rank_features_with(
        dataset,
        CfsOptions {
            rule,
            sort_panels: false,
        },
    )
}

pub fn rank_features_with(dataset: &Dataset, options: CfsOptions) -> Result<FeatureRanking> {
    options.rule.validate()?;
    if dataset.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: dataset.len(),
        });
    }
    let scores = (0..dataset.n_features())
        .map(|f| {
            let mut column = dataset.column(f);
            if options.sort_panels {
                column.sort_by(f64::total_cmp);
            }
            feature_curvature(&column)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    // descending score, ties by ascending index (sort is stable)
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0; scores.len()];
    for (pos, &f) in order.iter().enumerate() {
        ranks[f] = pos + 1;
    }

    let selected = match options.rule {
        SelectionRule::Epsilon(eps) => scores.iter().map(|&s| s > eps).collect(),
        SelectionRule::TopN(n) => ranks.iter().map(|&r| r <= n).collect(),
    };

    Ok(FeatureRanking {
        feature_names: dataset.feature_names().to_vec(),
        scores,
        ranks,
        selected,
        selection_rule: options.rule,
        sorted_panels: options.sort_panels,
    })
}
