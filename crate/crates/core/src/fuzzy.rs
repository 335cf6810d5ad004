//! Triangular fuzzy sets and the TSK+ matching primitives.
//!
//! A rule fires against an observation through three steps: a per-dimension
//! matching degree (shape similarity discounted by a sigmoid distance
//! factor), a min t-norm across dimensions, and a firing-weighted average of
//! the rule consequents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A normal, convex triangular fuzzy set `(a1, a2, a3)` with support
/// `[a1, a3]` and normal point `a2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct TriangularFuzzySet {
    a1: f64,
    a2: f64,
    a3: f64,
}

impl TriangularFuzzySet {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite() && a3.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "fuzzy set ({a1}, {a2}, {a3}) has non-finite parameters"
            )));
        }
        if !(a1 <= a2 && a2 <= a3) {
            return Err(Error::InvalidInput(format!(
                "fuzzy set ({a1}, {a2}, {a3}) violates a1 <= a2 <= a3"
            )));
        }
        Ok(Self { a1, a2, a3 })
    }

    /// Crisp value encoded as the degenerate set `(v, v, v)`.
    pub fn singleton(v: f64) -> Result<Self> {
        Self::new(v, v, v)
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn a3(&self) -> f64 {
        self.a3
    }

    pub fn params(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    /// Center of gravity of the three parameters, used as the set's position
    /// when measuring the distance between two sets.
    pub fn representative(&self) -> f64 {
        if self.is_singleton() {
            // exact, unlike (v + v + v) / 3
            return self.a1;
        }
        (self.a1 + self.a2 + self.a3) / 3.0
    }

    pub fn is_singleton(&self) -> bool {
        self.a1 == self.a3
    }

    /// Membership degree of a crisp value.
    pub fn membership(&self, x: f64) -> f64 {
        if x < self.a1 || x > self.a3 {
            0.0
        } else if x == self.a2 {
            1.0
        } else if x < self.a2 {
            (x - self.a1) / (self.a2 - self.a1)
        } else {
            (self.a3 - x) / (self.a3 - self.a2)
        }
    }
}

impl TryFrom<[f64; 3]> for TriangularFuzzySet {
    type Error = Error;

    fn try_from(p: [f64; 3]) -> Result<Self> {
        Self::new(p[0], p[1], p[2])
    }
}

impl From<TriangularFuzzySet> for [f64; 3] {
    fn from(s: TriangularFuzzySet) -> Self {
        s.params()
    }
}

/// Sensitivity `h` and offset `omega` of the distance factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSimilarityParams")]
pub struct SimilarityParams {
    h: f64,
    omega: f64,
}

#[derive(Deserialize)]
struct RawSimilarityParams {
    h: f64,
    omega: f64,
}

impl TryFrom<RawSimilarityParams> for SimilarityParams {
    type Error = Error;

    fn try_from(raw: RawSimilarityParams) -> Result<Self> {
        Self::new(raw.h, raw.omega)
    }
}

impl SimilarityParams {
    pub const DEFAULT_H: f64 = 5.0;
    pub const DEFAULT_OMEGA: f64 = 5.0;

    pub fn new(h: f64, omega: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sensitivity h must be finite and > 0, got {h}"
            )));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidInput(format!("offset omega must be finite, got {omega}")));
        }
        Ok(Self { h, omega })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl Default for SimilarityParams {
    fn default() -> Self {
        Self {
            h: Self::DEFAULT_H,
            omega: Self::DEFAULT_OMEGA,
        }
    }
}

/// `D = 1 - 1 / (1 + exp(-h*d + omega))`, a discount in (0, 1) that shrinks
/// as the distance `d` between two fuzzy sets grows.
pub fn distance_factor(d: f64, params: SimilarityParams) -> Result<f64> {
    if d.is_nan() || d < 0.0 {
        return Err(Error::InvalidInput(format!("distance must be non-negative, got {d}")));
    }
    // 1 - 1/(1+e^x) is the logistic function of x; evaluate it in the branch
    // that never forms a huge exponential.
    let x = params.omega - params.h * d;
    Ok(if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    })
}

/// Matching degree of two triangular sets: shape agreement
/// `1 - sum|a_j - b_j| / 3` (clipped at zero) scaled by the distance factor
/// of their representatives.
pub fn similarity(a: &TriangularFuzzySet, b: &TriangularFuzzySet, params: SimilarityParams) -> f64 {
    let diff = (a.a1 - b.a1).abs() + (a.a2 - b.a2).abs() + (a.a3 - b.a3).abs();
    let shape = (1.0 - diff / 3.0).max(0.0);
    if shape == 0.0 {
        return 0.0;
    }
    let d = (a.representative() - b.representative()).abs();
    let factor = distance_factor(d, params).expect("distance of finite sets is finite and >= 0");
    (shape * factor).clamp(0.0, 1.0)
}

/// Rule firing degree: the min t-norm over per-dimension matching degrees.
pub fn firing_degree(per_dim_similarities: &[f64]) -> Result<f64> {
    let (first, rest) = per_dim_similarities
        .split_first()
        .ok_or_else(|| Error::InvalidInput("firing degree of zero dimensions".into()))?;
    Ok(rest.iter().fold(*first, |acc, &s| acc.min(s)))
}

/// Firing-weighted average of the rule consequents.
///
/// Fails with [`Error::ZeroFiring`] when no rule fires at all; callers decide
/// on a fallback.
pub fn aggregate(firings: &[f64], consequents: &[f64]) -> Result<f64> {
    if firings.len() != consequents.len() {
        return Err(Error::InvalidInput(format!(
            "{} firing degrees for {} consequents",
            firings.len(),
            consequents.len()
        )));
    }
    if firings.is_empty() {
        return Err(Error::InvalidInput("aggregate over zero rules".into()));
    }
    if let Some(bad) = firings.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidInput(format!("invalid firing degree {bad}")));
    }
    let total: f64 = firings.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroFiring);
    }
    let weighted: f64 = firings.iter().zip(consequents).map(|(t, g)| t * g).sum();
    let (lo, hi) = consequents
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| {
            (lo.min(g), hi.max(g))
        });
    // rounding in the two sums can leave the quotient an ulp outside the hull
    Ok((weighted / total).clamp(lo, hi))
}
