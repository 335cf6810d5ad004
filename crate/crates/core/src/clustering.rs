//! Seeded k-means and elbow-based choice of the cluster count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 300;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Within-cluster sum of squared Euclidean distances.
pub fn wcss(points: &[Vec<f64>], assignment: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| squared_distance(p, &centroids[c]))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub wcss: f64,
    pub iterations: usize,
    /// WCSS after each assignment step.
    pub wcss_trace: Vec<f64>,
}

impl KMeansFit {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Member indices of every cluster, in point order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k()];
        for (i, &c) in self.assignment.iter().enumerate() {
            members[c].push(i);
        }
        members
    }
}

fn validate_points(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points.first().map_or(0, Vec::len);
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidInput("points have mixed dimensionality".into()));
    }
    Ok(dim)
}

/// k-means++ seeding: first centre uniform, then each next centre drawn with
/// probability proportional to its squared distance from the nearest centre.
fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut nearest: Vec<f64> = points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            // rounding can leave acc just short of target
            chosen.unwrap_or_else(|| nearest.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            rng.random_range(0..points.len())
        };
        let c = points[next].clone();
        for (n, p) in nearest.iter_mut().zip(points) {
            *n = n.min(squared_distance(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn nearest_centroid(p: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(p, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

/// Lloyd's algorithm with k-means++ seeding drawn from `seed`.
///
/// Stops when assignments no longer change or after [`MAX_ITERATIONS`].
/// A cluster that loses all members is re-seeded at the point farthest from
/// its current centroid.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansFit> {
    if k == 0 || k > points.len() {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..={}", points.len())));
    }
    let dim = validate_points(points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest_centroid(p, &centroids)).collect();
    let mut wcss_trace = vec![wcss(points, &assignment, &centroids)];
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut taken = vec![false; points.len()];
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                let far = points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !taken[*i])
                    .map(|(i, p)| (i, squared_distance(p, &centroids[assignment[i]])))
                    .fold(
                        (0, f64::NEG_INFINITY),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    )
                    .0;
                taken[far] = true;
                centroids[c] = points[far].clone();
            }
        }

        let next: Vec<usize> = points.iter().map(|p| nearest_centroid(p, &centroids)).collect();
        let changed = next != assignment;
        assignment = next;
        wcss_trace.push(wcss(points, &assignment, &centroids));
        if !changed {
            break;
        }
    }

    Ok(KMeansFit {
        wcss: *wcss_trace.last().unwrap(),
        assignment,
        centroids,
        iterations,
        wcss_trace,
    })
}

/// Index (0-based into `curve`) of the point farthest from the chord joining
/// the first and last points of `(k, wcss_k)`, `k = 1..=curve.len()`.
/// Ties go to the smaller `k`.
pub fn knee_index(curve: &[f64]) -> usize {
    let n = curve.len();
    if n < 3 {
        return 0;
    }
    let (x0, y0) = (1.0, curve[0]);
    let (x1, y1) = (n as f64, curve[n - 1]);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let norm = dx.hypot(dy);
    let mut best = 0;
    let mut best_d = 0.0;
    for (i, &y) in curve.iter().enumerate() {
        let x = (i + 1) as f64;
        let d = (dy * (x - x0) - dx * (y - y0)).abs() / norm;
        if d > best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// WCSS for every `k` in `1..=k_max`, each run seeded with `seed`.
pub fn wcss_curve(points: &[Vec<f64>], k_max: usize, seed: u64) -> Result<Vec<f64>> {
    (1..=k_max).map(|k| kmeans(points, k, seed).map(|f| f.wcss)).collect()
}

/// Elbow choice of `k` over `1..=k_max` (clamped to the point count).
pub fn elbow_k(points: &[Vec<f64>], k_max: usize, seed: u64) -> Result<usize> {
    if points.len() < 2 {
        return Ok(1);
    }
    if k_max < 2 {
        return Err(Error::InvalidInput(format!("k_max must be at least 2, got {k_max}")));
    }
    let curve = wcss_curve(points, k_max.min(points.len()), seed)?;
    Ok(knee_index(&curve) + 1)
}
