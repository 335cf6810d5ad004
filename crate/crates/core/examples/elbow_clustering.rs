//! Choose the number of clusters with the elbow rule, then fit k-means.
//!
//! ```bash
//! cargo run -p tskplus --example elbow_clustering
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tskplus::clustering::wcss_curve;
use tskplus::prelude::*;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.6).unwrap();
    let centers = [(0.0, 0.0), (8.0, 1.0), (4.0, 7.0)];
    let points: Vec<Vec<f64>> = centers
        .iter()
        .flat_map(|&(x, y)| {
            (0..40)
                .map(|_| vec![x + noise.sample(&mut rng), y + noise.sample(&mut rng)])
                .collect::<Vec<_>>()
        })
        .collect();

    let seed = 3;
    for (k, w) in wcss_curve(&points, 8, seed)?.iter().enumerate() {
        println!("k = {}  wcss = {w:10.3}", k + 1);
    }
    let k = elbow_k(&points, 8, seed)?;
    let fit = kmeans(&points, k, seed)?;
    println!("\nelbow at k = {k}, converged after {} iterations", fit.iterations);
    for (c, members) in fit.centroids.iter().zip(fit.members()) {
        println!("  centroid ({:6.3}, {:6.3}) with {} points", c[0], c[1], members.len());
    }
    Ok(())
}
