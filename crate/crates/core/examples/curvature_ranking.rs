//! Score features by Menger curvature and keep the most informative ones.
//!
//! ```bash
//! cargo run -p tskplus --example curvature_ranking
//! ```

use tskplus::prelude::*;

fn main() -> Result<()> {
    let p = Point2D::new(0.0, 0.0);
    let q = Point2D::new(1.0, 1.0);
    let r = Point2D::new(2.0, 0.0);
    println!("curvature of (0,0) (1,1) (2,0): {}", menger_curvature(p, q, r));
    println!(
        "curvature of a straight line: {}",
        feature_curvature(&[1.0, 2.0, 3.0, 4.0])?
    );

    let data = generate_synthetic(CorridorSpec {
        n_rooms: 8,
        per_room: 20,
        n_beacons: 6,
        noise_sd: 0.8,
        seed: 1,
    })?;
    let normalized = fit_normalization(&data)?;
    let ranking = rank_features(&normalized, SelectionRule::TopN(3))?;
    println!("\n{}", ranking.to_table());

    let reduced = normalized.project(&ranking.selected_indices())?;
    println!("kept features: {:?}", reduced.feature_names());
    Ok(())
}
