//! Match triangular fuzzy sets and combine rule outputs.
//!
//! ```bash
//! cargo run -p tskplus --example fuzzy_matching
//! ```

use tskplus::prelude::*;

fn main() -> Result<()> {
    let params = SimilarityParams::default();
    let rule = TriangularFuzzySet::new(0.2, 0.4, 0.6)?;

    println!("distance factor D(d), h = {}, omega = {}", params.h(), params.omega());
    for d in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0] {
        println!("  D({d:.2}) = {:.6}", distance_factor(d, params)?);
    }

    println!("\nsimilarity of crisp observations to {:?}", rule.params());
    for x in [0.4, 0.5, 0.7, 1.0, 2.0] {
        let obs = TriangularFuzzySet::singleton(x)?;
        println!("  x = {x:.1}: S = {:.6}", similarity(&rule, &obs, params));
    }

    let theta = firing_degree(&[0.9, 0.6, 0.75])?;
    println!("\nfiring degree of a three-dimensional match: {theta}");
    let gamma = aggregate(&[0.2, 0.6], &[2.0, 10.0])?;
    println!("weighted output of rules (0.2 -> 2, 0.6 -> 10): {gamma}");
    Ok(())
}
