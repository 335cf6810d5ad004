//! Predict from an imprecise observation given as triangular sets.
//!
//! ```bash
//! cargo run -p tskplus --example fuzzy_observation
//! ```

use tskplus::prelude::*;

fn main() -> Result<()> {
    let data = generate_synthetic(CorridorSpec {
        n_rooms: 6,
        per_room: 20,
        n_beacons: 3,
        noise_sd: 0.4,
        seed: 9,
    })?;
    let (train, _) = split_scenario(&data, &[4])?;
    let model = train_model(
        &train,
        None,
        &TrainingConfig {
            label_universe: Some((1..=6).collect()),
            ..Default::default()
        },
    )?;

    // readings near room 4 that may have been attenuated by up to 3 dB
    let center = &data.instances().iter().find(|i| i.label == 4).unwrap().features;
    let observation = center
        .iter()
        .map(|&v| TriangularFuzzySet::new(v, v + 0.5, v + 3.0))
        .collect::<Result<Vec<_>>>()?;

    let crisp = predict(&model.rulebase, center)?;
    let fuzzy = predict_fuzzy(&model.rulebase, &observation)?;
    println!("crisp reading: gamma = {:.3} -> room {}", crisp.gamma, crisp.label);
    println!("fuzzy reading: gamma = {:.3} -> room {}", fuzzy.gamma, fuzzy.label);
    Ok(())
}
