//! Hold one room of a synthetic corridor out of training and predict it.
//!
//! ```bash
//! cargo run -p tskplus --example unseen_room
//! ```

use tskplus::prelude::*;

fn main() -> Result<()> {
    let corridor = CorridorSpec {
        n_rooms: 10,
        per_room: 30,
        n_beacons: 5,
        noise_sd: 0.5,
        seed: 42,
    };
    let data = generate_synthetic(corridor)?;
    let unseen = 5;
    let (train, test) = split_scenario(&data, &[unseen])?;

    let config = TrainingConfig {
        label_universe: Some((1..=10).collect()),
        seed: 42,
        ..Default::default()
    };
    let model = train_model(&train, None, &config)?;
    println!(
        "{} rules from {} training fingerprints (room {unseen} never seen)",
        model.rulebase.rules().len(),
        train.len()
    );

    let batch = predict_batch(&model.rulebase, &test)?;
    let mut histogram = std::collections::BTreeMap::new();
    for p in &batch.per_instance {
        *histogram.entry(p.prediction.label).or_insert(0) += 1;
    }
    println!("predicted labels for room {unseen}: {histogram:?}");
    let near = batch
        .per_instance
        .iter()
        .filter(|p| (p.prediction.label - p.truth).abs() <= 1)
        .count();
    println!(
        "exact: {}/{}  within one room: {near}/{}",
        batch.correct, batch.total, batch.total
    );
    Ok(())
}
