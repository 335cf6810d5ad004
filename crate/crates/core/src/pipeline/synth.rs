//! Synthetic corridor fingerprints.
//!
//! Rooms sit at positions `1..=n_rooms` on a line and beacons are spread
//! evenly over the same span. Each reading follows a log-distance path-loss
//! model `-10 log10(max(|x - p|, 0.1))` plus Gaussian noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{Dataset, Instance, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorSpec {
    pub n_rooms: usize,
    pub per_room: usize,
    pub n_beacons: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

impl CorridorSpec {
    pub fn beacon_positions(&self) -> Vec<f64> {
        let span = (self.n_rooms - 1) as f64;
        (0..self.n_beacons)
            .map(|b| 1.0 + span * b as f64 / (self.n_beacons - 1) as f64)
            .collect()
    }
}

/// Noise-free reading of a beacon at `beacon` from position `x`.
pub fn path_loss(x: f64, beacon: f64) -> f64 {
    -10.0 * (x - beacon).abs().max(0.1).log10()
}

pub fn generate_synthetic(spec: CorridorSpec) -> Result<Dataset> {
    if spec.n_rooms < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 rooms, got {}",
            spec.n_rooms
        )));
    }
    if spec.n_beacons < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 beacons, got {}",
            spec.n_beacons
        )));
    }
    if spec.per_room == 0 {
        return Err(Error::InvalidInput("need at least 1 sample per room".into()));
    }
    if !(spec.noise_sd.is_finite() && spec.noise_sd >= 0.0) {
        return Err(Error::InvalidInput(format!("invalid noise sd {}", spec.noise_sd)));
    }
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let beacons = spec.beacon_positions();

    let mut instances = Vec::with_capacity(spec.n_rooms * spec.per_room);
    for room in 1..=spec.n_rooms {
        let x = room as f64;
        for _ in 0..spec.per_room {
            let features = beacons
                .iter()
                .map(|&p| path_loss(x, p) + noise.sample(&mut rng))
                .collect();
            instances.push(Instance::new(features, room as Label));
        }
    }
    let names = (1..=spec.n_beacons).map(|b| format!("beacon{b}")).collect();
    Dataset::new(names, instances)
}
