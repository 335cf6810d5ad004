//! Run a complete experiment from a TOML configuration.
//!
//! ```bash
//! cargo run -p tskplus --example experiment
//! ```

use std::fs::File;

use tskplus::pipeline::write_csv;
use tskplus::prelude::*;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("tskplus-experiment");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let csv = dir.join("corridor.csv");
    let data = generate_synthetic(CorridorSpec {
        n_rooms: 12,
        per_room: 25,
        n_beacons: 6,
        noise_sd: 0.6,
        seed: 4,
    })?;
    write_csv(&data, "room", &mut File::create(&csv).map_err(|e| Error::io(&csv, e))?)?;

    let toml = format!(
        r#"
input_path = "{}"
label_column = "room"
unseen_labels = [4, 9]
output_dir = "{}"

[cfs]
enabled = true
top_n = 4

[similarity]
h = 5.0
omega = 5.0

[clustering]
strategy = "per-class"
k_max = 10
seed = 1
"#,
        csv.display(),
        dir.join("out").display()
    );
    let config = ExperimentConfig::from_toml(&toml)?;
    let report = run_experiment(&config)?;
    print!("{}", report.to_text());
    println!("\nartifacts in {}", config.output_dir.display());
    Ok(())
}
