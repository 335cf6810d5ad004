use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tskplus::cfs::CfsOptions;
use tskplus::dataset::Label;
use tskplus::inference::{predict, Prediction};
use tskplus::pipeline::{
    self, evaluate, generate_synthetic, load_csv, load_features, parse_label_list, rank_dataset, run_experiment,
    split_scenario, train_model, write_csv, CfsConfig, CorridorSpec, ExperimentConfig, LabelUniverse,
};
use tskplus::rulebase::{ConsequentStrategy, RuleBase, TrainingConfig};
use tskplus::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tskplus",
    version,
    about = "Unseen-label prediction with TSK+ fuzzy interpolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank features by mean curvature and print the selection.
    RankFeatures {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        cfs: CfsArgs,
        /// Write the ranking as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induce a rule base from the training part of a table.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        cfs: CfsArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Rule-base file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict labels for every row of a table.
    Predict {
        #[arg(long)]
        rulebase: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Optional truth column echoed next to each prediction.
        #[arg(long)]
        label_col: Option<String>,
        /// Write predictions as JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a rule base against a labelled table.
    Evaluate {
        #[arg(long)]
        rulebase: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        label_col: String,
        /// Only evaluate rows with these labels.
        #[arg(long)]
        unseen: Option<String>,
        /// Report directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Full experiment: split, train, predict and report.
    Run {
        /// TOML experiment config; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        label_col: Option<String>,
        #[arg(long)]
        feature_cols: Option<String>,
        #[arg(long)]
        unseen: Option<String>,
        #[command(flatten)]
        cfs: CfsArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corridor fingerprint table.
    Synth {
        #[arg(long, default_value_t = 10)]
        rooms: usize,
        #[arg(long, default_value_t = 30)]
        per_room: usize,
        #[arg(long, default_value_t = 5)]
        beacons: usize,
        #[arg(long, default_value_t = 0.5)]
        noise_sd: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV file to write instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    label_col: String,
    /// Comma-separated feature columns; default is every other column.
    #[arg(long)]
    feature_cols: Option<String>,
    /// Comma-separated labels held out of training (`c8,c9` or `8,9`).
    #[arg(long)]
    unseen: Option<String>,
}

#[derive(Args)]
struct CfsArgs {
    /// Keep the n features with the highest mean curvature.
    #[arg(long, conflicts_with = "cfs_epsilon")]
    cfs_top_n: Option<usize>,
    /// Keep features whose mean curvature exceeds this threshold.
    #[arg(long)]
    cfs_epsilon: Option<f64>,
    /// Score sorted panels instead of dataset order.
    #[arg(long)]
    cfs_sort: bool,
}

impl CfsArgs {
    fn any(&self) -> bool {
        self.cfs_top_n.is_some() || self.cfs_epsilon.is_some()
    }

    fn config(&self) -> CfsConfig {
        CfsConfig {
            enabled: self.any(),
            top_n: self.cfs_top_n,
            epsilon: self.cfs_epsilon,
            sort_panels: self.cfs_sort,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// per-class or global-mean
    #[arg(long)]
    strategy: Option<ConsequentStrategy>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `1..=21` or a comma-separated list.
    #[arg(long)]
    label_universe: Option<LabelUniverse>,
}

impl ModelArgs {
    fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(h) = self.h {
            config.similarity.h = h;
        }
        if let Some(omega) = self.omega {
            config.similarity.omega = omega;
        }
        if let Some(s) = self.strategy {
            config.clustering.strategy = s;
        }
        if let Some(k) = self.k_max {
            config.clustering.k_max = k;
        }
        if let Some(seed) = self.seed {
            config.clustering.seed = seed;
        }
        if let Some(u) = &self.label_universe {
            config.label_universe = Some(u.clone());
        }
    }
}

fn feature_list(cols: &Option<String>) -> Vec<String> {
    cols.as_deref()
        .map(|c| {
            c.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default()
}

fn unseen_list(unseen: &Option<String>) -> Result<Vec<Label>> {
    unseen
        .as_deref()
        .map(parse_label_list)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Internal(e.to_string())),
    }
}

fn training_dataset(data: &DataArgs) -> Result<(tskplus::dataset::Dataset, tskplus::dataset::Dataset)> {
    let full = load_csv(&data.input, &data.label_col, &feature_list(&data.feature_cols))?;
    let unseen = unseen_list(&data.unseen)?;
    let train = if unseen.is_empty() {
        full.clone()
    } else {
        split_scenario(&full, &unseen)?.0
    };
    Ok((full, train))
}

#[derive(Serialize)]
struct RowPrediction {
    row: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<Label>,
    #[serde(flatten)]
    prediction: Prediction,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RankFeatures { data, cfs, out } => {
            let (_, train) = training_dataset(&data)?;
            let options = cfs.config().options()?.unwrap_or(CfsOptions {
                sort_panels: cfs.cfs_sort,
                ..CfsOptions::default()
            });
            let ranking = rank_dataset(&train, options)?;
            print!("{}", ranking.to_table());
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&ranking).map_err(|e| Error::Internal(e.to_string()))?;
                write_or_print(Some(&path), &(json + "\n"))?;
            }
        }
        Command::Train { data, cfs, model, out } => {
            let (full, train) = training_dataset(&data)?;
            let mut config = ExperimentConfig::new(&data.input, &data.label_col, vec![], &out);
            model.apply(&mut config);
            let universe = match &config.label_universe {
                Some(u) => u.labels()?,
                None => LabelUniverse::spanning(&full)?.labels()?,
            };
            let training = TrainingConfig {
                strategy: config.clustering.strategy,
                k_max: config.clustering.k_max,
                seed: config.clustering.seed,
                params: config.similarity_params()?,
                label_universe: Some(universe),
            };
            let trained = train_model(&train, cfs.config().options()?, &training)?;
            write_or_print(Some(&out), &trained.rulebase.to_json())?;
            eprintln!(
                "{} rules over {} features written to {}",
                trained.rulebase.rules().len(),
                trained.rulebase.selected_features().len(),
                out.display()
            );
        }
        Command::Predict {
            rulebase,
            input,
            label_col,
            out,
        } => {
            let rb = load_rulebase(&rulebase)?;
            let names: Vec<String> = rb.normalization().ranges().iter().map(|r| r.name.clone()).collect();
            let rows: Vec<(Vec<f64>, Option<Label>)> = match &label_col {
                Some(l) => load_csv(&input, l, &names)?
                    .instances()
                    .iter()
                    .map(|i| (i.features.clone(), Some(i.label)))
                    .collect(),
                None => load_features(&input, &names)?.into_iter().map(|f| (f, None)).collect(),
            };
            let predictions = rows
                .iter()
                .enumerate()
                .map(|(row, (features, truth))| {
                    Ok(RowPrediction {
                        row,
                        truth: *truth,
                        prediction: predict(&rb, features)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let json = serde_json::to_string_pretty(&predictions).map_err(|e| Error::Internal(e.to_string()))?;
            write_or_print(out.as_deref(), &(json + "\n"))?;
        }
        Command::Evaluate {
            rulebase,
            input,
            label_col,
            unseen,
            out,
        } => {
            let rb = load_rulebase(&rulebase)?;
            let names: Vec<String> = rb.normalization().ranges().iter().map(|r| r.name.clone()).collect();
            let data = load_csv(&input, &label_col, &names)?;
            let unseen = unseen_list(&unseen)?;
            let test = if unseen.is_empty() {
                data
            } else {
                data.filter(|i| unseen.contains(&i.label))
            };
            let report = evaluate(&rb, &test, &unseen)?;
            fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            write_or_print(Some(&out.join(pipeline::REPORT_FILE)), &report.to_json())?;
            write_or_print(Some(&out.join(pipeline::CONFUSION_FILE)), &report.to_text())?;
            print!("{}", report.to_text());
        }
        Command::Run {
            config,
            input,
            label_col,
            feature_cols,
            unseen,
            cfs,
            model,
            out,
        } => {
            let mut config = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => {
                    let missing = |flag: &str| Error::Config(format!("--{flag} is required without --config"));
                    ExperimentConfig::new(
                        input.clone().ok_or_else(|| missing("input"))?,
                        label_col.clone().ok_or_else(|| missing("label-col"))?,
                        vec![],
                        out.clone().ok_or_else(|| missing("out"))?,
                    )
                }
            };
            if let Some(i) = input {
                config.input_path = i;
            }
            if let Some(l) = label_col {
                config.label_column = l;
            }
            if feature_cols.is_some() {
                config.feature_columns = feature_list(&feature_cols);
            }
            if unseen.is_some() {
                config.unseen_labels = unseen_list(&unseen)?;
            }
            if cfs.any() {
                config.cfs = cfs.config();
            } else if cfs.cfs_sort {
                config.cfs.sort_panels = true;
            }
            model.apply(&mut config);
            if let Some(o) = out {
                config.output_dir = o;
            }
            let report = run_experiment(&config)?;
            print!("{}", report.to_text());
        }
        Command::Synth {
            rooms,
            per_room,
            beacons,
            noise_sd,
            seed,
            out,
        } => {
            let data = generate_synthetic(CorridorSpec {
                n_rooms: rooms,
                per_room,
                n_beacons: beacons,
                noise_sd,
                seed,
            })?;
            let mut buf = Vec::new();
            write_csv(&data, "room", &mut buf)?;
            write_or_print(out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
        }
    }
    Ok(())
}

fn load_rulebase(path: &Path) -> Result<RuleBase> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    RuleBase::from_json(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
