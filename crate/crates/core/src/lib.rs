//! Unseen-label prediction with TSK+ fuzzy interpolation.
//!
//! A sparse Takagi–Sugeno–Kang rule base is induced from labelled
//! fingerprints (min-max normalization, optional curvature-based feature
//! selection, elbow-selected k-means per class) and queried with TSK+
//! inference, which still yields an output when an observation overlaps no
//! rule. Because the output is a firing-weighted average of ordinal labels,
//! it can land on a label that never appeared in training.
//!
//! ```
//! use tskplus::prelude::*;
//!
//! let data = generate_synthetic(CorridorSpec {
//!     n_rooms: 6,
//!     per_room: 10,
//!     n_beacons: 3,
//!     noise_sd: 0.3,
//!     seed: 7,
//! })?;
//! let (train, test) = split_scenario(&data, &[3])?;
//! let config = TrainingConfig {
//!     label_universe: Some((1..=6).collect()),
//!     ..Default::default()
//! };
//! let model = train_model(&train, None, &config)?;
//! let batch = predict_batch(&model.rulebase, &test)?;
//! assert_eq!(batch.total, 10);
//! # Ok::<(), tskplus::Error>(())
//! ```

pub mod cfs;
pub mod clustering;
pub mod dataset;
mod error;
pub mod fuzzy;
pub mod inference;
pub mod pipeline;
pub mod rulebase;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::cfs::{
        feature_curvature, menger_curvature, rank_features, rank_features_with, CfsOptions, FeatureRanking, Point2D,
        SelectionRule,
    };
    pub use crate::clustering::{elbow_k, kmeans, wcss, KMeansFit};
    pub use crate::dataset::{fit_normalization, Dataset, Instance, Label, Normalization};
    pub use crate::fuzzy::{
        aggregate, distance_factor, firing_degree, similarity, SimilarityParams, TriangularFuzzySet,
    };
    pub use crate::inference::{explain, predict, predict_batch, predict_fuzzy, BatchPrediction, Prediction};
    pub use crate::pipeline::{
        execute, generate_synthetic, load_csv, run_experiment, split_scenario, train_model, CorridorSpec,
        ExperimentConfig, PredictionReport,
    };
    pub use crate::rulebase::{extract_rules, ConsequentStrategy, Rule, RuleBase, TrainingConfig};
    pub use crate::{Error, Result};
}
