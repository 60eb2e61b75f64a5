//! Weighted partitional clustering on the reconstructed space and the baselines.

mod kmeans;
mod prototypes;
mod run;
mod space;
mod weights;

pub use kmeans::one_hot_encode;
pub use prototypes::{reseed_empty, update_prototypes, Prototypes};
pub use run::{
    initial_objects, run_baseline, run_harr_m, run_harr_v, run_variant, ObjectiveTrace, PreparedData, RunConfig,
    RunReport, ScorePair, Timings, TraceEntry, TraceKind, Variant,
};
pub use space::{assign, objective, weighted_distance, FeatureGroup, FeatureSpace, GroupKind, Partition, Weights};
pub use weights::{update_weight_matrix, update_weight_vector, DEFAULT_EPSILON};
