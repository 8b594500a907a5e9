//! Journal influence scoring from bibliometric indicator tables: ingestion,
//! least squares with significance tests, downselection of features,
//! influence scores and two-means classification.

pub mod cluster;
pub mod dsrs;
pub mod ingest;
pub mod model_file;
pub mod numerics;
pub mod regression;
pub mod scoring;

pub use cluster::{classify, influence_threshold, kmeans2, ClusterResult, Label};
pub use dsrs::{run_pipeline, DsrsModel, Thresholds};
pub use ingest::{build_matrix, parse_table, Dataset, FeatureMatrix, JournalRecord};
pub use model_file::ModelFile;
pub use regression::{fit_mlr, FitReport};
pub use scoring::{jis_published, quartile_match, rank_error_stats};
