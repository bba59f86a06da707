//! Base-pairing probability dot-plots for pairwise RNA family
//! classification.
//!
//! The crate folds sequences under a pair-weight partition-function model
//! ([`thermo`]), renders the resulting matrices as grayscale dot-plots and
//! stitches two of them into one pair image ([`dotplot`]), builds
//! same/different-family pair datasets with their manifests
//! ([`datasetgen`]), and scores classifier predictions ([`evalkit`]).

pub mod config;
pub mod datasetgen;
pub mod dotplot;
pub mod error;
pub mod evalkit;
pub mod seeds;
pub mod seqcore;
pub mod thermo;

pub use config::RunConfig;
pub use datasetgen::{Label, PairRecord, Split, SplitAssignment};
pub use dotplot::GrayImage;
pub use error::{Error, Result};
pub use evalkit::{ConfusionCounts, MetricsReport, PredictionRecord, Ratio};
pub use seqcore::{FamilyCollection, RnaSequence};
pub use thermo::{Bppm, FoldParams, SecondaryStructure};
