//! Run configuration shared by every pipeline stage.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::datasetgen::DatasetOptions;
use crate::evalkit::Ratio;
use crate::thermo::FoldParams;

/// Flat key/value run configuration; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input_dir: PathBuf,
    pub out_dir: PathBuf,
    pub min_len: usize,
    pub max_len: usize,
    pub theta: usize,
    pub w_gc: f64,
    pub w_au: f64,
    pub w_gu: f64,
    pub seed: u64,
    pub split_seed: Option<u64>,
    pub cap: usize,
    pub diff_repeats: usize,
    pub side: usize,
    pub ratio: Ratio,
    pub batch_size: usize,
    pub iterations: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fold = FoldParams::default();
        Self {
            input_dir: PathBuf::from("families"),
            out_dir: PathBuf::from("out"),
            min_len: 200,
            max_len: 260,
            theta: fold.theta,
            w_gc: fold.w_gc,
            w_au: fold.w_au,
            w_gu: fold.w_gu,
            seed: 0,
            split_seed: None,
            cap: 30,
            diff_repeats: 20,
            side: crate::dotplot::DEFAULT_SIDE,
            ratio: Ratio::DiffToSame(4),
            batch_size: 320,
            iterations: 600,
        }
    }
}

impl RunConfig {
    pub fn fold_params(&self) -> FoldParams {
        FoldParams {
            theta: self.theta,
            w_gc: self.w_gc,
            w_au: self.w_au,
            w_gu: self.w_gu,
        }
    }

    pub fn dataset_options(&self) -> DatasetOptions {
        DatasetOptions {
            seed: self.seed,
            split_seed: self.split_seed,
            cap: self.cap,
            diff_repeats: self.diff_repeats,
            side: self.side,
        }
    }
}
