use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::images::{build_images, build_siamese_manifest, BppmSource};
use super::manifest::write_atomic;
use super::pairs::{enumerate_diff_pairs_eval, enumerate_same_pairs, sample_diff_pairs_train};
use super::{split_families, truncate_families, Label, PairRecord, Split};
use crate::error::Result;
use crate::seeds;
use crate::seqcore::FamilyCollection;

pub const SPLITS_FILE: &str = "splits.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetOptions {
    /// Global seed; stage seeds are derived from it.
    pub seed: u64,
    /// Overrides the derived split seed.
    pub split_seed: Option<u64>,
    pub cap: usize,
    pub diff_repeats: usize,
    pub side: usize,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            split_seed: None,
            cap: 30,
            diff_repeats: 20,
            side: crate::dotplot::DEFAULT_SIDE,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SplitCounts {
    pub families: usize,
    pub sequences: usize,
    pub cnn_same: usize,
    pub cnn_different: usize,
    pub siamese_same: usize,
    pub siamese_different: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetSummary {
    pub train: SplitCounts,
    pub val: SplitCounts,
    pub test: SplitCounts,
}

impl DatasetSummary {
    pub fn get(&self, split: Split) -> &SplitCounts {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    fn get_mut(&mut self, split: Split) -> &mut SplitCounts {
        match split {
            Split::Train => &mut self.train,
            Split::Val => &mut self.val,
            Split::Test => &mut self.test,
        }
    }
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<6} {:>9} {:>10} {:>12} {:>12} {:>12} {:>14} {:>14}",
            "split",
            "families",
            "sequences",
            "cnn same",
            "cnn diff",
            "cnn total",
            "siamese same",
            "siamese diff"
        )?;
        for split in Split::ALL {
            let c = self.get(split);
            writeln!(
                f,
                "{:<6} {:>9} {:>10} {:>12} {:>12} {:>12} {:>14} {:>14}",
                split.as_str(),
                c.families,
                c.sequences,
                c.cnn_same,
                c.cnn_different,
                c.cnn_same + c.cnn_different,
                c.siamese_same,
                c.siamese_different
            )?;
        }
        Ok(())
    }
}

fn split_rank(r: &PairRecord) -> (Split, Label) {
    (r.split, r.label)
}

/// Split, truncate, enumerate and sample pairs, render every image and
/// write both manifests plus `splits.json` under `out_dir`.
///
/// `c` should already be length-filtered.
pub fn build_dataset(
    c: &FamilyCollection,
    opts: &DatasetOptions,
    source: &dyn BppmSource,
    out_dir: &Path,
) -> Result<DatasetSummary> {
    let split_seed = opts
        .split_seed
        .unwrap_or_else(|| seeds::derive_seed(opts.seed, seeds::SPLIT));
    let split = split_families(c, split_seed)?;
    let truncated = truncate_families(c, opts.cap, seeds::derive_seed(opts.seed, seeds::TRUNCATE));
    let diff_train = sample_diff_pairs_train(
        &truncated,
        &split,
        opts.diff_repeats,
        seeds::derive_seed(opts.seed, seeds::DIFF_TRAIN),
    )?;

    let mut cnn = enumerate_same_pairs(&truncated, &split, true)?;
    cnn.extend(diff_train.iter().cloned());
    let mut siamese = enumerate_same_pairs(&truncated, &split, false)?;
    siamese.extend(diff_train);
    for which in [Split::Val, Split::Test] {
        cnn.extend(enumerate_diff_pairs_eval(&truncated, &split, which, true)?);
        siamese.extend(enumerate_diff_pairs_eval(&truncated, &split, which, false)?);
    }
    cnn.sort_by_key(split_rank);
    siamese.sort_by_key(split_rank);

    build_images(&cnn, source, out_dir, opts.side)?;
    build_siamese_manifest(&siamese, out_dir)?;
    let splits_json = serde_json::to_vec_pretty(&split).expect("split assignment serializes");
    write_atomic(&out_dir.join(SPLITS_FILE), &splits_json)?;

    let mut summary = DatasetSummary {
        train: SplitCounts::default(),
        val: SplitCounts::default(),
        test: SplitCounts::default(),
    };
    for (acc, members) in truncated.iter() {
        let counts = summary.get_mut(split.require(acc)?);
        counts.families += 1;
        counts.sequences += members.len();
    }
    for r in &cnn {
        let counts = summary.get_mut(r.split);
        match r.label {
            Label::Same => counts.cnn_same += 1,
            Label::Different => counts.cnn_different += 1,
        }
    }
    for r in &siamese {
        let counts = summary.get_mut(r.split);
        match r.label {
            Label::Same => counts.siamese_same += 1,
            Label::Different => counts.siamese_different += 1,
        }
    }
    Ok(summary)
}
