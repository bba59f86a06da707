//! Pair datasets: family split, truncation, pair enumeration and sampling,
//! stitched-image emission and manifests.

mod images;
mod manifest;
mod pairs;
mod pipeline;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;
use crate::seqcore::FamilyCollection;

pub use images::{
    build_images, build_siamese_manifest, file_stem, BppmSource, FoldingSource, TsvDirSource,
};
pub use manifest::{manifest_from_jsonl, manifest_to_jsonl, read_manifest, write_manifest};
pub use pairs::{enumerate_diff_pairs_eval, enumerate_same_pairs, sample_diff_pairs_train};
pub use pipeline::{build_dataset, DatasetOptions, DatasetSummary, SplitCounts};

pub const CNN_MANIFEST: &str = "manifest.cnn.jsonl";
pub const SIAMESE_MANIFEST: &str = "manifest.siamese.jsonl";
pub const DOTPLOT_DIR: &str = "dotplots";
pub const PAIR_DIR: &str = "pairs";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Same,
    Different,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Same => "same",
            Label::Different => "different",
        }
    }
}

/// One manifest row.
///
/// CNN manifests fill `image` with the stitched pair image; Siamese
/// manifests fill `image_a`/`image_b` with the two single-RNA dot-plots.
/// Paths are relative to the dataset directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair_id: String,
    pub seq_a: String,
    pub seq_b: String,
    pub family_a: String,
    pub family_b: String,
    pub label: Label,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_b: Option<String>,
}

impl PairRecord {
    pub(crate) fn new(
        pair_id: String,
        (seq_a, family_a): (&str, &str),
        (seq_b, family_b): (&str, &str),
        split: Split,
    ) -> Self {
        let label = if family_a == family_b {
            Label::Same
        } else {
            Label::Different
        };
        Self {
            pair_id,
            seq_a: seq_a.to_owned(),
            seq_b: seq_b.to_owned(),
            family_a: family_a.to_owned(),
            family_b: family_b.to_owned(),
            label,
            split,
            image: None,
            image_a: None,
            image_b: None,
        }
    }
}

/// Family accession to split, plus the seed that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub families: BTreeMap<String, Split>,
}

impl SplitAssignment {
    pub fn from_map(families: BTreeMap<String, Split>, seed: u64) -> Self {
        Self { seed, families }
    }

    pub fn get(&self, accession: &str) -> Option<Split> {
        self.families.get(accession).copied()
    }

    pub(crate) fn require(&self, accession: &str) -> Result<Split> {
        self.get(accession)
            .ok_or_else(|| Error::UnassignedFamily(accession.to_owned()))
    }

    pub fn families_in(&self, split: Split) -> impl Iterator<Item = &str> {
        self.families
            .iter()
            .filter(move |(_, s)| **s == split)
            .map(|(k, _)| k.as_str())
    }

    pub fn count(&self, split: Split) -> usize {
        self.families_in(split).count()
    }
}

/// Shuffles the accessions with the seeded generator and assigns the first
/// `floor(0.7 F)` to train, the next `floor(0.1 F)` to val and the rest to
/// test.
pub fn split_families(c: &FamilyCollection, seed: u64) -> Result<SplitAssignment> {
    let f = c.num_families();
    if f < 3 {
        return Err(Error::TooFewFamilies { needed: 3, have: f });
    }
    let mut accessions: Vec<&str> = c.accessions().collect();
    accessions.shuffle(&mut seeds::rng(seed));
    let n_train = f * 7 / 10;
    let n_val = f / 10;
    let families = accessions
        .into_iter()
        .enumerate()
        .map(|(k, acc)| {
            let split = if k < n_train {
                Split::Train
            } else if k < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
            (acc.to_owned(), split)
        })
        .collect();
    Ok(SplitAssignment { seed, families })
}

/// Reduces every family larger than `cap` to a uniformly random subset of
/// `cap` members, kept in their original order. Each family draws from its
/// own generator derived from `seed` and its accession.
pub fn truncate_families(c: &FamilyCollection, cap: usize, seed: u64) -> FamilyCollection {
    assert!(cap >= 2, "truncation cap must be at least 2");
    let families = c
        .iter()
        .map(|(acc, members)| {
            let kept = if members.len() > cap {
                let mut rng = seeds::rng(seeds::derive_seed(seed, acc));
                let mut picks = index::sample(&mut rng, members.len(), cap).into_vec();
                picks.sort_unstable();
                picks.into_iter().map(|k| members[k].clone()).collect()
            } else {
                members.to_vec()
            };
            (acc.to_owned(), kept)
        })
        .collect();
    FamilyCollection::from_map_unchecked(families)
}


#[cfg(test)]
mod tests {
    use super::test_support::collection;
    use super::*;

    #[test]
    fn split_counts_follow_floor_rule() {
        let s = split_families(&collection(&[1; 10]), 3).unwrap();
        assert_eq!(
            (
                s.count(Split::Train),
                s.count(Split::Val),
                s.count(Split::Test)
            ),
            (7, 1, 2)
        );
        let s = split_families(&collection(&[1; 168]), 3).unwrap();
        assert_eq!(
            (
                s.count(Split::Train),
                s.count(Split::Val),
                s.count(Split::Test)
            ),
            (117, 16, 35)
        );
    }

    #[test]
    fn split_is_seeded() {
        let c = collection(&[1; 20]);
        assert_eq!(
            split_families(&c, 11).unwrap(),
            split_families(&c, 11).unwrap()
        );
        assert_ne!(
            split_families(&c, 11).unwrap(),
            split_families(&c, 12).unwrap()
        );
    }

    #[test]
    fn split_needs_three_families() {
        assert!(matches!(
            split_families(&collection(&[3, 3]), 0),
            Err(Error::TooFewFamilies { needed: 3, have: 2 })
        ));
    }

    #[test]
    fn truncation_caps_large_families_only() {
        let c = collection(&[712, 2]);
        let t = truncate_families(&c, 30, 9);
        assert_eq!(t.family("F000").unwrap().len(), 30);
        assert_eq!(t.family("F001").unwrap(), c.family("F001").unwrap());
        assert_eq!(t, truncate_families(&c, 30, 9));
        assert_ne!(t, truncate_families(&c, 30, 10));
    }

    #[test]
    fn truncated_subset_is_drawn_from_the_family() {
        let c = collection(&[100]);
        let t = truncate_families(&c, 30, 1);
        let orig: Vec<_> = c.sequences().map(|s| s.id()).collect();
        let mut last = None;
        for s in t.sequences() {
            let pos = orig.iter().position(|id| *id == s.id()).unwrap();
            assert!(last.is_none_or(|l| pos > l), "order not preserved");
            last = Some(pos);
        }
    }
}
