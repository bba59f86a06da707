use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datasetgen::{Label, PairRecord, Split};
use crate::error::{Error, Result};
use crate::seeds;

/// Per-batch class composition: `r:1` different-to-same, or uniform draws
/// from the whole training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Ratio {
    DiffToSame(u32),
    None,
}

impl Ratio {
    /// `(different, same)` counts for a batch, if the size divides evenly.
    pub fn split_batch(self, batch_size: usize) -> Result<Option<(usize, usize)>> {
        match self {
            Ratio::None => Ok(None),
            Ratio::DiffToSame(r) => {
                let parts = r as usize + 1;
                if !batch_size.is_multiple_of(parts) {
                    return Err(Error::IndivisibleBatch { batch_size, parts });
                }
                let same = batch_size / parts;
                Ok(Some((batch_size - same, same)))
            }
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::DiffToSame(r) => write!(f, "{r}:1"),
            Ratio::None => f.write_str("none"),
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Ok(Ratio::None);
        }
        let bad = || Error::InvalidRatio(s.to_owned());
        let (r, one) = s.split_once(':').ok_or_else(bad)?;
        let r: u32 = r.trim().parse().map_err(|_| bad())?;
        if one.trim() != "1" || r == 0 {
            return Err(bad());
        }
        Ok(Ratio::DiffToSame(r))
    }
}

impl TryFrom<String> for Ratio {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Ratio> for String {
    fn from(r: Ratio) -> String {
        r.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub different: Vec<String>,
    pub same: Vec<String>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.different.len() + self.same.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchPlan {
    pub iterations: usize,
    pub batch_size: usize,
    pub ratio: Ratio,
    pub seed: u64,
    pub batches: Vec<Batch>,
}

// k draws from 0..n: distinct when the population allows, otherwise with
// replacement.
fn draw(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    if k <= n {
        index::sample(rng, n, k).into_vec()
    } else {
        (0..k).map(|_| rng.gen_range(0..n)).collect()
    }
}

/// Plans `iterations` training batches from the train-split rows of a
/// manifest. Every batch has the exact composition the ratio demands.
pub fn make_batch_plan(
    manifest: &[PairRecord],
    ratio: Ratio,
    batch_size: usize,
    iterations: usize,
    seed: u64,
) -> Result<BatchPlan> {
    let train: Vec<&PairRecord> = manifest
        .iter()
        .filter(|r| r.split == Split::Train)
        .collect();
    let (diff, same): (Vec<&PairRecord>, Vec<&PairRecord>) =
        train.iter().partition(|r| r.label == Label::Different);
    let composition = ratio.split_batch(batch_size)?;
    let mut rng = seeds::rng(seed);

    let mut batches = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let batch = match composition {
            Some((n_diff, n_same)) => {
                if n_diff > 0 && diff.is_empty() {
                    return Err(Error::EmptyClass("different"));
                }
                if n_same > 0 && same.is_empty() {
                    return Err(Error::EmptyClass("same"));
                }
                let pick = |rng: &mut ChaCha8Rng, pool: &[&PairRecord], k: usize| -> Vec<String> {
                    draw(rng, pool.len(), k)
                        .into_iter()
                        .map(|i| pool[i].pair_id.clone())
                        .collect()
                };
                Batch {
                    different: pick(&mut rng, &diff, n_diff),
                    same: pick(&mut rng, &same, n_same),
                }
            }
            None => {
                if batch_size > 0 && train.is_empty() {
                    return Err(Error::EmptyClass("train"));
                }
                let mut b = Batch {
                    different: Vec::new(),
                    same: Vec::new(),
                };
                for i in draw(&mut rng, train.len(), batch_size) {
                    let r = train[i];
                    match r.label {
                        Label::Different => b.different.push(r.pair_id.clone()),
                        Label::Same => b.same.push(r.pair_id.clone()),
                    }
                }
                b
            }
        };
        batches.push(batch);
    }
    Ok(BatchPlan {
        iterations,
        batch_size,
        ratio,
        seed,
        batches,
    })
}
