use std::collections::HashMap;

use rand::Rng;

use super::{PairRecord, Split, SplitAssignment};
use crate::error::{Error, Result};
use crate::seeds;
use crate::seqcore::FamilyCollection;

fn id_tag(split: Split, same: bool, ordered: bool, k: usize) -> String {
    let class = if same { "same" } else { "diff" };
    let u = if ordered { "" } else { "u" };
    format!("{split}-{class}-{u}{k:06}")
}

/// All within-family pairs `(a, b)` with `a != b`: `n(n-1)` per family when
/// `ordered`, `n(n-1)/2` otherwise.
pub fn enumerate_same_pairs(
    c: &FamilyCollection,
    split: &SplitAssignment,
    ordered: bool,
) -> Result<Vec<PairRecord>> {
    let mut counters: HashMap<Split, usize> = HashMap::new();
    let mut out = Vec::new();
    for (acc, members) in c.iter() {
        let s = split.require(acc)?;
        for (x, a) in members.iter().enumerate() {
            for (y, b) in members.iter().enumerate() {
                if x == y || (!ordered && y < x) {
                    continue;
                }
                let k = counters.entry(s).or_default();
                out.push(PairRecord::new(
                    id_tag(s, true, ordered, *k),
                    (a.id(), acc),
                    (b.id(), acc),
                    s,
                ));
                *k += 1;
            }
        }
    }
    Ok(out)
}

/// Different-family training pairs.
///
/// Each repeat draws one representative per training family, then for every
/// ordered pair of distinct families `(X, Y)` pairs X's representative with
/// a random member of Y. Yields `F(F-1)` records per repeat; duplicates are
/// kept.
pub fn sample_diff_pairs_train(
    c: &FamilyCollection,
    split: &SplitAssignment,
    repeats: usize,
    seed: u64,
) -> Result<Vec<PairRecord>> {
    let mut families = Vec::new();
    for (acc, members) in c.iter() {
        if split.require(acc)? == Split::Train && !members.is_empty() {
            families.push((acc, members));
        }
    }
    if families.len() < 2 {
        return Err(Error::TooFewFamilies {
            needed: 2,
            have: families.len(),
        });
    }

    let f = families.len();
    let mut rng = seeds::rng(seed);
    let mut out = Vec::with_capacity(f * (f - 1) * repeats);
    for _ in 0..repeats {
        let reps: Vec<usize> = families
            .iter()
            .map(|(_, m)| rng.gen_range(0..m.len()))
            .collect();
        for (x, (acc_x, members_x)) in families.iter().enumerate() {
            let a = &members_x[reps[x]];
            for (y, (acc_y, members_y)) in families.iter().enumerate() {
                if x == y {
                    continue;
                }
                let b = &members_y[rng.gen_range(0..members_y.len())];
                out.push(PairRecord::new(
                    id_tag(Split::Train, false, true, out.len()),
                    (a.id(), acc_x),
                    (b.id(), acc_y),
                    Split::Train,
                ));
            }
        }
    }
    Ok(out)
}

/// Every cross-family pair inside one split, both directions when `ordered`.
pub fn enumerate_diff_pairs_eval(
    c: &FamilyCollection,
    split: &SplitAssignment,
    which: Split,
    ordered: bool,
) -> Result<Vec<PairRecord>> {
    let mut families = Vec::new();
    for (acc, members) in c.iter() {
        if split.require(acc)? == which {
            families.push((acc, members));
        }
    }
    let mut out = Vec::new();
    for (x, (acc_x, members_x)) in families.iter().enumerate() {
        for (y, (acc_y, members_y)) in families.iter().enumerate() {
            if x == y || (!ordered && y < x) {
                continue;
            }
            for a in members_x.iter() {
                for b in members_y.iter() {
                    out.push(PairRecord::new(
                        id_tag(which, false, ordered, out.len()),
                        (a.id(), acc_x),
                        (b.id(), acc_y),
                        which,
                    ));
                }
            }
        }
    }
    Ok(out)
}
