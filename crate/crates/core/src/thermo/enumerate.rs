use super::{structure_weight, Bppm, FoldParams, SecondaryStructure};
use crate::error::{Error, Result};
use crate::seqcore::RnaSequence;

/// Longest sequence the brute-force enumerator accepts.
pub const MAX_ENUMERATION_LEN: usize = 20;

/// Lists every valid structure of `seq` (the empty one included) with its
/// weight, in lexicographic order of pair lists.
pub fn enumerate_structures(
    seq: &RnaSequence,
    params: &FoldParams,
) -> Result<Vec<(SecondaryStructure, f64)>> {
    if seq.len() > MAX_ENUMERATION_LEN {
        return Err(Error::SequenceTooLong {
            len: seq.len(),
            max: MAX_ENUMERATION_LEN,
        });
    }
    params.validate()?;
    let mut all: Vec<SecondaryStructure> = matchings(seq.bytes(), params, 1, seq.len())
        .into_iter()
        .map(SecondaryStructure::from_pairs)
        .collect();
    all.sort();
    all.into_iter()
        .map(|s| {
            let w = structure_weight(&s, seq, params)?;
            Ok((s, w))
        })
        .collect()
}

// All pseudoknot-free matchings of the 1-based interval i..=j: either i is
// unpaired, or i pairs with some k and the two sides are independent.
fn matchings(b: &[u8], params: &FoldParams, i: usize, j: usize) -> Vec<Vec<(usize, usize)>> {
    if i >= j {
        return vec![Vec::new()];
    }
    let mut out = matchings(b, params, i + 1, j);
    for k in i + 1..=j {
        if !params.loop_allows(i, k) || params.pair_weight(b[i - 1], b[k - 1]) == 0.0 {
            continue;
        }
        let inner = matchings(b, params, i + 1, k - 1);
        let outer = matchings(b, params, k + 1, j);
        for left in &inner {
            for right in &outer {
                let mut s = Vec::with_capacity(1 + left.len() + right.len());
                s.push((i, k));
                s.extend_from_slice(left);
                s.extend_from_slice(right);
                out.push(s);
            }
        }
    }
    out
}

/// Pair probabilities summed directly over the enumerated ensemble.
pub fn oracle_bppm(seq: &RnaSequence, params: &FoldParams) -> Result<Bppm> {
    let structures = enumerate_structures(seq, params)?;
    let z: f64 = structures.iter().map(|(_, w)| w).sum();
    let n = seq.len();
    let mut mass = vec![0.0; (n + 1) * (n + 1)];
    for (s, w) in &structures {
        for &(i, j) in s.pairs() {
            mass[i * (n + 1) + j] += w;
        }
    }
    let mut bppm = Bppm::zeros(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let m = mass[i * (n + 1) + j];
            if m > 0.0 {
                bppm.set_pair(i, j, m / z);
            }
        }
    }
    Ok(bppm)
}
