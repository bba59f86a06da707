//! Partition function and base-pairing probabilities under a multiplicative
//! pair-weight model.
//!
//! Every secondary structure (a pseudoknot-free matching in which each pair
//! encloses at least `theta` unpaired residues) has Boltzmann weight equal
//! to the product of its pair weights. The inside/outside recursions in
//! [`partition_function`] and [`base_pair_probabilities`] run in O(n³)
//! time and O(n²) memory. [`enumerate_structures`] and [`oracle_bppm`]
//! list the ensemble explicitly and are only meant for checking the DP on
//! short inputs.

mod enumerate;
mod mccaskill;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::RnaSequence;

pub use enumerate::{enumerate_structures, oracle_bppm, MAX_ENUMERATION_LEN};
pub use mccaskill::{base_pair_probabilities, partition_function, PartitionFunction};

/// Parameters of the pair-weight energy model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldParams {
    /// Minimum number of unpaired residues enclosed by a pair.
    pub theta: usize,
    pub w_gc: f64,
    pub w_au: f64,
    pub w_gu: f64,
}

impl Default for FoldParams {
    fn default() -> Self {
        Self {
            theta: 3,
            w_gc: 3.0,
            w_au: 2.0,
            w_gu: 1.0,
        }
    }
}

impl FoldParams {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("w_gc", self.w_gc),
            ("w_au", self.w_au),
            ("w_gu", self.w_gu),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Weight of pairing residue `a` with `b`; zero for non-canonical pairs.
    #[inline]
    pub fn pair_weight(&self, a: u8, b: u8) -> f64 {
        match (a, b) {
            (b'G', b'C') | (b'C', b'G') => self.w_gc,
            (b'A', b'U') | (b'U', b'A') => self.w_au,
            (b'G', b'U') | (b'U', b'G') => self.w_gu,
            _ => 0.0,
        }
    }

    /// Whether 1-based positions `i < j` are far enough apart to pair.
    #[inline]
    pub fn loop_allows(&self, i: usize, j: usize) -> bool {
        j > i && j - i > self.theta
    }
}

/// Set of 1-based base pairs `(i, j)` with `i < j`, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SecondaryStructure {
    pairs: Vec<(usize, usize)>,
}

impl SecondaryStructure {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i, j)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks matching, nesting, loop size and pair canonicity against `seq`.
    pub fn validate(&self, seq: &RnaSequence, params: &FoldParams) -> Result<()> {
        let n = seq.len();
        let bytes = seq.bytes();
        let mut partner = vec![0usize; n + 1];
        for &(i, j) in &self.pairs {
            if i == 0 || j > n || i >= j {
                return Err(Error::InvalidStructure(format!(
                    "pair ({i},{j}) out of range"
                )));
            }
            if partner[i] != 0 || partner[j] != 0 {
                return Err(Error::InvalidStructure(format!(
                    "pair ({i},{j}) reuses a paired residue"
                )));
            }
            partner[i] = j;
            partner[j] = i;
            if !params.loop_allows(i, j) {
                return Err(Error::InvalidStructure(format!(
                    "pair ({i},{j}) encloses fewer than {} residues",
                    params.theta
                )));
            }
            if params.pair_weight(bytes[i - 1], bytes[j - 1]) == 0.0 {
                return Err(Error::InvalidStructure(format!(
                    "pair ({i},{j}) is non-canonical ({}-{})",
                    bytes[i - 1] as char,
                    bytes[j - 1] as char
                )));
            }
        }
        // pseudoknot check: scanning left to right, closing positions must
        // match the most recent open pair
        let mut stack = Vec::new();
        for (pos, &p) in partner.iter().enumerate().skip(1) {
            if p == 0 {
                continue;
            }
            if p > pos {
                stack.push(pos);
            } else if stack.pop() != Some(p) {
                return Err(Error::InvalidStructure(format!(
                    "pair ({p},{pos}) crosses another pair"
                )));
            }
        }
        Ok(())
    }

    /// Dot-bracket rendering for a sequence of length `n`.
    pub fn dot_bracket(&self, n: usize) -> String {
        let mut s = vec![b'.'; n];
        for &(i, j) in &self.pairs {
            s[i - 1] = b'(';
            s[j - 1] = b')';
        }
        String::from_utf8(s).unwrap()
    }
}

impl fmt::Display for SecondaryStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, j)) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({i},{j})")?;
        }
        f.write_str("}")
    }
}

/// Product of pair weights over `s`; the empty structure weighs 1.
pub fn structure_weight(
    s: &SecondaryStructure,
    seq: &RnaSequence,
    params: &FoldParams,
) -> Result<f64> {
    s.validate(seq, params)?;
    let b = seq.bytes();
    Ok(s.pairs()
        .iter()
        .map(|&(i, j)| params.pair_weight(b[i - 1], b[j - 1]))
        .product())
}

/// Symmetric `n x n` matrix of base-pairing probabilities, addressed with
/// 1-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Bppm {
    n: usize,
    p: Vec<f64>,
}

impl Bppm {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            p: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[(i - 1) * self.n + (j - 1)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub(crate) fn set_pair(&mut self, i: usize, j: usize, v: f64) {
        self.p[(i - 1) * self.n + (j - 1)] = v;
        self.p[(j - 1) * self.n + (i - 1)] = v;
    }

    /// Row-major view, 0-based.
    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.p[(i - 1) * self.n..i * self.n].iter().sum()
    }

    /// Nonzero cells of the strict upper triangle as `(i, j, p)`.
    pub fn upper_cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.n).flat_map(move |i| {
            (i + 1..=self.n).filter_map(move |j| {
                let v = self.get(i, j);
                (v != 0.0).then_some((i, j, v))
            })
        })
    }

    pub fn max_abs_diff(&self, other: &Bppm) -> f64 {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rna(s: &str) -> RnaSequence {
        RnaSequence::new("t", "F", s).unwrap()
    }

    #[test]
    fn empty_structure_weighs_one() {
        let w = structure_weight(
            &SecondaryStructure::empty(),
            &rna("GCAAAGC"),
            &FoldParams::default(),
        );
        assert_eq!(w.unwrap(), 1.0);
    }

    #[test]
    fn weights_of_gc_stack() {
        let p = FoldParams::default();
        let s = rna("GCAAAGC");
        let one = SecondaryStructure::from_pairs([(1, 7)]);
        let two = SecondaryStructure::from_pairs([(1, 7), (2, 6)]);
        assert_eq!(structure_weight(&one, &s, &p).unwrap(), 3.0);
        assert_eq!(structure_weight(&two, &s, &p).unwrap(), 9.0);
    }

    #[test]
    fn invalid_structures_rejected() {
        let p = FoldParams::default();
        let s = rna("GCAAAGCGC");
        // shared residue
        assert!(
            structure_weight(&SecondaryStructure::from_pairs([(1, 7), (1, 9)]), &s, &p).is_err()
        );
        // non-canonical G-G
        assert!(structure_weight(&SecondaryStructure::from_pairs([(1, 6)]), &s, &p).is_err());
        // hairpin too small
        assert!(
            structure_weight(&SecondaryStructure::from_pairs([(1, 4)]), &rna("GAAC"), &p).is_err()
        );
        let s = rna("GCAAAAGCAAAAG");
        let crossing = SecondaryStructure::from_pairs([(1, 8), (2, 13)]);
        let err = structure_weight(&crossing, &s, &p).unwrap_err();
        assert!(err.to_string().contains("crosses"), "{err}");
    }

    #[test]
    fn dot_bracket_rendering() {
        let s = SecondaryStructure::from_pairs([(2, 6), (1, 7)]);
        assert_eq!(s.dot_bracket(8), "((...)).");
        assert_eq!(s.to_string(), "{(1,7), (2,6)}");
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let p = FoldParams {
            w_au: 0.0,
            ..FoldParams::default()
        };
        assert!(p.validate().is_err());
    }
}
