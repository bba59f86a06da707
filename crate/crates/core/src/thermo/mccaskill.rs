use super::{Bppm, FoldParams};
use crate::error::{Error, Result};
use crate::seqcore::RnaSequence;

/// Inside tables of one fold.
///
/// `q(i, j)` is the partition function of the subsequence `i..=j`
/// (1 when `j = i - 1`); `qb(i, j)` the part of it where `i` pairs with `j`.
#[derive(Debug, Clone)]
pub struct PartitionFunction {
    n: usize,
    stride: usize,
    // q[i * stride + j], i in 1..=n+1, j in 0..=n
    q: Vec<f64>,
    // qb stored column-major: qb_t[j * stride + i]
    qb_t: Vec<f64>,
    // pair weights by 1-based (i, j), row-major, zero where disallowed
    weight: Vec<f64>,
}

impl PartitionFunction {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The full-sequence partition function Z.
    pub fn z(&self) -> f64 {
        self.q(1, self.n)
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.stride + j]
    }

    #[inline]
    pub fn qb(&self, i: usize, j: usize) -> f64 {
        self.qb_t[j * self.stride + i]
    }
}

/// Computes the inside tables by the recursion
/// `q(i,j) = q(i,j-1) + sum_k q(i,k-1) * qb(k,j)` with
/// `qb(k,j) = w(k,j) * q(k+1,j-1)`.
pub fn partition_function(seq: &RnaSequence, params: &FoldParams) -> Result<PartitionFunction> {
    params.validate()?;
    let n = seq.len();
    let stride = n + 2;
    let bytes = seq.bytes();

    let mut weight = vec![0.0; stride * stride];
    for i in 1..=n {
        for j in i + 1..=n {
            if params.loop_allows(i, j) {
                weight[i * stride + j] = params.pair_weight(bytes[i - 1], bytes[j - 1]);
            }
        }
    }

    let mut q = vec![0.0; stride * stride];
    let mut qb_t = vec![0.0; stride * stride];
    for i in 1..=n + 1 {
        q[i * stride + i - 1] = 1.0;
    }

    for span in 1..=n {
        for i in 1..=n + 1 - span {
            let j = i + span - 1;
            let w = weight[i * stride + j];
            if w > 0.0 {
                qb_t[j * stride + i] = w * q[(i + 1) * stride + j - 1];
            }
            let mut acc = q[i * stride + j - 1];
            if j > i + params.theta {
                let row = &q[i * stride..(i + 1) * stride];
                let col = &qb_t[j * stride..(j + 1) * stride];
                for k in i..j - params.theta {
                    acc += row[k - 1] * col[k];
                }
            }
            q[i * stride + j] = acc;
        }
    }

    let pf = PartitionFunction {
        n,
        stride,
        q,
        qb_t,
        weight,
    };
    if !pf.z().is_finite() {
        return Err(Error::NonFinite(n));
    }
    Ok(pf)
}

/// Base-pairing probabilities from the inside tables and the matching
/// outside pass, in O(n³).
pub fn base_pair_probabilities(seq: &RnaSequence, params: &FoldParams) -> Result<Bppm> {
    let pf = partition_function(seq, params)?;
    Ok(pair_probabilities_from(&pf, params.theta))
}

fn pair_probabilities_from(pf: &PartitionFunction, theta: usize) -> Bppm {
    let n = pf.n;
    let stride = pf.stride;
    let mut bppm = Bppm::zeros(n);
    if n == 0 {
        return bppm;
    }

    // outside values for q (row-major) and qb (column-major, like qb_t)
    let mut q_out = vec![0.0; stride * stride];
    let mut qb_out_t = vec![0.0; stride * stride];
    q_out[stride + n] = 1.0;

    for span in (1..=n).rev() {
        for i in 1..=n + 1 - span {
            let j = i + span - 1;
            let o = q_out[i * stride + j];
            if o == 0.0 {
                continue;
            }
            // j unpaired
            if span > 1 {
                q_out[i * stride + j - 1] += o;
            }
            // j paired with k
            if j > i + theta {
                let q_row = &pf.q[i * stride..(i + 1) * stride];
                let qb_col = &pf.qb_t[j * stride..(j + 1) * stride];
                for k in i..j - theta {
                    let qb = qb_col[k];
                    if qb == 0.0 {
                        continue;
                    }
                    if k > i {
                        q_out[i * stride + k - 1] += o * qb;
                    }
                    qb_out_t[j * stride + k] += o * q_row[k - 1];
                }
            }
        }
        for i in 1..=n + 1 - span {
            let j = i + span - 1;
            let ob = qb_out_t[j * stride + i];
            if ob == 0.0 {
                continue;
            }
            if span > 2 {
                q_out[(i + 1) * stride + j - 1] += ob * pf.weight[i * stride + j];
            }
        }
    }

    let z = pf.z();
    for i in 1..=n {
        for j in i + 1..=n {
            let inside = pf.qb(i, j);
            if inside > 0.0 {
                bppm.set_pair(i, j, inside * qb_out_t[j * stride + i] / z);
            }
        }
    }
    bppm
}
