//! Inputs shared by the benchmarks.

use dotstitch_core::{Label, PredictionRecord, RnaSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_sequence(len: usize, seed: u64) -> RnaSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let residues: String = (0..len)
        .map(|_| b"ACGU"[rng.gen_range(0..4)] as char)
        .collect();
    RnaSequence::new(format!("bench-{len}"), "bench", residues).unwrap()
}

pub fn random_predictions(n: usize, seed: u64) -> Vec<PredictionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let label = if rng.gen_bool(0.2) {
                Label::Same
            } else {
                Label::Different
            };
            PredictionRecord::new(format!("p{k}"), rng.gen(), label)
        })
        .collect()
}
