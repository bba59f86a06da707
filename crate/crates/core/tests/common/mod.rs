#![allow(dead_code)]

use std::fs;
use std::path::Path;

use dotstitch_core::{FamilyCollection, RnaSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn complement(b: u8) -> u8 {
    match b {
        b'A' => b'U',
        b'U' => b'A',
        b'G' => b'C',
        _ => b'G',
    }
}

/// Families share nothing but length range; each has its own hairpin stem
/// (a 12-nt segment and its reverse complement) at a family-specific offset.
pub fn toy_corpus(n_families: usize, per_family: usize, seed: u64) -> FamilyCollection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = b"ACGU";
    let mut c = FamilyCollection::new();
    for f in 0..n_families {
        let fam = format!("RF{:05}", f + 1);
        let stem: Vec<u8> = (0..12).map(|_| b"GC"[rng.gen_range(0..2)]).collect();
        let offset = 10 + 17 * f;
        let members = (0..per_family)
            .map(|m| {
                let len = rng.gen_range(200..=260);
                let mut s: Vec<u8> = (0..len).map(|_| alphabet[rng.gen_range(0..4)]).collect();
                let loop_len = 6;
                let start = offset % (len - 40);
                s[start..start + 12].copy_from_slice(&stem);
                for (k, &b) in stem.iter().rev().enumerate() {
                    s[start + 12 + loop_len + k] = complement(b);
                }
                RnaSequence::new(format!("{fam}/{m}"), &fam, String::from_utf8(s).unwrap()).unwrap()
            })
            .collect();
        c.insert_family(fam, members).unwrap();
    }
    c
}

pub fn write_corpus(c: &FamilyCollection, dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    for (acc, members) in c.iter() {
        fs::write(
            dir.join(format!("{acc}.fasta")),
            dotstitch_core::seqcore::write_fasta(members),
        )
        .unwrap();
    }
}
