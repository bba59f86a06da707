//! Sequences, families, FASTA ingestion and the family-archive client.

mod fasta;
mod fetch;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fasta::{load_family_dir, parse_fasta, write_fasta};
pub use fetch::{fetch_family, RetryPolicy, RFAM_URL_ENV};

/// An RNA primary structure tagged with its family accession.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnaSequence {
    id: String,
    family: String,
    residues: String,
}

impl RnaSequence {
    /// Builds a sequence after normalizing case and `T` to `U`.
    pub fn new(
        id: impl Into<String>,
        family: impl Into<String>,
        residues: impl AsRef<str>,
    ) -> Result<Self> {
        let id = id.into();
        let residues = normalize_residues(&id, residues.as_ref())?;
        Ok(Self {
            id,
            family: family.into(),
            residues,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn residues(&self) -> &str {
        &self.residues
    }

    pub fn bytes(&self) -> &[u8] {
        self.residues.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

impl fmt::Display for RnaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] {}", self.id, self.family, self.residues)
    }
}

fn normalize_residues(id: &str, raw: &str) -> Result<String> {
    if raw.is_empty() {
        return Err(Error::InvalidRecord {
            id: id.to_owned(),
            reason: "empty sequence".into(),
        });
    }
    raw.chars()
        .map(|c| match c.to_ascii_uppercase() {
            b @ ('A' | 'C' | 'G' | 'U') => Ok(b),
            'T' => Ok('U'),
            other => Err(Error::InvalidRecord {
                id: id.to_owned(),
                reason: format!("invalid residue `{other}`"),
            }),
        })
        .collect()
}

/// Families keyed by accession. Accessions iterate in lexicographic order and
/// members keep their insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamilyCollection {
    families: BTreeMap<String, Vec<RnaSequence>>,
}

impl FamilyCollection {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a family, enforcing that member families match the accession and
    /// that sequence ids stay unique across the collection.
    pub fn insert_family(
        &mut self,
        accession: impl Into<String>,
        members: Vec<RnaSequence>,
    ) -> Result<()> {
        let accession = accession.into();
        let mut seen: HashSet<&str> = self.sequences().map(|s| s.id()).collect();
        if let Some(existing) = self.families.get(&accession) {
            for s in existing {
                seen.remove(s.id());
            }
        }
        for s in &members {
            if s.family() != accession {
                return Err(Error::FamilyMismatch {
                    id: s.id().to_owned(),
                    expected: accession,
                    found: s.family().to_owned(),
                });
            }
            if !seen.insert(s.id()) {
                return Err(Error::DuplicateId(s.id().to_owned()));
            }
        }
        self.families.insert(accession, members);
        Ok(())
    }

    pub fn family(&self, accession: &str) -> Option<&[RnaSequence]> {
        self.families.get(accession).map(Vec::as_slice)
    }

    pub fn accessions(&self) -> impl Iterator<Item = &str> {
        self.families.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[RnaSequence])> {
        self.families
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// All sequences, family by family.
    pub fn sequences(&self) -> impl Iterator<Item = &RnaSequence> {
        self.families.values().flatten()
    }

    pub fn sequence(&self, id: &str) -> Option<&RnaSequence> {
        self.sequences().find(|s| s.id() == id)
    }

    pub fn num_families(&self) -> usize {
        self.families.len()
    }

    pub fn num_sequences(&self) -> usize {
        self.families.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub(crate) fn from_map_unchecked(families: BTreeMap<String, Vec<RnaSequence>>) -> Self {
        Self { families }
    }
}

/// Keeps sequences with `min <= len <= max` and drops families left empty.
pub fn filter_by_length(c: &FamilyCollection, min: usize, max: usize) -> FamilyCollection {
    assert!(min <= max, "length bounds reversed: {min} > {max}");
    let families = c
        .iter()
        .filter_map(|(acc, members)| {
            let kept: Vec<_> = members
                .iter()
                .filter(|s| (min..=max).contains(&s.len()))
                .cloned()
                .collect();
            (!kept.is_empty()).then(|| (acc.to_owned(), kept))
        })
        .collect();
    FamilyCollection::from_map_unchecked(families)
}
