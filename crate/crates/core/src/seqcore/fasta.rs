use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{FamilyCollection, RnaSequence};
use crate::error::{Error, Result};

/// Parses FASTA text into sequences of the given family.
///
/// The id is the first whitespace-delimited token of the header; wrapped
/// sequence lines are joined.
pub fn parse_fasta(text: &str, family: &str) -> Result<Vec<RnaSequence>> {
    let mut records = Vec::new();
    let mut current: Option<(String, String)> = None;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if let Some(header) = line.strip_prefix('>') {
            if let Some((id, body)) = current.take() {
                records.push(RnaSequence::new(id, family, body)?);
            }
            let id = header
                .split_whitespace()
                .next()
                .ok_or_else(|| Error::Fasta(format!("line {}: empty header", lineno + 1)))?;
            current = Some((id.to_owned(), String::new()));
        } else if let Some((_, body)) = current.as_mut() {
            body.push_str(line.trim());
        } else if !line.trim().is_empty() {
            return Err(Error::Fasta(format!(
                "line {}: sequence data before the first header",
                lineno + 1
            )));
        }
    }
    if let Some((id, body)) = current {
        records.push(RnaSequence::new(id, family, body)?);
    }
    Ok(records)
}

/// Serializes sequences as FASTA with 60-column wrapping.
pub fn write_fasta<'a>(seqs: impl IntoIterator<Item = &'a RnaSequence>) -> String {
    let mut out = String::new();
    for s in seqs {
        let _ = writeln!(out, ">{}", s.id());
        for chunk in s.residues().as_bytes().chunks(60) {
            // residues are ASCII
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
    }
    out
}

/// Loads every `<family>.fasta` file in `path`, one family per file, in
/// lexicographic file order.
pub fn load_family_dir(path: &Path) -> Result<FamilyCollection> {
    let entries = fs::read_dir(path).map_err(|e| Error::io(path, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(path, e))?;
        let p = entry.path();
        if p.is_file() && p.extension().is_some_and(|ext| ext == "fasta") {
            files.push(p);
        }
    }
    files.sort();

    let mut collection = FamilyCollection::new();
    for file in files {
        let accession = file
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidAccession(file.display().to_string()))?
            .to_owned();
        let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        let members = parse_fasta(&text, &accession)?;
        collection.insert_family(accession, members)?;
    }
    Ok(collection)
}
