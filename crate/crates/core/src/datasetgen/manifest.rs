use std::fs;
use std::path::Path;

use super::PairRecord;
use crate::error::{Error, Result};

pub fn manifest_to_jsonl(records: &[PairRecord]) -> String {
    let mut out = String::new();
    for r in records {
        // PairRecord holds only strings and enums
        out.push_str(&serde_json::to_string(r).expect("PairRecord serializes"));
        out.push('\n');
    }
    out
}

pub fn manifest_from_jsonl(text: &str, origin: &Path) -> Result<Vec<PairRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, line)| {
            serde_json::from_str(line).map_err(|e| Error::Jsonl {
                path: origin.to_owned(),
                line: idx + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_manifest(path: &Path) -> Result<Vec<PairRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    manifest_from_jsonl(&text, path)
}

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never observes a half-written manifest.
pub fn write_manifest(path: &Path, records: &[PairRecord]) -> Result<()> {
    write_atomic(path, manifest_to_jsonl(records).as_bytes())
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
