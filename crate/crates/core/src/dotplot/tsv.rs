use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::thermo::Bppm;

/// Reads `i<TAB>j<TAB>p` lines (1-based, `i < j`) into an `n x n` matrix.
/// Cells not listed are 0.
pub fn import_bppm_tsv(path: &Path, n: usize) -> Result<Bppm> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_bppm_tsv(&text, n, path)
}

pub fn parse_bppm_tsv(text: &str, n: usize, origin: &Path) -> Result<Bppm> {
    let err = |line: usize, message: String| Error::Tsv {
        path: origin.to_owned(),
        line,
        message,
    };
    let mut bppm = Bppm::zeros(n);
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [i, j, p] = fields[..] else {
            return Err(err(
                line,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        };
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| err(line, format!("bad index `{i}`")))?;
        let j: usize = j
            .trim()
            .parse()
            .map_err(|_| err(line, format!("bad index `{j}`")))?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| err(line, format!("bad probability `{p}`")))?;
        if !(1 <= i && i < j && j <= n) {
            return Err(err(line, format!("cell ({i},{j}) needs 1 <= i < j <= {n}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(err(line, format!("probability {p} outside [0, 1]")));
        }
        if !seen.insert((i, j)) {
            return Err(err(line, format!("duplicate cell ({i},{j})")));
        }
        bppm.set_pair(i, j, p);
    }
    Ok(bppm)
}

/// Upper-triangle nonzero cells, shortest round-trip decimal for `p`.
pub fn export_bppm_tsv(b: &Bppm) -> String {
    let mut out = String::new();
    for (i, j, p) in b.upper_cells() {
        let _ = writeln!(out, "{i}\t{j}\t{p}");
    }
    out
}

pub fn write_bppm_tsv(b: &Bppm, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, export_bppm_tsv(b)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::RnaSequence;
    use crate::thermo::{base_pair_probabilities, FoldParams};

    fn parse(text: &str, n: usize) -> Result<Bppm> {
        parse_bppm_tsv(text, n, Path::new("test.tsv"))
    }

    #[test]
    fn single_cell() {
        let b = parse("1\t5\t0.75\n", 5).unwrap();
        assert_eq!(b.get(1, 5), 0.75);
        assert_eq!(b.get(5, 1), 0.75);
    }

    #[test]
    fn empty_file_gives_zeros() {
        assert_eq!(parse("", 4).unwrap(), Bppm::zeros(4));
    }

    #[test]
    fn lower_triangle_rejected() {
        let err = parse("5\t1\t0.2\n", 5).unwrap_err();
        assert!(matches!(err, Error::Tsv { line: 1, .. }), "{err}");
    }

    #[test]
    fn out_of_range_and_bad_values() {
        assert!(parse("1\t6\t0.2", 5).is_err());
        assert!(parse("0\t3\t0.2", 5).is_err());
        assert!(parse("1\t3\t1.5", 5).is_err());
        assert!(parse("1\t3\t-0.1", 5).is_err());
        assert!(parse("1\t3\tNaN", 5).is_err());
        assert!(parse("1 3 0.2", 5).is_err());
    }

    #[test]
    fn duplicate_cell_rejected() {
        let err = parse("1\t5\t0.2\n1\t5\t0.3\n", 5).unwrap_err();
        assert!(matches!(err, Error::Tsv { line: 2, .. }));
    }

    #[test]
    fn export_round_trip_is_exact() {
        let s = RnaSequence::new("t", "F", "GGGAAAUCCCGCAUUGCAGGCAUUUCGAUG").unwrap();
        let b = base_pair_probabilities(&s, &FoldParams::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.tsv");
        write_bppm_tsv(&b, &p).unwrap();
        assert_eq!(import_bppm_tsv(&p, b.n()).unwrap(), b);
    }
}
