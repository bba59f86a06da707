use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::manifest::write_manifest;
use super::{PairRecord, CNN_MANIFEST, DOTPLOT_DIR, PAIR_DIR, SIAMESE_MANIFEST};
use crate::dotplot::{
    bppm_to_dotplot, import_bppm_tsv, resize_bilinear, stitch, write_png, GrayImage,
};
use crate::error::{Error, Result};
use crate::seqcore::{FamilyCollection, RnaSequence};
use crate::thermo::{base_pair_probabilities, Bppm, FoldParams};

/// Supplies the base-pairing matrix for a sequence id.
pub trait BppmSource: Sync {
    fn bppm(&self, seq_id: &str) -> Result<Bppm>;
}

/// Folds sequences on demand with the pair-weight model.
pub struct FoldingSource {
    sequences: HashMap<String, RnaSequence>,
    params: FoldParams,
}

impl FoldingSource {
    pub fn new(c: &FamilyCollection, params: FoldParams) -> Self {
        let sequences = c
            .sequences()
            .map(|s| (s.id().to_owned(), s.clone()))
            .collect();
        Self { sequences, params }
    }
}

impl BppmSource for FoldingSource {
    fn bppm(&self, seq_id: &str) -> Result<Bppm> {
        let seq = self
            .sequences
            .get(seq_id)
            .ok_or_else(|| Error::MissingBppm(seq_id.to_owned()))?;
        base_pair_probabilities(seq, &self.params)
    }
}

/// Reads precomputed matrices from `<dir>/<file_stem(id)>.tsv`.
pub struct TsvDirSource {
    dir: PathBuf,
    lengths: HashMap<String, usize>,
}

impl TsvDirSource {
    pub fn new(dir: impl Into<PathBuf>, c: &FamilyCollection) -> Self {
        let lengths = c
            .sequences()
            .map(|s| (s.id().to_owned(), s.len()))
            .collect();
        Self {
            dir: dir.into(),
            lengths,
        }
    }
}

impl BppmSource for TsvDirSource {
    fn bppm(&self, seq_id: &str) -> Result<Bppm> {
        let n = *self
            .lengths
            .get(seq_id)
            .ok_or_else(|| Error::MissingBppm(seq_id.to_owned()))?;
        let path = self.dir.join(format!("{}.tsv", file_stem(seq_id)));
        if !path.is_file() {
            return Err(Error::MissingBppm(seq_id.to_owned()));
        }
        import_bppm_tsv(&path, n)
    }
}

/// File-name-safe form of an id: characters outside `[A-Za-z0-9._-]` become `_`.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn dotplot_rel(seq_id: &str) -> String {
    format!("{DOTPLOT_DIR}/{}.png", file_stem(seq_id))
}

fn distinct_sequences(pairs: &[PairRecord]) -> Result<Vec<&str>> {
    let mut seen = HashSet::new();
    let mut stems: HashMap<String, &str> = HashMap::new();
    let mut ids = Vec::new();
    for id in pairs
        .iter()
        .flat_map(|p| [p.seq_a.as_str(), p.seq_b.as_str()])
    {
        if !seen.insert(id) {
            continue;
        }
        if let Some(other) = stems.insert(file_stem(id), id) {
            return Err(Error::FileNameCollision(other.to_owned(), id.to_owned()));
        }
        ids.push(id);
    }
    Ok(ids)
}

/// Renders every referenced sequence once as a `side x side` dot-plot
/// (written to `dotplots/`), then writes one stitched image per pair to
/// `pairs/<pair_id>.png` with `seq_a` in the lower-left triangle, and
/// finally the CNN manifest. Work is spread over the current rayon pool;
/// output bytes do not depend on the thread count.
pub fn build_images(
    pairs: &[PairRecord],
    source: &dyn BppmSource,
    out_dir: &Path,
    side: usize,
) -> Result<Vec<PairRecord>> {
    let ids = distinct_sequences(pairs)?;
    let plots: Vec<GrayImage> = ids
        .par_iter()
        .map(|id| {
            let plot = resize_bilinear(&bppm_to_dotplot(&source.bppm(id)?), side)?;
            write_png(&plot, &out_dir.join(dotplot_rel(id)))?;
            Ok(plot)
        })
        .collect::<Result<_>>()?;
    let cache: HashMap<&str, &GrayImage> = ids.iter().copied().zip(&plots).collect();

    let records: Vec<PairRecord> = pairs
        .par_iter()
        .map(|p| {
            let rel = format!("{PAIR_DIR}/{}.png", file_stem(&p.pair_id));
            let img = stitch(cache[p.seq_a.as_str()], cache[p.seq_b.as_str()])?;
            write_png(&img, &out_dir.join(&rel))?;
            Ok(PairRecord {
                image: Some(rel),
                image_a: None,
                image_b: None,
                ..p.clone()
            })
        })
        .collect::<Result<_>>()?;

    write_manifest(&out_dir.join(CNN_MANIFEST), &records)?;
    Ok(records)
}

/// Writes the two-image manifest. Each row's pair is put in lexicographic
/// order of sequence id and points at the existing dot-plots under
/// `dotplots/`.
pub fn build_siamese_manifest(pairs: &[PairRecord], out_dir: &Path) -> Result<Vec<PairRecord>> {
    let mut checked = HashSet::new();
    let mut records = Vec::with_capacity(pairs.len());
    for p in pairs {
        let mut r = p.clone();
        if r.seq_a > r.seq_b {
            std::mem::swap(&mut r.seq_a, &mut r.seq_b);
            std::mem::swap(&mut r.family_a, &mut r.family_b);
        }
        for id in [&r.seq_a, &r.seq_b] {
            if checked.insert(id.clone()) {
                let path = out_dir.join(dotplot_rel(id));
                if !path.is_file() {
                    return Err(Error::MissingDotplot(path));
                }
            }
        }
        r.image = None;
        r.image_a = Some(dotplot_rel(&r.seq_a));
        r.image_b = Some(dotplot_rel(&r.seq_b));
        records.push(r);
    }
    write_manifest(&out_dir.join(SIAMESE_MANIFEST), &records)?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::fs;

    use super::*;
    use crate::datasetgen::{read_manifest, Label, Split, SplitAssignment};
    use crate::dotplot::read_png;

    fn corpus() -> FamilyCollection {
        let mut c = FamilyCollection::new();
        c.insert_family(
            "A",
            vec![
                RnaSequence::new("a/1", "A", "GGGGAAAACCCCAAAAAAAA").unwrap(),
                RnaSequence::new("a/2", "A", "GGGAAAACCCAAAAAAAAAA").unwrap(),
            ],
        )
        .unwrap();
        c.insert_family(
            "B",
            vec![RnaSequence::new("b1", "B", "AAAAAAAAGGGGAAAACCCC").unwrap()],
        )
        .unwrap();
        c
    }

    fn pair(id: &str, a: (&str, &str), b: (&str, &str)) -> PairRecord {
        PairRecord::new(id.into(), a, b, Split::Train)
    }

    #[test]
    fn smoke_two_pairs() {
        let c = corpus();
        let dir = tempfile::tempdir().unwrap();
        let pairs = vec![
            pair("p0", ("a/1", "A"), ("a/2", "A")),
            pair("p1", ("a/1", "A"), ("b1", "B")),
        ];
        let out = build_images(
            &pairs,
            &FoldingSource::new(&c, FoldParams::default()),
            dir.path(),
            32,
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].label, Label::Same);
        assert_eq!(out[1].label, Label::Different);
        assert_eq!(fs::read_dir(dir.path().join(PAIR_DIR)).unwrap().count(), 2);
        assert_eq!(
            fs::read_dir(dir.path().join(DOTPLOT_DIR)).unwrap().count(),
            3
        );
        assert!(dir.path().join("dotplots/a_1.png").is_file());
        assert_eq!(read_manifest(&dir.path().join(CNN_MANIFEST)).unwrap(), out);
        let img = read_png(&dir.path().join(out[1].image.as_ref().unwrap())).unwrap();
        assert_eq!((img.width(), img.height()), (32, 32));
    }

    #[test]
    fn swapped_pairs_are_transposes() {
        let c = corpus();
        let dir = tempfile::tempdir().unwrap();
        let pairs = vec![
            pair("ab", ("a/1", "A"), ("b1", "B")),
            pair("ba", ("b1", "B"), ("a/1", "A")),
        ];
        build_images(
            &pairs,
            &FoldingSource::new(&c, FoldParams::default()),
            dir.path(),
            40,
        )
        .unwrap();
        let ab = read_png(&dir.path().join("pairs/ab.png")).unwrap();
        let ba = read_png(&dir.path().join("pairs/ba.png")).unwrap();
        assert_ne!(ab, ba);
        assert_eq!(ab, ba.transpose());
    }

    #[test]
    fn missing_bppm_fails_without_manifest() {
        let c = corpus();
        let dir = tempfile::tempdir().unwrap();
        let pairs = vec![pair("p", ("a/1", "A"), ("zz", "Z"))];
        let err = build_images(
            &pairs,
            &FoldingSource::new(&c, FoldParams::default()),
            dir.path(),
            8,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingBppm(id) if id == "zz"));
        assert!(!dir.path().join(CNN_MANIFEST).exists());
    }

    #[test]
    fn stem_collisions_detected() {
        let pairs = vec![pair("p", ("x/1", "A"), ("x_1", "A"))];
        assert!(matches!(
            distinct_sequences(&pairs),
            Err(Error::FileNameCollision(..))
        ));
    }

    #[test]
    fn tsv_source_matches_folding() {
        let c = corpus();
        let dir = tempfile::tempdir().unwrap();
        let fold = FoldingSource::new(&c, FoldParams::default());
        for s in c.sequences() {
            crate::dotplot::write_bppm_tsv(
                &fold.bppm(s.id()).unwrap(),
                &dir.path().join(format!("{}.tsv", file_stem(s.id()))),
            )
            .unwrap();
        }
        let tsv = TsvDirSource::new(dir.path(), &c);
        for s in c.sequences() {
            assert_eq!(tsv.bppm(s.id()).unwrap(), fold.bppm(s.id()).unwrap());
        }
        assert!(matches!(tsv.bppm("nope"), Err(Error::MissingBppm(_))));
    }

    #[test]
    fn siamese_rows_are_normalized() {
        let c = corpus();
        let dir = tempfile::tempdir().unwrap();
        let pairs = vec![pair("p", ("b1", "B"), ("a/1", "A"))];
        build_images(
            &pairs,
            &FoldingSource::new(&c, FoldParams::default()),
            dir.path(),
            8,
        )
        .unwrap();
        let rows = build_siamese_manifest(&pairs, dir.path()).unwrap();
        assert_eq!(rows[0].seq_a, "a/1");
        assert_eq!(rows[0].family_a, "A");
        assert_eq!(rows[0].image_a.as_deref(), Some("dotplots/a_1.png"));
        assert_eq!(rows[0].image_b.as_deref(), Some("dotplots/b1.png"));
        assert_eq!(rows[0].image, None);
        assert_eq!(
            read_manifest(&dir.path().join(SIAMESE_MANIFEST)).unwrap(),
            rows
        );
    }

    #[test]
    fn siamese_empty_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        assert!(build_siamese_manifest(&[], dir.path()).unwrap().is_empty());
        let pairs = vec![pair("p", ("a/1", "A"), ("b1", "B"))];
        assert!(matches!(
            build_siamese_manifest(&pairs, dir.path()),
            Err(Error::MissingDotplot(_))
        ));
    }

    #[test]
    fn siamese_halves_ordered_eval_set() {
        let mut c = FamilyCollection::new();
        for (fam, n) in [("A", 3), ("B", 2)] {
            let members = (0..n)
                .map(|k| RnaSequence::new(format!("{fam}{k}"), fam, "GGGAAACCC").unwrap())
                .collect();
            c.insert_family(fam, members).unwrap();
        }
        let split = SplitAssignment::from_map(
            BTreeMap::from([("A".into(), Split::Val), ("B".into(), Split::Val)]),
            0,
        );
        let ordered: Vec<_> = crate::datasetgen::enumerate_same_pairs(&c, &split, true)
            .unwrap()
            .into_iter()
            .chain(
                crate::datasetgen::enumerate_diff_pairs_eval(&c, &split, Split::Val, true).unwrap(),
            )
            .collect();
        let unordered: Vec<_> = crate::datasetgen::enumerate_same_pairs(&c, &split, false)
            .unwrap()
            .into_iter()
            .chain(
                crate::datasetgen::enumerate_diff_pairs_eval(&c, &split, Split::Val, false)
                    .unwrap(),
            )
            .collect();
        let dir = tempfile::tempdir().unwrap();
        build_images(
            &ordered,
            &FoldingSource::new(&c, FoldParams::default()),
            dir.path(),
            8,
        )
        .unwrap();
        let rows = build_siamese_manifest(&unordered, dir.path()).unwrap();
        assert_eq!(rows.len() * 2, ordered.len());
    }
}
