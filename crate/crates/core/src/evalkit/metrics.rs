use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, AddAssign};

use serde::Serialize;

use super::PredictionRecord;
use crate::datasetgen::{Label, PairRecord, Split};
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Confusion counts with "same family" as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

impl Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Tallies predictions; `score >= threshold` predicts "same".
pub fn confusion(preds: &[PredictionRecord], threshold: f64) -> Result<ConfusionCounts> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let mut c = ConfusionCounts::default();
    for p in preds {
        p.check()?;
        match (p.score >= threshold, p.label) {
            (true, Label::Same) => c.tp += 1,
            (true, Label::Different) => c.fp += 1,
            (false, Label::Different) => c.tn += 1,
            (false, Label::Same) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Derived rates. Sensitivity is absent without same-family pairs and
/// specificity without different-family pairs; the average-class accuracy
/// then uses whichever is present.
///
/// `f_score` is the harmonic mean of sensitivity and specificity, not of
/// precision and recall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub f_score: Option<f64>,
    pub average_class_accuracy: f64,
}

pub fn metrics(c: &ConfusionCounts) -> Result<MetricsReport> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    let accuracy = (c.tp + c.tn) as f64 / total as f64;
    let sensitivity = ratio(c.tp, c.tp + c.fn_);
    let specificity = ratio(c.tn, c.tn + c.fp);
    let f_score = match (sensitivity, specificity) {
        (Some(se), Some(sp)) if se + sp > 0.0 => Some(2.0 * se * sp / (se + sp)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    let present: Vec<f64> = [sensitivity, specificity].into_iter().flatten().collect();
    let average_class_accuracy = present.iter().sum::<f64>() / present.len() as f64;
    Ok(MetricsReport {
        accuracy,
        sensitivity,
        specificity,
        f_score,
        average_class_accuracy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    /// `None` for the row covering every prediction.
    pub split: Option<Split>,
    pub counts: ConfusionCounts,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub threshold: f64,
    pub splits: Vec<SplitReport>,
    pub overall: SplitReport,
}

/// Scores predictions per manifest split and overall.
pub fn evaluate(
    preds: &[PredictionRecord],
    manifest: &[PairRecord],
    threshold: f64,
) -> Result<EvalReport> {
    let index: HashMap<&str, &PairRecord> =
        manifest.iter().map(|r| (r.pair_id.as_str(), r)).collect();
    let mut by_split: HashMap<Split, Vec<PredictionRecord>> = HashMap::new();
    for p in preds {
        let row = index
            .get(p.pair_id.as_str())
            .ok_or_else(|| Error::UnknownPair(p.pair_id.clone()))?;
        if row.label != p.label {
            return Err(Error::LabelMismatch(p.pair_id.clone()));
        }
        by_split.entry(row.split).or_default().push(p.clone());
    }

    let mut splits = Vec::new();
    let mut all = ConfusionCounts::default();
    for split in Split::ALL {
        let Some(ps) = by_split.get(&split) else {
            continue;
        };
        let counts = confusion(ps, threshold)?;
        all += counts;
        splits.push(SplitReport {
            split: Some(split),
            counts,
            metrics: metrics(&counts)?,
        });
    }
    let overall = SplitReport {
        split: None,
        counts: all,
        metrics: metrics(&all)?,
    };
    Ok(EvalReport {
        threshold,
        splits,
        overall,
    })
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{:.1}%", 100.0 * v))
}

impl fmt::Display for EvalReport {
    /// Rows per split with different-class, same-class and average-class
    /// accuracy, then total accuracy.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<7} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "", "Diff", "Same", "Avg", "Total", "F-score"
        );
        for row in self.splits.iter().chain(std::iter::once(&self.overall)) {
            let name = match row.split {
                Some(Split::Train) => "Train",
                Some(Split::Val) => "Val",
                Some(Split::Test) => "Test",
                None => "All",
            };
            let m = &row.metrics;
            let _ = writeln!(
                out,
                "{:<7} {:>8} {:>8} {:>8} {:>8} {:>8}",
                name,
                pct(m.specificity),
                pct(m.sensitivity),
                pct(Some(m.average_class_accuracy)),
                pct(Some(m.accuracy)),
                m.f_score.map_or("-".into(), |v| format!("{v:.3}")),
            );
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(score: f64, same: bool) -> PredictionRecord {
        let label = if same { Label::Same } else { Label::Different };
        PredictionRecord::new(format!("p{score}"), score, label)
    }

    #[test]
    fn hand_tally() {
        let preds = [p(0.9, true), p(0.4, true), p(0.2, false), p(0.6, false)];
        let c = confusion(&preds, 0.5).unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 1,
                fp: 1,
                tn: 1,
                fn_: 1
            }
        );
    }

    #[test]
    fn all_correct_and_empty() {
        let preds = [p(0.9, true), p(0.1, false), p(0.5, true)];
        let c = confusion(&preds, 0.5).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        assert_eq!(confusion(&[], 0.5).unwrap(), ConfusionCounts::default());
    }

    #[test]
    fn bad_threshold_and_score() {
        assert!(matches!(
            confusion(&[], 1.5),
            Err(Error::InvalidThreshold(_))
        ));
        assert!(matches!(
            confusion(&[p(-0.1, true)], 0.5),
            Err(Error::ScoreOutOfRange { .. })
        ));
    }

    #[test]
    fn fixture_metrics() {
        let m = metrics(&ConfusionCounts {
            tp: 3,
            fp: 1,
            tn: 5,
            fn_: 1,
        })
        .unwrap();
        assert!((m.accuracy - 0.8).abs() < 1e-12);
        assert!((m.sensitivity.unwrap() - 0.75).abs() < 1e-12);
        assert!((m.specificity.unwrap() - 5.0 / 6.0).abs() < 1e-12);
        assert!((m.f_score.unwrap() - 0.789_473_684_210_526_3).abs() < 1e-12);
        assert!((m.average_class_accuracy - 0.791_666_666_666_666_7).abs() < 1e-12);
    }

    #[test]
    fn perfect_classifier() {
        let m = metrics(&ConfusionCounts {
            tp: 4,
            fp: 0,
            tn: 9,
            fn_: 0,
        })
        .unwrap();
        assert_eq!(
            (
                m.accuracy,
                m.sensitivity,
                m.specificity,
                m.f_score,
                m.average_class_accuracy
            ),
            (1.0, Some(1.0), Some(1.0), Some(1.0), 1.0)
        );
    }

    #[test]
    fn always_different_on_imbalanced_data() {
        // 6 same, 94 different, everything predicted different
        let m = metrics(&ConfusionCounts {
            tp: 0,
            fp: 0,
            tn: 94,
            fn_: 6,
        })
        .unwrap();
        assert_eq!(m.sensitivity, Some(0.0));
        assert!((m.accuracy - 0.94).abs() < 1e-12);
        assert_eq!(m.f_score, Some(0.0));
        assert!((m.average_class_accuracy - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_class_metrics() {
        let m = metrics(&ConfusionCounts {
            tp: 0,
            fp: 2,
            tn: 6,
            fn_: 0,
        })
        .unwrap();
        assert_eq!(m.sensitivity, None);
        assert_eq!(m.f_score, None);
        assert_eq!(m.average_class_accuracy, 0.75);
        assert!(matches!(
            metrics(&ConfusionCounts::default()),
            Err(Error::EmptyCounts)
        ));
    }

    #[test]
    fn evaluate_per_split() {
        let rec = |id: &str, split: Split, label: Label| PairRecord {
            pair_id: id.into(),
            seq_a: "a".into(),
            seq_b: "b".into(),
            family_a: "A".into(),
            family_b: if label == Label::Same { "A" } else { "B" }.into(),
            label,
            split,
            image: None,
            image_a: None,
            image_b: None,
        };
        let manifest = [
            rec("t1", Split::Train, Label::Same),
            rec("t2", Split::Train, Label::Different),
            rec("x1", Split::Test, Label::Same),
            rec("x2", Split::Test, Label::Different),
        ];
        let preds = [
            PredictionRecord::new("t1", 0.9, Label::Same),
            PredictionRecord::new("t2", 0.1, Label::Different),
            PredictionRecord::new("x1", 0.2, Label::Same),
            PredictionRecord::new("x2", 0.3, Label::Different),
        ];
        let r = evaluate(&preds, &manifest, 0.5).unwrap();
        assert_eq!(r.splits.len(), 2);
        assert_eq!(r.splits[0].metrics.accuracy, 1.0);
        assert_eq!(r.splits[1].metrics.sensitivity, Some(0.0));
        assert_eq!(r.overall.counts.total(), 4);
        let table = r.to_string();
        assert!(table.contains("Train") && table.contains("Test") && table.contains("All"));

        let stray = [PredictionRecord::new("zz", 0.5, Label::Same)];
        assert!(matches!(
            evaluate(&stray, &manifest, 0.5),
            Err(Error::UnknownPair(_))
        ));
        let wrong = [PredictionRecord::new("t1", 0.5, Label::Different)];
        assert!(matches!(
            evaluate(&wrong, &manifest, 0.5),
            Err(Error::LabelMismatch(_))
        ));
    }

    fn arb_counts() -> impl Strategy<Value = ConfusionCounts> {
        (0u64..50, 0u64..50, 0u64..50, 0u64..50)
            .prop_filter("nonempty", |(a, b, c, d)| a + b + c + d > 0)
            .prop_map(|(tp, fp, tn, fn_)| ConfusionCounts { tp, fp, tn, fn_ })
    }

    proptest! {
        #[test]
        fn average_lies_between_class_accuracies(c in arb_counts()) {
            let m = metrics(&c).unwrap();
            let present: Vec<f64> = [m.sensitivity, m.specificity].into_iter().flatten().collect();
            let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m.average_class_accuracy >= lo - 1e-15);
            prop_assert!(m.average_class_accuracy <= hi + 1e-15);
            for v in [Some(m.accuracy), m.sensitivity, m.specificity, m.f_score].into_iter().flatten() {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn counts_invariant_under_reordering(
            scores in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 0..60),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let mut preds: Vec<_> = scores.iter().map(|&(s, l)| p(s, l)).collect();
            let before = confusion(&preds, 0.5).unwrap();
            preds.shuffle(&mut crate::seeds::rng(seed));
            prop_assert_eq!(confusion(&preds, 0.5).unwrap(), before);
            prop_assert_eq!(before.total() as usize, preds.len());
        }

        #[test]
        fn partitioned_counts_merge(
            scores in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 0..60),
            cut in 0usize..60,
        ) {
            let preds: Vec<_> = scores.iter().map(|&(s, l)| p(s, l)).collect();
            let cut = cut.min(preds.len());
            let merged = confusion(&preds[..cut], 0.5).unwrap() + confusion(&preds[cut..], 0.5).unwrap();
            prop_assert_eq!(merged, confusion(&preds, 0.5).unwrap());
        }
    }
}
