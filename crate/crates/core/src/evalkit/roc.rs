use std::fmt::Write as _;

use serde::Serialize;

use super::PredictionRecord;
use crate::datasetgen::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`, one point per distinct score.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

impl RocCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (fpr, tpr) in &self.points {
            let _ = writeln!(out, "{fpr},{tpr}");
        }
        out
    }
}

fn class_totals(preds: &[PredictionRecord]) -> Result<(u64, u64)> {
    let mut pos = 0;
    let mut neg = 0;
    for p in preds {
        p.check()?;
        match p.label {
            Label::Same => pos += 1,
            Label::Different => neg += 1,
        }
    }
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// Sweeps the threshold down through every distinct score; tied scores move
/// the curve in one diagonal step. AUC by the trapezoid rule.
pub fn roc(preds: &[PredictionRecord]) -> Result<RocCurve> {
    let (pos, neg) = class_totals(preds)?;
    let mut sorted: Vec<&PredictionRecord> = preds.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut auc = 0.0;
    let mut k = 0;
    while k < sorted.len() {
        let score = sorted[k].score;
        while k < sorted.len() && sorted[k].score == score {
            match sorted[k].label {
                Label::Same => tp += 1,
                Label::Different => fp += 1,
            }
            k += 1;
        }
        let (x0, y0) = *points.last().unwrap();
        let point = (fp as f64 / neg as f64, tp as f64 / pos as f64);
        auc += (point.0 - x0) * (point.1 + y0) / 2.0;
        points.push(point);
    }
    Ok(RocCurve { points, auc })
}

/// Probability that a random same-family pair outscores a random
/// different-family one (ties count one half), via average ranks.
pub fn mann_whitney_auc(preds: &[PredictionRecord]) -> Result<f64> {
    let (pos, neg) = class_totals(preds)?;
    let mut sorted: Vec<&PredictionRecord> = preds.iter().collect();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));
    let mut rank_sum = 0.0;
    let mut k = 0;
    while k < sorted.len() {
        let start = k;
        while k < sorted.len() && sorted[k].score == sorted[start].score {
            k += 1;
        }
        // ranks start+1 ..= k share their mean
        let mean_rank = (start + 1 + k) as f64 / 2.0;
        let positives = sorted[start..k]
            .iter()
            .filter(|p| p.label == Label::Same)
            .count();
        rank_sum += mean_rank * positives as f64;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(score: f64, same: bool) -> PredictionRecord {
        let label = if same { Label::Same } else { Label::Different };
        PredictionRecord::new("x", score, label)
    }

    #[test]
    fn perfect_separation() {
        let preds = [p(0.9, true), p(0.8, true), p(0.3, false), p(0.1, false)];
        assert_eq!(roc(&preds).unwrap().auc, 1.0);
    }

    #[test]
    fn all_tied() {
        let preds = [p(0.5, true), p(0.5, false), p(0.5, false)];
        let r = roc(&preds).unwrap();
        assert_eq!(r.points, [(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(r.auc, 0.5);
    }

    #[test]
    fn interleaved_fixture() {
        let preds = [p(0.9, true), p(0.8, false), p(0.7, true), p(0.1, false)];
        let r = roc(&preds).unwrap();
        assert!((r.auc - 0.75).abs() < 1e-15);
        assert_eq!(
            r.points,
            [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        assert!((mann_whitney_auc(&preds).unwrap() - 0.75).abs() < 1e-15);
        assert!(r.to_csv().starts_with("fpr,tpr\n0,0\n0,0.5\n"));
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(roc(&[p(0.3, true)]), Err(Error::SingleClass)));
        assert!(matches!(mann_whitney_auc(&[]), Err(Error::SingleClass)));
    }
}
