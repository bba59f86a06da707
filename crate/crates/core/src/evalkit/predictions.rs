use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datasetgen::Label;
use crate::error::{Error, Result};

/// One classifier output: `score` is the probability of "same family".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub pair_id: String,
    pub score: f64,
    pub label: Label,
}

impl PredictionRecord {
    pub fn new(pair_id: impl Into<String>, score: f64, label: Label) -> Self {
        Self {
            pair_id: pair_id.into(),
            score,
            label,
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.score.is_finite() && (0.0..=1.0).contains(&self.score) {
            Ok(())
        } else {
            Err(Error::ScoreOutOfRange {
                pair_id: self.pair_id.clone(),
                score: self.score,
            })
        }
    }
}

pub fn parse_predictions(text: &str, origin: &Path) -> Result<Vec<PredictionRecord>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: PredictionRecord = serde_json::from_str(line).map_err(|e| Error::Jsonl {
            path: origin.to_owned(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        rec.check()?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, path)
}

pub fn predictions_to_jsonl(preds: &[PredictionRecord]) -> String {
    preds
        .iter()
        .map(|p| serde_json::to_string(p).expect("prediction serializes") + "\n")
        .collect()
}
