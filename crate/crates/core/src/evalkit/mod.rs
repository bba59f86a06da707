//! Training batch plans, confusion-based metrics and ROC analysis.
//!
//! The positive class is always "same family": sensitivity is accuracy on
//! same-family pairs and specificity accuracy on different-family pairs.

mod batch;
mod metrics;
mod predictions;
mod roc;

pub use batch::{make_batch_plan, Batch, BatchPlan, Ratio};
pub use metrics::{
    confusion, evaluate, metrics, ConfusionCounts, EvalReport, MetricsReport, SplitReport,
    DEFAULT_THRESHOLD,
};
pub use predictions::{
    parse_predictions, predictions_to_jsonl, read_predictions, PredictionRecord,
};
pub use roc::{mann_whitney_auc, roc, RocCurve};
