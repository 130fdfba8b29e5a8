//! Automatic and human evaluation of generated inferences.

mod bleu;
mod human;
mod report;

pub use bleu::{bleu2, bleu_tokens, BleuConfig, SmoothingScope};
pub use human::{
    export_human_eval_sheet, parse_judgment_sheet, precision_at_10, write_judgment_sheet, JudgmentRow,
    JudgmentSheet, PrecisionReport, PrecisionScores, ValidThreshold, ROWS_PER_LIST, SHEET_HEADER,
};
pub use report::{
    aggregate, avg_topk_bleu, is_instance_evaluable, score_instance, DimensionScore, EvalMeta, EvalReport, GoldIndex,
    GoldSet, InstanceOutcome,
};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("need {requested} events with generations, only {available} available")]
    InsufficientEvents { available: usize, requested: usize },
    #[error("judgment sheet line {line}: {message}")]
    Sheet { line: usize, message: String },
    #[error("judgment sheet rows without votes at lines {lines:?}")]
    MissingVotes { lines: Vec<usize> },
}
