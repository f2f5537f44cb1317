use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("sequentiality violated: q_sign={q_sign} q_fin={q_fin}")]
    Sequentiality { q_sign: usize, q_fin: usize },
    #[error("reduction-gap: {0}")]
    ReductionGap(String),
    #[error("game requires the {0} variant")]
    WrongVariant(&'static str),
    #[error("inconsistent flags: {0}")]
    Flags(String),
}
