use thiserror::Error;

/// Errors raised by the library. Diagnostics that are part of a check's
/// outcome are returned as [`crate::report::Report`] data instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("undeclared vertex `{0}`")]
    UndeclaredVertex(String),
    #[error("undeclared label `{0}`")]
    UndeclaredLabel(String),
    #[error("cannot tokenize `{text}`: {reason}")]
    Tokenize { text: String, reason: String },
    #[error("the presented subshift is empty")]
    EmptyLanguage,
    #[error("presentation is reducible: {components} strongly connected components")]
    Reducible { components: usize, condensation: Vec<Vec<String>> },
    #[error("word is not admissible")]
    Inadmissible,
    #[error("index {index} out of range (count {count})")]
    IndexOutOfRange { index: String, count: String },
    #[error("word has length {actual}, expected {expected}")]
    WrongLength { expected: usize, actual: usize },
    #[error("block length {l} outside the coded range [{lo}, {hi}]")]
    BlockLengthOutOfRange { l: usize, lo: usize, hi: usize },
    #[error("degenerate cover: {0}")]
    DegenerateCover(String),
    #[error("no marker candidate within search bound {bound}")]
    MarkerSearchExhausted { bound: usize },
    #[error("no connector family of uniform length up to {bound}")]
    ConnectorSearchExhausted { bound: usize },
    #[error(
        "no feasible block length up to {bound} (entropy of X {h_x:.6}, growth of marker-avoiding paths {h_avoid:.6})"
    )]
    BlockLengthExhausted { bound: usize, h_x: f64, h_avoid: f64 },
    #[error("entropy margin missing: h(X) = {h_x:.9} is not below h(Y) = {h_y:.9}")]
    NoEntropyMargin { h_x: f64, h_y: f64 },
    #[error("insufficient eligible target orbits of least period {n}: need {needed}, eligible {eligible} (hypothesis-level {available})")]
    InsufficientOrbits { n: usize, needed: usize, eligible: usize, available: usize },
    #[error("power iteration did not converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("window too short: need at least {needed} symbols, got {actual}")]
    WindowTooShort { needed: usize, actual: usize },
    #[error("window {0} is not periodic")]
    NotPeriodic(String),
    #[error("marker decision at coordinate {0} depends on unseen context; widen the margin")]
    UnstableMarker(i64),
    #[error("periodic stretch at coordinate {coordinate} has no matched orbit")]
    UnmatchedOrbit { coordinate: i64 },
    #[error("word is not in the image of the encoder: {0}")]
    NotInImage(String),
    #[error("count exceeds supported range")]
    Overflow,
    #[error("embedding precondition failed: {0}")]
    Precondition(String),
    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<Error> },
    #[error("invalid embedding code: {0}")]
    InvalidCode(String),
}

impl Error {
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
