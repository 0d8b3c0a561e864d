use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("neuron count {0} is outside the supported range 1..={max}", max = crate::net::MAX_NEURONS)]
    NeuronCount(usize),

    #[error("vector has length {got}, network expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("component value {0} is not bipolar (+1 or -1)")]
    NotBipolar(i64),

    #[error("index {index} is out of range for {n} neurons")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("cue size {m} exceeds neuron count {n}")]
    CueSize { m: usize, n: usize },

    #[error("cut-set size {n_d} exceeds the {links} available links")]
    CutSetSize { n_d: usize, links: usize },

    #[error("invalid survey configuration: {0}")]
    Config(String),

    #[error("survey fragments were produced from different configurations")]
    ConfigMismatch,

    #[error("recall curves are on different grids ({0} vs {1} neurons)")]
    GridMismatch(usize, usize),

    #[error("survey was run without a match target, so no damage sets were logged")]
    NoTarget,

    #[error("requested target {requested} differs from the survey's logged target {configured}")]
    TargetMismatch { requested: String, configured: String },

    #[error("parse error: {0}")]
    Parse(String),
}
