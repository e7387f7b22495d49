use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level mismatch: bottom row is level {bottom}, top row is level {top}")]
    LevelMismatch { bottom: usize, top: usize },

    #[error("palette mismatch: {left} colors vs {right} colors")]
    PaletteMismatch { left: usize, right: usize },

    #[error("row at level {level} has length {actual}, expected {expected}")]
    LengthMismatch {
        level: usize,
        expected: usize,
        actual: usize,
    },

    #[error("color {color} is outside the palette 1..={n}")]
    ColorOutOfRange { color: usize, n: usize },

    #[error("color {color} appears {count} times at level {level}, expected {level}")]
    Multiplicity {
        level: usize,
        color: usize,
        count: usize,
    },

    #[error("not a permutation of 1..={0}")]
    NotPermutation(usize),

    #[error("permutation has odd length {0}")]
    OddLength(usize),

    #[error("rows do not interlace: {0}")]
    NotInterlacing(String),

    #[error("permutation is not a Dumont derangement")]
    NotDumont,

    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    #[error("inexact division: {0}")]
    InexactDivision(String),

    #[error("palette of {n} colors exceeds the supported maximum of {max} for {what}")]
    TooLarge { n: usize, max: usize, what: &'static str },

    #[error("resource limit exceeded at level {level}: frontier holds {frontier} rows (limit {limit})")]
    ResourceLimit {
        level: usize,
        frontier: usize,
        limit: usize,
        states_checked: u64,
    },

    #[error("samples are inconsistent with a polynomial of degree {degree} (first mismatch at n = {n})")]
    InconsistentSamples { degree: usize, n: i64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}
