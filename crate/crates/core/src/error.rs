use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is out of range (allowed 1..={1})")]
    DimensionOutOfRange(u32, u32),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("mask {mask:#x} has bits above dimension {n}")]
    InvalidPoint { mask: u64, n: u32 },
    #[error("level {h} is out of range for dimension {n}")]
    LevelOutOfRange { h: u32, n: u32 },
    #[error("lower endpoint {lower:#x} is not dominated by upper endpoint {upper:#x}")]
    NotDominated { lower: u64, upper: u64 },
    #[error("window {window} exceeds the weight {weight} of the point")]
    WindowTooLarge { window: u32, weight: u32 },
    #[error("invalid probability table: {0}")]
    InvalidDistribution(&'static str),
    #[error("invalid mixture weights: {0}")]
    InvalidWeights(&'static str),
    #[error("distribution is not monotone")]
    NotMonotone,
    #[error("epsilon {0} is out of range (0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("no integer h0 puts the upper-tail mass of the cube in [{lo}, {hi}] for n = {n}")]
    NoValidH0 { n: u32, lo: f64, hi: f64 },
    #[error("dimension {0} is too large for the exact linear-program solve (max {1})")]
    LpTooLarge(u32, u32),
    #[error("linear program is infeasible")]
    LpInfeasible,
    #[error("linear program hit the pivot limit ({0})")]
    LpIterationLimit(usize),
    #[error("linear program is unbounded")]
    LpUnbounded,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
