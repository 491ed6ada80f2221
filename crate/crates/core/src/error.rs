use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ring level {0}")]
    InvalidLevel(u64),
    #[error("ring level mismatch: {left} vs {right}")]
    LevelMismatch { left: u64, right: u64 },
    #[error("cannot lift from level {from} to level {to}: {from} does not divide {to}")]
    LiftNotDivisible { from: u64, to: u64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid subcomplex: {0}")]
    InvalidSubcomplex(String),
    #[error("invalid bordism: {0}")]
    InvalidBordism(String),
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("enumeration of {size} candidates exceeds the bound {bound}")]
    Infeasible { size: u128, bound: u128 },
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("unknown entry: {0}")]
    UnknownEntry(String),
}
