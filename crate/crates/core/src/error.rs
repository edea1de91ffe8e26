use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("prototype must have {expected} taps, got {got}")]
    PrototypeLength { expected: usize, got: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("expected sample rate {expected} Hz, got {got} Hz")]
    SampleRate { expected: u32, got: u32 },
    #[error("quantizer bits must be in 2..=5, got {0}")]
    BitDepth(u8),
    #[error("invalid quantizer table: {0}")]
    QuantizerTable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("code {code} out of range for {nq}-bit quantizer")]
    CodeRange { code: i32, nq: u8 },
    #[error("corrupt stream: {0}")]
    Corrupt(String),
    #[error("no frames above the silence threshold")]
    NoFrames,
}

pub type Result<T> = std::result::Result<T, Error>;
