use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("outside the domain of {what}: {detail}")]
    Domain { what: &'static str, detail: String },
    #[error("pole at s = 1")]
    Pole,
    #[error("precision exhausted at {bits} bits: {detail}")]
    PrecisionExhausted { bits: u32, detail: String },
    #[error("cannot divide: enclosure of {0} contains zero")]
    CannotDivide(&'static str),
    #[error("undetermined sign of {what} after escalating to {bits} bits")]
    Undetermined { what: &'static str, bits: u32 },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;
