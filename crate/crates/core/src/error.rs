use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("middle colors do not match: {top} vs {bottom}")]
    ColorMismatch { top: String, bottom: String },
    #[error("refusing to enumerate {points} points (bound {bound})")]
    SizeGuard { points: usize, bound: usize },
    #[error("Gram matrix is singular at N={n} for word '{word}'")]
    SingularGram { n: u64, word: String },
    #[error("partition has a block of odd size")]
    OddBlock,
    #[error("partition is crossing")]
    Crossing,
    #[error("cannot rotate: empty side")]
    EmptySide,
    #[error("malformed label: {0}")]
    InvalidLabel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::ColorMismatch { .. } => "ColorMismatch",
            Error::SizeGuard { .. } => "SizeGuard",
            Error::SingularGram { .. } => "SingularGram",
            Error::OddBlock => "OddBlock",
            Error::Crossing => "Crossing",
            Error::EmptySide => "EmptySide",
            Error::InvalidLabel(_) => "InvalidLabel",
            Error::Parse(_) => "Parse",
            Error::Unsupported(_) => "Unsupported",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
