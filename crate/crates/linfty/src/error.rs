use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Variants carry human-readable context naming the offending arity, basis
/// element or degree where that is known. `Parse` and `UnknownReference` are
/// reserved for document handling and map to "malformed input" in the CLI;
/// everything else is a semantic failure.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not a morphism: {0}")]
    NotAMorphism(String),
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error("series does not terminate: {0}")]
    NonNilpotent(String),
    #[error("invalid contraction: {0}")]
    InvalidContraction(String),
    #[error("not an embedding: {0}")]
    NotAnEmbedding(String),
    #[error("not a quasi-isomorphism: {0}")]
    NotQuasiIso(String),
    #[error("bad contraction: {0}")]
    BadContraction(String),
    #[error("linear part not invertible: {0}")]
    SingularLinearPart(String),
    #[error("no homotopy certificate at arity {arity}: {detail}")]
    CertificateNotFound { arity: usize, detail: String },
    #[error("invalid coalgebra: {0}")]
    InvalidCoalgebra(String),
    #[error("polynomial degree bound {given} is below the truncation {needed}")]
    TDegreeTooSmall { given: usize, needed: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown reference: {0}")]
    UnknownReference(String),
}

impl Error {
    /// True when the error indicates malformed input rather than a semantic
    /// failure; the CLI turns this into exit code 2.
    pub fn is_malformed(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::UnknownReference(_)
                | Error::ShapeMismatch(_)
                | Error::DegreeMismatch(_)
                | Error::MalformedPermutation(_)
                | Error::TruncationMismatch { .. }
                | Error::TDegreeTooSmall { .. }
        )
    }
}
