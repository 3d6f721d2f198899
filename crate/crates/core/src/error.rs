use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported family/rank: {0}")]
    UnsupportedFamilyRank(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("elements belong to different root data")]
    DatumMismatch,
    #[error("coweight {0} is not dominant")]
    NotDominant(String),
    #[error("coweight {0} is not minuscule")]
    NotMinuscule(String),
    #[error("polynomial is not expandable as q^alpha * R(Q) with integer R")]
    NotExpandable,
    #[error("evaluation point must be nonzero")]
    ZeroEvaluationPoint,
    #[error("element {0} is not in the admissible set")]
    NotInAdm(String),
    #[error("factor list is not a length-additive (minimal) expression")]
    NotMinimal,
    #[error("element {0} is not in the affine Weyl group (nontrivial length-zero part)")]
    NotInAffineWeylGroup(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
