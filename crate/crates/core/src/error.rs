use thiserror::Error;

/// Errors raised by the primitives, the Merkle layer and the scheme
/// algorithms. The `Display` strings are stable identifiers; tooling matches
/// on them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bad-hash-params")]
    BadHashParams,
    #[error("bad-randomness-length")]
    BadRandomnessLength,
    #[error("bad-signature-encoding")]
    BadSignatureEncoding,
    #[error("bad-key-encoding")]
    BadKeyEncoding,
    #[error("unknown-scheme")]
    UnknownScheme,
    #[error("scheme-mismatch")]
    SchemeMismatch,
    #[error("index-out-of-range")]
    IndexOutOfRange,
    #[error("reserved-prefix")]
    ReservedPrefix,
    #[error("list-too-short")]
    ListTooShort,
    #[error("unpadded-list")]
    UnpaddedList,
    #[error("not-a-forgery")]
    NotAForgery,
    #[error("not-a-collision-pair")]
    NotACollisionPair,
    #[error("not-a-collision")]
    NotACollision,
    #[error("duplicate-message")]
    DuplicateMessage,
    #[error("bad-index")]
    BadIndex,
    #[error("signer-cheated")]
    SignerCheated,
    #[error("variant-mismatch")]
    VariantMismatch,
    #[error("limits-exceeded")]
    LimitExceeded,
    #[error("malformed: {0}")]
    Malformed(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
