use thiserror::Error;

use crate::frame::RejectReason;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("timeout")]
    Timeout,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("rejected: {0}")]
    Rejected(RejectReason),
    #[error("signer-cheated")]
    SignerCheated,
    #[error("frame too large: {0} bytes")]
    FrameTooLarge(u32),
    #[error("protocol: {0}")]
    Protocol(&'static str),
    #[error(transparent)]
    Core(#[from] oblisig_core::Error),
}

impl NetError {
    pub(crate) fn from_io(e: std::io::Error) -> Self {
        match e.kind() {
            std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => NetError::Timeout,
            _ => NetError::Io(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, NetError>;
