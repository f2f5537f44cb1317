//! TCP transport for the two-move signing protocol.
//!
//! Frames are `length (u32 BE) || type || payload`. A connection carries an
//! optional public-key fetch and then exactly one sign request. The signer
//! keeps no per-session state.

pub mod client;
pub mod error;
pub mod frame;
pub mod server;

pub use client::{
    fetch_public_key, recorded_session, request_signature, request_signature_over,
    request_signature_with_timeout, RecordingStream,
};
pub use error::{NetError, Result};
pub use frame::{read_frame, write_frame, Frame, Limits, RejectReason, SignRequest};
pub use server::{Server, ServerConfig, ShutdownHandle, Signer};
