//! Security experiments for 1-out-of-n oblivious signatures.
//!
//! Games: strong unforgeability of the signature scheme, ambiguity,
//! sequential strong unforgeability, the older message-ledger game, and a
//! flagged base game whose wins are turned into signature forgeries,
//! commitment collisions or hash collisions.

pub mod adversaries;
pub mod ambiguity;
pub mod base;
pub mod ds_game;
pub mod error;
pub mod oracle;
pub mod seq;
pub mod suite;

pub use base::{run_base_game, BaseOutcome, GameFlags, ReductionOutcome};
pub use error::GameError;
pub use oracle::{
    Adversary, Event, FinReply, Forgery, GameEnv, GameRng, Halt, Oracles, Transcript,
};
pub use seq::{
    concurrent_attack_demo, run_old_model_game, run_seq_seufcma, run_seq_seufcma_with,
    ConcurrentReport, GameOutcome, OracleMode,
};
pub use suite::{run_suite, Record, SuiteConfig, SuiteReport};
