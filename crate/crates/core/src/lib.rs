//! 1-out-of-n oblivious signatures.
//!
//! A user holding a list of `n` messages obtains a signature on exactly one
//! of them in a single round trip; the signer sees the list but not the
//! choice. Two constructions share the primitives here: a Merkle-tree variant
//! whose signer reply is one signature regardless of `n`, and the
//! per-message baseline that replies with `n` signatures.

pub mod bench;
pub mod codec;
pub mod commit;
pub mod ds;
pub mod error;
pub mod hash;
pub mod keyfile;
pub mod merkle;
pub mod scheme;

pub use commit::{com_keygen, commit, CommitKey, CommitRandomness, Commitment};
pub use ds::{
    ds_keygen, ds_setup, ds_sign, ds_verify, DsKeyPair, DsPublicParams, DsSignature, SchemeId,
    SigningKey, VerifyingKey,
};
pub use error::{Error, Result};
pub use hash::{HashDigest, HashFamily, HashParams};
pub use keyfile::KeyFile;
pub use merkle::{
    ext1, ext2, i2b, merkle_path, merkle_tree, pad_list, root_reconstruct, HashCollision,
    MerklePath, MerkleTree, Root,
};
pub use scheme::{
    FirstMessage, MerkleSignature, MessageList, ObliviousSignature, OsPublicParams, SecondMessage,
    UserState, Variant, ZlhSignature,
};
