//! Hash-based commitment `c = H(0x02 || len(m) || m || r)`.
//!
//! `len(m)` is the message length as an 8-byte big-endian integer, so the
//! boundary between `m` and `r` is never ambiguous. Strong binding therefore
//! reduces to collision resistance of the hash, and hiding rests on `r`
//! being a uniform λ-bit string.

use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::hash::{HashDigest, HashParams, TAG_COMMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CommitKey {
    hash: HashParams,
    domain_tag: u8,
}

impl CommitKey {
    pub fn hash_params(&self) -> HashParams {
        self.hash
    }

    pub fn domain_tag(&self) -> u8 {
        self.domain_tag
    }

    /// Size in bytes of both a commitment and its randomness.
    pub fn output_len(&self) -> usize {
        self.hash.output_len()
    }

    pub fn to_bytes(&self) -> [u8; 4] {
        let h = self.hash.to_bytes();
        [self.domain_tag, h[0], h[1], h[2]]
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 4 || bytes[0] != TAG_COMMIT {
            return Err(Error::Malformed("commit key"));
        }
        Ok(Self {
            hash: HashParams::from_bytes(&bytes[1..])?,
            domain_tag: TAG_COMMIT,
        })
    }
}

/// Deterministic: the key is fully determined by the hash parameters.
pub fn com_keygen(hash: HashParams) -> CommitKey {
    CommitKey {
        hash,
        domain_tag: TAG_COMMIT,
    }
}

/// Opening information; exactly λ bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CommitRandomness(Vec<u8>);

impl CommitRandomness {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        CommitRandomness(bytes)
    }

    pub fn random<R: RngCore + CryptoRng>(ck: &CommitKey, rng: &mut R) -> Self {
        let mut r = vec![0u8; ck.output_len()];
        rng.fill_bytes(&mut r);
        CommitRandomness(r)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Debug for CommitRandomness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CommitRandomness({} bytes)", self.0.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Commitment(HashDigest);

impl Commitment {
    pub fn from_digest(d: HashDigest) -> Self {
        Commitment(d)
    }

    pub fn digest(&self) -> &HashDigest {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

pub fn commit(ck: &CommitKey, message: &[u8], r: &CommitRandomness) -> Result<Commitment> {
    if r.len() != ck.output_len() {
        return Err(Error::BadRandomnessLength);
    }
    let len = (message.len() as u64).to_be_bytes();
    let d = ck
        .hash
        .hash_parts(&[&[ck.domain_tag], &len, message, r.as_bytes()]);
    Ok(Commitment(d))
}

/// True iff `(m, r)` opens `c`. A randomness of the wrong length never opens.
pub fn opens(ck: &CommitKey, c: &Commitment, message: &[u8], r: &CommitRandomness) -> bool {
    commit(ck, message, r).map(|c2| &c2 == c).unwrap_or(false)
}
