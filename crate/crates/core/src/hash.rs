//! The hash family shared by the commitment and the Merkle tree.
//!
//! Two instantiations exist. `Production` is SHA-256 with a 256-bit output.
//! `WeakTest` is SHA-256 truncated to 16 or 32 bits; it is small enough that
//! collisions and second preimages can be found by brute force, which is what
//! the extractor and binding tests need.

use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};

/// Leaf hash domain tag.
pub const TAG_LEAF: u8 = 0x00;
/// Internal node hash domain tag.
pub const TAG_NODE: u8 = 0x01;
/// Commitment domain tag.
pub const TAG_COMMIT: u8 = 0x02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashFamily {
    Production,
    WeakTest,
}

impl HashFamily {
    pub fn to_byte(self) -> u8 {
        match self {
            HashFamily::Production => 0x01,
            HashFamily::WeakTest => 0x02,
        }
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(HashFamily::Production),
            0x02 => Ok(HashFamily::WeakTest),
            _ => Err(Error::BadHashParams),
        }
    }
}

/// A member of the hash family together with its output length in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashParams {
    family: HashFamily,
    output_bits: u16,
}

impl HashParams {
    pub fn new(family: HashFamily, output_bits: u16) -> Result<Self> {
        let ok = match family {
            HashFamily::Production => output_bits == 256,
            HashFamily::WeakTest => output_bits == 16 || output_bits == 32,
        };
        if ok {
            Ok(Self {
                family,
                output_bits,
            })
        } else {
            Err(Error::BadHashParams)
        }
    }

    pub fn production() -> Self {
        Self {
            family: HashFamily::Production,
            output_bits: 256,
        }
    }

    /// Truncated SHA-256, `bits` ∈ {16, 32}.
    pub fn weak(bits: u16) -> Result<Self> {
        Self::new(HashFamily::WeakTest, bits)
    }

    pub fn family(&self) -> HashFamily {
        self.family
    }

    /// λ in bits.
    pub fn output_bits(&self) -> usize {
        self.output_bits as usize
    }

    /// λ in bytes.
    pub fn output_len(&self) -> usize {
        self.output_bits as usize / 8
    }

    pub fn hash(&self, input: &[u8]) -> HashDigest {
        self.hash_parts(&[input])
    }

    /// Hashes the concatenation of `parts` without materializing it.
    pub fn hash_parts(&self, parts: &[&[u8]]) -> HashDigest {
        let mut h = Sha256::new();
        for p in parts {
            h.update(p);
        }
        let full = h.finalize();
        HashDigest(full[..self.output_len()].to_vec())
    }

    /// Serialized as family byte then output bits as u16 big-endian.
    pub fn to_bytes(&self) -> [u8; 3] {
        let b = self.output_bits.to_be_bytes();
        [self.family.to_byte(), b[0], b[1]]
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 3 {
            return Err(Error::BadHashParams);
        }
        let family = HashFamily::from_byte(bytes[0])?;
        Self::new(family, u16::from_be_bytes([bytes[1], bytes[2]]))
    }
}

/// A λ-bit hash output.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HashDigest(Vec<u8>);

impl HashDigest {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        HashDigest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[u8]> for HashDigest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Debug for HashDigest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HashDigest(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}
