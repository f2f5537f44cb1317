//! Digital signatures behind one interface.
//!
//! * `Ed25519`: deterministic EdDSA, 32-byte keys, 64-byte signatures.
//!   Verification uses the strict variant, which rejects malleable encodings;
//!   the unforgeability games rely on strong unforgeability.
//! * `HmacStub`: HMAC-SHA256 tag as "signature". The verification key *is*
//!   the secret key, so this is only a fast stand-in for harness runs where no
//!   adversary inspects key material.

use ed25519_dalek::{Signer as _, SigningKey as EdSigningKey, VerifyingKey as EdVerifyingKey};
use hmac::{Hmac, Mac};
use rand::{CryptoRng, RngCore};
use sha2::Sha256;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Ed25519,
    HmacStub,
}

impl SchemeId {
    pub fn to_byte(self) -> u8 {
        match self {
            SchemeId::Ed25519 => 0x01,
            SchemeId::HmacStub => 0x02,
        }
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(SchemeId::Ed25519),
            0x02 => Ok(SchemeId::HmacStub),
            _ => Err(Error::UnknownScheme),
        }
    }

    pub fn signature_len(self) -> usize {
        match self {
            SchemeId::Ed25519 => 64,
            SchemeId::HmacStub => 32,
        }
    }

    pub fn verifying_key_len(self) -> usize {
        32
    }

    pub fn signing_key_len(self) -> usize {
        32
    }
}

impl std::str::FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ed25519" | "1" => Ok(SchemeId::Ed25519),
            "hmac-stub" | "2" => Ok(SchemeId::HmacStub),
            _ => Err(Error::UnknownScheme),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DsPublicParams {
    scheme: SchemeId,
}

impl DsPublicParams {
    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VerifyingKey {
    scheme: SchemeId,
    bytes: Vec<u8>,
}

impl VerifyingKey {
    pub fn from_bytes(scheme: SchemeId, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != scheme.verifying_key_len() {
            return Err(Error::BadKeyEncoding);
        }
        if scheme == SchemeId::Ed25519 {
            let arr: [u8; 32] = bytes.try_into().map_err(|_| Error::BadKeyEncoding)?;
            EdVerifyingKey::from_bytes(&arr).map_err(|_| Error::BadKeyEncoding)?;
        }
        Ok(Self {
            scheme,
            bytes: bytes.to_vec(),
        })
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl std::fmt::Debug for VerifyingKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VerifyingKey({:?}, ", self.scheme)?;
        for b in &self.bytes {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SigningKey {
    scheme: SchemeId,
    bytes: [u8; 32],
}

impl SigningKey {
    pub fn from_bytes(scheme: SchemeId, bytes: &[u8]) -> Result<Self> {
        let bytes: [u8; 32] = bytes.try_into().map_err(|_| Error::BadKeyEncoding)?;
        Ok(Self { scheme, bytes })
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        let bytes = match self.scheme {
            SchemeId::Ed25519 => EdSigningKey::from_bytes(&self.bytes)
                .verifying_key()
                .to_bytes()
                .to_vec(),
            SchemeId::HmacStub => self.bytes.to_vec(),
        };
        VerifyingKey {
            scheme: self.scheme,
            bytes,
        }
    }
}

impl std::fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SigningKey({:?}, <redacted>)", self.scheme)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsKeyPair {
    pub vk: VerifyingKey,
    pub sk: SigningKey,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DsSignature(Vec<u8>);

impl DsSignature {
    /// Any width is accepted here; width is checked against the scheme at
    /// verification and decoding time.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        DsSignature(bytes)
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

impl std::fmt::Debug for DsSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DsSignature(")?;
        for b in self.0.iter().take(8) {
            write!(f, "{b:02x}")?;
        }
        write!(f, "..)")
    }
}

pub fn ds_setup(scheme: SchemeId) -> DsPublicParams {
    DsPublicParams { scheme }
}

pub fn ds_keygen<R: RngCore + CryptoRng>(pp: &DsPublicParams, rng: &mut R) -> DsKeyPair {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let sk = SigningKey {
        scheme: pp.scheme,
        bytes: seed,
    };
    DsKeyPair {
        vk: sk.verifying_key(),
        sk,
    }
}

pub fn ds_sign(sk: &SigningKey, message: &[u8]) -> DsSignature {
    match sk.scheme {
        SchemeId::Ed25519 => {
            let key = EdSigningKey::from_bytes(&sk.bytes);
            DsSignature(key.sign(message).to_bytes().to_vec())
        }
        SchemeId::HmacStub => DsSignature(hmac_tag(&sk.bytes, message)),
    }
}

/// `Ok(false)` for a well-sized but invalid signature; an error only when the
/// signature width does not match the scheme.
pub fn ds_verify(vk: &VerifyingKey, message: &[u8], sig: &DsSignature) -> Result<bool> {
    if sig.len() != vk.scheme.signature_len() {
        return Err(Error::BadSignatureEncoding);
    }
    match vk.scheme {
        SchemeId::Ed25519 => {
            let Ok(arr) = <[u8; 32]>::try_from(vk.bytes.as_slice()) else {
                return Ok(false);
            };
            let Ok(key) = EdVerifyingKey::from_bytes(&arr) else {
                return Ok(false);
            };
            let Ok(s) = ed25519_dalek::Signature::from_slice(sig.as_bytes()) else {
                return Ok(false);
            };
            Ok(key.verify_strict(message, &s).is_ok())
        }
        SchemeId::HmacStub => {
            let mut mac = <Hmac<Sha256> as Mac>::new_from_slice(&vk.bytes)
                .expect("hmac accepts any key length");
            mac.update(message);
            Ok(mac.verify_slice(sig.as_bytes()).is_ok())
        }
    }
}

/// Convenience: treats encoding errors as rejection.
pub fn ds_accepts(vk: &VerifyingKey, message: &[u8], sig: &DsSignature) -> bool {
    ds_verify(vk, message, sig).unwrap_or(false)
}

fn hmac_tag(key: &[u8], message: &[u8]) -> Vec<u8> {
    let mut mac = <Hmac<Sha256> as Mac>::new_from_slice(key).expect("hmac accepts any key length");
    mac.update(message);
    mac.finalize().into_bytes().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn keypair(scheme: SchemeId, seed: u64) -> DsKeyPair {
        ds_keygen(&ds_setup(scheme), &mut ChaCha20Rng::seed_from_u64(seed))
    }

    #[test]
    fn correctness_both_schemes() {
        for scheme in [SchemeId::Ed25519, SchemeId::HmacStub] {
            let kp = keypair(scheme, 1);
            for m in [&b""[..], b"a", b"some longer message"] {
                let sig = ds_sign(&kp.sk, m);
                assert_eq!(sig.len(), scheme.signature_len());
                assert_eq!(ds_verify(&kp.vk, m, &sig), Ok(true));
            }
        }
    }

    #[test]
    fn signing_is_deterministic() {
        let kp = keypair(SchemeId::Ed25519, 2);
        assert_eq!(ds_sign(&kp.sk, b"x"), ds_sign(&kp.sk, b"x"));
    }

    #[test]
    fn every_single_bit_flip_rejected() {
        for scheme in [SchemeId::Ed25519, SchemeId::HmacStub] {
            let kp = keypair(scheme, 3);
            let sig = ds_sign(&kp.sk, b"flip me");
            for bit in 0..sig.len() * 8 {
                let mut b = sig.as_bytes().to_vec();
                b[bit / 8] ^= 1 << (bit % 8);
                let flipped = DsSignature::from_bytes(b);
                assert_eq!(
                    ds_verify(&kp.vk, b"flip me", &flipped),
                    Ok(false),
                    "bit {bit}"
                );
            }
        }
    }

    #[test]
    fn other_messages_rejected() {
        let kp = keypair(SchemeId::Ed25519, 4);
        let sig = ds_sign(&kp.sk, b"m");
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let mut m = vec![0u8; 1 + (rng.next_u32() % 40) as usize];
            rng.fill_bytes(&mut m);
            if m == b"m" {
                continue;
            }
            assert_eq!(ds_verify(&kp.vk, &m, &sig), Ok(false));
        }
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let kp = keypair(SchemeId::Ed25519, 6);
        let short = DsSignature::from_bytes(vec![0u8; 63]);
        assert_eq!(
            ds_verify(&kp.vk, b"m", &short),
            Err(Error::BadSignatureEncoding)
        );
        let zeros = DsSignature::from_bytes(vec![0u8; 64]);
        assert_eq!(ds_verify(&kp.vk, b"m", &zeros), Ok(false));
    }

    #[test]
    fn wrong_key_rejected() {
        let a = keypair(SchemeId::Ed25519, 7);
        let b = keypair(SchemeId::Ed25519, 8);
        let sig = ds_sign(&a.sk, b"m");
        assert_eq!(ds_verify(&b.vk, b"m", &sig), Ok(false));
    }
}
