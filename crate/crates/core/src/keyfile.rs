//! Key file format.
//!
//! ```text
//! "OSK1" | scheme_id (1) | vk_len (u16 BE) | vk | sk_len (u16 BE) | sk
//! ```
//!
//! A public-only file carries `sk_len = 0`.

use crate::ds::{DsKeyPair, SchemeId, SigningKey, VerifyingKey};
use crate::error::{Error, Result};

pub const KEY_FILE_MAGIC: &[u8; 4] = b"OSK1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyFile {
    pub vk: VerifyingKey,
    pub sk: Option<SigningKey>,
}

impl KeyFile {
    pub fn secret(kp: &DsKeyPair) -> Self {
        Self {
            vk: kp.vk.clone(),
            sk: Some(kp.sk.clone()),
        }
    }

    pub fn public(vk: &VerifyingKey) -> Self {
        Self {
            vk: vk.clone(),
            sk: None,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let vk = self.vk.as_bytes();
        let sk = self.sk.as_ref().map(|s| s.as_bytes()).unwrap_or(&[]);
        let mut out = Vec::with_capacity(4 + 1 + 2 + vk.len() + 2 + sk.len());
        out.extend_from_slice(KEY_FILE_MAGIC);
        out.push(self.vk.scheme().to_byte());
        out.extend_from_slice(&(vk.len() as u16).to_be_bytes());
        out.extend_from_slice(vk);
        out.extend_from_slice(&(sk.len() as u16).to_be_bytes());
        out.extend_from_slice(sk);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let rest = bytes
            .strip_prefix(KEY_FILE_MAGIC.as_slice())
            .ok_or(Error::Malformed("key file magic"))?;
        let (&scheme, rest) = rest.split_first().ok_or(Error::Malformed("key file"))?;
        let scheme = SchemeId::from_byte(scheme)?;
        let (vk, rest) = take_u16_prefixed(rest)?;
        let (sk, rest) = take_u16_prefixed(rest)?;
        if !rest.is_empty() {
            return Err(Error::Malformed("trailing bytes in key file"));
        }
        let vk = VerifyingKey::from_bytes(scheme, vk)?;
        let sk = if sk.is_empty() {
            None
        } else {
            let sk = SigningKey::from_bytes(scheme, sk)?;
            if sk.verifying_key() != vk {
                return Err(Error::BadKeyEncoding);
            }
            Some(sk)
        };
        Ok(Self { vk, sk })
    }

    pub fn keypair(&self) -> Option<DsKeyPair> {
        self.sk.as_ref().map(|sk| DsKeyPair {
            vk: self.vk.clone(),
            sk: sk.clone(),
        })
    }
}

fn take_u16_prefixed(bytes: &[u8]) -> Result<(&[u8], &[u8])> {
    if bytes.len() < 2 {
        return Err(Error::Malformed("key file length"));
    }
    let len = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
    let rest = &bytes[2..];
    if rest.len() < len {
        return Err(Error::Malformed("key file length"));
    }
    Ok(rest.split_at(len))
}
