//! Wire format: `length (u32 BE, payload only) || type (1 byte) || payload`.

use std::fmt;
use std::io::{Read, Write};

use oblisig_core::codec::Reader;
use oblisig_core::{MessageList, OsPublicParams, Variant, VerifyingKey};

use crate::error::{NetError, Result};

pub const TYPE_SIGN_REQUEST: u8 = 0x01;
pub const TYPE_SIGN_RESPONSE: u8 = 0x02;
pub const TYPE_REJECT: u8 = 0x03;
pub const TYPE_PUBKEY_REQUEST: u8 = 0x04;
pub const TYPE_PUBKEY_RESPONSE: u8 = 0x05;

pub const HEADER_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    DuplicateMessage,
    Limits,
    Malformed,
}

impl RejectReason {
    pub fn code(self) -> u8 {
        match self {
            RejectReason::DuplicateMessage => 0x01,
            RejectReason::Limits => 0x02,
            RejectReason::Malformed => 0x03,
        }
    }

    pub fn from_code(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(RejectReason::DuplicateMessage),
            0x02 => Some(RejectReason::Limits),
            0x03 => Some(RejectReason::Malformed),
            _ => None,
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::DuplicateMessage => "duplicate-message",
            RejectReason::Limits => "limits",
            RejectReason::Malformed => "malformed",
        })
    }
}

/// A raw frame; the type byte is not interpreted here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub kind: u8,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: u8, payload: Vec<u8>) -> Self {
        Self { kind, payload }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.push(self.kind);
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses exactly one frame from `bytes`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(NetError::Protocol("short frame"));
        }
        let len = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
        if bytes.len() - HEADER_LEN != len {
            return Err(NetError::Protocol("length mismatch"));
        }
        Ok(Self::new(bytes[4], bytes[HEADER_LEN..].to_vec()))
    }
}

/// Reads one frame, refusing lengths above `max_payload` before reading the
/// payload.
pub fn read_frame<R: Read>(r: &mut R, max_payload: u32) -> Result<Frame> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(NetError::from_io)?;
    let len = u32::from_be_bytes(header[..4].try_into().expect("4 bytes"));
    if len > max_payload {
        return Err(NetError::FrameTooLarge(len));
    }
    let mut payload = vec![0u8; len as usize];
    r.read_exact(&mut payload).map_err(NetError::from_io)?;
    Ok(Frame::new(header[4], payload))
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> Result<()> {
    w.write_all(&frame.to_bytes()).map_err(NetError::from_io)?;
    w.flush().map_err(NetError::from_io)
}

/// Limits applied while decoding a request, before any signing work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_n: usize,
    pub max_message_bytes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_n: 1024,
            max_message_bytes: 64 * 1024,
        }
    }
}

impl Limits {
    /// Largest SignRequest payload these limits admit, with `mu_len` bytes of μ.
    pub fn max_request_payload(&self, mu_len: usize) -> u32 {
        let body = 1 + 4 + self.max_n.saturating_mul(4 + self.max_message_bytes) + mu_len;
        u32::try_from(body).unwrap_or(u32::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignRequest {
    pub variant: Variant,
    pub list: MessageList,
    pub mu: Vec<u8>,
}

impl SignRequest {
    /// `variant || MessageList || μ`.
    pub fn to_frame(&self) -> Frame {
        let mut p = vec![self.variant.to_byte()];
        self.list.encode_into(&mut p);
        p.extend_from_slice(&self.mu);
        Frame::new(TYPE_SIGN_REQUEST, p)
    }

    /// Offset of μ inside the frame bytes.
    pub fn mu_offset(&self) -> usize {
        HEADER_LEN + 1 + self.list.to_bytes().len()
    }

    /// Decodes and validates against the server's parameters. A list with
    /// duplicates decodes fine; the signer rejects it separately.
    pub fn decode(
        payload: &[u8],
        pp: &OsPublicParams,
        limits: &Limits,
    ) -> std::result::Result<Self, RejectReason> {
        let mut r = Reader::new(payload);
        let variant = r
            .u8()
            .ok()
            .and_then(|b| Variant::from_byte(b).ok())
            .ok_or(RejectReason::Malformed)?;
        if variant != pp.variant() {
            return Err(RejectReason::Malformed);
        }
        let list = MessageList::decode_from(&mut r, limits.max_n, limits.max_message_bytes)
            .map_err(|e| match e {
                oblisig_core::Error::LimitExceeded => RejectReason::Limits,
                _ => RejectReason::Malformed,
            })?;
        let mu = r
            .take(pp.digest_len())
            .map_err(|_| RejectReason::Malformed)?
            .to_vec();
        r.finish().map_err(|_| RejectReason::Malformed)?;
        Ok(Self { variant, list, mu })
    }
}

pub fn reject_frame(reason: RejectReason) -> Frame {
    Frame::new(TYPE_REJECT, vec![reason.code()])
}

/// `pp (9 bytes) || vk`.
pub fn pubkey_frame(pp: &OsPublicParams, vk: &VerifyingKey) -> Frame {
    let mut p = pp.to_bytes().to_vec();
    p.extend_from_slice(vk.as_bytes());
    Frame::new(TYPE_PUBKEY_RESPONSE, p)
}

pub fn decode_pubkey(payload: &[u8]) -> Result<(OsPublicParams, VerifyingKey)> {
    if payload.len() < 9 {
        return Err(NetError::Protocol("short public key response"));
    }
    let pp = OsPublicParams::from_bytes(&payload[..9])?;
    let vk = VerifyingKey::from_bytes(pp.scheme(), &payload[9..])?;
    Ok((pp, vk))
}
