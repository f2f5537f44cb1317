//! User side: first message, one round trip, derivation, verification.

use std::io::{self, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use oblisig_core::{
    Error as CoreError, MessageList, ObliviousSignature, OsPublicParams, VerifyingKey,
};
use rand::{CryptoRng, RngCore};

use crate::error::{NetError, Result};
use crate::frame::{
    decode_pubkey, read_frame, write_frame, Frame, RejectReason, SignRequest, TYPE_PUBKEY_REQUEST,
    TYPE_PUBKEY_RESPONSE, TYPE_REJECT, TYPE_SIGN_RESPONSE,
};

/// Session result plus the bytes sent and received.
pub type RecordedSession = (Result<(Vec<u8>, ObliviousSignature)>, Vec<u8>, Vec<u8>);

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

fn connect(addr: impl ToSocketAddrs, timeout: Duration) -> Result<TcpStream> {
    let mut last = None;
    for a in addr.to_socket_addrs()? {
        match TcpStream::connect_timeout(&a, timeout) {
            Ok(s) => {
                s.set_read_timeout(Some(timeout))?;
                s.set_write_timeout(Some(timeout))?;
                return Ok(s);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last
        .map(NetError::from_io)
        .unwrap_or(NetError::Protocol("no address")))
}

fn rejected(f: &Frame) -> NetError {
    match f.payload.as_slice() {
        [code] => RejectReason::from_code(*code).map_or(
            NetError::Protocol("unknown reject code"),
            NetError::Rejected,
        ),
        _ => NetError::Protocol("bad reject frame"),
    }
}

pub fn fetch_public_key(
    addr: impl ToSocketAddrs,
    timeout: Duration,
) -> Result<(OsPublicParams, VerifyingKey)> {
    let mut s = connect(addr, timeout)?;
    write_frame(&mut s, &Frame::new(TYPE_PUBKEY_REQUEST, Vec::new()))?;
    let f = read_frame(&mut s, 1024)?;
    match f.kind {
        TYPE_PUBKEY_RESPONSE => decode_pubkey(&f.payload),
        TYPE_REJECT => Err(rejected(&f)),
        _ => Err(NetError::Protocol("unexpected frame")),
    }
}

pub fn request_signature<R: RngCore + CryptoRng>(
    addr: impl ToSocketAddrs,
    pp: &OsPublicParams,
    vk: &VerifyingKey,
    list: &MessageList,
    j: usize,
    rng: &mut R,
) -> Result<(Vec<u8>, ObliviousSignature)> {
    request_signature_with_timeout(addr, pp, vk, list, j, rng, DEFAULT_TIMEOUT)
}

pub fn request_signature_with_timeout<R: RngCore + CryptoRng>(
    addr: impl ToSocketAddrs,
    pp: &OsPublicParams,
    vk: &VerifyingKey,
    list: &MessageList,
    j: usize,
    rng: &mut R,
    timeout: Duration,
) -> Result<(Vec<u8>, ObliviousSignature)> {
    let mut s = connect(addr, timeout)?;
    request_signature_over(&mut s, pp, vk, list, j, rng)
}

/// The session over any byte stream. Returns a verified pair.
pub fn request_signature_over<S: Read + Write, R: RngCore + CryptoRng>(
    stream: &mut S,
    pp: &OsPublicParams,
    vk: &VerifyingKey,
    list: &MessageList,
    j: usize,
    rng: &mut R,
) -> Result<(Vec<u8>, ObliviousSignature)> {
    if j >= list.len() {
        return Err(CoreError::BadIndex.into());
    }
    let (mu, st) = pp.first_message(list, j, rng)?;
    let req = SignRequest {
        variant: pp.variant(),
        list: list.clone(),
        mu: mu.to_bytes(),
    };
    write_frame(stream, &req.to_frame())?;
    let max = list
        .len()
        .saturating_mul(pp.signature_len())
        .saturating_add(16);
    let f = read_frame(stream, u32::try_from(max).unwrap_or(u32::MAX))?;
    let rho = match f.kind {
        TYPE_SIGN_RESPONSE => pp
            .decode_second_message(&f.payload, list.len())
            .map_err(|_| NetError::SignerCheated)?,
        TYPE_REJECT => return Err(rejected(&f)),
        _ => return Err(NetError::Protocol("unexpected frame")),
    };
    let (m, sig) = pp.derive(vk, &st, &rho).map_err(|e| match e {
        CoreError::SignerCheated => NetError::SignerCheated,
        e => e.into(),
    })?;
    if !pp.verify(vk, &m, &sig) {
        return Err(NetError::SignerCheated);
    }
    Ok((m, sig))
}

/// Byte stream wrapper that keeps a copy of everything sent and received.
pub struct RecordingStream<S> {
    inner: S,
    pub sent: Vec<u8>,
    pub received: Vec<u8>,
}

impl<S> RecordingStream<S> {
    pub fn new(inner: S) -> Self {
        Self {
            inner,
            sent: Vec::new(),
            received: Vec::new(),
        }
    }

    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: Read> Read for RecordingStream<S> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.received.extend_from_slice(&buf[..n]);
        Ok(n)
    }
}

impl<S: Write> Write for RecordingStream<S> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.sent.extend_from_slice(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Connects and runs a recorded session.
pub fn recorded_session<R: RngCore + CryptoRng>(
    addr: impl ToSocketAddrs,
    pp: &OsPublicParams,
    vk: &VerifyingKey,
    list: &MessageList,
    j: usize,
    rng: &mut R,
) -> RecordedSession {
    let mut rec = match connect(addr, DEFAULT_TIMEOUT) {
        Ok(s) => RecordingStream::new(s),
        Err(e) => return (Err(e), Vec::new(), Vec::new()),
    };
    let out = request_signature_over(&mut rec, pp, vk, list, j, rng);
    (out, rec.sent, rec.received)
}
