//! Signer daemon. Each connection carries at most an optional public-key
//! fetch followed by one sign request.

use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use log::{debug, info, warn};
use oblisig_core::{
    DsKeyPair, Error as CoreError, FirstMessage, HashParams, KeyFile, OsPublicParams, Variant,
};

use crate::error::{NetError, Result};
use crate::frame::{
    pubkey_frame, read_frame, reject_frame, write_frame, Frame, Limits, RejectReason, SignRequest,
    TYPE_PUBKEY_REQUEST, TYPE_SIGN_REQUEST, TYPE_SIGN_RESPONSE,
};

/// Frames accepted on one connection before it is closed.
const MAX_FRAMES_PER_CONNECTION: usize = 4;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub listen: String,
    pub key_file: PathBuf,
    pub variant: Variant,
    pub hash: HashParams,
    pub limits: Limits,
    pub io_timeout: Duration,
}

impl ServerConfig {
    pub fn new(listen: impl Into<String>, key_file: impl Into<PathBuf>, variant: Variant) -> Self {
        Self {
            listen: listen.into(),
            key_file: key_file.into(),
            variant,
            hash: HashParams::production(),
            limits: Limits::default(),
            io_timeout: Duration::from_secs(10),
        }
    }
}

/// Stateless request handler: holds only parameters, the key and limits.
pub struct Signer {
    pp: OsPublicParams,
    kp: DsKeyPair,
    limits: Limits,
}

impl Signer {
    pub fn new(pp: OsPublicParams, kp: DsKeyPair, limits: Limits) -> Result<Self> {
        if kp.sk.scheme() != pp.scheme() {
            return Err(CoreError::SchemeMismatch.into());
        }
        Ok(Self { pp, kp, limits })
    }

    pub fn public_params(&self) -> &OsPublicParams {
        &self.pp
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn max_payload(&self) -> u32 {
        self.limits.max_request_payload(self.pp.digest_len())
    }

    /// The reply and whether the connection stays open.
    pub fn respond(&self, frame: &Frame) -> (Frame, bool) {
        match frame.kind {
            TYPE_PUBKEY_REQUEST if frame.payload.is_empty() => {
                (pubkey_frame(&self.pp, &self.kp.vk), true)
            }
            TYPE_SIGN_REQUEST => (self.sign(&frame.payload), false),
            _ => (reject_frame(RejectReason::Malformed), false),
        }
    }

    fn sign(&self, payload: &[u8]) -> Frame {
        let req = match SignRequest::decode(payload, &self.pp, &self.limits) {
            Ok(r) => r,
            Err(reason) => {
                debug!("reject {reason}");
                return reject_frame(reason);
            }
        };
        let mu = match self.pp.decode_first_message(&req.mu) {
            Ok(mu) => mu,
            Err(_) => return reject_frame(RejectReason::Malformed),
        };
        match self.pp.second_message(
            &self.kp.sk,
            &req.list,
            &FirstMessage::new(mu.commitment().clone()),
        ) {
            Ok(rho) => Frame::new(TYPE_SIGN_RESPONSE, rho.to_bytes()),
            Err(CoreError::DuplicateMessage) => reject_frame(RejectReason::DuplicateMessage),
            Err(e) => {
                debug!("reject malformed: {e}");
                reject_frame(RejectReason::Malformed)
            }
        }
    }
}

fn handle(signer: &Signer, mut stream: TcpStream, timeout: Duration) {
    let _ = stream.set_read_timeout(Some(timeout));
    let _ = stream.set_write_timeout(Some(timeout));
    for _ in 0..MAX_FRAMES_PER_CONNECTION {
        let frame = match read_frame(&mut stream, signer.max_payload()) {
            Ok(f) => f,
            Err(NetError::FrameTooLarge(len)) => {
                debug!("frame of {len} bytes over limit");
                let _ = write_frame(&mut stream, &reject_frame(RejectReason::Limits));
                return;
            }
            Err(_) => return,
        };
        let (reply, keep_open) = signer.respond(&frame);
        if write_frame(&mut stream, &reply).is_err() || !keep_open {
            return;
        }
    }
}

pub struct Server {
    listener: TcpListener,
    signer: Arc<Signer>,
    stop: Arc<AtomicBool>,
    io_timeout: Duration,
}

/// Stops the accept loop from another thread.
#[derive(Clone)]
pub struct ShutdownHandle {
    stop: Arc<AtomicBool>,
    addr: SocketAddr,
}

impl ShutdownHandle {
    pub fn shutdown(&self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the blocking accept.
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
    }
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, signer: Signer, io_timeout: Duration) -> Result<Self> {
        let listener = TcpListener::bind(addr)?;
        Ok(Self {
            listener,
            signer: Arc::new(signer),
            stop: Arc::new(AtomicBool::new(false)),
            io_timeout,
        })
    }

    /// Loads the key file and binds the configured address.
    pub fn from_config(cfg: &ServerConfig) -> Result<Self> {
        let bytes = std::fs::read(&cfg.key_file)?;
        let kp = KeyFile::from_bytes(&bytes)?
            .keypair()
            .ok_or(NetError::Protocol("key file has no signing key"))?;
        let pp = OsPublicParams::setup(cfg.variant, cfg.hash, kp.vk.scheme());
        Self::bind(
            cfg.listen.as_str(),
            Signer::new(pp, kp, cfg.limits)?,
            cfg.io_timeout,
        )
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    pub fn shutdown_handle(&self) -> Result<ShutdownHandle> {
        Ok(ShutdownHandle {
            stop: Arc::clone(&self.stop),
            addr: self.local_addr()?,
        })
    }

    /// Accepts until shut down, one thread per connection.
    pub fn run(self) {
        if let Ok(a) = self.listener.local_addr() {
            info!("listening on {a}");
        }
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            match stream {
                Ok(s) => {
                    let signer = Arc::clone(&self.signer);
                    let timeout = self.io_timeout;
                    thread::spawn(move || handle(&signer, s, timeout));
                }
                Err(e) => warn!("accept failed: {e}"),
            }
        }
    }

    /// Runs on a background thread.
    pub fn spawn(self) -> Result<(ShutdownHandle, thread::JoinHandle<()>)> {
        let h = self.shutdown_handle()?;
        Ok((h, thread::spawn(move || self.run())))
    }
}
