use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread;
use std::time::Duration;

use oblisig_core::{HashParams, MessageList, OsPublicParams, SchemeId, Variant};
use oblisig_net::frame::{
    self, TYPE_PUBKEY_REQUEST, TYPE_REJECT, TYPE_SIGN_REQUEST, TYPE_SIGN_RESPONSE,
};
use oblisig_net::{
    fetch_public_key, read_frame, recorded_session, request_signature,
    request_signature_with_timeout, write_frame, Frame, Limits, NetError, RejectReason, Server,
    ShutdownHandle, SignRequest, Signer,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

struct Running {
    addr: SocketAddr,
    pp: OsPublicParams,
    vk: oblisig_core::VerifyingKey,
    stop: ShutdownHandle,
    join: Option<thread::JoinHandle<()>>,
}

impl Drop for Running {
    fn drop(&mut self) {
        self.stop.shutdown();
        if let Some(j) = self.join.take() {
            let _ = j.join();
        }
    }
}

fn start(variant: Variant, seed: u64) -> Running {
    let pp = OsPublicParams::setup(variant, HashParams::production(), SchemeId::Ed25519);
    let kp = pp.keygen(&mut ChaCha20Rng::seed_from_u64(seed));
    let vk = kp.vk.clone();
    let signer = Signer::new(pp, kp, Limits::default()).unwrap();
    let server = Server::bind("127.0.0.1:0", signer, Duration::from_secs(5)).unwrap();
    let addr = server.local_addr().unwrap();
    let (stop, join) = server.spawn().unwrap();
    Running {
        addr,
        pp,
        vk,
        stop,
        join: Some(join),
    }
}

fn list(n: usize) -> MessageList {
    MessageList::new(
        (0..n)
            .map(|i| format!("message {i}").into_bytes())
            .collect(),
    )
    .unwrap()
}

fn exchange(addr: SocketAddr, bytes: &[u8]) -> Option<Frame> {
    let mut s = TcpStream::connect(addr).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(5))).unwrap();
    // The server may close before reading everything; ignore write errors.
    let _ = s.write_all(bytes);
    let _ = s.shutdown(std::net::Shutdown::Write);
    read_frame(&mut s, 1 << 20).ok()
}

fn reject_code(f: &Frame) -> Option<u8> {
    (f.kind == TYPE_REJECT && f.payload.len() == 1).then(|| f.payload[0])
}

#[test]
fn loopback_both_variants() {
    for variant in [Variant::Merkle, Variant::Zlh] {
        let srv = start(variant, 1);
        let l = list(4);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (m, sig) = request_signature(srv.addr, &srv.pp, &srv.vk, &l, 2, &mut rng).unwrap();
        assert_eq!(m, b"message 2");
        assert!(srv.pp.verify(&srv.vk, &m, &sig));
        assert!(!srv.pp.verify(&srv.vk, b"message 1", &sig));
    }
}

#[test]
fn public_key_fetch_matches() {
    let srv = start(Variant::Merkle, 3);
    let (pp, vk) = fetch_public_key(srv.addr, Duration::from_secs(5)).unwrap();
    assert_eq!(pp.to_bytes(), srv.pp.to_bytes());
    assert_eq!(vk.as_bytes(), srv.vk.as_bytes());
}

#[test]
fn wrong_key_reports_signer_cheated() {
    let srv = start(Variant::Merkle, 4);
    let other = srv.pp.keygen(&mut ChaCha20Rng::seed_from_u64(99)).vk;
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let err = request_signature(srv.addr, &srv.pp, &other, &list(4), 0, &mut rng).unwrap_err();
    assert!(matches!(err, NetError::SignerCheated), "{err:?}");
}

#[test]
fn duplicate_list_rejected() {
    let srv = start(Variant::Merkle, 6);
    let dup = MessageList::new(vec![b"a".to_vec(), b"b".to_vec(), b"a".to_vec()]).unwrap();
    let req = SignRequest {
        variant: Variant::Merkle,
        list: dup,
        mu: vec![7; srv.pp.digest_len()],
    };
    let f = exchange(srv.addr, &req.to_frame().to_bytes()).unwrap();
    assert_eq!(reject_code(&f), Some(RejectReason::DuplicateMessage.code()));
}

#[test]
fn over_limit_rejected() {
    let srv = start(Variant::Zlh, 7);
    let big = list(Limits::default().max_n + 1);
    let req = SignRequest {
        variant: Variant::Zlh,
        list: big,
        mu: vec![0; srv.pp.digest_len()],
    };
    let f = exchange(srv.addr, &req.to_frame().to_bytes()).unwrap();
    assert_eq!(reject_code(&f), Some(RejectReason::Limits.code()));

    let long = MessageList::new(vec![
        vec![1; Limits::default().max_message_bytes + 1],
        b"x".to_vec(),
    ])
    .unwrap();
    let req = SignRequest {
        variant: Variant::Zlh,
        list: long,
        mu: vec![0; srv.pp.digest_len()],
    };
    let f = exchange(srv.addr, &req.to_frame().to_bytes()).unwrap();
    assert_eq!(reject_code(&f), Some(RejectReason::Limits.code()));

    // Header announcing a payload far beyond any admissible request.
    let mut hdr = u32::MAX.to_be_bytes().to_vec();
    hdr.push(TYPE_SIGN_REQUEST);
    let f = exchange(srv.addr, &hdr).unwrap();
    assert_eq!(reject_code(&f), Some(RejectReason::Limits.code()));
}

#[test]
fn variant_mismatch_is_malformed() {
    let srv = start(Variant::Merkle, 8);
    let req = SignRequest {
        variant: Variant::Zlh,
        list: list(2),
        mu: vec![0; srv.pp.digest_len()],
    };
    let f = exchange(srv.addr, &req.to_frame().to_bytes()).unwrap();
    assert_eq!(reject_code(&f), Some(RejectReason::Malformed.code()));
}

#[test]
fn frame_round_trip_random() {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..300);
        let mut payload = vec![0u8; len];
        rng.fill_bytes(&mut payload);
        let f = Frame::new(rng.gen(), payload);
        let bytes = f.to_bytes();
        assert_eq!(bytes.len(), frame::HEADER_LEN + len);
        assert_eq!(Frame::from_bytes(&bytes).unwrap(), f);
        assert_eq!(read_frame(&mut bytes.as_slice(), len as u32).unwrap(), f);
        if len > 0 {
            assert!(matches!(
                read_frame(&mut bytes.as_slice(), len as u32 - 1),
                Err(NetError::FrameTooLarge(_))
            ));
            assert!(Frame::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        }
    }
}

/// Two sessions on the same list with different indices: requests may differ
/// only in μ, responses only inside ρ.
#[test]
fn transcripts_differ_only_in_mu_and_rho() {
    for variant in [Variant::Merkle, Variant::Zlh] {
        let srv = start(variant, 11);
        let l = list(8);
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let (r0, sent0, recv0) = recorded_session(srv.addr, &srv.pp, &srv.vk, &l, 1, &mut rng);
        let (r1, sent1, recv1) = recorded_session(srv.addr, &srv.pp, &srv.vk, &l, 6, &mut rng);
        assert_eq!(r0.unwrap().0, b"message 1");
        assert_eq!(r1.unwrap().0, b"message 6");

        assert_eq!(sent0.len(), sent1.len());
        let mu_at = SignRequest {
            variant,
            list: l.clone(),
            mu: Vec::new(),
        }
        .mu_offset();
        assert_eq!(sent0.len(), mu_at + srv.pp.digest_len());
        assert_eq!(sent0[..mu_at], sent1[..mu_at]);
        assert_ne!(sent0[mu_at..], sent1[mu_at..]);

        assert_eq!(recv0.len(), recv1.len());
        assert_eq!(recv0[..frame::HEADER_LEN], recv1[..frame::HEADER_LEN]);
        assert_eq!(recv0[4], TYPE_SIGN_RESPONSE);
    }
}

fn valid_request(pp: &OsPublicParams, rng: &mut ChaCha20Rng) -> Vec<u8> {
    let l = list(rng.gen_range(2..6));
    let (mu, _) = pp.first_message(&l, 0, rng).unwrap();
    SignRequest {
        variant: pp.variant(),
        list: l,
        mu: mu.to_bytes(),
    }
    .to_frame()
    .to_bytes()
}

fn mutate(base: &[u8], rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut b = base.to_vec();
    match rng.gen_range(0..6) {
        0 => {
            let i = rng.gen_range(0..b.len());
            b[i] ^= 1 << rng.gen_range(0..8);
        }
        1 => b.truncate(rng.gen_range(0..b.len())),
        2 => b.extend((0..rng.gen_range(1..8)).map(|_| rng.gen::<u8>())),
        3 => b[4] = rng.gen(),
        4 => {
            let n = rng.gen_range(0..64);
            b = (0..n).map(|_| rng.gen()).collect();
        }
        _ => {
            // Corrupt the list count.
            let off = frame::HEADER_LEN + 1;
            b[off..off + 4].copy_from_slice(&rng.gen::<u32>().to_be_bytes());
        }
    }
    b
}

/// True when the bytes start with a complete frame the signer would answer
/// with a signature or a key. Trailing bytes after it are never read.
fn locally_acceptable(bytes: &[u8], pp: &OsPublicParams) -> bool {
    let Ok(f) = read_frame(&mut &bytes[..], u32::MAX) else {
        return false;
    };
    match f.kind {
        TYPE_PUBKEY_REQUEST => f.payload.is_empty(),
        TYPE_SIGN_REQUEST => match SignRequest::decode(&f.payload, pp, &Limits::default()) {
            Ok(req) => !req.list.has_duplicates(),
            Err(_) => false,
        },
        _ => false,
    }
}

#[test]
fn malformed_frames_never_signed() {
    let srv = start(Variant::Merkle, 13);
    let mut rng = ChaCha20Rng::seed_from_u64(14);
    let base = valid_request(&srv.pp, &mut rng);
    let mut sent = 0;
    while sent < 10_000 {
        let bytes = mutate(&base, &mut rng);
        if locally_acceptable(&bytes, &srv.pp) {
            continue;
        }
        sent += 1;
        if let Some(f) = exchange(srv.addr, &bytes) {
            assert_ne!(
                f.kind,
                TYPE_SIGN_RESPONSE,
                "signed a malformed frame: {}",
                hex(&bytes)
            );
        }
    }
    let (m, sig) = request_signature(srv.addr, &srv.pp, &srv.vk, &list(3), 1, &mut rng).unwrap();
    assert!(srv.pp.verify(&srv.vk, &m, &sig));
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

/// A peer that answers with a given frame after reading the request.
fn fake_signer(reply: Option<Frame>) -> SocketAddr {
    let l = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = l.local_addr().unwrap();
    thread::spawn(move || {
        let (mut s, _) = l.accept().unwrap();
        let _ = read_frame(&mut s, u32::MAX);
        match reply {
            Some(f) => {
                let _ = write_frame(&mut s, &f);
            }
            None => {
                let mut sink = [0u8; 1];
                let _ = s.read(&mut sink);
            }
        }
    });
    addr
}

#[test]
fn bad_response_is_signer_cheated() {
    let pp = OsPublicParams::setup(Variant::Zlh, HashParams::production(), SchemeId::Ed25519);
    let vk = pp.keygen(&mut ChaCha20Rng::seed_from_u64(15)).vk;
    let mut rng = ChaCha20Rng::seed_from_u64(16);
    for payload in [vec![0u8; 64 * 4], vec![0u8; 10]] {
        let addr = fake_signer(Some(Frame::new(TYPE_SIGN_RESPONSE, payload)));
        let err = request_signature(addr, &pp, &vk, &list(4), 3, &mut rng).unwrap_err();
        assert!(matches!(err, NetError::SignerCheated), "{err:?}");
    }
}

#[test]
fn reject_is_surfaced() {
    let pp = OsPublicParams::setup(Variant::Merkle, HashParams::production(), SchemeId::Ed25519);
    let vk = pp.keygen(&mut ChaCha20Rng::seed_from_u64(17)).vk;
    let addr = fake_signer(Some(frame::reject_frame(RejectReason::Limits)));
    let err = request_signature(
        addr,
        &pp,
        &vk,
        &list(2),
        0,
        &mut ChaCha20Rng::seed_from_u64(1),
    )
    .unwrap_err();
    assert!(
        matches!(err, NetError::Rejected(RejectReason::Limits)),
        "{err:?}"
    );
}

#[test]
fn silent_peer_times_out() {
    let pp = OsPublicParams::setup(Variant::Merkle, HashParams::production(), SchemeId::Ed25519);
    let vk = pp.keygen(&mut ChaCha20Rng::seed_from_u64(18)).vk;
    let addr = fake_signer(None);
    let mut rng = ChaCha20Rng::seed_from_u64(19);
    let err = request_signature_with_timeout(
        addr,
        &pp,
        &vk,
        &list(2),
        0,
        &mut rng,
        Duration::from_millis(200),
    )
    .unwrap_err();
    assert!(matches!(err, NetError::Timeout), "{err:?}");
}
