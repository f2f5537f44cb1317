//! Strong unforgeability of the underlying signature scheme.

use oblisig_core::ds::{ds_accepts, ds_setup, ds_sign};
use oblisig_core::{ds_keygen, DsSignature, SchemeId, SigningKey, VerifyingKey};
use rand::RngCore;

use crate::oracle::{rngs, GameRng};

pub trait DsAdversary: Sync {
    fn name(&self) -> &'static str;

    fn white_box(&self) -> bool {
        false
    }

    fn run(
        &self,
        vk: &VerifyingKey,
        leaked_sk: Option<&SigningKey>,
        sign: &mut dyn FnMut(&[u8]) -> DsSignature,
        rng: &mut GameRng,
    ) -> Option<(Vec<u8>, DsSignature)>;
}

/// 1 iff the output verifies and was not returned by the signing oracle.
pub fn run_ds_seufcma(adv: &dyn DsAdversary, scheme: SchemeId, seed: u64) -> bool {
    let (mut challenger, mut rng) = rngs(seed);
    let kp = ds_keygen(&ds_setup(scheme), &mut challenger);
    let mut ledger: Vec<(Vec<u8>, DsSignature)> = Vec::new();
    let out = {
        let mut sign = |m: &[u8]| {
            let s = ds_sign(&kp.sk, m);
            ledger.push((m.to_vec(), s.clone()));
            s
        };
        adv.run(
            &kp.vk,
            adv.white_box().then_some(&kp.sk),
            &mut sign,
            &mut rng,
        )
    };
    match out {
        Some((m, s)) => {
            ds_accepts(&kp.vk, &m, &s) && !ledger.iter().any(|(lm, ls)| *lm == m && *ls == s)
        }
        None => false,
    }
}

/// Queries one message and outputs the oracle's answer.
pub struct DsReplay;

impl DsAdversary for DsReplay {
    fn name(&self) -> &'static str {
        "ds_replay"
    }

    fn run(
        &self,
        _: &VerifyingKey,
        _: Option<&SigningKey>,
        sign: &mut dyn FnMut(&[u8]) -> DsSignature,
        _: &mut GameRng,
    ) -> Option<(Vec<u8>, DsSignature)> {
        let m = b"replayed".to_vec();
        let s = sign(&m);
        Some((m, s))
    }
}

/// White-box: signs a fresh message with the leaked key.
pub struct DsLeakedKey;

impl DsAdversary for DsLeakedKey {
    fn name(&self) -> &'static str {
        "ds_leaked_key"
    }

    fn white_box(&self) -> bool {
        true
    }

    fn run(
        &self,
        _: &VerifyingKey,
        sk: Option<&SigningKey>,
        sign: &mut dyn FnMut(&[u8]) -> DsSignature,
        _: &mut GameRng,
    ) -> Option<(Vec<u8>, DsSignature)> {
        sign(b"queried");
        let m = b"never queried".to_vec();
        Some((m.clone(), ds_sign(sk?, &m)))
    }
}

/// Random bytes of the right width.
pub struct DsGarbage;

impl DsAdversary for DsGarbage {
    fn name(&self) -> &'static str {
        "ds_garbage"
    }

    fn run(
        &self,
        vk: &VerifyingKey,
        _: Option<&SigningKey>,
        _: &mut dyn FnMut(&[u8]) -> DsSignature,
        rng: &mut GameRng,
    ) -> Option<(Vec<u8>, DsSignature)> {
        let mut s = vec![0u8; vk.scheme().signature_len()];
        rng.fill_bytes(&mut s);
        Some((b"garbage".to_vec(), DsSignature::from_bytes(s)))
    }
}
