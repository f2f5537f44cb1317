//! Named adversaries for the unforgeability games.
//!
//! White-box adversaries use the leaked signing key and only exercise game
//! plumbing. The collision adversaries run birthday searches and succeed only
//! with a truncated hash.

use std::collections::HashMap;

use oblisig_core::merkle::{leaf_hash, merkle_path, node_hash};
use oblisig_core::{
    commit, CommitRandomness, DsSignature, FirstMessage, HashDigest, MerklePath, MerkleSignature,
    MessageList, ObliviousSignature, OsPublicParams, Root, SecondMessage, SigningKey, Variant,
};
use rand::{Rng, RngCore};

use crate::oracle::{Adversary, FinReply, Forgery, GameEnv, GameRng, Halt, Oracles};

/// Search budget for birthday attacks: about `2^(λ/2 + 4)` tries, capped so
/// production-parameter runs give up quickly.
pub fn birthday_budget(pp: &OsPublicParams) -> usize {
    let exp = (pp.hash_params().output_bits() / 2 + 4).min(14);
    1 << exp
}

fn tagged(prefix: &str, rng: &mut GameRng) -> Vec<u8> {
    format!("{prefix}-{:016x}", rng.next_u64()).into_bytes()
}

fn list_of(messages: Vec<Vec<u8>>) -> MessageList {
    MessageList::new(messages).expect("adversary lists are well-formed")
}

/// One honest session: commit, query, derive.
fn honest_session(
    env: &GameEnv<'_>,
    o: &mut dyn Oracles,
    list: &MessageList,
    j: usize,
    rng: &mut GameRng,
) -> Option<Forgery> {
    let (mu, st) = env.pp.first_message(list, j, rng).ok()?;
    let rho = o.sign(list, &mu)?;
    env.pp.derive(env.vk, &st, &rho).ok()
}

/// A valid signature on `m` produced entirely with the signing key.
fn forge_with_key(
    pp: &OsPublicParams,
    sk: &SigningKey,
    m: &[u8],
    rng: &mut GameRng,
) -> Option<ObliviousSignature> {
    let list = list_of(vec![m.to_vec(), tagged("decoy", rng)]);
    let (mu, st) = pp.first_message(&list, 0, rng).ok()?;
    let rho = pp.second_message(sk, &list, &mu).ok()?;
    let vk = sk.verifying_key();
    pp.derive(&vk, &st, &rho).ok().map(|(_, s)| s)
}

fn fresh_randomness(pp: &OsPublicParams, rng: &mut GameRng) -> CommitRandomness {
    CommitRandomness::random(pp.commit_key(), rng)
}

/// Completes `runs` honest sessions and outputs the last submitted pair.
pub struct HonestUser {
    pub runs: usize,
}

impl Adversary for HonestUser {
    fn name(&self) -> &'static str {
        "honest_user"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let mut last = None;
        for _ in 0..self.runs {
            let list = list_of((0..4).map(|_| tagged("honest", rng)).collect());
            let j = rng.gen_range(0..list.len());
            let Some((m, sig)) = honest_session(env, o, &list, j, rng) else {
                return Ok(None);
            };
            if o.fin(&m, &sig)? != FinReply::Accept {
                return Ok(None);
            }
            last = Some((m, sig));
        }
        Ok(last)
    }
}

/// Two sessions on `(m0, m1)`; closes both with the first signature and
/// outputs the second.
pub struct TrivialReuse;

impl Adversary for TrivialReuse {
    fn name(&self) -> &'static str {
        "trivial_reuse"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let list = list_of(vec![b"m0".to_vec(), b"m1".to_vec()]);
        let Some((m0, s0)) = honest_session(env, o, &list, 0, rng) else {
            return Ok(None);
        };
        o.fin(&m0, &s0)?;
        let Some(second) = honest_session(env, o, &list, 1, rng) else {
            return Ok(None);
        };
        o.fin(&m0, &s0)?;
        Ok(Some(second))
    }
}

/// White-box: opens a session, then closes it with a key-made signature on a
/// message outside the list.
pub struct OffListFin;

impl Adversary for OffListFin {
    fn name(&self) -> &'static str {
        "off_list_fin"
    }

    fn white_box(&self) -> bool {
        true
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let Some(sk) = env.leaked_sk else {
            return Ok(None);
        };
        let list = list_of((0..4).map(|_| tagged("listed", rng)).collect());
        let Ok((mu, _)) = env.pp.first_message(&list, 0, rng) else {
            return Ok(None);
        };
        if o.sign(&list, &mu).is_none() {
            return Ok(None);
        }
        let m = tagged("unlisted", rng);
        let Some(sig) = forge_with_key(env.pp, sk, &m, rng) else {
            return Ok(None);
        };
        o.fin(&m, &sig)?;
        Ok(None)
    }
}

/// White-box: no queries, outputs a key-made signature.
pub struct FreshForgery;

impl Adversary for FreshForgery {
    fn name(&self) -> &'static str {
        "fresh_forgery"
    }

    fn white_box(&self) -> bool {
        true
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        _: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let Some(sk) = env.leaked_sk else {
            return Ok(None);
        };
        let m = tagged("fresh", rng);
        Ok(forge_with_key(env.pp, sk, &m, rng).map(|s| (m, s)))
    }
}

/// Finds `commit(m0; r0) = commit(m1; r1)`, obtains one signature on that
/// commitment and opens it both ways.
pub struct CommitmentCollision;

impl CommitmentCollision {
    fn search(
        pp: &OsPublicParams,
        m0: &[u8],
        m1: &[u8],
        rng: &mut GameRng,
    ) -> Option<(CommitRandomness, CommitRandomness)> {
        let ck = pp.commit_key();
        let mut seen: [HashMap<Vec<u8>, CommitRandomness>; 2] = [HashMap::new(), HashMap::new()];
        for t in 0..birthday_budget(pp) {
            let side = t % 2;
            let m = if side == 0 { m0 } else { m1 };
            let r = fresh_randomness(pp, rng);
            let c = commit(ck, m, &r).ok()?.as_bytes().to_vec();
            if let Some(other) = seen[1 - side].get(&c) {
                return Some(if side == 0 {
                    (r, other.clone())
                } else {
                    (other.clone(), r)
                });
            }
            seen[side].insert(c, r);
        }
        None
    }
}

impl Adversary for CommitmentCollision {
    fn name(&self) -> &'static str {
        "commitment_collision"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let pp = env.pp;
        let (m0, m1) = (b"cc-a".to_vec(), b"cc-b".to_vec());
        let Some((r0, r1)) = Self::search(pp, &m0, &m1, rng) else {
            return Ok(None);
        };
        let list = list_of(vec![m0, m1, tagged("cc", rng), tagged("cc", rng)]);
        let (Ok((mu, st0)), Ok((_, st1))) = (
            pp.first_message_with(&list, 0, r0),
            pp.first_message_with(&list, 1, r1),
        ) else {
            return Ok(None);
        };
        let Some(rho) = o.sign(&list, &mu) else {
            return Ok(None);
        };
        let (Ok((a, sa)), Ok(second)) =
            (pp.derive(env.vk, &st0, &rho), pp.derive(env.vk, &st1, &rho))
        else {
            return Ok(None);
        };
        o.fin(&a, &sa)?;
        Ok(Some(second))
    }
}

/// Distinct `a, b` with equal leaf digests.
fn leaf_collision(
    pp: &OsPublicParams,
    prefix: &str,
    rng: &mut GameRng,
) -> Option<(Vec<u8>, Vec<u8>)> {
    let h = pp.hash_params();
    let mut seen: HashMap<HashDigest, Vec<u8>> = HashMap::new();
    for _ in 0..birthday_budget(pp) {
        let x = tagged(prefix, rng);
        let d = leaf_hash(&h, &x);
        match seen.get(&d) {
            Some(y) if *y != x => return Some((y.clone(), x)),
            _ => {
                seen.insert(d, x);
            }
        }
    }
    None
}

fn merkle_rho(rho: SecondMessage) -> Option<DsSignature> {
    match rho {
        SecondMessage::Merkle(s) => Some(s),
        SecondMessage::Zlh(_) => None,
    }
}

/// Signs a list containing `a`, commits to an unlisted `b` with
/// `leaf(a) = leaf(b)`, and closes the session with `b` on `a`'s path.
pub struct OffListLeafCollision;

impl Adversary for OffListLeafCollision {
    fn name(&self) -> &'static str {
        "off_list_leaf_collision"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let pp = env.pp;
        if pp.variant() != Variant::Merkle {
            return Ok(None);
        }
        let Some((a, b)) = leaf_collision(pp, "leaf", rng) else {
            return Ok(None);
        };
        let list = list_of(vec![
            a,
            tagged("pad", rng),
            tagged("pad", rng),
            tagged("pad", rng),
        ]);
        let r = fresh_randomness(pp, rng);
        let Ok(c) = commit(pp.commit_key(), &b, &r) else {
            return Ok(None);
        };
        let Some(ds) = o
            .sign(&list, &FirstMessage::new(c.clone()))
            .and_then(merkle_rho)
        else {
            return Ok(None);
        };
        let (root, tree) = pp.tree(&list);
        let Ok(path) = merkle_path(&tree, 0) else {
            return Ok(None);
        };
        let sig = ObliviousSignature::Merkle(MerkleSignature {
            root,
            c,
            sig: ds,
            path,
            j: 0,
            r,
        });
        o.fin(&b, &sig)?;
        Ok(None)
    }
}

/// Lists colliding `a, b` together and presents `a` at `b`'s index.
pub struct IndexSwapLeafCollision;

impl Adversary for IndexSwapLeafCollision {
    fn name(&self) -> &'static str {
        "index_swap_leaf_collision"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let pp = env.pp;
        if pp.variant() != Variant::Merkle {
            return Ok(None);
        }
        let Some((a, b)) = leaf_collision(pp, "swap", rng) else {
            return Ok(None);
        };
        let list = list_of(vec![a.clone(), b, tagged("pad", rng), tagged("pad", rng)]);
        let Some((m, first)) = honest_session(env, o, &list, 0, rng) else {
            return Ok(None);
        };
        let Some(s) = first.as_merkle() else {
            return Ok(None);
        };
        let (_, tree) = pp.tree(&list);
        let Ok(path) = merkle_path(&tree, 1) else {
            return Ok(None);
        };
        let swapped = ObliviousSignature::Merkle(MerkleSignature {
            path,
            j: 1,
            ..s.clone()
        });
        o.fin(&m, &first)?;
        Ok(Some((a, swapped)))
    }
}

/// Finds siblings `s ≠ s'` with `node(leaf(a), s) = node(leaf(a), s')` and
/// presents `a` with both paths.
pub struct InternalNodeCollision;

impl InternalNodeCollision {
    fn search(pp: &OsPublicParams, a: &[u8], rng: &mut GameRng) -> Option<(Vec<u8>, HashDigest)> {
        let h = pp.hash_params();
        let ha = leaf_hash(&h, a);
        let mut seen: HashMap<HashDigest, (Vec<u8>, HashDigest)> = HashMap::new();
        for _ in 0..birthday_budget(pp) {
            let x = tagged("node", rng);
            let s = leaf_hash(&h, &x);
            let t = node_hash(&h, &ha, &s);
            match seen.get(&t) {
                Some((_, s0)) if *s0 != s => return Some((x, s0.clone())),
                Some(_) => {}
                None => {
                    seen.insert(t, (x, s));
                }
            }
        }
        None
    }
}

impl Adversary for InternalNodeCollision {
    fn name(&self) -> &'static str {
        "internal_node_collision"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let pp = env.pp;
        if pp.variant() != Variant::Merkle {
            return Ok(None);
        }
        let a = b"node-target".to_vec();
        let Some((x, other_sibling)) = Self::search(pp, &a, rng) else {
            return Ok(None);
        };
        let list = list_of(vec![a.clone(), x, tagged("pad", rng), tagged("pad", rng)]);
        let Some((m, first)) = honest_session(env, o, &list, 0, rng) else {
            return Ok(None);
        };
        let Some(s) = first.as_merkle() else {
            return Ok(None);
        };
        let mut siblings = s.path.siblings().to_vec();
        *siblings.last_mut().expect("depth 2") = other_sibling;
        let second = ObliviousSignature::Merkle(MerkleSignature {
            path: MerklePath::new(siblings),
            ..s.clone()
        });
        o.fin(&m, &first)?;
        Ok(Some((a, second)))
    }
}

/// Opens two sessions on disjoint lists and closes the first with the
/// second's signature.
pub struct ConcurrentInterleaver;

impl Adversary for ConcurrentInterleaver {
    fn name(&self) -> &'static str {
        "concurrent_interleaver"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let l1 = list_of(vec![b"first-0".to_vec(), b"first-1".to_vec()]);
        let l2 = list_of(vec![b"second-0".to_vec(), b"second-1".to_vec()]);
        let (Ok((mu1, _)), Ok((mu2, st2))) = (
            env.pp.first_message(&l1, 0, rng),
            env.pp.first_message(&l2, 0, rng),
        ) else {
            return Ok(None);
        };
        if o.sign(&l1, &mu1).is_none() {
            return Ok(None);
        }
        let Some(rho2) = o.sign(&l2, &mu2) else {
            return Ok(None);
        };
        let Ok((m, sig)) = env.pp.derive(env.vk, &st2, &rho2) else {
            return Ok(None);
        };
        o.fin(&m, &sig)?;
        Ok(None)
    }
}

/// Opens a session and never closes it.
pub struct GiveUp;

impl Adversary for GiveUp {
    fn name(&self) -> &'static str {
        "give_up"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let list = list_of(vec![b"left".to_vec(), b"right".to_vec()]);
        honest_session(env, o, &list, 1, rng);
        Ok(None)
    }
}

/// Closes a session with random bytes shaped like a signature.
pub struct Garbage;

impl Garbage {
    fn noise(pp: &OsPublicParams, rng: &mut GameRng) -> ObliviousSignature {
        let mut bytes = |n: usize| {
            let mut v = vec![0u8; n];
            rng.fill_bytes(&mut v);
            v
        };
        let d = pp.digest_len();
        match pp.variant() {
            Variant::Merkle => ObliviousSignature::Merkle(MerkleSignature {
                root: Root::from_digest(HashDigest::from_bytes(bytes(d))),
                c: oblisig_core::Commitment::from_digest(HashDigest::from_bytes(bytes(d))),
                sig: DsSignature::from_bytes(bytes(pp.signature_len())),
                path: MerklePath::new(vec![HashDigest::from_bytes(bytes(d)); 1]),
                j: 0,
                r: CommitRandomness::from_bytes(bytes(d)),
            }),
            Variant::Zlh => ObliviousSignature::Zlh(oblisig_core::ZlhSignature {
                c: oblisig_core::Commitment::from_digest(HashDigest::from_bytes(bytes(d))),
                r: CommitRandomness::from_bytes(bytes(d)),
                sig: DsSignature::from_bytes(bytes(pp.signature_len())),
            }),
        }
    }
}

impl Adversary for Garbage {
    fn name(&self) -> &'static str {
        "garbage"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let list = list_of(vec![b"left".to_vec(), b"right".to_vec()]);
        let Ok((mu, _)) = env.pp.first_message(&list, 0, rng) else {
            return Ok(None);
        };
        if o.sign(&list, &mu).is_none() {
            return Ok(None);
        }
        let sig = Self::noise(env.pp, rng);
        o.fin(b"left", &sig)?;
        Ok(Some((b"right".to_vec(), Self::noise(env.pp, rng))))
    }
}

/// The full suite in a fixed order.
pub fn suite() -> Vec<Box<dyn Adversary>> {
    vec![
        Box::new(HonestUser { runs: 3 }),
        Box::new(TrivialReuse),
        Box::new(OffListFin),
        Box::new(FreshForgery),
        Box::new(CommitmentCollision),
        Box::new(OffListLeafCollision),
        Box::new(IndexSwapLeafCollision),
        Box::new(InternalNodeCollision),
        Box::new(ConcurrentInterleaver),
        Box::new(GiveUp),
        Box::new(Garbage),
    ]
}
