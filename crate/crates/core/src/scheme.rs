//! The 1-out-of-n oblivious signature scheme, in two variants.
//!
//! Both variants commit to the chosen message in the first move. They differ
//! in what the signer signs:
//!
//! * [`Variant::Merkle`] signs `(root, c)` once, where `root` is the Merkle
//!   root of the (padded) list. The user later proves membership of the chosen
//!   message with a Merkle path, so `ρ` is a single signature and `σ` grows
//!   with `log n`.
//! * [`Variant::Zlh`] signs `(m_i, c)` for every list entry, so `ρ` carries
//!   `n` signatures and `σ` is constant size.

use rand::{CryptoRng, RngCore};

use crate::codec::Reader;
use crate::commit::{com_keygen, commit, opens, CommitKey, CommitRandomness, Commitment};
use crate::ds::{
    ds_accepts, ds_keygen, ds_setup, ds_sign, DsKeyPair, DsPublicParams, DsSignature, SchemeId,
    SigningKey, VerifyingKey,
};
use crate::error::{Error, Result};
use crate::hash::{HashDigest, HashParams};
use crate::merkle::{
    depth_for, merkle_path, merkle_tree, pad_list, root_reconstruct, MerklePath, MerkleTree, Root,
    PAD_PREFIX,
};

/// Tag in front of `root || c` when the Merkle variant signs.
pub const TAG_SIGN_ROOT: u8 = 0x52;
/// Tag in front of `len(m) || m || c` when the per-message variant signs.
pub const TAG_SIGN_MESSAGE: u8 = 0x5A;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// One signature over the Merkle root of the list.
    Merkle,
    /// One signature per list entry.
    Zlh,
}

impl Variant {
    pub fn to_byte(self) -> u8 {
        match self {
            Variant::Merkle => 0x01,
            Variant::Zlh => 0x02,
        }
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(Variant::Merkle),
            0x02 => Ok(Variant::Zlh),
            _ => Err(Error::Malformed("variant")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Merkle => "ours",
            Variant::Zlh => "zlh",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" | "merkle" => Ok(Variant::Merkle),
            "zlh" => Ok(Variant::Zlh),
            _ => Err(Error::Malformed("variant")),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered candidate list. At least two entries, none starting with the
/// padding byte. Duplicates are representable; the signing algorithms reject
/// them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MessageList(Vec<Vec<u8>>);

impl MessageList {
    pub fn new(messages: Vec<Vec<u8>>) -> Result<Self> {
        if messages.len() < 2 {
            return Err(Error::ListTooShort);
        }
        if messages.iter().any(|m| m.first() == Some(&PAD_PREFIX)) {
            return Err(Error::ReservedPrefix);
        }
        Ok(MessageList(messages))
    }

    pub fn messages(&self) -> &[Vec<u8>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&[u8]> {
        self.0.get(i).map(Vec::as_slice)
    }

    pub fn contains(&self, m: &[u8]) -> bool {
        self.0.iter().any(|x| x == m)
    }

    pub fn has_duplicates(&self) -> bool {
        let mut sorted: Vec<&Vec<u8>> = self.0.iter().collect();
        sorted.sort_unstable();
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    /// The list padded to the next power of two.
    pub fn padded(&self) -> Vec<Vec<u8>> {
        pad_list(&self.0).expect("constructor excludes reserved prefix")
    }

    /// `n` (u32 BE) then `n × (len u32 BE || bytes)`.
    pub fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.0.len() as u32).to_be_bytes());
        for m in &self.0 {
            out.extend_from_slice(&(m.len() as u32).to_be_bytes());
            out.extend_from_slice(m);
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_into(&mut out);
        out
    }

    /// Decodes with limits applied before any per-message allocation.
    pub fn decode_from(r: &mut Reader<'_>, max_n: usize, max_message_len: usize) -> Result<Self> {
        let n = r.u32()? as usize;
        if n > max_n {
            return Err(Error::LimitExceeded);
        }
        let mut messages = Vec::with_capacity(n.min(r.remaining() / 4));
        for _ in 0..n {
            let len = r.u32()? as usize;
            if len > max_message_len {
                return Err(Error::LimitExceeded);
            }
            messages.push(r.take(len)?.to_vec());
        }
        Self::new(messages)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let l = Self::decode_from(&mut r, usize::MAX, usize::MAX)?;
        r.finish()?;
        Ok(l)
    }
}

/// Public parameters: hash, commitment key, signature parameters, variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OsPublicParams {
    hash: HashParams,
    ck: CommitKey,
    ds: DsPublicParams,
    variant: Variant,
}

impl OsPublicParams {
    pub fn setup(variant: Variant, hash: HashParams, scheme: SchemeId) -> Self {
        Self {
            hash,
            ck: com_keygen(hash),
            ds: ds_setup(scheme),
            variant,
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn hash_params(&self) -> HashParams {
        self.hash
    }

    pub fn commit_key(&self) -> &CommitKey {
        &self.ck
    }

    pub fn ds_params(&self) -> DsPublicParams {
        self.ds
    }

    pub fn scheme(&self) -> SchemeId {
        self.ds.scheme()
    }

    /// λ in bytes: the width of digests, commitments and randomness.
    pub fn digest_len(&self) -> usize {
        self.hash.output_len()
    }

    pub fn signature_len(&self) -> usize {
        self.ds.scheme().signature_len()
    }

    /// `variant (1) | hash params (3) | commit key (4) | scheme id (1)`.
    pub fn to_bytes(&self) -> [u8; 9] {
        let h = self.hash.to_bytes();
        let c = self.ck.to_bytes();
        [
            self.variant.to_byte(),
            h[0],
            h[1],
            h[2],
            c[0],
            c[1],
            c[2],
            c[3],
            self.ds.scheme().to_byte(),
        ]
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 9 {
            return Err(Error::Malformed("public params"));
        }
        let variant = Variant::from_byte(bytes[0])?;
        let hash = HashParams::from_bytes(&bytes[1..4])?;
        let ck = CommitKey::from_bytes(&bytes[4..8])?;
        if ck.hash_params() != hash {
            return Err(Error::Malformed("public params"));
        }
        let scheme = SchemeId::from_byte(bytes[8])?;
        Ok(Self::setup(variant, hash, scheme))
    }

    pub fn keygen<R: RngCore + CryptoRng>(&self, rng: &mut R) -> DsKeyPair {
        ds_keygen(&self.ds, rng)
    }

    /// User's first move: commit to `list[j]` with fresh randomness.
    pub fn first_message<R: RngCore + CryptoRng>(
        &self,
        list: &MessageList,
        j: usize,
        rng: &mut R,
    ) -> Result<(FirstMessage, UserState)> {
        if list.has_duplicates() {
            return Err(Error::DuplicateMessage);
        }
        let r = CommitRandomness::random(&self.ck, rng);
        self.first_message_with(list, j, r)
    }

    /// As [`first_message`](Self::first_message) with caller-chosen randomness.
    pub fn first_message_with(
        &self,
        list: &MessageList,
        j: usize,
        r: CommitRandomness,
    ) -> Result<(FirstMessage, UserState)> {
        if list.has_duplicates() {
            return Err(Error::DuplicateMessage);
        }
        let m = list.get(j).ok_or(Error::BadIndex)?;
        let c = commit(&self.ck, m, &r)?;
        let st = UserState {
            list: list.clone(),
            c: c.clone(),
            r,
            j,
        };
        Ok((FirstMessage(c), st))
    }

    /// Signer's move. Stateless: depends only on the key, the list and `μ`.
    pub fn second_message(
        &self,
        sk: &SigningKey,
        list: &MessageList,
        mu: &FirstMessage,
    ) -> Result<SecondMessage> {
        if list.has_duplicates() {
            return Err(Error::DuplicateMessage);
        }
        if sk.scheme() != self.scheme() {
            return Err(Error::SchemeMismatch);
        }
        if mu.0.as_bytes().len() != self.digest_len() {
            return Err(Error::Malformed("first message width"));
        }
        match self.variant {
            Variant::Merkle => {
                let (root, _) = self.tree(list);
                Ok(SecondMessage::Merkle(ds_sign(
                    sk,
                    &root_commitment_payload(&root, &mu.0),
                )))
            }
            Variant::Zlh => Ok(SecondMessage::Zlh(
                list.messages()
                    .iter()
                    .map(|m| ds_sign(sk, &message_commitment_payload(m, &mu.0)))
                    .collect(),
            )),
        }
    }

    /// User's final step: check the signer's reply and assemble `σ`.
    pub fn derive(
        &self,
        vk: &VerifyingKey,
        st: &UserState,
        rho: &SecondMessage,
    ) -> Result<(Vec<u8>, ObliviousSignature)> {
        let chosen = st.list.messages()[st.j].clone();
        match (self.variant, rho) {
            (Variant::Merkle, SecondMessage::Merkle(sig)) => {
                let (root, tree) = self.tree(&st.list);
                let path = merkle_path(&tree, st.j)?;
                if !ds_accepts(vk, &root_commitment_payload(&root, &st.c), sig) {
                    return Err(Error::SignerCheated);
                }
                Ok((
                    chosen,
                    ObliviousSignature::Merkle(MerkleSignature {
                        root,
                        c: st.c.clone(),
                        sig: sig.clone(),
                        path,
                        j: st.j as u32,
                        r: st.r.clone(),
                    }),
                ))
            }
            (Variant::Zlh, SecondMessage::Zlh(sigs)) => {
                if sigs.len() != st.list.len() {
                    return Err(Error::SignerCheated);
                }
                for (m, sig) in st.list.messages().iter().zip(sigs) {
                    if !ds_accepts(vk, &message_commitment_payload(m, &st.c), sig) {
                        return Err(Error::SignerCheated);
                    }
                }
                Ok((
                    chosen,
                    ObliviousSignature::Zlh(ZlhSignature {
                        c: st.c.clone(),
                        r: st.r.clone(),
                        sig: sigs[st.j].clone(),
                    }),
                ))
            }
            _ => Err(Error::SignerCheated),
        }
    }

    /// Never errors: anything malformed is simply rejected. Messages starting
    /// with the padding byte are outside the message space and never verify,
    /// otherwise a padding leaf could be opened as a signed message.
    pub fn verify(&self, vk: &VerifyingKey, m: &[u8], sig: &ObliviousSignature) -> bool {
        if m.first() == Some(&PAD_PREFIX) || vk.scheme() != self.scheme() {
            return false;
        }
        match (self.variant, sig) {
            (Variant::Merkle, ObliviousSignature::Merkle(s)) => {
                let w = self.digest_len();
                if s.root.as_bytes().len() != w || s.path.siblings().iter().any(|d| d.len() != w) {
                    return false;
                }
                match root_reconstruct(&self.hash, &s.path, m, s.j as usize) {
                    Ok(root) if root == s.root => {}
                    _ => return false,
                }
                opens(&self.ck, &s.c, m, &s.r)
                    && ds_accepts(vk, &root_commitment_payload(&s.root, &s.c), &s.sig)
            }
            (Variant::Zlh, ObliviousSignature::Zlh(s)) => {
                opens(&self.ck, &s.c, m, &s.r)
                    && ds_accepts(vk, &message_commitment_payload(m, &s.c), &s.sig)
            }
            _ => false,
        }
    }

    /// Merkle root and tree over the padded list.
    pub fn tree(&self, list: &MessageList) -> (Root, MerkleTree) {
        merkle_tree(&self.hash, &list.padded()).expect("padded list of n >= 2 is a valid tree")
    }

    pub fn decode_first_message(&self, bytes: &[u8]) -> Result<FirstMessage> {
        if bytes.len() != self.digest_len() {
            return Err(Error::Malformed("first message width"));
        }
        Ok(FirstMessage(Commitment::from_digest(
            HashDigest::from_bytes(bytes.to_vec()),
        )))
    }

    /// `n` is the list length the reply answers; needed for the per-message variant.
    pub fn decode_second_message(&self, bytes: &[u8], n: usize) -> Result<SecondMessage> {
        let w = self.signature_len();
        match self.variant {
            Variant::Merkle => {
                if bytes.len() != w {
                    return Err(Error::BadSignatureEncoding);
                }
                Ok(SecondMessage::Merkle(DsSignature::from_bytes(
                    bytes.to_vec(),
                )))
            }
            Variant::Zlh => {
                if Some(bytes.len()) != n.checked_mul(w) {
                    return Err(Error::BadSignatureEncoding);
                }
                Ok(SecondMessage::Zlh(
                    bytes
                        .chunks_exact(w)
                        .map(|c| DsSignature::from_bytes(c.to_vec()))
                        .collect(),
                ))
            }
        }
    }

    pub fn decode_signature(&self, bytes: &[u8]) -> Result<ObliviousSignature> {
        let d = self.digest_len();
        let w = self.signature_len();
        let mut r = Reader::new(bytes);
        let digest = |r: &mut Reader<'_>| -> Result<HashDigest> {
            Ok(HashDigest::from_bytes(r.take(d)?.to_vec()))
        };
        let sig = match self.variant {
            Variant::Merkle => {
                let root = Root::from_digest(digest(&mut r)?);
                let c = Commitment::from_digest(digest(&mut r)?);
                let sig = DsSignature::from_bytes(r.take(w)?.to_vec());
                let path = MerklePath::decode_from(&mut r, d)?;
                let j = r.u32()?;
                let rand = CommitRandomness::from_bytes(r.take(d)?.to_vec());
                ObliviousSignature::Merkle(MerkleSignature {
                    root,
                    c,
                    sig,
                    path,
                    j,
                    r: rand,
                })
            }
            Variant::Zlh => {
                let c = Commitment::from_digest(digest(&mut r)?);
                let rand = CommitRandomness::from_bytes(r.take(d)?.to_vec());
                let sig = DsSignature::from_bytes(r.take(w)?.to_vec());
                ObliviousSignature::Zlh(ZlhSignature { c, r: rand, sig })
            }
        };
        r.finish()?;
        Ok(sig)
    }
}

/// `0x52 || root || c`.
pub fn root_commitment_payload(root: &Root, c: &Commitment) -> Vec<u8> {
    let mut v = Vec::with_capacity(1 + root.as_bytes().len() + c.as_bytes().len());
    v.push(TAG_SIGN_ROOT);
    v.extend_from_slice(root.as_bytes());
    v.extend_from_slice(c.as_bytes());
    v
}

/// `0x5A || len(m) u32 BE || m || c`.
pub fn message_commitment_payload(m: &[u8], c: &Commitment) -> Vec<u8> {
    let mut v = Vec::with_capacity(5 + m.len() + c.as_bytes().len());
    v.push(TAG_SIGN_MESSAGE);
    v.extend_from_slice(&(m.len() as u32).to_be_bytes());
    v.extend_from_slice(m);
    v.extend_from_slice(c.as_bytes());
    v
}

/// `μ`: the commitment to the chosen message.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FirstMessage(Commitment);

impl FirstMessage {
    pub fn new(c: Commitment) -> Self {
        FirstMessage(c)
    }

    pub fn commitment(&self) -> &Commitment {
        &self.0
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.as_bytes().to_vec()
    }
}

/// The user's private session state. Deliberately not serializable.
#[derive(Clone)]
pub struct UserState {
    list: MessageList,
    c: Commitment,
    r: CommitRandomness,
    j: usize,
}

impl UserState {
    pub fn list(&self) -> &MessageList {
        &self.list
    }

    pub fn commitment(&self) -> &Commitment {
        &self.c
    }

    pub fn randomness(&self) -> &CommitRandomness {
        &self.r
    }

    pub fn index(&self) -> usize {
        self.j
    }
}

impl std::fmt::Debug for UserState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UserState")
            .field("n", &self.list.len())
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SecondMessage {
    Merkle(DsSignature),
    Zlh(Vec<DsSignature>),
}

impl SecondMessage {
    /// Concatenated signatures; no count prefix.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            SecondMessage::Merkle(s) => s.as_bytes().to_vec(),
            SecondMessage::Zlh(sigs) => sigs
                .iter()
                .flat_map(|s| s.as_bytes().iter().copied())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MerkleSignature {
    pub root: Root,
    pub c: Commitment,
    pub sig: DsSignature,
    pub path: MerklePath,
    pub j: u32,
    pub r: CommitRandomness,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZlhSignature {
    pub c: Commitment,
    pub r: CommitRandomness,
    pub sig: DsSignature,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObliviousSignature {
    Merkle(MerkleSignature),
    Zlh(ZlhSignature),
}

impl ObliviousSignature {
    /// Merkle: `root || c || σ_ds || k || path || j (u32 BE) || r`.
    /// Per-message: `c || r || σ_ds`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            ObliviousSignature::Merkle(s) => {
                out.extend_from_slice(s.root.as_bytes());
                out.extend_from_slice(s.c.as_bytes());
                out.extend_from_slice(s.sig.as_bytes());
                s.path.encode_into(&mut out);
                out.extend_from_slice(&s.j.to_be_bytes());
                out.extend_from_slice(s.r.as_bytes());
            }
            ObliviousSignature::Zlh(s) => {
                out.extend_from_slice(s.c.as_bytes());
                out.extend_from_slice(s.r.as_bytes());
                out.extend_from_slice(s.sig.as_bytes());
            }
        }
        out
    }

    pub fn as_merkle(&self) -> Option<&MerkleSignature> {
        match self {
            ObliviousSignature::Merkle(s) => Some(s),
            ObliviousSignature::Zlh(_) => None,
        }
    }
}

/// Depth of the Merkle path for a list of `n` messages.
pub fn path_len_for(n: usize) -> usize {
    depth_for(n)
}
