//! Complete binary Merkle tree over a message list.
//!
//! Leaves are `H(0x00 || m_i)` and internal nodes `H(0x01 || left || right)`.
//! Node addresses follow the bit-string convention: the root is the empty
//! string and leaf `i` sits at the k-bit big-endian binary of `i`. A path
//! lists sibling digests from the root-adjacent level down to the leaf level.
//!
//! Lists whose length is not a power of two are padded with reserved
//! messages `0xFF || counter` (counter as u32 big-endian, starting at 1); real
//! messages may not start with `0xFF`.

use crate::codec::Reader;
use crate::error::{Error, Result};
use crate::hash::{HashDigest, HashParams, TAG_LEAF, TAG_NODE};

/// First byte reserved for padding leaves.
pub const PAD_PREFIX: u8 = 0xFF;

/// Leaf index bits, most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPath(Vec<u8>);

impl BitPath {
    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn i2b(index: usize, depth: usize) -> Result<BitPath> {
    if depth >= usize::BITS as usize || index >> depth != 0 {
        return Err(Error::IndexOutOfRange);
    }
    Ok(BitPath(
        (0..depth)
            .rev()
            .map(|shift| ((index >> shift) & 1) as u8)
            .collect(),
    ))
}

/// ⌈log₂ n⌉; the tree depth for a list of `n` messages.
pub fn depth_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

pub fn padding_message(counter: u32) -> Vec<u8> {
    let mut m = Vec::with_capacity(5);
    m.push(PAD_PREFIX);
    m.extend_from_slice(&counter.to_be_bytes());
    m
}

/// Extends `messages` to the next power of two with counter-distinct padding
/// leaves. A list that is already a power of two is returned unchanged.
pub fn pad_list(messages: &[Vec<u8>]) -> Result<Vec<Vec<u8>>> {
    if messages.iter().any(|m| m.first() == Some(&PAD_PREFIX)) {
        return Err(Error::ReservedPrefix);
    }
    let n = messages.len();
    let target = 1usize << depth_for(n);
    let mut out = messages.to_vec();
    out.extend((1..=(target - n) as u32).map(padding_message));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root(HashDigest);

impl Root {
    pub fn from_digest(d: HashDigest) -> Self {
        Root(d)
    }

    pub fn digest(&self) -> &HashDigest {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

/// Every node digest of the tree plus the leaf preimages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTree {
    hash: HashParams,
    depth: usize,
    // levels[l] holds the 2^l digests of level l; levels[0] is the root.
    levels: Vec<Vec<HashDigest>>,
    leaves: Vec<Vec<u8>>,
}

impl MerkleTree {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn hash_params(&self) -> HashParams {
        self.hash
    }

    pub fn root(&self) -> Root {
        Root(self.levels[0][0].clone())
    }

    pub fn leaves(&self) -> &[Vec<u8>] {
        &self.leaves
    }

    /// Digest of node `index` on `level` (0 = root, `depth` = leaves).
    pub fn node(&self, level: usize, index: usize) -> &HashDigest {
        &self.levels[level][index]
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Preimage that hashes to node `index` on `level`.
    fn preimage(&self, level: usize, index: usize) -> Vec<u8> {
        if level == self.depth {
            leaf_input(&self.leaves[index])
        } else {
            node_input(
                &self.levels[level + 1][2 * index],
                &self.levels[level + 1][2 * index + 1],
            )
        }
    }
}

fn leaf_input(m: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(1 + m.len());
    v.push(TAG_LEAF);
    v.extend_from_slice(m);
    v
}

fn node_input(left: &HashDigest, right: &HashDigest) -> Vec<u8> {
    let mut v = Vec::with_capacity(1 + left.len() + right.len());
    v.push(TAG_NODE);
    v.extend_from_slice(left.as_bytes());
    v.extend_from_slice(right.as_bytes());
    v
}

pub fn leaf_hash(hash: &HashParams, m: &[u8]) -> HashDigest {
    hash.hash_parts(&[&[TAG_LEAF], m])
}

pub fn node_hash(hash: &HashParams, left: &HashDigest, right: &HashDigest) -> HashDigest {
    hash.hash_parts(&[&[TAG_NODE], left.as_bytes(), right.as_bytes()])
}

/// Builds the tree over an already padded list of `2^k` messages, `k ≥ 1`.
pub fn merkle_tree(hash: &HashParams, messages: &[Vec<u8>]) -> Result<(Root, MerkleTree)> {
    let n = messages.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::UnpaddedList);
    }
    let depth = depth_for(n);
    let mut levels = vec![Vec::new(); depth + 1];
    levels[depth] = messages.iter().map(|m| leaf_hash(hash, m)).collect();
    for level in (0..depth).rev() {
        let below = &levels[level + 1];
        let up = below
            .chunks_exact(2)
            .map(|pair| node_hash(hash, &pair[0], &pair[1]))
            .collect();
        levels[level] = up;
    }
    let tree = MerkleTree {
        hash: *hash,
        depth,
        levels,
        leaves: messages.to_vec(),
    };
    Ok((tree.root(), tree))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MerklePath(Vec<HashDigest>);

impl MerklePath {
    pub fn new(siblings: Vec<HashDigest>) -> Self {
        MerklePath(siblings)
    }

    pub fn siblings(&self) -> &[HashDigest] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `k` (1 byte) followed by `k` concatenated digests.
    pub fn encode_into(&self, out: &mut Vec<u8>) {
        out.push(self.0.len() as u8);
        for d in &self.0 {
            out.extend_from_slice(d.as_bytes());
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_into(&mut out);
        out
    }

    pub fn decode_from(r: &mut Reader<'_>, digest_len: usize) -> Result<Self> {
        let k = r.u8()? as usize;
        let mut siblings = Vec::with_capacity(k);
        for _ in 0..k {
            siblings.push(HashDigest::from_bytes(r.take(digest_len)?.to_vec()));
        }
        Ok(MerklePath(siblings))
    }

    pub fn from_bytes(bytes: &[u8], digest_len: usize) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let p = Self::decode_from(&mut r, digest_len)?;
        r.finish()?;
        Ok(p)
    }
}

pub fn merkle_path(tree: &MerkleTree, index: usize) -> Result<MerklePath> {
    let bits = i2b(index, tree.depth)?;
    let mut siblings = Vec::with_capacity(tree.depth);
    let mut prefix = 0usize;
    for (l, &b) in bits.bits().iter().enumerate() {
        let level = l + 1;
        let sibling = (prefix << 1) | (1 - b as usize);
        siblings.push(tree.levels[level][sibling].clone());
        prefix = (prefix << 1) | b as usize;
    }
    Ok(MerklePath(siblings))
}

/// Per-level fold record: the digest reached at that level and the input that
/// produced it. Index 0 is the leaf level, the last entry is the root.
fn fold(
    hash: &HashParams,
    path: &MerklePath,
    m: &[u8],
    index: usize,
) -> Result<Vec<(Vec<u8>, HashDigest)>> {
    let bits = i2b(index, path.len())?;
    let mut input = leaf_input(m);
    let mut cur = hash.hash(&input);
    let mut out = Vec::with_capacity(path.len() + 1);
    out.push((input, cur.clone()));
    for (sib, &b) in path.0.iter().zip(bits.bits()).rev() {
        input = if b == 0 {
            node_input(&cur, sib)
        } else {
            node_input(sib, &cur)
        };
        cur = hash.hash(&input);
        out.push((input, cur.clone()));
    }
    Ok(out)
}

/// Folds the leaf digest of `m` up `path`. Only an out-of-range index is an
/// error; any other wrong input simply yields a different root.
pub fn root_reconstruct(
    hash: &HashParams,
    path: &MerklePath,
    m: &[u8],
    index: usize,
) -> Result<Root> {
    let bits = i2b(index, path.len())?;
    let mut cur = leaf_hash(hash, m);
    for (sib, &b) in path.0.iter().zip(bits.bits()).rev() {
        cur = if b == 0 {
            node_hash(hash, &cur, sib)
        } else {
            node_hash(hash, sib, &cur)
        };
    }
    Ok(Root(cur))
}

/// Two distinct inputs with equal digests. Construction checks the claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashCollision {
    x: Vec<u8>,
    x_prime: Vec<u8>,
}

impl HashCollision {
    pub fn new(hash: &HashParams, x: Vec<u8>, x_prime: Vec<u8>) -> Result<Self> {
        if x != x_prime && hash.hash(&x) == hash.hash(&x_prime) {
            Ok(Self { x, x_prime })
        } else {
            Err(Error::NotACollision)
        }
    }

    pub fn x(&self) -> &[u8] {
        &self.x
    }

    pub fn x_prime(&self) -> &[u8] {
        &self.x_prime
    }

    pub fn holds(&self, hash: &HashParams) -> bool {
        self.x != self.x_prime && hash.hash(&self.x) == hash.hash(&self.x_prime)
    }
}

/// Collision from a membership proof for `m_forged ≠ m_index` against the
/// honest tree. Walks bottom-up and returns the lowest level where the forged
/// and honest digests agree while their inputs differ.
pub fn ext1(
    tree: &MerkleTree,
    m_forged: &[u8],
    path: &MerklePath,
    index: usize,
) -> Result<HashCollision> {
    if path.len() != tree.depth || index >> tree.depth != 0 {
        return Err(Error::NotAForgery);
    }
    if tree.leaves[index] == m_forged {
        return Err(Error::NotAForgery);
    }
    let forged = fold(&tree.hash, path, m_forged, index).map_err(|_| Error::NotAForgery)?;
    if forged.last().map(|(_, d)| d) != Some(&tree.levels[0][0]) {
        return Err(Error::NotAForgery);
    }
    for (up, (input, digest)) in forged.into_iter().enumerate() {
        let level = tree.depth - up;
        let node = index >> up;
        if &digest == tree.node(level, node) {
            let honest = tree.preimage(level, node);
            if honest != input {
                return HashCollision::new(&tree.hash, input, honest);
            }
        }
    }
    // Unreachable when the preconditions hold: the leaf inputs differ and the
    // root digests agree, so some level must qualify.
    Err(Error::NotAForgery)
}

/// Collision from two distinct paths that place the same `(m, index)` under
/// the same root.
pub fn ext2(
    hash: &HashParams,
    m: &[u8],
    index: usize,
    path: &MerklePath,
    path_prime: &MerklePath,
) -> Result<HashCollision> {
    if path == path_prime || path.len() != path_prime.len() {
        return Err(Error::NotACollisionPair);
    }
    let a = fold(hash, path, m, index).map_err(|_| Error::NotACollisionPair)?;
    let b = fold(hash, path_prime, m, index).map_err(|_| Error::NotACollisionPair)?;
    if a.last().map(|x| &x.1) != b.last().map(|x| &x.1) {
        return Err(Error::NotACollisionPair);
    }
    for ((ia, da), (ib, db)) in a.into_iter().zip(b) {
        if da == db && ia != ib {
            return HashCollision::new(hash, ia, ib);
        }
    }
    Err(Error::NotACollisionPair)
}
