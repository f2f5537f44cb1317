//! The flagged base game for the Merkle variant and the three reductions
//! that turn a win into a signature forgery, a commitment collision or a
//! hash collision.

use oblisig_core::merkle::{ext1, ext2};
use oblisig_core::scheme::root_commitment_payload;
use oblisig_core::{
    commit, CommitRandomness, Commitment, DsKeyPair, DsSignature, FirstMessage, HashCollision,
    MerkleSignature, MessageList, ObliviousSignature, OsPublicParams, Root, SecondMessage, Variant,
    VerifyingKey,
};
use serde::Serialize;

use crate::error::GameError;
use crate::oracle::{Adversary, Event, FinReply, Forgery, GameEnv, Halt, Oracles, Transcript};
use crate::seq::keys;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GameFlags {
    #[serde(rename = "final")]
    pub final_: bool,
    pub ds_reuse: bool,
    pub ds_forge: bool,
    pub com_coll: bool,
}

impl GameFlags {
    /// Every terminal combination the base game can reach on a win.
    pub fn is_terminal_combination(&self) -> bool {
        !(self.ds_forge && (self.ds_reuse || self.com_coll)) && (!self.com_coll || self.ds_reuse)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionOutcome {
    None,
    DsForgery {
        message: Vec<u8>,
        signature: DsSignature,
    },
    ComCollision {
        m: Vec<u8>,
        r: CommitRandomness,
        m_prime: Vec<u8>,
        r_prime: CommitRandomness,
    },
    HashCollision(HashCollision),
}

impl ReductionOutcome {
    pub fn kind(&self) -> &'static str {
        match self {
            ReductionOutcome::None => "none",
            ReductionOutcome::DsForgery { .. } => "ds_forgery",
            ReductionOutcome::ComCollision { .. } => "com_collision",
            ReductionOutcome::HashCollision(_) => "hash_collision",
        }
    }

    /// Recomputes the claim. `ds_ledger` is every `(payload, σ_ds)` the
    /// signing oracle produced.
    pub fn is_valid(
        &self,
        pp: &OsPublicParams,
        vk: &VerifyingKey,
        ds_ledger: &[(Vec<u8>, DsSignature)],
    ) -> bool {
        match self {
            ReductionOutcome::None => false,
            ReductionOutcome::DsForgery { message, signature } => {
                oblisig_core::ds::ds_accepts(vk, message, signature)
                    && !ds_ledger
                        .iter()
                        .any(|(m, s)| m == message && s == signature)
            }
            ReductionOutcome::ComCollision {
                m,
                r,
                m_prime,
                r_prime,
            } => {
                (m, r) != (m_prime, r_prime)
                    && match (
                        commit(pp.commit_key(), m, r),
                        commit(pp.commit_key(), m_prime, r_prime),
                    ) {
                        (Ok(a), Ok(b)) => a == b,
                        _ => false,
                    }
            }
            ReductionOutcome::HashCollision(h) => h.holds(&pp.hash_params()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TableEntry {
    pub index: usize,
    pub list: MessageList,
    pub root: Root,
    pub c: Commitment,
    pub sig: DsSignature,
}

#[derive(Debug, Clone)]
pub struct BaseOutcome {
    pub bit: bool,
    pub flags: GameFlags,
    pub outcome: ReductionOutcome,
    pub transcript: Transcript,
    /// Every `(payload, σ_ds)` issued by `O^Sign`.
    pub ds_ledger: Vec<(Vec<u8>, DsSignature)>,
    pub vk: VerifyingKey,
}

/// Which branch produced the win.
#[derive(Debug, Clone, Copy)]
enum Win {
    /// `O^Fin` with the signed triple of the current session.
    TableHit { entry: usize },
    /// No two ledger entries share a triple.
    Forge,
    /// Ledger entries `a` and `b` share a triple.
    Pair { a: usize, b: usize },
}

struct BaseGame<'a> {
    pp: &'a OsPublicParams,
    kp: &'a DsKeyPair,
    ledger: Vec<Forgery>,
    table: Vec<TableEntry>,
    q_sign: usize,
    q_fin: usize,
    flags: GameFlags,
    decided: Option<bool>,
    win: Option<Win>,
    violation: Option<GameError>,
    transcript: Transcript,
}

fn merkle(sig: &ObliviousSignature) -> &MerkleSignature {
    sig.as_merkle().expect("verified under the Merkle variant")
}

fn triple(sig: &ObliviousSignature) -> (&Root, &Commitment, &DsSignature) {
    let s = merkle(sig);
    (&s.root, &s.c, &s.sig)
}

impl BaseGame<'_> {
    fn check_invariant(&mut self) {
        if !(self.q_fin <= self.q_sign && self.q_sign <= self.q_fin + 1) && self.violation.is_none()
        {
            self.violation = Some(GameError::Sequentiality {
                q_sign: self.q_sign,
                q_fin: self.q_fin,
            });
        }
    }

    fn in_ledger(&self, m: &[u8], sig: &ObliviousSignature) -> bool {
        self.ledger.iter().any(|(lm, ls)| lm == m && ls == sig)
    }

    /// A pair of distinct ledger entries with the same `(root, c, σ_ds)`,
    /// preferring one that involves the newest entry.
    fn find_pair(&self) -> Option<(usize, usize)> {
        let last = self.ledger.len().checked_sub(1)?;
        let t = triple(&self.ledger[last].1);
        if let Some(i) = (0..last).find(|&i| triple(&self.ledger[i].1) == t) {
            return Some((i, last));
        }
        for b in 0..self.ledger.len() {
            for a in 0..b {
                if triple(&self.ledger[a].1) == triple(&self.ledger[b].1) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Shared tail of the final-output and `O^Fin` branches.
    fn classify(&mut self) {
        match self.find_pair() {
            None => {
                self.flags.ds_forge = true;
                self.win = Some(Win::Forge);
            }
            Some((a, b)) => {
                self.flags.ds_reuse = true;
                let (ma, sa) = (&self.ledger[a].0, merkle(&self.ledger[a].1));
                let (mb, sb) = (&self.ledger[b].0, merkle(&self.ledger[b].1));
                if (ma, &sa.r) != (mb, &sb.r) {
                    self.flags.com_coll = true;
                }
                self.win = Some(Win::Pair { a, b });
            }
        }
        self.decided = Some(true);
    }

    fn fin_inner(&mut self, m: &[u8], sig: &ObliviousSignature) -> Result<FinReply, Halt> {
        if self.decided.is_some() {
            return Err(Halt);
        }
        if self.q_sign != self.q_fin + 1 {
            return Ok(FinReply::Bot);
        }
        if !self.pp.verify(&self.kp.vk, m, sig) || self.in_ledger(m, sig) {
            self.decided = Some(false);
            return Err(Halt);
        }
        self.ledger.push((m.to_vec(), sig.clone()));
        self.q_fin += 1;
        let q = self.q_sign;
        let entry = q - 1;
        if self.table[entry].list.contains(m) {
            return Ok(FinReply::Accept);
        }
        let (root, c, ds) = triple(sig);
        let t = &self.table[entry];
        if t.index == q && &t.root == root && &t.c == c && &t.sig == ds {
            self.win = Some(Win::TableHit { entry });
            self.decided = Some(true);
            return Err(Halt);
        }
        self.classify();
        Err(Halt)
    }

    fn final_output(&mut self, m: Vec<u8>, sig: ObliviousSignature) -> bool {
        if self.q_sign != self.q_fin
            || !self.pp.verify(&self.kp.vk, &m, &sig)
            || self.in_ledger(&m, &sig)
        {
            return false;
        }
        self.flags.final_ = true;
        self.ledger.push((m, sig));
        self.q_fin += 1;
        self.classify();
        true
    }

    fn ds_ledger(&self) -> Vec<(Vec<u8>, DsSignature)> {
        self.table
            .iter()
            .map(|t| (root_commitment_payload(&t.root, &t.c), t.sig.clone()))
            .collect()
    }

    /// Signature-forgery extractor: a ledger entry whose `(root, c)` was never
    /// signed by the oracle, newest first.
    fn extract_ds(&self) -> Result<ReductionOutcome, GameError> {
        let issued = self.ds_ledger();
        for (_, sig) in self.ledger.iter().rev() {
            let (root, c, ds) = triple(sig);
            let payload = root_commitment_payload(root, c);
            if !issued.iter().any(|(p, s)| *p == payload && s == ds) {
                return Ok(ReductionOutcome::DsForgery {
                    message: payload,
                    signature: ds.clone(),
                });
            }
        }
        Err(GameError::ReductionGap(
            "every ledger triple was issued by the oracle".into(),
        ))
    }

    fn reduce(&self) -> Result<ReductionOutcome, GameError> {
        let gap = |e: oblisig_core::Error| GameError::ReductionGap(e.to_string());
        match self.win {
            None => Ok(ReductionOutcome::None),
            Some(Win::Forge) => self.extract_ds(),
            Some(Win::TableHit { entry, .. }) => {
                let (m, sig) = self.ledger.last().expect("fin recorded the forgery");
                let s = merkle(sig);
                let (_, tree) = self.pp.tree(&self.table[entry].list);
                ext1(&tree, m, &s.path, s.j as usize)
                    .map(ReductionOutcome::HashCollision)
                    .map_err(gap)
            }
            Some(Win::Pair { a, b }) => {
                let (ma, sa) = (&self.ledger[a].0, merkle(&self.ledger[a].1));
                let (mb, sb) = (&self.ledger[b].0, merkle(&self.ledger[b].1));
                if self.flags.com_coll {
                    return Ok(ReductionOutcome::ComCollision {
                        m: ma.clone(),
                        r: sa.r.clone(),
                        m_prime: mb.clone(),
                        r_prime: sb.r.clone(),
                    });
                }
                if sa.j == sb.j {
                    return ext2(
                        &self.pp.hash_params(),
                        ma,
                        sa.j as usize,
                        &sa.path,
                        &sb.path,
                    )
                    .map(ReductionOutcome::HashCollision)
                    .map_err(gap);
                }
                let Some(t) = self
                    .table
                    .iter()
                    .find(|t| t.root == sa.root && t.c == sa.c && t.sig == sa.sig)
                else {
                    // The shared triple was never issued: it is itself a forgery.
                    return Ok(ReductionOutcome::DsForgery {
                        message: root_commitment_payload(&sa.root, &sa.c),
                        signature: sa.sig.clone(),
                    });
                };
                let (_, tree) = self.pp.tree(&t.list);
                let s = [sa, sb]
                    .into_iter()
                    .find(|s| {
                        tree.leaves()
                            .get(s.j as usize)
                            .is_some_and(|leaf| leaf != ma)
                    })
                    .ok_or_else(|| {
                        GameError::ReductionGap("both indices hold the message".into())
                    })?;
                ext1(&tree, ma, &s.path, s.j as usize)
                    .map(ReductionOutcome::HashCollision)
                    .map_err(gap)
            }
        }
    }
}

impl Oracles for BaseGame<'_> {
    fn sign(&mut self, list: &MessageList, mu: &FirstMessage) -> Option<SecondMessage> {
        let rho = if self.decided.is_some() || self.q_sign != self.q_fin {
            None
        } else {
            self.pp.second_message(&self.kp.sk, list, mu).ok()
        };
        if let Some(SecondMessage::Merkle(sig)) = &rho {
            self.q_sign += 1;
            let (root, _) = self.pp.tree(list);
            self.table.push(TableEntry {
                index: self.q_sign,
                list: list.clone(),
                root,
                c: mu.commitment().clone(),
                sig: sig.clone(),
            });
        }
        self.transcript.push(Event::Sign {
            list: list.to_bytes(),
            mu: mu.to_bytes(),
            rho: rho.as_ref().map(SecondMessage::to_bytes),
        });
        self.check_invariant();
        rho
    }

    fn fin(&mut self, m: &[u8], sig: &ObliviousSignature) -> Result<FinReply, Halt> {
        let r = self.fin_inner(m, sig);
        self.transcript.push(Event::Fin {
            m: m.to_vec(),
            sig: sig.to_bytes(),
            reply: r.ok(),
        });
        self.check_invariant();
        r
    }
}

/// Runs the base game and, on a win, the matching extractor. The extracted
/// outcome is validated by recomputation; failure is a reduction gap.
pub fn run_base_game(
    adv: &dyn Adversary,
    pp: &OsPublicParams,
    seed: u64,
) -> Result<BaseOutcome, GameError> {
    if pp.variant() != Variant::Merkle {
        return Err(GameError::WrongVariant("merkle"));
    }
    let (kp, mut rng) = keys(pp, seed);
    let env = GameEnv {
        pp,
        vk: &kp.vk,
        leaked_sk: adv.white_box().then_some(&kp.sk),
    };
    let mut g = BaseGame {
        pp,
        kp: &kp,
        ledger: Vec::new(),
        table: Vec::new(),
        q_sign: 0,
        q_fin: 0,
        flags: GameFlags::default(),
        decided: None,
        win: None,
        violation: None,
        transcript: Transcript::default(),
    };
    let out = adv.run(&env, &mut g, &mut rng);
    match &out {
        Ok(Some((m, s))) => g.transcript.push(Event::Output {
            m: m.clone(),
            sig: s.to_bytes(),
        }),
        Ok(None) => g.transcript.push(Event::Abort),
        Err(Halt) => {}
    }
    if let Some(v) = g.violation.take() {
        return Err(v);
    }
    let bit = match (g.decided, out) {
        (Some(b), _) => b,
        (None, Ok(Some((m, sig)))) => g.final_output(m, sig),
        (None, _) => false,
    };
    if bit && !g.flags.is_terminal_combination() {
        return Err(GameError::Flags(format!("{:?}", g.flags)));
    }
    let outcome = g.reduce()?;
    let ds_ledger = g.ds_ledger();
    if bit && !outcome.is_valid(pp, &kp.vk, &ds_ledger) {
        return Err(GameError::ReductionGap(format!(
            "{} failed recomputation",
            outcome.kind()
        )));
    }
    Ok(BaseOutcome {
        bit,
        flags: g.flags,
        outcome,
        transcript: g.transcript,
        ds_ledger,
        vk: kp.vk.clone(),
    })
}
