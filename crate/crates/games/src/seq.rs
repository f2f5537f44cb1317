//! Sequential strong unforgeability, the older message-ledger game, and the
//! two-session interleaving attack.

use oblisig_core::{
    DsKeyPair, FirstMessage, MessageList, ObliviousSignature, OsPublicParams, SecondMessage,
};
use serde::Serialize;

use crate::error::GameError;
use crate::oracle::{
    rngs, Adversary, Event, FinReply, Forgery, GameEnv, Halt, Oracles, Transcript,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    /// `O^Sign` refuses while a session is open.
    Sequential,
    /// Sessions may overlap; `O^Fin` closes the oldest open one.
    NaiveConcurrent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameOutcome {
    pub bit: bool,
    /// The output was fixed inside `O^Fin`.
    pub decided_in_fin: bool,
    pub q_sign: usize,
    pub q_fin: usize,
    pub transcript: Transcript,
}

struct SeqGame<'a> {
    pp: &'a OsPublicParams,
    kp: &'a DsKeyPair,
    mode: OracleMode,
    ledger: Vec<Forgery>,
    lists: Vec<MessageList>,
    q_sign: usize,
    q_fin: usize,
    decided: Option<bool>,
    violation: Option<GameError>,
    transcript: Transcript,
}

impl SeqGame<'_> {
    fn check_invariant(&mut self) {
        let ok = match self.mode {
            OracleMode::Sequential => self.q_fin <= self.q_sign && self.q_sign <= self.q_fin + 1,
            OracleMode::NaiveConcurrent => self.q_fin <= self.q_sign,
        };
        if !ok && self.violation.is_none() {
            self.violation = Some(GameError::Sequentiality {
                q_sign: self.q_sign,
                q_fin: self.q_fin,
            });
        }
    }

    fn halt(&mut self, bit: bool) -> Result<FinReply, Halt> {
        self.decided = Some(bit);
        Err(Halt)
    }

    fn fin_inner(&mut self, m: &[u8], sig: &ObliviousSignature) -> Result<FinReply, Halt> {
        if self.decided.is_some() {
            return Err(Halt);
        }
        let open = match self.mode {
            OracleMode::Sequential => self.q_sign == self.q_fin + 1,
            OracleMode::NaiveConcurrent => self.q_fin < self.q_sign,
        };
        if !open {
            return Ok(FinReply::Bot);
        }
        if !self.pp.verify(&self.kp.vk, m, sig) {
            return self.halt(false);
        }
        // Resubmission check.
        if self.ledger.iter().any(|(lm, ls)| lm == m && ls == sig) {
            return self.halt(false);
        }
        if self.lists[self.q_fin].contains(m) {
            self.ledger.push((m.to_vec(), sig.clone()));
            self.q_fin += 1;
            return Ok(FinReply::Accept);
        }
        // Off-list message: the adversary gave up completing the session.
        self.halt(true)
    }
}

impl Oracles for SeqGame<'_> {
    fn sign(&mut self, list: &MessageList, mu: &FirstMessage) -> Option<SecondMessage> {
        let rho = if self.decided.is_some()
            || (self.mode == OracleMode::Sequential && self.q_sign != self.q_fin)
        {
            None
        } else {
            self.pp.second_message(&self.kp.sk, list, mu).ok()
        };
        if rho.is_some() {
            self.q_sign += 1;
            self.lists.push(list.clone());
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

fn record_final(t: &mut Transcript, out: &Result<Option<Forgery>, Halt>) {
    match out {
        Ok(Some((m, s))) => t.push(Event::Output {
            m: m.clone(),
            sig: s.to_bytes(),
        }),
        Ok(None) => t.push(Event::Abort),
        Err(Halt) => {}
    }
}

pub(crate) fn keys(pp: &OsPublicParams, seed: u64) -> (DsKeyPair, crate::oracle::GameRng) {
    let (mut challenger, adversary) = rngs(seed);
    (pp.keygen(&mut challenger), adversary)
}

/// Sequential strong unforgeability with the given oracle discipline.
pub fn run_seq_seufcma_with(
    adv: &dyn Adversary,
    pp: &OsPublicParams,
    seed: u64,
    mode: OracleMode,
) -> Result<GameOutcome, GameError> {
    let (kp, mut rng) = keys(pp, seed);
    let env = GameEnv {
        pp,
        vk: &kp.vk,
        leaked_sk: adv.white_box().then_some(&kp.sk),
    };
    let mut g = SeqGame {
        pp,
        kp: &kp,
        mode,
        ledger: Vec::new(),
        lists: Vec::new(),
        q_sign: 0,
        q_fin: 0,
        decided: None,
        violation: None,
        transcript: Transcript::default(),
    };
    let out = adv.run(&env, &mut g, &mut rng);
    record_final(&mut g.transcript, &out);
    if let Some(v) = g.violation {
        return Err(v);
    }
    let (bit, decided_in_fin) = match (g.decided, out) {
        (Some(b), _) => (b, true),
        (None, Ok(Some((m, sig)))) => (
            g.q_sign == g.q_fin
                && pp.verify(&kp.vk, &m, &sig)
                && !g.ledger.iter().any(|(lm, ls)| *lm == m && *ls == sig),
            false,
        ),
        (None, _) => (false, false),
    };
    Ok(GameOutcome {
        bit,
        decided_in_fin,
        q_sign: g.q_sign,
        q_fin: g.q_fin,
        transcript: g.transcript,
    })
}

pub fn run_seq_seufcma(
    adv: &dyn Adversary,
    pp: &OsPublicParams,
    seed: u64,
) -> Result<GameOutcome, GameError> {
    run_seq_seufcma_with(adv, pp, seed, OracleMode::Sequential)
}

/// The older game: the adversary self-reports `(m, σ)` after each session and
/// only `m` is recorded. No resubmission check, no off-list branch.
struct OldGame<'a> {
    pp: &'a OsPublicParams,
    kp: &'a DsKeyPair,
    reported: Vec<Vec<u8>>,
    q_sign: usize,
    q_fin: usize,
    violation: Option<GameError>,
    transcript: Transcript,
}

impl OldGame<'_> {
    fn check_invariant(&mut self) {
        if !(self.q_fin <= self.q_sign && self.q_sign <= self.q_fin + 1) && self.violation.is_none()
        {
            self.violation = Some(GameError::Sequentiality {
                q_sign: self.q_sign,
                q_fin: self.q_fin,
            });
        }
    }
}

impl Oracles for OldGame<'_> {
    fn sign(&mut self, list: &MessageList, mu: &FirstMessage) -> Option<SecondMessage> {
        let rho = if self.q_sign != self.q_fin {
            None
        } else {
            self.pp.second_message(&self.kp.sk, list, mu).ok()
        };
        if rho.is_some() {
            self.q_sign += 1;
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
        let reply = if self.q_sign == self.q_fin + 1 {
            self.reported.push(m.to_vec());
            self.q_fin += 1;
            FinReply::Accept
        } else {
            FinReply::Bot
        };
        self.transcript.push(Event::Fin {
            m: m.to_vec(),
            sig: sig.to_bytes(),
            reply: Some(reply),
        });
        self.check_invariant();
        Ok(reply)
    }
}

pub fn run_old_model_game(
    adv: &dyn Adversary,
    pp: &OsPublicParams,
    seed: u64,
) -> Result<GameOutcome, GameError> {
    let (kp, mut rng) = keys(pp, seed);
    let env = GameEnv {
        pp,
        vk: &kp.vk,
        leaked_sk: adv.white_box().then_some(&kp.sk),
    };
    let mut g = OldGame {
        pp,
        kp: &kp,
        reported: Vec::new(),
        q_sign: 0,
        q_fin: 0,
        violation: None,
        transcript: Transcript::default(),
    };
    let out = adv.run(&env, &mut g, &mut rng);
    record_final(&mut g.transcript, &out);
    if let Some(v) = g.violation {
        return Err(v);
    }
    let bit = match out {
        Ok(Some((m, sig))) => {
            g.q_sign == g.q_fin && pp.verify(&kp.vk, &m, &sig) && !g.reported.contains(&m)
        }
        _ => false,
    };
    Ok(GameOutcome {
        bit,
        decided_in_fin: false,
        q_sign: g.q_sign,
        q_fin: g.q_fin,
        transcript: g.transcript,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConcurrentReport {
    pub sequential: GameOutcome,
    pub naive: GameOutcome,
    /// The second overlapping `O^Sign` returned ⊥ under the sequential oracle.
    pub blocked_sequential: bool,
    pub wins_naive: bool,
}

/// Runs the two-list interleaving adversary under both oracle disciplines.
pub fn concurrent_attack_demo(
    pp: &OsPublicParams,
    seed: u64,
) -> Result<ConcurrentReport, GameError> {
    let adv = crate::adversaries::ConcurrentInterleaver;
    let sequential = run_seq_seufcma_with(&adv, pp, seed, OracleMode::Sequential)?;
    let naive = run_seq_seufcma_with(&adv, pp, seed, OracleMode::NaiveConcurrent)?;
    let blocked_sequential = !sequential.bit
        && sequential
            .transcript
            .events()
            .iter()
            .filter(|e| matches!(e, Event::Sign { .. }))
            .nth(1)
            .is_some_and(|e| matches!(e, Event::Sign { rho: None, .. }));
    let wins_naive = naive.bit && naive.decided_in_fin;
    Ok(ConcurrentReport {
        sequential,
        naive,
        blocked_sequential,
        wins_naive,
    })
}
