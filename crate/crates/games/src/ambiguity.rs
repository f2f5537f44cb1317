//! Ambiguity: can a signer holding `sk` tell which of two list indices the
//! user committed to?

use oblisig_core::{
    commit, CommitRandomness, FirstMessage, MessageList, OsPublicParams, SigningKey, VerifyingKey,
};
use rand::{Rng, RngCore};
use serde::Serialize;

use crate::oracle::{rngs, GameRng};

/// z for a two-sided 99% interval.
pub const WILSON_Z: f64 = 2.576;

pub struct AmbChoice {
    pub list: MessageList,
    pub i0: usize,
    pub i1: usize,
}

pub trait AmbAdversary: Sync {
    fn name(&self) -> &'static str;

    /// White-box adversaries also see the user's commitment randomness.
    fn white_box(&self) -> bool {
        false
    }

    fn choose(
        &self,
        pp: &OsPublicParams,
        vk: &VerifyingKey,
        sk: &SigningKey,
        rng: &mut GameRng,
    ) -> AmbChoice;

    /// Returns the guessed bit.
    fn guess(
        &self,
        pp: &OsPublicParams,
        choice: &AmbChoice,
        mu: &FirstMessage,
        leaked_r: Option<&CommitRandomness>,
        rng: &mut GameRng,
    ) -> bool;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguityEstimate {
    pub trials: u64,
    pub wins: u64,
    /// Trials lost because the adversary's indices were unusable.
    pub discarded: u64,
    pub win_rate: f64,
    /// `|win_rate − 1/2|`.
    pub advantage: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Wilson score interval for `wins / trials`.
pub fn wilson_interval(wins: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = wins as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Repeats the experiment `trials` times with fresh keys and coins.
pub fn run_ambiguity(
    adv: &dyn AmbAdversary,
    pp: &OsPublicParams,
    trials: u64,
    seed: u64,
) -> AmbiguityEstimate {
    assert!(trials >= 1);
    let (mut challenger, mut rng) = rngs(seed);
    let mut wins = 0;
    let mut discarded = 0;
    for _ in 0..trials {
        let kp = pp.keygen(&mut challenger);
        let choice = adv.choose(pp, &kp.vk, &kp.sk, &mut rng);
        let b: bool = challenger.gen();
        let i = if b { choice.i1 } else { choice.i0 };
        if choice.i0 >= choice.list.len() || choice.i1 >= choice.list.len() {
            discarded += 1;
            continue;
        }
        let Ok((mu, st)) = pp.first_message(&choice.list, i, &mut challenger) else {
            discarded += 1;
            continue;
        };
        let leaked = adv.white_box().then(|| st.randomness());
        if adv.guess(pp, &choice, &mu, leaked, &mut rng) == b {
            wins += 1;
        }
    }
    let win_rate = wins as f64 / trials as f64;
    let (wilson_low, wilson_high) = wilson_interval(wins, trials, WILSON_Z);
    AmbiguityEstimate {
        trials,
        wins,
        discarded,
        win_rate,
        advantage: (win_rate - 0.5).abs(),
        wilson_low,
        wilson_high,
    }
}

fn pair_list() -> AmbChoice {
    let list = MessageList::new(vec![b"yes".to_vec(), b"no".to_vec(), b"abstain".to_vec()])
        .expect("valid list");
    AmbChoice { list, i0: 0, i1: 1 }
}

pub struct RandomGuess;

impl AmbAdversary for RandomGuess {
    fn name(&self) -> &'static str {
        "random_guess"
    }

    fn choose(
        &self,
        _: &OsPublicParams,
        _: &VerifyingKey,
        _: &SigningKey,
        _: &mut GameRng,
    ) -> AmbChoice {
        pair_list()
    }

    fn guess(
        &self,
        _: &OsPublicParams,
        _: &AmbChoice,
        _: &FirstMessage,
        _: Option<&CommitRandomness>,
        rng: &mut GameRng,
    ) -> bool {
        rng.gen()
    }
}

/// Tries `budget` random openings per candidate; falls back to the parity of
/// the commitment's first byte.
pub struct HashGrinder {
    pub budget: usize,
}

impl AmbAdversary for HashGrinder {
    fn name(&self) -> &'static str {
        "hash_grinder"
    }

    fn choose(
        &self,
        _: &OsPublicParams,
        _: &VerifyingKey,
        _: &SigningKey,
        _: &mut GameRng,
    ) -> AmbChoice {
        pair_list()
    }

    fn guess(
        &self,
        pp: &OsPublicParams,
        choice: &AmbChoice,
        mu: &FirstMessage,
        _: Option<&CommitRandomness>,
        rng: &mut GameRng,
    ) -> bool {
        let ck = pp.commit_key();
        let m0 = choice.list.get(choice.i0).unwrap_or_default();
        let m1 = choice.list.get(choice.i1).unwrap_or_default();
        let mut buf = vec![0u8; pp.digest_len()];
        for _ in 0..self.budget {
            rng.fill_bytes(&mut buf);
            let r = CommitRandomness::from_bytes(buf.clone());
            if commit(ck, m0, &r).ok().as_ref() == Some(mu.commitment()) {
                return false;
            }
            if commit(ck, m1, &r).ok().as_ref() == Some(mu.commitment()) {
                return true;
            }
        }
        mu.commitment()
            .as_bytes()
            .first()
            .is_some_and(|b| b & 1 == 1)
    }
}

/// White-box: opens the commitment with the leaked randomness.
pub struct RandomnessLeak;

impl AmbAdversary for RandomnessLeak {
    fn name(&self) -> &'static str {
        "r_leak"
    }

    fn white_box(&self) -> bool {
        true
    }

    fn choose(
        &self,
        _: &OsPublicParams,
        _: &VerifyingKey,
        _: &SigningKey,
        _: &mut GameRng,
    ) -> AmbChoice {
        pair_list()
    }

    fn guess(
        &self,
        pp: &OsPublicParams,
        choice: &AmbChoice,
        mu: &FirstMessage,
        r: Option<&CommitRandomness>,
        _: &mut GameRng,
    ) -> bool {
        let Some(r) = r else { return false };
        let m0 = choice.list.get(choice.i0).unwrap_or_default();
        commit(pp.commit_key(), m0, r).ok().as_ref() != Some(mu.commitment())
    }
}
