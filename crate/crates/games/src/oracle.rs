//! Adversary interface shared by the unforgeability games.
//!
//! An adversary receives the public parameters and a handle to the game's
//! oracles. A game that decides its output inside an oracle returns
//! [`Halt`]; adversaries propagate it with `?`.

use oblisig_core::hash::HashParams;
use oblisig_core::{
    FirstMessage, MessageList, ObliviousSignature, OsPublicParams, SecondMessage, SigningKey,
    VerifyingKey,
};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

pub type GameRng = ChaCha20Rng;

/// The game ended inside an oracle call; its output is already fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Halt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FinReply {
    Accept,
    Bot,
}

pub trait Oracles {
    /// `None` is ⊥.
    fn sign(&mut self, list: &MessageList, mu: &FirstMessage) -> Option<SecondMessage>;
    fn fin(&mut self, m: &[u8], sig: &ObliviousSignature) -> Result<FinReply, Halt>;
}

/// What the adversary sees. `leaked_sk` is set only for white-box adversaries.
pub struct GameEnv<'a> {
    pub pp: &'a OsPublicParams,
    pub vk: &'a VerifyingKey,
    pub leaked_sk: Option<&'a SigningKey>,
}

pub type Forgery = (Vec<u8>, ObliviousSignature);

pub trait Adversary: Sync {
    fn name(&self) -> &'static str;

    /// White-box adversaries are handed the signing key.
    fn white_box(&self) -> bool {
        false
    }

    /// `Ok(None)` means the adversary aborts without a final output.
    fn run(
        &self,
        env: &GameEnv<'_>,
        oracles: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt>;
}

/// One oracle call or final output, serialized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Sign {
        list: Vec<u8>,
        mu: Vec<u8>,
        rho: Option<Vec<u8>>,
    },
    Fin {
        m: Vec<u8>,
        sig: Vec<u8>,
        reply: Option<FinReply>,
    },
    Output {
        m: Vec<u8>,
        sig: Vec<u8>,
    },
    Abort,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Transcript(pub Vec<Event>);

impl Transcript {
    pub fn push(&mut self, e: Event) {
        self.0.push(e);
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    /// SHA-256 over a length-prefixed flattening of every event.
    pub fn digest(&self) -> String {
        let mut buf = Vec::new();
        let mut put = |tag: u8, parts: &[&[u8]]| {
            buf.push(tag);
            for p in parts {
                buf.extend_from_slice(&(p.len() as u32).to_be_bytes());
                buf.extend_from_slice(p);
            }
        };
        for e in &self.0 {
            match e {
                Event::Sign { list, mu, rho } => match rho {
                    Some(r) => put(1, &[list, mu, r]),
                    None => put(2, &[list, mu]),
                },
                Event::Fin { m, sig, reply } => {
                    let r = match reply {
                        Some(FinReply::Accept) => 1u8,
                        Some(FinReply::Bot) => 2,
                        None => 0,
                    };
                    put(3, &[m, sig, &[r]])
                }
                Event::Output { m, sig } => put(4, &[m, sig]),
                Event::Abort => put(5, &[]),
            }
        }
        HashParams::production()
            .hash(&buf)
            .as_bytes()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Separate seeded streams for challenger and adversary.
pub(crate) fn rngs(seed: u64) -> (GameRng, GameRng) {
    use rand::SeedableRng;
    let challenger = ChaCha20Rng::seed_from_u64(seed);
    let mut adversary = ChaCha20Rng::seed_from_u64(seed);
    adversary.set_stream(1);
    (challenger, adversary)
}
