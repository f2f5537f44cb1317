use oblisig_core::{HashParams, MessageList, OsPublicParams, SchemeId, Variant};
use oblisig_games::*;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Step {
    /// Open a session on list `l` choosing index `j`.
    Sign { l: u8, j: u8 },
    /// Close with the derived pair of open session `k` (if any).
    Fin { k: u8 },
    /// Resubmit an earlier accepted pair.
    Replay { k: u8 },
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (0u8..4, 0u8..3).prop_map(|(l, j)| Step::Sign { l, j }),
        (0u8..4).prop_map(|k| Step::Fin { k }),
        (0u8..4).prop_map(|k| Step::Replay { k }),
    ]
}

/// Follows a random script of oracle calls; ignores ⊥ and keeps going.
struct Scripted(Vec<Step>);

fn list(l: u8) -> MessageList {
    MessageList::new((0..3).map(|i| format!("l{l}-{i}").into_bytes()).collect()).unwrap()
}

impl Adversary for Scripted {
    fn name(&self) -> &'static str {
        "scripted"
    }

    fn run(
        &self,
        env: &GameEnv<'_>,
        o: &mut dyn Oracles,
        rng: &mut GameRng,
    ) -> Result<Option<Forgery>, Halt> {
        let mut open: Vec<Forgery> = Vec::new();
        let mut done: Vec<Forgery> = Vec::new();
        for s in &self.0 {
            match *s {
                Step::Sign { l, j } => {
                    let list = list(l);
                    let (mu, st) = env.pp.first_message(&list, j as usize, rng).unwrap();
                    if let Some(rho) = o.sign(&list, &mu) {
                        open.push(env.pp.derive(env.vk, &st, &rho).unwrap());
                    }
                }
                Step::Fin { k } => {
                    if open.is_empty() {
                        continue;
                    }
                    let (m, sig) = open.remove(k as usize % open.len());
                    if o.fin(&m, &sig)? == FinReply::Accept {
                        done.push((m, sig));
                    }
                }
                Step::Replay { k } => {
                    if let Some((m, sig)) = done.get(k as usize % done.len().max(1)).cloned() {
                        o.fin(&m, &sig)?;
                    }
                }
            }
        }
        Ok(done.last().cloned())
    }
}

fn pp() -> OsPublicParams {
    OsPublicParams::setup(Variant::Merkle, HashParams::production(), SchemeId::Ed25519)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sequentiality_and_equivalence(script in prop::collection::vec(step(), 0..10), seed in any::<u64>()) {
        let pp = pp();
        let adv = Scripted(script);
        let s = run_seq_seufcma(&adv, &pp, seed).unwrap();
        prop_assert!(s.q_fin <= s.q_sign && s.q_sign <= s.q_fin + 1);
        let b = run_base_game(&adv, &pp, seed).unwrap();
        prop_assert_eq!(s.bit, b.bit);
        prop_assert_eq!(s.transcript, b.transcript);
        // Honest derivations only; no win is possible at production parameters.
        prop_assert!(!s.bit);
    }

    #[test]
    fn naive_mode_keeps_lower_bound(script in prop::collection::vec(step(), 0..10), seed in any::<u64>()) {
        let s = run_seq_seufcma_with(&Scripted(script), &pp(), seed, OracleMode::NaiveConcurrent).unwrap();
        prop_assert!(s.q_fin <= s.q_sign);
    }

    #[test]
    fn seeds_reproduce(script in prop::collection::vec(step(), 0..6), seed in any::<u64>()) {
        let adv = Scripted(script);
        let a = run_old_model_game(&adv, &pp(), seed).unwrap();
        let b = run_old_model_game(&adv, &pp(), seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
