//! Commitment bytes look uniform and do not depend on the chosen index.

use oblisig_core::{HashParams, MessageList, OsPublicParams, SchemeId, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SAMPLES: usize = 25_600;

fn first_byte_counts(j: usize, seed: u64) -> [f64; 256] {
    let pp = OsPublicParams::setup(Variant::Merkle, HashParams::production(), SchemeId::Ed25519);
    let l = MessageList::new(vec![b"left".to_vec(), b"right".to_vec(), b"up".to_vec()]).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = [0f64; 256];
    for _ in 0..SAMPLES {
        let (mu, _) = pp.first_message(&l, j, &mut rng).unwrap();
        counts[mu.to_bytes()[0] as usize] += 1.0;
    }
    counts
}

fn critical() -> f64 {
    ChiSquared::new(255.0).unwrap().inverse_cdf(0.99)
}

#[test]
fn first_byte_uniform() {
    let expected = SAMPLES as f64 / 256.0;
    for j in 0..3 {
        let c = first_byte_counts(j, 100 + j as u64);
        let stat: f64 = c.iter().map(|o| (o - expected).powi(2) / expected).sum();
        assert!(
            stat < critical(),
            "j={j}: chi2 {stat:.1} >= {:.1}",
            critical()
        );
    }
}

#[test]
fn index_does_not_shift_distribution() {
    let a = first_byte_counts(0, 200);
    let b = first_byte_counts(2, 201);
    // Two-sample homogeneity with equal sample sizes.
    let stat: f64 = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| *x + *y > 0.0)
        .map(|(x, y)| (x - y).powi(2) / (x + y))
        .sum();
    assert!(stat < critical(), "chi2 {stat:.1}");
}
