//! Communication cost: measured wire sizes next to the closed-form bit counts.

use std::fmt::Write as _;

use rand::{CryptoRng, RngCore};

use crate::ds::SchemeId;
use crate::error::Result;
use crate::hash::HashParams;
use crate::merkle::depth_for;
use crate::scheme::{MessageList, OsPublicParams, Variant};

/// Sizes for one `(variant, n)` cell. Byte fields are measured; `paper_*`
/// fields are the closed-form bit counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeRow {
    pub variant: Variant,
    pub n: usize,
    pub vk_bytes: usize,
    pub mu_bytes: usize,
    pub rho_bytes: usize,
    pub sig_bytes: usize,
    pub paper_rho_bits: usize,
    pub paper_sig_bits: usize,
}

impl SizeRow {
    /// `8 · sig_bytes − paper_sig_bits`.
    pub fn sig_overhead_bits(&self) -> isize {
        (8 * self.sig_bytes) as isize - self.paper_sig_bits as isize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub hash: HashParams,
    pub scheme: SchemeId,
    pub rows: Vec<SizeRow>,
}

/// Closed-form bit counts: `(|ρ|, |σ|)`.
pub fn paper_bits(pp: &OsPublicParams, n: usize) -> (usize, usize) {
    let lambda = pp.hash_params().output_bits();
    let sig = 8 * pp.signature_len();
    let c = 8 * pp.digest_len();
    let r = 8 * pp.digest_len();
    let k = depth_for(n);
    match pp.variant() {
        Variant::Zlh => (n * sig, sig + c + r),
        Variant::Merkle => (sig, sig + c + r + (k + 1) * lambda + k),
    }
}

/// Sizes predicted from our encodings, in bytes: `(vk, μ, ρ, σ)`.
pub fn predicted_bytes(pp: &OsPublicParams, n: usize) -> (usize, usize, usize, usize) {
    let d = pp.digest_len();
    let s = pp.signature_len();
    let vk = pp.scheme().verifying_key_len();
    match pp.variant() {
        Variant::Zlh => (vk, d, n * s, d + d + s),
        Variant::Merkle => (vk, d, s, d + d + s + 1 + depth_for(n) * d + 4 + d),
    }
}

/// Encoding overhead of `σ` over the closed form, in bits. The Merkle variant
/// adds a path-length byte and a 4-byte index where the closed form counts
/// `⌈log₂ n⌉` index bits.
pub fn expected_sig_overhead_bits(variant: Variant, n: usize) -> isize {
    match variant {
        Variant::Zlh => 0,
        Variant::Merkle => 8 + 32 - depth_for(n) as isize,
    }
}

fn sample_list(n: usize) -> MessageList {
    MessageList::new((0..n).map(|i| format!("m{i:04}").into_bytes()).collect())
        .expect("n >= 2 and ASCII messages")
}

/// Runs one honest session per cell and serializes every artifact.
pub fn measure<R: RngCore + CryptoRng>(
    n_list: &[usize],
    variants: &[Variant],
    hash: HashParams,
    scheme: SchemeId,
    rng: &mut R,
) -> Result<SizeReport> {
    let mut rows = Vec::with_capacity(n_list.len() * variants.len());
    for &variant in variants {
        let pp = OsPublicParams::setup(variant, hash, scheme);
        let kp = pp.keygen(rng);
        for &n in n_list {
            let list = sample_list(n);
            let j = (rng.next_u32() as usize) % n;
            let (mu, st) = pp.first_message(&list, j, rng)?;
            let rho = pp.second_message(&kp.sk, &list, &mu)?;
            let (_, sig) = pp.derive(&kp.vk, &st, &rho)?;
            let (paper_rho_bits, paper_sig_bits) = paper_bits(&pp, n);
            rows.push(SizeRow {
                variant,
                n,
                vk_bytes: kp.vk.as_bytes().len(),
                mu_bytes: mu.to_bytes().len(),
                rho_bytes: rho.to_bytes().len(),
                sig_bytes: sig.to_bytes().len(),
                paper_rho_bits,
                paper_sig_bits,
            });
        }
    }
    Ok(SizeReport { hash, scheme, rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub variant: Variant,
    pub n: usize,
    pub what: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} n={}: {}", self.variant, self.n, self.what)
    }
}

/// Checks every row against the predictions and the growth laws: `ρ` of the
/// Merkle variant is constant, `ρ` of the per-message variant grows by
/// `n · |σ_ds|` per doubling, and the Merkle `σ` grows by one digest per
/// doubling. Needs at least four values forming a doubling chain per variant.
pub fn check_asymptotics(report: &SizeReport) -> std::result::Result<(), Vec<Violation>> {
    let mut bad = Vec::new();
    let mut variants: Vec<Variant> = report.rows.iter().map(|r| r.variant).collect();
    variants.dedup();
    for variant in variants {
        let pp = OsPublicParams::setup(variant, report.hash, report.scheme);
        let mut rows: Vec<&SizeRow> = report
            .rows
            .iter()
            .filter(|r| r.variant == variant)
            .collect();
        rows.sort_by_key(|r| r.n);
        let mut flag = |n: usize, what: String| bad.push(Violation { variant, n, what });

        for r in &rows {
            let (vk, mu, rho, sig) = predicted_bytes(&pp, r.n);
            if (r.vk_bytes, r.mu_bytes, r.rho_bytes, r.sig_bytes) != (vk, mu, rho, sig) {
                flag(
                    r.n,
                    format!(
                        "measured (vk,mu,rho,sig)=({},{},{},{}) predicted ({vk},{mu},{rho},{sig})",
                        r.vk_bytes, r.mu_bytes, r.rho_bytes, r.sig_bytes
                    ),
                );
            }
            if 8 * r.rho_bytes != r.paper_rho_bits {
                flag(
                    r.n,
                    format!(
                        "rho {} bits vs closed form {}",
                        8 * r.rho_bytes,
                        r.paper_rho_bits
                    ),
                );
            }
            let overhead = expected_sig_overhead_bits(variant, r.n);
            if r.sig_overhead_bits() != overhead {
                flag(
                    r.n,
                    format!(
                        "sig overhead {} bits, expected {overhead}",
                        r.sig_overhead_bits()
                    ),
                );
            }
        }
        if let Some(first) = rows.first() {
            for r in &rows {
                if r.vk_bytes != first.vk_bytes || r.mu_bytes != first.mu_bytes {
                    flag(r.n, "vk or mu size varies with n".into());
                }
                if variant == Variant::Merkle && r.rho_bytes != first.rho_bytes {
                    flag(
                        r.n,
                        format!(
                            "rho {} B differs from {} B at n={}",
                            r.rho_bytes, first.rho_bytes, first.n
                        ),
                    );
                }
                if variant == Variant::Zlh && r.sig_bytes != first.sig_bytes {
                    flag(r.n, "sig size varies with n".into());
                }
            }
        }

        let mut chain = 0usize;
        for a in &rows {
            let Some(b) = rows.iter().find(|b| b.n == 2 * a.n) else {
                continue;
            };
            chain += 1;
            match variant {
                Variant::Zlh => {
                    let step = b.rho_bytes as isize - a.rho_bytes as isize;
                    let want = (a.n * pp.signature_len()) as isize;
                    if step != want {
                        flag(
                            b.n,
                            format!("rho grew {step} B on doubling, expected {want}"),
                        );
                    }
                }
                Variant::Merkle => {
                    let step = b.sig_bytes as isize - a.sig_bytes as isize;
                    if step != pp.digest_len() as isize {
                        flag(
                            b.n,
                            format!(
                                "sig grew {step} B on doubling, expected {}",
                                pp.digest_len()
                            ),
                        );
                    }
                }
            }
        }
        if chain + 1 < 4 {
            flag(0, format!("only {} doubling steps; need at least 3", chain));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

pub const COLUMNS: [&str; 8] = [
    "variant",
    "n",
    "vk_B",
    "mu_B",
    "rho_B",
    "sig_B",
    "paper_rho_bits",
    "paper_sig_bits",
];

/// Column-aligned text table.
pub fn render_table(report: &SizeReport) -> String {
    let cells: Vec<[String; 8]> = report
        .rows
        .iter()
        .map(|r| {
            [
                r.variant.name().to_string(),
                r.n.to_string(),
                r.vk_bytes.to_string(),
                r.mu_bytes.to_string(),
                r.rho_bytes.to_string(),
                r.sig_bytes.to_string(),
                r.paper_rho_bits.to_string(),
                r.paper_sig_bits.to_string(),
            ]
        })
        .collect();
    let mut widths = COLUMNS.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: &[&str]| {
        for (i, (c, w)) in row.iter().zip(widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{c:<w$}");
            } else {
                let _ = write!(out, "  {c:>w$}");
            }
        }
        out.push('\n');
    };
    line(&mut out, &COLUMNS);
    for row in &cells {
        let refs: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&mut out, &refs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn report(ns: &[usize]) -> SizeReport {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        measure(
            ns,
            &[Variant::Merkle, Variant::Zlh],
            HashParams::production(),
            SchemeId::Ed25519,
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn n8_values() {
        let r = report(&[8]);
        let ours = &r.rows[0];
        assert_eq!(ours.paper_sig_bits, 2051);
        assert_eq!(ours.sig_bytes, 261);
        assert_eq!(ours.rho_bytes, 64);
        assert_eq!(ours.sig_overhead_bits(), 37);
        let zlh = &r.rows[1];
        assert_eq!(zlh.rho_bytes, 512);
        assert_eq!(zlh.sig_bytes, 128);
        assert_eq!(zlh.paper_sig_bits, 1024);
    }

    #[test]
    fn asymptotics_hold() {
        check_asymptotics(&report(&[2, 4, 8, 16, 32])).unwrap();
    }

    #[test]
    fn short_chain_rejected() {
        let errs = check_asymptotics(&report(&[2, 4, 8])).unwrap_err();
        assert_eq!(errs.len(), 2);
    }

    #[test]
    fn tampered_row_is_named() {
        let mut r = report(&[2, 4, 8, 16]);
        r.rows[2].rho_bytes += 1;
        let errs = check_asymptotics(&r).unwrap_err();
        assert!(errs.iter().all(|v| v.variant == Variant::Merkle));
        assert!(errs.iter().any(|v| v.n == 8));
    }

    #[test]
    fn table_has_header_and_rows() {
        let t = render_table(&report(&[2, 4]));
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("variant"));
        assert!(lines[1].starts_with("ours"));
    }
}
