//! `oblisig`: key generation, signer daemon, client, verifier, game suite
//! and size benchmark.
//!
//! Exit codes: 0 success, 1 verification or invariant failure, 2 usage or
//! input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use oblisig_core::bench::{check_asymptotics, measure, render_table};
use oblisig_core::{
    HashParams, KeyFile, MessageList, OsPublicParams, SchemeId, Variant, VerifyingKey,
};
use oblisig_games::{run_suite, SuiteConfig};
use oblisig_net::{fetch_public_key, Limits, NetError, Server, ServerConfig};
use rand::rngs::OsRng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "oblisig", version, about = "1-out-of-n oblivious signatures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a signing key to PATH and its public half to PATH.pub.
    Keygen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = SchemeArg::Ed25519)]
        scheme: SchemeArg,
    },
    /// Run the signer daemon.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Obtain a signature on message J of a messages file.
    Request {
        #[arg(long)]
        addr: String,
        #[arg(long)]
        vk: PathBuf,
        #[arg(long)]
        messages: PathBuf,
        #[arg(long)]
        choose: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
    },
    /// Check a signature file against a message file.
    Verify {
        #[arg(long)]
        vk: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Run the adversary suite; one JSON record per line.
    Games {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        weak_hash: bool,
    },
    /// Wire sizes against the closed-form bit counts.
    Bench {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "2,4,8,16,32,64,128,256,512,1024"
        )]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value_t = VariantArg::Both)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ed25519,
    HmacStub,
}

impl From<SchemeArg> for SchemeId {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ed25519 => SchemeId::Ed25519,
            SchemeArg::HmacStub => SchemeId::HmacStub,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Ours,
    Zlh,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Failure classes mapped to exit codes.
enum Failure {
    /// Verification or invariant failure.
    Rejected(anyhow::Error),
    /// Bad input or environment.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ServeToml {
    listen: String,
    key_file: PathBuf,
    #[serde(default = "default_variant")]
    variant: String,
    max_n: Option<usize>,
    max_message_bytes: Option<usize>,
    io_timeout_secs: Option<u64>,
}

fn default_variant() -> String {
    "ours".into()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Keygen { out, scheme } => keygen(&out, scheme.into()),
        Cmd::Serve { config } => serve(&config),
        Cmd::Request {
            addr,
            vk,
            messages,
            choose,
            out,
            timeout_secs,
        } => request(
            &addr,
            &vk,
            &messages,
            choose,
            &out,
            Duration::from_secs(timeout_secs),
        ),
        Cmd::Verify { vk, message, sig } => verify(&vk, &message, &sig),
        Cmd::Games { seed, weak_hash } => games(seed, weak_hash),
        Cmd::Bench {
            n_list,
            variant,
            format,
            seed,
        } => bench(&n_list, variant, format, seed),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn load_vk(path: &Path) -> anyhow::Result<VerifyingKey> {
    let kf = KeyFile::from_bytes(&read(path)?)
        .with_context(|| format!("key file {}", path.display()))?;
    Ok(kf.vk)
}

fn pub_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".pub");
    PathBuf::from(s)
}

fn keygen(out: &Path, scheme: SchemeId) -> CmdResult {
    let pp = OsPublicParams::setup(Variant::Merkle, HashParams::production(), scheme);
    let kp = pp.keygen(&mut OsRng);
    write(out, &KeyFile::secret(&kp).to_bytes())?;
    write(&pub_path(out), &KeyFile::public(&kp.vk).to_bytes())?;
    println!("{}", hex::encode(kp.vk.as_bytes()));
    Ok(())
}

fn serve(config: &Path) -> CmdResult {
    let text =
        std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let t: ServeToml = toml::from_str(&text).context("parsing config")?;
    let variant: Variant = t.variant.parse().map_err(|e| anyhow!("variant: {e}"))?;
    let key_file = match config.parent() {
        Some(dir) if t.key_file.is_relative() => dir.join(&t.key_file),
        _ => t.key_file.clone(),
    };
    let mut cfg = ServerConfig::new(t.listen, key_file, variant);
    let d = Limits::default();
    cfg.limits = Limits {
        max_n: t.max_n.unwrap_or(d.max_n),
        max_message_bytes: t.max_message_bytes.unwrap_or(d.max_message_bytes),
    };
    if let Some(s) = t.io_timeout_secs {
        cfg.io_timeout = Duration::from_secs(s);
    }
    let server = Server::from_config(&cfg).context("starting server")?;
    let addr = server.local_addr().context("local address")?;
    println!("listening on {addr}");
    server.run();
    Ok(())
}

/// One message per line; a trailing newline does not start a new message.
fn read_messages(path: &Path) -> anyhow::Result<MessageList> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let msgs: Vec<Vec<u8>> = text.lines().map(|l| l.as_bytes().to_vec()).collect();
    MessageList::new(msgs).map_err(|e| anyhow!("messages file: {e}"))
}

fn strip_newline(mut b: Vec<u8>) -> Vec<u8> {
    if b.last() == Some(&b'\n') {
        b.pop();
        if b.last() == Some(&b'\r') {
            b.pop();
        }
    }
    b
}

fn request(
    addr: &str,
    vk: &Path,
    messages: &Path,
    j: usize,
    out: &Path,
    timeout: Duration,
) -> CmdResult {
    let vk = load_vk(vk)?;
    let list = read_messages(messages)?;
    if j >= list.len() {
        return Err(Failure::Usage(anyhow!(
            "--choose {j} out of range for {} messages",
            list.len()
        )));
    }
    let net = |e: NetError| match e {
        NetError::SignerCheated | NetError::Rejected(_) => Failure::Rejected(e.into()),
        e => Failure::Usage(e.into()),
    };
    let (pp, served_vk) = fetch_public_key(addr, timeout).map_err(net)?;
    if served_vk != vk {
        log::warn!("server advertises a different key; continuing with --vk");
    }
    if pp.scheme() != vk.scheme() {
        return Err(Failure::Rejected(anyhow!(
            "server scheme does not match --vk"
        )));
    }
    let (m, sig) =
        oblisig_net::request_signature_with_timeout(addr, &pp, &vk, &list, j, &mut OsRng, timeout)
            .map_err(net)?;
    let mut file = pp.to_bytes().to_vec();
    file.extend_from_slice(&sig.to_bytes());
    write(out, &file)?;
    eprintln!(
        "signed message {j} ({} bytes), {} signature bytes",
        m.len(),
        file.len()
    );
    Ok(())
}

/// Signature file: `pp (9 bytes) || σ`.
fn verify(vk: &Path, message: &Path, sig: &Path) -> CmdResult {
    let vk = load_vk(vk)?;
    let m = strip_newline(read(message)?);
    let file = read(sig)?;
    let ok = file.len() >= 9
        && OsPublicParams::from_bytes(&file[..9])
            .ok()
            .filter(|pp| pp.scheme() == vk.scheme())
            .and_then(|pp| {
                pp.decode_signature(&file[9..])
                    .ok()
                    .map(|s| pp.verify(&vk, &m, &s))
            })
            .unwrap_or(false);
    if ok {
        println!("valid");
        Ok(())
    } else {
        println!("invalid");
        Err(Failure::Rejected(anyhow!("signature does not verify")))
    }
}

fn games(seed: u64, weak_hash: bool) -> CmdResult {
    let report = run_suite(&SuiteConfig {
        seed,
        weak_hash,
        ..SuiteConfig::default()
    });
    for r in &report.records {
        println!(
            "{}",
            serde_json::to_string(r).context("serializing record")?
        );
    }
    if report.passed() {
        Ok(())
    } else {
        for f in &report.failures {
            eprintln!("invariant failed: {f}");
        }
        Err(Failure::Rejected(anyhow!(
            "{} invariant(s) failed",
            report.failures.len()
        )))
    }
}

fn bench(n_list: &[usize], variant: VariantArg, format: Format, seed: u64) -> CmdResult {
    if n_list.iter().any(|&n| n < 2) {
        return Err(Failure::Usage(anyhow!("every n must be at least 2")));
    }
    let variants = match variant {
        VariantArg::Ours => vec![Variant::Merkle],
        VariantArg::Zlh => vec![Variant::Zlh],
        VariantArg::Both => vec![Variant::Merkle, Variant::Zlh],
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let report = measure(
        n_list,
        &variants,
        HashParams::production(),
        SchemeId::Ed25519,
        &mut rng,
    )
    .context("measuring")?;
    match format {
        Format::Text => print!("{}", render_table(&report)),
        Format::Json => {
            for r in &report.rows {
                let v = JsonRow {
                    variant: r.variant.name(),
                    n: r.n,
                    vk_b: r.vk_bytes,
                    mu_b: r.mu_bytes,
                    rho_b: r.rho_bytes,
                    sig_b: r.sig_bytes,
                    paper_rho_bits: r.paper_rho_bits,
                    paper_sig_bits: r.paper_sig_bits,
                };
                let v = serde_json::to_string(&v).context("serializing row")?;
                println!("{v}");
            }
        }
    }
    if doubling_chain(n_list) {
        if let Err(v) = check_asymptotics(&report) {
            for x in &v {
                eprintln!("violation: {x}");
            }
            return Err(Failure::Rejected(anyhow!(
                "{} size law violation(s)",
                v.len()
            )));
        }
    }
    Ok(())
}

/// Bench row in column order.
#[derive(Serialize)]
struct JsonRow {
    variant: &'static str,
    n: usize,
    #[serde(rename = "vk_B")]
    vk_b: usize,
    #[serde(rename = "mu_B")]
    mu_b: usize,
    #[serde(rename = "rho_B")]
    rho_b: usize,
    #[serde(rename = "sig_B")]
    sig_b: usize,
    paper_rho_bits: usize,
    paper_sig_bits: usize,
}

fn doubling_chain(ns: &[usize]) -> bool {
    let mut s = ns.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len() >= 4 && s.windows(2).all(|w| w[1] == 2 * w[0])
}
