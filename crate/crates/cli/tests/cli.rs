use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oblisig"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Daemon {
    child: Child,
    addr: String,
}

impl Drop for Daemon {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn serve(dir: &Path, key: &str, variant: &str) -> Daemon {
    let cfg = dir.join(format!("{variant}.toml"));
    std::fs::write(
        &cfg,
        format!(
            "listen = \"127.0.0.1:0\"\nkey_file = \"{key}\"\nvariant = \"{variant}\"\nmax_n = 64\n"
        ),
    )
    .unwrap();
    let mut child = bin()
        .args(["serve", "--config", s(&cfg)])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let addr = line
        .trim()
        .strip_prefix("listening on ")
        .expect("listen line")
        .to_string();
    Daemon { child, addr }
}

struct Setup {
    dir: TempDir,
    vk: PathBuf,
    messages: PathBuf,
}

fn setup() -> Setup {
    let dir = TempDir::new().unwrap();
    let key = dir.path().join("signer.key");
    let o = run(&["keygen", "--out", s(&key)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let messages = dir.path().join("messages.txt");
    std::fs::write(
        &messages,
        "pay alice 10\npay bob 20\npay carol 30\npay dave 40\n",
    )
    .unwrap();
    let vk = dir.path().join("signer.key.pub");
    Setup { dir, vk, messages }
}

fn request(st: &Setup, d: &Daemon, vk: &Path, j: usize, out: &Path) -> Output {
    run(&[
        "request",
        "--addr",
        &d.addr,
        "--vk",
        s(vk),
        "--messages",
        s(&st.messages),
        "--choose",
        &j.to_string(),
        "--out",
        s(out),
    ])
}

fn verify(vk: &Path, msg: &Path, sig: &Path) -> i32 {
    code(&run(&[
        "verify",
        "--vk",
        s(vk),
        "--message",
        s(msg),
        "--sig",
        s(sig),
    ]))
}

#[test]
fn request_then_verify_and_tamper_sweep() {
    let st = setup();
    for variant in ["ours", "zlh"] {
        let d = serve(st.dir.path(), "signer.key", variant);
        let sig = st.dir.path().join(format!("{variant}.sig"));
        let o = request(&st, &d, &st.vk, 2, &sig);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

        let good = st.dir.path().join("good.txt");
        std::fs::write(&good, "pay carol 30\n").unwrap();
        assert_eq!(verify(&st.vk, &good, &sig), 0);
        let bad = st.dir.path().join("bad.txt");
        std::fs::write(&bad, "pay bob 20\n").unwrap();
        assert_eq!(verify(&st.vk, &bad, &sig), 1);

        // Every single-byte corruption of the signature file must fail.
        let bytes = std::fs::read(&sig).unwrap();
        let tampered = st.dir.path().join("tampered.sig");
        for i in 0..bytes.len() {
            let mut b = bytes.clone();
            b[i] ^= 0x01;
            std::fs::write(&tampered, &b).unwrap();
            assert_eq!(
                verify(&st.vk, &good, &tampered),
                1,
                "{variant}: byte {i} flip accepted"
            );
        }
        std::fs::write(&tampered, &bytes[..bytes.len() - 1]).unwrap();
        assert_eq!(verify(&st.vk, &good, &tampered), 1);
    }
}

#[test]
fn wrong_key_is_signer_cheated() {
    let st = setup();
    let other = st.dir.path().join("other.key");
    assert_eq!(code(&run(&["keygen", "--out", s(&other)])), 0);
    let d = serve(st.dir.path(), "signer.key", "ours");
    let o = request(
        &st,
        &d,
        &st.dir.path().join("other.key.pub"),
        0,
        &st.dir.path().join("x.sig"),
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("signer-cheated"));
}

#[test]
fn usage_errors_exit_two() {
    let st = setup();
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["verify", "--vk", s(&st.vk)])), 2);
    assert_eq!(code(&run(&["bench", "--n-list", "1,2"])), 2);
    let d = serve(st.dir.path(), "signer.key", "ours");
    let o = request(&st, &d, &st.vk, 4, &st.dir.path().join("x.sig"));
    assert_eq!(code(&o), 2);
    let missing = st.dir.path().join("nope");
    assert_eq!(verify(&missing, &st.messages, &missing), 2);
}

#[test]
fn games_are_deterministic() {
    for extra in [&[][..], &["--weak-hash"][..]] {
        let mut args = vec!["games", "--seed", "3"];
        args.extend_from_slice(extra);
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
        for line in String::from_utf8(a.stdout).unwrap().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["seed"], 3);
        }
    }
}

#[test]
fn bench_json_rows() {
    let o = run(&[
        "bench",
        "--n-list",
        "2,4,8,16",
        "--variant",
        "both",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let rows: Vec<serde_json::Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let n = r["n"].as_u64().unwrap();
        match r["variant"].as_str().unwrap() {
            "ours" => assert_eq!(r["rho_B"], 64),
            "zlh" => assert_eq!(r["rho_B"].as_u64().unwrap(), 64 * n),
            v => panic!("{v}"),
        }
    }
    let text = run(&["bench", "--n-list", "8", "--variant", "ours"]);
    let out = String::from_utf8(text.stdout).unwrap();
    assert!(out.starts_with("variant"));
    assert!(out.contains("261"));
}
