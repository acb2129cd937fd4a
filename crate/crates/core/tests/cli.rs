use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use tempfile::TempDir;

fn urdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urdp"))
        .args(args)
        .env_remove("URDP_SEED")
        .output()
        .expect("spawn urdp")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Keys {
    dir: TempDir,
    pk: PathBuf,
    sk: PathBuf,
}

fn keygen(backend: &str, seed: &str) -> Keys {
    let dir = TempDir::new().unwrap();
    let pk = dir.path().join("key.pk");
    let sk = dir.path().join("key.sk");
    let out = urdp(&[
        "keygen",
        "--backend",
        backend,
        "--out-pk",
        s(&pk),
        "--out-sk",
        s(&sk),
        "--seed",
        seed,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    Keys { dir, pk, sk }
}

#[test]
fn one_mebibyte_round_trip() {
    let keys = keygen("lwe", "11");
    let plain = keys.dir.path().join("plain");
    let ct = keys.dir.path().join("plain.urdp");
    let back = keys.dir.path().join("plain.out");
    let mut data = vec![0u8; 1 << 20];
    ChaCha20Rng::seed_from_u64(1).fill_bytes(&mut data);
    fs::write(&plain, &data).unwrap();

    let out = urdp(&[
        "encrypt",
        "--pk",
        s(&keys.pk),
        "--in",
        s(&plain),
        "--out",
        s(&ct),
    ]);
    assert_eq!(code(&out), 0);
    let out = urdp(&[
        "decrypt",
        "--sk",
        s(&keys.sk),
        "--in",
        s(&ct),
        "--out",
        s(&back),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(&back).unwrap(), data);
}

#[test]
fn flipped_c1_byte_is_rejected() {
    let keys = keygen("lwe", "12");
    let plain = keys.dir.path().join("m");
    let ct = keys.dir.path().join("c");
    let bad = keys.dir.path().join("bad");
    let back = keys.dir.path().join("out");
    fs::write(&plain, b"the quick brown fox jumps over the lazy dog").unwrap();
    assert_eq!(
        code(&urdp(&[
            "encrypt",
            "--pk",
            s(&keys.pk),
            "--in",
            s(&plain),
            "--out",
            s(&ct),
            "--seed",
            "3"
        ])),
        0
    );
    let valid = fs::read(&ct).unwrap();
    // magic, version, backend, n, ell, then the C1 length field
    let c1_len = u64::from_be_bytes(valid[22..30].try_into().unwrap()) as usize;
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut rejected = 0;
    for _ in 0..100 {
        let mut c = valid.clone();
        // Skip the first byte so C1 keeps its canonical encoding.
        let i = 30 + rng.gen_range(1..c1_len);
        c[i] ^= 1 << rng.gen_range(0..8);
        fs::write(&bad, &c).unwrap();
        let out = urdp(&[
            "decrypt",
            "--sk",
            s(&keys.sk),
            "--in",
            s(&bad),
            "--out",
            s(&back),
        ]);
        if code(&out) == 3 {
            assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "REJECT");
            rejected += 1;
        }
    }
    assert!(rejected >= 99, "only {rejected}/100 rejected");
}

#[test]
fn non_ciphertext_input_is_a_format_error() {
    let keys = keygen("xor", "5");
    let junk = keys.dir.path().join("junk");
    fs::write(&junk, b"definitely not a ciphertext").unwrap();
    let out = keys.dir.path().join("out");
    let res = urdp(&[
        "decrypt",
        "--sk",
        s(&keys.sk),
        "--in",
        s(&junk),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 2);
    assert!(!out.exists());
}

#[test]
fn missing_input_is_an_io_error() {
    let keys = keygen("xor", "5");
    let missing = keys.dir.path().join("nope");
    let out = keys.dir.path().join("out");
    let res = urdp(&[
        "encrypt",
        "--pk",
        s(&keys.pk),
        "--in",
        s(&missing),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 4);
}

#[test]
fn seeded_commands_are_reproducible() {
    let a = keygen("lwe", "42");
    let b = keygen("lwe", "42");
    assert_eq!(fs::read(&a.pk).unwrap(), fs::read(&b.pk).unwrap());
    assert_eq!(fs::read(&a.sk).unwrap(), fs::read(&b.sk).unwrap());

    let plain = a.dir.path().join("m");
    fs::write(&plain, b"reproducible").unwrap();
    let c1 = a.dir.path().join("c1");
    let c2 = a.dir.path().join("c2");
    for c in [&c1, &c2] {
        let out = urdp(&[
            "encrypt",
            "--pk",
            s(&a.pk),
            "--in",
            s(&plain),
            "--out",
            s(c),
            "--seed",
            "7",
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());

    let out = Command::new(env!("CARGO_BIN_EXE_urdp"))
        .args(["keygen", "--out-pk", s(&c1), "--out-sk", s(&c2)])
        .env("URDP_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&a.pk).unwrap());
}

#[test]
fn keygen_rejects_bad_lwe_parameters() {
    let dir = TempDir::new().unwrap();
    let pk = dir.path().join("pk");
    let sk = dir.path().join("sk");
    let out = urdp(&[
        "keygen",
        "--out-pk",
        s(&pk),
        "--out-sk",
        s(&sk),
        "--lwe-modulus",
        "6",
    ]);
    assert_eq!(code(&out), 2);
    assert!(!pk.exists());
}

fn summary(stdout: &[u8]) -> serde_json::Value {
    let text = String::from_utf8_lossy(stdout);
    let line = text.lines().last().expect("summary line");
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["summary"], true);
    v
}

#[test]
fn cca2_coinflip_has_no_advantage() {
    let out = urdp(&[
        "game",
        "--scenario",
        "cca2",
        "--trials",
        "2000",
        "--adversary",
        "coinflip",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let v = summary(&out.stdout);
    assert_eq!(v["trials"], 2000);
    assert!(v["advantage"].as_f64().unwrap() <= 0.05);
    let lines = String::from_utf8_lossy(&out.stdout).lines().count();
    assert_eq!(lines, 2001);
}

#[test]
fn game3_never_recovers_the_message() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("game3.jsonl");
    let out = urdp(&[
        "game",
        "--scenario",
        "game3",
        "--trials",
        "200",
        "--seed",
        "2",
        "--report",
        s(&report),
    ]);
    assert_eq!(code(&out), 0);
    let v = summary(&out.stdout);
    assert_eq!(v["recovered_mb"], 0);
    let written = fs::read_to_string(&report).unwrap();
    assert_eq!(written.lines().count(), 201);
    assert!(written.contains("\"reason\":\"not_divisible\""));
}

#[test]
fn game_report_is_reproducible() {
    let run = || {
        urdp(&[
            "game",
            "--scenario",
            "game2",
            "--trials",
            "50",
            "--seed",
            "9",
        ])
        .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn zero_trials_is_a_parameter_error() {
    let out = urdp(&["game", "--scenario", "game1", "--trials", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_scenario_is_a_parameter_error() {
    let out = urdp(&["game", "--scenario", "game9", "--trials", "5"]);
    assert_eq!(code(&out), 2);
}
