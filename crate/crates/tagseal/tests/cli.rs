use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigUint;
use tempfile::TempDir;

fn tagseal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tagseal"))
        .args(args)
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Setup {
    dir: TempDir,
    params: PathBuf,
    key: PathBuf,
}

fn exchanged(n: &str, seed: &str) -> Setup {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("group.json");
    let key = dir.path().join("key.hex");
    let o = tagseal(&[
        "group-gen",
        "--bits",
        "128",
        "--seed",
        "1",
        "--out",
        path_str(&params),
    ]);
    assert!(o.status.success());
    let o = tagseal(&[
        "exchange",
        "--n",
        n,
        "--params",
        path_str(&params),
        "--seed",
        seed,
        "--out",
        path_str(&key),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    Setup { dir, params, key }
}

#[test]
fn group_gen_small_groups_are_eight_bit_safe_primes() {
    for seed in 0..12 {
        let o = tagseal(&["group-gen", "--bits", "8", "--seed", &seed.to_string()]);
        assert!(o.status.success());
        let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let p = u64::from_str_radix(json["p"].as_str().unwrap(), 16).unwrap();
        assert!([23, 47, 59, 83, 107, 167, 179, 227].contains(&p), "{p}");
    }
}

#[test]
fn group_gen_is_seeded_and_sized() {
    let a = tagseal(&["group-gen", "--bits", "128", "--seed", "9"]);
    let b = tagseal(&["group-gen", "--bits", "128", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let field = |k: &str| BigUint::parse_bytes(json[k].as_str().unwrap().as_bytes(), 16).unwrap();
    assert_eq!(field("p").bits(), 128);
    assert_eq!(field("q").bits(), 127);
    assert_eq!(field("p"), field("q") * 2u32 + 1u32);
    assert_eq!(
        tagseal(&["group-gen", "--bits", "3"]).status.code(),
        Some(1)
    );
}

#[test]
fn exchange_is_deterministic_and_bounded() {
    let s = exchanged("3", "5");
    let again = s.dir.path().join("again.hex");
    let o = tagseal(&[
        "exchange",
        "--n",
        "3",
        "--params",
        path_str(&s.params),
        "--seed",
        "5",
        "--out",
        path_str(&again),
        "--threaded",
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read(&s.key).unwrap(), fs::read(&again).unwrap());

    let transcript = s.dir.path().join("t.jsonl");
    let o = tagseal(&[
        "exchange",
        "--n",
        "64",
        "--params",
        path_str(&s.params),
        "--seed",
        "1",
        "--transcript",
        path_str(&transcript),
    ]);
    assert!(o.status.success());
    let lines = fs::read_to_string(&transcript).unwrap().lines().count();
    assert!(lines <= 320, "{lines}");
    let key = stdout(&o);
    assert!(!fs::read_to_string(&transcript)
        .unwrap()
        .contains(&format!("\"{}\"", key.trim())));
}

#[test]
fn exchange_input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(
        tagseal(&["exchange", "--n", "3", "--params", path_str(&missing)])
            .status
            .code(),
        Some(1)
    );
    // Structurally fine, but q = 21 is composite.
    let fake = dir.path().join("fake.json");
    fs::write(&fake, r#"{"p":"2b","q":"15","alpha":"4"}"#).unwrap();
    assert_eq!(
        tagseal(&["exchange", "--n", "3", "--params", path_str(&fake)])
            .status
            .code(),
        Some(1)
    );
    let s = exchanged("2", "0");
    assert_eq!(
        tagseal(&["exchange", "--n", "0", "--params", path_str(&s.params)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn seal_then_open() {
    let s = exchanged("4", "2");
    let record = s.dir.path().join("r.jsonl");
    let o = tagseal(&[
        "seal",
        "--tag",
        "123456",
        "--tag-bits",
        "20",
        "--budget",
        "60",
        "--key",
        path_str(&s.key),
        "--manifest-id",
        "photo-1",
        "--out",
        path_str(&record),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line = fs::read_to_string(&record).unwrap();
    let json: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(json["b_budget"], 60);
    assert_eq!(json["manifest_id"], "photo-1");
    assert_eq!(json["nonce"].as_str().unwrap().len(), 32);
    assert_eq!(json["cipher"].as_str().unwrap().len(), 16);

    let o = tagseal(&[
        "open",
        "--record",
        path_str(&record),
        "--key",
        path_str(&s.key),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "123456");
}

#[test]
fn sealing_twice_differs() {
    let s = exchanged("2", "3");
    let key = path_str(&s.key);
    let a = tagseal(&["seal", "--tag", "77", "--tag-bits", "8", "--key", key]);
    let b = tagseal(&["seal", "--tag", "77", "--tag-bits", "8", "--key", key]);
    assert!(a.status.success() && b.status.success());
    let cipher = |o: &Output| {
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["cipher"].clone()
    };
    assert_ne!(cipher(&a), cipher(&b));
    let c = tagseal(&[
        "seal",
        "--tag",
        "77",
        "--tag-bits",
        "8",
        "--key",
        key,
        "--seed",
        "4",
    ]);
    let d = tagseal(&[
        "seal",
        "--tag",
        "77",
        "--tag-bits",
        "8",
        "--key",
        key,
        "--seed",
        "4",
    ]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn wrong_key_opens_silently_to_garbage() {
    let s = exchanged("2", "3");
    let record = s.dir.path().join("r.jsonl");
    let mut lines = String::new();
    for seed in 0..10 {
        let o = tagseal(&[
            "seal",
            "--tag",
            "1000",
            "--tag-bits",
            "16",
            "--key",
            path_str(&s.key),
            "--seed",
            &seed.to_string(),
        ]);
        lines.push_str(&stdout(&o));
    }
    fs::write(&record, lines).unwrap();
    let wrong = s.dir.path().join("wrong.hex");
    fs::write(&wrong, "abcdef\n").unwrap();
    let o = tagseal(&[
        "open",
        "--record",
        path_str(&record),
        "--key",
        path_str(&wrong),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let tags: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(tags.len(), 10);
    assert!(tags.iter().filter(|t| *t == "1000").count() <= 1);
}

#[test]
fn seal_and_open_reject_bad_input() {
    let s = exchanged("1", "0");
    let key = path_str(&s.key);
    assert_eq!(
        tagseal(&["seal", "--tag", "300", "--tag-bits", "8", "--key", key])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        tagseal(&[
            "seal",
            "--tag",
            "3",
            "--tag-bits",
            "8",
            "--budget",
            "15",
            "--key",
            key
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        tagseal(&["seal", "--tag", "x", "--key", key]).status.code(),
        Some(1)
    );
    let record = s.dir.path().join("bad.jsonl");
    fs::write(
        &record,
        "{\"manifest_id\":\"a\",\"nonce\":\"00\",\"b_budget\":8,\"cipher\":\"ff\"}\n",
    )
    .unwrap();
    assert_eq!(
        tagseal(&["open", "--record", path_str(&record), "--key", key])
            .status
            .code(),
        Some(1)
    );
    fs::write(&record, "not json\n").unwrap();
    assert_eq!(
        tagseal(&["open", "--record", path_str(&record), "--key", key])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn attack_curve_small_sweep() {
    let o = tagseal(&[
        "attack-curve",
        "--b-list",
        "4",
        "--ratio-list",
        "2,3",
        "--samples",
        "300",
        "--seeds",
        "2",
        "--encrypted",
        "both",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scheme,encrypted,b,B,T,seed,rho"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 2 * 2 * 2 * 2);
    for row in &rows {
        let rho: f64 = row[6].parse().unwrap();
        assert!((0.0..=1.0).contains(&rho));
        if row[0] == "fixed-bits" && row[1] == "false" {
            assert!(rho > 0.999);
        }
    }
}

#[test]
fn attack_curve_rejects_bad_sweeps() {
    assert_eq!(
        tagseal(&["attack-curve", "--ratio-list", ""]).status.code(),
        Some(1)
    );
    assert_eq!(
        tagseal(&[
            "attack-curve",
            "--b-list",
            "10",
            "--ratio-list",
            "1.5",
            "--samples",
            "100"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        tagseal(&["attack-curve", "--samples", "10"]).status.code(),
        Some(1)
    );
    assert_eq!(
        tagseal(&["attack-curve", "--pad-mode", "reused"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn gaussian_demo_outputs() {
    let run = |rho: &str| {
        let o = tagseal(&[
            "gaussian-demo",
            "--rho",
            rho,
            "--trials",
            "200000",
            "--seed",
            "3",
        ]);
        assert!(o.status.success());
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    assert!(run("0.9")["var_ratio"].as_f64().unwrap() < 1.0);
    let zero = run("0");
    let ratio = zero["var_ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 3.0 * zero["std_error"].as_f64().unwrap());
    assert_eq!(
        tagseal(&["gaussian-demo", "--rho", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        tagseal(&["gaussian-demo", "--rho", "-0.2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        tagseal(&["gaussian-demo", "--rho", "0.5", "--sigma-h", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn usage_exit_codes() {
    assert_eq!(tagseal(&["--help"]).status.code(), Some(0));
    assert_eq!(tagseal(&["--version"]).status.code(), Some(0));
    assert_eq!(tagseal(&[]).status.code(), Some(1));
    assert_eq!(tagseal(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        tagseal(&["group-gen", "--bits", "many"]).status.code(),
        Some(1)
    );
}
