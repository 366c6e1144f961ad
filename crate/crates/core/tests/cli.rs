use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_secmux");

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn secmux(args: &[&str], config: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(config)
        .env_remove("SECMUX_GUARD_OVERRIDE")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn hash_verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let linear = write(&dir, "l.json", r#"{"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1, 1]}}"#);
    let o = secmux(&["hash", "verify"], &linear);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["result"]["subsets"].as_array().unwrap().len(), 7);

    let ident = write(
        &dir,
        "i.json",
        r#"{"family": {"kind": "explicit", "q": 2, "dims": [1, 1], "members": [[1, 0, 0, 1]]}}"#,
    );
    assert_eq!(code(&secmux(&["hash", "verify"], &ident)), 1);

    let bad = write(&dir, "b.json", r#"{"family": {"kind": "bijective-linear", "q": 2"#);
    assert_eq!(code(&secmux(&["hash", "verify"], &bad)), 2);
    let unknown = write(&dir, "u.json", r#"{"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]}, "extra": 1}"#);
    assert_eq!(code(&secmux(&["hash", "verify"], &unknown)), 2);
}

#[test]
fn pa_check_cases() {
    let dir = TempDir::new().unwrap();
    let indep = write(
        &dir,
        "ind.json",
        r#"{"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
            "joint": {"channel": {"constant": [0.2, 0.8], "inputs": 4}},
            "rho": [0.000001, 0.5, 1.0], "subsets": [[1]]}"#,
    );
    let o = secmux(&["pa", "check"], &indep);
    assert_eq!(code(&o), 0);
    let checks = stdout_json(&o)["result"]["checks"].clone();
    let first = &checks[0];
    assert!((first["lhs_exact"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(first["rhs_bound"].as_f64().unwrap() >= 2.0 - 1e-5);

    let big_rho = write(
        &dir,
        "rho.json",
        r#"{"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
            "joint": {"channel": {"identity": 4}}, "rho": [1.5]}"#,
    );
    assert_eq!(code(&secmux(&["pa", "check"], &big_rho)), 2);
}

#[test]
fn psi_phi_commands() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"channel": {"bsc": 0.2}, "rho": [0.5]}"#);
    let psi = stdout_json(&secmux(&["psi"], &cfg))["result"]["points"][0]["value"].as_f64().unwrap();
    let phi = stdout_json(&secmux(&["phi"], &cfg))["result"]["points"][0]["value"].as_f64().unwrap();
    assert!(psi <= phi);
    let zero = write(&dir, "z.json", r#"{"channel": {"bsc": 0.2}, "rho": [0.0]}"#);
    assert_eq!(code(&secmux(&["psi"], &zero)), 2);
}

#[test]
fn region_scan_csv_and_guard() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "s.json",
        r#"{"bob": {"bsc": 0.1}, "eve": {"bsc": 0.2},
            "scan": {"u_card": 1, "v_card": 2, "resolution": 101, "v_equals_x": true}}"#,
    );
    let o = Command::new(BIN)
        .args(["region", "scan", "--format", "csv", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|&h| h == "re").unwrap();
    let best = lines
        .map(|l| l.split(',').nth(col).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((best - 0.175319).abs() < 0.002, "{best}");

    let huge = write(
        &dir,
        "h.json",
        r#"{"bob": {"bsc": 0.1}, "eve": {"bsc": 0.2},
            "scan": {"u_card": 4, "v_card": 4, "resolution": 101}}"#,
    );
    let o = secmux(&["region", "scan"], &huge);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("scan-points"));
}

#[test]
fn region_member_exit_codes() {
    let dir = TempDir::new().unwrap();
    let base = r#""markov": {"p_u": [1.0], "v_given_u": {"constant": [0.5, 0.5], "inputs": 1}, "x_given_v": {"identity": 2}},
                  "bob": "b", "eve": "e", "channels": {"b": {"bsc": 0.1}, "e": {"bsc": 0.2}}"#;
    let inside = write(&dir, "in.json", &format!(r#"{{{base}, "rates": {{"bcc": {{"r1": 0.3, "re": 0.17, "r0": 0.0}}}}}}"#));
    assert_eq!(code(&secmux(&["region", "member"], &inside)), 0);
    let outside = write(&dir, "out.json", &format!(r#"{{{base}, "rates": {{"bcc": {{"r1": 0.3, "re": 0.18, "r0": 0.0}}}}}}"#));
    assert_eq!(code(&secmux(&["region", "member"], &outside)), 1);
    let bcd = write(&dir, "bcd.json", &format!(r#"{{{base}, "rates": {{"bcd": {{"r0": 0.0, "r1": 0.36}}}}}}"#));
    assert_eq!(code(&secmux(&["region", "member"], &bcd)), 0);
}

#[test]
fn simulate_noiseless_eve_and_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sim.json",
        r#"{"q": 2, "dims": [1, 0], "n": 2,
            "markov": {"p_u": [1.0], "v_given_u": {"constant": [0.5, 0.5], "inputs": 1}, "x_given_v": {"identity": 2}},
            "bob": {"bsc": 0.05}, "eve": {"identity": 2}, "maps": "identity",
            "codebooks": {"explicit": [{"u_words": [[0, 0]], "v_words": [[0, 1], [1, 1]]}]}}"#,
    );
    let run = |extra: &[&str]| {
        Command::new(BIN)
            .args(["simulate", "--format", "csv", "--config"])
            .arg(&cfg)
            .args(extra)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run(&[])), 2);
    let o = run(&["--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert!(row[1].parse::<f64>().unwrap() >= std::f64::consts::LN_2 - 1e-9);

    let bits = run(&["--seed", "3", "--bits"]);
    let text = String::from_utf8(bits.stdout).unwrap();
    let leak: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((leak - 1.0).abs() < 1e-9);
}

#[test]
fn outputs_are_atomic_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sim.json",
        r#"{"q": 2, "dims": [1, 1, 0], "n": 2, "common_messages": 2,
            "markov": {"p_u": [0.5, 0.5], "v_given_u": {"bsc": 0.2}, "x_given_v": {"identity": 2}},
            "bob": {"bsc": 0.05}, "eve": {"bsc": 0.25},
            "maps": {"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1, 0]}},
            "codebooks": {"random": 2}, "rho": [0.5, 1.0]}"#,
    );
    let out = dir.path().join("report.json");
    let mut seen = Vec::new();
    for _ in 0..2 {
        let o = Command::new(BIN)
            .args(["simulate", "--seed", "99", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
        seen.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(seen[0], seen[1]);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().starts_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");

    let other = dir.path().join("other.json");
    Command::new(BIN)
        .args(["simulate", "--seed", "100", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&other)
        .status()
        .unwrap();
    assert_ne!(std::fs::read(&other).unwrap(), seen[0]);
}

#[test]
fn guard_override_raises_limits() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "s.json",
        r#"{"bob": {"bsc": 0.1}, "eve": {"bsc": 0.2},
            "scan": {"u_card": 2, "v_card": 4, "resolution": 40, "v_equals_x": false}}"#,
    );
    // 40 * C(42,3)^2 * C(40,1)^4 exceeds 10^7 many times over.
    assert_eq!(code(&secmux(&["region", "scan"], &cfg)), 3);
    let small = write(
        &dir,
        "t.json",
        r#"{"bob": {"bsc": 0.1}, "eve": {"bsc": 0.2},
            "scan": {"u_card": 1, "v_card": 2, "resolution": 11}}"#,
    );
    let o = Command::new(BIN)
        .args(["region", "scan", "--threads", "2", "--config"])
        .arg(&small)
        .env("SECMUX_GUARD_OVERRIDE", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn usage_errors() {
    let o = Command::new(BIN).args(["nonsense"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(BIN).args(["psi"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(BIN).args(["--help"]).output().unwrap();
    assert_eq!(code(&o), 0);
}
