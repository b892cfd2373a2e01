use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use enriques_core::lattice::IntegralLattice;

fn enriques(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enriques"))
        .args(args)
        .env("ENRIQUES_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn ns_lattice_file_has_determinant_minus_81() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ns.json");
    let out = enriques(dir.path(), &["ns-lattice", "-p", "3", "--sigma", "2", "-o", file.to_str().unwrap()]);
    assert!(out.status.success());
    let l = IntegralLattice::parse(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(l.rank(), 22);
    assert_eq!(l.determinant(), (-81).into());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(enriques(dir.path(), &["count", "-p", "4", "--sigma", "1"]).status.code(), Some(2));
    assert_eq!(enriques(dir.path(), &["count", "-p", "3"]).status.code(), Some(2));
    assert_eq!(enriques(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(enriques(dir.path(), &["count", "-p", "3", "--sigma", "1", "--jobs", "0"]).status.code(), Some(2));
    assert_eq!(enriques(dir.path(), &["oq-order", "-p", "3", "--sigma", "1", "--epsilon", "2"]).status.code(), Some(2));
}

#[test]
fn small_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let g = enriques(dir.path(), &["gamma2"]);
    let l = IntegralLattice::parse(&String::from_utf8(g.stdout).unwrap()).unwrap();
    assert_eq!((l.rank(), l.signature()), (10, (1, 9)));
    let d = json(&enriques(dir.path(), &["delta-form", "-p", "3", "--sigma", "1"]));
    assert_eq!(d["order"], "9216");
    assert_eq!(d["milgram_signature"], 4);
    let o = json(&enriques(dir.path(), &["oq-order", "-p", "3", "--sigma", "2", "--epsilon", "-1"]));
    assert_eq!(o["order"], "1440");
}

#[test]
fn verify_accepts_seed_and_rejects_other_genus() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("seed.json");
    assert!(enriques(dir.path(), &["seed", "-p", "3", "--sigma", "1", "-o", file.to_str().unwrap()]).status.success());
    let f = file.to_str().unwrap();
    assert_eq!(json(&enriques(dir.path(), &["verify", f, "-p", "3", "--sigma", "1"]))["member"], true);
    let out = enriques(dir.path(), &["verify", f, "-p", "3", "--sigma", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["member"], false);
}

#[test]
fn catalog_cache_roundtrip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let first = enriques(dir.path(), &["genus", "-p", "3", "--sigma", "1"]);
    assert!(first.status.success());
    let file = dir.path().join("genus-p3-s1.json");
    assert!(file.exists(), "missing cache is populated");
    let second = enriques(dir.path(), &["genus", "-p", "3", "--sigma", "1"]);
    assert_eq!(first.stdout, second.stdout);
    let text = fs::read_to_string(&file).unwrap();
    fs::write(&file, text.replacen("\"gram\":[[-4", "\"gram\":[[-6", 1)).unwrap();
    let bad = enriques(dir.path(), &["count", "-p", "3", "--sigma", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("checksum"));
}

#[test]
fn refusal_and_empty_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = enriques(dir.path(), &["count", "-p", "37", "--sigma", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
    let r = json(&enriques(dir.path(), &["count", "-p", "3", "--sigma", "6"]));
    assert_eq!((r["lower_bound"].as_str(), r["upper_bound"].as_str()), (Some("0"), Some("0")));
    let t = enriques(dir.path(), &["tables", "-p", "37", "--sigma", "3,6"]);
    assert!(t.status.success());
    let text = String::from_utf8(t.stdout).unwrap();
    assert!(text.lines().any(|l| l == "37 ? 0"), "{text}");
}
