use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use stasheff::field::Field;
use stasheff::io::{parse, serialize, Structure};
use stasheff::models::exterior_algebra;
use stasheff::random::{random_module, rng, transport};
use stasheff::structures::AnMorphism;

fn fixtures() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut v: Vec<PathBuf> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "json")).collect();
    v.sort();
    v
}

#[test]
fn fixtures_round_trip_byte_for_byte() {
    let files = fixtures();
    assert!(files.len() >= 10);
    for p in files {
        let text = std::fs::read_to_string(&p).unwrap();
        let (s, w) = parse(&text).unwrap();
        assert_eq!(serialize(&s, w), text, "{}", p.display());
    }
}

#[test]
fn random_structures_round_trip() {
    let mut r = rng(99);
    for field in [Field::prime(5).unwrap(), Field::Rational] {
        let lam = Arc::new(exterior_algebra(field, 1).unwrap());
        for _ in 0..5 {
            let x = Arc::new(random_module(&mut r, &lam, &[0, 1, 2], 1, 4).unwrap());
            let (y, g) = transport(&mut r, &x, 4).unwrap();
            let g = AnMorphism::new("g", x.clone(), Arc::new(y), g.comps().to_vec(), 4).unwrap();
            for s in [Structure::AnModule((*x).clone()), Structure::AnMorphism(g)] {
                let text = serialize(&s, Some((-3, 7)));
                let (back, w) = parse(&text).unwrap();
                assert_eq!(w, Some((-3, 7)));
                assert_eq!(serialize(&back, w), text);
                if let (Structure::AnModule(a), Structure::AnModule(b)) = (&s, &back) {
                    assert!((1..=4).all(|k| a.op_or_zero(k) == b.op_or_zero(k)));
                }
            }
        }
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let text = std::fs::read_to_string(fixtures()[0].clone()).unwrap();
    assert!(parse(&text.replacen("\"format\"", "\"formt\"", 1)).is_err());
    assert!(parse("{}").is_err());
    assert!(parse(&text.replacen("\"prime\": 5", "\"prime\": 4", 1)).is_err());
    assert!(parse(&text.replacen("\"s0\"", "\"s9\"", 1)).is_err());
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stasheff")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

#[test]
fn cli_exit_codes() {
    assert_eq!(cli(&["check", &fixture("dual_numbers.json"), "--order", "5"]).0, 0);
    assert_eq!(cli(&["check", &fixture("tate4_algebra.json"), "--order", "6"]).0, 0);
    assert_eq!(cli(&["check", &fixture("tate5_y_module.json"), "--order", "8"]).0, 0);
    assert_eq!(cli(&["check", "/nonexistent/file.json"]).0, 3);
    assert_eq!(cli(&["obstruct", &fixture("tate4_quotient_module.json"), "--stage", "4"]).0, 1);
    assert_eq!(cli(&["obstruct", &fixture("tate4_free_module.json"), "--stage", "6"]).0, 0);
    assert_eq!(cli(&["tower", &fixture("tate4_quotient_module.json"), "--stages", "4"]).0, 1);
}

#[test]
fn cli_detects_a_corrupted_sign() {
    let text = std::fs::read_to_string(fixture("tate4_y_module.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut found = false;
    // Flip the first coefficient "1" of a higher operation entry to "4" (= -1 mod 5).
    let marker = "\"name\": \"m3\"";
    if let Some(pos) = text.find(marker) {
        if let Some(off) = text[pos..].find("\"1\",") {
            let mut bad = text.clone();
            bad.replace_range(pos + off..pos + off + 3, "\"4\"");
            let path = dir.path().join("bad.json");
            std::fs::write(&path, bad).unwrap();
            let (code, out) = cli(&["check", path.to_str().unwrap(), "--order", "8", "--json"]);
            assert_eq!(code, 1);
            assert!(out.contains("first_failure"));
            found = true;
        }
    }
    assert!(found, "no entry to corrupt");
}

#[test]
fn cli_transfer_output_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let (code, _) = cli(&["transfer", "--builder", "trunc-poly", "--p", "5", "--n", "4", "--order", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(cli(&["check", out.to_str().unwrap(), "--order", "6"]).0, 0);
    let (code, _) = cli(&["transfer", &fixture("exterior_dga.json"), "--order", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let (s, _) = parse(&text).unwrap();
    match s {
        Structure::AlgebraMorphism(f) => assert!((3..=5).all(|k| f.source.op(k).is_none())),
        other => panic!("unexpected {}", other.kind()),
    }
}

#[test]
fn cli_tower_writes_stage_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = cli(&["tower", &fixture("exterior_random_module.json"), "--stages", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let names: Vec<String> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names.len(), 2);
    for n in names {
        let text = std::fs::read_to_string(dir.path().join(n)).unwrap();
        let (s, w) = parse(&text).unwrap();
        assert_eq!(serialize(&s, w), text);
    }
}
