use neatgames_cli::interchange::{export_network, export_structure};
use neatgames_cli::run;
use neatgames_core::fullset::build_full_set_structure;
use neatgames_core::network::Network;
use neatgames_core::CaAtomStructure;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Out {
    fn report(&self) -> Value {
        let (_, doc) = self.stdout.split_once("--- report\n").expect("no report block");
        serde_json::from_str(doc).unwrap()
    }

    fn document(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap()
    }
}

fn cli(args: &[&str]) -> Out {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("neatgames").chain(args.iter().copied()), &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neatgames"))
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn write_json(path: &Path, v: &Value) {
    std::fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

#[test]
fn one_atom_export_is_fixed() {
    let want = std::fs::read_to_string(fixture("one_atom.json")).unwrap();
    let got = cli(&["fullset", "--n", "3", "--base", "1"]);
    assert_eq!(got.code, 0);
    assert_eq!(got.stdout, want);
    let again = cli(&["export", "--in", &fixture("one_atom.json")]);
    assert_eq!(again.stdout, want);
    let lib = export_structure(&CaAtomStructure::from(build_full_set_structure(3, 1).unwrap()));
    assert_eq!(serde_json::from_str::<Value>(&want).unwrap(), lib);
}

#[test]
fn rainbow_generator_document() {
    let o = cli(&["rainbow", "--n", "3", "--greens", "4", "--reds", "3"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let d = o.document();
    assert_eq!(d["kind"], "ca-structure");
    assert_eq!(d["generator"]["rule"], "rainbow");
    assert_eq!(d["generator"]["greens"].as_array().unwrap().len(), 4);
    let twice = cli(&["rainbow", "--n", "3", "--greens", "4", "--reds", "3"]);
    assert_eq!(o.stdout, twice.stdout);
}

#[test]
fn pea43_export_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let src = tmp(&dir, "pea43.json");
    let o = cli(&["rainbow", "--n", "3", "--greens", "4", "--reds", "3", "--out", src.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let a = cli(&["export", "--in", src.to_str().unwrap()]);
    let b = cli(&["export", "--in", src.to_str().unwrap()]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout.as_bytes(), b.stdout.as_bytes());
    assert_eq!(a.stdout, std::fs::read_to_string(&src).unwrap());
}

#[test]
fn diagonal_of_the_full_set_frame() {
    let dir = tempfile::tempdir().unwrap();
    let f33 = tmp(&dir, "f33.json");
    cli(&["fullset", "--n", "3", "--base", "3", "--out", f33.to_str().unwrap()]);
    let o = cli(&["eval", "--in", f33.to_str().unwrap(), "--term", "d(0,1)"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.report()["details"]["size"], 9);
}

#[test]
fn structures_round_trip_through_export_and_import() {
    let dir = tempfile::tempdir().unwrap();
    let generated: [(&str, Vec<&str>); 4] = [
        ("fullset", vec!["fullset", "--n", "3", "--base", "2"]),
        ("monk", vec!["monk", "--graph", "two-triangles", "--colours", "3"]),
        ("blur", vec!["blur", "--l", "2", "--i-size", "6", "--copies", "3"]),
        ("rainbow", vec!["rainbow", "--n", "3", "--greens", "2", "--reds", "2"]),
    ];
    let mut files: Vec<String> = ["one_atom.json", "monk_edge.json", "blur_2_6_3.json"]
        .iter()
        .map(|f| fixture(f))
        .collect();
    for (name, args) in generated {
        let p = tmp(&dir, &format!("{name}.json"));
        let mut args = args.clone();
        args.extend(["--out", p.to_str().unwrap()]);
        let o = cli(&args);
        assert_eq!(o.code, 0, "{name}: {}", o.stderr);
        files.push(p.to_string_lossy().into_owned());
    }
    for f in files {
        let original = std::fs::read_to_string(&f).unwrap();
        let exported = cli(&["export", "--in", &f]);
        assert_eq!(exported.code, 0, "{f}: {}", exported.stderr);
        assert_eq!(exported.stdout, original, "{f}");
        let imported = cli(&["import", "--in", &f]);
        assert_eq!(imported.code, 0, "{f}: {}", imported.stderr);
    }
}

#[test]
fn networks_round_trip_and_need_their_structure() {
    let dir = tempfile::tempdir().unwrap();
    let s = CaAtomStructure::from(build_full_set_structure(3, 1).unwrap());
    let net = tmp(&dir, "net.json");
    write_json(&net, &export_network(&s, &Network::from_labels(3, 1, vec![0])));
    let one = fixture("one_atom.json");

    let o = cli(&["import", "--in", net.to_str().unwrap(), "--structure", &one]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let e = cli(&["export", "--in", net.to_str().unwrap(), "--structure", &one]);
    assert_eq!(e.stdout, std::fs::read_to_string(&net).unwrap() + "\n");

    let bare = cli(&["import", "--in", net.to_str().unwrap()]);
    assert_eq!(bare.code, 2);
    assert!(bare.stderr.contains("--structure"), "{}", bare.stderr);
}

#[test]
fn strategies_round_trip_and_check_the_structure_hash() {
    let dir = tempfile::tempdir().unwrap();
    let one = fixture("one_atom.json");
    let strat = tmp(&dir, "strat.json");
    let o = cli(&["solve", "--in", &one, "--variant", "G", "--m", "3", "--rounds", "omega", "--out", strat.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.report()["details"]["winner"], "exists");

    let e = cli(&["export", "--in", strat.to_str().unwrap(), "--structure", &one]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    assert_eq!(e.stdout, std::fs::read_to_string(&strat).unwrap());
    let v = cli(&["verify", "--in", &one, "--strategy", strat.to_str().unwrap()]);
    assert_eq!(v.code, 0, "{}", v.stderr);
    assert_eq!(v.report()["verdict"], "yes");

    let f32 = tmp(&dir, "f32.json");
    cli(&["fullset", "--n", "3", "--base", "2", "--out", f32.to_str().unwrap()]);
    let wrong = cli(&["verify", "--in", f32.to_str().unwrap(), "--strategy", strat.to_str().unwrap()]);
    assert_eq!(wrong.code, 2);
    assert!(wrong.stderr.contains("hash"), "{}", wrong.stderr);
}

#[test]
fn dangling_atom_id_is_named() {
    let o = cli(&["import", "--in", &fixture("dangling_t0.json")]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("atom id 5"), "{}", o.stderr);
}

#[test]
fn malformed_json_reports_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = tmp(&dir, "bad.json");
    std::fs::write(&bad, "{\n  \"kind\": \"ca-structure\",\n  oops\n}\n").unwrap();
    let o = cli(&["import", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 3"), "{}", o.stderr);
    assert!(o.stderr.contains("column"), "{}", o.stderr);
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let o = cli(&["basis", "--in", "/nonexistent/frame.json", "--m", "3"]);
    assert_eq!(o.code, 2);
}

#[test]
fn report_block_is_sorted_json() {
    let o = cli(&["chromatic", "--graph", "petersen"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let r = o.report();
    assert_eq!(r["kind"], "report");
    assert_eq!(r["command"], "chromatic");
    let (_, raw) = o.stdout.split_once("--- report\n").unwrap();
    let keys: Vec<&str> = raw
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("    "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn binary_exit_codes() {
    let one = fixture("one_atom.json");

    let ok = bin().args(["basis", "--in", &one, "--m", "3", "--expect", "yes"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let unmet = bin().args(["basis", "--in", &one, "--m", "3", "--expect", "no"]).output().unwrap();
    assert_eq!(unmet.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unmet.stderr).contains("expected verdict no"));

    let unknown = bin().args(["basis", "--in", &one, "--frobnicate"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let missing = bin().arg("solve").output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let pea = tmp(&dir, "pea43.json");
    cli(&["rainbow", "--n", "3", "--greens", "4", "--reds", "3", "--out", pea.to_str().unwrap()]);
    let o = bin()
        .args(["solve", "--in", pea.to_str().unwrap(), "--variant", "G", "--m", "6", "--rounds", "omega"])
        .env("NEATGAMES_BUDGET_MS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict: inconclusive"));
}

#[test]
fn ef_from_the_command_line() {
    let o = cli(&["ef", "--g1", "k4", "--g2", "k3", "--pebbles", "4", "--rounds", "5"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.report()["details"]["winner"], "forall");
    let o = cli(&["ef", "--g1", "k4", "--g2", "k3", "--pebbles", "3", "--rounds", "5", "--expect", "yes"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
}
