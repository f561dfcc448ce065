use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lazy-pta"))
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}.pt", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn text_output_and_exit_codes() {
    let out = bin().arg(fixture("loop")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("analysis lpta"));
    assert!(text.contains("mode intra"));
    assert!(text.contains("aout {(q,r)}"));

    // missing input file
    let out = bin().arg("/no/such/file.pt").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // malformed program
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "ptr x; proc main() {{ x = **x; }}").unwrap();
    let out = bin().arg(f.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // analysis error: intra mode on a multi-procedure program
    let out = bin().args([&fixture("recursive"), "--mode", "intra"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // strict sanity violation
    let out = bin().args([&fixture("sanity"), "--strict-sanity"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("*x = y"));
    // without the flag it is only an analysis result
    let out = bin().arg(fixture("sanity")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn mode_auto_picks_inter_for_calls() {
    let out = bin().arg(fixture("recursive")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("mode inter"));
}

#[test]
fn json_schema() {
    let out = bin()
        .args([&fixture("recursive"), "--format", "json", "--dump", "must", "--dump", "contexts"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["program"], "recursive");
    assert_eq!(doc["analysis"], "lpta");
    assert_eq!(doc["mode"], "inter");
    let nodes = doc["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 13);
    assert_eq!(nodes[0]["id"], 1);
    // the undefined location serializes as "?"
    assert!(nodes[0]["ain"]
        .as_array()
        .unwrap()
        .iter()
        .any(|p| p[0] == "z" && p[1] == "?"));
    // per-context tables are present under the contexts dump
    assert!(nodes[7]["contexts"].as_array().unwrap().len() >= 2);
    // never-initialized pointers report the full-set sentinel
    assert_eq!(nodes[0]["uin"]["z"], "*");
    assert!(doc["metrics"]["max_call_strings"] == 3);
}

#[test]
fn dot_output() {
    let out = bin().args([&fixture("recursive"), "--format", "dot"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("style=dashed"));
    assert!(dot.contains("cluster_"));
}

#[test]
fn output_file_and_all_analyses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.txt");
    let out = bin()
        .args([&fixture("loop"), "--analysis", "all", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    for a in ["lpta", "spta", "conventional", "andersen"] {
        assert!(text.contains(&format!("analysis {a}")), "{a}");
    }
}

#[test]
fn generation_is_seeded_and_deterministic() {
    let a = bin().args(["--generate", "7"]).output().unwrap();
    let b = bin().args(["--generate", "7"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    // seed from the environment when none is given
    let c = bin().arg("--generate").env("LAZY_PTA_SEED", "7").output().unwrap();
    assert_eq!(stdout(&a), stdout(&c));
    let d = bin().args(["--generate", "8"]).output().unwrap();
    assert_ne!(stdout(&a), stdout(&d));
}

#[test]
fn oracle_flag_reports_coverage() {
    let out = bin().args([&fixture("recursive"), "--oracle"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("misses=0"), "{err}");
}
