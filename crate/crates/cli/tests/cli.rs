use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn ternrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ternrep")).args(args).env_remove("TERNREP_MAX_NODES").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Every integer literal in `s`, sorted.
fn integers(s: &str) -> Vec<i64> {
    let mut out: Vec<i64> =
        s.split(|c: char| !(c.is_ascii_digit() || c == '-')).filter_map(|tok| tok.parse().ok()).collect();
    out.sort_unstable();
    out
}

const GOLDEN: [(&str, &[&str]); 6] = [
    ("enum_squares", &["enum", "--form", "1,1,1,0,0,0", "--max", "20"]),
    ("theta_squares", &["theta", "--form", "1,1,1,0,0,0", "--max", "12"]),
    ("prec_s4_12_2", &["prec", "--f", "S4f", "--g", "S4g", "--d", "12", "--a", "2"]),
    ("transforms_s4_4", &["transforms", "--f", "S4f", "--g", "S4g", "--d", "4"]),
    ("table_s4", &["table", "--set", "S4", "--max", "10000"]),
    ("primitive_s8f", &["enum", "--form", "S8f", "--max", "200", "--primitive"]),
];

#[test]
fn golden_outputs_and_numeric_parity() {
    let bless = std::env::var_os("TERNREP_BLESS").is_some();
    for (name, args) in GOLDEN {
        let text = stdout(&ternrep(args));
        let mut json_args = vec!["--format", "json"];
        json_args.extend_from_slice(args);
        let json = stdout(&ternrep(&json_args));
        let (tp, jp) = (golden_dir().join(format!("{name}.txt")), golden_dir().join(format!("{name}.json")));
        if bless {
            fs::create_dir_all(golden_dir()).unwrap();
            fs::write(&tp, &text).unwrap();
            fs::write(&jp, &json).unwrap();
        }
        assert_eq!(text, fs::read_to_string(&tp).unwrap(), "{name} text");
        assert_eq!(json, fs::read_to_string(&jp).unwrap(), "{name} json");
        serde_json::from_str::<serde_json::Value>(&json).unwrap();
        assert_eq!(integers(&text), integers(&json), "{name}: text and json numbers differ");
    }
}

#[test]
fn small_sums_of_three_squares() {
    let out = ternrep(&["enum", "--form", "1,1,1,0,0,0", "--max", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0,1,2,3\n");
}

#[test]
fn precedence_on_class_4_0() {
    let out = ternrep(&["prec", "--f", "S4f", "--g", "S4g", "--d", "4", "--a", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "PRECEDES: true (16 cosets, 0 bad)\n");
}

#[test]
fn precedence_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out =
        ternrep(&["prec", "--f", "S4f", "--g", "S4g", "--d", "12", "--a", "2", "--report", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report["total"], 864);
    assert_eq!(report["bad"].as_array().unwrap().len(), 32);
}

#[test]
fn table_s6_verifies() {
    let out = ternrep(&["--jobs", "1", "table", "--set", "S6", "--max", "1000000"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("S6: 2 forms agree up to 1000000"));
}

#[test]
fn prove_then_check_then_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("s4.json");
    let out = ternrep(&["prove", "--f", "S4f", "--g", "S4g", "--max", "100000", "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("g in f: classes 4:0 12:2* 12:6 12:10"));
    let text = fs::read_to_string(&cert).unwrap();
    assert!(text.contains("[[1,0,0],[0,0,-2],[0,-1,1]]"));
    assert!(text.contains("[[12,6,2],[0,0,12],[0,-12,-8]]"));

    let out = ternrep(&["cert", "check", cert.to_str().unwrap()]);
    assert_eq!((code(&out), stdout(&out).as_str()), (0, "ACCEPT\n"));

    fs::write(&cert, text.replace("[0,-12,-8]]", "[0,-12,-7]]")).unwrap();
    let out = ternrep(&["cert", "check", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).is_empty(), "text failures write nothing to stdout");
    assert!(String::from_utf8_lossy(&out.stderr).contains("escape.matrix_identity"));

    let out = ternrep(&["--format", "json", "cert", "check", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["detail"]["clause"], "g_in_f.class(12:2).escape.matrix_identity");
}

#[test]
fn explicit_classes_for_s8() {
    let out = ternrep(&[
        "--format",
        "json",
        "prove",
        "--f",
        "S8f",
        "--g",
        "S8g",
        "--classes",
        "4:0,12:2,12:6,36:10,36:22,36:34",
        "--max",
        "20000",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["g_in_f"]["classes"].as_array().unwrap().len(), 6);
    assert_eq!(v["f_in_g"]["classes"].as_array().unwrap().len(), 6);
    assert!(v["certificate"]["version"].is_string());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&ternrep(&["--help"])), 0);
    assert_eq!(code(&ternrep(&["--version"])), 0);
    assert_eq!(code(&ternrep(&["bogus"])), 64);
    assert_eq!(code(&ternrep(&["enum", "--form", "1,1,-1,0,0,0", "--max", "3"])), 64);
    assert_eq!(code(&ternrep(&["enum", "--form", "1,2,3", "--max", "3"])), 64);
    assert_eq!(code(&ternrep(&["table", "--set", "S16", "--max", "3"])), 64);
    assert_eq!(code(&ternrep(&["prec", "--f", "S4f", "--g", "S4g", "--d", "4", "--a", "7"])), 64);
    assert_eq!(code(&ternrep(&["prove", "--f", "1,1,1,0,0,0", "--g", "1,1,2,0,0,0", "--max", "100"])), 1);
    let out = ternrep(&["--format", "json", "prove", "--f", "S1a", "--g", "S1b", "--max", "1000"]);
    assert_eq!(code(&out), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["error"], "unprovable");
    assert_eq!(v["detail"]["modulus"], 144);
    assert!(!v["detail"]["uncovered"].as_array().unwrap().is_empty());
}

#[test]
fn node_budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ternrep"))
        .args(["prove", "--f", "S4f", "--g", "S4g", "--max", "1000"])
        .env("TERNREP_MAX_NODES", "5000")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "the recorded escape matrix needs no search");
    let out = Command::new(env!("CARGO_BIN_EXE_ternrep"))
        .args(["enum", "--form", "S4g", "--max", "10"])
        .env("TERNREP_MAX_NODES", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&out), 64);
}

#[test]
fn identical_forms_prove_trivially() {
    let out = ternrep(&["prove", "--f", "S13a", "--g", "S13a", "--max", "1000"]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    assert!(s.contains("f in g: subform [[1,0,0],[0,1,0],[0,0,1]]"));
    assert!(s.contains("g in f: subform [[1,0,0],[0,1,0],[0,0,1]]"));
}
