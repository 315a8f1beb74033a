use std::path::PathBuf;
use std::process::{Command, Output};

use upblab::cli::statefile::StateFile;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn upblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upblab"))
        .args(args)
        .env_remove("UPBLAB_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn build_then_verify_two_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("basis.json");
    let f = file.to_str().unwrap();
    let b = upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "0.8,0.6", "--out", f]);
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    let parsed = StateFile::parse(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(parsed.to_product_basis().unwrap().len(), 3);
    let v = upblab(&["nupb", "verify", f]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
}

#[test]
fn build_to_stdout_matches_fixture() {
    let o = upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "0.8,0.6"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("nupb_2x2.json")).unwrap());
}

#[test]
fn verify_against_psi() {
    let o = upblab(&[
        "nupb",
        "verify",
        fixture("tiles_upb.json").to_str().unwrap(),
        "--json",
    ]);
    // Tiles with seesaw evidence only
    assert_eq!(code(&o), 2);
    let psi = fixture("bell_psi.json");
    let dir = tempfile::tempdir().unwrap();
    let basis = dir.path().join("b.json");
    let b = upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "1,1"]);
    assert_eq!(code(&b), 4, "unnormalized coefficients are rejected");
    let h = "0.7071067811865476,0.7071067811865476";
    let b = upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", h, "--out", basis.to_str().unwrap()]);
    assert_eq!(code(&b), 0);
    let v = upblab(&["nupb", "verify", basis.to_str().unwrap(), "--psi", psi.to_str().unwrap()]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
    // basis for the Bell state does not span the complement of another state
    let other = upblab(&[
        "nupb",
        "verify",
        fixture("nupb_2x2.json").to_str().unwrap(),
        "--psi",
        psi.to_str().unwrap(),
    ]);
    assert_eq!(code(&other), 4);
}

#[test]
fn product_and_unnormalized_inputs_exit_4() {
    assert_eq!(code(&upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "1.0"])), 4);
    assert_eq!(code(&upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "0.8,0.5"])), 4);
    assert_eq!(code(&upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "-0.8,0.6"])), 4);
    // within the rescaling window
    assert_eq!(code(&upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "0.8000001,0.6"])), 0);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&upblab(&["frobnicate"])), 1);
    assert_eq!(code(&upblab(&["nupb", "build", "--dims", "2", "--schmidt", "1"])), 1);
    assert_eq!(code(&upblab(&["nupb", "build", "--dims", "2", "2", "--schmidt", "0.6,0.6,0.53"])), 1);
    assert_eq!(code(&upblab(&["nupb", "verify", "/nonexistent/file.json"])), 1);
    let o = upblab(&["check", "ppt", fixture("chi.json").to_str().unwrap(), "--cut", "0|0"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&upblab(&["--help"])), 0);
}

#[test]
fn malformed_json_reports_line_and_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"kind\": \"pure\",\n \"dims\": [2, 2],\n \"data\": [[\"1\", \"0\"], [\"0\", \"0\"], [\"0\"], [\"0\", \"0\"]]}").unwrap();
    let o = upblab(&["check", "ppt", p.to_str().unwrap(), "--cut", "0"]);
    assert_eq!(code(&o), 1);
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("data[2]"), "{e}");

    std::fs::write(&p, "{\"kind\": \"pure\", \"dims\": [2, 2], \"data\": [").unwrap();
    let o = upblab(&["check", "ppt", p.to_str().unwrap(), "--cut", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn invalid_state_contents_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("unnormalized.json");
    std::fs::write(&p, r#"{"kind":"pure","dims":[2,2],"data":[["1","0"],["1","0"],["0","0"],["0","0"]],"meta":{}}"#).unwrap();
    let o = upblab(&["check", "ppt", p.to_str().unwrap(), "--cut", "0"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn ppt_checks() {
    let pass = upblab(&["check", "ppt", fixture("tiles_bound_entangled.json").to_str().unwrap(), "--cut", "0"]);
    assert_eq!(code(&pass), 0, "{}", stdout(&pass));
    let chi = upblab(&["check", "ppt", fixture("chi.json").to_str().unwrap(), "--cut", "0|1"]);
    assert_eq!(code(&chi), 4);
    for cut in ["0|1,2", "1|0,2", "2"] {
        let ghz = upblab(&["check", "ppt", fixture("ghz.json").to_str().unwrap(), "--cut", cut]);
        assert_eq!(code(&ghz), 4, "GHZ across {cut}");
    }
    let sub = upblab(&["check", "ppt", fixture("tiles_complement.json").to_str().unwrap(), "--cut", "0"]);
    assert_eq!(code(&sub), 0);
}

#[test]
fn many_copy_certification() {
    let psi = fixture("bell_psi.json");
    let rho = fixture("bell_rho.json");
    let (p, r) = (psi.to_str().unwrap(), rho.to_str().unwrap());
    let one = upblab(&["certify", "many-copy", "--psi", p, "--rho", r, "--copies", "1", "--json"]);
    assert_eq!(code(&one), 0, "{}", stdout(&one));
    let report: serde_json::Value = serde_json::from_str(&stdout(&one)).unwrap();
    assert_eq!(report["details"]["verdict"], "INDISTINGUISHABLE_MANY_COPY");
    assert_eq!(report["inputs"].as_array().unwrap().len(), 2);
    // the two-copy spot check is seesaw evidence
    let two = upblab(&["certify", "many-copy", "--psi", p, "--rho", r, "--copies", "2", "--json"]);
    assert_eq!(code(&two), 2);
    let report: serde_json::Value = serde_json::from_str(&stdout(&two)).unwrap();
    assert_eq!(report["details"]["verdict"], "INDISTINGUISHABLE_MANY_COPY");
    assert_eq!(report["certificates"].as_array().unwrap().len(), 3);
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_upblab"));
        c.args(args).env_remove("UPBLAB_SEED");
        if let Some(s) = env {
            c.env("UPBLAB_SEED", s);
        }
        c.output().unwrap()
    };
    let args = ["demo", "npt-2x3", "--json", "--restarts", "10"];
    let from_env = run(Some("5"), &args);
    let report: serde_json::Value = serde_json::from_str(&stdout(&from_env)).unwrap();
    assert_eq!(report["parameters"]["seed"], "5");
    let flag_wins = run(Some("5"), &[&args[..], &["--seed", "9"]].concat());
    let report: serde_json::Value = serde_json::from_str(&stdout(&flag_wins)).unwrap();
    assert_eq!(report["parameters"]["seed"], "9");
    assert_eq!(code(&run(Some("abc"), &args)), 1);
}

#[test]
fn demo_exit_codes_and_reports() {
    let cupb = upblab(&["demo", "cupb", "--json"]);
    assert_eq!(code(&cupb), 0);
    let r: serde_json::Value = serde_json::from_str(&stdout(&cupb)).unwrap();
    assert_eq!(r["details"]["cardinality"], 20);
    assert_eq!(r["details"]["complement_dimension"], 5);
    assert_eq!(r["details"]["rho2_vs_rho1"]["verdict"], "FEASIBLE");
    assert_eq!(r["details"]["rho3_vs_rho1"]["infeasibility"], "PROVEN");
    assert_eq!(r["exit_code"], 0);
    let three = upblab(&["demo", "three-qubit"]);
    assert_eq!(code(&three), 0);
    assert!(stdout(&three).contains("PAPER-CITED"));
    assert_eq!(code(&upblab(&["demo", "npt-2x3"])), 2);
}

#[test]
fn text_reports_show_both_label_conventions() {
    let o = upblab(&["demo", "npt-2x3", "--restarts", "5"]);
    let text = stdout(&o);
    assert!(text.contains("state 1 [0]"), "{text}");
    assert!(text.contains("|2>[1]"), "{text}");
}
