use std::path::PathBuf;
use std::process::{Command, Output};

fn lckv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lckv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn spec(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "specs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn vaisman_rh3_is_always_with_lee_vector_minus_e4() {
    let o = lckv(&["vaisman", "--entry", "rh3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("expected: always"), "{out}");
    assert!(out.contains("A = -e4"), "{out}");
}

#[test]
fn morse_novikov_rh3_vanishes() {
    let o = lckv(&["mn", "--algebra", "0,0,-12,0", "--theta", "-e4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("betti: 0, 0, 0, 0, 0"));
}

#[test]
fn json_report_is_versioned() {
    let o = lckv(&["--json", "-", "mn", "--algebra", "0,0,-12,0", "--theta", "0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "lckv-report/1");
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["details"]["betti"], serde_json::json!([1, 3, 4, 3, 1]));
}

#[test]
fn solve_reports_isotropic_vectors() {
    let o = lckv(&["--json", "-", "solve", "--algebra", "14,24+34,34,0", "--theta", "-2*e4", "--J", "J"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["details"]["lck_dim"], 3);
    assert_eq!(v["details"]["isotropic_basis_vectors"], serde_json::json!(["e1", "e2"]));
}

#[test]
fn lee_form_of_kodaira() {
    let o = lckv(&["lee", "--algebra", "0,0,-12,0", "--omega", "e12 + e34"]);
    assert!(stdout(&o).contains("theta: -e4"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lckv(&["verify-table", "--entry", "nope"]).status.code(), Some(2));
    assert_eq!(lckv(&["mn", "--algebra", "0,0", "--theta", "e7"]).status.code(), Some(2));
    assert_eq!(lckv(&["ot", "--n", "2", "--c", "1"]).status.code(), Some(2));
    assert_eq!(lckv(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failed_checks_exit_1() {
    // not a lcK form: the extension is rejected
    let dir = std::env::temp_dir().join(format!("lckv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        "fiber = 2\n[base]\nsalamon = \"0,0,-12,0\"\n\
         J = [\"0\",\"-1\",\"0\",\"0\",\"1\",\"0\",\"0\",\"0\",\"0\",\"0\",\"0\",\"-1\",\"0\",\"0\",\"1\",\"0\"]\n\
         theta = \"e4\"\nomega = \"e12 + e34\"\n",
    )
    .unwrap();
    let o = lckv(&["extend", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sample_specs_pass() {
    for f in ["ot2.toml", "dprime.toml", "rh3.toml"] {
        let o = lckv(&["extend", "--spec", &spec(f)]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stdout(&o));
    }
    let o = lckv(&["cokahler", "--spec", &spec("cokahler.toml")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = lckv(&["--json", "-", "extend", "--spec", &spec("rh3.toml")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["details"]["unimodular"], false);
}

#[test]
fn ot_command() {
    let o = lckv(&["ot", "--n", "3", "--c", "1,-2,1/3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS ot/aff-extension-isomorphic"));
}

#[test]
fn verify_table_single_entry() {
    let o = lckv(&["verify-table", "--entry", "h4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("h4/theta4"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_lckv"))
            .env("LCKV_THREADS", threads)
            .args(["--json", "-", "verify-table"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
