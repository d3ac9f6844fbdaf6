use std::process::{Command, Output};

use serde_json::{json, Value};

use coneray::poly::json::poly_from_str;
use coneray::tensor::json::tensor_from_str;
use coneray::RatPoly;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coneray"))
        .args(args)
        .env_remove("CONERAY_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_out(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = run(&all);
    let v: Value = serde_json::from_str(stdout(&out).trim()).expect("json output");
    (v, code(&out))
}

#[test]
fn det_of_diag_convex_is_the_square_monomial() {
    let (v, c) = json_out(&["det", "@diag-convex"]);
    assert_eq!(c, 0);
    assert_eq!(v["terms"], json!([{"exp": [2, 2, 2], "coeff": "1"}]));
    let p: RatPoly = poly_from_str(&v.to_string()).unwrap();
    assert_eq!(serde_json::to_value(&p).unwrap(), v);
    assert_eq!(stdout(&run(&["det", "@diag-convex"])).trim(), "y1^2 y2^2 y3^2");
}

#[test]
fn choi_lam_is_an_extreme_ray() {
    let (v, c) = json_out(&["classify", "@choi-lam"]);
    assert_eq!(c, 0);
    assert_eq!(v["verdict"], "ExtremeRay");
    assert_eq!(v["det_status"]["kind"], "ExtremalNonSquare");
}

#[test]
fn diag_convex_is_polyconvex() {
    let (v, c) = json_out(&["classify", "@diag-convex"]);
    assert_eq!(c, 0);
    assert_eq!(v["verdict"], "Polyconvex");
    assert_eq!(v["det_status"]["kind"], "PerfectSquare");
    assert!(v["certificate"]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn zero_determinant_routes() {
    let (v, c) = json_out(&["classify", "@null-lagrangian"]);
    assert_eq!(c, 0);
    assert_eq!(v["verdict"], "Polyconvex");
    assert_eq!(v["det_status"]["kind"], "IdenticallyZero");

    let (v, c) = json_out(&["sos", "@single-square"]);
    assert_eq!(c, 0);
    assert_eq!(v["minor_coeffs"].as_array().unwrap().len(), 9);
    assert_eq!(v["squares"].as_array().unwrap().len(), 1);
}

#[test]
fn negative_form_exits_with_cone_violation() {
    let t = r#"{"d":3,"entries":[{"i":1,"j":1,"k":1,"l":1,"value":"-1"}]}"#;
    let out = run(&["classify", t]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not quasiconvex"));

    let (v, c) = json_out(&["check", "quasiconvex", t]);
    assert_eq!(c, 2);
    assert_eq!(v["kind"], "NotQuasiconvex");
    assert_eq!(v["exact_value"], "-1");

    let p = r#"{"nvars":3,"degree":2,"terms":[{"exp":[2,0,0],"coeff":"-1"}]}"#;
    assert_eq!(code(&run(&["extremal", p])), 2);
}

#[test]
fn higher_dimensions_are_refused() {
    let out = run(&["classify", "@remark24"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("d = 4"));
    // the determinant itself is still available
    assert_eq!(code(&run(&["det", "@cl-plus-square44"])), 0);
}

#[test]
fn input_errors() {
    assert_eq!(code(&run(&["det", "@no-such-form"])), 4);
    assert_eq!(code(&run(&["det", "/nonexistent/tensor.json"])), 4);
    assert_eq!(code(&run(&["det", "{\"d\": 3"])), 4);
    let (v, c) = json_out(&["square", "{\"nvars\":1}"]);
    assert_eq!(c, 4);
    assert!(v["error"].is_string());
}

#[test]
fn verify_suites_report_counts() {
    let out = run(&["verify", "lemma41", "--trials", "1000", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next(), Some("1000/1000 passed"));
    let out = run(&["verify", "mixed-det", "--trials", "20"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("20/20 passed"));
    let (v, c) = json_out(&["verify", "psd-dual", "--trials", "100", "--n", "4"]);
    assert_eq!(c, 0);
    assert_eq!(v["passed"], 100);
}

#[test]
fn seed_comes_from_the_environment() {
    let from_env = Command::new(env!("CARGO_BIN_EXE_coneray"))
        .args(["verify", "lemma41", "--trials", "30", "--output", "json"])
        .env("CONERAY_SEED", "11")
        .output()
        .unwrap();
    let from_flag = run(&["verify", "lemma41", "--trials", "30", "--seed", "11", "--output", "json"]);
    assert_eq!(from_env.stdout, from_flag.stdout);
}

#[test]
fn extremal_and_square_commands() {
    let p = r#"{"nvars":3,"degree":6,"terms":[{"exp":[6,0,0],"coeff":"1"},{"exp":[0,6,0],"coeff":"1"}]}"#;
    let (v, c) = json_out(&["extremal", p]);
    assert_eq!(c, 0);
    assert_eq!(v["kind"], "NotExtremal");

    let sq = r#"{"nvars":3,"degree":6,"terms":[{"exp":[2,2,2],"coeff":"1"}]}"#;
    let (v, _) = json_out(&["extremal", sq]);
    assert_eq!(v["kind"], "ExtremalByPerfectSquare");
    let (v, c) = json_out(&["square", sq]);
    assert_eq!(c, 0);
    assert_eq!(v["kind"], "Exact");
    assert_eq!(v["root"]["terms"], json!([{"exp": [1, 1, 1], "coeff": "1"}]));
    let (v, _) = json_out(&["square", p]);
    assert_eq!(v["kind"], "NotSquare");
}

#[test]
fn inspect_and_corpus_list() {
    let out = run(&["inspect", "@single-square"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("f = xi11^2"));
    let (v, _) = json_out(&["inspect", "@diag-convex"]);
    assert_eq!(v["acoustic_tensor"].as_array().unwrap().len(), 3);

    let (v, c) = json_out(&["corpus", "list"]);
    assert_eq!(c, 0);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"choi-lam") && names.contains(&"cl-plus-square44"));
}

#[test]
fn tensor_file_input_round_trips() {
    let dir = std::env::temp_dir().join(format!("coneray-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.json");
    let canon = r#"{"d":3,"entries":[{"i":1,"j":1,"k":1,"l":1,"value":"1"},{"i":2,"j":2,"k":2,"l":2,"value":"1"},{"i":3,"j":3,"k":3,"l":3,"value":"1"}],"strict":false}"#;
    std::fs::write(&path, canon).unwrap();
    let a = json_out(&["det", path.to_str().unwrap()]);
    let b = json_out(&["det", "@diag-convex"]);
    assert_eq!(a, b);
    let t = tensor_from_str(canon).unwrap();
    assert_eq!(coneray::tensor::json::tensor_to_json(&t).to_string(), canon);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn classification_is_reproducible() {
    let a = run(&["classify", "@diag-convex", "--output", "json", "--seed", "3"]);
    let b = run(&["classify", "@diag-convex", "--output", "json", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}
