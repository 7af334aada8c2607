use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lpcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpcurv"))
        .args(args)
        .env_remove("LPCURV_RESOLUTION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn eval_json(body: &Path, extra: &[&str]) -> Value {
    let mut args = vec!["eval", path_str(body)];
    args.extend_from_slice(extra);
    let o = lpcurv(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn gen_ball_has_one_coefficient_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ball.json");
    let o = lpcurv(&["gen", "--family", "ball", "--r", "1", "--n", "2", "-o", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    let body: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(body["coefficients"].as_array().unwrap().len(), 1);
    assert_eq!(body["representation"], "fourier");
    assert_eq!(body["format_version"], 1);

    let v = eval_json(&file, &["--q", "volume"]);
    assert!((v["volume"].as_f64().unwrap() - PI).abs() < 1e-10);
    assert_eq!(v["resolution"], 512);
    let v = eval_json(&file, &["--q", "Rp", "--p", "2"]);
    assert!((v["Rp(p=2)"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn harmonic_file_round_trips_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h.json");
    let o = lpcurv(&["gen", "--family", "harmonic", "--eps", "0.1", "--degree", "3", "--n", "2", "-o", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    let v = eval_json(&file, &["--q", "delta2,Ep,H", "--p", "-1,2"]);
    assert!((v["delta2"].as_f64().unwrap() - 0.1 / 2f64.sqrt()).abs() < 1e-10);
    assert!(v["Ep(p=-1)"].as_f64().unwrap() > 0.0);
    assert!(v["H_min"].as_f64().unwrap() < v["H_max"].as_f64().unwrap());
}

#[test]
fn ellipse_volume() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("e.json");
    let o = lpcurv(&["gen", "--family", "ellipsoid", "--axes", "1.5,1", "-o", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    let v = eval_json(&file, &["--q", "volume"]);
    assert!((v["volume"].as_f64().unwrap() - 1.5 * PI).abs() < 1e-7);
}

#[test]
fn invalid_bodies_and_arguments_exit_with_two() {
    let o = lpcurv(&["gen", "--family", "harmonic", "--eps", "0.2", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not strictly convex"));
    assert_eq!(lpcurv(&["gen", "--family", "harmonic", "--degree", "3"]).status.code(), Some(2));
    assert_eq!(lpcurv(&["gen", "--family", "nonsense"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ball.json");
    lpcurv(&["gen", "--family", "ball", "-o", path_str(&file)]);
    assert_eq!(lpcurv(&["eval", path_str(&file), "--q", "bogus"]).status.code(), Some(2));
    assert_eq!(lpcurv(&["eval", path_str(&file), "--q", "Rp"]).status.code(), Some(2));
    assert_eq!(lpcurv(&["eval", path_str(&file), "--q", "Ep", "--p", "-3"]).status.code(), Some(2));
    assert_eq!(lpcurv(&["eval", path_str(&file), "--q", "volume", "--resolution", "4096"]).status.code(), Some(2));
}

#[test]
fn io_failures_exit_with_three() {
    assert_eq!(lpcurv(&["eval", "/nonexistent/body.json", "--q", "volume"]).status.code(), Some(3));
    assert_eq!(lpcurv(&["verify", "--suite", "empty", "--csv", "/nonexistent/dir/r.csv"]).status.code(), Some(3));
}

#[test]
fn resolution_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ball.json");
    lpcurv(&["gen", "--family", "ball", "-o", path_str(&file)]);
    let mut body: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    body["metadata"].as_object_mut().unwrap().remove("resolution");
    std::fs::write(&file, body.to_string()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lpcurv"))
        .args(["eval", path_str(&file), "--q", "volume"])
        .env("LPCURV_RESOLUTION", "256")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["resolution"], 256);
}

#[test]
fn empty_suite_gives_header_only() {
    let o = lpcurv(&["verify", "--suite", "empty"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "check,body,n,p,lhs,rhs,margin,pass,aux\n");
}

#[test]
fn suite_files_record_generator_errors_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    std::fs::write(
        &suite,
        r#"[{"family":"harmonic","eps":0.5,"degree":2,"order":0,"dimension":2},
            {"family":"ball","radius":1.0,"dimension":2}]"#,
    )
    .unwrap();
    let json = dir.path().join("r.json");
    let o = lpcurv(&["verify", "--suite", path_str(&suite), "--sln-maps", "1", "--json", path_str(&json)]);
    assert_eq!(o.status.code(), Some(1));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "check,body,n,p,lhs,rhs,margin,pass,aux");
    assert!(lines.next().unwrap().starts_with("generator,"));
    assert!(lines.all(|l| l.contains(",true,")));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["failures"], 1);
    assert_eq!(report["all_pass"], false);
}

#[test]
fn tiny_tolerance_override_fails() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    std::fs::write(&suite, r#"[{"family":"harmonic","eps":0.02,"degree":3,"order":0,"dimension":2}]"#).unwrap();
    let ok = lpcurv(&["verify", "--suite", path_str(&suite), "--sln-maps", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let strict = lpcurv(&["verify", "--suite", path_str(&suite), "--sln-maps", "1", "--tolerance", "1e-15"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn verify_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    std::fs::write(
        &suite,
        r#"[{"family":"random","seed":2,"decay":3.0,"dimension":2},
            {"family":"cap_cut","cap_height":0.1,"dimension":2}]"#,
    )
    .unwrap();
    let run = |threads: &str| {
        stdout(&lpcurv(&["verify", "--suite", path_str(&suite), "--sln-maps", "2", "--threads", threads]))
    };
    let a = run("1");
    assert_eq!(a, run("3"));
    assert!(a.lines().any(|l| l.starts_with("trend:")));
}

#[test]
fn default_planar_suite_passes() {
    let o = lpcurv(&["verify", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweeps() {
    let o = lpcurv(&[
        "sweep", "--family", "cap_cut", "--param", "cap_height", "--values", "0.05,0.1,0.2", "--q", "Ep,delta2_r,diameter",
        "--p", "-1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("cap_height,Ep(p=-1),"));
    assert!(lines[1..].iter().all(|l| l.ends_with(',')));

    let o = lpcurv(&["sweep", "--family", "harmonic", "--degree", "3", "--param", "eps", "--values", "0.02,0.04,0.08", "--q", "delta2"]);
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for rec in rows.records() {
        let rec = rec.unwrap();
        let eps: f64 = rec[0].parse().unwrap();
        let d: f64 = rec[1].parse().unwrap();
        assert!((d - eps / 2f64.sqrt()).abs() < 1e-10);
    }

    let o = lpcurv(&["sweep", "--family", "cap_cut", "--param", "cap_height", "--q", "diameter"]);
    assert_eq!(stdout(&o), "cap_height,diameter,error\n");

    // generator failures stay in their row
    let o = lpcurv(&["sweep", "--family", "harmonic", "--degree", "3", "--param", "eps", "--values", "0.1,0.2", "--q", "volume"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("0.2,,") && last.contains("not strictly convex"));

    assert_eq!(lpcurv(&["sweep", "--family", "ball", "--param", "nope", "--values", "1", "--q", "volume"]).status.code(), Some(2));
}
