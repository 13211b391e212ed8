use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eddycorner-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eddycorner"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn shadows_examples() {
    let out = scratch("shadows");
    let o = run(
        &out,
        &[
            "shadows",
            "--k",
            "0",
            "--kind",
            "primal",
            "--J",
            "1",
            "--omega",
            "0.7853981634",
            "--verify",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("scaled deviation"));
    let o = run(
        &out,
        &[
            "shadows", "--k", "2", "--kind", "dual", "--J", "1", "--verify",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(
        &out,
        &["shadows", "--k", "0", "--kind", "primal", "--J", "0"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("S-            1 : +1.000000000000e0 1") && !text.contains("j = 1"),
        "{text}"
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("shadows_primal_k0.json")).unwrap())
            .unwrap();
    assert_eq!(json["result"]["J"], 0);
    assert_eq!(json["config"]["command"], "shadows");
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn usage_errors_exit_with_one() {
    let out = scratch("usage");
    for args in [
        vec!["solve", "--zeta", "3"],
        vec!["eval", "--k", "0", "--p", "1"],
        vec!["extract", "--r-domain", "50"],
        vec!["shadows", "--omega", "7"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&out, &args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn zero_frequency_extraction_is_flagged_exact() {
    let out = scratch("exact");
    let o = run(
        &out,
        &[
            "extract",
            "--zeta",
            "0/m",
            "--m",
            "1",
            "--k-max",
            "3",
            "--lambda",
            "0,0,1",
            "--lambda",
            "3,0,0.5,-1",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches(", exact").count(), 4, "{text}");
    let csv = std::fs::read_to_string(out.join("extract_quasidual_p0_m1.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# eddycorner "));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "k,p,R,err_re,err_im,err_abs,model_value,corrected_flag"
    );
    assert_eq!(lines.count(), 4 * 20);
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn stored_configuration_reproduces_the_numbers() {
    let (a, b) = (scratch("first"), scratch("second"));
    assert_eq!(
        run(&a, &["extract", "--m", "0", "--count", "8"])
            .status
            .code(),
        Some(0)
    );
    let first = a.join("extract_quasidual_p0_m0.csv");
    let o = run(&b, &["--config", first.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let body = |p: &Path| {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(2)
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&first), body(&b.join("extract_quasidual_p0_m0.csv")));
    std::fs::remove_dir_all(a).unwrap();
    std::fs::remove_dir_all(b).unwrap();
}

#[test]
fn solver_outputs_and_reconstruction() {
    let out = scratch("solver");
    let grid = ["--n-r", "128", "--n-theta", "128"];
    let o = run(&out, &[&["solve"][..], &grid].concat());
    assert_eq!(o.status.code(), Some(0));
    let field = std::fs::read_to_string(out.join("field.csv")).unwrap();
    assert_eq!(field.lines().nth(2), Some("r,theta,re,im"));
    let o = run(&out, &[&["reconstruct"][..], &grid].concat());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("reconstruct.json")).unwrap())
            .unwrap();
    // Near the corner every added order helps until the discretization error is reached.
    let ring = json["result"]["rings"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["r"].as_f64().unwrap() > 3e-4)
        .unwrap();
    let e: Vec<f64> = ring["relative"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(e[2] < e[1] && e[1] < e[0], "{e:?}");
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn verify_all_reports_failing_criteria_with_exit_two() {
    let out = scratch("verify");
    let o = run(&out, &["verify-all"]);
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("criterion ")).count(),
        7,
        "{text}"
    );
    let failing = text.contains(": FAIL");
    assert_eq!(o.status.code(), Some(if failing { 2 } else { 0 }));
    std::fs::remove_dir_all(out).unwrap();
}
