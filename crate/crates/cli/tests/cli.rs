use std::path::Path;
use std::process::{Command, Output};

use ldpc_workbench::harness::{read_results, CSV_HEADER};
use ldpc_workbench::{MetricCurves, MetricKind};

fn ldpcwb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldpcwb"))
        .current_dir(dir)
        .env_remove("LDPCWB_CONFIG")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ab_curves(dir: &Path) {
    let c = MetricCurves::from_points(
        MetricKind::Energy,
        [("A", vec![(1.0, 0.10), (2.5, 0.08)]), ("B", vec![(1.0, 0.20), (2.5, 0.05)])],
    )
    .unwrap();
    std::fs::write(dir.join("curves.json"), c.to_json()).unwrap();
}

#[test]
fn help_states_units() {
    let dir = tempfile::tempdir().unwrap();
    let o = ldpcwb(dir.path(), &["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for unit in ["dB", "joules", "Hz", "bit/s"] {
        assert!(text.contains(unit), "{unit}");
    }
    let o = ldpcwb(dir.path(), &["policy", "joint", "--help"]);
    assert!(stdout(&o).contains("joules"));
}

#[test]
fn decode_synthesized_frame() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["decode", "--code", "builtin:tanner155", "--algo", "sp", "--snr-db", "3", "--seed", "5", "--ops"];
    let o = ldpcwb(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("converged=true iterations="), "{first}");
    assert!(first.ends_with("bit_errors=0"));
    assert_eq!(out.lines().filter(|l| l.starts_with("ops phase=")).count(), 4);
    assert!(stderr(&o).starts_with("config: {"));
    // same seed, same frame
    assert_eq!(stdout(&ldpcwb(dir.path(), &args)), out);
}

#[test]
fn decode_llr_file_reports_syndrome_weight() {
    let dir = tempfile::tempdir().unwrap();
    let llr = vec!["4.0"; 155].join(" ");
    std::fs::write(dir.path().join("clean.llr"), llr).unwrap();
    let o = ldpcwb(dir.path(), &["decode", "--code", "builtin:tanner155", "--algo", "irrwbf", "--llr", "clean.llr"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("converged=true iterations=0 weight=0"));
}

#[test]
fn sweep_writes_results_and_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = ldpcwb(
        dir.path(),
        &[
            "sweep", "--code", "builtin:tanner155", "--algos", "ms,mms@0.8", "--snr", "2:1:3", "--trials", "50",
            "--seed", "9", "--out", "r.json",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 5);
    let r = read_results(&dir.path().join("r.json")).unwrap();
    assert_eq!(r.labels(), vec!["ms".to_string(), "mms@0.8".to_string()]);
    assert_eq!(r.metadata.base_seed, 9);
    assert!(r.cells.iter().all(|c| c.stats.frames == 50));
}

#[test]
fn policy_joint_and_select() {
    let dir = tempfile::tempdir().unwrap();
    ab_curves(dir.path());
    let o = ldpcwb(dir.path(), &["policy", "joint", "--curves", "curves.json", "--budget-j", "0.05"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("snr_db=2.5 algorithm=B"), "{}", stdout(&o));

    let o = ldpcwb(dir.path(), &["policy", "select", "--curves", "curves.json", "--snr-db", "1.7"]);
    assert_eq!(stdout(&o).trim(), "snr_db=1.7 algorithm=A");

    let o = ldpcwb(dir.path(), &["policy", "build", "--curves", "curves.json"]);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(",A") && rows[1].ends_with(",B"));
}

#[test]
fn errors_are_single_lines_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    ab_curves(dir.path());
    let cases: [(&[&str], &str, i32); 4] = [
        (&["policy", "joint", "--curves", "curves.json", "--budget-j", "0.01"], "error[infeasible]", 3),
        (&["decode", "--code", "builtin:tanner155", "--algo", "foo", "--snr-db", "2"], "error[usage]", 2),
        (&["decode", "--frobnicate"], "error[usage]", 2),
        (&["policy", "select", "--curves", "curves.json", "--snr-db", "9"], "error[", 1),
    ];
    for (args, prefix, code) in cases {
        let o = ldpcwb(dir.path(), args);
        let err = stderr(&o);
        assert_eq!(o.status.code(), Some(code), "{args:?}: {err}");
        // at most a config echo precedes the one error line
        let errors: Vec<&str> = err.lines().filter(|l| l.starts_with("error")).collect();
        assert_eq!(errors.len(), 1, "{err}");
        assert!(errors[0].starts_with(prefix), "{err}");
        assert_eq!(err.lines().last(), Some(errors[0]));
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ok.toml"), "code = \"builtin:tanner155\"\nalgo = \"sp\"\nseed = 5\n").unwrap();
    let via_env = Command::new(env!("CARGO_BIN_EXE_ldpcwb"))
        .current_dir(dir.path())
        .env("LDPCWB_CONFIG", "ok.toml")
        .args(["decode", "--snr-db", "3"])
        .output()
        .unwrap();
    assert!(via_env.status.success(), "{}", stderr(&via_env));
    let via_flag = ldpcwb(dir.path(), &["--config", "ok.toml", "decode", "--snr-db", "3"]);
    assert_eq!(stdout(&via_env), stdout(&via_flag));
    assert!(stderr(&via_flag).contains("\"seed\":5"));

    std::fs::write(dir.path().join("bad.toml"), "sed = 1\n").unwrap();
    let o = ldpcwb(dir.path(), &["--config", "bad.toml", "decode"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[config]"));
}
