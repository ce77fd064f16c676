use std::path::PathBuf;
use std::process::{Command, Output};

use sp4_cli::{RunConfig, SuiteReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sp4cert"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sp4cert-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sp4cert")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn init_template_parses() {
    let o = run(&["init"]);
    assert_eq!(o.status.code(), Some(0));
    let cfg = RunConfig::from_toml(&stdout(&o)).unwrap();
    assert_eq!(cfg, RunConfig::template());
    assert!(cfg.seed.is_some());
}

#[test]
fn unknown_config_key_exits_2() {
    let path = tmp("bad.toml");
    std::fs::write(&path, "imax = 3\nbogus = true\n").unwrap();
    let o = run(&["verify-gauss", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn sampling_without_seed_is_a_config_error() {
    let o = run(&["verify-cosets", "--imax", "6", "--jmax", "4", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_2() {
    let o = run(&["verify-lp", "--seed", "1", "--out", "/nonexistent-dir/x/report.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_gauss_run_passes() {
    let o = run(&["verify-gauss", "--p", "3,5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = SuiteReport::from_json(&stdout(&o)).unwrap();
    assert!(r.pass);
    assert_eq!(r.records.len(), 10);
    for rec in &r.records {
        assert!(rec.measured <= rec.bound.unwrap() + 1e-9);
    }
}

#[test]
fn gauss_csv_has_expected_columns() {
    let o = run(&["verify-gauss", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    for col in ["p", "i", "j", "max_abs", "bound", "margin"] {
        assert!(header.split(',').any(|c| c == col), "missing {col} in {header}");
    }
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn negative_control_exits_1_with_counterexample() {
    let o = run(&["verify-cosets", "--negative-control", "--imax", "3", "--jmax", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let r = SuiteReport::from_json(&stdout(&o)).unwrap();
    assert!(!r.pass);
    let bad = r.records.iter().find(|x| !x.pass).unwrap();
    let v = &bad.detail["violations"][0];
    assert_eq!(v["reason"], "wrong double coset");
    assert!(v["matrix"].is_array());
}

#[test]
fn clean_cosets_pass() {
    let o = run(&["verify-cosets", "--imax", "3", "--jmax", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = SuiteReport::from_json(&stdout(&o)).unwrap();
    assert!(r.records.iter().all(|x| x.measured == 0.0));
    assert!(!r.skipped.is_empty());
}

fn strip_timing(mut r: SuiteReport) -> SuiteReport {
    r.timing = Default::default();
    r
}

#[test]
fn seeded_runs_are_deterministic() {
    let args = ["verify-lp", "--seed", "7"];
    let a = SuiteReport::from_json(&stdout(&run(&args))).unwrap();
    let b = SuiteReport::from_json(&stdout(&run(&args))).unwrap();
    assert_eq!(strip_timing(a), strip_timing(b));
}

#[test]
fn report_file_round_trips() {
    let path = tmp("report.json");
    let o = run(&["verify-h2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let r = SuiteReport::from_json(&text).unwrap();
    assert_eq!(SuiteReport::from_json(&r.render(sp4_cli::Format::Json).unwrap()).unwrap(), r);
}

#[test]
fn decay_table_is_written() {
    let cfg = tmp("decay.toml");
    std::fs::write(&cfg, "decay_imax = 12\ndecay_exponents = [\"5\"]\ndecay_settings = [\"lattice-lp\"]\n").unwrap();
    let table = tmp("table.csv");
    let o = run(&["decay-profile", "--config", cfg.to_str().unwrap(), "--table", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("setting,q,p,i,j,phi,source"));
    let r = SuiteReport::from_json(&stdout(&o)).unwrap();
    let adm = r.records.iter().find(|x| x.instance.contains("admissibility")).unwrap();
    assert_eq!(adm.detail["range"], "(4, inf]");
    assert_eq!(adm.detail["minimal_n"][0]["n"], 3);
}
