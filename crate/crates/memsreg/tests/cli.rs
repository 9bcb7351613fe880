use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use memsreg::cli::{parse_config, Command as Sub, Flags, RunConfig};
use memsreg::export::parse_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_memsreg"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("memsreg-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str], out: &Path) -> i32 {
    let st = bin().args(args).arg("--out").arg(out).output().unwrap();
    st.status.code().unwrap_or(-1)
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "json"))
        .collect();
    v.sort();
    v
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cases: &[&[&str]] = &[
        &["phaseplane", "--eps", "0.05", "--n", "200"],
        &["inner", "--order", "2", "--lambda", "10"],
        &["folds", "--eps", "0.05"],
        &["branch", "--eps", "0.05", "--smax", "0.6", "--n", "257"],
        &["composite", "--eps", "0.05", "--lambda", "10"],
        &["evolve", "--eps", "0.05", "--lambda", "2", "--t-end", "0.5", "--n", "129"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let (a, b) = (scratch(&format!("det{k}a")), scratch(&format!("det{k}b")));
        assert_eq!(run(args, &a), 0, "{args:?}");
        assert_eq!(run(args, &b), 0, "{args:?}");
        let (fa, fb) = (csv_files(&a), csv_files(&b));
        assert!(!fa.is_empty());
        assert_eq!(fa.len(), fb.len());
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{} differs between runs", x.display());
        }
    }
}

#[test]
fn csv_has_metadata_header() {
    let d = scratch("meta");
    assert_eq!(run(&["folds", "--eps", "0.02"], &d), 0);
    let t = parse_csv(&fs::read_to_string(d.join("folds.csv")).unwrap()).unwrap();
    let keys: Vec<&str> = t.meta.iter().map(|(k, _)| k.as_str()).collect();
    assert!(keys.contains(&"command") && keys.contains(&"eps") && keys.contains(&"m"));
    assert!(!t.rows.is_empty());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("folds.json")).unwrap()).unwrap();
    let l1 = json["lambda_c1"].as_f64().unwrap();
    assert!((l1 - 0.3503223).abs() < 1e-5, "lambda_c1 = {l1}");
}

#[test]
fn validation_errors_exit_with_2() {
    let d = scratch("val");
    for args in [
        &["folds", "--order", "3"][..],
        &["folds", "--m", "2"],
        &["evolve", "--eps", "-0.1"],
        &["folds", "--eps", "0.01,0.02"],
        &["composite", "--eps", "0"],
        &["folds", "--lambda", "abc"],
        &["nosuchcommand"],
    ] {
        assert_eq!(run(args, &d), 2, "{args:?}");
    }
    let cfg = d.join("bad.cfg");
    fs::write(&cfg, "order = 2\ncolour = blue\n").unwrap();
    assert_eq!(run(&["folds", "--config", cfg.to_str().unwrap()], &d), 2);
}

#[test]
fn help_exits_with_0() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_with_3() {
    // a 17-node grid cannot resolve the upper branch and continuation stalls
    let d = scratch("num");
    assert_eq!(run(&["branch", "--eps", "0.01", "--n", "17", "--smax", "1.9"], &d), 3);
}

#[test]
fn config_file_values_and_flag_override() {
    let f = parse_config("# comment\norder = 4\nlambda = 30  # trailing\neps = 0.02\nemit-plots = true\n").unwrap();
    assert_eq!(f.order, Some(4));
    assert_eq!(f.lambda, Some(30.0));
    assert!(f.emit_plots);
    assert!(parse_config("lambda 3").is_err());

    let d = scratch("cfg");
    let path = d.join("run.cfg");
    fs::write(&path, "order = 4\nlambda = 30\neps = 0.02\n").unwrap();
    let flags = Flags { config: Some(path.clone()), lambda: Some(40.0), ..Flags::default() };
    let cfg = RunConfig::resolve(Sub::Folds, &flags).unwrap();
    assert_eq!(cfg.order.as_int(), 4);
    assert_eq!(cfg.lambda, 40.0);
    assert_eq!(cfg.eps, vec![0.02]);

    let plain = RunConfig::resolve(Sub::Sweep, &Flags::default()).unwrap();
    assert_eq!(plain.eps, vec![0.005, 0.01, 0.02, 0.04]);
    assert_eq!(plain.m, 4);
}

#[test]
fn emit_plots_writes_scripts() {
    let d = scratch("plots");
    assert_eq!(run(&["phaseplane", "--eps", "0.05", "--n", "100", "--emit-plots"], &d), 0);
    let script = fs::read_to_string(d.join("plot_phaseplane.py")).unwrap();
    assert!(script.contains("phaseplane.csv") && script.contains("savefig"));
}
