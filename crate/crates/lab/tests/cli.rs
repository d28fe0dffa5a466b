//! The `gtn-lab` binary: subcommands, files, and error reporting.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lab() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gtn-lab"));
    c.env("GTN_LAB_THREADS", "2");
    c
}

fn run_ok(args: &[&str]) -> Output {
    let out = lab().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> String {
    let out = lab().args(args).output().unwrap();
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    let lines: Vec<&str> = err.lines().filter(|l| !l.starts_with("note:")).collect();
    assert_eq!(lines.len(), 1, "expected one error line, got {err:?}");
    assert!(lines[0].starts_with("error["), "{err}");
    lines[0].to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_swiss(out: &Path) -> Vec<String> {
    [
        "run", "--experiment", "swiss1d", "--seed", "7", "--n-train", "2000", "--n-val", "500", "--n-generate", "300",
        "--max-epochs", "15", "--out-dir", s(out),
    ]
    .map(String::from)
    .to_vec()
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) {
    let mut text = format!("{header}\n");
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn run_writes_every_artifact_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args_a = small_swiss(&a);
    run_ok(&args_a.iter().map(String::as_str).collect::<Vec<_>>());
    for f in ["samples.csv", "pairs.csv", "model.bin", "metrics.json", "manifest.json", "plot.png", "history.json"] {
        assert!(a.join(f).metadata().unwrap().len() > 0, "{f}");
    }
    assert_eq!(lines(&a.join("samples.csv")), 301);
    assert_eq!(lines(&a.join("pairs.csv")), 2001);

    let metrics: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("metrics.json")).unwrap()).unwrap();
    for key in ["ks_theta", "monotonicity_violations", "ood_fraction"] {
        assert!(metrics[key]["value"].is_number(), "{key}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["experiment"], "swiss1d");
    assert!(manifest["timings"]["train"].is_number());
    assert!(manifest["software"].as_str().unwrap().starts_with("gtn-lab"));

    let args_b = small_swiss(&b);
    run_ok(&args_b.iter().map(String::as_str).collect::<Vec<_>>());
    for f in ["samples.csv", "pairs.csv", "metrics.json", "model.bin"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }

    // the manifest's config reproduces the samples
    let c = dir.path().join("c");
    run_ok(&["run", "--config", s(&a.join("manifest.json")), "--out-dir", s(&c)]);
    assert_eq!(std::fs::read(a.join("samples.csv")).unwrap(), std::fs::read(c.join("samples.csv")).unwrap());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for t in ["1", "3"] {
        let out = dir.path().join(t);
        let args = small_swiss(&out);
        let st = lab().env("GTN_LAB_THREADS", t).args(&args).output().unwrap();
        assert!(st.status.success());
        outs.push(std::fs::read(out.join("metrics.json")).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn label_train_sample_eval_plot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = d.join("data.csv");
    write_csv(&data, "x0", (0..1000).map(|i| format!("{}", (i as f64 * 0.37).sin())));
    run_ok(&["label", "--data", s(&data), "--out-dir", s(d)]);
    assert_eq!(lines(&d.join("pairs.csv")), 1001);
    assert!(std::fs::read_to_string(d.join("pairs.csv")).unwrap().starts_with("y0,x0\n"));

    run_ok(&["train", "--data", s(&d.join("pairs.csv")), "--max-epochs", "5", "--batch-size", "50", "--out-dir", s(d)]);
    assert!(d.join("model.bin").exists() && d.join("history.json").exists());

    let model = d.join("model.bin");
    let (s1, s2, s0) = (d.join("s1"), d.join("s2"), d.join("s0"));
    run_ok(&["sample", "--model", s(&model), "--n-generate", "200", "--seed", "4", "--out-dir", s(&s1)]);
    run_ok(&["sample", "--model", s(&model), "--n-generate", "200", "--seed", "4", "--out-dir", s(&s2)]);
    assert_eq!(lines(&s1.join("samples.csv")), 201);
    assert_eq!(std::fs::read(s1.join("samples.csv")).unwrap(), std::fs::read(s2.join("samples.csv")).unwrap());
    run_ok(&["sample", "--model", s(&model), "--n-generate", "0", "--out-dir", s(&s0)]);
    assert_eq!(std::fs::read_to_string(s0.join("samples.csv")).unwrap(), "x0\n");

    // generated == reference
    let samples = s1.join("samples.csv");
    run_ok(&["eval", "--data", s(&samples), "--reference", s(&samples), "--out-dir", s(d)]);
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("metrics.json")).unwrap()).unwrap();
    assert!(m["energy_distance"]["value"].as_f64().unwrap() < 1e-12);
    let err = run_err(&["eval", "--data", s(&samples), "--out-dir", s(d)]);
    assert!(err.contains("reference"), "{err}");

    run_ok(&["plot", "--data", s(&d.join("pairs.csv")), "--out-dir", s(d), "--format", "svg"]);
    assert!(std::fs::read_to_string(d.join("plot.svg")).unwrap().contains("<circle"));
}

#[test]
fn clustered_labels_have_cluster_column() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("boxes.csv");
    let rows = (0..400).map(|i| {
        let (u, v) = ((i * 37 % 101) as f64 / 101.0, (i * 53 % 97) as f64 / 97.0);
        let shift = if i % 2 == 0 { 0.0 } else { 4.0 };
        format!("{},{}", u + shift, v)
    });
    write_csv(&data, "x0,x1", rows);
    run_ok(&["label", "--data", s(&data), "--clusters", "2", "--out-dir", s(dir.path())]);
    let text = std::fs::read_to_string(dir.path().join("pairs.csv")).unwrap();
    assert!(text.starts_with("y0,y1,x0,x1,cluster\n"));
    assert_eq!(text.lines().count(), 401);
}

#[test]
fn swiss_eval_and_plots_from_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let args = small_swiss(&out);
    run_ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let samples = out.join("samples.csv");
    let ev = dir.path().join("ev");
    run_ok(&["eval", "--experiment", "swiss1d", "--data", s(&samples), "--out-dir", s(&ev)]);
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(ev.join("metrics.json")).unwrap()).unwrap();
    for key in ["ks_theta", "monotonicity_violations", "ood_fraction"] {
        assert!(m[key]["value"].is_number(), "{key}");
    }
    run_ok(&["plot", "--experiment", "swiss1d", "--data", s(&samples), "--out-dir", s(&ev)]);
    assert!(ev.join("plot.png").metadata().unwrap().len() > 0);
}

#[test]
fn plot_rules() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let empty = d.join("empty.csv");
    std::fs::write(&empty, "x0,x1\n").unwrap();
    let out = d.join("plots");
    let err = run_err(&["plot", "--data", s(&empty), "--out-dir", s(&out)]);
    assert!(err.contains("empty dataset"), "{err}");
    assert!(!out.join("plot.png").exists());

    let wide = d.join("wide.csv");
    write_csv(&wide, "x0,x1,x2", (0..20).map(|i| format!("{i},{},{}", i * 2, i % 3)));
    let err = run_err(&["plot", "--data", s(&wide), "--out-dir", s(&out)]);
    assert!(err.contains("--dims"), "{err}");
    run_ok(&["plot", "--data", s(&wide), "--dims", "0,2", "--out-dir", s(&out)]);
    assert!(out.join("plot.png").metadata().unwrap().len() > 0);
}

#[test]
fn input_errors_are_one_line_with_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let header_only = d.join("h.csv");
    std::fs::write(&header_only, "x0\n").unwrap();
    let err = run_err(&["label", "--data", s(&header_only), "--out-dir", s(d)]);
    assert!(err.starts_with("error[empty_dataset]") && err.ends_with("empty dataset"), "{err}");

    let ragged = d.join("r.csv");
    std::fs::write(&ragged, "x0,x1\n1,2\n3,4\n5\n").unwrap();
    let err = run_err(&["label", "--data", s(&ragged), "--out-dir", s(d)]);
    assert!(err.starts_with("error[csv]") && err.contains("line 4"), "{err}");

    let text = d.join("t.csv");
    std::fs::write(&text, "x0\n1\nfoo\n").unwrap();
    let err = run_err(&["label", "--data", s(&text), "--out-dir", s(d)]);
    assert!(err.contains("line 3") && err.contains("foo"), "{err}");

    let err = run_err(&["sample", "--model", s(&d.join("none.bin")), "--out-dir", s(d)]);
    assert!(err.starts_with("error[io]"), "{err}");
    let bad = d.join("bad.bin");
    std::fs::write(&bad, b"GTNM not really a model").unwrap();
    let err = run_err(&["sample", "--model", s(&bad), "--out-dir", s(d)]);
    assert!(err.starts_with("error[model]"), "{err}");

    let err = run_err(&["run", "--experiment", "custom", "--out-dir", s(d)]);
    assert!(err.starts_with("error[config]") && err.contains("io.data"), "{err}");
    let err = run_err(&["run", "--experiment", "swiss1d", "--lr=-1", "--out-dir", s(d)]);
    assert!(err.starts_with("error[config]"), "{err}");
    let err = run_err(&["run", "--experiment", "nope"]);
    assert!(err.starts_with("error[usage]"), "{err}");
    let err = run_err(&["frobnicate"]);
    assert!(err.starts_with("error[usage]"), "{err}");

    let blocker = d.join("file");
    std::fs::write(&blocker, "x").unwrap();
    let args = small_swiss(&blocker.join("sub"));
    let err = run_err(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(err.starts_with("error[io]"), "{err}");

    let out = lab().env("GTN_LAB_THREADS", "0").args(["plot", "--data", s(&text)]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[config]: config field `GTN_LAB_THREADS`"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg: PathBuf = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "experiment = \"swiss1d\"\nseed = 3\nn_train = 1500\nn_val = 400\nn_generate = 50\n[train]\nmax_epochs = 3\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    run_ok(&["run", "--config", s(&cfg), "--seed", "9", "--out-dir", s(&out)]);
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 9);
    assert_eq!(manifest["config"]["n_train"], 1500);
    assert_eq!(manifest["config"]["train"]["batch_size"], 250);
    assert_eq!(lines(&out.join("samples.csv")), 51);

    std::fs::write(&cfg, "[mlp]\nlayers = 3\n").unwrap();
    let err = run_err(&["run", "--config", s(&cfg), "--experiment", "swiss1d"]);
    assert!(err.contains("layers"), "{err}");
}

#[test]
fn help_and_version_succeed() {
    let out = run_ok(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["run", "label", "train", "sample", "eval", "plot"] {
        assert!(text.contains(sub));
    }
    let out = run_ok(&["run", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--experiment", "--n-train", "--n-val", "--n-generate", "--seed", "--layers", "--width", "--lr",
        "--batch-size", "--patience", "--clusters", "--data", "--out-dir", "--format",
    ] {
        assert!(text.contains(flag), "{flag}");
    }
    run_ok(&["--version"]);
}
