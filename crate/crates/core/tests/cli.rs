use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stream-embed"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn sbm_fixture(dir: &Path) {
    let out = run(&[
        "sbm", "--blocks", "40,40,40", "--p-in", "0.3", "--p-out", "0.01", "--seed", "4", "--out",
        p(dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn embed_on_path_matches_dense_vector() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("p3.tsv");
    fs::write(&edges, "0\t1\n1\t2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["embed", "--edges", p(&edges), "--k", "1", "--p", "1.0", "--out", p(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("embedding.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "vertex_id,f0");
    let s = 0.5f64.sqrt();
    for (line, want) in lines[1..].iter().zip([s, 0.0, -s]) {
        let x: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((x - want).abs() < 1e-12, "{line}");
    }
    let arrivals = fs::read_to_string(out_dir.join("arrival_rows.csv")).unwrap();
    assert_eq!(arrivals.lines().count(), 1);
}

#[test]
fn eval_writes_report_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    sbm_fixture(dir.path());
    let out_dir = dir.path().join("eval");
    let out = run(&[
        "eval", "--edges", p(&dir.path().join("edges.tsv")), "--labels",
        p(&dir.path().join("labels.tsv")), "--k", "6", "--p", "0.3", "--seed", "7", "--out",
        p(&out_dir), "--baseline",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    for key in ["micro_f1", "macro_f1", "nmi", "completeness"] {
        let v = report[key].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v), "{key} = {v}");
    }
    assert_eq!(report["prefix"], 36);
    let timings = fs::read_to_string(out_dir.join("timings.csv")).unwrap();
    assert!(timings.starts_with("step,vertex,influence_ns,update_ns,influenced_size\n"));
    assert_eq!(timings.lines().count(), 1 + 120 - 36);
    assert!(out_dir.join("baseline.json").exists());
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    sbm_fixture(dir.path());
    let conf = dir.path().join("run.conf");
    let out_dir = dir.path().join("conf-out");
    fs::write(
        &conf,
        format!(
            "# run settings\nk = 3\np = 0.5\nedges = {}\nout = {}\n",
            dir.path().join("edges.tsv").display(),
            out_dir.display()
        ),
    )
    .unwrap();
    let out = run(&["embed", "--config", p(&conf), "--k", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("embedding.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "vertex_id,f0,f1,f2,f3");
    assert_eq!(csv.lines().count(), 121);
}

#[test]
fn repeated_runs_produce_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    sbm_fixture(dir.path());
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let out_dir = dir.path().join(format!("run{run_id}"));
        for cmd in ["embed", "eval"] {
            let out = run(&[
                cmd, "--edges", p(&dir.path().join("edges.tsv")), "--labels",
                p(&dir.path().join("labels.tsv")), "--k", "5", "--p", "0.25", "--seed", "3",
                "--out", p(&out_dir),
            ]);
            assert!(out.status.success());
        }
        outputs.push(
            ["embedding.csv", "arrival_rows.csv", "report.json"]
                .map(|f| fs::read(out_dir.join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn diagnose_writes_deviation_table() {
    let dir = tempfile::tempdir().unwrap();
    sbm_fixture(dir.path());
    let out_dir = dir.path().join("diag");
    let out = run(&[
        "diagnose", "--edges", p(&dir.path().join("edges.tsv")), "--k", "4", "--p", "0.9",
        "--seeds", "3", "--out", p(&out_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("deviation.csv")).unwrap();
    // 12 streamed arrivals, 3 seeds each
    assert_eq!(csv.lines().count(), 1 + 12 * 3);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["smoothness_violations"], 0);
}

#[test]
fn bench_writes_scaling_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["bench", "--sizes", "200,400", "--k", "4", "--out", p(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("vertices,edges,arrivals,median_arrival_ns"));
    assert!(lines[1].starts_with("200,"));
}

fn error_json(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let last = stderr.lines().last().unwrap_or_default();
    serde_json::from_str(last).unwrap_or_else(|_| panic!("not JSON: {stderr}"))
}

#[test]
fn exit_codes_and_error_payloads() {
    let dir = tempfile::tempdir().unwrap();

    let out = run(&["embed", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "usage");

    let out = run(&["embed", "--edges", p(&dir.path().join("missing.tsv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["exit_code"], 2);

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "0 1\n1 2 3\n").unwrap();
    let out = run(&["embed", "--edges", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["message"].as_str().unwrap().contains("line 2"));

    let out = run(&["embed", "--edges", p(&bad), "--k", "0"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
