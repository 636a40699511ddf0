use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn hadof(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadof"))
        .args(args)
        .env("HADOF_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out_dir: &Path) -> String {
    let out = hadof(args, out_dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn gen_writes_seeded_files_and_manifest() {
    let dir = tempdir().unwrap();
    ok(&["gen", "--n", "10", "--count", "3", "--seed", "1"], dir.path());
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    let names: Vec<&str> = manifest.lines().collect();
    assert_eq!(names, ["qubo_n10_seed1.txt", "qubo_n10_seed2.txt", "qubo_n10_seed3.txt"]);
    let first = fs::read(dir.path().join(names[0])).unwrap();
    ok(&["gen", "--n", "10", "--count", "3", "--seed", "1"], dir.path());
    assert_eq!(first, fs::read(dir.path().join(names[0])).unwrap());
}

#[test]
fn gen_zero_count() {
    let dir = tempdir().unwrap();
    ok(&["gen", "--n", "10", "--count", "0"], dir.path());
    assert_eq!(fs::read_to_string(dir.path().join("manifest.txt")).unwrap(), "");
}

#[test]
fn gen_large_instance_line_count() {
    let dir = tempdir().unwrap();
    ok(&["gen", "--n", "500", "--count", "1", "--seed", "3"], dir.path());
    let text = fs::read_to_string(dir.path().join("qubo_n500_seed3.txt")).unwrap();
    let body = text.lines().filter(|l| !l.starts_with("qubo") && !l.is_empty()).count();
    assert_eq!(body, 125_250);
}

#[test]
fn solve_exact_single_variable() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("one.txt");
    fs::write(&path, "qubo 1\n0 0 -5\n").unwrap();
    let report = json(&ok(&["solve", path.to_str().unwrap(), "--solver", "exact"], dir.path()));
    assert_eq!(report["best"]["objective"], -5.0);
    assert_eq!(report["best"]["assignment"], "1");
    assert_eq!(report["scaled"]["best"], 1.0);
}

#[test]
fn solve_decomposed_with_whole_block_matches_sa() {
    let dir = tempdir().unwrap();
    ok(&["gen", "--n", "8", "--seed", "4"], dir.path());
    let path = dir.path().join("qubo_n8_seed4.txt");
    let p = path.to_str().unwrap();
    let common = ["--seed", "9", "--final-shots", "800", "--shots", "100"];
    let sa = json(&ok(&[&["solve", p, "--solver", "sa"][..], &common].concat(), dir.path()));
    let hsa = json(
        &ok(&[&["solve", p, "--solver", "hadof-sa", "--k", "8"][..], &common].concat(), dir.path()),
    );
    for key in ["best", "most_probable", "average_objective"] {
        assert_eq!(sa[key], hsa[key], "{key}");
    }
}

#[test]
fn solve_is_deterministic_apart_from_timing() {
    let dir = tempdir().unwrap();
    ok(&["gen", "--n", "10", "--seed", "2"], dir.path());
    let path = dir.path().join("qubo_n10_seed2.txt");
    let args = ["solve", path.to_str().unwrap(), "--solver", "hadof-qaoa", "--k", "5", "--seed", "17"];
    let mut a = json(&ok(&args, dir.path()));
    let mut b = json(&ok(&args, dir.path()));
    for r in [&mut a, &mut b] {
        r.as_object_mut().unwrap().remove("wall_time_s");
    }
    assert_eq!(a, b);
    assert_eq!(a["config"]["k"], 5);
    assert_eq!(a["marginal_trajectory"].as_array().unwrap().len(), 10);
    assert_eq!(a["reference"]["kind"], "exact");
}

#[test]
fn solve_config_file_and_flag_precedence() {
    let dir = tempdir().unwrap();
    ok(&["gen", "--n", "6", "--seed", "1"], dir.path());
    let path = dir.path().join("qubo_n6_seed1.txt");
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "k = 3\np = 4\nfinal_shots = 100\nmarginal_shots = 50\n").unwrap();
    let args = ["solve", path.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--p", "6"];
    let report = json(&ok(&args, dir.path()));
    assert_eq!(report["config"]["k"], 3);
    assert_eq!(report["config"]["p"], 6);
    assert_eq!(report["config"]["final_shots"], 100);
    assert_eq!(report["config"]["marginal_shots"], 50);

    fs::write(&cfg, "depth = 3\n").unwrap();
    assert!(!hadof(&args, dir.path()).status.success());
}

#[test]
fn solve_reports_errors() {
    let dir = tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "qubo 2\n1 0 3\n").unwrap();
    let out = hadof(&["solve", bad.to_str().unwrap(), "--solver", "exact"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    ok(&["gen", "--n", "25", "--seed", "1"], dir.path());
    let big = dir.path().join("qubo_n25_seed1.txt");
    let out = hadof(&["solve", big.to_str().unwrap(), "--solver", "exact"], dir.path());
    assert!(!out.status.success());

    let out = hadof(&["solve", "missing.txt"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn bench_rows_and_self_reference() {
    let dir = tempdir().unwrap();
    ok(&["bench", "--n", "10", "--solver", "exact,sa", "--instances", "2", "--seed", "5"], dir.path());
    let text = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "n", "k", "solver", "seed", "best_obj", "most_probable_obj", "avg_obj", "reference_obj",
            "scaled_best", "scaled_most_probable", "scaled_avg", "wall_time_s", "error"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in rows.iter().filter(|r| &r[2] == "exact") {
        assert_eq!(&row[8], "1.0");
    }
}

#[test]
fn bench_csv_is_deterministic_and_append_safe() {
    let dir = tempdir().unwrap();
    let args = [
        "bench", "--n", "8,12", "--k", "4", "--solver", "hadof-sa,hadof-qaoa", "--instances", "2",
        "--seed", "3", "--shots", "100", "--final-shots", "500", "--jobs", "2",
    ];
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(11);
                f.join(",")
            })
            .collect()
    };
    ok(&args, dir.path());
    let first = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    ok(&args, dir.path());
    let both = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let first = strip(&first);
    let both = strip(&both);
    assert_eq!(first.len(), 9);
    assert_eq!(both.len(), 17);
    assert_eq!(both[..9], first[..]);
    assert_eq!(both[9..], first[1..]);
    for row in &first[1..] {
        let f: Vec<&str> = row.split(',').collect();
        let best: f64 = f[4].parse().unwrap();
        let avg: f64 = f[6].parse().unwrap();
        assert!(best <= avg);
    }
}

#[test]
fn bench_errors_go_to_error_column() {
    let dir = tempdir().unwrap();
    ok(&["bench", "--n", "4", "--k", "9", "--solver", "hadof-qaoa", "--instances", "1"], dir.path());
    let rows: Vec<csv::StringRecord> = csv::Reader::from_path(dir.path().join("bench.csv"))
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect();
    assert_eq!(rows.len(), 1);
    assert!(!rows[0][12].is_empty());
}
