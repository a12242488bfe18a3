use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_manyarm");

fn manyarm(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("MANYARM_SEED")
        .output()
        .expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

const MANIFEST: &str = "\
synthetic = true
synthetic.sessions = 40
synthetic.dim = 8
synthetic.distractors = 500
seeds = 3, 4
out = {out}
stride = 5
round_log = true

[cell]
strategy = max-utility
policy = linucb
k = 30

[cell]
name = rk
strategy = random-k
policy = random
k = 30

[cell]
strategy = zooming
policy = linthompsamp
";

#[test]
fn manifest_reruns_are_byte_identical_and_reconcile() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.txt");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let text = MANIFEST.replace("{out}", out.to_str().unwrap());
        fs::write(&manifest, text).unwrap();
        let o = manyarm(&["run", "--manifest", manifest.to_str().unwrap(), "--jobs", "2"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    assert_eq!(fa.len(), 3 * 2 * 2 + 1);
    assert_eq!(fa, fb);

    // Rerunning into a populated directory overwrites with the same bytes.
    let o = manyarm(&["run", "--manifest", manifest.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(read_dir_sorted(&b), fb);

    let summary = fs::read_to_string(a.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("cell,seed,T,final_R,final_R_over_T"));
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let f: Vec<&str> = line.split(',').collect();
        let curve = fs::read_to_string(a.join(format!("{}.seed{}.csv", f[0], f[1]))).unwrap();
        assert!(curve.starts_with("t,cumulative_regret,per_round_regret\n"));
        let last: Vec<&str> = curve.lines().last().unwrap().split(',').collect();
        assert_eq!(last[0], f[2]);
        assert_eq!(last[1], f[3]);
        let r: f64 = f[4].parse().unwrap();
        assert!((r - last[2].parse::<f64>().unwrap()).abs() < 1e-6);
        let t: u64 = f[2].parse().unwrap();
        for row in curve.lines().skip(1) {
            let rt: u64 = row.split(',').next().unwrap().parse().unwrap();
            assert!(rt % 5 == 0 || rt == t);
        }
        let rounds = fs::read_to_string(a.join(format!("{}.seed{}.rounds.csv", f[0], f[1]))).unwrap();
        assert_eq!(rounds.lines().count() as u64, t + 1);
    }
    assert_eq!(rows, 6);
}

#[test]
fn single_cell_flags_write_a_curve_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = Command::new(BIN)
        .args(["run", "--synthetic", "--sessions", "20", "--distractors", "300", "--dim", "8"])
        .args(["--strategy", "random-k", "--policy", "most-similar", "--k", "25"])
        .args(["--out", out.to_str().unwrap()])
        .env("MANYARM_SEED", "12")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<String> = read_dir_sorted(&out).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["random-k-most-similar-eps0.5-k25.seed12.csv", "summary.csv"]);
}

#[test]
fn bad_arguments_and_manifests_exit_with_two() {
    let o = manyarm(&["run", "--synthetic", "--strategy", "nearest"]);
    assert_eq!(o.status.code(), Some(2));
    let o = manyarm(&["run", "--synthetic", "--strategy", "random-k", "--k-schedule", "anytime:beta=1,kmax=50"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("bad.txt");
    fs::write(&m, "synthetic = true\n[cell]\nepsilon = lots\n").unwrap();
    let o = manyarm(&["run", "--manifest", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3"), "{}", String::from_utf8_lossy(&o.stderr));

    let o = manyarm(&["run", "--manifest", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synth_then_stats_on_the_written_files() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.tsv");
    let emb = dir.path().join("emb.txt");
    let o = manyarm(&[
        "synth", "--out-log", log.to_str().unwrap(), "--out-embeddings", emb.to_str().unwrap(),
        "--sessions", "100", "--distractors", "50",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = manyarm(&["stats", "--log", log.to_str().unwrap(), "--embeddings", emb.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let after = text.lines().find(|l| l.starts_with("after filter")).unwrap();
    assert_eq!(after.split_whitespace().nth(3), Some("100"));

    let short = dir.path().join("short.tsv");
    let body: String = (0..10).flat_map(|s| (0..3).map(move |i| format!("s{s}\t{i}\tq{s}x{i}\n"))).collect();
    fs::write(&short, body).unwrap();
    let o = manyarm(&["stats", "--log", short.to_str().unwrap(), "--embeddings", emb.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    let after: Vec<&str> = text.lines().find(|l| l.starts_with("after filter")).unwrap().split_whitespace().collect();
    assert_eq!(&after[2..4], ["0", "0"]);
}

#[test]
fn grid_output_parses_back_as_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    for grid in ["fig2", "fig3", "fig4"] {
        let o = manyarm(&["grid", grid, "--synthetic", "--seed", "1,2"]);
        assert!(o.status.success());
        let path = dir.path().join(format!("{grid}.txt"));
        fs::write(&path, &o.stdout).unwrap();
        let m = manyarm::experiment::Manifest::load(&path).unwrap();
        assert_eq!(m.seeds, [1, 2]);
        assert_eq!(m.to_text().as_bytes(), &o.stdout[..]);
    }
}
