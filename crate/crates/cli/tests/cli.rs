use std::path::Path;
use std::process::{Command, Output};

fn misocache(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_misocache"))
        .args(args)
        .env_remove("MISOCACHE_FORMAT")
        .env_remove("MISOCACHE_SEED")
        .env_remove("MISOCACHE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn column<'a>(csv: &'a str, name: &str) -> Vec<&'a str> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap()).collect()
}

#[test]
fn compute_worked_point() {
    let o = misocache(&["compute", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("T       19/12"), "{out}");
    assert!(out.contains("gap     19/12 (1.58"), "{out}");
    assert!(out.contains("regime  FirstBranch"), "{out}");

    let o = misocache(&["compute", "--k", "4", "--n", "8", "--m", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["t"]["num"], "19");
    assert_eq!(v["t"]["den"], "12");
    assert_eq!(v["regime"]["kind"], "FirstBranch");
    assert_eq!(v["Gamma"]["den"], "2");
}

#[test]
fn compute_large_cache_and_bad_input() {
    let o = misocache(&["compute", "--k", "4", "--n", "4", "--m", "2", "--alpha", "0", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(column(&out, "regime"), ["LargeGamma"]);
    assert_eq!(column(&out, "T")[0].parse::<f64>().unwrap(), 7.0 / 12.0);
    assert_eq!(column(&out, "delta"), [""]);

    let o = misocache(&["compute", "--k", "4", "--n", "3", "--m", "1", "--alpha", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("N < K"));

    assert_eq!(code(&misocache(&["compute", "--k", "4", "--n", "8", "--m", "1", "--alpha", "1e-3"])), 2);
    assert_eq!(code(&misocache(&["compute", "--k", "4"])), 2);
    assert_eq!(code(&misocache(&["frobnicate"])), 2);
}

#[test]
fn sweep_alpha_grid() {
    let o = misocache(&["sweep", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0:0.05:1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "K,N,M,gamma,Gamma,alpha,regime,eta,T,dof,T_lb,argmax_s,gap,delta");
    let gaps = column(&out, "gap");
    assert_eq!(gaps.len(), 21);
    assert!(gaps.iter().all(|g| g.parse::<f64>().unwrap() < 4.0));
    assert_eq!(column(&out, "alpha")[1], "1/20");

    assert_eq!(code(&misocache(&["sweep", "--k", "4", "--n", "8", "--m", "1", "--alpha", ""])), 2);
    assert_eq!(code(&misocache(&["sweep", "--k", "2-10", "--n", "8", "--m", "1", "--alpha", "0"])), 2);
}

#[test]
fn cacheless_sweep_gives_harmonic_numbers() {
    let o = misocache(&["sweep", "--k", "2-50", "--n-mult", "1", "--m", "0", "--alpha", "0"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let ks = column(&out, "K");
    let ts = column(&out, "T");
    assert_eq!(ts.len(), 49);
    for (k, t) in ks.iter().zip(ts) {
        let k: u64 = k.parse().unwrap();
        let h: f64 = (1..=k).rev().map(|i| 1.0 / i as f64).sum();
        assert!((t.parse::<f64>().unwrap() - h).abs() < 1e-12, "K={k}");
    }
}

#[test]
fn sweep_to_file_is_atomic_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "--out".to_string(),
            p.to_str().unwrap().to_string(),
            "sweep".into(),
            "--k".into(),
            "2-12".into(),
            "--n-mult".into(),
            "1,2".into(),
            "--m-steps".into(),
            "3".into(),
            "--alpha".into(),
            "0:1/4:1".into(),
        ]
    };
    let run = |p: &Path| {
        let v = args(p);
        misocache(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(code(&run(&a)), 0);
    assert_eq!(code(&run(&b)), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let bad = dir.path().join("bad.csv");
    let o = misocache(&["--out", bad.to_str().unwrap(), "sweep", "--k", "4", "--n", "8", "--m", "9", "--alpha", "0"]);
    assert_eq!(code(&o), 2);
    assert!(!bad.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["sweep", "--k", "2-9", "--n-mult", "1,3", "--m-steps", "2", "--alpha", "0,1/2,1"];
    let one = misocache(&[&["--threads", "1"], &base[..]].concat());
    let four = misocache(&[&["--threads", "4"], &base[..]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&misocache(&[&["--threads", "0"], &base[..]].concat())), 2);
}

#[test]
fn gap_audit_single_point() {
    let o = misocache(&["gap-audit", "--k", "4", "--n", "8", "--m", "1", "--alpha", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["points"], 1);
    assert_eq!(v["max_gap"]["decimal"], 1.0);
    assert_eq!(v["holds"], true);
}

#[test]
fn gap_audit_large_k_reports_trend() {
    let o = misocache(&["gap-audit", "--large-k", "--k", "1000,100000", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let gaps: Vec<f64> = column(&out, "gap").iter().map(|g| g.parse().unwrap()).collect();
    assert_eq!(gaps.len(), 2);
    assert!(gaps.iter().all(|g| *g > 1.0 && *g < 2.6));
    assert_eq!(code(&misocache(&["gap-audit", "--large-k", "--alpha", "0,1"])), 2);
}

#[test]
fn simulate_worked_point() {
    let o = misocache(&["simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0", "--f", "96", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("airtime   19/12"), "{out}");
    assert!(out.contains("units     6 XOR, 4 MAT, 0 ZF"), "{out}");
    assert!(out.contains("result    success"));

    let o = misocache(&[
        "--format", "json", "--seed", "7", "simulate", "--k", "4", "--n", "8", "--m", "1", "--f", "96", "--requests", "2,2,5,0",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["success"], true);
    assert_eq!(v["requests"], serde_json::json!([2, 2, 5, 0]));
    assert_eq!(v["airtime"]["num"], "19");
    assert_eq!(v["users"][0]["decoded_hex"], v["users"][1]["decoded_hex"]);
    assert_eq!(v["users"][0]["decoded_hex"].as_str().unwrap().len(), 24);
}

#[test]
fn simulate_usage_errors() {
    let o = misocache(&["simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0", "--f", "100"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("least valid multiple is 8"), "{err}");
    assert!(err.contains("next valid f is 104"), "{err}");

    let o = misocache(&["simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "3/5", "--f", "96"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha 3/5 above first-branch breakpoint 12/25"));

    let o = misocache(&["simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "12/25", "--suggest-f"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "8\n");

    assert_eq!(code(&misocache(&["simulate", "--k", "4", "--n", "8", "--m", "1"])), 2);
    assert_eq!(code(&misocache(&["simulate", "--k", "4", "--n", "8", "--m", "1", "--f", "96", "--requests", "0,1"])), 2);
    assert_eq!(code(&misocache(&["simulate", "--k", "4", "--n", "4", "--m", "2", "--f", "96"])), 2);
}

#[test]
fn simulate_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("log.tsv");
    let o = misocache(&[
        "simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "12/25", "--f", "4800", "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let body = std::fs::read_to_string(&trace).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "# phase\ttag\tusers\tbits\toffset");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.iter().filter(|r| r[1] == "XOR").count(), 6);
    assert_eq!(rows.iter().filter(|r| r[1] == "MAT").count(), 0);
    let zf_user0: u64 = rows.iter().filter(|r| r[1] == "ZF" && r[2] == "0").map(|r| r[3].parse::<u64>().unwrap()).sum();
    assert_eq!(zf_user0, 2400);
}

#[test]
fn simulate_is_deterministic() {
    let args = ["--format", "json", "--seed", "99", "simulate", "--k", "6", "--n", "12", "--m", "1", "--alpha", "1/10", "--f", "2748", "--requests", "random"];
    let a = misocache(&args);
    let b = misocache(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_and_format_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_misocache"))
        .args(["simulate", "--k", "2", "--n", "2", "--m", "1", "--f", "8"])
        .env("MISOCACHE_FORMAT", "json")
        .env("MISOCACHE_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["airtime"]["num"], "1");
    assert_eq!(v["airtime"]["den"], "2");
}

#[test]
fn delta_small_grid() {
    let o = misocache(&["delta", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0,1/2,1", "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(column(&out, "regime"), ["FirstBranch", "EtaBranch", "FullCsitBranch"]);
    assert_eq!(column(&out, "agrees")[0], "true");
    assert_eq!(column(&out, "agrees")[2], "true");

    let o = misocache(&["delta", "--k", "4", "--n", "8", "--m", "1", "--alpha", "1/2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("discrepancies"));

    assert_eq!(code(&misocache(&["delta", "--k", "4", "--n", "4", "--m", "2", "--alpha", "0"])), 2);
}
