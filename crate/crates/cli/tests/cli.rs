use std::f64::consts::SQRT_2;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cpb::records::{read_csv, read_json};

fn cpb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpb"))
        .args(args)
        .env_remove("CPB_SEED")
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn simulate_writes_the_trajectory_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = cpb(&[
        "simulate",
        "--initial",
        "psi",
        "--lambda",
        "1e-3",
        "--tmax",
        "200",
        "--samples",
        "4000",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let header = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_owned();
    assert_eq!(
        header,
        "t,C,P,B,R,region,B1,B2,u1,u2,u3,rho_pp,singlet_pop,trace_err"
    );
    let rows = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 4000);
    assert!(rows.windows(2).all(|w| w[1].t > w[0].t));
    assert_eq!((rows[0].c, rows[0].p), (1.0, 1.0));
    assert!((rows[0].b - 2.0 * SQRT_2).abs() <= 1e-15);
    assert!(
        text(&o.stderr).contains("3 B>2 branches"),
        "{}",
        text(&o.stderr)
    );
}

#[test]
fn identical_arguments_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = cpb(&[
            "simulate",
            "--initial",
            "plus",
            "--lambda",
            "0.05",
            "--tmax",
            "20",
            "--samples",
            "101",
            "--out",
            p(out),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn simulate_to_json_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("traj.json");
    let o = cpb(&[
        "simulate",
        "--initial",
        "psi-perfect",
        "--omega",
        "0.5",
        "--tmax",
        "5",
        "--samples",
        "11",
        "--out",
        p(&json),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert_eq!(read_json(&json).unwrap().len(), 11);

    let o = cpb(&[
        "simulate",
        "--initial",
        "plus",
        "--tmax",
        "1",
        "--samples",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(text(&o.stdout).lines().count(), 4);
}

#[test]
fn simulate_from_a_custom_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("singlet.json");
    fs::write(
        &state,
        r#"{"dim":4,"re":[[0,0,0,0],[0,0.5,-0.5,0],[0,-0.5,0.5,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let out = dir.path().join("t.csv");
    let o = cpb(&[
        "simulate",
        "--in",
        p(&state),
        "--lambda",
        "0.1",
        "--tmax",
        "10",
        "--samples",
        "6",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    for r in read_csv(&out).unwrap() {
        assert!((r.singlet_pop - 1.0).abs() <= 1e-12);
    }
    let o = cpb(&["simulate", "--in", p(&state), "--initial", "psi"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_rejects_bad_parameters() {
    for args in [
        &["simulate", "--lambda", "-1"][..],
        &["simulate", "--samples", "1"],
        &["simulate", "--tmax", "0"],
        &[
            "simulate",
            "--initial",
            "plus",
            "--nmax",
            "0",
            "--tmax",
            "1",
            "--samples",
            "2",
        ],
        &["simulate", "--initial", "bogus"],
        &["simulate", "--dt", "nan"],
    ] {
        let o = cpb(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = cpb(&[
        "simulate",
        "--initial",
        "psi",
        "--nmax",
        "1",
        "--tmax",
        "1",
        "--samples",
        "2",
    ]);
    assert!(
        text(&o.stderr).contains("below the initial excitation number"),
        "{}",
        text(&o.stderr)
    );
}

#[test]
fn quantify_prints_the_triplet() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("psi.json");
    fs::write(&state, r#"{"dim":4,"re":[[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]],"im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#)
        .unwrap();
    let o = cpb(&["quantify", "--in", p(&state)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["C"].as_f64(), Some(1.0));
    assert_eq!(v["P"].as_f64(), Some(1.0));
    assert!((v["B"].as_f64().unwrap() - 2.0 * SQRT_2).abs() <= 1e-15);
    for key in ["R", "region", "B1", "B2", "u1", "u2", "u3", "K1", "K2"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn quantify_reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"dim\": 4,").unwrap();
    let o = cpb(&["quantify", "--in", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("malformed JSON"));

    let o = cpb(&["quantify", "--in", p(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("missing.json"));

    let not_x = dir.path().join("plus_x.json");
    fs::write(&not_x, r#"{"dim":4,"re":[[0.25,0.25,0.25,0.25],[0.25,0.25,0.25,0.25],[0.25,0.25,0.25,0.25],[0.25,0.25,0.25,0.25]]}"#)
        .unwrap();
    let o = cpb(&["quantify", "--in", p(&not_x)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("not X-shaped"));

    let o = cpb(&["quantify", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mems_sweep_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mems.csv");
    let o = cpb(&[
        "mems",
        "--gamma-min",
        "0",
        "--gamma-max",
        "1",
        "--steps",
        "200",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let body = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "gamma,C,P,B,R,region");
    assert_eq!(lines.len(), 202);

    let o = cpb(&[
        "mems",
        "--gamma-min",
        "1",
        "--gamma-max",
        "1",
        "--steps",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("gamma-min < gamma-max"));
}

#[test]
fn branches_of_a_written_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.json");
    let o = cpb(&[
        "simulate",
        "--initial",
        "psi",
        "--lambda",
        "1e-3",
        "--samples",
        "2000",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = cpb(&["branches", "--in", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let listing = text(&o.stdout);
    let lines: Vec<&str> = listing.lines().collect();
    assert_eq!(
        lines[0],
        "index,t_start,t_end,b_peak,t_peak,open_start,open_end"
    );
    assert_eq!(lines.len(), 4, "{listing}");
    assert!(lines[1].starts_with("1,0.") && lines[1].contains(",true,false"));
    assert!(lines[3].ends_with(",false,true"));
}

#[test]
fn verify_reports_the_seed_and_passes() {
    let o = cpb(&["verify", "--suite", "mems", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stdout));
    let out = text(&o.stdout);
    assert!(out.starts_with("seed: 42\n"));
    assert!(out.contains("PASS") && !out.contains("FAIL"));

    let o = Command::new(env!("CARGO_BIN_EXE_cpb"))
        .args(["verify", "--suite", "qmat"])
        .env("CPB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(text(&o.stdout).starts_with("seed: 7\n"));

    let o = cpb(&["verify", "--suite", "qmat"]);
    assert!(text(&o.stdout).starts_with("seed: 42\n"));

    let o = cpb(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_all_covers_every_suite() {
    let o = cpb(&["verify", "--suite", "all", "--seed", "42"]);
    let out = text(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{out}");
    for suite in ["qmat", "quantifiers", "dynamics", "mems", "trajectory"] {
        assert!(out.lines().any(|l| l.starts_with(suite)), "{suite}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cpb(&["--help"]).status.code(), Some(0));
    assert_eq!(cpb(&["--version"]).status.code(), Some(0));
    assert_eq!(cpb(&[]).status.code(), Some(1));
}
