use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bcsgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcsgap"))
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("BCSGAP_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_table(path: &Path, sign: f64) {
    let text: String = (0..41)
        .map(|i| {
            let r = 0.25 * i as f64;
            format!("{r} {:e}\n", sign * (-0.5 * r * r).exp())
        })
        .collect();
    fs::write(path, text).unwrap();
}

#[test]
fn potential_info_gaussian_is_admissible() {
    let o = bcsgap(&["potential-info", "--potential", "gaussian", "--g", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: admissible-unverifiable-parts"));
}

#[test]
fn potential_info_rejects_repulsive_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("repulsive.dat");
    write_table(&table, 1.0);
    let o = bcsgap(&["potential-info", "--table", table.to_str().unwrap(), "--g", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: rejected"));
}

#[test]
fn malformed_table_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bad.dat");
    fs::write(&table, "# header\n0 -1\n0.5 -0.8 extra\n").unwrap();
    let o = bcsgap(&["potential-info", "--table", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(bcsgap(&["sweep", "--mu", ""]).status.code(), Some(2));
    assert_eq!(bcsgap(&["sweep", "--mu", "100,50"]).status.code(), Some(2));
    assert_eq!(bcsgap(&["sweep", "--set", "gap_tol=0"]).status.code(), Some(2));
    assert_eq!(bcsgap(&["verify", "--only", "nonsense"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "g = 30\nmu = 50 100\nwhat = 1\n").unwrap();
    let o = bcsgap(&["gap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
}

#[test]
fn sweep_is_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let args = |o: &str| {
        vec![
            "sweep".to_string(),
            "--mu".into(),
            "50,100,200".into(),
            "--kappa".into(),
            "0,1".into(),
            "--out".into(),
            o.to_string(),
        ]
    };
    let run = |o: &str, extra: &[&str]| {
        let mut a = args(o);
        a.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let r = bcsgap(&refs);
        assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
        fs::read(dir.path().join(o).join("sweep.csv")).unwrap()
    };
    let first = run(&out("a"), &[]);
    let fresh = run(&out("b"), &[]);
    let cached = run(&out("a"), &[]);
    let forced = run(&out("a"), &["--force"]);
    assert_eq!(first, fresh);
    assert_eq!(first, cached);
    assert_eq!(first, forced);

    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema_version,mu,g,kappa,e_mu,b_mu,xi,delta_fermi,t_c,m_mu,thm1_functional,ratio,status"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let ratio: f64 = rows.last().unwrap()[11].parse().unwrap();
    assert!((1.68..=1.85).contains(&ratio));
    assert!(rows.iter().all(|r| r[12] == "ok"));

    let jsonl = fs::read_to_string(dir.path().join("a").join("sweep.jsonl")).unwrap();
    let last: serde_json::Value = serde_json::from_str(jsonl.lines().last().unwrap()).unwrap();
    assert_eq!(last["schema_version"], 1);
    assert_eq!(last["ratio"].as_f64().unwrap(), ratio);
    assert!(fs::read_to_string(dir.path().join("a").join("summary.txt"))
        .unwrap()
        .contains("Xi/T_c deviation"));
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |workers: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_bcsgap"))
            .args(["sweep", "--potential", "yukawa", "--mu", "50,100", "--kappa", "1"])
            .env("BCSGAP_WORKERS", workers)
            .env("RUST_LOG", "warn")
            .output()
            .unwrap();
        (o.status.code(), o.stdout)
    };
    let (c1, one) = run("1");
    let (c3, three) = run("3");
    assert_eq!((c1, c3), (Some(0), Some(0)));
    assert_eq!(one, three);
    assert_eq!(run("0").0, Some(2));
}

#[test]
fn infeasible_points_are_rows_not_errors() {
    let o = bcsgap(&["sweep", "--mu", "400", "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",infeasible: "));
    let o = bcsgap(&["sweep", "--mu", "100,400", "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_only_trace() {
    let o = bcsgap(&["verify", "--only", "trace"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    let checks: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
        .collect();
    assert_eq!(checks.len(), 1);
    assert!(checks[0].starts_with("PASS  7 trace"));
}

#[test]
fn inspection_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bcsgap(&["spectrum", "--mu", "25", "--kappa", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("at l = 0"));
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 62);

    let o = bcsgap(&["gap", "--mu", "50", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Delta(sqrt mu)"));
    assert!(dir.path().join("gap_profile.csv").exists());

    let o = bcsgap(&["tc", "--mu", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("T_c = "));
}
