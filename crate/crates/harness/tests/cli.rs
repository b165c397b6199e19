use std::fs;
use std::path::Path;
use std::process::Command;

fn bivar(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bivar")).args(args).env("BVAR_THREADS", "1").output().expect("runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn csv_bodies(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn counterexample_suite_passes_with_all_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "n = 4\nq = 3.0\n");
    let out = tmp.path().join("out");
    let r = bivar(&["run", "counterexample", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let table = fs::read_to_string(out.join("counterexample_alternation.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    assert_eq!(lines.next().unwrap(), "n,i,scale,average,threshold,pass");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), (1..=4).map(|n| 2 * n + 1).sum::<usize>());
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["suite"], "counterexample");
    assert_eq!(manifest["pass"], true);
}

#[test]
fn same_seed_gives_identical_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let r = Command::new(env!("CARGO_BIN_EXE_bivar"))
            .args(["run", "identities", "--trials", "5", "--seed", "11", "--grid", "32", "--out", dir.to_str().unwrap()])
            .env("BVAR_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(csv_bodies(&a), csv_bodies(&b));
    let c = tmp.path().join("c");
    bivar(&["run", "identities", "--trials", "5", "--seed", "12", "--grid", "32", "--out", c.to_str().unwrap()]);
    assert_ne!(csv_bodies(&a), csv_bodies(&c));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let r = bivar(&["run", "sweep", "--grid", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("grid"));
    assert!(!out.exists());
    assert_eq!(bivar(&["run", "nonsense"]).status.code(), Some(2));
    let cfg = write_config(tmp.path(), "p1 = 2.0\np2 = 2.0\np = 2.0\n");
    assert_eq!(bivar(&["run", "sweep", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(tmp.path(), "colour = \"red\"\n");
    assert_eq!(bivar(&["run", "interp", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn failed_ceiling_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let ceil = tmp.path().join("ceil.toml");
    fs::write(&ceil, "square_function = 1e-9\n").unwrap();
    let cfg = write_config(tmp.path(), &format!("ceilings = {:?}\ngrid = 16\ntrials = 3\n", ceil.to_str().unwrap()));
    let out = tmp.path().join("out");
    let r = bivar(&["run", "square", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stdout).contains("FAIL square_function_norm"));
}
