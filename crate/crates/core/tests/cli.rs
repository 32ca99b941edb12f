use std::fs;
use std::process::{Command, Output};

fn eventreg(args: &[&str], out_root: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eventreg"))
        .args(args)
        .env("EVENTREG_OUT", out_root)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_shows_the_catalog() {
    let tmp = tempfile::tempdir().unwrap();
    let o = eventreg(&["list"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9, "{text}");
    for id in ["reliability", "pendulum-tracking", "event-rejection", "if-sync", "event-pendulum"] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn validate_rejects_unknown_override_with_its_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"experiment": "reliability", "overrides": {"neuron.nope": 1.0}}"#).unwrap();
    let o = eventreg(&["validate", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("neuron.nope"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn validate_accepts_ids_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let o = eventreg(&["validate", "if-sync", "--seed", "9", "--override", "seeds=3"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "ok if-sync seed 9");
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("seeded.json");
    fs::write(&cfg, r#"{"experiment": "pendulum-entrainment", "seed": 5}"#).unwrap();
    let o = eventreg(&["validate", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(stdout(&o).trim(), "ok pendulum-entrainment seed 5");
    let o = eventreg(&["validate", cfg.to_str().unwrap(), "--seed", "7"], tmp.path());
    assert_eq!(stdout(&o).trim(), "ok pendulum-entrainment seed 7");
}

#[test]
fn reproduce_prints_metrics_and_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str| {
        let out = tmp.path().join(dir);
        let o = eventreg(&["reproduce", "fig10", "--seed", "1", "--out", out.to_str().unwrap()], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (stdout(&o).replace(out.to_str().unwrap(), "<out>"), out)
    };
    let (a, dir) = run("a");
    let (b, _) = run("b");
    assert_eq!(a, b);
    assert!(a.starts_with("experiment event-rejection seed 1\n"), "{a}");
    for d in ["0", "0.05", "0.1", "0.2"] {
        assert!(a.contains(&format!("delta_{d}.spurious_count = ")), "{a}");
    }
    assert!(dir.join("manifest.json").is_file());

    // occupied directory
    let o = eventreg(&["reproduce", "fig10", "--out", dir.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: "));
}

#[test]
fn run_uses_default_output_root() {
    let tmp = tempfile::tempdir().unwrap();
    let o = eventreg(&["run", "pendulum-entrainment"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(tmp.path().join("pendulum-entrainment").join("metrics.json").is_file());
}

#[test]
fn bad_input_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [&["reproduce", "fig99"][..], &["run", "no-such-thing"], &["frobnicate"], &["validate", "if-sync", "--override", "seeds"]] {
        let o = eventreg(args, tmp.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}
