//! Runs a catalog experiment with overrides, writes its result set and
//! reruns it from the manifest.
//!
//! `cargo run --example run_experiment -- [id] [seed]`

use eventreg::experiments::{rerun_manifest, run_experiment, validate_spec, ExperimentSpec, CATALOG};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "pendulum-entrainment".into());
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    if !CATALOG.iter().any(|e| e.id == id) {
        let ids: Vec<_> = CATALOG.iter().map(|e| e.id).collect();
        return Err(format!("unknown id {id}; try one of {ids:?}").into());
    }

    let root = std::env::temp_dir().join(format!("eventreg-example-{}", std::process::id()));
    let mut spec = ExperimentSpec::new(&id).with_seed(seed);
    if id == "pendulum-entrainment" {
        spec = spec.with_override("coupling", json!(0.8));
    }
    spec.out_dir = Some(root.join("run"));

    let manifest = validate_spec(&spec)?;
    println!("{} resolved to {} parameters", manifest.experiment, manifest.params.as_object().map_or(0, |m| m.len()));

    let rs = run_experiment(&spec, false)?;
    println!("wrote {}", rs.dir.display());
    for (k, v) in rs.metrics.iter().take(12) {
        println!("  {k} = {v}");
    }

    let again = rerun_manifest(&rs.manifest_path, &root.join("rerun"), false)?;
    let same = std::fs::read(&rs.metrics_path)? == std::fs::read(&again.metrics_path)?;
    println!("rerun from manifest identical: {same}");
    std::fs::remove_dir_all(&root)?;
    Ok(())
}
