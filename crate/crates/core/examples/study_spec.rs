//! Runs a sampling-distribution study from a JSON spec, the same path the
//! `study` subcommand takes.

use wfsel::study::{run_study, StudySpec};

fn main() -> wfsel::Result<()> {
    let out = std::env::temp_dir().join("wfsel-sampling.csv");
    let text = serde_json::json!({
        "kind": "sampling_dist",
        "k": 4, "theta": 4.8, "sigma": 35.1,
        "n_datasets": 500, "pool_size": 100000,
        "seed": 12, "output": out,
    })
    .to_string();
    let spec = StudySpec::from_json(&text)?;
    let outcome = run_study(&spec)?;
    println!("tables: {:?}", outcome.tables);
    println!("summary: {}", serde_json::to_string_pretty(&outcome.summary)?);
    Ok(())
}
