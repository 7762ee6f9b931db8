//! Persists an importance pool as JSON lines and reloads it; queries on the
//! reloaded pool match the original exactly.

use std::io::BufReader;

use wfsel::density::{cdf_homozygosity, PoolConfig, Proposal, WeightedPool};
use wfsel::{datasets, MutationParams};

fn main() -> wfsel::Result<()> {
    let theta = MutationParams::symmetric(4.8, 4)?;
    let cfg = PoolConfig::with_size(20_000).proposal(Proposal::defensive(&theta));
    let pool = WeightedPool::build(&theta, &cfg, 6)?;
    let path = std::env::temp_dir().join("wfsel-pool.jsonl");
    pool.write_jsonl(std::fs::File::create(&path)?)?;
    let back = WeightedPool::read_jsonl(BufReader::new(std::fs::File::open(&path)?))?;
    let h = datasets::lyme().homozygosity();
    let a = cdf_homozygosity(&pool, 17.25, h).value;
    let b = cdf_homozygosity(&back, 17.25, h).value;
    println!("{} draws written to {}; P(H <= h) {a} vs {b}", back.len(), path.display());
    std::fs::remove_file(&path)?;
    Ok(())
}
