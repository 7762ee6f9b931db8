//! How often does a population fall into the instability region? Draws
//! 1000 populations at each selection intensity under heterozygote
//! advantage (+sigma) and homozygote advantage (-sigma), k = 10.

use wfsel::study::instability_probability;

fn main() -> wfsel::Result<()> {
    let grid: Vec<f64> = (0..=10).map(|i| 10.0 * i as f64).collect();
    let rows = instability_probability(10, 5.0, &grid, 0.09, 1000, 5)?;
    println!("{:>7} {:>8} {:>8}", "sigma", "hetero", "homo");
    for r in rows {
        println!("{:>7} {:>8.3} {:>8.3}", r.sigma, r.hetero_hit_fraction, r.homo_hit_fraction);
    }
    Ok(())
}
