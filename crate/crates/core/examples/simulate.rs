//! Draws populations from the selected stationary law at a few intensities
//! and shows which sampler ran and how the homozygosity shifts.

use wfsel::sampler::{sample_neutral, sample_selection, SamplerConfig};
use wfsel::MutationParams;

fn main() -> wfsel::Result<()> {
    let theta = MutationParams::symmetric(4.8, 4)?;
    let n = 5000;
    let neutral = sample_neutral(&theta, n, 1)?;
    let mean = |xs: &[wfsel::SimplexPoint]| xs.iter().map(|x| x.homozygosity().value()).sum::<f64>() / xs.len() as f64;
    println!("{:>8} {:>18} {:>10} {:>8}", "sigma", "method", "accept", "mean H");
    println!("{:>8} {:>18} {:>10} {:>8.4}", 0, "neutral", 1.0, mean(&neutral));
    for sigma in [-20.0, 20.0, 35.1, 200.0, 1000.0] {
        let (draws, report) = sample_selection(&theta, sigma, n, 1, &SamplerConfig::default())?;
        println!(
            "{sigma:>8} {:>18} {:>10.4} {:>8.4}",
            format!("{:?}", report.method),
            report.acceptance_rate,
            mean(&draws)
        );
    }
    Ok(())
}
