//! Averages post-chain trajectory states into a density matrix and measures
//! its trace distance to the integrated master equation as the ensemble
//! grows.
//!
//! cargo run --release --example unraveling_consistency -- [n] [gamma]

use noisy_teleport::oracle::evolve_chain_density;
use noisy_teleport::protocol::run_chain;
use noisy_teleport::{DensityMatrix, ExperimentConfig};

fn main() -> noisy_teleport::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let gamma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let config = ExperimentConfig::new(n, gamma);
    let exact = evolve_chain_density(&config)?;

    let mut sum = DensityMatrix::zeros(n);
    let mut done = 0u64;
    for target in [100u64, 1_000, 10_000, 100_000] {
        while done < target {
            let (state, _, _) = run_chain(&config, done)?;
            sum.accumulate_pure(&state, 1.0)?;
            done += 1;
        }
        let mean = DensityMatrix::from_matrix(sum.matrix() / num_complex::Complex64::from(done as f64))?;
        println!("N = {done:>6}: trace distance {:.5}", mean.trace_distance(&exact)?);
    }
    Ok(())
}
