//! Fidelity against damping rate at fixed chain length, with the offset
//! F - 1/2 above the fully damped limit.
//!
//! cargo run --release --example gamma_sweep -- [n] [trajectories]

use noisy_teleport::{run_experiment, ExperimentConfig};

fn main() -> noisy_teleport::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(9);
    let trajectories: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);
    println!("{:>6} {:>10} {:>10} {:>10}", "gamma", "F", "sem", "F - 1/2");
    for i in 0..=20 {
        let gamma = i as f64 / 10.0;
        let stats = run_experiment(&ExperimentConfig::new(n, gamma).with_trajectories(trajectories))?;
        println!("{gamma:>6.2} {:>10.6} {:>10.6} {:>10.6}", stats.mean_fidelity, stats.sem, stats.mean_fidelity - 0.5);
    }
    Ok(())
}
