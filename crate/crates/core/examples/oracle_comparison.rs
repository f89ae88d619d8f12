//! Trajectory ensembles against direct integration of the master equation
//! for every chain length the oracle accepts.
//!
//! cargo run --release --example oracle_comparison

use std::time::Instant;

use noisy_teleport::oracle::ORACLE_MAX_QUBITS;
use noisy_teleport::{run_experiment, run_protocol_density, ExperimentConfig};

fn main() -> noisy_teleport::Result<()> {
    println!("{:>3} {:>6} {:>10} {:>10} {:>10} {:>8}", "n", "gamma", "F_traj", "sem", "F_oracle", "z");
    for n in 3..=ORACLE_MAX_QUBITS {
        for gamma in [0.1, 0.5, 1.0] {
            let config = ExperimentConfig::new(n, gamma).with_trajectories(500);
            let started = Instant::now();
            let stats = run_experiment(&config)?;
            let exact = run_protocol_density(&config)?;
            let z = (stats.mean_fidelity - exact) / stats.sem.max(f64::MIN_POSITIVE);
            println!(
                "{n:>3} {gamma:>6.2} {:>10.6} {:>10.6} {exact:>10.6} {z:>8.2}   ({:.2?})",
                stats.mean_fidelity,
                stats.sem,
                started.elapsed()
            );
        }
    }
    Ok(())
}
