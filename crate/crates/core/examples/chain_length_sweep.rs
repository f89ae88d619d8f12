//! Fidelity against chain length at gamma = 0.5, with the oracle value
//! wherever the density matrix still fits.
//!
//! cargo run --release --example chain_length_sweep -- [max_n] [trajectories]

use noisy_teleport::oracle::ORACLE_MAX_QUBITS;
use noisy_teleport::{run_experiment, run_protocol_density, ExperimentConfig};

fn main() -> noisy_teleport::Result<()> {
    let mut args = std::env::args().skip(1);
    let max_n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(14);
    let trajectories: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);
    println!("{:>3} {:>10} {:>10} {:>10}", "n", "F", "sem", "F_oracle");
    for n in 3..=max_n {
        let config = ExperimentConfig::new(n, 0.5).with_trajectories(trajectories);
        let stats = run_experiment(&config)?;
        let oracle = if n <= ORACLE_MAX_QUBITS {
            format!("{:.6}", run_protocol_density(&config)?)
        } else {
            "-".to_string()
        };
        println!("{n:>3} {:>10.6} {:>10.6} {oracle:>10}", stats.mean_fidelity, stats.sem);
    }
    Ok(())
}
