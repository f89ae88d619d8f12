//! Chain lengths far beyond the density-matrix oracle: times one trajectory
//! and a small ensemble, and reports peak resident memory.
//!
//! cargo run --release --example scale_demo -- [n] [trajectories]

use std::time::Instant;

use noisy_teleport::{run_experiment, run_protocol_density, run_trajectory, ExperimentConfig};

fn peak_rss_mib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let kib: u64 = status.lines().find(|l| l.starts_with("VmHWM:"))?.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib / 1024)
}

fn main() -> noisy_teleport::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let trajectories: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let config = ExperimentConfig::new(n, 0.5).with_trajectories(trajectories);

    let started = Instant::now();
    let one = run_trajectory(&config, 0)?;
    println!("n = {n}: one trajectory F = {:.4} with {} jumps in {:.2?}", one.fidelity, one.jumps, started.elapsed());

    let started = Instant::now();
    let stats = run_experiment(&config)?;
    println!(
        "{trajectories} trajectories: F = {:.4} +- {:.4}, {:.1} jumps each, {:.2?}",
        stats.mean_fidelity,
        stats.sem,
        stats.mean_jump_count,
        started.elapsed()
    );
    if let Some(mib) = peak_rss_mib() {
        println!("peak resident memory {mib} MiB");
    }
    match run_protocol_density(&config) {
        Ok(f) => println!("oracle F = {f:.6}"),
        Err(e) => println!("oracle: {e}"),
    }
    Ok(())
}
