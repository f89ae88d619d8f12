//! Follows one trajectory gate by gate: excited population and jumps after
//! each swap interval, then the four Bell branches at the end.
//!
//! cargo run --release --example single_trajectory -- [n] [gamma] [index]

use noisy_teleport::noise::{evolve_interval, excited_population};
use noisy_teleport::protocol::{
    preparation_rng, prepare_initial_chain, teleport_branches, teleport_fidelity, trajectory_rng,
};
use noisy_teleport::state::pure_fidelity;
use noisy_teleport::ExperimentConfig;

fn arg<T: std::str::FromStr>(pos: usize, default: T) -> T {
    std::env::args().nth(pos).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> noisy_teleport::Result<()> {
    let n: usize = arg(1, 6);
    let gamma: f64 = arg(2, 0.5);
    let index: u64 = arg(3, 0);
    let config = ExperimentConfig::new(n, gamma);
    let model = config.noise_model()?;
    println!("n = {n}, gamma = {gamma}, {} sub-steps per interval, trajectory {index}", model.substeps());

    let mut state = prepare_initial_chain(n, &mut preparation_rng(config.master_seed))?;
    let mut rng = trajectory_rng(config.master_seed, index);
    println!("start            excited population {:.4}", excited_population(&state));
    for g in 1..n - 1 {
        state.apply_swap(g, g + 1)?;
        let jumps = evolve_interval(&mut state, &model, &mut rng)?;
        println!("swap ({g},{}) + tau  excited population {:.4}, jumps {jumps}", g + 1, excited_population(&state));
    }

    for branch in teleport_branches(&state, &config.psi)? {
        let fidelity = match &branch.bob {
            Some(bob) => format!("{:.4}", pure_fidelity(bob, &config.psi)?),
            None => "-".to_string(),
        };
        println!(
            "outcome m_T={} m_A={}: p = {:.4}, fidelity = {fidelity}",
            u8::from(branch.ancilla_bit),
            u8::from(branch.alice_bit),
            branch.probability
        );
    }
    println!("outcome-averaged fidelity {:.6}", teleport_fidelity(&state, &config.psi)?);
    Ok(())
}
