//! Samples single Monte Carlo sub-steps from |1011> and compares the jump
//! frequencies with the channel's Kraus weights, then checks the decay law
//! of one excited qubit against exp(-gamma t).
//!
//! cargo run --release --example channel_reconstruction

use noisy_teleport::noise::{evolve_for, jump_probabilities, mcwf_step, StepOutcome};
use noisy_teleport::{NoiseModel, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> noisy_teleport::Result<()> {
    let model = NoiseModel::new(3.0, 1000)?;
    let start = StateVector::new_basis_state(4, 0b1011)?;
    let table = jump_probabilities(&start, &model);
    println!("gamma dt = {}, predicted per-qubit jump probabilities {:?}", model.gamma_dt(), table.per_qubit);

    let samples = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = [0usize; 4];
    for _ in 0..samples {
        let mut s = start.clone();
        if let StepOutcome::Jump(k) = mcwf_step(&mut s, &model, rng.random())? {
            counts[k] += 1;
        }
    }
    for (k, &c) in counts.iter().enumerate() {
        let p = table.per_qubit[k];
        let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
        println!("qubit {k}: {c:>5} jumps, expected {:>7.1} +- {sigma:.1}", samples as f64 * p);
    }

    let gamma = 1.0;
    let model = NoiseModel::new(gamma, 1000)?;
    for t in [0.5, 1.0, 2.0] {
        let runs = 20_000;
        let mut survived = 0;
        for _ in 0..runs {
            let mut s = StateVector::new_basis_state(1, 1)?;
            evolve_for(&mut s, &model, t, &mut rng)?;
            if s.amplitudes()[1].norm_sqr() > 0.5 {
                survived += 1;
            }
        }
        println!("t = {t}: survival {:.4}, exp(-gamma t) = {:.4}", survived as f64 / runs as f64, (-gamma * t).exp());
    }
    Ok(())
}
