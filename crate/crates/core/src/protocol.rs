//! Teleportation through a damped swap chain, one trajectory at a time.
//!
//! Qubits 1 and 0 start as the Bell pair `(|00> + |11>)/sqrt(2)`, the other
//! `n - 2` qubits in a random-phase product of equal moduli. Swaps
//! `(1,2), (2,3), ..., (n-2, n-1)` walk one member of the pair to qubit
//! `n - 1` (Bob), each followed by one interval of damping. The target state
//! is then teleported from an ancilla through Alice's qubit 0.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{default_substeps, evolve_interval, NoJumpForm, NoiseModel};
use crate::state::{QubitState, ReducedState, SingleQubitOperator, StateVector, MAX_QUBITS};

pub const DEFAULT_TRAJECTORIES: usize = 400;
pub const DEFAULT_SEED: u64 = 2003;

/// ChaCha stream reserved for initial-state phases; trajectory `i` uses
/// stream `i`.
const PREPARATION_STREAM: u64 = u64::MAX;

/// Order of gate and damping inside each of the `n - 2` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    GateThenDamp,
    DampThenGate,
}

/// How the four Bell-measurement outcomes enter a trajectory's fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutcomeMode {
    /// Probability-weighted sum over all four outcomes.
    #[default]
    Averaged,
    /// One outcome drawn from the trajectory's random stream.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Chain length `n` (Alice's pair plus relay qubits).
    pub num_qubits: usize,
    /// Dimensionless damping rate per swap interval.
    pub gamma: f64,
    pub trajectories: usize,
    /// Monte Carlo steps per swap interval.
    pub substeps: usize,
    /// State to teleport.
    pub psi: QubitState,
    pub master_seed: u64,
    /// Also run the density-matrix oracle (honoured by the sweep runner).
    pub use_oracle: bool,
    pub schedule: Schedule,
    pub outcomes: OutcomeMode,
    pub no_jump: NoJumpForm,
    /// Keep every per-trajectory fidelity in the returned stats.
    pub retain_fidelities: bool,
    /// Worker-thread cap; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(num_qubits: usize, gamma: f64) -> Self {
        Self {
            num_qubits,
            gamma,
            trajectories: DEFAULT_TRAJECTORIES,
            substeps: default_substeps(gamma.max(0.0)),
            psi: QubitState::plus(),
            master_seed: DEFAULT_SEED,
            use_oracle: false,
            schedule: Schedule::default(),
            outcomes: OutcomeMode::default(),
            no_jump: NoJumpForm::default(),
            retain_fidelities: false,
            workers: None,
        }
    }

    pub fn with_trajectories(mut self, trajectories: usize) -> Self {
        self.trajectories = trajectories;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_psi(mut self, psi: QubitState) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 3 {
            return Err(Error::Config(format!(
                "chain needs at least 3 qubits (Bell pair plus a relay), got {}",
                self.num_qubits
            )));
        }
        if self.num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(self.num_qubits));
        }
        if self.trajectories == 0 {
            return Err(Error::Config("trajectory count must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be >= 1".into()));
        }
        QubitState::new(self.psi.alpha, self.psi.beta)?;
        self.noise_model()?;
        Ok(())
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        Ok(NoiseModel::new(self.gamma, self.substeps)?.with_no_jump_form(self.no_jump))
    }
}

/// Ensemble estimate over trajectories `0..n_traj`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub mean_fidelity: f64,
    /// Standard error of the mean (sample standard deviation over sqrt(N)).
    pub sem: f64,
    pub n_traj: usize,
    pub fidelities: Option<Vec<f64>>,
    pub mean_jump_count: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOutcome {
    pub fidelity: f64,
    pub jumps: usize,
}

/// Random stream for trajectory `index` under `master_seed`.
///
/// All streams share the ChaCha key expanded from `master_seed` and differ
/// in the 64-bit stream id, so they never overlap and do not depend on how
/// trajectories are scheduled.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Stream that draws the initial-state phases. Every trajectory and the
/// density-matrix oracle start from the same state for a given seed.
pub fn preparation_rng(master_seed: u64) -> ChaCha8Rng {
    trajectory_rng(master_seed, PREPARATION_STREAM)
}

/// Builds `sum_r c_r |r> (x) (|00> + |11>)/sqrt(2)` with `|c_r| = 2^{-(n-2)/2}`
/// and i.i.d. uniform phases drawn in ascending `r`.
pub fn prepare_initial_chain<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<StateVector> {
    if num_qubits < 3 {
        return Err(Error::Config(format!("chain needs at least 3 qubits, got {num_qubits}")));
    }
    let mut state = StateVector::new_basis_state(num_qubits, 0)?;
    let relays = 1usize << (num_qubits - 2);
    let modulus = (relays as f64).sqrt().recip() * FRAC_1_SQRT_2;
    let amps = state.amplitudes_mut();
    amps[0] = Complex64::new(0.0, 0.0);
    for r in 0..relays {
        let theta = TAU * rng.random::<f64>();
        let c = Complex64::from_polar(modulus, theta);
        amps[r << 2] = c;
        amps[(r << 2) | 0b11] = c;
    }
    Ok(state)
}

/// Swaps `(g, g+1)` for `g = 1..=n-2`, each paired with one interval of
/// damping. Returns the jump count.
pub fn run_swap_chain<R: Rng + ?Sized>(
    state: &mut StateVector,
    model: &NoiseModel,
    schedule: Schedule,
    rng: &mut R,
) -> Result<usize> {
    let n = state.num_qubits();
    if n < 3 {
        return Err(Error::Config(format!("chain needs at least 3 qubits, got {n}")));
    }
    let mut jumps = 0;
    for g in 1..n - 1 {
        match schedule {
            Schedule::GateThenDamp => {
                state.apply_swap(g, g + 1)?;
                jumps += evolve_interval(state, model, rng)?;
            }
            Schedule::DampThenGate => {
                jumps += evolve_interval(state, model, rng)?;
                state.apply_swap(g, g + 1)?;
            }
        }
    }
    Ok(jumps)
}

/// One Bell-measurement branch: outcome probability and Bob's corrected,
/// normalized state (or `None` when the branch has zero weight).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportBranch {
    pub ancilla_bit: bool,
    pub alice_bit: bool,
    pub probability: f64,
    pub bob: Option<ReducedState>,
}

/// Pauli correction on Bob's qubit for outcome `(m_T, m_A)`: X if Alice's
/// bit is set, then Z if the ancilla's bit is set.
pub fn correction(ancilla_bit: bool, alice_bit: bool) -> SingleQubitOperator {
    let x = if alice_bit { SingleQubitOperator::PAULI_X } else { SingleQubitOperator::IDENTITY };
    let z = if ancilla_bit { SingleQubitOperator::PAULI_Z } else { SingleQubitOperator::IDENTITY };
    z.then_after(&x)
}

/// Runs the teleportation circuit on a post-chain state and returns the
/// four measurement branches.
///
/// The ancilla `T` carrying `psi` is qubit `n`; the circuit is CNOT(T -> 0),
/// H(T), measurement of `T` and 0, correction on Bob (`n - 1`). The
/// extended register is never materialized: after the two gates its
/// amplitude is `(psi_0 c_b + (-1)^{m_T} psi_1 c_{b^1}) / sqrt(2)`, which is
/// evaluated on the fly while accumulating Bob's conditional density matrix.
pub fn teleport_branches(state: &StateVector, psi: &QubitState) -> Result<[TeleportBranch; 4]> {
    let n = state.num_qubits();
    if n < 2 {
        return Err(Error::Config("teleportation needs Alice's and Bob's qubits".into()));
    }
    QubitState::new(psi.alpha, psi.beta)?;
    let amps = state.amplitudes();
    let bob = 1usize << (n - 1);
    let a0 = psi.alpha * FRAC_1_SQRT_2;
    let a1 = psi.beta * FRAC_1_SQRT_2;

    let mut branches = [TeleportBranch {
        ancilla_bit: false,
        alice_bit: false,
        probability: 0.0,
        bob: None,
    }; 4];
    for (slot, branch) in branches.iter_mut().enumerate() {
        let ancilla_bit = slot & 0b10 != 0;
        let alice_bit = slot & 0b01 != 0;
        let sign = if ancilla_bit { -a1 } else { a1 };
        let amplitude = |b: usize| a0 * amps[b] + sign * amps[b ^ 1];

        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        let alice = alice_bit as usize;
        for b in (alice..bob).step_by(2) {
            let lo = amplitude(b);
            let hi = amplitude(b | bob);
            rho[0][0] += lo * lo.conj();
            rho[0][1] += lo * hi.conj();
            rho[1][0] += hi * lo.conj();
            rho[1][1] += hi * hi.conj();
        }
        let unnormalized = ReducedState(rho);
        let probability = unnormalized.trace().re;
        let bob_state = (probability > 0.0).then(|| {
            unnormalized.conjugate_by(&correction(ancilla_bit, alice_bit)).scaled(probability.recip())
        });
        *branch = TeleportBranch { ancilla_bit, alice_bit, probability, bob: bob_state };
    }
    Ok(branches)
}

/// Outcome-averaged teleportation fidelity `sum_m p_m <psi|rho_B^(m)|psi>`.
pub fn teleport_fidelity(state: &StateVector, psi: &QubitState) -> Result<f64> {
    let mut fidelity = 0.0;
    for branch in teleport_branches(state, psi)? {
        if let Some(rho) = branch.bob {
            fidelity += branch.probability * rho.expectation(psi).re;
        }
    }
    Ok(fidelity.clamp(0.0, 1.0))
}

/// Fidelity of a single measurement outcome drawn with uniform `u`.
pub fn teleport_fidelity_sampled(state: &StateVector, psi: &QubitState, u: f64) -> Result<f64> {
    let branches = teleport_branches(state, psi)?;
    let mut upper = 0.0;
    let mut chosen = None;
    for branch in branches.iter().filter(|b| b.bob.is_some()) {
        upper += branch.probability;
        chosen = Some(branch);
        if u < upper {
            break;
        }
    }
    let branch = chosen.ok_or(Error::Unnormalized(0.0))?;
    let rho = branch.bob.expect("filtered on weight");
    Ok(rho.expectation(psi).re.clamp(0.0, 1.0))
}

/// Initial state plus noisy delivery for trajectory `index`; returns the
/// post-chain state, the jump count and the stream (positioned after the
/// chain) for any remaining draws.
pub fn run_chain(config: &ExperimentConfig, index: u64) -> Result<(StateVector, usize, ChaCha8Rng)> {
    let model = config.noise_model()?;
    let mut state = prepare_initial_chain(config.num_qubits, &mut preparation_rng(config.master_seed))?;
    let mut rng = trajectory_rng(config.master_seed, index);
    let jumps = run_swap_chain(&mut state, &model, config.schedule, &mut rng)?;
    Ok((state, jumps, rng))
}

/// One full trajectory; deterministic in `(config, index)`.
pub fn run_trajectory(config: &ExperimentConfig, index: u64) -> Result<TrajectoryOutcome> {
    let (state, jumps, mut rng) = run_chain(config, index)?;
    let fidelity = match config.outcomes {
        OutcomeMode::Averaged => teleport_fidelity(&state, &config.psi)?,
        OutcomeMode::Sampled => teleport_fidelity_sampled(&state, &config.psi, rng.random())?,
    };
    Ok(TrajectoryOutcome { fidelity, jumps })
}

/// Runs trajectories `0..trajectories` and reduces them in index order, so
/// the result does not depend on the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TrajectoryStats> {
    config.validate()?;
    let count = config.trajectories as u64;
    let work = || -> Result<Vec<TrajectoryOutcome>> {
        (0..count).into_par_iter().map(|i| run_trajectory(config, i)).collect()
    };
    let outcomes = match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let fidelities: Vec<f64> = outcomes.iter().map(|o| o.fidelity).collect();
    let (mean_fidelity, sem) = mean_and_sem(&fidelities);
    let total_jumps: usize = outcomes.iter().map(|o| o.jumps).sum();
    Ok(TrajectoryStats {
        mean_fidelity: mean_fidelity.clamp(0.0, 1.0),
        sem,
        n_traj: fidelities.len(),
        mean_jump_count: total_jumps as f64 / fidelities.len() as f64,
        fidelities: config.retain_fidelities.then_some(fidelities),
    })
}

/// Neumaier-compensated sum in slice order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Mean and standard error, computed on values shifted by the first one so
/// an ensemble of identical values gives exactly that value and zero error.
pub fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let Some(&pivot) = values.first() else {
        return (f64::NAN, f64::NAN);
    };
    let n = values.len() as f64;
    let mean_shift = compensated_sum(values.iter().map(|v| v - pivot)) / n;
    let mean = pivot + mean_shift;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sum_sq = compensated_sum(values.iter().map(|v| {
        let d = v - pivot - mean_shift;
        d * d
    }));
    let std = (sum_sq / (n - 1.0)).sqrt();
    (mean, std / n.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Literal circuit on the extended register, used to cross-check the
    /// streamed branches.
    fn literal_branches(state: &StateVector, psi: &QubitState) -> Vec<(f64, Option<ReducedState>)> {
        let n = state.num_qubits();
        let mut ext = state.extended_with(psi).unwrap();
        ext.apply_cnot(n, 0).unwrap();
        ext.apply_single(n, &SingleQubitOperator::hadamard()).unwrap();
        let mut out = Vec::new();
        for m_t in [false, true] {
            for m_a in [false, true] {
                let (p_t, after_t) = ext.project_qubit(n, m_t).unwrap();
                let (_, mut after) = after_t.project_qubit(0, m_a).unwrap();
                let p = after.norm_sqr();
                let _ = p_t;
                if p == 0.0 {
                    out.push((0.0, None));
                    continue;
                }
                after.normalize();
                after.apply_single(n - 1, &correction(m_t, m_a)).unwrap();
                out.push((p, Some(after.reduce_to_qubit(n - 1).unwrap())));
            }
        }
        out
    }

    fn bell_on_ends(n: usize) -> StateVector {
        let mut amps = vec![c(0.0); 1 << n];
        amps[0] = c(FRAC_1_SQRT_2);
        amps[(1 << (n - 1)) | 1] = c(FRAC_1_SQRT_2);
        StateVector::from_amplitudes(amps).unwrap()
    }

    fn arb_psi() -> impl Strategy<Value = QubitState> {
        (0.0f64..std::f64::consts::PI, 0.0f64..TAU, 0.0f64..TAU).prop_map(|(t, p, g)| {
            QubitState::new(
                Complex64::from_polar((t / 2.0).cos(), g),
                Complex64::from_polar((t / 2.0).sin(), g + p),
            )
            .unwrap()
        })
    }

    #[test]
    fn initial_chain_structure() {
        let mut rng = preparation_rng(1);
        let s = prepare_initial_chain(3, &mut rng).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        for r in 0..2usize {
            let a = s.amplitudes()[r << 2];
            assert!((a.norm() - 0.5).abs() < 1e-15, "|c_r|/sqrt2 = 1/2 at n = 3");
            assert_eq!(a, s.amplitudes()[(r << 2) | 3]);
            assert_eq!(s.amplitudes()[(r << 2) | 1], c(0.0));
        }
        for n in 3..=9 {
            let s = prepare_initial_chain(n, &mut preparation_rng(n as u64)).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let rho = s.reduce_to_qubit(0).unwrap();
            assert!(rho.max_abs_diff(&ReducedState::maximally_mixed()) < 1e-12);
        }
        assert!(prepare_initial_chain(2, &mut preparation_rng(0)).is_err());
    }

    #[test]
    fn noiseless_chain_reaches_final_arrangement() {
        // |i3 i2 e e> -> |e i3 i2 e>
        let n = 4;
        let mut s = prepare_initial_chain(n, &mut preparation_rng(9)).unwrap();
        let initial = s.clone();
        let model = NoiseModel::new(0.0, 100).unwrap();
        run_swap_chain(&mut s, &model, Schedule::GateThenDamp, &mut trajectory_rng(9, 0)).unwrap();
        for r in 0..4usize {
            let (i3, i2) = (r >> 1 & 1, r & 1);
            for e in 0..2usize {
                let before = initial.amplitudes()[(r << 2) | (e << 1) | e];
                let after = s.amplitudes()[(e << 3) | (i3 << 2) | (i2 << 1) | e];
                assert_eq!(before, after);
            }
        }
        assert!((teleport_fidelity(&s, &QubitState::plus()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_bell_pair_teleports_perfectly() {
        let psi = QubitState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        for n in 2..=6 {
            let f = teleport_fidelity(&bell_on_ends(n), &psi).unwrap();
            assert!((f - 1.0).abs() < 1e-12, "n = {n}: {f}");
        }
    }

    #[test]
    fn fully_damped_pair_gives_fourth_powers() {
        let ground = StateVector::new_basis_state(3, 0).unwrap();
        let f = teleport_fidelity(&ground, &QubitState::plus()).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
        let psi = QubitState::new(c(0.6), Complex64::new(0.0, 0.8)).unwrap();
        let f = teleport_fidelity(&ground, &psi).unwrap();
        assert!((f - (0.6f64.powi(4) + 0.8f64.powi(4))).abs() < 1e-12);
    }

    #[test]
    fn streamed_branches_match_literal_circuit() {
        for seed in 0..5u64 {
            let mut config = ExperimentConfig::new(5, 1.5).with_seed(seed);
            config.substeps = 150;
            let (state, _, _) = run_chain(&config, 3).unwrap();
            let psi = QubitState::new(Complex64::new(0.3, 0.1), Complex64::from_polar((0.9f64).sqrt(), 1.1)).unwrap();
            let streamed = teleport_branches(&state, &psi).unwrap();
            let literal = literal_branches(&state, &psi);
            let mut total = 0.0;
            for (s, (p, rho)) in streamed.iter().zip(&literal) {
                assert!((s.probability - p).abs() < 1e-12);
                total += s.probability;
                match (s.bob, rho) {
                    (Some(a), Some(b)) => assert!(a.max_abs_diff(b) < 1e-12),
                    (None, None) => {}
                    other => panic!("branch mismatch {other:?}"),
                }
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_mode_picks_a_branch() {
        let state = bell_on_ends(4);
        for u in [0.0, 0.3, 0.6, 0.99999] {
            let f = teleport_fidelity_sampled(&state, &QubitState::plus(), u).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
        let config = ExperimentConfig { outcomes: OutcomeMode::Sampled, ..ExperimentConfig::new(4, 0.5) }
            .with_trajectories(50);
        let stats = run_experiment(&config).unwrap();
        assert!(stats.mean_fidelity > 0.5 && stats.mean_fidelity <= 1.0);
    }

    #[test]
    fn noiseless_trajectories_are_exact() {
        for n in [3, 4, 7, 10] {
            let config = ExperimentConfig::new(n, 0.0).with_trajectories(3).with_seed(n as u64);
            for i in 0..3 {
                let out = run_trajectory(&config, i).unwrap();
                assert!((out.fidelity - 1.0).abs() < 1e-12);
                assert_eq!(out.jumps, 0);
            }
            let stats = run_experiment(&config).unwrap();
            assert!((stats.mean_fidelity - 1.0).abs() < 1e-12);
            assert_eq!(stats.sem, 0.0);
        }
    }

    #[test]
    fn trajectories_are_reproducible() {
        let config = ExperimentConfig::new(6, 0.8).with_seed(42);
        let a = run_trajectory(&config, 17).unwrap();
        let b = run_trajectory(&config, 17).unwrap();
        assert_eq!(a.fidelity.to_bits(), b.fidelity.to_bits());
        assert_eq!(a.jumps, b.jumps);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut config = ExperimentConfig::new(5, 0.7).with_trajectories(64).with_seed(5);
        config.retain_fidelities = true;
        let reference = run_experiment(&ExperimentConfig { workers: Some(1), ..config.clone() }).unwrap();
        for workers in [2, 3, 8] {
            let other = run_experiment(&ExperimentConfig { workers: Some(workers), ..config.clone() }).unwrap();
            assert_eq!(other, reference);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(2, 0.5).validate().is_err());
        assert!(ExperimentConfig::new(27, 0.5).validate().is_err());
        assert!(ExperimentConfig::new(4, 0.5).with_trajectories(0).validate().is_err());
        assert!(ExperimentConfig::new(4, -1.0).validate().is_err());
        let bad_psi = QubitState { alpha: c(1.0), beta: c(1.0) };
        assert!(ExperimentConfig::new(4, 0.5).with_psi(bad_psi).validate().is_err());
        assert!(ExperimentConfig::new(4, 0.5).validate().is_ok());
    }

    #[test]
    fn mean_and_sem_basics() {
        assert_eq!(mean_and_sem(&[0.3; 7]), (0.3, 0.0));
        assert_eq!(mean_and_sem(&[0.25]), (0.25, 0.0));
        let (m, s) = mean_and_sem(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        assert!((s - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn heavy_damping_empties_the_chain() {
        let config = ExperimentConfig::new(3, 50.0).with_trajectories(20);
        for i in 0..20 {
            let (state, _, _) = run_chain(&config, i).unwrap();
            // pure states: trace distance to |0> is sqrt(1 - |<0|phi>|^2)
            let overlap = state.amplitudes()[0].norm_sqr();
            assert!((1.0 - overlap).max(0.0).sqrt() < 0.01);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn branch_probabilities_sum_to_one(psi in arb_psi(), seed in 0u64..1000, gamma in 0.0f64..3.0) {
            let config = ExperimentConfig::new(4, gamma).with_seed(seed);
            let (state, _, _) = run_chain(&config, seed).unwrap();
            let total: f64 = teleport_branches(&state, &psi).unwrap().iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
        }

        #[test]
        fn fidelity_ignores_global_phase(psi in arb_psi(), theta in 0.0f64..TAU, seed in 0u64..1000) {
            let config = ExperimentConfig::new(4, 1.0).with_seed(seed);
            let (state, _, _) = run_chain(&config, 0).unwrap();
            let f = teleport_fidelity(&state, &psi).unwrap();
            let g = teleport_fidelity(&state, &psi.with_global_phase(theta)).unwrap();
            prop_assert!((f - g).abs() < 1e-14);
        }
    }
}
