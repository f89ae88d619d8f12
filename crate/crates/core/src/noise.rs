//! Generalized amplitude damping on a qubit register, unravelled into
//! quantum jumps.
//!
//! Every basis state with `m >= 1` excited qubits decays at total rate
//! `gamma`, the decay split equally between its excited qubits. The jump
//! operators realising this are `L_k = sqrt(gamma) * sigma_k^- * N^(-1/2)`
//! with `N` the excitation-number operator, so that
//! `sum_k L_k^dag L_k = gamma * P(m >= 1)`. The no-jump generator is then
//! proportional to a projector and is applied in closed form.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::state::{StateVector, MAX_QUBITS};

/// Hard ceiling on `gamma * dt`.
pub const MAX_GAMMA_DT: f64 = 0.05;
/// Above this `gamma * dt` a warning is logged.
pub const WARN_GAMMA_DT: f64 = 0.01;

const MIN_JUMP_NORM: f64 = 1e-14;

/// How the no-jump branch damps the excited subspace during one sub-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoJumpForm {
    /// `exp(-gamma dt / 2)`, exact for this channel.
    #[default]
    Exact,
    /// `1 - gamma dt / 2`, the first-order propagator `1 - i H_eff dt`.
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    gamma: f64,
    substeps: usize,
    no_jump: NoJumpForm,
}

impl NoiseModel {
    /// Damping rate `gamma` (per swap interval) resolved into `substeps`
    /// Monte Carlo steps per interval.
    pub fn new(gamma: f64, substeps: usize) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::NoiseModel(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        if substeps == 0 {
            return Err(Error::NoiseModel("substeps must be >= 1".into()));
        }
        let gamma_dt = gamma / substeps as f64;
        if gamma_dt > MAX_GAMMA_DT {
            return Err(Error::NoiseModel(format!(
                "gamma*dt = {gamma_dt} exceeds {MAX_GAMMA_DT}; raise substeps"
            )));
        }
        if gamma_dt > WARN_GAMMA_DT {
            log::warn!("gamma*dt = {gamma_dt:.4} is above {WARN_GAMMA_DT}; time-step bias may be visible");
        }
        Ok(Self { gamma, substeps, no_jump: NoJumpForm::Exact })
    }

    /// Uses [`default_substeps`].
    pub fn with_default_substeps(gamma: f64) -> Result<Self> {
        let substeps = if gamma.is_finite() && gamma >= 0.0 { default_substeps(gamma) } else { 1 };
        Self::new(gamma, substeps)
    }

    pub fn with_no_jump_form(mut self, form: NoJumpForm) -> Self {
        self.no_jump = form;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn no_jump_form(&self) -> NoJumpForm {
        self.no_jump
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.substeps as f64
    }

    pub fn gamma_dt(&self) -> f64 {
        self.gamma / self.substeps as f64
    }

    /// Amplitude factor applied to every excited component in a no-jump step.
    pub fn no_jump_factor(&self) -> f64 {
        match self.no_jump {
            NoJumpForm::Exact => (-0.5 * self.gamma_dt()).exp(),
            NoJumpForm::FirstOrder => 1.0 - 0.5 * self.gamma_dt(),
        }
    }
}

/// `max(100 * ceil(gamma), 100)`, which keeps `gamma * dt <= 0.01`.
pub fn default_substeps(gamma: f64) -> usize {
    ((100.0 * gamma.ceil()) as usize).max(100)
}

/// Per-qubit jump probabilities for one sub-step.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTable {
    pub per_qubit: Vec<f64>,
    pub total: f64,
}

impl JumpTable {
    fn from_weights(weights: &[f64], scale: f64) -> Self {
        let per_qubit: Vec<f64> = weights.iter().map(|w| scale * w).collect();
        let total = per_qubit.iter().sum();
        Self { per_qubit, total }
    }

    /// Qubit whose bracket contains `u`, scanning in ascending order with
    /// closed upper edges. `None` means no jump.
    pub fn select(&self, u: f64) -> Option<usize> {
        select_bracket(self.per_qubit.iter().copied(), u)
    }
}

fn select_bracket(probabilities: impl Iterator<Item = f64>, u: f64) -> Option<usize> {
    let mut upper = 0.0;
    for (k, p) in probabilities.enumerate() {
        if p <= 0.0 {
            continue;
        }
        upper += p;
        if u <= upper {
            return Some(k);
        }
    }
    None
}

/// What a single Monte Carlo step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    NoJump,
    Jump(usize),
}

fn inv_sqrt_excitations() -> [f64; MAX_QUBITS + 1] {
    let mut table = [0.0; MAX_QUBITS + 1];
    for (m, slot) in table.iter_mut().enumerate().skip(1) {
        *slot = (m as f64).sqrt().recip();
    }
    table
}

/// `w_k = <L_k^dag L_k> / gamma`: the weight of every basis component with
/// qubit `k` excited, divided by its excitation count.
pub fn excitation_weights(state: &StateVector) -> Vec<f64> {
    let mut weights = vec![0.0; state.num_qubits()];
    let mut inv_m = [0.0; MAX_QUBITS + 1];
    for (m, slot) in inv_m.iter_mut().enumerate().skip(1) {
        *slot = (m as f64).recip();
    }
    for (b, c) in state.amplitudes().iter().enumerate().skip(1) {
        let p = c.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let share = p * inv_m[b.count_ones() as usize];
        let mut bits = b;
        while bits != 0 {
            weights[bits.trailing_zeros() as usize] += share;
            bits &= bits - 1;
        }
    }
    weights
}

/// Total weight on basis states with at least one excited qubit.
pub fn excited_population(state: &StateVector) -> f64 {
    state.amplitudes().iter().skip(1).map(|c| c.norm_sqr()).sum()
}

pub fn jump_probabilities(state: &StateVector, model: &NoiseModel) -> JumpTable {
    JumpTable::from_weights(&excitation_weights(state), model.gamma_dt())
}

/// Replaces the state by `L_k|phi> / ||L_k|phi>||`.
pub fn apply_jump(state: &mut StateVector, k: usize) -> Result<()> {
    let num_qubits = state.num_qubits();
    if k >= num_qubits {
        return Err(Error::QubitOutOfRange { qubit: k, num_qubits });
    }
    let inv_sqrt = inv_sqrt_excitations();
    let bit = 1usize << k;
    let amps = state.amplitudes_mut();

    let norm_sqr: f64 = (0..amps.len())
        .filter(|b| b & bit != 0)
        .map(|b| amps[b].norm_sqr() * inv_sqrt[b.count_ones() as usize].powi(2))
        .sum();
    let norm = norm_sqr.sqrt();
    if norm < MIN_JUMP_NORM {
        return Err(Error::ImpossibleJump(k));
    }
    let inv_norm = norm.recip();
    for lo in 0..amps.len() {
        if lo & bit != 0 {
            continue;
        }
        let hi = lo | bit;
        amps[lo] = amps[hi] * (inv_sqrt[hi.count_ones() as usize] * inv_norm);
        amps[hi] = Complex64::new(0.0, 0.0);
    }
    Ok(())
}

/// One no-jump sub-step: excited components damped, then renormalized.
pub fn apply_no_jump(state: &mut StateVector, model: &NoiseModel) {
    let factor = model.no_jump_factor();
    if factor == 1.0 {
        return;
    }
    state.amplitudes_mut().iter_mut().skip(1).for_each(|c| *c *= factor);
    state.normalize();
}

/// A single Monte Carlo wave-function step driven by the uniform draw `u`.
pub fn mcwf_step(state: &mut StateVector, model: &NoiseModel, u: f64) -> Result<StepOutcome> {
    let table = jump_probabilities(state, model);
    match table.select(u) {
        Some(k) => {
            apply_jump(state, k)?;
            Ok(StepOutcome::Jump(k))
        }
        None => {
            apply_no_jump(state, model);
            Ok(StepOutcome::NoJump)
        }
    }
}

/// Runs one swap interval (`substeps` Monte Carlo steps). Returns the number
/// of jumps.
pub fn evolve_interval<R: Rng + ?Sized>(
    state: &mut StateVector,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<usize> {
    evolve_steps(state, model, model.substeps(), rng)
}

/// Runs `steps` Monte Carlo steps, one uniform draw each.
///
/// Equivalent to calling [`mcwf_step`] repeatedly, but between jumps the
/// excited subspace only picks up a common scale factor, so the per-qubit
/// weights are reused and the amplitudes are touched only at jumps and at
/// the end.
pub fn evolve_steps<R: Rng + ?Sized>(
    state: &mut StateVector,
    model: &NoiseModel,
    steps: usize,
    rng: &mut R,
) -> Result<usize> {
    let gamma_dt = model.gamma_dt();
    let factor = model.no_jump_factor();

    let mut weights = excitation_weights(state);
    let mut ground = state.amplitudes()[0].norm_sqr();
    let mut excited: f64 = weights.iter().sum();
    // amplitude scale pending on the excited subspace
    let mut scale = 1.0f64;
    let mut jumps = 0;

    for _ in 0..steps {
        let u: f64 = rng.random();
        if excited == 0.0 {
            continue;
        }
        let scale_sq = scale * scale;
        let coeff = gamma_dt * scale_sq / (ground + scale_sq * excited);
        match select_bracket(weights.iter().map(|w| coeff * w), u) {
            Some(k) => {
                // L_k only sees excited components, so the pending scale
                // cancels in the renormalization
                apply_jump(state, k)?;
                jumps += 1;
                scale = 1.0;
                weights = excitation_weights(state);
                ground = state.amplitudes()[0].norm_sqr();
                excited = weights.iter().sum();
            }
            None => scale *= factor,
        }
    }

    if scale != 1.0 {
        state.amplitudes_mut().iter_mut().skip(1).for_each(|c| *c *= scale);
        state.normalize();
    }
    Ok(jumps)
}

/// Runs the channel for a duration measured in swap intervals.
pub fn evolve_for<R: Rng + ?Sized>(
    state: &mut StateVector,
    model: &NoiseModel,
    duration: f64,
    rng: &mut R,
) -> Result<usize> {
    let steps = (duration * model.substeps() as f64).round() as usize;
    evolve_steps(state, model, steps, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_reference::{dense_lindblad_operators, expectation, DenseExt, DenseMatrix};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn state(amps: &[Complex64]) -> StateVector {
        StateVector::from_amplitudes(amps.to_vec()).unwrap()
    }

    fn basis(n: usize, b: usize) -> StateVector {
        StateVector::new_basis_state(n, b).unwrap()
    }

    fn model(gamma_dt: f64) -> NoiseModel {
        // one interval of length 1 split into 1/gamma_dt... keep substeps = 1000
        NoiseModel::new(gamma_dt * 1000.0, 1000).unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(NoiseModel::new(-0.1, 100).is_err());
        assert!(NoiseModel::new(f64::NAN, 100).is_err());
        assert!(NoiseModel::new(0.5, 0).is_err());
        assert!(NoiseModel::new(6.0, 100).is_err());
        assert!(NoiseModel::new(5.0, 100).is_ok());
        assert_eq!(default_substeps(0.0), 100);
        assert_eq!(default_substeps(0.5), 100);
        assert_eq!(default_substeps(2.0), 200);
        assert_eq!(default_substeps(2.1), 300);
        assert!(NoiseModel::with_default_substeps(50.0).unwrap().gamma_dt() <= 0.01);
    }

    #[test]
    fn weights_on_basis_states() {
        let w = excitation_weights(&basis(4, 0b1011));
        let third = 1.0 / 3.0;
        assert_eq!(w.len(), 4);
        for (k, expected) in [(0, third), (1, third), (2, 0.0), (3, third)] {
            assert!((w[k] - expected).abs() < 1e-15, "w_{k} = {}", w[k]);
        }
        assert!(excitation_weights(&basis(4, 0)).iter().all(|&w| w == 0.0));
    }

    #[test]
    fn weights_match_dense_expectations() {
        let h = c(FRAC_1_SQRT_2);
        let s = state(&[c(0.0), h, h, c(0.0)]);
        let ops = dense_lindblad_operators(2, 1.0);
        let w = excitation_weights(&s);
        for (k, l) in ops.iter().enumerate() {
            let ltl = l.adjoint().mul(l);
            let expected = expectation(&ltl, s.amplitudes()).re;
            assert!((expected - 0.5).abs() < 1e-12);
            assert!((w[k] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn jump_probability_examples() {
        let table = jump_probabilities(&basis(4, 0b1011), &model(0.003));
        for k in [0, 1, 3] {
            assert!((table.per_qubit[k] - 0.001).abs() < 1e-15);
        }
        assert_eq!(table.per_qubit[2], 0.0);
        assert!((table.total - 0.003).abs() < 1e-15);

        let table = jump_probabilities(&basis(5, 0), &model(0.01));
        assert_eq!(table.total, 0.0);

        // <1|L0^dag L0|1> dt with a dense single-qubit L0
        let l0 = &dense_lindblad_operators(1, 10.0)[0];
        let dense = expectation(&l0.adjoint().mul(l0), basis(1, 1).amplitudes()).re * 1e-3;
        let table = jump_probabilities(&basis(1, 1), &NoiseModel::new(10.0, 1000).unwrap());
        assert!((table.per_qubit[0] - 0.01).abs() < 1e-15);
        assert!((dense - 0.01).abs() < 1e-15);
    }

    #[test]
    fn jump_examples() {
        let mut s = basis(4, 0b1011);
        apply_jump(&mut s, 3).unwrap();
        assert_eq!(s, basis(4, 0b0011));

        let mut s = basis(4, 0b1011);
        apply_jump(&mut s, 0).unwrap();
        assert_eq!(s, basis(4, 0b1010));

        // (|11> + |01>)/sqrt(2), jump on qubit 0, checked against dense L_0
        let h = c(FRAC_1_SQRT_2);
        let mut s = state(&[c(0.0), h, c(0.0), h]);
        let l0 = &dense_lindblad_operators(2, 1.0)[0];
        let mut dense = l0.apply(s.amplitudes());
        let norm: f64 = dense.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        dense.iter_mut().for_each(|z| *z /= norm);
        apply_jump(&mut s, 0).unwrap();
        let expected = [c((2.0f64 / 3.0).sqrt()), c(0.0), c((1.0f64 / 3.0).sqrt()), c(0.0)];
        for b in 0..4 {
            assert!((s.amplitudes()[b] - expected[b]).norm() < 1e-12);
            assert!((dense[b] - expected[b]).norm() < 1e-12);
        }
    }

    #[test]
    fn impossible_jump_is_reported() {
        let mut s = basis(3, 0b101);
        assert_eq!(apply_jump(&mut s, 1), Err(Error::ImpossibleJump(1)));
        assert!(apply_jump(&mut s, 3).is_err());
    }

    #[test]
    fn no_jump_examples() {
        let m = model(0.004);
        let mut s = basis(3, 0);
        apply_no_jump(&mut s, &m);
        assert_eq!(s, basis(3, 0));

        let mut s = basis(4, 0b1011);
        apply_no_jump(&mut s, &m);
        assert!((s.amplitudes()[0b1011] - c(1.0)).norm() < 1e-15);

        // alpha|0> + beta|1>: matrix exponential of K = -(gamma/2)|1><1| is diagonal
        let (alpha, beta) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let mut s = state(&[alpha, beta]);
        apply_no_jump(&mut s, &m);
        let decay = (-0.5 * 0.004f64).exp();
        let norm = (alpha.norm_sqr() + beta.norm_sqr() * decay * decay).sqrt();
        assert!((s.amplitudes()[0] - alpha / norm).norm() < 1e-15);
        assert!((s.amplitudes()[1] - beta * decay / norm).norm() < 1e-15);
    }

    #[test]
    fn no_jump_is_idempotent_on_basis_states() {
        let m = model(0.01);
        for b in 0..16 {
            let mut s = basis(4, b);
            apply_no_jump(&mut s, &m);
            apply_no_jump(&mut s, &m);
            assert!((s.amplitudes()[b] - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn step_examples() {
        let m = model(0.003);
        for u in [0.0, 1e-9, 0.5, 0.999] {
            let mut s = basis(3, 0);
            assert_eq!(mcwf_step(&mut s, &m, u).unwrap(), StepOutcome::NoJump);
            assert_eq!(s, basis(3, 0));
        }

        let mut s = basis(4, 0b1011);
        assert_eq!(mcwf_step(&mut s, &m, 0.0015).unwrap(), StepOutcome::Jump(1));
        assert_eq!(s, basis(4, 0b1001));

        let mut s = basis(4, 0b1011);
        assert_eq!(mcwf_step(&mut s, &m, 0.5).unwrap(), StepOutcome::NoJump);
        assert_eq!(s, basis(4, 0b1011));
    }

    #[test]
    fn bracket_edges_resolve_low() {
        let table = jump_probabilities(&basis(4, 0b1011), &model(0.003));
        assert_eq!(table.select(0.0), Some(0));
        assert_eq!(table.select(table.per_qubit[0]), Some(0));
        assert_eq!(table.select(table.per_qubit[0] + 1e-12), Some(1));
        assert_eq!(table.select(table.total), Some(3));
        assert_eq!(table.select(table.total + 1e-12), None);
        // zero-weight qubits never win, even at u = 0
        let table = jump_probabilities(&basis(4, 0b1000), &model(0.003));
        assert_eq!(table.select(0.0), Some(3));
    }

    #[test]
    fn zero_damping_leaves_state_bit_exact() {
        let m = NoiseModel::new(0.0, 37).unwrap();
        let amps: Vec<Complex64> =
            (0..8).map(|i| Complex64::new(0.1 * i as f64, -0.03 * i as f64)).collect();
        let mut s = state(&amps);
        s.normalize();
        let before = s.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(evolve_interval(&mut s, &m, &mut rng).unwrap(), 0);
        assert_eq!(s, before);
    }

    #[test]
    fn ground_state_never_moves() {
        let m = NoiseModel::new(0.5, 100).unwrap();
        for seed in 0..20 {
            let mut s = basis(1, 0);
            evolve_interval(&mut s, &m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(s, basis(1, 0));
        }
    }

    #[test]
    fn fast_interval_matches_stepwise_reference() {
        let m = NoiseModel::new(3.0, 300).unwrap();
        for seed in 0..40u64 {
            let amps: Vec<Complex64> = (0..16)
                .map(|i| Complex64::from_polar(1.0 + (i % 3) as f64, 0.7 * i as f64 + seed as f64))
                .collect();
            let mut fast = state(&amps);
            fast.normalize();
            let mut slow = fast.clone();

            let jumps = evolve_interval(&mut fast, &m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut slow_jumps = 0;
            for _ in 0..m.substeps() {
                if let StepOutcome::Jump(_) = mcwf_step(&mut slow, &m, rng.random()).unwrap() {
                    slow_jumps += 1;
                }
            }
            assert_eq!(jumps, slow_jumps, "seed {seed}");
            for (a, b) in fast.amplitudes().iter().zip(slow.amplitudes()) {
                assert!((a - b).norm() < 1e-12, "seed {seed}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lindblad_family_is_complete() {
        for n in 1..=4 {
            let gamma = 0.7;
            let ops = dense_lindblad_operators(n, gamma);
            let dim = 1 << n;
            let mut sum = DenseMatrix::zeros(dim, dim);
            for l in &ops {
                sum = sum.add(&l.adjoint().mul(l));
            }
            for i in 0..dim {
                for j in 0..dim {
                    let expected = if i == j && i != 0 { gamma } else { 0.0 };
                    assert!((sum[(i, j)] - c(expected)).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn total_jump_probability_matches_no_jump_norm_loss() {
        let m = model(0.01);
        let amps: Vec<Complex64> = (0..8).map(|i| Complex64::from_polar(1.0, i as f64)).collect();
        let mut s = state(&amps);
        s.normalize();
        let dp = jump_probabilities(&s, &m).total;
        let mut damped = s.clone();
        damped.amplitudes_mut().iter_mut().skip(1).for_each(|z| *z *= m.no_jump_factor());
        let loss = 1.0 - damped.norm_sqr();
        assert!((dp - loss).abs() <= 0.01f64.powi(2));
    }

    #[test]
    fn reconstructs_basis_state_mixture() {
        let m = model(0.003);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = 100_000;
        let mut counts = [0usize; 16];
        for _ in 0..samples {
            let mut s = basis(4, 0b1011);
            mcwf_step(&mut s, &m, rng.random()).unwrap();
            let landed = s.amplitudes().iter().position(|z| z.norm_sqr() > 0.5).unwrap();
            counts[landed] += 1;
        }
        let sigma = (samples as f64 * 0.001 * 0.999).sqrt();
        for target in [0b0011, 0b1001, 0b1010] {
            assert!((counts[target] as f64 - 100.0).abs() <= 3.0 * sigma, "{counts:?}");
        }
        let others: usize = (0..16).filter(|b| ![0b0011, 0b1001, 0b1010, 0b1011].contains(b)).map(|b| counts[b]).sum();
        assert_eq!(others, 0);
    }

    #[test]
    fn single_qubit_survival_follows_exponential() {
        let m = NoiseModel::new(0.5, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let runs = 100_000;
        let mut survived = 0;
        for _ in 0..runs {
            let mut s = basis(1, 1);
            evolve_interval(&mut s, &m, &mut rng).unwrap();
            if s.amplitudes()[1].norm_sqr() > 0.5 {
                survived += 1;
            }
        }
        let p = (-0.5f64).exp();
        let sigma = (p * (1.0 - p) / runs as f64).sqrt();
        assert!((survived as f64 / runs as f64 - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn ensemble_excited_population_does_not_grow() {
        // pathwise it can grow (a jump from a mostly-ground superposition
        // lands fully excited), but its mean decays
        let m = model(0.01);
        let amps = [c(0.9f64.sqrt()), c(0.0), c(0.0), c(0.1f64.sqrt())];
        let mut s = state(&amps);
        mcwf_step(&mut s, &m, 0.0).unwrap();
        assert!(excited_population(&s) > 0.1 + 0.5);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let runs = 20_000;
        let mut mean_after = 0.0;
        for _ in 0..runs {
            let mut t = state(&amps);
            for _ in 0..20 {
                mcwf_step(&mut t, &m, rng.random()).unwrap();
            }
            mean_after += excited_population(&t);
        }
        mean_after /= runs as f64;
        assert!(mean_after <= 0.1 + 3.0 * (0.1 * 0.9 / runs as f64).sqrt());
    }

    proptest! {
        #[test]
        fn step_never_raises_excitation_count(
            parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
            u in 0.0f64..1.0,
            gamma_dt in 0.0f64..0.05,
        ) {
            let mut s = state(&parts.iter().map(|&(a, b)| Complex64::new(a, b)).collect::<Vec<_>>());
            prop_assume!(s.normalize() > 1e-6);
            let max_m = |s: &StateVector| s.amplitudes().iter().enumerate()
                .filter(|(_, z)| z.norm_sqr() > 0.0).map(|(b, _)| b.count_ones()).max().unwrap();
            let before_m = max_m(&s);
            let before_pop = excited_population(&s);
            let m = NoiseModel::new(gamma_dt, 1).unwrap();
            let table = jump_probabilities(&s, &m);
            prop_assert!(table.total <= gamma_dt + 1e-12);
            prop_assert!(table.per_qubit.iter().all(|&p| p >= 0.0));
            let outcome = mcwf_step(&mut s, &m, u).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!(max_m(&s) <= before_m);
            if outcome == StepOutcome::NoJump {
                prop_assert!(excited_population(&s) <= before_pop + 1e-12);
            }
        }
    }
}
