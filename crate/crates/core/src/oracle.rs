//! Direct integration of the damping master equation on dense density
//! matrices. Exact up to the RK4 truncation error, so it serves as the
//! reference for trajectory ensembles at small chain lengths.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::protocol::{correction, prepare_initial_chain, preparation_rng, ExperimentConfig, Schedule};
use crate::state::{QubitState, ReducedState, SingleQubitOperator, StateVector};

/// Default largest chain the oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 8;
/// Absolute ceiling for [`run_protocol_density_limited`].
pub const ORACLE_HARD_LIMIT: usize = 10;
/// RK4 step sizing: `gamma * h <= MAX_GAMMA_STEP`.
pub const MAX_GAMMA_STEP: f64 = 1e-3;
const TRACE_DRIFT_LIMIT: f64 = 1e-7;
const POPULATION_SLACK: f64 = 1e-7;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense `2^n x 2^n` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self { num_qubits, entries: DMatrix::zeros(dim, dim) }
    }

    /// `|phi><phi|`
    pub fn from_pure(state: &StateVector) -> Self {
        let v = DVector::from_column_slice(state.amplitudes());
        Self { num_qubits: state.num_qubits(), entries: &v * v.adjoint() }
    }

    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim != entries.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Dimension { expected: dim.next_power_of_two().max(2), found: dim });
        }
        Ok(Self { num_qubits: dim.trailing_zeros() as usize, entries })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest entry of `rho - rho^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> DVector<f64> {
        let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        sym.symmetric_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        Self::hermitian_eigenvalues(&self.entries).min()
    }

    /// `(1/2) || self - other ||_1`
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: other.dim() });
        }
        let diff = &self.entries - &other.entries;
        Ok(0.5 * Self::hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
    }

    /// `self += weight |phi><phi|`
    pub fn accumulate_pure(&mut self, state: &StateVector, weight: f64) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: state.dim() });
        }
        let v = DVector::from_column_slice(state.amplitudes());
        self.entries += (&v * v.adjoint()) * Complex64::new(weight, 0.0);
        Ok(())
    }

    /// Conjugation by SWAP(j, k).
    pub fn apply_swap(&mut self, j: usize, k: usize) -> Result<()> {
        let n = self.num_qubits;
        if j >= n || k >= n {
            return Err(Error::QubitOutOfRange { qubit: j.max(k), num_qubits: n });
        }
        if j == k {
            return Err(Error::SameQubit(j));
        }
        let swap_bits = |b: usize| {
            let (bj, bk) = ((b >> j) & 1, (b >> k) & 1);
            if bj == bk {
                b
            } else {
                b ^ (1 << j) ^ (1 << k)
            }
        };
        let dim = self.dim();
        self.entries = DMatrix::from_fn(dim, dim, |r, c| self.entries[(swap_bits(r), swap_bits(c))]);
        Ok(())
    }

    /// Partial trace keeping `keep` (listed qubit `i` lands on bit `i`).
    pub fn reduce_to(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_qubits;
        for (i, &q) in keep.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: n });
            }
            if keep[..i].contains(&q) {
                return Err(Error::SameQubit(q));
            }
        }
        let kept_mask: usize = keep.iter().map(|q| 1usize << q).sum();
        let compress = |b: usize| keep.iter().enumerate().map(|(i, &q)| ((b >> q) & 1) << i).sum::<usize>();
        let mut out = DensityMatrix::zeros(keep.len());
        let dim = self.dim();
        for r in 0..dim {
            for c in 0..dim {
                if r & !kept_mask == c & !kept_mask {
                    out.entries[(compress(r), compress(c))] += self.entries[(r, c)];
                }
            }
        }
        Ok(out)
    }
}

/// Anything that supplies the right-hand side `d rho / dt`.
pub trait Generator {
    fn num_qubits(&self) -> usize;
    /// Rate used to size the integration step.
    fn rate(&self) -> f64;
    fn rhs(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;
}

/// `L_k = sqrt(gamma) sigma_k^- N^(-1/2)` as dense matrices.
pub fn build_lindblad_operators(num_qubits: usize, gamma: f64) -> Result<Vec<DMatrix<Complex64>>> {
    if num_qubits == 0 || num_qubits > ORACLE_HARD_LIMIT {
        return Err(Error::OracleLimit { requested: num_qubits, limit: ORACLE_HARD_LIMIT });
    }
    let dim = 1usize << num_qubits;
    let root = gamma.sqrt();
    Ok((0..num_qubits)
        .map(|k| {
            let bit = 1usize << k;
            let mut l = DMatrix::zeros(dim, dim);
            for col in (0..dim).filter(|c| c & bit != 0) {
                let m = col.count_ones() as f64;
                l[(col ^ bit, col)] = Complex64::new(root / m.sqrt(), 0.0);
            }
            l
        })
        .collect())
}

/// `-(1/2) sum_k {L_k^dag L_k, rho} + sum_k L_k rho L_k^dag` with dense
/// operators.
pub fn lindblad_rhs(rho: &DensityMatrix, operators: &[DMatrix<Complex64>]) -> Result<DensityMatrix> {
    let dim = rho.dim();
    let mut out = DMatrix::zeros(dim, dim);
    let half = Complex64::new(0.5, 0.0);
    for l in operators {
        if l.nrows() != dim || l.ncols() != dim {
            return Err(Error::Dimension { expected: dim, found: l.nrows() });
        }
        let ldag = l.adjoint();
        let ltl = &ldag * l;
        out += l * &rho.entries * &ldag;
        out -= (&ltl * &rho.entries + &rho.entries * &ltl) * half;
    }
    Ok(DensityMatrix { num_qubits: rho.num_qubits, entries: out })
}

/// Generator from an explicit list of dense jump operators.
pub struct DenseLindblad {
    num_qubits: usize,
    rate: f64,
    operators: Vec<DMatrix<Complex64>>,
}

impl DenseLindblad {
    pub fn new(num_qubits: usize, gamma: f64) -> Result<Self> {
        Ok(Self { num_qubits, rate: gamma, operators: build_lindblad_operators(num_qubits, gamma)? })
    }
}

impl Generator for DenseLindblad {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    fn rate(&self) -> f64 {
        self.rate
    }
    fn rhs(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        lindblad_rhs(rho, &self.operators)
    }
}

/// Same generator evaluated entrywise from the operator structure:
///
/// `d rho_ab = -(gamma/2)(P_a + P_b) rho_ab
///           + gamma sum_{k: a_k = b_k = 0} rho_{a+k, b+k} / sqrt(m(a+k) m(b+k))`
///
/// where `P_a = [a != 0]`. Costs `O(n 4^n)` instead of `O(n 8^n)`.
pub struct ExcitationDamping {
    num_qubits: usize,
    gamma: f64,
}

impl ExcitationDamping {
    pub fn new(num_qubits: usize, gamma: f64) -> Result<Self> {
        if num_qubits == 0 || num_qubits > ORACLE_HARD_LIMIT {
            return Err(Error::OracleLimit { requested: num_qubits, limit: ORACLE_HARD_LIMIT });
        }
        Ok(Self { num_qubits, gamma })
    }
}

impl Generator for ExcitationDamping {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    fn rate(&self) -> f64 {
        self.gamma
    }
    fn rhs(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let dim = 1usize << self.num_qubits;
        if rho.dim() != dim {
            return Err(Error::Dimension { expected: dim, found: rho.dim() });
        }
        let inv_sqrt: Vec<f64> = (0..=self.num_qubits + 1)
            .map(|m| if m == 0 { 0.0 } else { (m as f64).sqrt().recip() })
            .collect();
        let g = self.gamma;
        let mask = dim - 1;
        let src = &rho.entries;
        let out = DMatrix::from_fn(dim, dim, |a, b| {
            let decay = (usize::from(a != 0) + usize::from(b != 0)) as f64 * (0.5 * g);
            let mut value = src[(a, b)] * (-decay);
            let mut common_clear = !(a | b) & mask;
            if common_clear != 0 {
                let weight = g * inv_sqrt[a.count_ones() as usize + 1] * inv_sqrt[b.count_ones() as usize + 1];
                while common_clear != 0 {
                    let bit = common_clear & common_clear.wrapping_neg();
                    value += src[(a | bit, b | bit)] * weight;
                    common_clear &= common_clear - 1;
                }
            }
            value
        });
        Ok(DensityMatrix { num_qubits: rho.num_qubits, entries: out })
    }
}

/// RK4 steps for one interval of `duration` at `rate`.
pub fn steps_for(rate: f64, duration: f64) -> usize {
    ((rate * duration / MAX_GAMMA_STEP).ceil() as usize).max(1)
}

/// Classical fourth-order Runge-Kutta over `duration` in `steps` equal steps.
pub fn integrate_interval<G: Generator + ?Sized>(
    rho: &DensityMatrix,
    generator: &G,
    duration: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if steps == 0 {
        return Err(Error::Config("RK4 needs at least one step".into()));
    }
    if rho.num_qubits() != generator.num_qubits() {
        return Err(Error::Dimension { expected: 1 << generator.num_qubits(), found: rho.dim() });
    }
    if generator.rate() == 0.0 || duration == 0.0 {
        return Ok(rho.clone());
    }
    let h = duration / steps as f64;
    let start_trace = rho.trace().re;
    let mut current = rho.clone();
    let shifted = |base: &DensityMatrix, k: &DensityMatrix, factor: f64| DensityMatrix {
        num_qubits: base.num_qubits,
        entries: &base.entries + &k.entries * Complex64::new(factor, 0.0),
    };
    for _ in 0..steps {
        let k1 = generator.rhs(&current)?;
        let k2 = generator.rhs(&shifted(&current, &k1, 0.5 * h))?;
        let k3 = generator.rhs(&shifted(&current, &k2, 0.5 * h))?;
        let k4 = generator.rhs(&shifted(&current, &k3, h))?;
        let sum = &k1.entries + (&k2.entries + &k3.entries) * Complex64::new(2.0, 0.0) + &k4.entries;
        current.entries += sum * Complex64::new(h / 6.0, 0.0);
    }
    let drift = (current.trace().re - start_trace).abs();
    if drift > TRACE_DRIFT_LIMIT {
        return Err(Error::TraceDrift { drift, steps, step: h });
    }
    // the generator conserves trace exactly, so an unstable step size shows
    // up in the populations instead
    let upper = start_trace + POPULATION_SLACK;
    if let Some(population) =
        current.entries.diagonal().iter().map(|z| z.re).find(|p| !(-POPULATION_SLACK..=upper).contains(p))
    {
        return Err(Error::Unstable { population, steps, step: h });
    }
    Ok(current)
}

fn check_oracle_size(num_qubits: usize, limit: usize) -> Result<()> {
    let limit = limit.min(ORACLE_HARD_LIMIT);
    if num_qubits > limit {
        return Err(Error::OracleLimit { requested: num_qubits, limit });
    }
    Ok(())
}

/// Density matrix of the chain after the full noisy delivery, starting from
/// the same initial state the trajectories use for `config.master_seed`.
pub fn evolve_chain_density(config: &ExperimentConfig) -> Result<DensityMatrix> {
    evolve_chain_density_limited(config, ORACLE_MAX_QUBITS)
}

pub fn evolve_chain_density_limited(config: &ExperimentConfig, limit: usize) -> Result<DensityMatrix> {
    check_oracle_size(config.num_qubits, limit)?;
    config.validate()?;
    let n = config.num_qubits;
    let initial = prepare_initial_chain(n, &mut preparation_rng(config.master_seed))?;
    let generator = ExcitationDamping::new(n, config.gamma)?;
    let steps = steps_for(config.gamma, 1.0);
    let mut rho = DensityMatrix::from_pure(&initial);
    for g in 1..n - 1 {
        match config.schedule {
            Schedule::GateThenDamp => {
                rho.apply_swap(g, g + 1)?;
                rho = integrate_interval(&rho, &generator, 1.0, steps)?;
            }
            Schedule::DampThenGate => {
                rho = integrate_interval(&rho, &generator, 1.0, steps)?;
                rho.apply_swap(g, g + 1)?;
            }
        }
    }
    Ok(rho)
}

fn embed_three(op: &SingleQubitOperator, qubit: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(8, 8, |r, c| {
        let others = !(1usize << qubit) & 0b111;
        if r & others != c & others {
            ZERO
        } else {
            op.0[(r >> qubit) & 1][(c >> qubit) & 1]
        }
    })
}

/// Outcome-averaged teleportation fidelity computed on the density matrix.
///
/// The chain is first reduced to Alice (qubit 0) and Bob (qubit `n-1`); the
/// ancilla is tensored on as bit 2 and the circuit CNOT(T -> A), H(T) is
/// applied by conjugation before the four projected branches are corrected
/// and scored.
pub fn teleport_fidelity_density(rho: &DensityMatrix, psi: &QubitState) -> Result<f64> {
    let n = rho.num_qubits();
    if n < 2 {
        return Err(Error::Config("teleportation needs Alice's and Bob's qubits".into()));
    }
    QubitState::new(psi.alpha, psi.beta)?;
    // bit 0 = Alice, bit 1 = Bob
    let pair = rho.reduce_to(&[0, n - 1])?;
    let target = ReducedState::pure(psi);
    let joint = DMatrix::from_fn(8, 8, |r, c| target.0[r >> 2][c >> 2] * pair.entries[(r & 3, c & 3)]);

    let cnot = DMatrix::from_fn(8, 8, |r, c| {
        let image = if c & 0b100 != 0 { c ^ 1 } else { c };
        if r == image {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    let circuit = embed_three(&SingleQubitOperator::hadamard(), 2) * cnot;
    let after = &circuit * joint * circuit.adjoint();

    let mut fidelity = 0.0;
    for ancilla_bit in [false, true] {
        for alice_bit in [false, true] {
            let base = (usize::from(ancilla_bit) << 2) | usize::from(alice_bit);
            let mut bob = ReducedState::zero();
            for x in 0..2 {
                for y in 0..2 {
                    bob.0[x][y] = after[(base | (x << 1), base | (y << 1))];
                }
            }
            let corrected = bob.conjugate_by(&correction(ancilla_bit, alice_bit));
            fidelity += corrected.expectation(psi).re;
        }
    }
    Ok(fidelity.clamp(0.0, 1.0))
}

/// Exact fidelity of the full protocol for `config`.
pub fn run_protocol_density(config: &ExperimentConfig) -> Result<f64> {
    run_protocol_density_limited(config, ORACLE_MAX_QUBITS)
}

pub fn run_protocol_density_limited(config: &ExperimentConfig, limit: usize) -> Result<f64> {
    let rho = evolve_chain_density_limited(config, limit)?;
    teleport_fidelity_density(&rho, &config.psi)
}
