//! Pure-state register and the bitwise kernels acting on it.
//!
//! Basis index `b` encodes `|i_{n-1} ... i_0>` with qubit `k` stored at bit
//! position `k`, so qubit 0 is the least significant bit.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the kernels will allocate (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2x2 operator in the `{|0>, |1>}` basis, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitOperator(pub [[Complex64; 2]; 2]);

impl SingleQubitOperator {
    pub const IDENTITY: Self = Self([[ONE, ZERO], [ZERO, ONE]]);
    pub const PAULI_X: Self = Self([[ZERO, ONE], [ONE, ZERO]]);
    pub const PAULI_Z: Self = Self([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);
    /// `|0><1|`
    pub const LOWERING: Self = Self([[ZERO, ONE], [ZERO, ZERO]]);

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self([[h, h], [h, -h]])
    }

    /// Matrix product `self * rhs`.
    pub fn then_after(&self, rhs: &Self) -> Self {
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        Self(out)
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }
}

/// Single-qubit state `alpha|0> + beta|1>`, normalized at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Unnormalized(norm));
        }
        Ok(Self { alpha, beta })
    }

    pub fn zero() -> Self {
        Self { alpha: ONE, beta: ZERO }
    }

    pub fn one() -> Self {
        Self { alpha: ZERO, beta: ONE }
    }

    /// `(|0> + |1>)/sqrt(2)`
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: h, beta: h }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.alpha, self.beta]
    }

    /// Multiplies both amplitudes by `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self { alpha: self.alpha * phase, beta: self.beta * phase }
    }
}

/// One-qubit density matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState(pub [[Complex64; 2]; 2]);

impl ReducedState {
    pub fn zero() -> Self {
        Self([[ZERO; 2]; 2])
    }

    pub fn pure(psi: &QubitState) -> Self {
        let a = psi.amplitudes();
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i] * a[j].conj();
            }
        }
        Self(out)
    }

    pub fn maximally_mixed() -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self([[half, ZERO], [ZERO, half]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.0;
        (m[0][0].im).abs() <= tol
            && (m[1][1].im).abs() <= tol
            && (m[0][1] - m[1][0].conj()).norm() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.0;
        let a = m[0][0].re;
        let d = m[1][1].re;
        let off = 0.5 * (m[0][1] + m[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, op: &SingleQubitOperator) -> Self {
        let rho = SingleQubitOperator(self.0);
        Self(op.then_after(&rho).then_after(&op.adjoint()).0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.0;
        for row in out.iter_mut() {
            for entry in row.iter_mut() {
                *entry *= factor;
            }
        }
        Self(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// `<psi| rho |psi>` without normalization or clamping.
    pub fn expectation(&self, psi: &QubitState) -> Complex64 {
        let [a, b] = psi.amplitudes();
        let m = &self.0;
        a.conj() * (m[0][0] * a + m[0][1] * b) + b.conj() * (m[1][0] * a + m[1][1] * b)
    }
}

/// Fidelity `<psi| rho |psi>` of a one-qubit state against a pure target,
/// clamped to `[0, 1]`.
pub fn pure_fidelity(rho: &ReducedState, psi: &QubitState) -> Result<f64> {
    let norm = psi.alpha.norm_sqr() + psi.beta.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Unnormalized(norm));
    }
    let value = rho.expectation(psi);
    debug_assert!(value.im.abs() <= 1e-10, "non-real fidelity {value}");
    Ok(value.re.clamp(0.0, 1.0))
}

/// Pure n-qubit state stored as `2^n` dense amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new_basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::BasisIndex { index, num_qubits });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { num_qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is applied or checked.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension { expected: len.next_power_of_two().max(2), found: len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rescales to unit norm and returns the squared norm found before.
    pub fn normalize(&mut self) -> f64 {
        let norm_sqr = self.norm_sqr();
        if norm_sqr > 0.0 {
            let inv = norm_sqr.sqrt().recip();
            self.amplitudes.iter_mut().for_each(|c| *c *= inv);
        }
        norm_sqr
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange { qubit, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::SameQubit(a));
        }
        Ok(())
    }

    /// Exchanges the states of qubits `j` and `k`.
    pub fn apply_swap(&mut self, j: usize, k: usize) -> Result<()> {
        self.check_pair(j, k)?;
        let (bj, bk) = (1usize << j, 1usize << k);
        for b in 0..self.amplitudes.len() {
            // visit each unordered pair once: bit j set, bit k clear
            if b & bj != 0 && b & bk == 0 {
                self.amplitudes.swap(b, b ^ bj ^ bk);
            }
        }
        Ok(())
    }

    pub fn apply_single(&mut self, k: usize, op: &SingleQubitOperator) -> Result<()> {
        self.check_qubit(k)?;
        let stride = 1usize << k;
        let [[u00, u01], [u10, u11]] = op.0;
        for block in (0..self.amplitudes.len()).step_by(stride << 1) {
            for lo in block..block + stride {
                let hi = lo | stride;
                let a0 = self.amplitudes[lo];
                let a1 = self.amplitudes[hi];
                self.amplitudes[lo] = u00 * a0 + u01 * a1;
                self.amplitudes[hi] = u10 * a0 + u11 * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_pair(control, target)?;
        let (bc, bt) = (1usize << control, 1usize << target);
        for b in 0..self.amplitudes.len() {
            if b & bc != 0 && b & bt == 0 {
                self.amplitudes.swap(b, b | bt);
            }
        }
        Ok(())
    }

    /// Projects qubit `k` onto `outcome`. Returns the outcome probability and
    /// the unnormalized projected state.
    pub fn project_qubit(&self, k: usize, outcome: bool) -> Result<(f64, StateVector)> {
        self.check_qubit(k)?;
        let bit = 1usize << k;
        let want = if outcome { bit } else { 0 };
        let mut probability = 0.0;
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, &c)| {
                if b & bit == want {
                    probability += c.norm_sqr();
                    c
                } else {
                    ZERO
                }
            })
            .collect();
        Ok((probability, StateVector { num_qubits: self.num_qubits, amplitudes }))
    }

    /// Partial trace over every qubit except `k`.
    pub fn reduce_to_qubit(&self, k: usize) -> Result<ReducedState> {
        self.check_qubit(k)?;
        let bit = 1usize << k;
        let mut rho = [[ZERO; 2]; 2];
        for (b, &c0) in self.amplitudes.iter().enumerate() {
            if b & bit != 0 {
                continue;
            }
            let c1 = self.amplitudes[b | bit];
            rho[0][0] += c0 * c0.conj();
            rho[0][1] += c0 * c1.conj();
            rho[1][0] += c1 * c0.conj();
            rho[1][1] += c1 * c1.conj();
        }
        Ok(ReducedState(rho))
    }

    /// Appends one qubit in state `psi` as the new most significant qubit.
    pub fn extended_with(&self, psi: &QubitState) -> Result<StateVector> {
        check_qubit_count(self.num_qubits + 1)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * 2);
        amplitudes.extend(self.amplitudes.iter().map(|&c| c * psi.alpha));
        amplitudes.extend(self.amplitudes.iter().map(|&c| c * psi.beta));
        Ok(StateVector { num_qubits: self.num_qubits + 1, amplitudes })
    }
}

pub(crate) fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(num_qubits));
    }
    Ok(())
}
