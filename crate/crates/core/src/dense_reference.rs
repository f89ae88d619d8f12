//! Kronecker-product construction of the jump operators, used by unit tests
//! as an independent check on the bitwise kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type DenseMatrix = DMatrix<Complex64>;

pub trait DenseExt {
    fn mul(&self, rhs: &Self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64>;
}

impl DenseExt for DenseMatrix {
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(v);
        (self * v).as_slice().to_vec()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `op` acting on qubit `k` of an `n`-qubit register (qubit 0 = least
/// significant, i.e. rightmost Kronecker factor).
pub fn embed(op: &DenseMatrix, k: usize, n: usize) -> DenseMatrix {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for q in (0..n).rev() {
        out = out.kronecker(if q == k { op } else { &id });
    }
    out
}

/// `L_k = sqrt(gamma) sigma_k^- N^(-1/2)` built from Kronecker products.
pub fn dense_lindblad_operators(n: usize, gamma: f64) -> Vec<DenseMatrix> {
    let lower = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let raise = lower.adjoint();
    let dim = 1 << n;
    let mut number = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..n {
        number += embed(&raise, k, n) * embed(&lower, k, n);
    }
    let mut inv_sqrt_number = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let m = number[(i, i)].re;
        inv_sqrt_number[(i, i)] = c(if m > 0.5 { m.sqrt().recip() } else { 1.0 });
    }
    (0..n)
        .map(|k| embed(&lower, k, n) * &inv_sqrt_number * c(gamma.sqrt()))
        .collect()
}

pub fn expectation(op: &DenseMatrix, v: &[Complex64]) -> Complex64 {
    let w = op.apply(v);
    v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum()
}
