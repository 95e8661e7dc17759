#![allow(dead_code)]

use qramsynth::circuit::Circuit;
use qramsynth::linalg::{CMat, C64};
use qramsynth::sim::{scatter, simulate_basis};

/// Applies `c` to every basis input of `on` (other qubits zero) and returns the
/// restricted operator together with the worst ancilla leak.
pub fn operator_on(c: &Circuit, on: &[usize]) -> (CMat, f64) {
    let dim = 1 << on.len();
    let mut m = CMat::zeros(dim, dim);
    let mut leak: f64 = 0.0;
    for x in 0..dim {
        let r = simulate_basis(c, scatter(x, on), on).unwrap();
        leak = leak.max(r.leaked);
        for (y, a) in r.local.into_iter().enumerate() {
            m[(y, x)] = a;
        }
    }
    (m, leak)
}

/// Permutation operator of a basis map on `bits` qubits.
pub fn permutation_matrix(bits: usize, f: impl Fn(usize) -> usize) -> CMat {
    let dim = 1 << bits;
    let mut m = CMat::zeros(dim, dim);
    for x in 0..dim {
        m[(f(x), x)] = C64::new(1.0, 0.0);
    }
    m
}

/// `|⟨a|b⟩|`.
pub fn state_fidelity(a: &[C64], b: &[C64]) -> f64 {
    qramsynth::sim::overlap(a, b).norm()
}
