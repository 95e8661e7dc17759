//! Statevector simulation.
//!
//! Basis index `i` of an `n`-qubit register is `Σ_j i_j 2^j`: qubit `j` is bit
//! `(i >> j) & 1`. Every other module relies on this helper.

use std::collections::HashMap;

use crate::circuit::{Circuit, Gate};
use crate::error::{Result, SynthError};
use crate::linalg::{CMat, Mat2, C64, ONE, ZERO};

pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Largest `on` register accepted by [`extract_unitary`].
pub const MAX_EXTRACT_QUBITS: usize = 12;

/// Probability mass tolerated outside the ancilla `|0…0⟩` subspace.
pub const LEAK_TOL: f64 = 1e-9;

/// Above this width [`simulate_basis`] switches to the sparse engine.
pub const SPARSE_THRESHOLD: usize = 16;

/// Bit `q` of basis index `i`.
#[inline]
pub fn bit(i: usize, q: usize) -> bool {
    (i >> q) & 1 == 1
}

/// Basis index with `qubits[j]` set to bit `j` of `value` and all other qubits zero.
pub fn scatter(value: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().filter(|&(j, _)| bit(value, j)).fold(0, |acc, (_, &q)| acc | 1 << q)
}

/// Inverse of [`scatter`] restricted to `qubits`.
pub fn gather(index: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().filter(|&(_, &q)| bit(index, q)).fold(0, |acc, (j, _)| acc | 1 << j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SynthError::InvalidArgument(format!("state length {len} is not a power of two")));
        }
        let norm = crate::linalg::vector_norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SynthError::Unnormalized { norm });
        }
        Ok(StateVector { num_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        StateVector { num_qubits, amplitudes }
    }

    pub fn zero(num_qubits: usize) -> Self {
        StateVector::basis(num_qubits, 0)
    }

    /// `local` placed on `qubits`, every other qubit in `|0⟩`.
    pub fn embed(num_qubits: usize, qubits: &[usize], local: &[C64]) -> Result<Self> {
        if local.len() != 1 << qubits.len() {
            return Err(SynthError::DimensionMismatch { expected: 1 << qubits.len(), got: local.len() });
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        for (x, a) in local.iter().enumerate() {
            amplitudes[scatter(x, qubits)] = *a;
        }
        StateVector::new(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::vector_norm(&self.amplitudes)
    }
}

fn apply_1q(amps: &mut [C64], t: usize, m: &Mat2) {
    let stride = 1 << t;
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m00 * x + m01 * y;
            *b = m10 * x + m11 * y;
        }
    }
}

fn apply_cx(amps: &mut [C64], c: usize, t: usize) {
    let (cm, tm) = (1usize << c, 1usize << t);
    for i in 0..amps.len() {
        if i & cm != 0 && i & tm == 0 {
            amps.swap(i, i | tm);
        }
    }
}

/// Dense simulator with a configurable qubit cap.
#[derive(Debug, Clone, Copy)]
pub struct Simulator {
    cap: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator { cap: DEFAULT_QUBIT_CAP }
    }
}

impl Simulator {
    pub fn with_cap(cap: usize) -> Self {
        Simulator { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn run(&self, c: &Circuit, s: &StateVector) -> Result<StateVector> {
        if c.num_qubits() != s.num_qubits {
            return Err(SynthError::QubitCountMismatch { left: c.num_qubits(), right: s.num_qubits });
        }
        if c.num_qubits() > self.cap {
            return Err(SynthError::QubitCapExceeded { requested: c.num_qubits(), cap: self.cap });
        }
        let mut amplitudes = s.amplitudes.clone();
        run_in_place(c, &mut amplitudes);
        Ok(StateVector { num_qubits: s.num_qubits, amplitudes })
    }
}

/// Applies `c` to a dense amplitude buffer of length `2^num_qubits`.
pub fn run_in_place(c: &Circuit, amps: &mut [C64]) {
    assert_eq!(amps.len(), 1 << c.num_qubits());
    for g in c.gates() {
        match g {
            Gate::OneQubit { target, matrix } => apply_1q(amps, *target, matrix),
            Gate::Cnot { control, target } => apply_cx(amps, *control, *target),
        }
    }
}

pub fn run(c: &Circuit, s: &StateVector) -> Result<StateVector> {
    Simulator::default().run(c, s)
}

pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.amplitudes.len() != b.amplitudes.len() {
        return Err(SynthError::DimensionMismatch { expected: a.amplitudes.len(), got: b.amplitudes.len() });
    }
    Ok(overlap(&a.amplitudes, &b.amplitudes).norm().min(1.0))
}

/// `⟨a|b⟩`.
pub fn overlap(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Sparse state keyed by basis index, for circuits wider than a dense buffer allows
/// (up to 128 qubits). Exact zeros are dropped.
#[derive(Debug, Clone, Default)]
pub struct SparseState {
    amps: HashMap<u128, C64>,
}

impl SparseState {
    pub fn basis(index: u128) -> Self {
        SparseState { amps: HashMap::from([(index, ONE)]) }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (u128, C64)>) -> Self {
        let mut amps = HashMap::new();
        for (k, a) in entries {
            *amps.entry(k).or_insert(ZERO) += a;
        }
        amps.retain(|_, a: &mut C64| a.norm_sqr() > 0.0);
        SparseState { amps }
    }

    pub fn amplitude(&self, index: u128) -> C64 {
        self.amps.get(&index).copied().unwrap_or(ZERO)
    }

    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u128, C64)> + '_ {
        self.amps.iter().map(|(&k, &v)| (k, v))
    }

    pub fn apply(&mut self, g: &Gate) {
        match *g {
            Gate::Cnot { control, target } => {
                let (cm, tm) = (1u128 << control, 1u128 << target);
                self.amps = self.amps.drain().map(|(k, v)| (if k & cm != 0 { k ^ tm } else { k }, v)).collect();
            }
            Gate::OneQubit { target, ref matrix } => {
                let tm = 1u128 << target;
                let mut next = HashMap::with_capacity(self.amps.len() * 2);
                for &k in self.amps.keys() {
                    let base = k & !tm;
                    if k != base && self.amps.contains_key(&base) {
                        continue;
                    }
                    let a0 = self.amplitude(base);
                    let a1 = self.amplitude(base | tm);
                    let b0 = matrix[(0, 0)] * a0 + matrix[(0, 1)] * a1;
                    let b1 = matrix[(1, 0)] * a0 + matrix[(1, 1)] * a1;
                    if b0.norm_sqr() > 0.0 {
                        next.insert(base, b0);
                    }
                    if b1.norm_sqr() > 0.0 {
                        next.insert(base | tm, b1);
                    }
                }
                self.amps = next;
            }
        }
    }

    /// Applies `c`, pruning amplitudes below `1e-16` in magnitude after each gate.
    pub fn run(&mut self, c: &Circuit) {
        for g in c.gates() {
            self.apply(g);
            if g.is_cnot() {
                continue;
            }
            self.amps.retain(|_, a| a.norm_sqr() > 1e-32);
        }
    }
}

/// Result of running a circuit and restricting to a register.
#[derive(Debug, Clone)]
pub struct Restriction {
    /// Amplitudes on the kept register with all other qubits `|0⟩`.
    pub local: Vec<C64>,
    /// Probability outside that subspace.
    pub leaked: f64,
}

fn restrict(entries: impl Iterator<Item = (u128, C64)>, on: &[usize]) -> Restriction {
    let on_mask = on.iter().fold(0u128, |m, &q| m | 1 << q);
    let mut local = vec![ZERO; 1 << on.len()];
    let mut leaked = 0.0;
    for (k, a) in entries {
        if k & !on_mask != 0 {
            leaked += a.norm_sqr();
        } else {
            let idx = on.iter().enumerate().filter(|&(_, &q)| (k >> q) & 1 == 1).fold(0, |acc, (j, _)| acc | 1 << j);
            local[idx] = a;
        }
    }
    Restriction { local, leaked }
}

/// Runs `c` on the basis state `index` and restricts to `on`; picks the dense or
/// sparse engine by width.
pub fn simulate_basis(c: &Circuit, index: usize, on: &[usize]) -> Result<Restriction> {
    simulate_entries(c, &[(index, ONE)], on)
}

/// Widest circuit any engine accepts.
pub const SPARSE_QUBIT_CAP: usize = 128;

/// As [`simulate_basis`] for a superposition given by `(index, amplitude)` pairs.
pub fn simulate_entries(c: &Circuit, input: &[(usize, C64)], on: &[usize]) -> Result<Restriction> {
    let n = c.num_qubits();
    if n > SPARSE_QUBIT_CAP {
        return Err(SynthError::QubitCapExceeded { requested: n, cap: SPARSE_QUBIT_CAP });
    }
    for &q in on {
        if q >= n {
            return Err(SynthError::QubitOutOfRange { index: q, num_qubits: n });
        }
    }
    if n <= SPARSE_THRESHOLD {
        let mut amps = vec![ZERO; 1 << n];
        for &(k, a) in input {
            amps[k] += a;
        }
        run_in_place(c, &mut amps);
        Ok(restrict(amps.into_iter().enumerate().map(|(k, a)| (k as u128, a)), on))
    } else {
        let mut s = SparseState::from_entries(input.iter().map(|&(k, a)| (k as u128, a)));
        s.run(c);
        Ok(restrict(s.entries(), on))
    }
}

/// Operator of `c` restricted to `on`, all other qubits starting (and required to end) in `|0⟩`.
pub fn extract_unitary(c: &Circuit, on: &[usize]) -> Result<CMat> {
    if on.len() > MAX_EXTRACT_QUBITS {
        return Err(SynthError::InvalidArgument(format!(
            "cannot extract a {}-qubit operator (limit {MAX_EXTRACT_QUBITS})",
            on.len()
        )));
    }
    let dim = 1 << on.len();
    let mut out = CMat::zeros(dim, dim);
    for x in 0..dim {
        let r = simulate_basis(c, scatter(x, on), on)?;
        if r.leaked > LEAK_TOL {
            return Err(SynthError::AncillaNotRestored { leaked: r.leaked });
        }
        for (y, a) in r.local.into_iter().enumerate() {
            out[(y, x)] = a;
        }
    }
    Ok(out)
}

/// Whether every declared ancilla of `c` ends in `|0⟩` after running on `input`.
pub fn verify_ancilla_restored(c: &Circuit, input: &StateVector) -> Result<bool> {
    let out = run(c, input)?;
    Ok(ancilla_leak(c, out.amplitudes()) <= LEAK_TOL)
}

/// Probability of the declared ancillas of `c` not being `|0…0⟩` in `amps`.
pub fn ancilla_leak(c: &Circuit, amps: &[C64]) -> f64 {
    let mask = c.ancillas().iter().fold(0usize, |m, &q| m | 1 << q);
    amps.iter().enumerate().filter(|(k, _)| k & mask != 0).map(|(_, a)| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, hadamard, pauli_x};

    #[test]
    fn cnot_truth_table() {
        let mut circ = Circuit::new(2);
        circ.cx(0, 1);
        let out = run(&circ, &StateVector::basis(2, 1)).unwrap();
        assert_eq!(out.amplitudes()[3], ONE);
        let out = run(&Circuit::new(2), &StateVector::zero(2)).unwrap();
        assert_eq!(out, StateVector::zero(2));
    }

    #[test]
    fn fidelity_values() {
        let z = StateVector::zero(1);
        let o = StateVector::basis(1, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = StateVector::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&z, &o).unwrap(), 0.0);
        assert!((fidelity(&z, &p).unwrap() - h).abs() < 1e-15);
        assert!(fidelity(&z, &StateVector::zero(2)).is_err());
    }

    #[test]
    fn cap_and_mismatch() {
        let sim = Simulator::with_cap(2);
        assert!(matches!(
            sim.run(&Circuit::new(3), &StateVector::zero(3)),
            Err(SynthError::QubitCapExceeded { .. })
        ));
        assert!(matches!(
            sim.run(&Circuit::new(2), &StateVector::zero(1)),
            Err(SynthError::QubitCountMismatch { .. })
        ));
    }

    #[test]
    fn extraction() {
        let mut circ = Circuit::new(2);
        circ.cx(0, 1);
        let u = extract_unitary(&circ, &[0, 1]).unwrap();
        let expect = [(0, 0), (3, 1), (2, 2), (1, 3)];
        for (r, col) in expect {
            assert_eq!(u[(r, col)], ONE);
        }
        let mut h = Circuit::new(2);
        h.u(0, hadamard());
        h.declare_ancilla(1).unwrap();
        let u = extract_unitary(&h, &[0]).unwrap();
        assert!(crate::linalg::max_abs_diff(&u, &crate::linalg::mat2_to_dyn(&hadamard())) < 1e-15);
        let mut leak = Circuit::new(2);
        leak.u(1, pauli_x());
        assert!(matches!(extract_unitary(&leak, &[0]), Err(SynthError::AncillaNotRestored { .. })));
    }

    #[test]
    fn ancilla_check() {
        let mut circ = Circuit::new(2);
        circ.declare_ancilla(1).unwrap();
        assert!(verify_ancilla_restored(&circ, &StateVector::zero(2)).unwrap());
        circ.u(1, pauli_x());
        assert!(!verify_ancilla_restored(&circ, &StateVector::zero(2)).unwrap());
    }

    #[test]
    fn sparse_matches_dense() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut circ = Circuit::new(5);
        for _ in 0..60 {
            if rng.random_bool(0.5) {
                let t = rng.random_range(0..5);
                circ.u(t, crate::linalg::haar_unitary2(&mut rng));
            } else {
                let a = rng.random_range(0..5);
                let b = (a + rng.random_range(1..5)) % 5;
                circ.cx(a, b);
            }
        }
        let dense = run(&circ, &StateVector::basis(5, 7)).unwrap();
        let mut sparse = SparseState::basis(7);
        sparse.run(&circ);
        for (k, a) in dense.amplitudes().iter().enumerate() {
            assert!((sparse.amplitude(k as u128) - a).norm() < 1e-12);
        }
    }

    #[test]
    fn scatter_gather() {
        let qs = [4, 1, 6];
        for v in 0..8 {
            assert_eq!(gather(scatter(v, &qs), &qs), v);
        }
        assert_eq!(scatter(0b101, &qs), (1 << 4) | (1 << 6));
    }
}
