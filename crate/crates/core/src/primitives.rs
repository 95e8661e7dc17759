//! Reusable sub-circuits: fan-out copies, n-fold Toffolis and the prefix-controlled gadget.

use std::f64::consts::PI;

use crate::circuit::Circuit;
use crate::error::{Result, SynthError};
use crate::linalg::{axbxc_factor, hadamard, pauli_x, phase, t_gate, Mat2, Prefix};
use crate::ucg::{diagonal, register_width};

/// `|x⟩|0⟩^{⊗m} ↦ |x⟩|x⟩^{⊗m}` by a doubling tree of CNOT layers; depth `⌈log₂(m+1)⌉`.
pub fn build_copy(n: usize, m: usize, src: &[usize], dsts: &[Vec<usize>]) -> Result<Circuit> {
    if src.len() != n || dsts.len() != m {
        return Err(SynthError::DimensionMismatch { expected: n, got: src.len() });
    }
    if let Some(d) = dsts.iter().find(|d| d.len() != n) {
        return Err(SynthError::DimensionMismatch { expected: n, got: d.len() });
    }
    let mut regs: Vec<&[usize]> = vec![src];
    regs.extend(dsts.iter().map(Vec::as_slice));
    let mut c = Circuit::new(register_width(&regs)?);
    let mut holders: Vec<&[usize]> = vec![src];
    let mut next = 0;
    while next < m {
        let round = holders.len().min(m - next);
        for h in 0..round {
            let dst = dsts[next + h].as_slice();
            for (&a, &b) in holders[h].iter().zip(dst) {
                c.cx(a, b);
            }
        }
        holders.extend(dsts[next..next + round].iter().map(Vec::as_slice));
        next += round;
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToffoliMode {
    /// No ancillas; `H · (multi-controlled Z) · H` with the controlled-Z as an exact diagonal.
    NoAncilla,
    /// Balanced AND-tree onto ancillas, then uncomputed. Needs `|ancillas| ≥ |controls|`.
    LogDepth,
}

fn toffoli(c: &mut Circuit, a: usize, b: usize, t: usize) {
    let tdg = t_gate().adjoint();
    c.u(t, hadamard()).cx(b, t).u(t, tdg).cx(a, t).u(t, t_gate()).cx(b, t).u(t, tdg).cx(a, t);
    c.u(b, t_gate()).u(t, t_gate()).u(t, hadamard()).cx(a, b).u(a, t_gate()).u(b, tdg).cx(a, b);
}

fn mcx_no_ancilla(c: &mut Circuit, controls: &[usize], target: usize) {
    match controls.len() {
        0 => {
            c.u(target, pauli_x());
        }
        1 => {
            c.cx(controls[0], target);
        }
        2 => toffoli(c, controls[0], controls[1], target),
        k => {
            let mut qubits = controls.to_vec();
            qubits.push(target);
            let mut phases = vec![0.0; 1 << (k + 1)];
            phases[(1 << (k + 1)) - 1] = PI;
            c.u(target, hadamard());
            diagonal(c, &qubits, &phases);
            c.u(target, hadamard());
        }
    }
}

fn and_tree(c: &mut Circuit, controls: &[usize], ancillas: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut level: Vec<usize> = controls.to_vec();
    let mut free = ancillas.iter().copied();
    let mut ops = Vec::new();
    while level.len() > 2 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            if let [a, b] = *pair {
                let anc = free.next().expect("ancilla count checked by caller");
                toffoli(c, a, b, anc);
                ops.push((a, b, anc));
                next.push(anc);
            } else {
                next.push(pair[0]);
            }
        }
        level = next;
    }
    ops.push((level[0], level[1], usize::MAX));
    ops
}

/// `|x_1…x_k, b⟩ ↦ |x_1…x_k, b ⊕ ∏ x_i⟩`, restoring `ancillas`.
pub fn build_nfold_toffoli(
    controls: &[usize],
    target: usize,
    ancillas: &[usize],
    mode: ToffoliMode,
) -> Result<Circuit> {
    let used: &[usize] = if mode == ToffoliMode::LogDepth { ancillas } else { &[] };
    let mut c = Circuit::new(register_width(&[controls, &[target], used])?);
    let k = controls.len();
    match mode {
        ToffoliMode::NoAncilla => mcx_no_ancilla(&mut c, controls, target),
        ToffoliMode::LogDepth if k < 3 => mcx_no_ancilla(&mut c, controls, target),
        ToffoliMode::LogDepth => {
            if ancillas.len() < k {
                return Err(SynthError::InsufficientAncillas { needed: k, available: ancillas.len() });
            }
            c.declare_ancillas(ancillas.iter().copied())?;
            let mut ops = and_tree(&mut c, controls, ancillas);
            let (a, b, _) = ops.pop().expect("tree has a root");
            toffoli(&mut c, a, b, target);
            for &(a, b, anc) in ops.iter().rev() {
                toffoli(&mut c, a, b, anc);
            }
        }
    }
    Ok(c)
}

/// Applies `v` to `target` iff the first `prefix.len` qubits of `ctrl_reg` spell `prefix`.
///
/// Emitted as an X-frame on the zero bits of the prefix, an `ℓ`-fold Toffoli onto `ancilla`,
/// the `e^{iα} A X B X C` factorization of `v` with the X's controlled by the ancilla and the
/// phase `R(α)` on the ancilla, then the Toffoli and X-frame undone. An empty prefix emits `v`.
pub fn build_prefix_ctrl_1q(
    prefix: Prefix,
    ctrl_reg: &[usize],
    target: usize,
    ancilla: usize,
    v: &Mat2,
) -> Result<Circuit> {
    if prefix.len > ctrl_reg.len() {
        return Err(SynthError::InvalidArgument(format!(
            "prefix of length {} on a {}-qubit register",
            prefix.len,
            ctrl_reg.len()
        )));
    }
    let mut c = Circuit::new(register_width(&[ctrl_reg, &[target, ancilla]])?);
    c.declare_ancilla(ancilla)?;
    if prefix.len == 0 {
        c.u(target, *v);
        return Ok(c);
    }
    let f = axbxc_factor(v)?;
    let (frame, mark) = prefix_marker(prefix, ctrl_reg, ancilla);
    c.extend_from(&frame)?;
    c.extend_from(&mark)?;
    c.u(target, f.c).cx(ancilla, target).u(target, f.b).cx(ancilla, target);
    c.u(target, f.a).u(ancilla, phase(f.alpha));
    c.extend_from(&mark.adjoint())?;
    c.extend_from(&frame)?;
    Ok(c)
}

/// X-frame on the zero bits of `prefix` and the Toffoli writing `[t_{≤ℓ} = prefix]` onto `ancilla`.
pub(crate) fn prefix_marker(prefix: Prefix, ctrl_reg: &[usize], ancilla: usize) -> (Circuit, Circuit) {
    let width = ctrl_reg.iter().chain([&ancilla]).max().map_or(0, |&q| q + 1);
    let mut frame = Circuit::new(width);
    for (i, &q) in ctrl_reg.iter().enumerate().take(prefix.len) {
        if !prefix.bit(i) {
            frame.u(q, pauli_x());
        }
    }
    let mut mark = Circuit::new(width);
    mcx_no_ancilla(&mut mark, &ctrl_reg[..prefix.len], ancilla);
    (frame, mark)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_shapes() {
        let c = build_copy(1, 1, &[0], &[vec![1]]).unwrap();
        assert_eq!((c.size(), c.depth()), (1, 1));
        let c = build_copy(1, 3, &[0], &[vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!((c.size(), c.depth()), (3, 2));
        let c = build_copy(2, 2, &[0, 1], &[vec![2, 3], vec![4, 5]]).unwrap();
        assert_eq!((c.size(), c.depth(), c.cnot_count()), (4, 2, 4));
        let c = build_copy(3, 7, &[0, 1, 2], &(1..8).map(|r| vec![3 * r, 3 * r + 1, 3 * r + 2]).collect::<Vec<_>>())
            .unwrap();
        assert_eq!(c.depth(), 3);
        assert!(build_copy(1, 1, &[0], &[vec![0]]).is_err());
    }

    #[test]
    fn toffoli_insufficient_ancillas() {
        let r = build_nfold_toffoli(&[0, 1, 2, 3], 4, &[5, 6], ToffoliMode::LogDepth);
        assert_eq!(r.unwrap_err(), SynthError::InsufficientAncillas { needed: 4, available: 2 });
    }

    #[test]
    fn toffoli_small_cases() {
        let c = build_nfold_toffoli(&[0], 1, &[], ToffoliMode::NoAncilla).unwrap();
        assert_eq!((c.size(), c.cnot_count()), (1, 1));
        let c = build_nfold_toffoli(&[0, 1], 2, &[], ToffoliMode::NoAncilla).unwrap();
        assert_eq!((c.size(), c.cnot_count()), (15, 6));
    }
}
