//! Uniformly controlled gates (multiplexors) and uniformly controlled unitaries.
//!
//! A table index `x` has bit `j` equal to the value of `controls[j]`.

use std::collections::BTreeSet;

use crate::circuit::Circuit;
use crate::error::{Result, SynthError};
use crate::linalg::{
    diag2, dyn_to_mat2, ensure_unitary, hadamard, nearest_unitary2, pauli_x, ry, rz, unitarity_residual2, CMat, Mat2, C64, ONE,
    ZERO,
};
use crate::primitives::{build_copy, build_nfold_toffoli, ToffoliMode};

/// Width needed to hold every qubit in `regs`; fails if any index repeats.
pub(crate) fn register_width(regs: &[&[usize]]) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for &q in regs.iter().flat_map(|r| r.iter()) {
        if !seen.insert(q) {
            return Err(SynthError::OverlappingRegisters(q));
        }
    }
    Ok(seen.last().map_or(0, |&q| q + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationAxis {
    Y,
    Z,
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Multiplexed rotation `Σ_x |x⟩⟨x| ⊗ R(angles[x])` using `2^k` rotations and `2^k` CNOTs.
pub fn rotation_mux(c: &mut Circuit, axis: RotationAxis, controls: &[usize], target: usize, angles: &[f64]) {
    let k = controls.len();
    let n = 1usize << k;
    assert_eq!(angles.len(), n, "rotation table size");
    let rot = |t: f64| match axis {
        RotationAxis::Y => ry(t),
        RotationAxis::Z => rz(t),
    };
    if k == 0 {
        c.u(target, rot(angles[0]));
        return;
    }
    for i in 0..n {
        let g = gray(i);
        let s: f64 = angles
            .iter()
            .enumerate()
            .map(|(x, &t)| if (g & x).count_ones().is_multiple_of(2) { t } else { -t })
            .sum();
        c.u(target, rot(s / n as f64));
        let flip = g ^ gray((i + 1) % n);
        c.cx(controls[flip.trailing_zeros() as usize], target);
    }
}

/// Exact diagonal `diag(e^{i phases[x]})` over `qubits` (bit `j` of `x` is `qubits[j]`).
pub fn diagonal(c: &mut Circuit, qubits: &[usize], phases: &[f64]) {
    assert_eq!(phases.len(), 1 << qubits.len(), "diagonal size");
    match qubits.len() {
        0 => {}
        1 => {
            c.u(qubits[0], diag2(C64::from_polar(1.0, phases[0]), C64::from_polar(1.0, phases[1])));
        }
        _ => {
            let half = phases.len() / 2;
            let (mut theta, mut mean) = (Vec::with_capacity(half), Vec::with_capacity(half));
            for y in 0..half {
                let (p0, p1) = (phases[2 * y], phases[2 * y + 1]);
                theta.push(p1 - p0);
                mean.push((p0 + p1) / 2.0);
            }
            rotation_mux(c, RotationAxis::Z, &qubits[1..], qubits[0], &theta);
            diagonal(c, &qubits[1..], &mean);
        }
    }
}

pub fn build_diagonal(qubits: &[usize], phases: &[f64]) -> Result<Circuit> {
    let mut c = Circuit::new(register_width(&[qubits])?);
    if phases.len() != 1 << qubits.len() {
        return Err(SynthError::DimensionMismatch { expected: 1 << qubits.len(), got: phases.len() });
    }
    diagonal(&mut c, qubits, phases);
    Ok(c)
}

enum Piece {
    Gate(Mat2),
    Cz(usize),
}

/// Splits the multiplexor into `pieces` (1q gates and CZs onto the target) followed by a
/// per-`x` diagonal: `table[x] = diag[x] * pieces(x)`.
fn mux_up_to_diagonal(controls: &[usize], table: &[Mat2]) -> (Vec<Piece>, Vec<[C64; 2]>) {
    let k = controls.len();
    if k == 0 {
        return (vec![Piece::Gate(table[0])], vec![[ONE, ONE]]);
    }
    let half = table.len() / 2;
    let mut lefts = Vec::with_capacity(half);
    let mut rights = Vec::with_capacity(half);
    let mut d0s = Vec::with_capacity(half);
    for x in 0..half {
        let (a, b) = (table[x], table[x + half]);
        let m = a * b.adjoint();
        let p = m[(0, 0)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let a0 = if p.norm() > 1e-14 { p / p.norm() } else { ONE };
        let a1 = -a0.conj() * det / det.norm();
        let d0 = diag2(a0, a1);
        // Traceless Hermitian with eigenvalues ±1.
        let h = d0.adjoint() * m;
        let (hr, w) = (h[(0, 0)].re, h[(0, 1)]);
        let cand1 = [w, C64::new(1.0 - hr, 0.0)];
        let cand2 = [C64::new(1.0 + hr, 0.0), w.conj()];
        let nrm = |v: &[C64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
        let v = if nrm(&cand1) >= nrm(&cand2) { cand1 } else { cand2 };
        let s = nrm(&v).sqrt();
        let (v0, v1) = (v[0] / s, v[1] / s);
        let l = Mat2::new(v0, -v1.conj(), v1, v0.conj());
        let r = l.adjoint() * d0.adjoint() * a;
        lefts.push(l);
        rights.push(r);
        d0s.push((a0, a1));
    }
    let lower = &controls[..k - 1];
    let (mut pieces, dr) = mux_up_to_diagonal(lower, &rights);
    let lefts: Vec<Mat2> = lefts.iter().zip(&dr).map(|(l, d)| l * diag2(d[0], d[1])).collect();
    let (pl, dl) = mux_up_to_diagonal(lower, &lefts);
    pieces.push(Piece::Cz(controls[k - 1]));
    pieces.extend(pl);
    let mut diag = Vec::with_capacity(table.len());
    for x in 0..half {
        diag.push([d0s[x].0 * dl[x][0], d0s[x].1 * dl[x][1]]);
    }
    diag.extend(dl.iter().copied());
    (pieces, diag)
}

/// Appends the multiplexor `Σ_x |x⟩⟨x| ⊗ table[x]` up to a diagonal, with `2^k` 1q gates and
/// `2^k - 1` CNOTs. Returns the missing diagonal `d`: the multiplexor equals
/// `diag(d)` applied after the emitted gates, where bit `j < k` of the index of `d` is
/// `controls[j]` and bit `k` is `target`.
pub fn ucg_up_to_diagonal(c: &mut Circuit, controls: &[usize], target: usize, table: &[Mat2]) -> Vec<C64> {
    assert_eq!(table.len(), 1 << controls.len(), "multiplexor table size");
    let k = controls.len();
    if k == 0 {
        c.u(target, nearest_unitary2(&table[0]));
        return vec![ONE, ONE];
    }
    let (pieces, diag) = mux_up_to_diagonal(controls, table);
    let h = hadamard();
    let last = pieces.len() - 1;
    for (i, p) in pieces.into_iter().enumerate() {
        match p {
            Piece::Cz(ctrl) => {
                c.cx(ctrl, target);
            }
            Piece::Gate(g) => {
                let g = if i > 0 { g * h } else { g };
                let g = if i < last { h * g } else { g };
                c.u(target, nearest_unitary2(&g));
            }
        }
    }
    let mut d = vec![ONE; 2 << k];
    for (x, dx) in diag.iter().enumerate() {
        d[x] = dx[0];
        d[x | 1 << k] = dx[1];
    }
    d
}

/// Appends the multiplexor `Σ_x |x⟩⟨x| ⊗ table[x]` with `2^k` 1q gates, `2^k - 1` CNOTs and
/// an exact diagonal, `6·2^k - 4` gates in total for `k ≥ 1`.
pub fn ucg(c: &mut Circuit, controls: &[usize], target: usize, table: &[Mat2]) {
    let d = ucg_up_to_diagonal(c, controls, target, table);
    if controls.is_empty() {
        return;
    }
    let mut qubits = controls.to_vec();
    qubits.push(target);
    let phases: Vec<f64> = d.iter().map(|z| z.arg()).collect();
    diagonal(c, &qubits, &phases);
}

/// Exact product `UCG_{m-1} ⋯ UCG_0` where `UCG_j` targets `targets[j]`, is controlled by
/// `base ++ targets[..j]` and has table `tables(j)`.
///
/// Each level's leftover diagonal lives on the next level's controls, so it is folded into
/// that level's table; only the last level pays for an exact diagonal.
pub fn ucg_chain(c: &mut Circuit, base: &[usize], targets: &[usize], mut tables: impl FnMut(usize) -> Vec<Mat2>) {
    let mut ctrl = base.to_vec();
    let mut carry = vec![ONE; 1 << base.len()];
    for (j, &t) in targets.iter().enumerate() {
        let table: Vec<Mat2> = tables(j).into_iter().zip(&carry).map(|(u, &d)| u * d).collect();
        if j + 1 == targets.len() {
            ucg(c, &ctrl, t, &table);
        } else {
            carry = ucg_up_to_diagonal(c, &ctrl, t, &table);
        }
        ctrl.push(t);
    }
}

/// Uniformly controlled unitary `V^S_T = Σ_x |x⟩⟨x|_S ⊗ table[x]` on targets `T`.
#[derive(Debug, Clone)]
pub struct UcuSpec {
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
    pub table: Vec<CMat>,
}

impl UcuSpec {
    pub fn new(controls: Vec<usize>, targets: Vec<usize>, table: Vec<CMat>) -> Result<Self> {
        register_width(&[&controls, &targets])?;
        if table.len() != 1 << controls.len() {
            return Err(SynthError::DimensionMismatch { expected: 1 << controls.len(), got: table.len() });
        }
        let dim = 1 << targets.len();
        for u in &table {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(SynthError::DimensionMismatch { expected: dim, got: u.nrows() });
            }
            ensure_unitary(u, 1e-10)?;
        }
        Ok(UcuSpec { controls, targets, table })
    }

    /// Dense matrix on `controls ++ targets` (controls in the low bits).
    pub fn matrix(&self) -> CMat {
        let k = self.controls.len();
        let t = self.targets.len();
        let mut m = CMat::zeros(1 << (k + t), 1 << (k + t));
        for (x, u) in self.table.iter().enumerate() {
            for r in 0..1 << t {
                for col in 0..1 << t {
                    m[(x | r << k, x | col << k)] = u[(r, col)];
                }
            }
        }
        m
    }
}

/// Single-target UCG. The kernel uses no ancillas, so `budget` only bounds what callers may reserve.
pub fn build_ucg(spec: &UcuSpec, _budget: usize) -> Result<Circuit> {
    if spec.targets.len() != 1 {
        return Err(SynthError::InvalidArgument(format!(
            "a UCG has one target, got {}",
            spec.targets.len()
        )));
    }
    let table: Vec<Mat2> = spec.table.iter().map(dyn_to_mat2).collect();
    let mut c = Circuit::new(register_width(&[&spec.controls, &spec.targets])?);
    ucg(&mut c, &spec.controls, spec.targets[0], &table);
    Ok(c)
}

/// Per-target single-qubit tables `U_i^x`, each of length `2^q`.
#[derive(Debug, Clone)]
pub struct LayeredTargets {
    pub tables: Vec<Vec<Mat2>>,
}

impl LayeredTargets {
    pub fn new(tables: Vec<Vec<Mat2>>) -> Result<Self> {
        let len = tables.first().map_or(1, Vec::len);
        if !len.is_power_of_two() {
            return Err(SynthError::InvalidArgument(format!("table length {len} is not a power of two")));
        }
        for t in &tables {
            if t.len() != len {
                return Err(SynthError::DimensionMismatch { expected: len, got: t.len() });
            }
            for u in t {
                let residual = unitarity_residual2(u);
                if residual > 1e-10 {
                    return Err(SynthError::NonUnitaryGate { residual });
                }
            }
        }
        Ok(LayeredTargets { tables })
    }

    pub fn num_controls(&self) -> usize {
        self.tables.first().map_or(0, |t| t.len().trailing_zeros() as usize)
    }
}

/// Copy registers for multi-target constructions: register 0 is `ctrl` itself.
struct CopyPlan {
    registers: Vec<Vec<usize>>,
    copy: Circuit,
    spare: Vec<usize>,
}

fn plan_copies(ctrl: &[usize], p: usize, ancillas: &[usize], extra: &[&[usize]]) -> Result<CopyPlan> {
    let q = ctrl.len();
    let copies = p.saturating_sub(1);
    let needed = copies * q;
    if ancillas.len() < needed {
        return Err(SynthError::InsufficientAncillas { needed, available: ancillas.len() });
    }
    let mut regs: Vec<&[usize]> = vec![ctrl, ancillas];
    regs.extend_from_slice(extra);
    let width = register_width(&regs)?;
    let mut registers = vec![ctrl.to_vec()];
    if q == 0 {
        registers.resize(p.max(1), Vec::new());
    } else {
        registers.extend(ancillas[..needed].chunks(q).map(<[usize]>::to_vec));
    }
    let mut copy = Circuit::new(width);
    if q > 0 && copies > 0 {
        copy.extend_from(&build_copy(q, copies, ctrl, &registers[1..])?)?;
    }
    Ok(CopyPlan { registers, copy, spare: ancillas[needed..].to_vec() })
}

/// `Σ_x |x⟩⟨x| ⊗ (⊗_i U_i^x)` via copies of `ctrl` and parallel UCGs.
///
/// Needs `(p - 1)·q` ancillas; target `i` is driven by copy register `i`, with
/// register 0 being `ctrl` itself.
pub fn build_multi_target_ucu(
    lt: &LayeredTargets,
    ctrl: &[usize],
    targets: &[usize],
    ancillas: &[usize],
) -> Result<Circuit> {
    if lt.tables.len() != targets.len() {
        return Err(SynthError::DimensionMismatch { expected: targets.len(), got: lt.tables.len() });
    }
    if !lt.tables.is_empty() && lt.num_controls() != ctrl.len() {
        return Err(SynthError::DimensionMismatch { expected: 1 << ctrl.len(), got: lt.tables[0].len() });
    }
    let plan = plan_copies(ctrl, targets.len(), ancillas, &[targets])?;
    let mut c = plan.copy.clone();
    c.declare_ancillas(ancillas.iter().copied())?;
    for (i, (&t, table)) in targets.iter().zip(&lt.tables).enumerate() {
        ucg(&mut c, &plan.registers[i], t, table);
    }
    c.extend_from(&plan.copy.adjoint())?;
    Ok(c)
}

/// A CNOT between two targets applied only when the control register holds `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnotPlacement {
    pub x: usize,
    pub control: usize,
    pub target: usize,
}

/// One layer of a family `W^x`: optional 1q tables per target index plus controlled CNOTs.
#[derive(Debug, Clone, Default)]
pub struct UcuLayer {
    pub one_qubit: Vec<(usize, Vec<Mat2>)>,
    pub cnots: Vec<CnotPlacement>,
}

/// `Σ_x |x⟩⟨x| ⊗ W^x` for a layered family `W^x` over `targets`.
pub fn build_layered_ucu(
    layers: &[UcuLayer],
    ctrl: &[usize],
    targets: &[usize],
    ancillas: &[usize],
) -> Result<Circuit> {
    let q = ctrl.len();
    let p = targets.len();
    for layer in layers {
        let mut used = BTreeSet::new();
        let mut mark = |i: usize| -> Result<()> {
            if i >= p {
                return Err(SynthError::QubitOutOfRange { index: i, num_qubits: p });
            }
            if !used.insert(i) {
                return Err(SynthError::OverlappingRegisters(targets[i]));
            }
            Ok(())
        };
        for (i, table) in &layer.one_qubit {
            mark(*i)?;
            if table.len() != 1 << q {
                return Err(SynthError::DimensionMismatch { expected: 1 << q, got: table.len() });
            }
        }
        for pl in &layer.cnots {
            if pl.x >= 1 << q {
                return Err(SynthError::InvalidArgument(format!("pattern {} for {q} controls", pl.x)));
            }
            mark(pl.control)?;
            if pl.target == pl.control {
                return Err(SynthError::CnotSelfLoop(targets[pl.target]));
            }
            mark(pl.target)?;
        }
    }
    let plan = plan_copies(ctrl, p, ancillas, &[targets])?;
    let mut c = plan.copy.clone();
    c.declare_ancillas(ancillas.iter().copied())?;
    for layer in layers {
        for (i, table) in &layer.one_qubit {
            ucg(&mut c, &plan.registers[*i], targets[*i], table);
        }
        for pl in &layer.cnots {
            let reg = &plan.registers[pl.target];
            let flips: Vec<usize> =
                reg.iter().enumerate().filter(|&(j, _)| (pl.x >> j) & 1 == 0).map(|(_, &qb)| qb).collect();
            for &f in &flips {
                c.u(f, pauli_x());
            }
            let mut controls = reg.clone();
            controls.push(targets[pl.control]);
            let mode = if plan.spare.len() >= controls.len() { ToffoliMode::LogDepth } else { ToffoliMode::NoAncilla };
            c.extend_from(&build_nfold_toffoli(&controls, targets[pl.target], &plan.spare, mode)?)?;
            for &f in &flips {
                c.u(f, pauli_x());
            }
        }
    }
    c.extend_from(&plan.copy.adjoint())?;
    Ok(c)
}

/// Dense block-diagonal reference for a multiplexed 1q table (used by tests and checks).
pub fn mux_matrix(table: &[Mat2]) -> CMat {
    let k = table.len().trailing_zeros() as usize;
    let mut m = CMat::from_element(2 << k, 2 << k, ZERO);
    for (x, u) in table.iter().enumerate() {
        for r in 0..2 {
            for col in 0..2 {
                m[(x | r << k, x | col << k)] = u[(r, col)];
            }
        }
    }
    m
}
