//! Gate-level circuits over single-qubit gates and CNOT.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Result, SynthError};
use crate::linalg::{unitarity_residual2, Mat2};

/// Tolerance on `‖M M^dagger - I‖_max` for single-qubit gate matrices.
pub const GATE_UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    OneQubit { target: usize, matrix: Mat2 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn one_qubit(target: usize, matrix: Mat2) -> Self {
        Gate::OneQubit { target, matrix }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::OneQubit { target, .. } | Gate::Cnot { target, .. } => target,
        }
    }

    /// Qubits touched, target last.
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Gate::OneQubit { target, .. } => (None, target),
            Gate::Cnot { control, target } => (Some(control), target),
        };
        a.into_iter().chain(std::iter::once(b))
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Gate::OneQubit { target, matrix } => Gate::OneQubit { target: *target, matrix: matrix.adjoint() },
            g => g.clone(),
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(SynthError::QubitOutOfRange { index: q, num_qubits });
            }
        }
        match self {
            Gate::Cnot { control, target } if control == target => Err(SynthError::CnotSelfLoop(*target)),
            Gate::OneQubit { matrix, .. } => {
                let residual = unitarity_residual2(matrix);
                if residual > GATE_UNITARITY_TOL {
                    Err(SynthError::NonUnitaryGate { residual })
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn mapped(&self, map: &[usize]) -> Self {
        match self {
            Gate::OneQubit { target, matrix } => Gate::OneQubit { target: map[*target], matrix: *matrix },
            Gate::Cnot { control, target } => Gate::Cnot { control: map[*control], target: map[*target] },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub depth: usize,
    pub size: usize,
    pub ancilla_count: usize,
    pub cnot_count: usize,
}

/// An ordered gate list with an ancilla ledger.
///
/// Depth is greedy ASAP layering, kept up to date on every append.
#[derive(Debug, Clone)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    ancillas: BTreeSet<usize>,
    frontier: Vec<usize>,
    depth: usize,
    cnot_count: usize,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.num_qubits == other.num_qubits && self.gates == other.gates && self.ancillas == other.ancillas
    }
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            ancillas: BTreeSet::new(),
            frontier: vec![0; num_qubits],
            depth: 0,
            cnot_count: 0,
        }
    }

    pub fn from_gates(num_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn ancillas(&self) -> &BTreeSet<usize> {
        &self.ancillas
    }

    pub fn declare_ancilla(&mut self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(SynthError::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
        }
        self.ancillas.insert(q);
        Ok(())
    }

    pub fn declare_ancillas(&mut self, qs: impl IntoIterator<Item = usize>) -> Result<()> {
        qs.into_iter().try_for_each(|q| self.declare_ancilla(q))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn cnot_count(&self) -> usize {
        self.cnot_count
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            depth: self.depth,
            size: self.size(),
            ancilla_count: self.ancillas.len(),
            cnot_count: self.cnot_count,
        }
    }

    /// Validates and appends `g`.
    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.num_qubits)?;
        self.push_unchecked(g);
        Ok(())
    }

    /// Consuming form of [`Circuit::push`].
    pub fn append(mut self, g: Gate) -> Result<Self> {
        self.push(g)?;
        Ok(self)
    }

    fn push_unchecked(&mut self, g: Gate) {
        let layer = g.qubits().map(|q| self.frontier[q]).max().unwrap_or(0) + 1;
        for q in g.qubits() {
            self.frontier[q] = layer;
        }
        self.depth = self.depth.max(layer);
        self.cnot_count += usize::from(g.is_cnot());
        self.gates.push(g);
    }

    /// Appends a single-qubit gate.
    ///
    /// # Panics
    /// On an out-of-range target or a non-unitary matrix.
    pub fn u(&mut self, target: usize, matrix: Mat2) -> &mut Self {
        if let Err(e) = self.push(Gate::OneQubit { target, matrix }) {
            panic!("invalid single-qubit gate: {e}");
        }
        self
    }

    /// Appends a CNOT.
    ///
    /// # Panics
    /// On out-of-range or coinciding qubits.
    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        if let Err(e) = self.push(Gate::Cnot { control, target }) {
            panic!("invalid CNOT: {e}");
        }
        self
    }

    /// Appends all gates of `other`, whose qubit `i` is this circuit's qubit `i`.
    pub fn extend_from(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(SynthError::QubitCountMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        for g in &other.gates {
            self.push_unchecked(g.clone());
        }
        self.ancillas.extend(other.ancillas.iter().copied());
        Ok(())
    }

    /// Appends `other` with its qubit `i` placed on `map[i]`.
    pub fn extend_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.num_qubits {
            return Err(SynthError::DimensionMismatch { expected: other.num_qubits, got: map.len() });
        }
        let mut seen = BTreeSet::new();
        for &q in map {
            if q >= self.num_qubits {
                return Err(SynthError::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
            if !seen.insert(q) {
                return Err(SynthError::OverlappingRegisters(q));
            }
        }
        for g in &other.gates {
            self.push_unchecked(g.mapped(map));
        }
        self.ancillas.extend(other.ancillas.iter().map(|&q| map[q]));
        Ok(())
    }

    /// `a` followed by `b`.
    pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
        if a.num_qubits != b.num_qubits {
            return Err(SynthError::QubitCountMismatch { left: a.num_qubits, right: b.num_qubits });
        }
        let mut c = a.clone();
        c.extend_from(b)?;
        Ok(c)
    }

    pub fn adjoint(&self) -> Circuit {
        let mut c = Circuit::new(self.num_qubits);
        c.ancillas = self.ancillas.clone();
        for g in self.gates.iter().rev() {
            c.push_unchecked(g.adjoint());
        }
        c
    }

    /// Relabels qubit `i` as `perm[i]`.
    pub fn remap(&self, perm: &[usize]) -> Result<Circuit> {
        if perm.len() != self.num_qubits {
            return Err(SynthError::InvalidPermutation(format!(
                "length {} for {} qubits",
                perm.len(),
                self.num_qubits
            )));
        }
        let mut seen = vec![false; self.num_qubits];
        for &p in perm {
            if p >= self.num_qubits || std::mem::replace(&mut seen[p], true) {
                return Err(SynthError::InvalidPermutation(format!("{perm:?} is not a bijection")));
            }
        }
        let mut c = Circuit::new(self.num_qubits);
        c.extend_mapped(self, perm)?;
        c.ancillas = self.ancillas.iter().map(|&q| perm[q]).collect();
        Ok(c)
    }

    /// Depth recomputed from scratch; always equals [`Circuit::depth`].
    pub fn recompute_depth(&self) -> usize {
        let mut frontier = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let layer = g.qubits().map(|q| frontier[q]).max().unwrap_or(0) + 1;
            for q in g.qubits() {
                frontier[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    /// Gates of `range` as a standalone circuit on the same register.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Circuit {
        let mut c = Circuit::new(self.num_qubits);
        for g in &self.gates[range] {
            c.push_unchecked(g.clone());
        }
        c
    }

    /// Qubits touched by at least one gate.
    pub fn support(&self) -> BTreeSet<usize> {
        self.gates.iter().flat_map(Gate::qubits).collect()
    }
}
