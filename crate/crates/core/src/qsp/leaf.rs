use crate::circuit::Circuit;
use crate::error::{Result, SynthError};
use crate::linalg::{pauli_x, Prefix};
use crate::primitives::{build_nfold_toffoli, ToffoliMode};
use crate::ucg::register_width;

/// One bit `z_x` per interior node `x ∈ {0,1}^{<n}`, indexed by [`Prefix::id`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafAssignment {
    n: usize,
    bits: Vec<bool>,
}

impl LeafAssignment {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != (1 << n) - 1 {
            return Err(SynthError::DimensionMismatch { expected: (1 << n) - 1, got: bits.len() });
        }
        Ok(LeafAssignment { n, bits })
    }

    /// Bit `id` of `word` is `z` at node `Prefix::from_id(id)`.
    pub fn from_word(n: usize, word: usize) -> Self {
        LeafAssignment { n, bits: (0..(1 << n) - 1).map(|id| (word >> id) & 1 == 1).collect() }
    }

    pub fn num_levels(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: Prefix) -> bool {
        self.bits[x.id()]
    }
}

/// Leaf reached from the root by stepping to child `x·z_x` at every node `x`.
pub fn leaf_function(z: &LeafAssignment) -> Prefix {
    let mut x = Prefix::ROOT;
    while x.len < z.n {
        x = x.child(z.get(x));
    }
    x
}

/// `|z, a⟩ ↦ |z, a ⊕ ℓ(z)⟩` where `node_qubits[id]` holds `z` at node `Prefix::from_id(id)`.
///
/// Level by level, one-hot flags `O_x` mark the node the walk visits at each depth;
/// `out[j]` collects `O_x ∧ z_x` over depth-`j` nodes. Needs `2^n - 2` scratch ancillas.
pub fn build_u_leaf(n: usize, node_qubits: &[usize], out_reg: &[usize], ancillas: &[usize]) -> Result<Circuit> {
    let nodes = (1usize << n) - 1;
    if node_qubits.len() != nodes || out_reg.len() != n {
        return Err(SynthError::DimensionMismatch { expected: nodes, got: node_qubits.len() });
    }
    let needed = nodes.saturating_sub(1);
    if ancillas.len() < needed {
        return Err(SynthError::InsufficientAncillas { needed, available: ancillas.len() });
    }
    let scratch = &ancillas[..needed];
    let mut c = Circuit::new(register_width(&[node_qubits, out_reg, scratch])?);
    c.declare_ancillas(scratch.iter().copied())?;
    if n == 0 {
        return Ok(c);
    }
    // Flag of node x (depth ≥ 1) lives on scratch[id(x) - 1].
    let flag = |x: Prefix| scratch[x.id() - 1];
    let z = |x: Prefix| node_qubits[x.id()];
    let and = |c: &mut Circuit, a: usize, b: usize, t: usize| -> Result<()> {
        c.extend_from(&build_nfold_toffoli(&[a, b], t, &[], ToffoliMode::LogDepth)?)
    };

    let mut compute = Circuit::new(c.num_qubits());
    if n >= 2 {
        let root = Prefix::ROOT;
        compute.cx(z(root), flag(root.child(true)));
        compute.cx(z(root), flag(root.child(false)));
        compute.u(flag(root.child(false)), pauli_x());
        for depth in 1..n - 1 {
            for bits in 0..1usize << depth {
                let x = Prefix::new(depth, bits);
                and(&mut compute, flag(x), z(x), flag(x.child(true)))?;
                compute.cx(flag(x), flag(x.child(false)));
                compute.cx(flag(x.child(true)), flag(x.child(false)));
            }
        }
    }
    c.cx(z(Prefix::ROOT), out_reg[0]);
    c.extend_from(&compute)?;
    for (j, &out) in out_reg.iter().enumerate().skip(1) {
        for bits in 0..1usize << j {
            let x = Prefix::new(j, bits);
            and(&mut c, flag(x), z(x), out)?;
        }
    }
    c.extend_from(&compute.adjoint())?;
    Ok(c)
}
