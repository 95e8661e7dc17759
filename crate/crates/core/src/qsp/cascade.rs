use crate::circuit::Circuit;
use crate::error::Result;
use crate::linalg::{amplitude_tree, AmplitudeTree, Mat2, Prefix, C64};
use crate::ucg::ucg_chain;

/// Multiplexor tables of the cascade: level `j` is indexed by the value of qubits `0..j`.
pub fn cascade_levels(tree: &AmplitudeTree) -> Vec<Vec<Mat2>> {
    (0..tree.num_levels())
        .map(|j| (0..1usize << j).map(|x| tree.node_unitary(Prefix::new(j, x))).collect())
        .collect()
}

/// `n` UCGs of growing size, the `j`-th targeting qubit `j` controlled by qubits `0..j`.
///
/// The kernel needs no ancillas, so the circuit has exactly `n` qubits whatever the budget.
pub fn build_qsp_cascade(v: &[C64], _budget: usize) -> Result<Circuit> {
    let tree = amplitude_tree(v)?;
    let n = tree.num_levels();
    let mut c = Circuit::new(n);
    let qubits: Vec<usize> = (0..n).collect();
    let mut levels = cascade_levels(&tree);
    ucg_chain(&mut c, &[], &qubits, |j| std::mem::take(&mut levels[j]));
    Ok(c)
}
