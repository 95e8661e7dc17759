//! General unitary synthesis and the column oracle `|x⟩|0^n⟩ ↦ |x⟩|u_x⟩`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::cqsp::{
    build_cqsp, case1_on, controlled_layers_min_ancillas, cqsp_on, measured_layer_constant, CqspMethod, CqspSpec,
};
use crate::error::{Result, SynthError};
use crate::linalg::{csd_factor, demultiplex, dyn_to_mat2, ensure_unitary, nearest_unitary2, CMat, C64};
use crate::ucg::{rotation_mux, RotationAxis};

fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(SynthError::InvalidArgument(format!("dimension {dim} is not 2^n with n >= 1")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Cosine-sine recursion on qubits `0..n`, splitting on qubit `n - 1`.
///
/// The side factors `diag(V', V'')` become `R`, a `Z`-multiplexor on the top qubit
/// and `L`; the middle factor is a `Y`-multiplexor with angles `-2θ`.
fn csd_on(c: &mut Circuit, n: usize, u: &CMat) -> Result<()> {
    if n == 1 {
        c.u(0, nearest_unitary2(&dyn_to_mat2(u)));
        return Ok(());
    }
    let f = csd_factor(u)?;
    let lower: Vec<usize> = (0..n - 1).collect();
    let top = n - 1;
    let side = |c: &mut Circuit, v: &CMat, w: &CMat| -> Result<()> {
        let d = demultiplex(v, w)?;
        csd_on(c, n - 1, &d.r)?;
        let angles: Vec<f64> = d.d.iter().map(|z| -2.0 * z.arg()).collect();
        rotation_mux(c, RotationAxis::Z, &lower, top, &angles);
        csd_on(c, n - 1, &d.l)
    };
    side(c, &f.v2p, &f.v2pp)?;
    let angles: Vec<f64> = f.thetas.iter().map(|t| -2.0 * t).collect();
    rotation_mux(c, RotationAxis::Y, &lower, top, &angles);
    side(c, &f.v1p, &f.v1pp)
}

/// Exact synthesis of an `n`-qubit unitary on qubits `0..n`.
///
/// The recursion uses no ancillas; the budget only matters for the oracle builders.
pub fn build_unitary_csd(u: &CMat, _budget: usize) -> Result<Circuit> {
    if u.nrows() != u.ncols() {
        return Err(SynthError::DimensionMismatch { expected: u.nrows(), got: u.ncols() });
    }
    let n = qubit_count(u.nrows())?;
    ensure_unitary(u, 1e-10)?;
    let mut c = Circuit::new(n);
    csd_on(&mut c, n, u)?;
    Ok(c)
}

/// CNOTs emitted by [`build_unitary_csd`]: `C(1) = 0`, `C(n) = 4C(n-1) + 3·2^{n-1}`.
pub fn csd_cnot_count(n: usize) -> u64 {
    (1..n).fold(0u64, |acc, j| 4 * acc + 3 * (1u64 << j))
}

/// `⌈(4^n - 3n - 1)/4⌉`, the minimum CNOT count of a generic `n`-qubit unitary.
pub fn lower_bound_cnots(n: usize) -> u64 {
    let num = (1u64 << (2 * n)) - 3 * n as u64 - 1;
    num.div_ceil(4)
}

/// The unitary whose columns the oracle writes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    pub u: CMat,
}

impl OracleSpec {
    pub fn new(u: CMat) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(SynthError::DimensionMismatch { expected: u.nrows(), got: u.ncols() });
        }
        qubit_count(u.nrows())?;
        ensure_unitary(&u, 1e-10)?;
        Ok(OracleSpec { u })
    }

    pub fn num_qubits(&self) -> usize {
        self.u.nrows().trailing_zeros() as usize
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        self.u.column_iter().map(|col| col.iter().copied().collect()).collect()
    }
}

/// `O_U`: controls `0..n`, targets `n..2n`, `m` ancillas after.
pub fn build_oracle(spec: &OracleSpec, m: usize) -> Result<Circuit> {
    let n = spec.num_qubits();
    build_cqsp(&CqspSpec::new(n, n, spec.columns())?, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleBranch {
    /// Growing UCGs over the selector and column registers, no ancillas.
    Cascade,
    /// One controlled preparation over all `n` control qubits.
    Cqsp,
}

impl OracleBranch {
    pub fn name(self) -> &'static str {
        match self {
            OracleBranch::Cascade => "cascade",
            OracleBranch::Cqsp => "cqsp",
        }
    }
}

impl fmt::Display for OracleBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleBranch {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cascade" => Ok(OracleBranch::Cascade),
            "cqsp" => Ok(OracleBranch::Cqsp),
            other => Err(SynthError::InvalidArgument(format!("unknown oracle branch {other:?}"))),
        }
    }
}

/// Budget at or below which the cascade branch is used: `2(n + c·k)·2^k`.
pub fn controlled_oracle_threshold(n: usize, k: usize) -> usize {
    let c = measured_layer_constant(k);
    (2.0 * (n as f64 + c * k as f64) * (1u64 << k) as f64).floor() as usize
}

/// Result of [`build_controlled_oracle`].
#[derive(Debug, Clone)]
pub struct ControlledOracle {
    pub circuit: Circuit,
    pub branch: OracleBranch,
    /// Inner method when the CQSP branch was taken.
    pub method: Option<CqspMethod>,
}

/// `Σ_x |x⟩⟨x| ⊗ O_{U_x}` for a family of `k`-qubit unitaries indexed by `x ∈ {0,1}^{n-k}`.
///
/// Registers: selectors `0..n-k`, column selectors `n-k..n`, targets `n..n+k`, then `m`
/// ancillas. `force` picks a branch instead of comparing `m` with
/// [`controlled_oracle_threshold`].
pub fn build_controlled_oracle(
    family: &[CMat],
    m: usize,
    force: Option<OracleBranch>,
) -> Result<ControlledOracle> {
    let first = family
        .first()
        .ok_or_else(|| SynthError::InvalidArgument("empty oracle family".into()))?;
    let k = qubit_count(first.nrows())?;
    if !family.len().is_power_of_two() {
        return Err(SynthError::InvalidArgument(format!("family size {} is not a power of two", family.len())));
    }
    let sel = family.len().trailing_zeros() as usize;
    let n = sel + k;
    // index bit j is control qubit j: low bits select x, high bits pick the column
    let mut states = vec![Vec::new(); 1 << n];
    for (x, u) in family.iter().enumerate() {
        if u.shape() != first.shape() {
            return Err(SynthError::DimensionMismatch { expected: first.nrows(), got: u.nrows() });
        }
        ensure_unitary(u, 1e-10)?;
        for y in 0..1usize << k {
            states[x | (y << sel)] = u.column(y).iter().copied().collect();
        }
    }
    let branch = force.unwrap_or(if m <= controlled_oracle_threshold(n, k) {
        OracleBranch::Cascade
    } else {
        OracleBranch::Cqsp
    });
    let total = n + k + m;
    let mut c = Circuit::new(total);
    c.declare_ancillas(n + k..total)?;
    let controls: Vec<usize> = (0..n).collect();
    let targets: Vec<usize> = (n..n + k).collect();
    let pool: Vec<usize> = (n + k..total).collect();
    let method = match branch {
        OracleBranch::Cascade => {
            case1_on(&mut c, &controls, &targets, &states)?;
            None
        }
        OracleBranch::Cqsp => {
            let needed = controlled_layers_min_ancillas(k, n);
            if force.is_some() && m < needed {
                return Err(SynthError::InsufficientAncillas { needed, available: m });
            }
            Some(cqsp_on(&mut c, &controls, &targets, &states, &pool)?)
        }
    };
    Ok(ControlledOracle { circuit: c, branch, method })
}

/// Closed-form depth and size model of the ancilla-assisted unitary recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthModelPoint {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub predicted_depth: f64,
    pub predicted_size: f64,
}

/// `depth = n·2^{n-k/2} + 2^{2n+k/2}/m`, `size = m·2^{n-k/2} + 2^{2n+k/2}`.
pub fn depth_model(n: usize, k: usize, m: usize) -> Result<DepthModelPoint> {
    if k < 1 || k > n || m < 1 {
        return Err(SynthError::InvalidArgument(format!(
            "depth model needs 1 <= k <= n and m >= 1, got n={n} k={k} m={m}"
        )));
    }
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    let a = (nf - kf / 2.0).exp2();
    let b = (2.0 * nf + kf / 2.0).exp2();
    Ok(DepthModelPoint { n, k, m, predicted_depth: nf * a + b / mf, predicted_size: mf * a + b })
}

/// `k* = clamp(round(log₂(n·m) - n), 1, n)`, balancing the two depth terms.
pub fn k_star(n: usize, m: usize) -> usize {
    let raw = ((n as f64) * (m.max(1) as f64)).log2() - n as f64;
    (raw.round().max(1.0) as usize).clamp(1, n.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, operator_distance};
    use crate::sim::extract_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lower_bound_values() {
        assert_eq!(lower_bound_cnots(1), 0);
        assert_eq!(lower_bound_cnots(2), 3);
        assert_eq!(lower_bound_cnots(3), 14);
    }

    #[test]
    fn cnot_recurrence_closed_form() {
        for n in 1..10 {
            let closed = 3 * (1u64 << (2 * n)) / 4 - 3 * (1u64 << n) / 2;
            assert_eq!(csd_cnot_count(n), closed);
        }
    }

    #[test]
    fn csd_two_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(4, &mut rng);
        let c = build_unitary_csd(&u, 0).unwrap();
        let got = extract_unitary(&c, &[0, 1]).unwrap();
        assert!(operator_distance(&got, &u) < 1e-9);
        assert_eq!(c.cnot_count() as u64, csd_cnot_count(2));
    }

    #[test]
    fn depth_model_example() {
        let p = depth_model(4, 2, 16).unwrap();
        assert_eq!(p.predicted_depth, 64.0);
        assert_eq!(k_star(6, 384), 5);
        assert!(depth_model(3, 0, 1).is_err());
        assert!(depth_model(3, 4, 1).is_err());
        assert!(depth_model(3, 1, 0).is_err());
    }
}
