//! End-to-end checks of emitted circuits against what they were built from.
//!
//! Targets always sit on the low qubits: a state on `0..n`, a controlled
//! preparation on `0..k+n`, a unitary on `0..n`. Every other qubit must start and
//! end in `|0⟩`.

use std::fmt;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::cqsp::CqspSpec;
use crate::error::{Result, SynthError};
use crate::linalg::{operator_distance, CMat, C64};
use crate::sim::{overlap, simulate_basis, StateVector, MAX_EXTRACT_QUBITS, SPARSE_QUBIT_CAP};

/// Rough gate-amplitude updates above which a check is reported as unverifiable.
pub const WORK_LIMIT: f64 = (1u64 << 31) as f64;

#[derive(Debug, Clone)]
pub enum Target {
    State(StateVector),
    Cqsp(CqspSpec),
    Unitary(CMat),
}

impl Target {
    /// Width of the register the target lives on.
    pub fn num_qubits(&self) -> usize {
        match self {
            Target::State(s) => s.num_qubits(),
            Target::Cqsp(spec) => spec.k + spec.n,
            Target::Unitary(u) => u.nrows().trailing_zeros() as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Unverifiable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Passed => "passed",
            Status::Failed => "failed",
            Status::Unverifiable => "unverifiable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// Worst fidelity `|⟨want|got⟩|` over inputs, or `1 - distance` for unitaries.
    pub fidelity: f64,
    /// Operator distance, for unitary targets.
    pub distance: Option<f64>,
    /// Worst probability left outside the target register.
    pub leaked: f64,
    pub reason: Option<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }

    fn unverifiable(reason: String) -> Self {
        Verdict { status: Status::Unverifiable, fidelity: f64::NAN, distance: None, leaked: f64::NAN, reason: Some(reason) }
    }
}

fn estimated_work(c: &Circuit, on: usize, inputs: usize) -> f64 {
    c.len() as f64 * (on.min(c.num_qubits()) as f64).exp2() * inputs as f64
}

/// Checks `c` against `target` with tolerance `tol` on infidelity, distance and leak.
pub fn verify(c: &Circuit, target: &Target, tol: f64) -> Result<Verdict> {
    let width = target.num_qubits();
    if width > c.num_qubits() {
        return Err(SynthError::QubitCountMismatch { left: c.num_qubits(), right: width });
    }
    if c.num_qubits() > SPARSE_QUBIT_CAP {
        return Ok(Verdict::unverifiable(format!(
            "{} qubits exceed the simulator limit of {SPARSE_QUBIT_CAP}",
            c.num_qubits()
        )));
    }
    let inputs = match target {
        Target::State(_) => 1,
        Target::Cqsp(spec) => 1 << spec.k,
        Target::Unitary(_) => 1 << width,
    };
    if matches!(target, Target::Unitary(_)) && width > MAX_EXTRACT_QUBITS {
        return Ok(Verdict::unverifiable(format!("{width}-qubit operator is too large to extract")));
    }
    if estimated_work(c, width, inputs) > WORK_LIMIT {
        return Ok(Verdict::unverifiable(format!(
            "simulating {} gates on {} qubits is beyond desk scale",
            c.len(),
            c.num_qubits()
        )));
    }
    let on: Vec<usize> = (0..width).collect();
    let mut leaked: f64 = 0.0;
    let mut fidelity: f64 = 1.0;
    let mut distance = None;
    match target {
        Target::State(s) => {
            let r = simulate_basis(c, 0, &on)?;
            leaked = r.leaked;
            fidelity = overlap(s.amplitudes(), &r.local).norm();
        }
        Target::Cqsp(spec) => {
            for i in 0..1usize << spec.k {
                let r = simulate_basis(c, i, &on)?;
                leaked = leaked.max(r.leaked);
                let got: Vec<C64> = (0..1usize << spec.n).map(|t| r.local[i | t << spec.k]).collect();
                fidelity = fidelity.min(overlap(&spec.states[i], &got).norm());
            }
        }
        Target::Unitary(u) => {
            let dim = 1 << width;
            let mut m = CMat::zeros(dim, dim);
            for x in 0..dim {
                let r = simulate_basis(c, x, &on)?;
                leaked = leaked.max(r.leaked);
                for (y, a) in r.local.into_iter().enumerate() {
                    m[(y, x)] = a;
                }
            }
            let d = operator_distance(&m, u);
            distance = Some(d);
            fidelity = 1.0 - d;
        }
    }
    let fidelity = fidelity.min(1.0);
    let reason = if leaked > tol {
        Some(format!("ancilla not restored: probability {leaked:.3e} left outside the target register"))
    } else if let Some(d) = distance.filter(|&d| d > tol) {
        Some(format!("operator distance {d:.3e} exceeds tolerance {tol:.1e}"))
    } else if 1.0 - fidelity > tol {
        Some(format!("fidelity {fidelity:.12} is below 1 - {tol:.1e}"))
    } else {
        None
    };
    let status = if reason.is_none() { Status::Passed } else { Status::Failed };
    Ok(Verdict { status, fidelity, distance, leaked, reason })
}
