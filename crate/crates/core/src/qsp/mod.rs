//! State preparation: the UCG cascade and the tree-register construction whose
//! circuits split into state-independent blocks and depth-1 state-dependent layers.

mod cascade;
mod leaf;
mod rosenthal;

pub use cascade::{build_qsp_cascade, cascade_levels};
pub use leaf::{build_u_leaf, leaf_function, LeafAssignment};
pub use rosenthal::{build_gamma_dagger, build_qsp_rosenthal, RosenthalLayout, RosenthalPlan};

use std::fmt;
use std::str::FromStr;

use crate::circuit::Circuit;
use crate::error::{Result, SynthError};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QspMethod {
    Cascade,
    Rosenthal,
}

impl QspMethod {
    pub fn name(self) -> &'static str {
        match self {
            QspMethod::Cascade => "cascade",
            QspMethod::Rosenthal => "rosenthal",
        }
    }
}

impl fmt::Display for QspMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QspMethod {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cascade" => Ok(QspMethod::Cascade),
            "rosenthal" => Ok(QspMethod::Rosenthal),
            _ => Err(SynthError::InvalidArgument(format!("unknown QSP method {s:?}"))),
        }
    }
}

/// The tree construction once the budget covers its layout, the cascade otherwise.
pub fn qsp_dispatch(n: usize, m: usize) -> QspMethod {
    if n > 0 && m >= RosenthalLayout::ancilla_count(n) {
        QspMethod::Rosenthal
    } else {
        QspMethod::Cascade
    }
}

/// Builds with `method` (defaults to [`qsp_dispatch`]) and reports the method used.
pub fn build_qsp(v: &[C64], m: usize, method: Option<QspMethod>) -> Result<(Circuit, QspMethod)> {
    let n = v.len().max(1).trailing_zeros() as usize;
    let method = method.unwrap_or_else(|| qsp_dispatch(n, m));
    let c = match method {
        QspMethod::Cascade => build_qsp_cascade(v, m)?,
        QspMethod::Rosenthal => build_qsp_rosenthal(v, m)?,
    };
    Ok((c, method))
}
