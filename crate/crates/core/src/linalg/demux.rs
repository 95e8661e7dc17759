use std::f64::consts::TAU;

use nalgebra::Schur;

use super::{ensure_unitary, CMat, C64};
use crate::error::{Result, SynthError};

/// `V = l * diag(d) * r` and `W = l * diag(d)^dagger * r`.
#[derive(Debug, Clone)]
pub struct Demultiplexed {
    pub l: CMat,
    pub d: Vec<C64>,
    pub r: CMat,
}

impl Demultiplexed {
    pub fn reconstruct(&self) -> (CMat, CMat) {
        let dv = CMat::from_diagonal(&nalgebra::DVector::from_vec(self.d.clone()));
        let dw = dv.adjoint();
        (&self.l * dv * &self.r, &self.l * dw * &self.r)
    }
}

/// Splits the block diagonal `diag(V, W)` into `(I ⊗ L)(diag(D, D^dagger))(I ⊗ R)`.
///
/// The eigenvectors of the normal matrix `V W^dagger` come from a complex Schur
/// form, so they are orthonormal even for repeated eigenvalues.
pub fn demultiplex(v: &CMat, w: &CMat) -> Result<Demultiplexed> {
    if v.shape() != w.shape() || v.nrows() != v.ncols() {
        return Err(SynthError::DimensionMismatch { expected: v.nrows(), got: w.nrows() });
    }
    ensure_unitary(v, 1e-10)?;
    ensure_unitary(w, 1e-10)?;
    let dim = v.nrows();
    let prod = v * w.adjoint();
    let schur = Schur::try_new(prod, f64::EPSILON, 100_000)
        .ok_or_else(|| SynthError::Eigendecomposition("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();

    let arg = |z: C64| {
        let a = z.arg();
        if a < 0.0 { a + TAU } else { a }
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| arg(t[(a, a)]).total_cmp(&arg(t[(b, b)])));
    let l = CMat::from_fn(dim, dim, |i, j| q[(i, order[j])]);
    let d: Vec<C64> = order
        .iter()
        .map(|&k| C64::from_polar(1.0, t[(k, k)].arg() / 2.0))
        .collect();
    let mut r = l.adjoint() * w;
    for (i, di) in d.iter().enumerate() {
        for j in 0..dim {
            r[(i, j)] *= di;
        }
    }
    let out = Demultiplexed { l, d, r };
    let (rv, rw) = out.reconstruct();
    let res = super::max_abs_diff(&rv, v).max(super::max_abs_diff(&rw, w));
    if res > 1e-9 {
        return Err(SynthError::Eigendecomposition(format!("reconstruction residual {res:e}")));
    }
    Ok(out)
}
