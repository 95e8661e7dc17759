use super::{pauli_x, ry, rz, unitarity_residual2, Mat2, C64};
use crate::error::{Result, SynthError};

/// `U = e^{i alpha} A X B X C` with `A B C = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxbxcFactors {
    pub alpha: f64,
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
}

impl AxbxcFactors {
    pub fn reconstruct(&self) -> Mat2 {
        let x = pauli_x();
        self.a * x * self.b * x * self.c * C64::from_polar(1.0, self.alpha)
    }
}

/// ZYZ angles `(alpha, beta, gamma, delta)` with `U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)`.
pub(crate) fn zyz_angles(u: &Mat2) -> (f64, f64, f64, f64) {
    let det = u.determinant();
    let alpha = det.arg() / 2.0;
    let su = u * C64::from_polar(1.0, -alpha);
    let a = su[(0, 0)];
    let b = su[(1, 0)];
    let gamma = 2.0 * b.norm().atan2(a.norm());
    // beta + delta = -2 arg(a), beta - delta = 2 arg(b); either is free when the
    // corresponding entry vanishes.
    let sum = if a.norm() > 1e-14 { -2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-14 { 2.0 * b.arg() } else { 0.0 };
    let (sum, diff) = if a.norm() <= 1e-14 {
        (diff, diff)
    } else if b.norm() <= 1e-14 {
        (sum, sum)
    } else {
        (sum, diff)
    };
    let beta = (sum + diff) / 2.0;
    let delta = (sum - diff) / 2.0;
    (alpha, beta, gamma, delta)
}

pub fn axbxc_factor(u: &Mat2) -> Result<AxbxcFactors> {
    let residual = unitarity_residual2(u);
    if residual > 1e-10 {
        return Err(SynthError::NonUnitaryGate { residual });
    }
    let (alpha, beta, gamma, delta) = zyz_angles(u);
    Ok(AxbxcFactors {
        alpha,
        a: rz(beta) * ry(gamma / 2.0),
        b: ry(-gamma / 2.0) * rz(-(delta + beta) / 2.0),
        c: rz((delta - beta) / 2.0),
    })
}
