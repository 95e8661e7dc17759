//! Dense complex linear algebra used by the synthesis routines.
//!
//! Matrices are `nalgebra` types over [`Complex64`]. Row/column index `i` of an
//! `n`-qubit operator is the basis state with qubit `j` holding bit `(i >> j) & 1`.

mod csd;
mod demux;
mod factor;
mod tree;

pub use csd::{csd_factor, CsdFactors};
pub use demux::{demultiplex, Demultiplexed};
pub use factor::{axbxc_factor, AxbxcFactors};
pub use tree::{amplitude_tree, AmplitudeTree, Prefix};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SynthError};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))
}

pub fn t_gate() -> Mat2 {
    phase(std::f64::consts::FRAC_PI_4)
}

/// `diag(1, e^{i alpha})`.
pub fn phase(alpha: f64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, C64::from_polar(1.0, alpha))
}

/// `Rz(theta) = diag(e^{-i theta/2}, e^{i theta/2})`.
pub fn rz(theta: f64) -> Mat2 {
    Mat2::new(
        C64::from_polar(1.0, -theta / 2.0),
        ZERO,
        ZERO,
        C64::from_polar(1.0, theta / 2.0),
    )
}

/// `Ry(theta) = [[cos, -sin], [sin, cos]]` of `theta/2`.
pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

pub fn diag2(a: C64, b: C64) -> Mat2 {
    Mat2::new(a, ZERO, ZERO, b)
}

/// Max-entry residual of `M M^dagger - I`.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn unitarity_residual2(m: &Mat2) -> f64 {
    let prod = m * m.adjoint();
    (prod - Mat2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn ensure_unitary(m: &CMat, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(SynthError::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let residual = unitarity_residual(m);
    if residual > tol {
        return Err(SynthError::NonUnitary { residual });
    }
    Ok(())
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff2(a: &Mat2, b: &Mat2) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Distance between two operators up to global phase.
///
/// The phase is aligned on the largest-magnitude entry of the first column of
/// `a`; the result is the largest column 2-norm of the aligned difference.
pub fn operator_distance(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "operator_distance shape mismatch");
    let mut pivot = 0;
    for i in 0..a.nrows() {
        if a[(i, 0)].norm() > a[(pivot, 0)].norm() {
            pivot = i;
        }
    }
    let ratio = a[(pivot, 0)] / b[(pivot, 0)];
    let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { ONE };
    (0..a.ncols())
        .map(|j| {
            (0..a.nrows())
                .map(|i| (a[(i, j)] - phase * b[(i, j)]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Block-diagonal matrix with `blocks` along the diagonal.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let dim: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(dim, dim);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    out
}

pub fn mat2_to_dyn(m: &Mat2) -> CMat {
    CMat::from_fn(2, 2, |i, j| m[(i, j)])
}

pub fn dyn_to_mat2(m: &CMat) -> Mat2 {
    Mat2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random unitary of dimension `dim` (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn haar_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    dyn_to_mat2(&haar_unitary(2, rng))
}

/// Uniformly random unit vector in `C^dim`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unitary whose first column is the unit vector `(a, b)`.
/// Gram-Schmidt re-orthonormalization of the columns; removes rounding drift from products.
pub fn nearest_unitary2(m: &Mat2) -> Mat2 {
    let (a, b) = (m[(0, 0)], m[(1, 0)]);
    let n0 = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n0, b / n0);
    let (c0, d0) = (m[(0, 1)], m[(1, 1)]);
    let proj = a.conj() * c0 + b.conj() * d0;
    let (c1, d1) = (c0 - proj * a, d0 - proj * b);
    let n1 = (c1.norm_sqr() + d1.norm_sqr()).sqrt();
    Mat2::new(a, c1 / n1, b, d1 / n1)
}

pub fn column_completion(a: C64, b: C64) -> Mat2 {
    Mat2::new(a, -b.conj(), b, a.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [2, 4, 8] {
            let u = haar_unitary(dim, &mut rng);
            assert!(unitarity_residual(&u) < 1e-12);
        }
    }

    #[test]
    fn operator_distance_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(4, &mut rng);
        let v = &u * C64::from_polar(1.0, 0.7);
        assert!(operator_distance(&u, &v) < 1e-12);
        let w = haar_unitary(4, &mut rng);
        assert!(operator_distance(&u, &w) > 0.1);
    }

    #[test]
    fn rotations_compose() {
        assert!(max_abs_diff2(&(rz(0.3) * rz(0.4)), &rz(0.7)) < 1e-15);
        assert!(max_abs_diff2(&(pauli_x() * ry(0.5) * pauli_x()), &ry(-0.5)) < 1e-15);
        assert!(max_abs_diff2(&(pauli_z() * ry(0.5) * pauli_z()), &ry(-0.5)) < 1e-15);
    }
}
