use super::{ensure_unitary, CMat, C64, ZERO};
use crate::error::{Result, SynthError};

const EPS: f64 = 1e-13;

/// Cosine-sine factors of a `2^n x 2^n` unitary split on its most significant qubit:
///
/// ```text
/// U = [v1p      ] [ C  S ] [v2p      ]
///     [     v1pp] [-S  C ] [     v2pp]
/// ```
///
/// with `C = diag(cos thetas)`, `S = diag(sin thetas)` and `thetas` ascending in `[0, pi/2]`.
#[derive(Debug, Clone)]
pub struct CsdFactors {
    pub v1p: CMat,
    pub v1pp: CMat,
    pub v2p: CMat,
    pub v2pp: CMat,
    pub thetas: Vec<f64>,
}

impl CsdFactors {
    pub fn reconstruct(&self) -> CMat {
        let h = self.thetas.len();
        let mut middle = CMat::zeros(2 * h, 2 * h);
        for (i, &t) in self.thetas.iter().enumerate() {
            let (s, c) = t.sin_cos();
            middle[(i, i)] = C64::new(c, 0.0);
            middle[(i, i + h)] = C64::new(s, 0.0);
            middle[(i + h, i)] = C64::new(-s, 0.0);
            middle[(i + h, i + h)] = C64::new(c, 0.0);
        }
        let left = super::block_diag(&[self.v1p.clone(), self.v1pp.clone()]);
        let right = super::block_diag(&[self.v2p.clone(), self.v2pp.clone()]);
        left * middle * right
    }
}

pub fn csd_factor(u: &CMat) -> Result<CsdFactors> {
    let dim = u.nrows();
    if dim < 4 || !dim.is_power_of_two() || u.ncols() != dim {
        return Err(SynthError::InvalidArgument(format!(
            "cosine-sine decomposition needs a square 2^n matrix with n >= 2, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    ensure_unitary(u, 1e-10)?;
    let h = dim / 2;
    let u00 = u.view((0, 0), (h, h)).into_owned();
    let u01 = u.view((0, h), (h, h)).into_owned();
    let u10 = u.view((h, 0), (h, h)).into_owned();
    let u11 = u.view((h, h), (h, h)).into_owned();

    // u00 = l0 c r0 with c ascending, so that I - c^2 is non-increasing and the
    // triangular factor of u10 r0^dagger below is diagonal.
    let svd = u00.svd(true, true);
    let w = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let l0 = CMat::from_fn(h, h, |i, j| w[(i, order[j])]);
    let r0 = CMat::from_fn(h, h, |i, j| vt[(order[i], j)]);
    let cvals: Vec<f64> = order.iter().map(|&k| svd.singular_values[k].min(1.0)).collect();

    let qr = (&u10 * r0.adjoint()).qr();
    let mut l1 = qr.q();
    let r = qr.r();
    let mut svals = vec![0.0; h];
    for j in 0..h {
        let z = r[(j, j)];
        let mag = z.norm();
        if mag > EPS {
            let w = z.conj() / mag;
            for i in 0..h {
                l1[(i, j)] /= w;
            }
        }
        svals[j] = mag;
    }

    // u01 = -l0 s r1 and u11 = l1 c r1; use whichever row scale is larger.
    let a = l0.adjoint() * &u01;
    let b = l1.adjoint() * &u11;
    let mut r1 = CMat::from_element(h, h, ZERO);
    for i in 0..h {
        for j in 0..h {
            r1[(i, j)] = if svals[i] > cvals[i] { -a[(i, j)] / svals[i] } else { b[(i, j)] / cvals[i] };
        }
    }
    let thetas: Vec<f64> = svals.iter().zip(&cvals).map(|(s, c)| s.atan2(*c)).collect();

    // Convert [c -s; s c] into the [C S; -S C] orientation and sort the angles ascending.
    let mut perm: Vec<usize> = (0..h).collect();
    perm.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    Ok(CsdFactors {
        v1p: CMat::from_fn(h, h, |i, j| l0[(i, perm[j])]),
        v1pp: CMat::from_fn(h, h, |i, j| -l1[(i, perm[j])]),
        v2p: CMat::from_fn(h, h, |i, j| r0[(perm[i], j)]),
        v2pp: CMat::from_fn(h, h, |i, j| -r1[(perm[i], j)]),
        thetas: perm.iter().map(|&k| thetas[k]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{block_diag, haar_unitary, max_abs_diff, unitarity_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(u: &CMat) -> CsdFactors {
        let f = csd_factor(u).unwrap();
        assert!(max_abs_diff(&f.reconstruct(), u) <= 1e-10);
        for m in [&f.v1p, &f.v1pp, &f.v2p, &f.v2pp] {
            assert!(unitarity_residual(m) <= 1e-10);
        }
        assert!(f.thetas.windows(2).all(|w| w[0] <= w[1]));
        assert!(f.thetas.iter().all(|t| (0.0..=std::f64::consts::FRAC_PI_2).contains(t)));
        f
    }

    #[test]
    fn identity_has_zero_angles() {
        let f = check(&CMat::identity(8, 8));
        assert!(f.thetas.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn block_diagonal_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = haar_unitary(4, &mut rng);
        let f = check(&block_diag(&[a.clone(), a.clone()]));
        assert!(f.thetas.iter().all(|t| t.abs() < 1e-7));
        assert!(max_abs_diff(&(&f.v1p * &f.v2p), &a) < 1e-9);
    }

    #[test]
    fn random_unitaries_up_to_five_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 2..=5 {
            for _ in 0..10 {
                check(&haar_unitary(1 << n, &mut rng));
            }
        }
    }

    #[test]
    fn swap_like_permutation() {
        // Exercises theta = pi/2 and theta = 0 simultaneously.
        let mut p = CMat::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            p[(i, j)] = C64::new(1.0, 0.0);
        }
        check(&p);
    }

    #[test]
    fn rejects_small_or_non_unitary() {
        assert!(csd_factor(&CMat::identity(2, 2)).is_err());
        let mut m = CMat::identity(4, 4);
        m[(0, 1)] = C64::new(0.5, 0.0);
        assert!(matches!(csd_factor(&m), Err(SynthError::NonUnitary { .. })));
    }
}
