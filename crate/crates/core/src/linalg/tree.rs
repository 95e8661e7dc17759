use std::fmt;

use super::{column_completion, Mat2, C64, ONE, ZERO};
use crate::error::{Result, SynthError};

/// A node `x ∈ {0,1}^{<n}` of the complete binary tree. Character `i` of the
/// string is bit `i` of `bits`, matching qubit `i` of a basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prefix {
    pub len: usize,
    pub bits: usize,
}

impl Prefix {
    pub const ROOT: Prefix = Prefix { len: 0, bits: 0 };

    pub fn new(len: usize, bits: usize) -> Self {
        debug_assert!(len >= usize::BITS as usize || bits >> len == 0);
        Prefix { len, bits }
    }

    pub fn child(self, b: bool) -> Self {
        Prefix { len: self.len + 1, bits: self.bits | (usize::from(b) << self.len) }
    }

    pub fn bit(self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    /// First `i` characters.
    pub fn truncate(self, i: usize) -> Self {
        Prefix { len: i, bits: self.bits & ((1 << i) - 1) }
    }

    /// Breadth-first index: all shorter prefixes first, then by value.
    pub fn id(self) -> usize {
        (1 << self.len) - 1 + self.bits
    }

    pub fn from_id(id: usize) -> Self {
        let len = (usize::BITS - (id + 1).leading_zeros() - 1) as usize;
        Prefix { len, bits: id + 1 - (1 << len) }
    }

    /// All prefixes of length `< n`, in `id` order.
    pub fn all_below(n: usize) -> impl Iterator<Item = Prefix> {
        (0..(1usize << n) - 1).map(Prefix::from_id)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Prefix::ROOT;
        for ch in s.chars() {
            p = match ch {
                '0' => p.child(false),
                '1' => p.child(true),
                _ => return Err(SynthError::InvalidArgument(format!("bad bit string {s:?}"))),
            };
        }
        Ok(p)
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("ε");
        }
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Conditional amplitudes of a state over the prefix tree.
///
/// `beta(x)` is the pair `(β_{x0}, β_{x1})`; the pair at depth `n-1` carries the
/// phases of the leaf amplitudes, all shallower pairs are non-negative reals.
#[derive(Debug, Clone)]
pub struct AmplitudeTree {
    n: usize,
    norms: Vec<f64>,
    betas: Vec<[C64; 2]>,
}

impl AmplitudeTree {
    pub fn num_levels(&self) -> usize {
        self.n
    }

    /// Norm of the sub-vector under `x`; defined for `|x| ≤ n`.
    pub fn node_norm(&self, x: Prefix) -> f64 {
        self.norms[x.id()]
    }

    pub fn beta(&self, x: Prefix) -> [C64; 2] {
        self.betas[x.id()]
    }

    /// Unitary with first column `|φ_x⟩ = β_{x0}|0⟩ + β_{x1}|1⟩`.
    pub fn node_unitary(&self, x: Prefix) -> Mat2 {
        let [b0, b1] = self.beta(x);
        column_completion(b0, b1)
    }

    /// `∏_i β_{x≤i}` for a leaf `x` of length `n`.
    pub fn path_product(&self, leaf: Prefix) -> C64 {
        (0..self.n).fold(ONE, |acc, i| acc * self.beta(leaf.truncate(i))[usize::from(leaf.bit(i))])
    }
}

pub fn amplitude_tree(v: &[C64]) -> Result<AmplitudeTree> {
    if v.is_empty() || !v.len().is_power_of_two() {
        return Err(SynthError::InvalidArgument(format!(
            "state length {} is not a power of two",
            v.len()
        )));
    }
    let norm = super::vector_norm(v);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(SynthError::Unnormalized { norm });
    }
    let n = v.len().trailing_zeros() as usize;
    let mut norms = vec![0.0; (1 << (n + 1)) - 1];
    for (idx, a) in v.iter().enumerate() {
        norms[Prefix::new(n, idx).id()] = a.norm();
    }
    for len in (0..n).rev() {
        for bits in 0..1usize << len {
            let x = Prefix::new(len, bits);
            let a = norms[x.child(false).id()];
            let b = norms[x.child(true).id()];
            norms[x.id()] = a.hypot(b);
        }
    }
    let mut betas = vec![[ONE, ZERO]; (1 << n) - 1];
    for x in Prefix::all_below(n) {
        let nx = norms[x.id()];
        if nx <= 1e-300 {
            continue;
        }
        let children = [x.child(false), x.child(true)];
        betas[x.id()] = children.map(|ch| {
            if x.len + 1 == n {
                v[ch.bits] / nx
            } else {
                C64::new(norms[ch.id()] / nx, 0.0)
            }
        });
    }
    Ok(AmplitudeTree { n, norms, betas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_state, unitarity_residual2};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn product_identity(v: &[C64], tree: &AmplitudeTree) {
        let n = tree.num_levels();
        for (idx, &amp) in v.iter().enumerate() {
            let p = tree.path_product(Prefix::new(n, idx));
            assert!((p - amp).norm() <= 1e-9, "leaf {idx}");
        }
        for x in Prefix::all_below(n) {
            if tree.node_norm(x) > 0.0 {
                let [a, b] = tree.beta(x);
                assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() <= 1e-10);
            }
            assert!(unitarity_residual2(&tree.node_unitary(x)) < 1e-12);
        }
    }

    #[test]
    fn prefix_ids_round_trip() {
        for id in 0..200 {
            assert_eq!(Prefix::from_id(id).id(), id);
        }
        let p = Prefix::parse("011").unwrap();
        assert_eq!((p.len, p.bits), (3, 0b110));
        assert_eq!(p.to_string(), "011");
        assert_eq!(Prefix::ROOT.to_string(), "ε");
    }

    #[test]
    fn basis_state_zero() {
        let mut v = vec![ZERO; 8];
        v[0] = ONE;
        let t = amplitude_tree(&v).unwrap();
        for len in 0..3 {
            assert_eq!(t.beta(Prefix::new(len, 0)), [ONE, ZERO]);
        }
        assert_eq!(t.node_norm(Prefix::parse("1").unwrap()), 0.0);
        assert_eq!(t.node_norm(Prefix::parse("01").unwrap()), 0.0);
        product_identity(&v, &t);
    }

    #[test]
    fn two_term_state_on_low_qubit() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [c(h, 0.0), c(h, 0.0), ZERO, ZERO];
        let t = amplitude_tree(&v).unwrap();
        let [a, b] = t.beta(Prefix::ROOT);
        assert!((a.re - h).abs() < 1e-15 && (b.re - h).abs() < 1e-15);
        assert_eq!(t.beta(Prefix::parse("0").unwrap()), [ONE, ZERO]);
        product_identity(&v, &t);
    }

    #[test]
    fn uniform_state() {
        let n = 4;
        let a = (0.5f64).powi(n as i32).sqrt();
        let v = vec![c(a, 0.0); 1 << n];
        let t = amplitude_tree(&v).unwrap();
        for x in Prefix::all_below(n) {
            for b in t.beta(x) {
                assert!((b.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_states_reproduce_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..200 {
            let n = 1 + i % 8;
            let v = random_state(1 << n, &mut rng);
            product_identity(&v, &amplitude_tree(&v).unwrap());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(amplitude_tree(&[ONE, ONE]).is_err());
        assert!(amplitude_tree(&[ONE, ZERO, ZERO]).is_err());
        assert!(amplitude_tree(&[]).is_err());
    }

    proptest! {
        #[test]
        fn sparse_states(seed in 0u64..500, mask in 1u32..256) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = random_state(8, &mut rng);
            for (i, a) in v.iter_mut().enumerate() {
                if mask >> i & 1 == 0 { *a = ZERO; }
            }
            let norm = crate::linalg::vector_norm(&v);
            for a in v.iter_mut() { *a /= norm; }
            product_identity(&v, &amplitude_tree(&v).unwrap());
        }
    }
}
