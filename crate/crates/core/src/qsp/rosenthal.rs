use crate::circuit::Circuit;
use crate::error::{Result, SynthError};
use crate::linalg::{amplitude_tree, axbxc_factor, phase, Mat2, Prefix, C64};
use crate::primitives::{build_copy, prefix_marker};
use crate::ucg::register_width;

use super::leaf::build_u_leaf;

/// Register allocation for `n` target qubits. Node `x` uses index `x.id()` in the
/// per-node registers `r`, `sx` and `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RosenthalLayout {
    pub n: usize,
    pub s: Vec<usize>,
    pub r: Vec<usize>,
    pub sx: Vec<Vec<usize>>,
    pub a: Vec<usize>,
    pub scratch: Vec<usize>,
}

impl RosenthalLayout {
    /// Ancillas beyond the `n` target qubits: `(2^n - 1)(n + 2) + 2^n - 2`.
    pub fn ancilla_count(n: usize) -> usize {
        let nodes = (1usize << n) - 1;
        nodes * (n + 2) + nodes.saturating_sub(1)
    }

    /// `S = 0..n`, then `R`, `S_x`, `A` and scratch in consecutive blocks.
    pub fn standard(n: usize) -> Self {
        let pool: Vec<usize> = (n..n + Self::ancilla_count(n)).collect();
        Self::on(n, &(0..n).collect::<Vec<_>>(), &pool).expect("standard layout is disjoint")
    }

    /// Takes ancillas from the front of `pool` in the same block order as [`RosenthalLayout::standard`].
    pub fn on(n: usize, s: &[usize], pool: &[usize]) -> Result<Self> {
        let needed = Self::ancilla_count(n);
        if s.len() != n {
            return Err(SynthError::DimensionMismatch { expected: n, got: s.len() });
        }
        if pool.len() < needed {
            return Err(SynthError::InsufficientAncillas { needed, available: pool.len() });
        }
        register_width(&[s, &pool[..needed]])?;
        let nodes = (1usize << n) - 1;
        let mut it = pool.iter().copied();
        let mut take = |k: usize| it.by_ref().take(k).collect::<Vec<_>>();
        let r = take(nodes);
        let sx = (0..nodes).map(|_| take(n)).collect();
        let a = take(nodes);
        let scratch = take(nodes.saturating_sub(1));
        Ok(RosenthalLayout { n, s: s.to_vec(), r, sx, a, scratch })
    }

    pub fn ancillas(&self) -> Vec<usize> {
        let mut v = self.r.clone();
        v.extend(self.sx.iter().flatten());
        v.extend(&self.a);
        v.extend(&self.scratch);
        v
    }

    pub fn width(&self) -> usize {
        self.s.iter().chain(self.ancillas().iter()).max().map_or(0, |&q| q + 1)
    }
}

/// The state-independent blocks `C_1 … C_5` on a layout, plus the gate positions of the
/// state-dependent layers `L_1 … L_5`.
#[derive(Debug, Clone)]
pub struct RosenthalPlan {
    pub layout: RosenthalLayout,
    /// Step two, `U_ℓ` writing the leaf into `S`.
    pub c1_leaf: Circuit,
    /// The part of `C_1` belonging to `Γ^dagger`.
    pub c1_gamma: Circuit,
    pub c2: Circuit,
    pub c3: Circuit,
    pub c4: Circuit,
    pub c5: Circuit,
}

/// A depth-1 layer of single-qubit gates.
pub type Layer = Vec<(usize, Mat2)>;

impl RosenthalPlan {
    pub fn new(layout: RosenthalLayout) -> Result<Self> {
        let n = layout.n;
        let width = layout.width();
        let nodes: Vec<Prefix> = Prefix::all_below(n).collect();
        let blank = || Circuit::new(width);

        let mut copy = blank();
        copy.extend_from(&build_copy(n, nodes.len(), &layout.s, &layout.sx)?)?;

        // Blocks of Γ in application order; the plan stores their adjoints.
        let mut w1 = blank();
        let mut w2_then_flip = blank();
        let mut flips = blank();
        for x in &nodes {
            let id = x.id();
            let (frame, mark) = prefix_marker(*x, &layout.sx[id], layout.a[id]);
            w1.extend_from(&frame)?;
            w1.extend_from(&mark)?;
            w2_then_flip.extend_from(&mark.adjoint())?;
            w2_then_flip.extend_from(&frame)?;
            let (frame1, mark1) = prefix_marker(x.child(true), &layout.sx[id], layout.r[id]);
            flips.extend_from(&frame1)?;
            flips.extend_from(&mark1)?;
            flips.extend_from(&frame1)?;
        }
        w2_then_flip.extend_from(&flips)?;
        w2_then_flip.extend_from(&copy.adjoint())?;

        let mut cnots = blank();
        for x in &nodes {
            cnots.cx(layout.a[x.id()], layout.r[x.id()]);
        }

        let mut c1_leaf = blank();
        c1_leaf.extend_from(&build_u_leaf(n, &layout.r, &layout.s, &layout.scratch)?)?;

        let mut plan = RosenthalPlan {
            c1_leaf,
            c1_gamma: w2_then_flip.adjoint(),
            c2: cnots.clone(),
            c3: cnots,
            c4: w1.adjoint(),
            c5: copy.adjoint(),
            layout,
        };
        let anc = plan.layout.ancillas();
        for c in [&mut plan.c1_leaf, &mut plan.c1_gamma, &mut plan.c2, &mut plan.c3, &mut plan.c4, &mut plan.c5] {
            c.declare_ancillas(anc.iter().copied())?;
        }
        Ok(plan)
    }

    pub fn standard(n: usize) -> Result<Self> {
        Self::new(RosenthalLayout::standard(n))
    }

    pub fn width(&self) -> usize {
        self.layout.width()
    }

    /// The state-dependent layers `L_1 … L_5` for `v`; qubit positions depend only on `n`.
    pub fn layers(&self, v: &[C64]) -> Result<[Layer; 5]> {
        let tree = amplitude_tree(v)?;
        if tree.num_levels() != self.layout.n {
            return Err(SynthError::DimensionMismatch { expected: 1 << self.layout.n, got: v.len() });
        }
        let mut out: [Layer; 5] = Default::default();
        let mut l2_phase = Vec::new();
        for x in Prefix::all_below(self.layout.n) {
            let (r, a) = (self.layout.r[x.id()], self.layout.a[x.id()]);
            let u = tree.node_unitary(x);
            let f = axbxc_factor(&u.adjoint())?;
            out[0].push((r, u));
            out[1].push((r, f.a.adjoint()));
            l2_phase.push((a, phase(-f.alpha)));
            out[2].push((r, f.b.adjoint()));
            out[3].push((r, f.c.adjoint()));
            out[4].push((r, u.adjoint()));
        }
        out[1].extend(l2_phase);
        Ok(out)
    }

    /// Layer sizes `s_1 … s_5`.
    pub fn layer_sizes(&self) -> [usize; 5] {
        let nodes = (1usize << self.layout.n) - 1;
        [nodes, 2 * nodes, nodes, nodes, nodes]
    }

    /// Measured constant `c` with `s_r ≤ c·2^n`.
    pub fn layer_constant(&self) -> f64 {
        *self.layer_sizes().iter().max().expect("five layers") as f64 / (1u64 << self.layout.n) as f64
    }

    /// The blocks `C_1 … C_5`, with `C_1 = U_ℓ` followed by the `Γ^dagger` part.
    pub fn blocks(&self) -> [Circuit; 5] {
        let mut c1 = self.c1_leaf.clone();
        c1.extend_from(&self.c1_gamma).expect("same width");
        [c1, self.c2.clone(), self.c3.clone(), self.c4.clone(), self.c5.clone()]
    }

    /// `C_5 L_5 C_4 L_4 C_3 L_3 C_2 L_2 C_1 L_1` in application order.
    pub fn assemble(&self, layers: &[Layer; 5]) -> Circuit {
        let mut c = Circuit::new(self.width());
        for (layer, block) in layers.iter().zip(self.blocks().iter()) {
            for &(q, m) in layer {
                c.u(q, m);
            }
            c.extend_from(block).expect("same width");
        }
        c
    }
}

/// `Γ^dagger = C_5 L_5 C_4 L_4 C_3 L_3 C_2 L_2 C_1''`.
pub fn build_gamma_dagger(v: &[C64], plan: &RosenthalPlan) -> Result<Circuit> {
    let layers = plan.layers(v)?;
    let mut c = plan.c1_gamma.clone();
    for (layer, block) in layers[1..].iter().zip([&plan.c2, &plan.c3, &plan.c4, &plan.c5]) {
        for &(q, m) in layer {
            c.u(q, m);
        }
        c.extend_from(block)?;
    }
    Ok(c)
}

/// Tree-register state preparation on the standard layout; `budget` must cover
/// [`RosenthalLayout::ancilla_count`].
pub fn build_qsp_rosenthal(v: &[C64], budget: usize) -> Result<Circuit> {
    let len = v.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(SynthError::InvalidArgument(format!("state length {len} is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    let needed = RosenthalLayout::ancilla_count(n);
    if budget < needed {
        return Err(SynthError::InsufficientAncillas { needed, available: budget });
    }
    let plan = RosenthalPlan::standard(n)?;
    let body = plan.assemble(&plan.layers(v)?);
    let mut c = Circuit::new(n + budget);
    c.extend_from(&body)?;
    c.declare_ancillas(n..n + budget)?;
    Ok(c)
}
