//! Controlled state preparation `|i⟩|0^n⟩ ↦ |i⟩|ψ_i⟩` for all `i ∈ {0,1}^k`.
//!
//! Registers of the emitted circuit: controls `0..k`, targets `k..k+n`, ancillas after.

use std::fmt;
use std::str::FromStr;

use crate::circuit::Circuit;
use crate::error::{Result, SynthError};
use crate::linalg::{amplitude_tree, vector_norm, Prefix, C64, ONE, ZERO};
use crate::qsp::{RosenthalLayout, RosenthalPlan};
use crate::ucg::{build_multi_target_ucu, register_width, ucg_chain, LayeredTargets};

#[derive(Debug, Clone, PartialEq)]
pub struct CqspSpec {
    pub k: usize,
    pub n: usize,
    pub states: Vec<Vec<C64>>,
}

impl CqspSpec {
    pub fn new(k: usize, n: usize, states: Vec<Vec<C64>>) -> Result<Self> {
        if states.len() != 1 << k {
            return Err(SynthError::DimensionMismatch { expected: 1 << k, got: states.len() });
        }
        for s in &states {
            if s.len() != 1 << n {
                return Err(SynthError::DimensionMismatch { expected: 1 << n, got: s.len() });
            }
            let norm = vector_norm(s);
            if (norm - 1.0).abs() > 1e-10 {
                return Err(SynthError::Unnormalized { norm });
            }
        }
        Ok(CqspSpec { k, n, states })
    }

    pub fn controls(&self) -> Vec<usize> {
        (0..self.k).collect()
    }

    pub fn targets(&self) -> Vec<usize> {
        (self.k..self.k + self.n).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CqspMethod {
    Case1,
    ControlledLayers,
    TwoStage,
}

impl CqspMethod {
    pub fn name(self) -> &'static str {
        match self {
            CqspMethod::Case1 => "case1",
            CqspMethod::ControlledLayers => "controlled_layers",
            CqspMethod::TwoStage => "two_stage",
        }
    }
}

impl fmt::Display for CqspMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CqspMethod {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "case1" => Ok(CqspMethod::Case1),
            "controlled_layers" => Ok(CqspMethod::ControlledLayers),
            "two_stage" => Ok(CqspMethod::TwoStage),
            _ => Err(SynthError::InvalidArgument(format!("unknown CQSP method {s:?}"))),
        }
    }
}

/// Overrides for [`build_cqsp_with`]: a fixed method and/or a fixed two-stage split.
#[derive(Debug, Clone, Copy, Default)]
pub struct CqspOptions {
    pub method: Option<CqspMethod>,
    pub split: Option<usize>,
}

/// Ancillas the controlled-layer construction actually touches: the tree layout plus
/// `(p - 1)·k` control copies for the widest layer.
pub fn controlled_layers_min_ancillas(n: usize, k: usize) -> usize {
    let plan_layers = 2 * ((1usize << n) - 1);
    RosenthalLayout::ancilla_count(n) + plan_layers.saturating_sub(1) * k
}

/// Layer-width constant `c` measured from the tree plan (`s_r ≤ c·2^n`).
pub fn measured_layer_constant(n: usize) -> f64 {
    let nodes = (1usize << n) - 1;
    (2 * nodes) as f64 / (1u64 << n) as f64
}

/// `max{2c·n·2^n, k·2^n}` together with the concrete layout requirement.
pub fn controlled_layers_threshold(n: usize, k: usize) -> usize {
    let c = measured_layer_constant(n);
    let bound = (2.0 * c * n as f64 * (1u64 << n) as f64).ceil() as usize;
    bound.max(k << n).max(controlled_layers_min_ancillas(n, k))
}

/// `s = ⌈4 log₂(n+k)⌉ − k`, clamped to `[1, n]`; `None` when the split degenerates.
pub fn two_stage_split(n: usize, k: usize) -> Option<usize> {
    if n == 0 {
        return None;
    }
    let raw = (4.0 * ((n + k) as f64).log2()).ceil() as i64 - k as i64;
    (raw >= 1).then(|| (raw as usize).min(n))
}

/// Method chosen by `--method auto` for budget `m`.
pub fn dispatch(n: usize, k: usize, m: usize) -> CqspMethod {
    if n > 0 && m >= controlled_layers_threshold(n, k) {
        return CqspMethod::ControlledLayers;
    }
    let floor = (1u64 << (n + k)) as f64 / ((n + k).max(1) as f64).powi(2);
    if let Some(s) = two_stage_split(n, k) {
        if s < n && m as f64 >= floor && m >= controlled_layers_threshold(s, k) {
            return CqspMethod::TwoStage;
        }
    }
    CqspMethod::Case1
}

/// `n` growing UCGs whose tables merge the control index with the tree of each `ψ_i`.
pub(crate) fn case1_on(c: &mut Circuit, controls: &[usize], targets: &[usize], states: &[Vec<C64>]) -> Result<()> {
    let k = controls.len();
    let trees = states.iter().map(|s| amplitude_tree(s)).collect::<Result<Vec<_>>>()?;
    ucg_chain(c, controls, targets, |j| {
        (0..1usize << (k + j))
            .map(|idx| trees[idx & ((1 << k) - 1)].node_unitary(Prefix::new(j, idx >> k)))
            .collect()
    });
    Ok(())
}

/// One piece of the controlled-layer construction, in application order.
#[derive(Debug, Clone)]
pub enum Segment {
    /// `Σ_i |i⟩⟨i| ⊗ L_r^i` for layer `r` (0-based).
    ControlledLayer(usize, Circuit),
    /// The shared state-independent block `C_r`.
    Block(usize, Circuit),
}

fn controlled_layer_segments(
    width: usize,
    controls: &[usize],
    targets: &[usize],
    states: &[Vec<C64>],
    pool: &[usize],
) -> Result<Vec<Segment>> {
    let n = targets.len();
    let k = controls.len();
    let needed = controlled_layers_min_ancillas(n, k);
    if pool.len() < needed {
        return Err(SynthError::InsufficientAncillas { needed, available: pool.len() });
    }
    let layout_size = RosenthalLayout::ancilla_count(n);
    let layout = RosenthalLayout::on(n, targets, &pool[..layout_size])?;
    let copies = &pool[layout_size..needed];
    let plan = RosenthalPlan::new(layout)?;
    let per_state = states.iter().map(|s| plan.layers(s)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(10);
    for (r, block) in plan.blocks().into_iter().enumerate() {
        let positions: Vec<usize> = per_state[0][r].iter().map(|e| e.0).collect();
        let tables = (0..positions.len()).map(|j| per_state.iter().map(|l| l[r][j].1).collect()).collect();
        let lt = LayeredTargets::new(tables)?;
        let mut layer = Circuit::new(width);
        layer.extend_from(&build_multi_target_ucu(&lt, controls, &positions, copies)?)?;
        let mut b = Circuit::new(width);
        b.extend_from(&block)?;
        out.push(Segment::ControlledLayer(r, layer));
        out.push(Segment::Block(r, b));
    }
    Ok(out)
}

/// `∏_r (I ⊗ C_r)(Σ_i |i⟩⟨i| ⊗ L_r^i)` with shared blocks `C_r` of the tree plan.
fn controlled_layers_on(
    c: &mut Circuit,
    controls: &[usize],
    targets: &[usize],
    states: &[Vec<C64>],
    pool: &[usize],
) -> Result<()> {
    for seg in controlled_layer_segments(c.num_qubits(), controls, targets, states, pool)? {
        let (Segment::ControlledLayer(_, piece) | Segment::Block(_, piece)) = seg;
        c.extend_from(&piece)?;
    }
    Ok(())
}

/// The controlled-layer circuit split into its ten segments.
pub fn controlled_layers_segments(spec: &CqspSpec, m: usize) -> Result<Vec<Segment>> {
    controlled_layer_segments(spec.k + spec.n + m, &spec.controls(), &spec.targets(), &spec.states, &shell(spec, m)?.1)
}

/// Picks controlled layers when the pool suffices, otherwise the UCG cascade.
fn stage_on(c: &mut Circuit, controls: &[usize], targets: &[usize], states: &[Vec<C64>], pool: &[usize]) -> Result<()> {
    let (n, k) = (targets.len(), controls.len());
    if n > 0 && pool.len() >= controlled_layers_threshold(n, k) {
        controlled_layers_on(c, controls, targets, states, pool)
    } else {
        case1_on(c, controls, targets, states)
    }
}

/// Marginals on the top `s` target qubits and the conditional states on the rest.
///
/// Returns `(v', φ)` with `v'[i]` over `η ∈ {0,1}^s` and `φ[i + 2^k η]` over the low `n - s` qubits.
pub fn split_states(states: &[Vec<C64>], n: usize, s: usize) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let low = n - s;
    let k_states = states.len();
    let mut marg = Vec::with_capacity(k_states);
    let mut cond = vec![Vec::new(); k_states << s];
    for (i, v) in states.iter().enumerate() {
        let mut m = Vec::with_capacity(1 << s);
        for eta in 0..1usize << s {
            let block = &v[eta << low..(eta + 1) << low];
            let norm = vector_norm(block);
            m.push(C64::new(norm, 0.0));
            cond[i + k_states * eta] = if norm > 1e-300 {
                block.iter().map(|a| a / norm).collect()
            } else {
                let mut e = vec![ZERO; 1 << low];
                e[0] = ONE;
                e
            };
        }
        marg.push(m);
    }
    (marg, cond)
}

fn two_stage_on(
    c: &mut Circuit,
    controls: &[usize],
    targets: &[usize],
    states: &[Vec<C64>],
    pool: &[usize],
    s: usize,
) -> Result<()> {
    let n = targets.len();
    if s == 0 || s > n {
        return Err(SynthError::InvalidArgument(format!("split {s} outside [1, {n}]")));
    }
    if s == n {
        return stage_on(c, controls, targets, states, pool);
    }
    let (marg, cond) = split_states(states, n, s);
    let (low, high) = targets.split_at(n - s);
    stage_on(c, controls, high, &marg, pool)?;
    let mut ctrl2 = controls.to_vec();
    ctrl2.extend_from_slice(high);
    stage_on(c, &ctrl2, low, &cond, pool)
}

fn shell(spec: &CqspSpec, m: usize) -> Result<(Circuit, Vec<usize>)> {
    let total = spec.k + spec.n + m;
    let mut c = Circuit::new(total);
    c.declare_ancillas(spec.k + spec.n..total)?;
    Ok((c, (spec.k + spec.n..total).collect()))
}

pub fn build_cqsp_case1(spec: &CqspSpec, m: usize) -> Result<Circuit> {
    let (mut c, _) = shell(spec, m)?;
    case1_on(&mut c, &spec.controls(), &spec.targets(), &spec.states)?;
    Ok(c)
}

pub fn build_cqsp_controlled_layers(spec: &CqspSpec, m: usize) -> Result<Circuit> {
    let (mut c, pool) = shell(spec, m)?;
    controlled_layers_on(&mut c, &spec.controls(), &spec.targets(), &spec.states, &pool)?;
    Ok(c)
}

/// Two-stage split with the default `s`; falls back to case 1 when the split degenerates.
pub fn build_cqsp_two_stage(spec: &CqspSpec, m: usize) -> Result<Circuit> {
    match two_stage_split(spec.n, spec.k) {
        Some(s) => build_cqsp_two_stage_split(spec, m, s),
        None => build_cqsp_case1(spec, m),
    }
}

pub fn build_cqsp_two_stage_split(spec: &CqspSpec, m: usize, s: usize) -> Result<Circuit> {
    let (mut c, pool) = shell(spec, m)?;
    two_stage_on(&mut c, &spec.controls(), &spec.targets(), &spec.states, &pool, s)?;
    Ok(c)
}

/// Builds with `opts` (defaults to [`dispatch`]) and reports the method used.
pub fn build_cqsp_with(spec: &CqspSpec, m: usize, opts: &CqspOptions) -> Result<(Circuit, CqspMethod)> {
    let method = opts.method.unwrap_or_else(|| dispatch(spec.n, spec.k, m));
    let c = match (method, opts.split) {
        (CqspMethod::Case1, _) => build_cqsp_case1(spec, m)?,
        (CqspMethod::ControlledLayers, _) => build_cqsp_controlled_layers(spec, m)?,
        (CqspMethod::TwoStage, Some(s)) => build_cqsp_two_stage_split(spec, m, s)?,
        (CqspMethod::TwoStage, None) => build_cqsp_two_stage(spec, m)?,
    };
    Ok((c, method))
}

pub fn build_cqsp(spec: &CqspSpec, m: usize) -> Result<Circuit> {
    Ok(build_cqsp_with(spec, m, &CqspOptions::default())?.0)
}

/// Controlled preparation on arbitrary registers, used by the oracle builders.
pub(crate) fn cqsp_on(
    c: &mut Circuit,
    controls: &[usize],
    targets: &[usize],
    states: &[Vec<C64>],
    pool: &[usize],
) -> Result<CqspMethod> {
    register_width(&[controls, targets, pool])?;
    let (n, k) = (targets.len(), controls.len());
    let method = dispatch(n, k, pool.len());
    match method {
        CqspMethod::ControlledLayers => controlled_layers_on(c, controls, targets, states, pool)?,
        CqspMethod::TwoStage => {
            let s = two_stage_split(n, k).expect("dispatch checked the split");
            two_stage_on(c, controls, targets, states, pool, s)?
        }
        CqspMethod::Case1 => case1_on(c, controls, targets, states)?,
    }
    Ok(method)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_values() {
        assert_eq!(two_stage_split(3, 1), Some(3));
        assert_eq!(two_stage_split(20, 1), Some(17));
        assert_eq!(two_stage_split(0, 1), None);
        assert_eq!(two_stage_split(1, 9), Some(1));
        assert_eq!(two_stage_split(1, 30), None);
    }

    #[test]
    fn dispatch_regimes() {
        assert_eq!(dispatch(3, 2, 0), CqspMethod::Case1);
        assert_eq!(dispatch(2, 1, controlled_layers_threshold(2, 1)), CqspMethod::ControlledLayers);
        assert_eq!(controlled_layers_threshold(2, 1), 24);
        assert!((measured_layer_constant(2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [CqspMethod::Case1, CqspMethod::ControlledLayers, CqspMethod::TwoStage] {
            assert_eq!(m.name().parse::<CqspMethod>().unwrap(), m);
        }
        assert!("cascade".parse::<CqspMethod>().is_err());
    }
}
