//! Scaling sweeps over `(n, k, m)` producing one CSV row per synthesized instance.

use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::cqsp::{build_cqsp_with, CqspMethod, CqspOptions, CqspSpec};
use crate::error::{Result, SynthError};
use crate::linalg::{haar_unitary, random_state};
use crate::qsp::{build_qsp, QspMethod};
use crate::sim::StateVector;
use crate::unitary::{build_unitary_csd, depth_model, k_star, lower_bound_cnots};
use crate::verify::{verify, Status, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTask {
    Qsp,
    Cqsp,
    Unitary,
}

impl SweepTask {
    pub fn name(self) -> &'static str {
        match self {
            SweepTask::Qsp => "qsp",
            SweepTask::Cqsp => "cqsp",
            SweepTask::Unitary => "unitary",
        }
    }
}

impl fmt::Display for SweepTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepTask {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qsp" => Ok(SweepTask::Qsp),
            "cqsp" => Ok(SweepTask::Cqsp),
            "unitary" => Ok(SweepTask::Unitary),
            _ => Err(SynthError::InvalidArgument(format!("unknown sweep task {s:?}"))),
        }
    }
}

/// Method override for one task; `None` in [`SweepConfig`] means the task's own dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    Qsp(QspMethod),
    Cqsp(CqspMethod),
    Csd,
}

impl SweepMethod {
    pub fn parse(task: SweepTask, s: &str) -> Result<Option<Self>> {
        if s == "auto" {
            return Ok(None);
        }
        Ok(Some(match task {
            SweepTask::Qsp => SweepMethod::Qsp(s.parse()?),
            SweepTask::Cqsp => SweepMethod::Cqsp(s.parse()?),
            SweepTask::Unitary if s == "csd" => SweepMethod::Csd,
            SweepTask::Unitary => {
                return Err(SynthError::InvalidArgument(format!("unknown unitary method {s:?}")))
            }
        }))
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub task: SweepTask,
    pub n: RangeInclusive<usize>,
    /// Control counts; only used by the CQSP task.
    pub k: RangeInclusive<usize>,
    pub m: Vec<usize>,
    pub method: Option<SweepMethod>,
    pub seed: u64,
    pub verify: bool,
    pub tol: f64,
}

impl SweepConfig {
    pub fn new(task: SweepTask, n: RangeInclusive<usize>) -> Self {
        SweepConfig { task, n, k: 1..=1, m: vec![0], method: None, seed: 0, verify: true, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub task: String,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub method: String,
    pub depth: usize,
    pub size: usize,
    pub cnot_count: usize,
    pub analytic_depth: f64,
    /// `true`, `false`, `unverifiable` or `skipped`.
    pub verified: String,
    /// CNOTs over the generic lower bound, unitary rows only.
    pub lower_bound_ratio: Option<f64>,
}

/// Seed of one instance, independent of the order rows are produced in.
pub fn instance_seed(seed: u64, task: SweepTask, n: usize, k: usize, m: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [task as u64, n as u64, k as u64, m as u64] {
        h = (h ^ v).wrapping_mul(0x1000_0000_01b3).rotate_left(29);
    }
    h
}

/// `n + 2^n/(n+m)` for preparation, `n + k + 2^{n+k}/(n+k+m)` for controlled preparation.
pub fn analytic_qsp_depth(n: usize, k: usize, m: usize) -> f64 {
    let w = (n + k) as f64;
    w + w.exp2() / (w + m as f64).max(1.0)
}

/// Depth model at `k*` with the budget floored at one ancilla.
pub fn analytic_unitary_depth(n: usize, m: usize) -> f64 {
    let m = m.max(1);
    depth_model(n, k_star(n, m), m).map(|p| p.predicted_depth).unwrap_or(f64::NAN)
}

fn verdict(c: &Circuit, target: Target, cfg: &SweepConfig) -> Result<String> {
    if !cfg.verify {
        return Ok("skipped".into());
    }
    Ok(match verify(c, &target, cfg.tol)?.status {
        Status::Passed => "true",
        Status::Failed => "false",
        Status::Unverifiable => "unverifiable",
    }
    .into())
}

fn row(cfg: &SweepConfig, n: usize, k: usize, m: usize) -> Result<SweepRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(cfg.seed, cfg.task, n, k, m));
    let (c, method, analytic, target, ratio, k) = match cfg.task {
        SweepTask::Qsp => {
            let v = random_state(1 << n, &mut rng);
            let forced = match cfg.method {
                Some(SweepMethod::Qsp(q)) => Some(q),
                _ => None,
            };
            let (c, method) = build_qsp(&v, m, forced)?;
            let t = Target::State(StateVector::new(v)?);
            (c, method.name(), analytic_qsp_depth(n, 0, m), t, None, 0)
        }
        SweepTask::Cqsp => {
            let states = (0..1 << k).map(|_| random_state(1 << n, &mut rng)).collect();
            let spec = CqspSpec::new(k, n, states)?;
            let opts = CqspOptions {
                method: match cfg.method {
                    Some(SweepMethod::Cqsp(q)) => Some(q),
                    _ => None,
                },
                split: None,
            };
            let (c, method) = build_cqsp_with(&spec, m, &opts)?;
            (c, method.name(), analytic_qsp_depth(n, k, m), Target::Cqsp(spec), None, k)
        }
        SweepTask::Unitary => {
            let u = haar_unitary(1 << n, &mut rng);
            let c = build_unitary_csd(&u, m)?;
            let bound = lower_bound_cnots(n);
            let ratio = (bound > 0).then(|| c.cnot_count() as f64 / bound as f64);
            (c, "csd", analytic_unitary_depth(n, m), Target::Unitary(u), ratio, k_star(n, m.max(1)))
        }
    };
    Ok(SweepRow {
        task: cfg.task.name().into(),
        n,
        k,
        m,
        method: method.into(),
        depth: c.depth(),
        size: c.size(),
        cnot_count: c.cnot_count(),
        analytic_depth: analytic,
        verified: verdict(&c, target, cfg)?,
        lower_bound_ratio: ratio,
    })
}

/// Rows sorted by `(n, k, m)`; `k` only varies for the CQSP task.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let ks: Vec<usize> = match cfg.task {
        SweepTask::Cqsp => cfg.k.clone().collect(),
        _ => vec![0],
    };
    let mut ms = cfg.m.clone();
    ms.sort_unstable();
    ms.dedup();
    let mut rows = Vec::new();
    for n in cfg.n.clone() {
        for &k in &ks {
            for &m in &ms {
                rows.push(row(cfg, n, k, m)?);
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| SynthError::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| SynthError::Format(e.to_string()))
}

/// Least-squares slope of `log₂ y` against `x`.
pub fn fit_log2_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "fit needs paired samples");
    let n = xs.len() as f64;
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
