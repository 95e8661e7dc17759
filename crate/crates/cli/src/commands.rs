use std::fs;
use std::io;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use qramsynth::cqsp::{build_cqsp_with, CqspMethod, CqspOptions, CqspSpec};
use qramsynth::io::{circuit_from_json, circuit_to_json, cqsp_from_json, matrix_from_json, state_from_json};
use qramsynth::linalg::{haar_unitary, random_state};
use qramsynth::qsp::{build_qsp, QspMethod};
use qramsynth::sweep::{
    analytic_qsp_depth, analytic_unitary_depth, run_sweep, write_csv, SweepConfig, SweepMethod, SweepTask,
};
use qramsynth::unitary::{build_unitary_csd, depth_model, k_star, lower_bound_cnots, DepthModelPoint};
use qramsynth::verify::{self, Status, Target, Verdict};
use qramsynth::{Circuit, StateVector, SynthError};

use crate::Common;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unverifiable at desk scale: {0}")]
    Unverifiable(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Unverifiable(_) => 3,
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Inclusive range written `a..b`, `a..=b` or `a`.
#[derive(Debug, Clone)]
pub struct NRange(pub RangeInclusive<usize>);

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad range {s:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(NRange(lo..=hi))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct Report {
    method: String,
    num_qubits: usize,
    depth: usize,
    size: usize,
    cnot_count: usize,
    ancilla_count: usize,
    analytic_depth_model: f64,
    exceeds_analytic_depth: bool,
    verified: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound_cnots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth_model: Option<DepthModelPoint>,
}

impl Report {
    fn new(c: &Circuit, method: &str, analytic: f64, seed: Option<u64>) -> Self {
        let m = c.metrics();
        Report {
            method: method.into(),
            num_qubits: c.num_qubits(),
            depth: m.depth,
            size: m.size,
            cnot_count: m.cnot_count,
            ancilla_count: m.ancilla_count,
            analytic_depth_model: analytic,
            exceeds_analytic_depth: m.depth as f64 > analytic,
            verified: "skipped".into(),
            verdict: None,
            seed,
            lower_bound_cnots: None,
            lower_bound_ratio: None,
            depth_model: None,
        }
    }
}

/// Writes the circuit, verifies unless disabled, then writes the metrics.
fn finish(c: &Circuit, mut report: Report, target: Target, common: &Common) -> Result<(), CliError> {
    if let Some(out) = &common.out {
        write(out, &circuit_to_json(c))?;
    }
    let verdict = if common.no_verify { None } else { Some(verify::verify(c, &target, common.tol)?) };
    if let Some(v) = &verdict {
        report.verified = v.status.to_string();
        report.verdict = Some(v.clone());
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match &common.metrics {
        Some(p) => write(p, &text)?,
        None => println!("{text}"),
    }
    match verdict {
        Some(v) if v.status == Status::Failed => {
            Err(CliError::Verification(v.reason.unwrap_or_else(|| "mismatch".into())))
        }
        Some(v) if v.status == Status::Unverifiable => {
            eprintln!("note: {}", v.reason.as_deref().unwrap_or("circuit not verified"));
            Ok(())
        }
        _ => Ok(()),
    }
}

fn method_or_auto<T: FromStr<Err = SynthError>>(s: &str) -> Result<Option<T>, CliError> {
    if s == "auto" {
        Ok(None)
    } else {
        Ok(Some(s.parse()?))
    }
}

pub fn qsp(state: Option<PathBuf>, random: Option<usize>, common: &Common) -> Result<(), CliError> {
    let (v, seed) = match (state, random) {
        (Some(p), _) => (state_from_json(&read(&p)?)?, None),
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            (StateVector::new(random_state(1 << n, &mut rng))?, Some(common.seed))
        }
        (None, None) => return Err(CliError::Input("either --state or --random is required".into())),
    };
    let method: Option<QspMethod> = method_or_auto(&common.method)?;
    let (c, used) = build_qsp(v.amplitudes(), common.ancilla, method)?;
    let report = Report::new(&c, used.name(), analytic_qsp_depth(v.num_qubits(), 0, common.ancilla), seed);
    finish(&c, report, Target::State(v), common)
}

pub fn cqsp(
    spec: Option<PathBuf>,
    random: Option<(usize, usize)>,
    split: Option<usize>,
    common: &Common,
) -> Result<(), CliError> {
    let (spec, seed) = match (spec, random) {
        (Some(p), _) => (cqsp_from_json(&read(&p)?)?, None),
        (None, Some((n, k))) => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let states = (0..1 << k).map(|_| random_state(1 << n, &mut rng)).collect();
            (CqspSpec::new(k, n, states)?, Some(common.seed))
        }
        (None, None) => return Err(CliError::Input("either --spec or --random with --controls is required".into())),
    };
    let method: Option<CqspMethod> = method_or_auto(&common.method)?;
    let (c, used) = build_cqsp_with(&spec, common.ancilla, &CqspOptions { method, split })?;
    let analytic = analytic_qsp_depth(spec.n, spec.k, common.ancilla);
    let report = Report::new(&c, used.name(), analytic, seed);
    finish(&c, report, Target::Cqsp(spec), common)
}

pub fn unitary(matrix: Option<PathBuf>, random: Option<usize>, common: &Common) -> Result<(), CliError> {
    let (u, seed) = match (matrix, random) {
        (Some(p), _) => (matrix_from_json(&read(&p)?)?, None),
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            (haar_unitary(1 << n, &mut rng), Some(common.seed))
        }
        (None, None) => return Err(CliError::Input("either --matrix or --random is required".into())),
    };
    if common.method != "auto" && common.method != "csd" {
        return Err(CliError::Input(format!("unknown unitary method {:?}", common.method)));
    }
    let c = build_unitary_csd(&u, common.ancilla)?;
    let n = c.num_qubits();
    let m = common.ancilla.max(1);
    let mut report = Report::new(&c, "csd", analytic_unitary_depth(n, common.ancilla), seed);
    let bound = lower_bound_cnots(n);
    report.lower_bound_cnots = Some(bound);
    report.lower_bound_ratio = (bound > 0).then(|| c.cnot_count() as f64 / bound as f64);
    report.depth_model = depth_model(n, k_star(n, m), m).ok();
    finish(&c, report, Target::Unitary(u), common)
}

pub fn verify(
    circuit: &Path,
    state: Option<PathBuf>,
    spec: Option<PathBuf>,
    matrix: Option<PathBuf>,
    tol: f64,
) -> Result<(), CliError> {
    let c = circuit_from_json(&read(circuit)?)?;
    let target = match (state, spec, matrix) {
        (Some(p), None, None) => Target::State(state_from_json(&read(&p)?)?),
        (None, Some(p), None) => Target::Cqsp(cqsp_from_json(&read(&p)?)?),
        (None, None, Some(p)) => Target::Unitary(matrix_from_json(&read(&p)?)?),
        _ => return Err(CliError::Input("exactly one of --state, --spec, --matrix is required".into())),
    };
    let v = verify::verify(&c, &target, tol)?;
    println!("{}", serde_json::to_string_pretty(&v).expect("verdict serializes"));
    let reason = v.reason.clone().unwrap_or_default();
    match v.status {
        Status::Passed => Ok(()),
        Status::Failed => Err(CliError::Verification(reason)),
        Status::Unverifiable => Err(CliError::Unverifiable(reason)),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn bench(
    task: &str,
    n: NRange,
    k: NRange,
    ancilla: Vec<usize>,
    method: &str,
    seed: u64,
    tol: f64,
    verify: bool,
    csv: Option<PathBuf>,
) -> Result<(), CliError> {
    let task: SweepTask = task.parse()?;
    let mut cfg = SweepConfig::new(task, n.0);
    cfg.k = k.0;
    cfg.m = ancilla;
    cfg.method = SweepMethod::parse(task, method)?;
    cfg.seed = seed;
    cfg.tol = tol;
    cfg.verify = verify;
    let rows = run_sweep(&cfg)?;
    match csv {
        Some(p) => {
            let f = fs::File::create(&p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            write_csv(&rows, f)?;
        }
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(NRange::from_str("2..8").unwrap().0, 2..=8);
        assert_eq!(NRange::from_str("2..=8").unwrap().0, 2..=8);
        assert_eq!(NRange::from_str("5").unwrap().0, 5..=5);
        assert!(NRange::from_str("8..2").is_err());
        assert!(NRange::from_str("x").is_err());
    }
}
