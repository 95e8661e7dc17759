//! JSON file formats. Complex numbers are `[re, im]` pairs; matrices are row-major.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::cqsp::CqspSpec;
use crate::error::{Result, SynthError};
use crate::linalg::{CMat, Mat2, C64};
use crate::sim::StateVector;
use crate::ucg::UcuSpec;

pub type Pair = [f64; 2];

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn parse<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| SynthError::Format(e.to_string()))
}

fn render<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data always serializes")
}

fn rows_of(m: &CMat) -> Vec<Vec<Pair>> {
    m.row_iter().map(|r| r.iter().map(|&z| pair(z)).collect()).collect()
}

fn matrix_of(rows: &[Vec<Pair>]) -> Result<CMat> {
    let dim = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(SynthError::DimensionMismatch { expected: dim, got: r.len() });
    }
    Ok(CMat::from_fn(dim, dim, |i, j| complex(rows[i][j])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GateRecord {
    U { target: usize, matrix: [[Pair; 2]; 2] },
    Cx { control: usize, target: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitRecord {
    pub num_qubits: usize,
    #[serde(default)]
    pub ancillas: Vec<usize>,
    pub gates: Vec<GateRecord>,
}

impl From<&Circuit> for CircuitRecord {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates()
            .iter()
            .map(|g| match *g {
                Gate::OneQubit { target, matrix: m } => GateRecord::U {
                    target,
                    matrix: [[pair(m[(0, 0)]), pair(m[(0, 1)])], [pair(m[(1, 0)]), pair(m[(1, 1)])]],
                },
                Gate::Cnot { control, target } => GateRecord::Cx { control, target },
            })
            .collect();
        CircuitRecord { num_qubits: c.num_qubits(), ancillas: c.ancillas().iter().copied().collect(), gates }
    }
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = SynthError;

    fn try_from(r: CircuitRecord) -> Result<Circuit> {
        let gates = r.gates.into_iter().map(|g| match g {
            GateRecord::U { target, matrix: m } => Gate::one_qubit(
                target,
                Mat2::new(complex(m[0][0]), complex(m[0][1]), complex(m[1][0]), complex(m[1][1])),
            ),
            GateRecord::Cx { control, target } => Gate::cnot(control, target),
        });
        let mut c = Circuit::from_gates(r.num_qubits, gates)?;
        c.declare_ancillas(r.ancillas)?;
        Ok(c)
    }
}

pub fn circuit_to_json(c: &Circuit) -> String {
    render(&CircuitRecord::from(c))
}

pub fn circuit_from_json(s: &str) -> Result<Circuit> {
    parse::<CircuitRecord>(s)?.try_into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub num_qubits: usize,
    pub amplitudes: Vec<Pair>,
}

pub fn state_to_json(s: &StateVector) -> String {
    render(&StateRecord {
        num_qubits: s.num_qubits(),
        amplitudes: s.amplitudes().iter().map(|&z| pair(z)).collect(),
    })
}

/// Parses and validates length `2^num_qubits` and unit norm.
pub fn state_from_json(s: &str) -> Result<StateVector> {
    let r: StateRecord = parse(s)?;
    let expected = 1usize
        .checked_shl(r.num_qubits as u32)
        .ok_or_else(|| SynthError::Format(format!("num_qubits {} too large", r.num_qubits)))?;
    if r.amplitudes.len() != expected {
        return Err(SynthError::DimensionMismatch { expected, got: r.amplitudes.len() });
    }
    StateVector::new(r.amplitudes.into_iter().map(complex).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub n: usize,
    pub rows: Vec<Vec<Pair>>,
}

pub fn matrix_to_json(m: &CMat) -> String {
    render(&MatrixRecord { n: m.nrows().trailing_zeros() as usize, rows: rows_of(m) })
}

/// Parses a square `2^n` matrix. Unitarity is left to the consumer.
pub fn matrix_from_json(s: &str) -> Result<CMat> {
    let r: MatrixRecord = parse(s)?;
    if r.n >= 16 || r.rows.len() != 1 << r.n {
        return Err(SynthError::DimensionMismatch { expected: 1usize << r.n.min(16), got: r.rows.len() });
    }
    matrix_of(&r.rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcuRecord {
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
    pub table: Vec<Vec<Vec<Pair>>>,
}

pub fn ucu_to_json(spec: &UcuSpec) -> String {
    render(&UcuRecord {
        controls: spec.controls.clone(),
        targets: spec.targets.clone(),
        table: spec.table.iter().map(rows_of).collect(),
    })
}

pub fn ucu_from_json(s: &str) -> Result<UcuSpec> {
    let r: UcuRecord = parse(s)?;
    let table = r.table.iter().map(|m| matrix_of(m)).collect::<Result<Vec<_>>>()?;
    UcuSpec::new(r.controls, r.targets, table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqspRecord {
    pub k: usize,
    pub n: usize,
    pub states: Vec<Vec<Pair>>,
}

pub fn cqsp_to_json(spec: &CqspSpec) -> String {
    render(&CqspRecord {
        k: spec.k,
        n: spec.n,
        states: spec.states.iter().map(|s| s.iter().map(|&z| pair(z)).collect()).collect(),
    })
}

pub fn cqsp_from_json(s: &str) -> Result<CqspSpec> {
    let r: CqspRecord = parse(s)?;
    if r.k + r.n >= 40 {
        return Err(SynthError::Format(format!("k + n = {} is too large", r.k + r.n)));
    }
    let states = r.states.into_iter().map(|s| s.into_iter().map(complex).collect()).collect();
    CqspSpec::new(r.k, r.n, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, haar_unitary2, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circuit_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = Circuit::new(3);
        c.u(0, haar_unitary2(&mut rng)).cx(0, 2).u(2, haar_unitary2(&mut rng));
        c.declare_ancilla(2).unwrap();
        let back = circuit_from_json(&circuit_to_json(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn circuit_text_format() {
        let s = r#"{"num_qubits": 2, "ancillas": [1], "gates": [
            {"kind": "u", "target": 0, "matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]},
            {"kind": "cx", "control": 0, "target": 1}]}"#;
        let c = circuit_from_json(s).unwrap();
        assert_eq!((c.size(), c.cnot_count(), c.ancillas().len()), (2, 1, 1));
        let bad = r#"{"num_qubits": 1, "gates": [{"kind": "cx", "control": 0, "target": 0}]}"#;
        assert!(circuit_from_json(bad).is_err());
        let nonunitary = r#"{"num_qubits": 1, "gates": [{"kind": "u", "target": 0, "matrix": [[[2,0],[0,0]],[[0,0],[1,0]]]}]}"#;
        assert!(matches!(circuit_from_json(nonunitary), Err(SynthError::NonUnitaryGate { .. })));
        assert!(matches!(circuit_from_json("{"), Err(SynthError::Format(_))));
    }

    #[test]
    fn state_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = StateVector::new(random_state(8, &mut rng)).unwrap();
        assert_eq!(state_from_json(&state_to_json(&s)).unwrap().amplitudes(), s.amplitudes());
        assert!(state_from_json(r#"{"num_qubits": 1, "amplitudes": [[1,0]]}"#).is_err());
        assert!(state_from_json(r#"{"num_qubits": 1, "amplitudes": [[1,0],[1,0]]}"#).is_err());
    }

    #[test]
    fn matrix_and_specs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(4, &mut rng);
        assert_eq!(matrix_from_json(&matrix_to_json(&u)).unwrap(), u);
        assert!(matrix_from_json(r#"{"n": 1, "rows": [[[1,0]]]}"#).is_err());

        let ucu = UcuSpec::new(vec![0], vec![1], vec![haar_unitary(2, &mut rng), haar_unitary(2, &mut rng)]).unwrap();
        let back = ucu_from_json(&ucu_to_json(&ucu)).unwrap();
        assert_eq!(back.table, ucu.table);

        let spec = CqspSpec::new(1, 2, vec![random_state(4, &mut rng), random_state(4, &mut rng)]).unwrap();
        assert_eq!(cqsp_from_json(&cqsp_to_json(&spec)).unwrap(), spec);
    }
}
