mod common;

use common::{operator_on, state_fidelity};
use qramsynth::circuit::Circuit;
use qramsynth::cqsp::{build_cqsp, controlled_layers_threshold, CqspSpec};
use qramsynth::linalg::{haar_unitary, mat2_to_dyn, operator_distance, pauli_x, CMat, C64, ONE};
use qramsynth::sim::{extract_unitary, simulate_basis};
use qramsynth::unitary::{
    build_controlled_oracle, build_oracle, build_unitary_csd, csd_cnot_count, depth_model, k_star,
    lower_bound_cnots, OracleBranch, OracleSpec,
};
use qramsynth::SynthError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn identity_round_trip() {
    for n in 1..=3 {
        let u = CMat::identity(1 << n, 1 << n);
        let c = build_unitary_csd(&u, 0).unwrap();
        let got = extract_unitary(&c, &(0..n).collect::<Vec<_>>()).unwrap();
        assert!(operator_distance(&got, &u) <= 1e-10, "n={n}");
    }
}

#[test]
fn single_qubit_is_one_gate() {
    let u = haar_unitary(2, &mut rng(1));
    let c = build_unitary_csd(&u, 0).unwrap();
    assert_eq!((c.size(), c.depth(), c.num_qubits()), (1, 1, 1));
    assert!(operator_distance(&extract_unitary(&c, &[0]).unwrap(), &u) <= 1e-12);
}

#[test]
fn random_round_trip() {
    let mut r = rng(7);
    for n in 1..=4 {
        let on: Vec<usize> = (0..n).collect();
        for _ in 0..5 {
            let u = haar_unitary(1 << n, &mut r);
            let c = build_unitary_csd(&u, 0).unwrap();
            let d = operator_distance(&extract_unitary(&c, &on).unwrap(), &u);
            assert!(d <= 1e-8, "n={n} distance {d:.3e}");
            assert_eq!(c.cnot_count() as u64, csd_cnot_count(n));
        }
    }
}

#[test]
fn three_qubit_cnots_against_lower_bound() {
    let u = haar_unitary(8, &mut rng(11));
    let c = build_unitary_csd(&u, 0).unwrap();
    let ratio = c.cnot_count() as f64 / lower_bound_cnots(3) as f64;
    assert!(ratio <= 6.0, "ratio {ratio}");
}

#[test]
fn cnot_growth_is_quartic() {
    let mut r = rng(5);
    let counts: Vec<f64> = (2..=6)
        .map(|n| build_unitary_csd(&haar_unitary(1 << n, &mut r), 0).unwrap().cnot_count() as f64)
        .collect();
    // C(n)/4^n rises monotonically towards 3/4
    let scaled: Vec<f64> = counts.iter().enumerate().map(|(i, c)| c / 4f64.powi(i as i32 + 2)).collect();
    assert!(scaled.windows(2).all(|w| w[0] < w[1]));
    assert!(scaled.iter().all(|&s| s < 0.75));
    let last = (counts[4] / counts[3]).log2();
    assert!((1.9..=2.2).contains(&last), "slope between n=5 and n=6: {last}");
}

#[test]
fn rejects_non_unitary() {
    let mut u = CMat::identity(4, 4);
    u[(0, 1)] = C64::new(0.5, 0.0);
    assert!(matches!(build_unitary_csd(&u, 0), Err(SynthError::NonUnitary { .. })));
    assert!(build_unitary_csd(&CMat::identity(3, 3), 0).is_err());
    assert!(OracleSpec::new(u).is_err());
}

/// Target register after running on `|x⟩|0⟩`, with controls and ancillas required clean.
fn oracle_output(c: &Circuit, controls: usize, targets: usize, x: usize) -> Vec<C64> {
    let on: Vec<usize> = (0..controls + targets).collect();
    let r = simulate_basis(c, x, &on).unwrap();
    assert!(r.leaked <= 1e-9, "ancilla leak {}", r.leaked);
    let out: Vec<C64> = (0..1 << targets).map(|t| r.local[x | t << controls]).collect();
    let kept: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    assert!((kept - 1.0).abs() <= 1e-9, "control register disturbed for x={x}");
    out
}

#[test]
fn identity_oracle_copies() {
    let spec = OracleSpec::new(CMat::identity(4, 4)).unwrap();
    let c = build_oracle(&spec, 0).unwrap();
    for x in 0..4 {
        let r = simulate_basis(&c, x, &[0, 1, 2, 3]).unwrap();
        assert!((r.local[x | x << 2].norm() - 1.0).abs() <= 1e-9, "x={x}");
    }
}

#[test]
fn random_oracle_columns() {
    let u = haar_unitary(4, &mut rng(21));
    let spec = OracleSpec::new(u.clone()).unwrap();
    for m in [0, controlled_layers_threshold(2, 2)] {
        let c = build_oracle(&spec, m).unwrap();
        let reference = build_cqsp(&CqspSpec::new(2, 2, spec.columns()).unwrap(), m).unwrap();
        for x in 0..4 {
            let col: Vec<C64> = u.column(x).iter().copied().collect();
            let out = oracle_output(&c, 2, 2, x);
            assert!(state_fidelity(&out, &col) >= 1.0 - 1e-9, "m={m} x={x}");
            let refout = oracle_output(&reference, 2, 2, x);
            assert!(state_fidelity(&out, &refout) >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn oracle_inverse() {
    let spec = OracleSpec::new(haar_unitary(4, &mut rng(23))).unwrap();
    let c = build_oracle(&spec, 0).unwrap();
    let round = Circuit::compose(&c, &c.adjoint()).unwrap();
    let (op, leak) = operator_on(&round, &[0, 1, 2, 3]);
    assert!(leak <= 1e-9);
    assert!(operator_distance(&op, &CMat::identity(16, 16)) <= 1e-9);
}

#[test]
fn controlled_oracle_single_member() {
    let u = haar_unitary(4, &mut rng(31));
    let co = build_controlled_oracle(std::slice::from_ref(&u), 0, None).unwrap();
    assert_eq!(co.branch, OracleBranch::Cascade);
    let o = build_oracle(&OracleSpec::new(u).unwrap(), 0).unwrap();
    for x in 0..4 {
        let a = oracle_output(&co.circuit, 2, 2, x);
        let b = oracle_output(&o, 2, 2, x);
        assert!(state_fidelity(&a, &b) >= 1.0 - 1e-9);
    }
}

#[test]
fn controlled_oracle_identity_and_x() {
    let id = CMat::identity(2, 2);
    let x = mat2_to_dyn(&pauli_x());
    let co = build_controlled_oracle(&[id.clone(), x.clone()], 0, None).unwrap();
    let family = [id, x];
    // qubit 0 selects the member, qubit 1 the column, qubit 2 is the target
    for input in 0..4 {
        let (sel, col) = (input & 1, input >> 1);
        let r = simulate_basis(&co.circuit, input, &[0, 1, 2]).unwrap();
        for t in 0..2 {
            let want = family[sel][(t, col)];
            assert!((r.local[input | t << 2] - want).norm() <= 1e-9, "input {input} target {t}");
        }
    }
}

#[test]
fn controlled_oracle_branches_agree() {
    let mut r = rng(41);
    let family = vec![haar_unitary(4, &mut r), haar_unitary(4, &mut r)];
    let cascade = build_controlled_oracle(&family, 0, Some(OracleBranch::Cascade)).unwrap();
    let m = qramsynth::cqsp::controlled_layers_min_ancillas(2, 3);
    let cqsp = build_controlled_oracle(&family, m, Some(OracleBranch::Cqsp)).unwrap();
    assert_eq!(cqsp.branch, OracleBranch::Cqsp);
    assert!(cqsp.method.is_some());
    for input in 0..8 {
        let (sel, col) = (input & 1, input >> 1);
        let want: Vec<C64> = family[sel].column(col).iter().copied().collect();
        let a = oracle_output(&cascade.circuit, 3, 2, input);
        let b = oracle_output(&cqsp.circuit, 3, 2, input);
        assert!(state_fidelity(&a, &want) >= 1.0 - 1e-9, "cascade input {input}");
        assert!(state_fidelity(&b, &want) >= 1.0 - 1e-9, "cqsp input {input}");
        assert!(state_fidelity(&a, &b) >= 1.0 - 1e-9);
    }
    assert!(matches!(
        build_controlled_oracle(&family, 3, Some(OracleBranch::Cqsp)),
        Err(SynthError::InsufficientAncillas { .. })
    ));
}

#[test]
fn controlled_oracle_rejects_bad_family() {
    let mut r = rng(43);
    assert!(build_controlled_oracle(&[], 0, None).is_err());
    let three = vec![haar_unitary(2, &mut r), haar_unitary(2, &mut r), haar_unitary(2, &mut r)];
    assert!(build_controlled_oracle(&three, 0, None).is_err());
    let mixed = vec![haar_unitary(2, &mut r), haar_unitary(4, &mut r)];
    assert!(build_controlled_oracle(&mixed, 0, None).is_err());
    let mut bad = CMat::identity(2, 2);
    bad[(1, 1)] = ONE * 2.0;
    assert!(build_controlled_oracle(&[bad, CMat::identity(2, 2)], 0, None).is_err());
}

#[test]
fn depth_model_values() {
    let p = depth_model(4, 2, 16).unwrap();
    assert_eq!(p.predicted_depth, 64.0);
    assert_eq!(p.predicted_size, 16.0 * 8.0 + 512.0);
    assert_eq!(k_star(6, 384), 5);
    // log2(4·16) - 4 = 2
    assert_eq!(k_star(4, 16), 2);
    // clamped at both ends
    assert_eq!(k_star(5, 1), 1);
    assert_eq!(k_star(3, 1 << 20), 3);
}

#[test]
fn k_star_not_worse_than_extremes() {
    for n in 2..=8 {
        for m in [1usize, 8, 64, 512, 4096, 1 << 16] {
            let ks = k_star(n, m);
            let at = |k| depth_model(n, k, m).unwrap().predicted_depth;
            assert!(at(ks) <= at(1) + 1e-9 && at(ks) <= at(n) + 1e-9, "n={n} m={m} k*={ks}");
        }
    }
}
