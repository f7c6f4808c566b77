mod common;

use common::{fixture, simulate};
use hodl_core::qasm::validate_roundtrip;
use hodl_core::simulator::{amplitude_of, assert_ancilla_clean, measure_all, run_traced};

#[test]
fn grover_program() {
    let src = fixture("grover.hodl");
    let (c, circuit, state) = simulate(&src, None);
    assert_eq!(c.tape.total_qubits(), c.plan.total_qubits);
    assert_eq!(circuit.num_qubits(), 15);
    let d = measure_all(&circuit, &state, 0, 0);
    assert!((d.probability("000") - 0.9453125).abs() < 1e-6, "{}", d.report());
    assert!(assert_ancilla_clean(&state, &circuit.pool_qubits(), 1e-9));
    let (_, drift) = run_traced(&circuit, None);
    assert!(drift < 1e-9);
    validate_roundtrip(&c.qasm).unwrap();
}

#[test]
fn grover_single_iteration() {
    let (_, circuit, state) = simulate(&fixture("grover.hodl"), Some(1));
    let p = measure_all(&circuit, &state, 0, 0).probability("000");
    assert!((p - 0.78125).abs() < 1e-9, "{p}");
}

#[test]
fn deutsch_jozsa_program() {
    let src = fixture("deutsch_jozsa.hodl");
    let (c, circuit, state) = simulate(&src, None);
    assert_eq!(circuit.num_qubits(), 16);
    let a = amplitude_of(&circuit, &state, &[("test", 8)]).unwrap();
    assert!((a.norm() - 1.0).abs() < 1e-9, "{a}");
    assert!(assert_ancilla_clean(&state, &circuit.pool_qubits(), 1e-9));
    let d = measure_all(&circuit, &state, 4096, 3);
    assert_eq!(d.count("1000"), 4096);
    validate_roundtrip(&c.qasm).unwrap();
}
