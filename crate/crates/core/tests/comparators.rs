mod common;

use common::{comparison_program, functional_fidelity, simulate, value, Rhs, RELATIONS};
use hodl_core::semantics::RelOp;
use hodl_core::simulator::{assert_ancilla_clean, run};
use hodl_core::synth::{compare, Operand};
use hodl_core::{qasm, Circuit, GateInstr, Tape};

fn check(a_states: u64, rhs: Rhs, op: &str, pred: fn(u64, u64) -> bool) {
    let src = comparison_program(a_states, rhs, op);
    let (_, circuit, state) = simulate(&src, None);
    let (fidelity, _) = match rhs {
        Rhs::Reg(_) => functional_fidelity(&circuit, &state, &["a", "b"], "r", |v| pred(v[0], v[1]) as u64),
        Rhs::Const(c) => functional_fidelity(&circuit, &state, &["a"], "r", |v| pred(v[0], c) as u64),
    };
    assert!(fidelity > 1.0 - 1e-9, "{src}");
    assert!(assert_ancilla_clean(&state, &circuit.pool_qubits(), 1e-9), "{src}");
}

#[test]
fn register_pairs() {
    for (op, pred) in RELATIONS {
        for wa in 1..=3 {
            for wb in 1..=3 {
                check(1 << wa, Rhs::Reg(1 << wb), op, pred);
            }
        }
    }
}

#[test]
fn constants() {
    for (op, pred) in RELATIONS {
        for c in [0, 1, 3, 4, 7, 9] {
            check(8, Rhs::Const(c), op, pred);
        }
    }
}

#[test]
fn comparator_result_qubit() {
    for op in RelOp::ALL {
        let mut tape = Tape::new();
        let a = tape.alloc_user("a", 2).unwrap();
        let b = tape.alloc_user("b", 3).unwrap();
        for q in a.qubits().chain(b.qubits()) {
            tape.append(GateInstr::h(q)).unwrap();
        }
        let cmp = compare(&mut tape, op, &Operand::Reg(a), &Operand::Reg(b)).unwrap();
        assert_eq!(cmp.name, "cmp0");
        tape.seal().unwrap();
        let circuit = Circuit::load(&qasm::emit(&tape).unwrap()).unwrap();
        let state = run(&circuit, None);
        for (i, amp) in state.amplitudes().iter().enumerate() {
            if amp.norm_sqr() > 1e-12 {
                let (x, y) = (value(&circuit, "a", i), value(&circuit, "b", i));
                assert_eq!(value(&circuit, "cmp0", i) == 1, op.holds(x, y), "{op:?} {x} {y}");
            }
        }
        let scratch: Vec<usize> = circuit
            .pool_qubits()
            .into_iter()
            .filter(|&q| q != circuit.register("cmp0").unwrap().base)
            .collect();
        assert!(assert_ancilla_clean(&state, &scratch, 1e-9));
    }
}
