mod common;

use common::{functional_fidelity, simulate, value};
use hodl_core::simulator::{assert_ancilla_clean, run};
use hodl_core::synth::{add_into, mul_into, sub_into, Operand};
use hodl_core::{qasm, Circuit, GateInstr, RegKind, Tape};
use proptest::prelude::*;

fn width_of(c: &hodl_core::Compilation, name: &str) -> usize {
    c.plan
        .user_registers
        .iter()
        .find(|(n, _)| n == name)
        .unwrap_or_else(|| panic!("no register {name}"))
        .1
}

fn check(src: &str, inputs: &[&str], out: &str, width: usize, f: impl Fn(&[u64]) -> u64) {
    let (c, circuit, state) = simulate(src, None);
    assert_eq!(width_of(&c, out), width, "{src}");
    let (fidelity, seen) = functional_fidelity(&circuit, &state, inputs, out, f);
    assert!(fidelity > 1.0 - 1e-9, "{fidelity}\n{src}");
    assert!(seen > 1);
    assert!(assert_ancilla_clean(&state, &circuit.pool_qubits(), 1e-9));
}

#[test]
fn addition_table() {
    check(
        "function main() { super a = 8; super b = 8; super c = a + b; }",
        &["a", "b"],
        "c",
        4,
        |v| v[0] + v[1],
    );
}

#[test]
fn subtraction_wraps() {
    check(
        "function main() { super a = 8; super b = 8; super c = a - b; }",
        &["a", "b"],
        "c",
        3,
        |v| v[0].wrapping_sub(v[1]) & 7,
    );
}

#[test]
fn multiplication_table() {
    check(
        "function main() { super k = 8; super l = 4; super m = k * l; }",
        &["k", "l"],
        "m",
        5,
        |v| v[0] * v[1],
    );
}

#[test]
fn constant_operands() {
    check("function main() { super a = 16; super c = a + 7; }", &["a"], "c", 5, |v| v[0] + 7);
    check("function main() { super a = 8; super c = a - 3; }", &["a"], "c", 3, |v| v[0].wrapping_sub(3) & 7);
    check("function main() { super a = 8; super c = a * 4; }", &["a"], "c", 5, |v| v[0] * 4);
    check("function main() { super a = 8; super c = a * a; }", &["a"], "c", 6, |v| v[0] * v[0]);
}

#[test]
fn nested_expressions() {
    let src = "function main() { super a = 4; super b = 4; super c = a * b + a - 1; }";
    let w = width_of(&common::compile_with(src, None), "c");
    check(src, &["a", "b"], "c", w, |v| (v[0] * v[1] + v[0]).wrapping_sub(1) & ((1 << w) - 1));
}

/// Runs a Draper circuit built directly on a tape from one basis input.
fn tape_run(wa: usize, wb: usize, wr: usize, x: u64, y: u64, build: fn(&mut Tape, &Operand, &Operand, &hodl_core::QReg)) -> u64 {
    let mut tape = Tape::new();
    let a = tape.alloc_user("a", wa).unwrap();
    let b = tape.alloc_user("b", wb).unwrap();
    let r = tape.alloc_user("r", wr).unwrap();
    for (reg, v) in [(&a, x), (&b, y)] {
        for i in (0..reg.width).filter(|i| v >> i & 1 == 1) {
            tape.append(GateInstr::x(reg.qubit(i))).unwrap();
        }
    }
    build(&mut tape, &Operand::Reg(a), &Operand::Reg(b), &r);
    tape.seal().unwrap();
    let circuit = Circuit::load(&qasm::emit(&tape).unwrap()).unwrap();
    let state = run(&circuit, None);
    let (i, p) = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| (i, a.norm_sqr()))
        .fold((0, 0.0), |m, x| if x.1 > m.1 { x } else { m });
    assert!(p > 1.0 - 1e-9, "{p}");
    value(&circuit, "r", i)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn draper_adder_matches_integers(wa in 1usize..5, wb in 1usize..5, wr in 1usize..6, x: u64, y: u64) {
        let (x, y) = (x % (1 << wa), y % (1 << wb));
        let got = tape_run(wa, wb, wr, x, y, |t, a, b, r| add_into(t, a, b, r).unwrap());
        prop_assert_eq!(got, (x + y) % (1 << wr));
    }

    #[test]
    fn subtractor_matches_integers(wa in 1usize..5, wb in 1usize..5, wr in 1usize..6, x: u64, y: u64) {
        let (x, y) = (x % (1 << wa), y % (1 << wb));
        let got = tape_run(wa, wb, wr, x, y, |t, a, b, r| sub_into(t, a, b, r).unwrap());
        prop_assert_eq!(got, x.wrapping_sub(y) % (1 << wr));
    }

    #[test]
    fn multiplier_matches_integers(wa in 1usize..4, wb in 1usize..4, wr in 1usize..7, x: u64, y: u64) {
        let (x, y) = (x % (1 << wa), y % (1 << wb));
        let got = tape_run(wa, wb, wr, x, y, |t, a, b, r| mul_into(t, a, b, r).unwrap());
        prop_assert_eq!(got, (x * y) % (1 << wr));
    }
}

#[test]
fn pool_registers_are_named_by_kind() {
    let mut tape = Tape::new();
    assert_eq!(tape.alloc(2, RegKind::Ancilla).unwrap().name, "ancilla0");
    assert_eq!(tape.alloc(1, RegKind::Cmp).unwrap().name, "cmp0");
}
