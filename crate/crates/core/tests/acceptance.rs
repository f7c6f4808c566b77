//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use common::{
    comparison_program, compile_with, fixture, frontend_dumps, functional_fidelity, golden, random_program, Rhs,
    LISTINGS, RELATIONS,
};
use hodl_core::qasm::validate_roundtrip;
use hodl_core::simulator::{amplitude_of, assert_ancilla_clean, measure_all, run};
use hodl_core::{compile, Circuit, CompileOptions};
use sha2::{Digest, Sha256};

const GROVER_EXACT: f64 = 0.9453125;
const GROVER_TOL: f64 = 1e-6;
const GROVER_SINGLE_MIN: f64 = 0.78;
const GROVER_RUNTIME: Duration = Duration::from_secs(5);
const GROVER_SHOTS: u64 = 4096;
const GROVER_COUNT_RANGE: (u64, u64) = (3600, 4050);
const AMPLITUDE_TOL: f64 = 1e-9;
const PROBABILITY_TOL: f64 = 1e-9;
const CLEAN_TOL: f64 = 1e-9;
const RANDOM_FIXTURES: u64 = 20;
const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grover_end_to_end() -> Outcome {
    let src = fixture("grover.hodl");
    let start = Instant::now();
    let c = compile_with(&src, None);
    let circuit = Circuit::load(&c.qasm).map_err(|e| e.to_string())?;
    let state = run(&circuit, None);
    let exact = measure_all(&circuit, &state, 0, 0).probability("000");
    let elapsed = start.elapsed();
    ensure((exact - GROVER_EXACT).abs() <= GROVER_TOL, || format!("P(000) = {exact}"))?;
    ensure(elapsed < GROVER_RUNTIME, || format!("took {elapsed:?}"))?;

    let sampled = measure_all(&circuit, &state, GROVER_SHOTS, 0).count("000");
    ensure((GROVER_COUNT_RANGE.0..=GROVER_COUNT_RANGE.1).contains(&sampled), || {
        format!("count(000) = {sampled} of {GROVER_SHOTS}")
    })?;

    let c1 = compile_with(&src, Some(1));
    let circuit1 = Circuit::load(&c1.qasm).map_err(|e| e.to_string())?;
    let single = measure_all(&circuit1, &run(&circuit1, None), 0, 0).probability("000");
    ensure(single >= GROVER_SINGLE_MIN, || format!("k=1: P(000) = {single}"))?;
    Ok(format!(
        "P(000) = {exact:.9} (k=2), {single:.9} (k=1), {sampled}/{GROVER_SHOTS} sampled, {} qubits, {elapsed:.2?}",
        circuit.num_qubits()
    ))
}

fn deutsch_jozsa_end_to_end() -> Outcome {
    let c = compile_with(&fixture("deutsch_jozsa.hodl"), None);
    let circuit = Circuit::load(&c.qasm).map_err(|e| e.to_string())?;
    let state = run(&circuit, None);
    let amp = amplitude_of(&circuit, &state, &[("test", 0b1000)]).ok_or("no register `test`")?;
    ensure((amp.norm() - 1.0).abs() <= AMPLITUDE_TOL, || format!("|amp(1000)| = {}", amp.norm()))?;
    for (shots, seed) in [(1, 0), (1024, 0), (4096, 7), (10_000, 12345)] {
        let d = measure_all(&circuit, &state, shots, seed);
        ensure(d.count("1000") == shots, || format!("{shots} shots, seed {seed}: {}", d.report()))?;
    }
    Ok(format!("|amp(1000)| = {:.12}, all samples 1000", amp.norm()))
}

/// Checks a compiled oracle on every input of its superposed registers.
fn oracle_table(src: &str, inputs: &[&str], out: &str, width: usize, f: impl Fn(&[u64]) -> u64) -> Result<usize, String> {
    let c = compile_with(src, None);
    let got = c
        .plan
        .user_registers
        .iter()
        .find(|(n, _)| n == out)
        .map(|r| r.1)
        .ok_or_else(|| format!("no register {out}"))?;
    ensure(got == width, || format!("`{out}` has width {got}, expected {width}"))?;
    let circuit = Circuit::load(&c.qasm).map_err(|e| e.to_string())?;
    let state = run(&circuit, None);
    let (fidelity, cases) = functional_fidelity(&circuit, &state, inputs, out, f);
    ensure(fidelity >= 1.0 - PROBABILITY_TOL, || format!("{src}: fidelity {fidelity}"))?;
    Ok(cases)
}

fn arithmetic_equivalence() -> Outcome {
    let add = oracle_table(
        "function main() { super a = 8; super b = 8; super c = a + b; }",
        &["a", "b"],
        "c",
        4,
        |v| v[0] + v[1],
    )?;
    let sub = oracle_table(
        "function main() { super a = 8; super b = 8; super c = a - b; }",
        &["a", "b"],
        "c",
        3,
        |v| v[0].wrapping_sub(v[1]) % 8,
    )?;
    let mul = oracle_table(
        "function main() { super k = 8; super l = 4; super m = k * l; }",
        &["k", "l"],
        "m",
        5,
        |v| v[0] * v[1],
    )?;
    ensure(add == 64 && sub == 64 && mul == 32, || format!("cases {add}/{sub}/{mul}"))?;
    Ok(format!("add {add}, sub {sub}, mul {mul} input pairs exact; widths 4/3/5"))
}

fn comparator_tables() -> Outcome {
    let mut programs = 0;
    for (op, pred) in RELATIONS {
        for wa in 1..=4 {
            for wb in 1..=4 {
                let src = comparison_program(1 << wa, Rhs::Reg(1 << wb), op);
                let c = compile_with(&src, None);
                let circuit = Circuit::load(&c.qasm).map_err(|e| e.to_string())?;
                let state = run(&circuit, None);
                let (fidelity, cases) =
                    functional_fidelity(&circuit, &state, &["a", "b"], "r", |v| pred(v[0], v[1]) as u64);
                ensure(fidelity >= 1.0 - PROBABILITY_TOL && cases == 1 << (wa + wb), || {
                    format!("a {op} b, widths {wa},{wb}: fidelity {fidelity} over {cases}")
                })?;
                ensure(assert_ancilla_clean(&state, &circuit.pool_qubits(), CLEAN_TOL), || {
                    format!("a {op} b, widths {wa},{wb}: pool not clean")
                })?;
                programs += 1;
            }
        }
    }
    Ok(format!("{programs} operator/width combinations, pool clean after each"))
}

fn uncomputation_invariant() -> Outcome {
    let mut sources = vec![
        ("grover".to_string(), fixture("grover.hodl")),
        ("deutsch_jozsa".to_string(), fixture("deutsch_jozsa.hodl")),
    ];
    sources.extend((0..RANDOM_FIXTURES).map(|s| (format!("random #{s}"), random_program(s))));
    for (name, src) in &sources {
        let c = compile_with(src, None);
        let circuit = Circuit::load(&c.qasm).map_err(|e| e.to_string())?;
        let state = run(&circuit, None);
        ensure(assert_ancilla_clean(&state, &circuit.pool_qubits(), CLEAN_TOL), || {
            format!("{name} leaves pool qubits dirty\n{src}")
        })?;
    }
    Ok(format!("{} programs clean at {CLEAN_TOL:e}", sources.len()))
}

fn frontend_golden_suite() -> Outcome {
    for name in LISTINGS {
        let (tokens, ast) = frontend_dumps(name);
        ensure((tokens.clone(), ast.clone()) == frontend_dumps(name), || format!("{name} dump unstable"))?;
        golden(&format!("{name}.tokens"), &tokens)?;
        golden(&format!("{name}.ast"), &ast)?;
    }
    let classes = [
        "TypeError",
        "NonQuantumInQuantumBlock",
        "ReturnInQuantumBlock",
        "MarkOutsideConditional",
        "NotPowerOfTwo",
        "QuantumReassignment",
        "UndefinedIdentifier",
        "MixedCondition",
    ];
    for code in classes {
        let src = fixture(&format!("errors/{code}.hodl"));
        match compile(&src, &CompileOptions::default()) {
            Err(e) if e.code() == code => {}
            Err(e) => return Err(format!("{code} fixture raised {}", e.to_diagnostic())),
            Ok(_) => return Err(format!("{code} fixture compiled")),
        }
    }
    Ok(format!("{} listings byte-stable, {} error classes triggered", LISTINGS.len(), classes.len()))
}

fn emitter_conformance() -> Outcome {
    let mut docs = vec![
        fixture("grover.hodl"),
        fixture("deutsch_jozsa.hodl"),
        "function main() { super x = 8; super y = 8; super s = x + y; measure s; measure x; }".to_string(),
    ];
    docs.extend((0..RANDOM_FIXTURES).map(random_program));
    for src in &docs {
        let c = compile_with(src, None);
        ensure(c.qasm.starts_with(HEADER), || format!("bad header\n{}", c.qasm))?;
        let back = validate_roundtrip(&c.qasm).map_err(|e| e.to_string())?;
        ensure(back.total_qubits() == c.tape.total_qubits(), || "qubit count changed".into())?;
        for name in src.lines().filter_map(|l| l.trim().strip_prefix("measure ")) {
            let var = name.trim_end_matches(';').trim();
            let decl = format!("creg creg_{var}[");
            ensure(c.qasm.contains(&decl), || format!("missing `{decl}`"))?;
        }
    }
    Ok(format!("{} documents: header, round trip and creg naming", docs.len()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn determinism() -> Outcome {
    let mut digests = Vec::new();
    for name in ["grover", "deutsch_jozsa"] {
        let src = fixture(&format!("{name}.hodl"));
        let (a, b) = (compile_with(&src, None), compile_with(&src, None));
        ensure(a.qasm == b.qasm, || format!("{name}: QASM differs between runs"))?;
        golden(&format!("{name}.qasm"), &a.qasm)?;
        let circuit = Circuit::load(&a.qasm).map_err(|e| e.to_string())?;
        let state = run(&circuit, None);
        let first = measure_all(&circuit, &state, 4096, 2024);
        let second = measure_all(&circuit, &run(&circuit, None), 4096, 2024);
        ensure(first == second, || format!("{name}: sampled counts differ"))?;
        golden(&format!("{name}.counts"), &first.report())?;
        digests.push(format!("{name} {}", &hex(&Sha256::digest(a.qasm.as_bytes()))[..16]));
    }
    Ok(format!("QASM and counts match stored artifacts ({})", digests.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("grover end-to-end", grover_end_to_end),
        ("deutsch-jozsa end-to-end", deutsch_jozsa_end_to_end),
        ("arithmetic oracle equivalence", arithmetic_equivalence),
        ("comparator truth tables", comparator_tables),
        ("uncomputation invariant", uncomputation_invariant),
        ("frontend golden suite", frontend_golden_suite),
        ("emitter conformance", emitter_conformance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
