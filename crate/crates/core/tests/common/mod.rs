#![allow(dead_code)]

use hodl_core::simulator::{run, StateVector};
use hodl_core::{compile, Circuit, Compilation, CompileOptions, SynthOptions};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn compile_with(src: &str, grover_iterations: Option<u64>) -> Compilation {
    let options = CompileOptions {
        synth: SynthOptions {
            grover_solutions: 1,
            grover_iterations,
        },
    };
    compile(src, &options).unwrap_or_else(|e| panic!("{}\n{src}", e.to_diagnostic()))
}

pub fn simulate(src: &str, grover_iterations: Option<u64>) -> (Compilation, Circuit, StateVector) {
    let c = compile_with(src, grover_iterations);
    let circuit = Circuit::load(&c.qasm).unwrap();
    let state = run(&circuit, None);
    (c, circuit, state)
}

/// Value of register `reg` in basis state `index`.
pub fn value(circuit: &Circuit, reg: &str, index: usize) -> u64 {
    let r = circuit.register(reg).unwrap_or_else(|| panic!("no register {reg}"));
    ((index >> r.base) & ((1 << r.width) - 1)) as u64
}

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random oracle program: arithmetic on the searched register, one
/// quantum conditional and a `mark`, searched with `filter` or marked
/// directly from `main`.
pub fn random_program(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = rng.random_range(2..=3u32);
    let ops = ["+", "-", "*"];
    let rels = ["<", ">", "<=", ">=", "==", "!="];
    let angles = ["pi", "3*pi", "0 - pi"];
    let op1 = *ops.choose(&mut rng).unwrap();
    let c1 = if op1 == "*" { rng.random_range(1..=3) } else { rng.random_range(1..=7) };
    let second = rng.random_bool(0.5).then(|| (*["+", "-"].choose(&mut rng).unwrap(), rng.random_range(0..=3)));
    let rel = *rels.choose(&mut rng).unwrap();
    let c2 = rng.random_range(0..=12);
    let angle = *angles.choose(&mut rng).unwrap();
    let mut body = format!("    super y = x {op1} {c1};\n");
    let tested = match second {
        Some((op2, c3)) => {
            body += &format!("    super z = y {op2} {c3};\n");
            "z"
        }
        None => "y",
    };
    body += &format!("    if ({tested} {rel} {c2}) {{\n        mark(x, {angle});\n    }}\n");
    let n = 1u64 << width;
    if rng.random_bool(0.5) {
        format!(
            "oracle o(super x) {{\n{body}}}\n\nfunction main() {{\n    super v = {n};\n    filter(o(v), v);\n    measure v;\n}}\n"
        )
    } else {
        format!(
            "function main() {{\n    super x = {n};\n{body}    H(x);\n    measure x;\n}}\n"
        )
    }
}

/// Groups the final state's basis components by the values of `inputs` and
/// returns, over all input assignments present, the smallest probability
/// that `output` holds `f(inputs)`, with the number of assignments seen.
pub fn functional_fidelity(
    circuit: &Circuit,
    state: &StateVector,
    inputs: &[&str],
    output: &str,
    f: impl Fn(&[u64]) -> u64,
) -> (f64, usize) {
    let mut groups: std::collections::BTreeMap<Vec<u64>, (f64, f64)> = Default::default();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p < 1e-15 {
            continue;
        }
        let key: Vec<u64> = inputs.iter().map(|r| value(circuit, r, i)).collect();
        let good = value(circuit, output, i) == f(&key);
        let e = groups.entry(key).or_default();
        e.0 += p;
        if good {
            e.1 += p;
        }
    }
    let worst = groups.values().map(|(t, g)| g / t).fold(1.0, f64::min);
    (worst, groups.len())
}

pub type Relation = (&'static str, fn(u64, u64) -> bool);

pub const RELATIONS: [Relation; 6] = [
    ("<", |a, b| a < b),
    (">", |a, b| a > b),
    ("<=", |a, b| a <= b),
    (">=", |a, b| a >= b),
    ("==", |a, b| a == b),
    ("!=", |a, b| a != b),
];

/// Right-hand side of a generated comparison.
#[derive(Debug, Clone, Copy)]
pub enum Rhs {
    /// Register `b` over this many states.
    Reg(u64),
    Const(u64),
}

/// Program copying `a op rhs` into the one-qubit register `r`, with `a`
/// (and `b`) in uniform superposition.
pub fn comparison_program(a_states: u64, rhs: Rhs, op: &str) -> String {
    let (decl, operand) = match rhs {
        Rhs::Reg(n) => (format!("    super b = {n};\n"), "b".to_string()),
        Rhs::Const(c) => (String::new(), c.to_string()),
    };
    format!(
        "function main() {{\n    super a = {a_states};\n{decl}    super r = 1;\n    if (a {op} {operand}) {{\n        X(r);\n    }}\n}}\n"
    )
}

/// Reference programs kept as fixtures.
pub const LISTINGS: [&str; 7] = [
    "functions",
    "types",
    "conditionals",
    "loops",
    "gates",
    "grover",
    "deutsch_jozsa",
];

/// Compares `actual` with the stored golden file, or rewrites the file when
/// `HODL_BLESS` is set.
pub fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    if std::env::var_os("HODL_BLESS").is_some() {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    if expected == actual {
        Ok(())
    } else {
        let line = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .map_or_else(|| "length".to_string(), |l| format!("line {}", l + 1));
        Err(format!("{name} differs from golden at {line}"))
    }
}

/// Token and syntax-tree dumps of a listing.
pub fn frontend_dumps(listing: &str) -> (String, String) {
    let src = fixture(&format!("{listing}.hodl"));
    let tokens = hodl_core::tokenize(&src).unwrap();
    let program = hodl_core::parse(&tokens).unwrap();
    (hodl_core::dump_tokens(&tokens), hodl_core::dump_ast(&program))
}
