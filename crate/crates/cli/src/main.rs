use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hodl_core::simulator::{measure_all, run};
use hodl_core::{compile, dump_ast, dump_tokens, parse, tokenize, Circuit, CompileOptions, Diagnostic, Error, SynthOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Tokens,
    Ast,
    Ir,
    Qasm,
}

impl Stage {
    fn extension(self) -> &'static str {
        match self {
            Stage::Tokens => "tokens",
            Stage::Ast => "ast",
            Stage::Ir => "ir",
            Stage::Qasm => "qasm",
        }
    }
}

/// Compile a HODL program to OpenQASM 2.0.
#[derive(Debug, Parser)]
#[command(name = "hodlc", version)]
struct Args {
    /// Source file.
    input: PathBuf,
    /// Output file; defaults to the input path with the stage's extension.
    #[arg(short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,
    /// Stage to write.
    #[arg(long, value_enum, default_value_t = Stage::Qasm)]
    emit: Stage,
    /// Run the emitted circuit on the statevector simulator and print the
    /// measurement distribution.
    #[arg(long)]
    simulate: bool,
    /// Samples drawn when simulating.
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    /// Sampling seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Assumed number of Grover solutions.
    #[arg(long = "grover-m", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    grover_m: u64,
    /// Fixed number of Grover iterations.
    #[arg(long = "grover-k")]
    grover_k: Option<u64>,
}

fn report(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn fail(e: Error) -> ExitCode {
    report(&[e.to_diagnostic()]);
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.simulate && args.emit != Stage::Qasm {
        eprintln!("error: --simulate requires --emit qasm");
        return ExitCode::from(2);
    }
    let source = match fs::read_to_string(&args.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.input.display());
            return ExitCode::from(2);
        }
    };
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension(args.emit.extension()));

    let text = match args.emit {
        Stage::Tokens => match tokenize(&source) {
            Ok(tokens) => dump_tokens(&tokens),
            Err(e) => return fail(e.into()),
        },
        Stage::Ast => match tokenize(&source).map_err(Error::from).and_then(|t| Ok(parse(&t)?)) {
            Ok(program) => dump_ast(&program),
            Err(e) => return fail(e),
        },
        Stage::Ir | Stage::Qasm => {
            let options = CompileOptions {
                synth: SynthOptions {
                    grover_solutions: args.grover_m,
                    grover_iterations: args.grover_k,
                },
            };
            let c = match compile(&source, &options) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            report(&c.warnings);
            if args.simulate {
                let circuit = match Circuit::load(&c.qasm) {
                    Ok(circuit) => circuit,
                    Err(e) => {
                        eprintln!("error[{}]: {e}", e.code());
                        return ExitCode::from(1);
                    }
                };
                let state = run(&circuit, None);
                print!("{}", measure_all(&circuit, &state, args.shots, args.seed).report());
            }
            if args.emit == Stage::Ir {
                c.tape.dump()
            } else {
                c.qasm
            }
        }
    };
    if let Err(e) = fs::write(&output, text) {
        eprintln!("error: cannot write {}: {e}", output.display());
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
