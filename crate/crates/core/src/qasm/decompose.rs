use crate::circuit_ir::{GateInstr, IrError, Opcode, PhaseAngle, Qubit, Tape};

/// Expands multi-controlled gates into the emitted gate set. Gates with
/// three or more controls use the tape's work register as a v-chain of
/// AND qubits, which it leaves in |0…0⟩.
pub fn decompose(tape: &Tape) -> Result<Vec<GateInstr>, IrError> {
    let work: Vec<Qubit> = tape
        .work_register()
        .map(|w| w.qubits().collect())
        .unwrap_or_default();
    let mut out = Vec::with_capacity(tape.len());
    for g in tape.instrs() {
        match g.opcode {
            Opcode::MCX => mcx(&g.controls, g.targets[0], &work, &mut out)?,
            Opcode::MCP => {
                let angle = g.angle.expect("MCP carries an angle");
                mcp(angle, &g.controls, g.targets[0], &work, &mut out)?
            }
            _ => out.push(g.clone()),
        }
    }
    Ok(out)
}

/// Toffoli in six CNOTs.
pub fn toffoli(a: Qubit, b: Qubit, t: Qubit, out: &mut Vec<GateInstr>) {
    let tdg = |q| GateInstr::p(-PhaseAngle::pi_over_pow2(2), q);
    out.extend([
        GateInstr::h(t),
        GateInstr::cx(b, t),
        tdg(t),
        GateInstr::cx(a, t),
        GateInstr::t(t),
        GateInstr::cx(b, t),
        tdg(t),
        GateInstr::cx(a, t),
        GateInstr::t(b),
        GateInstr::t(t),
        GateInstr::h(t),
        GateInstr::cx(a, b),
        GateInstr::t(a),
        tdg(b),
        GateInstr::cx(a, b),
    ]);
}

/// Doubly controlled phase from three controlled phases and two CNOTs.
pub fn ccp(angle: PhaseAngle, a: Qubit, b: Qubit, t: Qubit, out: &mut Vec<GateInstr>) {
    let half = angle.half();
    out.extend([
        GateInstr::cp(half, b, t),
        GateInstr::cx(a, b),
        GateInstr::cp(-half, b, t),
        GateInstr::cx(a, b),
        GateInstr::cp(half, a, t),
    ]);
}

fn need_work(controls: usize, work: &[Qubit]) -> Result<(), IrError> {
    if work.len() + 2 < controls {
        return Err(IrError::MalformedGate(format!(
            "{controls}-control gate needs {} work qubits, {} reserved",
            controls - 2,
            work.len()
        )));
    }
    Ok(())
}

/// Toffolis accumulating the AND of `cs` along `work`.
fn and_chain(cs: &[Qubit], work: &[Qubit]) -> Vec<(Qubit, Qubit, Qubit)> {
    let mut chain = vec![(cs[0], cs[1], work[0])];
    for i in 2..cs.len() {
        chain.push((cs[i], work[i - 2], work[i - 1]));
    }
    chain
}

fn apply_chain<'a>(chain: impl Iterator<Item = &'a (Qubit, Qubit, Qubit)>, out: &mut Vec<GateInstr>) {
    for &(a, b, t) in chain {
        toffoli(a, b, t, out);
    }
}

fn mcx(cs: &[Qubit], t: Qubit, work: &[Qubit], out: &mut Vec<GateInstr>) -> Result<(), IrError> {
    match cs.len() {
        0 => out.push(GateInstr::x(t)),
        1 => out.push(GateInstr::cx(cs[0], t)),
        2 => toffoli(cs[0], cs[1], t, out),
        k => {
            need_work(k, work)?;
            let chain = and_chain(&cs[..k - 1], work);
            apply_chain(chain.iter(), out);
            toffoli(cs[k - 1], work[k - 3], t, out);
            apply_chain(chain.iter().rev(), out);
        }
    }
    Ok(())
}

fn mcp(angle: PhaseAngle, cs: &[Qubit], t: Qubit, work: &[Qubit], out: &mut Vec<GateInstr>) -> Result<(), IrError> {
    match cs.len() {
        0 => out.push(GateInstr::p(angle, t)),
        1 => out.push(GateInstr::cp(angle, cs[0], t)),
        2 => ccp(angle, cs[0], cs[1], t, out),
        k => {
            need_work(k, work)?;
            let chain = and_chain(&cs[..k - 1], work);
            apply_chain(chain.iter(), out);
            ccp(angle, cs[k - 1], work[k - 3], t, out);
            apply_chain(chain.iter().rev(), out);
        }
    }
    Ok(())
}
