use std::fmt::Write;

use super::gate::{invert, CregId, GateInstr, Opcode, Qubit, RegId};
use super::IrError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegKind {
    User,
    Ancilla,
    Cmp,
}

impl RegKind {
    fn pool_prefix(self) -> Option<&'static str> {
        match self {
            RegKind::User => None,
            RegKind::Ancilla => Some("ancilla"),
            RegKind::Cmp => Some("cmp"),
        }
    }
}

/// Handle to an allocated register. `width` is what the holder asked for; a
/// reused pool register may be physically wider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QReg {
    pub id: RegId,
    pub name: String,
    pub width: usize,
    pub kind: RegKind,
}

impl QReg {
    pub fn qubit(&self, index: usize) -> Qubit {
        assert!(index < self.width, "qubit {index} outside {}", self.name);
        Qubit::new(self.id, index)
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        (0..self.width).map(|i| Qubit::new(self.id, i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RegEntry {
    pub name: String,
    pub width: usize,
    pub kind: RegKind,
    pub pool_index: Option<usize>,
    pub live: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CReg {
    pub name: String,
    pub width: usize,
}

/// Final placement of a register in the global qubit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegLayout {
    pub id: RegId,
    pub name: String,
    pub width: usize,
    pub kind: RegKind,
    pub base_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScopeMarker(usize);

#[derive(Debug, Clone, Default)]
struct ScopeFrame {
    start: usize,
    compute_end: Option<usize>,
    allocated: Vec<RegId>,
}

/// The instruction tape: registers, gates and uncomputation scopes.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    pub(crate) regs: Vec<RegEntry>,
    pub(crate) cregs: Vec<CReg>,
    pub(crate) instrs: Vec<GateInstr>,
    scopes: Vec<ScopeFrame>,
    work: Option<RegId>,
    sealed: bool,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn from_parts(regs: Vec<RegEntry>, cregs: Vec<CReg>, instrs: Vec<GateInstr>) -> Self {
        Self {
            regs,
            cregs,
            instrs,
            scopes: Vec::new(),
            work: None,
            sealed: true,
        }
    }

    pub fn instrs(&self) -> &[GateInstr] {
        &self.instrs
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn cregs(&self) -> &[CReg] {
        &self.cregs
    }

    /// Work register reserved at sealing for multi-controlled gate expansion.
    pub fn work_register(&self) -> Option<QReg> {
        self.work.map(|id| self.handle(id))
    }

    pub fn handle(&self, id: RegId) -> QReg {
        let e = &self.regs[id.0];
        QReg {
            id,
            name: e.name.clone(),
            width: e.width,
            kind: e.kind,
        }
    }

    pub fn register_by_name(&self, name: &str) -> Option<QReg> {
        self.regs
            .iter()
            .position(|e| e.name == name)
            .map(|i| self.handle(RegId(i)))
    }

    pub fn is_live(&self, id: RegId) -> bool {
        self.regs.get(id.0).is_some_and(|e| e.live)
    }

    fn check_open(&self) -> Result<(), IrError> {
        if self.sealed {
            Err(IrError::Sealed)
        } else {
            Ok(())
        }
    }

    pub fn alloc_user(&mut self, name: &str, width: usize) -> Result<QReg, IrError> {
        self.check_open()?;
        assert!(width >= 1, "registers hold at least one qubit");
        if self.regs.iter().any(|e| e.name == name) {
            return Err(IrError::DuplicateRegister(name.to_string()));
        }
        self.regs.push(RegEntry {
            name: name.to_string(),
            width,
            kind: RegKind::User,
            pool_index: None,
            live: true,
        });
        Ok(self.handle(RegId(self.regs.len() - 1)))
    }

    /// Takes a pool register. The lowest free index of `kind` is reused (and
    /// widened if needed); otherwise a new `ancillaX`/`cmpX` is created with
    /// X equal to the number already in use.
    pub fn alloc(&mut self, width: usize, kind: RegKind) -> Result<QReg, IrError> {
        self.check_open()?;
        assert!(width >= 1, "registers hold at least one qubit");
        let prefix = kind
            .pool_prefix()
            .expect("user registers are allocated by name");
        let free = self
            .regs
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == kind && !e.live)
            .min_by_key(|(_, e)| e.pool_index)
            .map(|(i, _)| i);
        let id = match free {
            Some(i) => {
                let e = &mut self.regs[i];
                e.live = true;
                e.width = e.width.max(width);
                RegId(i)
            }
            None => {
                let index = self.regs.iter().filter(|e| e.kind == kind).count();
                self.regs.push(RegEntry {
                    name: format!("{prefix}{index}"),
                    width,
                    kind,
                    pool_index: Some(index),
                    live: true,
                });
                RegId(self.regs.len() - 1)
            }
        };
        if let Some(frame) = self.scopes.last_mut() {
            frame.allocated.push(id);
        }
        Ok(QReg {
            width,
            ..self.handle(id)
        })
    }

    /// Returns a register to its pool (or, for user registers, marks it
    /// dormant until `revive`). The caller guarantees it is back in |0…0⟩.
    pub fn release(&mut self, id: RegId) {
        if let Some(e) = self.regs.get_mut(id.0) {
            e.live = false;
        }
    }

    pub fn revive(&mut self, id: RegId) {
        self.regs[id.0].live = true;
    }

    pub fn declare_creg(&mut self, name: &str, width: usize) -> Result<CregId, IrError> {
        self.check_open()?;
        if let Some(i) = self.cregs.iter().position(|c| c.name == name) {
            if self.cregs[i].width != width {
                return Err(IrError::DuplicateRegister(name.to_string()));
            }
            return Ok(CregId(i));
        }
        self.cregs.push(CReg {
            name: name.to_string(),
            width,
        });
        Ok(CregId(self.cregs.len() - 1))
    }

    fn check_operands(&self, instr: &GateInstr) -> Result<(), IrError> {
        instr.validate()?;
        for q in instr.qubits() {
            let entry = self
                .regs
                .get(q.reg.0)
                .ok_or(IrError::UnknownRegister(q.reg.0))?;
            if !entry.live {
                return Err(IrError::EscapeViolation {
                    register: entry.name.clone(),
                });
            }
            if q.index >= entry.width {
                return Err(IrError::QubitOutOfRange {
                    register: entry.name.clone(),
                    index: q.index,
                });
            }
        }
        if let Some(c) = instr.creg {
            let creg = self.cregs.get(c.0).ok_or(IrError::UnknownClassicalRegister(c.0))?;
            if creg.width != instr.targets.len() {
                return Err(IrError::MalformedGate("measure width mismatch".into()));
            }
        }
        Ok(())
    }

    pub fn append(&mut self, instr: GateInstr) -> Result<(), IrError> {
        self.check_open()?;
        self.check_operands(&instr)?;
        self.instrs.push(instr);
        Ok(())
    }

    pub fn begin_scope(&mut self) -> ScopeMarker {
        self.scopes.push(ScopeFrame {
            start: self.instrs.len(),
            ..Default::default()
        });
        ScopeMarker(self.scopes.len() - 1)
    }

    /// Ends the part of the scope that will be inverted; gates appended after
    /// this point (the "action") stay in place.
    pub fn end_compute(&mut self, marker: ScopeMarker) -> Result<(), IrError> {
        let len = self.instrs.len();
        let frame = self
            .scopes
            .get_mut(marker.0)
            .ok_or(IrError::ScopeNesting)?;
        frame.compute_end.get_or_insert(len);
        Ok(())
    }

    /// Appends the inverse of the scope's compute segment and returns the
    /// scope's pool registers, except `keep`, which move to the parent scope.
    pub fn uncompute_scope(&mut self, marker: ScopeMarker, keep: &[RegId]) -> Result<(), IrError> {
        self.check_open()?;
        if marker.0 + 1 != self.scopes.len() {
            return Err(IrError::ScopeNesting);
        }
        let frame = self.scopes.pop().expect("checked above");
        let end = frame.compute_end.unwrap_or(self.instrs.len());
        let inverse = invert(&self.instrs[frame.start..end])?;
        self.instrs.extend(inverse);
        for id in frame.allocated {
            if keep.contains(&id) {
                if let Some(parent) = self.scopes.last_mut() {
                    parent.allocated.push(id);
                }
            } else {
                self.release(id);
            }
        }
        Ok(())
    }

    /// Appends `inverse(instrs[range])` without liveness checks; used to
    /// replay the uncomputation of a recorded segment.
    pub fn append_inverse_of(&mut self, range: std::ops::Range<usize>) -> Result<(), IrError> {
        self.check_open()?;
        let inverse = invert(&self.instrs[range])?;
        self.instrs.extend(inverse);
        Ok(())
    }

    /// Closes the tape. Reserves one work register wide enough for the
    /// decomposition of every multi-controlled gate with three or more
    /// controls.
    pub fn seal(&mut self) -> Result<(), IrError> {
        self.check_open()?;
        if !self.scopes.is_empty() {
            return Err(IrError::ScopeNesting);
        }
        let work = required_work_qubits(&self.instrs);
        if work > 0 {
            let index = self
                .regs
                .iter()
                .filter(|e| e.kind == RegKind::Ancilla)
                .count();
            self.regs.push(RegEntry {
                name: format!("ancilla{index}"),
                width: work,
                kind: RegKind::Ancilla,
                pool_index: Some(index),
                live: true,
            });
            self.work = Some(RegId(self.regs.len() - 1));
        }
        self.sealed = true;
        Ok(())
    }

    /// Registers in output order: user registers by creation, then ancilla
    /// registers by index, then comparison registers by index.
    pub fn layout(&self) -> Vec<RegLayout> {
        let mut order: Vec<usize> = (0..self.regs.len()).collect();
        order.sort_by_key(|&i| {
            let e = &self.regs[i];
            let rank = match e.kind {
                RegKind::User => 0,
                RegKind::Ancilla => 1,
                RegKind::Cmp => 2,
            };
            (rank, e.pool_index.unwrap_or(i))
        });
        let mut base = 0;
        order
            .into_iter()
            .map(|i| {
                let e = &self.regs[i];
                let l = RegLayout {
                    id: RegId(i),
                    name: e.name.clone(),
                    width: e.width,
                    kind: e.kind,
                    base_index: base,
                };
                base += e.width;
                l
            })
            .collect()
    }

    /// Total qubits across every register ever allocated.
    pub fn total_qubits(&self) -> usize {
        self.regs.iter().map(|e| e.width).sum()
    }

    pub fn qubit_name(&self, q: Qubit) -> String {
        format!("{}[{}]", self.regs[q.reg.0].name, q.index)
    }

    /// Text form: register lines, then one instruction per line as
    /// `OPCODE target[,target] [ctrl: c...] [angle: n/d pi]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for l in self.layout() {
            let kind = match l.kind {
                RegKind::User => "user",
                RegKind::Ancilla => "ancilla",
                RegKind::Cmp => "cmp",
            };
            let _ = writeln!(out, "qreg {}[{}] {kind}", l.name, l.width);
        }
        for c in &self.cregs {
            let _ = writeln!(out, "creg {}[{}]", c.name, c.width);
        }
        for g in &self.instrs {
            let targets: Vec<String> = g.targets.iter().map(|&q| self.qubit_name(q)).collect();
            let _ = write!(out, "{} {}", g.opcode.name(), targets.join(","));
            if !g.controls.is_empty() {
                let ctrls: Vec<String> = g.controls.iter().map(|&q| self.qubit_name(q)).collect();
                let _ = write!(out, " ctrl: {}", ctrls.join(" "));
            }
            if let Some(a) = g.angle {
                let _ = write!(out, " angle: {a}");
            }
            if let Some(c) = g.creg {
                let _ = write!(out, " -> {}", self.cregs[c.0].name);
            }
            out.push('\n');
        }
        out
    }
}

/// Work qubits needed to expand the widest multi-controlled gate.
pub fn required_work_qubits(instrs: &[GateInstr]) -> usize {
    instrs
        .iter()
        .filter(|g| matches!(g.opcode, Opcode::MCX | Opcode::MCP))
        .map(|g| g.controls.len().saturating_sub(2))
        .max()
        .unwrap_or(0)
}
