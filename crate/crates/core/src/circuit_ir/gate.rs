use std::fmt;

use super::angle::PhaseAngle;
use super::IrError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CregId(pub usize);

/// One qubit of a register; index 0 is the least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qubit {
    pub reg: RegId,
    pub index: usize,
}

impl Qubit {
    pub fn new(reg: RegId, index: usize) -> Self {
        Self { reg, index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    H,
    X,
    Y,
    Z,
    RX,
    RY,
    RZ,
    P,
    S,
    T,
    CX,
    CZ,
    CP,
    MCP,
    MCX,
    Measure,
    Barrier,
}

impl Opcode {
    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            Opcode::RX | Opcode::RY | Opcode::RZ | Opcode::P | Opcode::CP | Opcode::MCP
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Opcode::H => "H",
            Opcode::X => "X",
            Opcode::Y => "Y",
            Opcode::Z => "Z",
            Opcode::RX => "RX",
            Opcode::RY => "RY",
            Opcode::RZ => "RZ",
            Opcode::P => "P",
            Opcode::S => "S",
            Opcode::T => "T",
            Opcode::CX => "CX",
            Opcode::CZ => "CZ",
            Opcode::CP => "CP",
            Opcode::MCP => "MCP",
            Opcode::MCX => "MCX",
            Opcode::Measure => "MEASURE",
            Opcode::Barrier => "BARRIER",
        }
    }

    /// Required number of controls, or `None` for "two or more".
    fn control_count(self) -> Option<usize> {
        match self {
            Opcode::CX | Opcode::CZ | Opcode::CP => Some(1),
            Opcode::MCX | Opcode::MCP => None,
            _ => Some(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GateInstr {
    pub opcode: Opcode,
    pub targets: Vec<Qubit>,
    pub controls: Vec<Qubit>,
    pub angle: Option<PhaseAngle>,
    /// Destination of a `Measure`; bit `i` receives `targets[i]`.
    pub creg: Option<CregId>,
}

impl GateInstr {
    fn plain(opcode: Opcode, target: Qubit) -> Self {
        Self {
            opcode,
            targets: vec![target],
            controls: Vec::new(),
            angle: None,
            creg: None,
        }
    }

    pub fn h(t: Qubit) -> Self {
        Self::plain(Opcode::H, t)
    }

    pub fn x(t: Qubit) -> Self {
        Self::plain(Opcode::X, t)
    }

    pub fn y(t: Qubit) -> Self {
        Self::plain(Opcode::Y, t)
    }

    pub fn z(t: Qubit) -> Self {
        Self::plain(Opcode::Z, t)
    }

    pub fn s(t: Qubit) -> Self {
        Self::plain(Opcode::S, t)
    }

    pub fn t(t: Qubit) -> Self {
        Self::plain(Opcode::T, t)
    }

    pub fn rotation(opcode: Opcode, angle: PhaseAngle, t: Qubit) -> Self {
        debug_assert!(matches!(opcode, Opcode::RX | Opcode::RY | Opcode::RZ));
        Self {
            angle: Some(angle),
            ..Self::plain(opcode, t)
        }
    }

    pub fn p(angle: PhaseAngle, t: Qubit) -> Self {
        Self {
            angle: Some(angle),
            ..Self::plain(Opcode::P, t)
        }
    }

    pub fn cx(c: Qubit, t: Qubit) -> Self {
        Self {
            controls: vec![c],
            ..Self::plain(Opcode::CX, t)
        }
    }

    pub fn cz(c: Qubit, t: Qubit) -> Self {
        Self {
            controls: vec![c],
            ..Self::plain(Opcode::CZ, t)
        }
    }

    pub fn cp(angle: PhaseAngle, c: Qubit, t: Qubit) -> Self {
        Self {
            controls: vec![c],
            angle: Some(angle),
            ..Self::plain(Opcode::CP, t)
        }
    }

    /// X on `t` controlled on every qubit of `controls`; picks X, CX or MCX.
    pub fn controlled_x(controls: Vec<Qubit>, t: Qubit) -> Self {
        let opcode = match controls.len() {
            0 => Opcode::X,
            1 => Opcode::CX,
            _ => Opcode::MCX,
        };
        Self {
            controls,
            ..Self::plain(opcode, t)
        }
    }

    /// Phase `angle` on `t` controlled on `controls`; picks P, CP or MCP.
    pub fn controlled_phase(angle: PhaseAngle, controls: Vec<Qubit>, t: Qubit) -> Self {
        let opcode = match controls.len() {
            0 => Opcode::P,
            1 => Opcode::CP,
            _ => Opcode::MCP,
        };
        Self {
            controls,
            angle: Some(angle),
            ..Self::plain(opcode, t)
        }
    }

    pub fn measure(qubits: Vec<Qubit>, creg: CregId) -> Self {
        Self {
            opcode: Opcode::Measure,
            targets: qubits,
            controls: Vec::new(),
            angle: None,
            creg: Some(creg),
        }
    }

    pub fn barrier(qubits: Vec<Qubit>) -> Self {
        Self {
            opcode: Opcode::Barrier,
            targets: qubits,
            controls: Vec::new(),
            angle: None,
            creg: None,
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        self.controls.iter().chain(&self.targets).copied()
    }

    /// Checks operand arity, angle presence and operand disjointness.
    pub fn validate(&self) -> Result<(), IrError> {
        let malformed = |why: &str| Err(IrError::MalformedGate(format!("{}: {why}", self.opcode.name())));
        if self.opcode.takes_angle() != self.angle.is_some() {
            return malformed("angle presence does not match opcode");
        }
        match self.opcode.control_count() {
            Some(n) if self.controls.len() != n => return malformed("wrong control count"),
            None if self.controls.len() < 2 => return malformed("needs at least two controls"),
            _ => {}
        }
        let multi_target = matches!(self.opcode, Opcode::Measure | Opcode::Barrier);
        if multi_target {
            if self.targets.is_empty() {
                return malformed("no operands");
            }
        } else if self.targets.len() != 1 {
            return malformed("expects exactly one target");
        }
        if (self.opcode == Opcode::Measure) != self.creg.is_some() {
            return malformed("classical register only valid on MEASURE");
        }
        let mut seen: Vec<Qubit> = self.qubits().collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(IrError::OverlappingOperands);
        }
        Ok(())
    }

    /// The inverse gate, or `None` for measurement.
    pub fn inverse(&self) -> Option<GateInstr> {
        let mut g = self.clone();
        match self.opcode {
            Opcode::Measure => return None,
            Opcode::S => {
                g.opcode = Opcode::P;
                g.angle = Some(-PhaseAngle::pi_over_pow2(1));
            }
            Opcode::T => {
                g.opcode = Opcode::P;
                g.angle = Some(-PhaseAngle::pi_over_pow2(2));
            }
            op if op.takes_angle() => g.angle = self.angle.map(|a| -a),
            _ => {}
        }
        Some(g)
    }

    /// Same gate with `S` and `T` spelled as phase gates, the form
    /// inversion produces.
    pub fn canonical(&self) -> GateInstr {
        let mut g = self.clone();
        let angle = match self.opcode {
            Opcode::S => PhaseAngle::pi_over_pow2(1),
            Opcode::T => PhaseAngle::pi_over_pow2(2),
            _ => return g,
        };
        g.opcode = Opcode::P;
        g.angle = Some(angle);
        g
    }
}

/// Reverses a segment and inverts each gate.
pub fn invert(segment: &[GateInstr]) -> Result<Vec<GateInstr>, IrError> {
    segment
        .iter()
        .rev()
        .map(|g| g.inverse().ok_or(IrError::NonInvertible))
        .collect()
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}[{}]", self.reg.0, self.index)
    }
}
