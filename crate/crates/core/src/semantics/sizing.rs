//! Register width rules shared by the estimator and the synthesizer.

use super::{ArithOp, QExpr, SymbolTable};

/// `floor(log2(v)) + 1`, with `bits(0) = 1`.
pub fn bits(v: u64) -> usize {
    if v <= 1 {
        1
    } else {
        (u64::BITS - v.leading_zeros()) as usize
    }
}

/// Width of a `super v = x` register: it holds `0..x`.
pub fn superposition_width(x: u64) -> usize {
    bits(x.saturating_sub(1).max(1))
}

/// Value range of an expression: the largest basis value it can take and the
/// width of the register that holds it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub max_value: u64,
    pub width: usize,
}

fn saturating_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Size of a multiplication operand. A constant `c` counts as a register of
/// `c` states, so 4 takes two qubits and 1 takes one.
pub fn factor_size(e: &QExpr, syms: &SymbolTable) -> usize {
    match e {
        QExpr::Const(c) => superposition_width(*c),
        _ => range(e, syms).width,
    }
}

pub fn range(e: &QExpr, syms: &SymbolTable) -> Range {
    match e {
        QExpr::Sym(s) => {
            let (max_value, width) = syms.quantum(*s);
            Range { max_value, width }
        }
        QExpr::Const(c) => Range {
            max_value: *c,
            width: bits(*c),
        },
        QExpr::Bin(op, a, b) => {
            let ra = range(a, syms);
            let rb = range(b, syms);
            match op {
                ArithOp::Add => {
                    let max_value = ra.max_value.saturating_add(rb.max_value);
                    Range {
                        max_value,
                        width: bits(max_value),
                    }
                }
                ArithOp::Sub => {
                    let width = ra.width.max(rb.width);
                    Range {
                        max_value: saturating_mask(width),
                        width,
                    }
                }
                ArithOp::Mul => Range {
                    max_value: ra.max_value.saturating_mul(rb.max_value),
                    width: factor_size(a, syms) + factor_size(b, syms),
                },
            }
        }
    }
}

/// Operand width inside a comparator: registers use their width, constants
/// their binary length.
pub fn operand_width(e: &QExpr, syms: &SymbolTable) -> usize {
    range(e, syms).width
}

/// Width of the difference register a comparator subtracts into: one sign
/// bit above the wider operand.
pub fn compare_width(a: &QExpr, b: &QExpr, syms: &SymbolTable) -> usize {
    operand_width(a, syms).max(operand_width(b, syms)) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_lengths() {
        assert_eq!(bits(0), 1);
        assert_eq!(bits(1), 1);
        assert_eq!(bits(2), 2);
        assert_eq!(bits(22), 5);
        assert_eq!(bits(28), 5);
        assert_eq!(bits(u64::MAX), 64);
    }

    #[test]
    fn superposition_widths() {
        assert_eq!(superposition_width(1), 1);
        assert_eq!(superposition_width(2), 1);
        assert_eq!(superposition_width(4), 2);
        assert_eq!(superposition_width(8), 3);
        assert_eq!(superposition_width(16), 4);
    }
}
