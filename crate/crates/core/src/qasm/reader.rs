//! Statement-level reader for the OpenQASM 2.0 subset this crate emits.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReadError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl ReadError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ReadError::Syntax {
            line,
            message: message.into(),
        }
    }
}

/// `reg[index]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitRef {
    pub reg: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Header,
    Include(String),
    Qreg { name: String, size: usize },
    Creg { name: String, size: usize },
    Gate {
        name: String,
        params: Vec<f64>,
        args: Vec<QubitRef>,
    },
    Measure { qubit: QubitRef, bit: QubitRef },
    Barrier(Vec<QubitRef>),
}

/// Splits `text` into statements, each tagged with its 1-based line.
pub fn read(text: &str) -> Result<Vec<(usize, Statement)>, ReadError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let code = raw.split("//").next().unwrap_or("").trim();
        if code.is_empty() {
            continue;
        }
        let Some(body) = code.strip_suffix(';') else {
            return Err(ReadError::at(line, "missing `;`"));
        };
        for stmt in body.split(';') {
            let stmt = stmt.trim();
            if !stmt.is_empty() {
                out.push((line, statement(stmt, line)?));
            }
        }
    }
    Ok(out)
}

fn statement(s: &str, line: usize) -> Result<Statement, ReadError> {
    if let Some(rest) = s.strip_prefix("OPENQASM") {
        return if rest.trim() == "2.0" {
            Ok(Statement::Header)
        } else {
            Err(ReadError::at(line, format!("unsupported version `{}`", rest.trim())))
        };
    }
    if let Some(rest) = s.strip_prefix("include") {
        let name = rest.trim().trim_matches('"');
        return Ok(Statement::Include(name.to_string()));
    }
    if let Some(rest) = s.strip_prefix("qreg ") {
        let q = qubit_ref(rest, line)?;
        return Ok(Statement::Qreg {
            name: q.reg,
            size: q.index,
        });
    }
    if let Some(rest) = s.strip_prefix("creg ") {
        let q = qubit_ref(rest, line)?;
        return Ok(Statement::Creg {
            name: q.reg,
            size: q.index,
        });
    }
    if let Some(rest) = s.strip_prefix("measure ") {
        let (q, c) = rest
            .split_once("->")
            .ok_or_else(|| ReadError::at(line, "expected `->` in measure"))?;
        return Ok(Statement::Measure {
            qubit: qubit_ref(q, line)?,
            bit: qubit_ref(c, line)?,
        });
    }
    if let Some(rest) = s.strip_prefix("barrier ") {
        return Ok(Statement::Barrier(args(rest, line)?));
    }

    let (head, rest) = match s.find('(') {
        Some(open) => {
            let close = s[open..]
                .find(')')
                .map(|c| open + c)
                .ok_or_else(|| ReadError::at(line, "unclosed `(`"))?;
            (&s[..close + 1], &s[close + 1..])
        }
        None => s
            .split_once(char::is_whitespace)
            .ok_or_else(|| ReadError::at(line, format!("malformed statement `{s}`")))?,
    };
    let (name, params) = match head.split_once('(') {
        Some((name, p)) => {
            let p = p.trim_end_matches(')');
            let params = p
                .split(',')
                .map(|x| eval_param(x.trim()).ok_or_else(|| ReadError::at(line, format!("bad parameter `{x}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            (name.trim(), params)
        }
        None => (head.trim(), Vec::new()),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(ReadError::at(line, format!("malformed gate name `{name}`")));
    }
    Ok(Statement::Gate {
        name: name.to_string(),
        params,
        args: args(rest, line)?,
    })
}

fn args(s: &str, line: usize) -> Result<Vec<QubitRef>, ReadError> {
    s.split(',').map(|a| qubit_ref(a, line)).collect()
}

fn qubit_ref(s: &str, line: usize) -> Result<QubitRef, ReadError> {
    let s = s.trim();
    let bad = || ReadError::at(line, format!("expected `name[index]`, found `{s}`"));
    let (reg, rest) = s.split_once('[').ok_or_else(bad)?;
    let index = rest.strip_suffix(']').ok_or_else(bad)?;
    let reg = reg.trim();
    if reg.is_empty() || !reg.starts_with(|c: char| c.is_ascii_alphabetic()) {
        return Err(bad());
    }
    Ok(QubitRef {
        reg: reg.to_string(),
        index: index.trim().parse().map_err(|_| bad())?,
    })
}

/// Evaluates a parameter: a decimal literal, or a product/quotient of
/// literals and `pi`, with optional leading minus.
fn eval_param(s: &str) -> Option<f64> {
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    let mut value = 1.0;
    let mut op = '*';
    let mut token = String::new();
    let apply = |tok: &str, op: char, value: &mut f64| -> Option<()> {
        let v = match tok.trim() {
            "pi" => std::f64::consts::PI,
            t => t.parse::<f64>().ok()?,
        };
        match op {
            '*' => *value *= v,
            _ => *value /= v,
        }
        Some(())
    };
    for c in s.chars() {
        if c == '*' || c == '/' {
            apply(&token, op, &mut value)?;
            token.clear();
            op = c;
        } else {
            token.push(c);
        }
    }
    apply(&token, op, &mut value)?;
    Some(if neg { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statements() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg a[2];\ncreg c[2];\ncu1(0.5) a[0],a[1];\nmeasure a[1] -> c[0];\n";
        let s = read(text).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(
            s[4].1,
            Statement::Gate {
                name: "cu1".into(),
                params: vec![0.5],
                args: vec![
                    QubitRef { reg: "a".into(), index: 0 },
                    QubitRef { reg: "a".into(), index: 1 }
                ],
            }
        );
        assert_eq!(s[5].0, 6);
    }

    #[test]
    fn pi_parameters() {
        assert_eq!(eval_param("pi/2"), Some(std::f64::consts::FRAC_PI_2));
        assert_eq!(eval_param("-2*pi"), Some(-2.0 * std::f64::consts::PI));
        assert_eq!(eval_param("0.25"), Some(0.25));
        assert_eq!(eval_param("x"), None);
    }

    #[test]
    fn errors_carry_lines() {
        let e = read("OPENQASM 2.0;\nh a[0]\n").unwrap_err();
        assert_eq!(e, ReadError::Syntax { line: 2, message: "missing `;`".into() });
        assert!(read("h a;").is_err());
    }
}
