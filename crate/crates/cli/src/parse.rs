//! Circuit file grammar.
//!
//! ```text
//! # comment
//! qudits 2 dim 5
//! F 0
//! C 0 1      # control, target
//! Z 1 3      # target, power
//! T 1
//! ```

use std::fmt;

use qws_core::{Dim, GateKind, GateSpec};

use crate::CliError;

/// A parsed circuit: dimension header plus gates in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitFile {
    pub dim: Dim,
    pub gates: Vec<GateSpec>,
    /// 1-based source line of each gate.
    pub lines: Vec<usize>,
}

impl fmt::Display for CircuitFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qudits {} dim {}", self.dim.n(), self.dim.d())?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &content[s..i], column: content[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, column, message: message.into() }
}

fn number<T: std::str::FromStr>(tok: &Token<'_>, line: usize, what: &str) -> Result<T, CliError> {
    tok.text.parse().map_err(|_| parse_error(line, tok.column, format!("expected {what}, found `{}`", tok.text)))
}

fn expect_arity(tokens: &[Token<'_>], arity: usize, line: usize, usage: &str) -> Result<(), CliError> {
    if tokens.len() - 1 < arity {
        let col = tokens.last().map_or(1, |t| t.column + t.text.len());
        return Err(parse_error(line, col, format!("missing operand, expected `{usage}`")));
    }
    if tokens.len() - 1 > arity {
        return Err(parse_error(line, tokens[arity + 1].column, format!("unexpected operand, expected `{usage}`")));
    }
    Ok(())
}

fn parse_header(tokens: &[Token<'_>], line: usize) -> Result<Dim, CliError> {
    let keyword = |i: usize, word: &str| -> Result<(), CliError> {
        match tokens.get(i) {
            Some(t) if t.text == word => Ok(()),
            Some(t) => Err(parse_error(line, t.column, format!("expected `{word}`, found `{}`", t.text))),
            None => Err(parse_error(line, 1, "expected header `qudits <n> dim <d>`")),
        }
    };
    keyword(0, "qudits")?;
    let n_tok = tokens.get(1).ok_or_else(|| parse_error(line, 1, "expected header `qudits <n> dim <d>`"))?;
    keyword(2, "dim")?;
    let d_tok = tokens.get(3).ok_or_else(|| parse_error(line, 1, "expected header `qudits <n> dim <d>`"))?;
    if let Some(extra) = tokens.get(4) {
        return Err(parse_error(line, extra.column, "unexpected text after header"));
    }
    let n: usize = number(n_tok, line, "a qudit count")?;
    let d: u64 = number(d_tok, line, "a dimension")?;
    if n == 0 {
        return Err(parse_error(line, n_tok.column, "a circuit needs at least one qudit"));
    }
    Dim::new(d, n).map_err(|_| CliError::BadDimension(d))
}

fn parse_gate(tokens: &[Token<'_>], line: usize, dim: Dim) -> Result<GateSpec, CliError> {
    let head = &tokens[0];
    let target = |tok: &Token<'_>| -> Result<usize, CliError> {
        let t: usize = number(tok, line, "a qudit index")?;
        if t >= dim.n() {
            return Err(CliError::BadTarget { line, column: tok.column, message: format!("qudit {t} out of range for {} qudit(s)", dim.n()) });
        }
        Ok(t)
    };
    let gate = match head.text {
        "F" | "P" | "T" => {
            expect_arity(tokens, 1, line, &format!("{} <target>", head.text))?;
            let t = target(&tokens[1])?;
            match head.text {
                "F" => GateSpec::f(t),
                "P" => GateSpec::p(t),
                _ => GateSpec::t(t),
            }
        }
        "C" => {
            expect_arity(tokens, 2, line, "C <control> <target>")?;
            let (c, t) = (target(&tokens[1])?, target(&tokens[2])?);
            if c == t {
                return Err(CliError::BadTarget { line, column: tokens[2].column, message: "control and target coincide".into() });
            }
            GateSpec::c(c, t)
        }
        "Z" | "X" => {
            expect_arity(tokens, 2, line, &format!("{} <target> <power>", head.text))?;
            let t = target(&tokens[1])?;
            let power: u64 = number(&tokens[2], line, "a power")?;
            if head.text == "Z" {
                GateSpec::zpow(t, power)
            } else {
                GateSpec::xpow(t, power)
            }
        }
        other => return Err(parse_error(line, head.column, format!("unknown gate `{other}`"))),
    };
    debug_assert!(gate.kind != GateKind::C || gate.targets.len() == 2);
    Ok(gate)
}

pub fn parse_circuit(text: &str) -> Result<CircuitFile, CliError> {
    let mut dim = None;
    let mut gates = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        match dim {
            None => dim = Some(parse_header(&tokens, line)?),
            Some(dm) => {
                gates.push(parse_gate(&tokens, line, dm)?);
                lines.push(line);
            }
        }
    }
    let dim = dim.ok_or_else(|| parse_error(text.lines().count().max(1), 1, "missing header `qudits <n> dim <d>`"))?;
    Ok(CircuitFile { dim, gates, lines })
}
