//! AIGER ASCII reader and writer.
//!
//! Accepted: `aag` version 1 with a single output (taken as the bad-state
//! signal) and the 1.9 extension with exactly one `b` line. Latch reset
//! values may be 0 or 1; a missing reset means 0.

use std::fmt::Write as _;

use ic4_core::aig::{AigCircuit, AigLit, AndGate, Latch, Symbol, SymbolKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("binary AIGER is not supported; convert with `aigtoaig -a` first")]
    Binary,
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unexpected end of file, expected {0}")]
    Eof(&'static str),
    #[error("expected {expected}, found `{found}`")]
    Syntax { expected: &'static str, found: String },
    #[error("literal {0} exceeds the maximum variable index")]
    OutOfRange(u32),
    #[error("defined literal {0} must be even and non-constant")]
    BadDefinition(u32),
    #[error("variable {0} is defined more than once")]
    Redefined(u32),
    #[error("AND gate {lhs} has operand {rhs} that is not smaller than its output")]
    NotTopological { lhs: u32, rhs: u32 },
    #[error("literal {0} is used but never defined")]
    Undefined(u32),
    #[error("nondeterministic reset of latch {0} is not supported")]
    NondeterministicReset(u32),
    #[error("{0}")]
    Unsupported(String),
    #[error("bad symbol entry `{0}`")]
    Symbol(String),
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &'static str) -> Result<&'a str, ParseError> {
        match self.it.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => {
                self.line += 1;
                Err(self.err(ParseErrorKind::Eof(what)))
            }
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, kind }
    }

    fn numbers(&mut self, what: &'static str, n: usize, optional: usize) -> Result<Vec<u32>, ParseError> {
        let l = self.next(what)?;
        let parts: Vec<&str> = l.split_ascii_whitespace().collect();
        if parts.len() < n || parts.len() > n + optional {
            return Err(self.err(ParseErrorKind::Syntax { expected: what, found: l.to_string() }));
        }
        parts
            .iter()
            .map(|p| p.parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| self.err(ParseErrorKind::Syntax { expected: what, found: l.to_string() }))
    }
}

struct Header {
    max_var: u32,
    inputs: usize,
    latches: usize,
    outputs: usize,
    ands: usize,
    bad: usize,
}

fn header(l: &str) -> Result<Header, ParseErrorKind> {
    let mut parts = l.split_ascii_whitespace();
    match parts.next() {
        Some("aag") => {}
        Some("aig") => return Err(ParseErrorKind::Binary),
        _ => return Err(ParseErrorKind::Header(format!("expected `aag`, found `{l}`"))),
    }
    let nums: Vec<usize> = parts
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| ParseErrorKind::Header(format!("non-numeric field in `{l}`")))?;
    if nums.len() < 5 || nums.len() > 9 {
        return Err(ParseErrorKind::Header(format!("expected 5 to 9 counts, found {}", nums.len())));
    }
    let get = |i: usize| nums.get(i).copied().unwrap_or(0);
    if get(6) + get(7) + get(8) > 0 {
        return Err(ParseErrorKind::Unsupported(
            "invariant constraints, justice and fairness sections are not supported".into(),
        ));
    }
    let max_var = u32::try_from(get(0))
        .ok()
        .filter(|&m| m < u32::MAX / 2)
        .ok_or_else(|| ParseErrorKind::Header("maximum variable index too large".into()))?;
    let h = Header { max_var, inputs: get(1), latches: get(2), outputs: get(3), ands: get(4), bad: get(5) };
    if h.inputs + h.latches + h.ands > max_var as usize {
        return Err(ParseErrorKind::Header(format!(
            "M = {max_var} is smaller than I + L + A = {}",
            h.inputs + h.latches + h.ands
        )));
    }
    match (h.outputs, h.bad) {
        (_, 1) | (1, 0) => Ok(h),
        (_, b) if b > 1 => Err(ParseErrorKind::Unsupported(format!(
            "{b} bad-state properties; split the file into one property per model"
        ))),
        (o, _) => Err(ParseErrorKind::Unsupported(format!(
            "{o} outputs; expected exactly one output or one bad-state property"
        ))),
    }
}

/// Parses an ASCII AIGER model. Every error carries the 1-based line where
/// it was detected.
pub fn parse_aag(text: &str) -> Result<AigCircuit, ParseError> {
    let mut ls = Lines { it: text.lines().enumerate(), line: 0 };
    let h = header(ls.next("header")?).map_err(|k| ls.err(k))?;
    let max_lit = 2 * h.max_var + 1;
    let mut defined = vec![false; h.max_var as usize + 1];
    defined[0] = true;
    let mut uses: Vec<(u32, usize)> = Vec::new();

    let mut define = |ls: &Lines, lit: u32| -> Result<(), ParseError> {
        if lit > max_lit {
            return Err(ls.err(ParseErrorKind::OutOfRange(lit)));
        }
        if lit < 2 || lit & 1 == 1 {
            return Err(ls.err(ParseErrorKind::BadDefinition(lit)));
        }
        let slot = &mut defined[(lit >> 1) as usize];
        if *slot {
            return Err(ls.err(ParseErrorKind::Redefined(lit >> 1)));
        }
        *slot = true;
        Ok(())
    };
    let check_range = |ls: &Lines, lit: u32| {
        if lit > max_lit {
            Err(ls.err(ParseErrorKind::OutOfRange(lit)))
        } else {
            Ok(AigLit(lit))
        }
    };

    let mut inputs = Vec::with_capacity(h.inputs);
    for _ in 0..h.inputs {
        let n = ls.numbers("input literal", 1, 0)?;
        define(&ls, n[0])?;
        inputs.push(AigLit(n[0]));
    }
    let mut latches = Vec::with_capacity(h.latches);
    for _ in 0..h.latches {
        let n = ls.numbers("latch definition", 2, 1)?;
        define(&ls, n[0])?;
        let next = check_range(&ls, n[1])?;
        uses.push((n[1], ls.line));
        let reset = match n.get(2) {
            None | Some(0) => false,
            Some(1) => true,
            Some(&r) if r == n[0] => return Err(ls.err(ParseErrorKind::NondeterministicReset(n[0]))),
            Some(&r) => {
                return Err(ls.err(ParseErrorKind::Syntax { expected: "reset value 0 or 1", found: r.to_string() }))
            }
        };
        latches.push(Latch { lit: AigLit(n[0]), next, reset });
    }
    let mut outputs = Vec::with_capacity(h.outputs);
    for _ in 0..h.outputs {
        let n = ls.numbers("output literal", 1, 0)?;
        outputs.push((check_range(&ls, n[0])?, ls.line));
    }
    let mut bads = Vec::with_capacity(h.bad);
    for _ in 0..h.bad {
        let n = ls.numbers("bad-state literal", 1, 0)?;
        bads.push((check_range(&ls, n[0])?, ls.line));
    }
    let mut ands = Vec::with_capacity(h.ands);
    for _ in 0..h.ands {
        let n = ls.numbers("AND gate", 3, 0)?;
        define(&ls, n[0])?;
        for &r in &n[1..] {
            check_range(&ls, r)?;
            if r >= n[0] {
                return Err(ls.err(ParseErrorKind::NotTopological { lhs: n[0], rhs: r }));
            }
            uses.push((r, ls.line));
        }
        ands.push(AndGate { lhs: AigLit(n[0]), rhs0: AigLit(n[1]), rhs1: AigLit(n[2]) });
    }
    let (bad, bad_line) = if h.bad == 1 { bads[0] } else { outputs[0] };
    uses.push((bad.0, bad_line));
    for (lit, line) in uses {
        if !defined[(lit >> 1) as usize] {
            return Err(ParseError { line, kind: ParseErrorKind::Undefined(lit) });
        }
    }

    let mut symbols = Vec::new();
    let mut comments = Vec::new();
    while let Ok(l) = ls.next("") {
        if l.trim_end() == "c" {
            comments.extend(ls.it.by_ref().map(|(_, c)| c.to_string()));
            break;
        }
        if l.trim().is_empty() {
            continue;
        }
        let (kind, limit) = match l.as_bytes()[0] {
            b'i' => (SymbolKind::Input, h.inputs),
            b'l' => (SymbolKind::Latch, h.latches),
            b'o' => (SymbolKind::Output, h.outputs),
            b'b' => (SymbolKind::Bad, h.bad),
            _ => return Err(ls.err(ParseErrorKind::Symbol(l.to_string()))),
        };
        let (idx, name) = l[1..].split_once(' ').ok_or_else(|| ls.err(ParseErrorKind::Symbol(l.to_string())))?;
        let index: usize = idx.parse().map_err(|_| ls.err(ParseErrorKind::Symbol(l.to_string())))?;
        if index >= limit {
            return Err(ls.err(ParseErrorKind::Symbol(l.to_string())));
        }
        symbols.push(Symbol { kind, index, name: name.to_string() });
    }

    let c = AigCircuit { max_var: h.max_var, inputs, latches, ands, bad, symbols, comments };
    debug_assert_eq!(c.validate(), Ok(()));
    Ok(c)
}

/// Writes `c` as ASCII AIGER with the bad signal as the single output.
/// Reset values of 1 are written in the third latch column.
pub fn write_aag(c: &AigCircuit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "aag {} {} {} 1 {}", c.max_var, c.inputs.len(), c.latches.len(), c.ands.len());
    for i in &c.inputs {
        let _ = writeln!(s, "{}", i.0);
    }
    for l in &c.latches {
        if l.reset {
            let _ = writeln!(s, "{} {} 1", l.lit.0, l.next.0);
        } else {
            let _ = writeln!(s, "{} {}", l.lit.0, l.next.0);
        }
    }
    let _ = writeln!(s, "{}", c.bad.0);
    for g in &c.ands {
        let _ = writeln!(s, "{} {} {}", g.lhs.0, g.rhs0.0, g.rhs1.0);
    }
    for sym in &c.symbols {
        let k = match sym.kind {
            SymbolKind::Input => 'i',
            SymbolKind::Latch => 'l',
            // the bad signal is written as output 0
            SymbolKind::Output | SymbolKind::Bad => 'o',
        };
        if matches!(sym.kind, SymbolKind::Output | SymbolKind::Bad) && sym.index != 0 {
            continue;
        }
        let _ = writeln!(s, "{k}{} {}", sym.index, sym.name);
    }
    if !c.comments.is_empty() {
        s.push_str("c\n");
        for l in &c.comments {
            let _ = writeln!(s, "{l}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ic4_core::fixtures::{cnt4, sat3};

    #[test]
    fn self_loop() {
        let c = parse_aag("aag 1 0 1 1 0\n2 2\n2\n").unwrap();
        let k = parse_aag("aag 1 0 1 1 0\n2 1\n0\n").unwrap();
        assert_eq!((k.latches[0].next, k.bad), (AigLit::TRUE, AigLit::FALSE));
        assert_eq!(c.latches, vec![Latch { lit: AigLit(2), next: AigLit(2), reset: false }]);
        assert_eq!(c.bad, AigLit(2));
    }

    #[test]
    fn missing_gate_reports_line() {
        let e = parse_aag("aag 2 0 1 1 1\n2 4\n4\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::Eof(_)));
    }

    #[test]
    fn errors_carry_lines() {
        let cases = [
            ("aig 1 0 1 1 0\n", 1, ParseErrorKind::Binary),
            ("aag 1 0 1 1 0\n2 7\n2\n", 2, ParseErrorKind::OutOfRange(7)),
            ("aag 3 0 1 1 1\n2 4\n4\n4 6 2\n", 4, ParseErrorKind::NotTopological { lhs: 4, rhs: 6 }),
            ("aag 2 0 1 1 0\n2 4\n2\n", 2, ParseErrorKind::Undefined(4)),
            ("aag 1 0 1 1 0\n2 2 2\n2\n", 2, ParseErrorKind::NondeterministicReset(2)),
            ("aag 1 1 0 1 0\n3\n2\n", 2, ParseErrorKind::BadDefinition(3)),
            ("aag 2 1 1 1 0\n2\n2 2\n2\n", 3, ParseErrorKind::Redefined(1)),
        ];
        for (text, line, kind) in cases {
            let e = parse_aag(text).unwrap_err();
            assert_eq!((e.line, e.kind), (line, kind), "{text:?}");
        }
        let e = parse_aag("aag 1 0 1 0 0 2\n2 2\n2\n2\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Unsupported(_)));
        let e = parse_aag("aag 1 0 1 1 0 0 1\n2 2\n2\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Unsupported(_)));
    }

    #[test]
    fn version_19_bad_section() {
        let c = parse_aag("aag 1 0 1 0 0 1\n2 2 1\n3\nb0 never\n").unwrap();
        assert_eq!(c.bad, AigLit(3));
        assert!(c.latches[0].reset);
        assert_eq!(c.symbols, vec![Symbol { kind: SymbolKind::Bad, index: 0, name: "never".into() }]);
    }

    #[test]
    fn round_trip_fixtures() {
        for c in [sat3(), cnt4()] {
            let text = write_aag(&c);
            let back = parse_aag(&text).unwrap();
            assert_eq!(back.latches, c.latches);
            assert_eq!(back.ands, c.ands);
            assert_eq!(back.bad, c.bad);
            assert_eq!(back.inputs, c.inputs);
        }
    }

    #[test]
    fn comments_are_kept() {
        let c = parse_aag("aag 1 0 1 1 0\n2 2\n2\nl0 stuck\nc\nhello\nworld\n").unwrap();
        assert_eq!(c.comments, vec!["hello".to_string(), "world".to_string()]);
        assert_eq!(c.symbols.len(), 1);
    }
}
