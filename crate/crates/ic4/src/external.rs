//! Line-based protocol for running the SAT backend in another process.
//!
//! Requests, one per line, literals in DIMACS numbering:
//!
//! ```text
//! vars N          reserve variables 1..=N
//! add l1 .. lk 0  add a clause
//! assume l        assume a literal for the next solve
//! limit N|none    conflict limit per solve
//! solve           -> 10 (sat) | 20 (unsat) | 0 (limit hit)
//! value l         -> 1 | 0 | ?
//! failed l        -> 1 | 0
//! conflicts       -> total conflicts so far
//! quit
//! ```
//!
//! Only `solve`, `value`, `failed` and `conflicts` produce a reply line.

use std::cell::RefCell;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::Arc;

use ic4_core::logic::Lit;
use ic4_core::sat::{IncrementalSolver, SolveStatus, SolverFactory};

struct Conn {
    reader: Box<dyn BufRead + Send>,
    writer: Box<dyn Write + Send>,
}

impl Conn {
    fn send(&mut self, line: &str) {
        writeln!(self.writer, "{line}").expect("external solver closed its input");
    }

    fn ask(&mut self, line: &str) -> String {
        self.send(line);
        self.writer.flush().expect("external solver closed its input");
        let mut reply = String::new();
        let n = self.reader.read_line(&mut reply).expect("external solver output unreadable");
        assert!(n > 0, "external solver exited during `{line}`");
        reply.trim().to_string()
    }
}

/// A solver living behind the text protocol. Protocol failures panic: the
/// engine has no way to continue without its solver.
pub struct ExternalSolver {
    conn: RefCell<Conn>,
    child: Option<Child>,
}

impl ExternalSolver {
    pub fn over(reader: impl Read + Send + 'static, writer: impl Write + Send + 'static) -> ExternalSolver {
        let conn = Conn { reader: Box::new(BufReader::new(reader)), writer: Box::new(BufWriter::new(writer)) };
        ExternalSolver { conn: RefCell::new(conn), child: None }
    }

    /// Starts `program args..`, passing the seed as `--seed N`.
    pub fn spawn(program: &str, args: &[String], seed: u64) -> io::Result<ExternalSolver> {
        let mut child = Command::new(program)
            .args(args)
            .arg("--seed")
            .arg(seed.to_string())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut s = ExternalSolver::over(stdout, stdin);
        s.child = Some(child);
        Ok(s)
    }
}

impl Drop for ExternalSolver {
    fn drop(&mut self) {
        let conn = self.conn.get_mut();
        let _ = writeln!(conn.writer, "quit");
        let _ = conn.writer.flush();
        if let Some(mut c) = self.child.take() {
            let _ = c.wait();
        }
    }
}

impl IncrementalSolver for ExternalSolver {
    fn reserve_vars(&mut self, n: usize) {
        self.conn.get_mut().send(&format!("vars {n}"));
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        let mut line = String::from("add");
        for l in lits {
            line.push_str(&format!(" {}", l.to_dimacs()));
        }
        line.push_str(" 0");
        self.conn.get_mut().send(&line);
    }

    fn assume(&mut self, lit: Lit) {
        self.conn.get_mut().send(&format!("assume {}", lit.to_dimacs()));
    }

    fn solve(&mut self) -> SolveStatus {
        match self.conn.get_mut().ask("solve").as_str() {
            "10" => SolveStatus::Sat,
            "20" => SolveStatus::Unsat,
            "0" => SolveStatus::Unknown,
            r => panic!("external solver answered `{r}` to solve"),
        }
    }

    fn value(&self, lit: Lit) -> Option<bool> {
        match self.conn.borrow_mut().ask(&format!("value {}", lit.to_dimacs())).as_str() {
            "1" => Some(true),
            "0" => Some(false),
            _ => None,
        }
    }

    fn failed(&self, lit: Lit) -> bool {
        self.conn.borrow_mut().ask(&format!("failed {}", lit.to_dimacs())) == "1"
    }

    fn set_conflict_limit(&mut self, limit: Option<u64>) {
        let arg = limit.map_or("none".to_string(), |n| n.to_string());
        self.conn.get_mut().send(&format!("limit {arg}"));
    }

    fn conflicts(&self) -> u64 {
        let r = self.conn.borrow_mut().ask("conflicts");
        r.parse().unwrap_or_else(|_| panic!("external solver answered `{r}` to conflicts"))
    }
}

/// A factory spawning one process per solver instance. `command` is split
/// on whitespace.
pub fn external_factory(command: &str) -> Result<SolverFactory, String> {
    let mut parts = command.split_whitespace().map(str::to_string);
    let program = parts.next().ok_or("empty external solver command")?;
    let args: Vec<String> = parts.collect();
    Ok(Arc::new(move |seed| {
        let s = ExternalSolver::spawn(&program, &args, seed)
            .unwrap_or_else(|e| panic!("cannot start external solver `{program}`: {e}"));
        Box::new(s)
    }))
}

fn parse_lit(tok: Option<&str>) -> io::Result<Lit> {
    tok.and_then(|t| t.parse::<i64>().ok())
        .and_then(Lit::from_dimacs)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "expected a non-zero literal"))
}

/// Answers protocol requests on `input` with `solver` until `quit` or end
/// of input.
pub fn serve(solver: &mut dyn IncrementalSolver, input: impl BufRead, mut output: impl Write) -> io::Result<()> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    for line in input.lines() {
        let line = line?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None => {}
            Some("quit") => break,
            Some("vars") => {
                let n = toks.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line.clone()))?;
                solver.reserve_vars(n);
            }
            Some("add") => {
                let mut lits = Vec::new();
                for t in toks {
                    let d: i64 = t.parse().map_err(|_| bad(line.clone()))?;
                    if d == 0 {
                        break;
                    }
                    lits.push(Lit::from_dimacs(d).ok_or_else(|| bad(line.clone()))?);
                }
                solver.add_clause(&lits);
            }
            Some("assume") => solver.assume(parse_lit(toks.next())?),
            Some("limit") => match toks.next() {
                Some("none") => solver.set_conflict_limit(None),
                Some(n) => solver.set_conflict_limit(Some(n.parse().map_err(|_| bad(line.clone()))?)),
                None => return Err(bad(line)),
            },
            Some("solve") => {
                let code = match solver.solve() {
                    SolveStatus::Sat => 10,
                    SolveStatus::Unsat => 20,
                    SolveStatus::Unknown => 0,
                };
                writeln!(output, "{code}")?;
                output.flush()?;
            }
            Some("value") => {
                let r = match solver.value(parse_lit(toks.next())?) {
                    Some(true) => "1",
                    Some(false) => "0",
                    None => "?",
                };
                writeln!(output, "{r}")?;
                output.flush()?;
            }
            Some("failed") => {
                let r = solver.failed(parse_lit(toks.next())?);
                writeln!(output, "{}", r as u8)?;
                output.flush()?;
            }
            Some("conflicts") => {
                writeln!(output, "{}", solver.conflicts())?;
                output.flush()?;
            }
            Some(other) => return Err(bad(format!("unknown request `{other}`"))),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ic4_core::logic::Var;
    use ic4_core::sat::Cdcl;

    fn connected() -> (ExternalSolver, std::thread::JoinHandle<()>) {
        let (req_r, req_w) = io::pipe().unwrap();
        let (rep_r, rep_w) = io::pipe().unwrap();
        let server = std::thread::spawn(move || {
            let mut s = Cdcl::new(1);
            serve(&mut s, BufReader::new(req_r), rep_w).unwrap();
        });
        (ExternalSolver::over(rep_r, req_w), server)
    }

    #[test]
    fn round_trip_over_pipes() {
        let (mut s, server) = connected();
        let a = Var(0).lit(true);
        let b = Var(1).lit(true);
        s.reserve_vars(2);
        s.add_clause(&[a, b]);
        s.add_clause(&[!a, b]);
        assert_eq!(s.solve(), SolveStatus::Sat);
        assert_eq!(s.value(b), Some(true));
        s.assume(!b);
        assert_eq!(s.solve(), SolveStatus::Unsat);
        assert!(s.failed(!b));
        s.set_conflict_limit(Some(5));
        assert_eq!(s.solve(), SolveStatus::Sat);
        let _ = s.conflicts();
        drop(s);
        server.join().unwrap();
    }

    #[test]
    fn serve_rejects_garbage() {
        let mut s = Cdcl::new(0);
        let r = serve(&mut s, "frobnicate\n".as_bytes(), Vec::new());
        assert!(r.is_err());
    }
}
