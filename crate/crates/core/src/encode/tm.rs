//! Space-bounded Turing machines.
//!
//! The tape has cells `0..=n+1`; `R{i}_{a}` says cell `i` holds `a` and
//! `S{i}_{q}` that the head is on cell `i` in state `q`. Each instruction
//! `g = (q, a) -> (q', b, D)` at cell `i` becomes a chain of five rules,
//! one per time unit:
//!
//! ```text
//! S{i}_{q}, R{i}_{a}      -> R{i}_{a}, F{i}_{g}
//! F{i}_{g}@T, R{i}_{a}    -> F{i}_{g}, H{i}_{g}
//! F{i}_{g}, H{i}_{g}@T    -> H{i}_{g}, G{i}_{g}
//! G{i}_{g}@T, H{i}_{g}    -> G{i}_{g}, R{i}_{b}
//! G{i}_{g}, R{i}_{b}@T    -> S{i+D}_{q'}, R{i}_{b}
//! ```
//!
//! Moves past either end leave the head where it is. Configurations with
//! the head in a final state are critical, so the system is realizable iff
//! the machine never halts.

use std::collections::HashSet;
use std::fmt;

use crate::dsl::{CriticalDecl, SpecFile};
use crate::error::{Error, Result};
use crate::term::{Fact, Signature, TimestampedFact};

use super::{at, keep, make, prop, rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    L,
    R,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::L => "L",
            Dir::R => "R",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub state: String,
    pub read: String,
    pub next: String,
    pub write: String,
    pub dir: Dir,
}

/// A machine with its space bound and input. The first symbol is the
/// blank; the input is written from cell 1 and the head starts there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmSpec {
    pub states: Vec<String>,
    pub symbols: Vec<String>,
    pub start: String,
    pub finals: Vec<String>,
    pub instructions: Vec<Instruction>,
    pub space: usize,
    pub input: Vec<String>,
}

fn ident_ok(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TmSpec {
    pub fn validate(&self) -> Result<()> {
        let arg = |m: String| Err(Error::Argument(m));
        for s in self.states.iter().chain(&self.symbols) {
            if !ident_ok(s) {
                return arg(format!("name `{s}` must be alphanumeric"));
            }
        }
        let states: HashSet<&str> = self.states.iter().map(String::as_str).collect();
        let symbols: HashSet<&str> = self.symbols.iter().map(String::as_str).collect();
        if self.symbols.is_empty() {
            return arg("at least one symbol (the blank) is required".into());
        }
        if !states.contains(self.start.as_str()) {
            return arg(format!("unknown start state `{}`", self.start));
        }
        if self.space == 0 || self.input.len() > self.space {
            return arg(format!("input of length {} does not fit in space {}", self.input.len(), self.space));
        }
        for q in &self.finals {
            if !states.contains(q.as_str()) {
                return arg(format!("unknown final state `{q}`"));
            }
        }
        for a in &self.input {
            if !symbols.contains(a.as_str()) {
                return arg(format!("unknown input symbol `{a}`"));
            }
        }
        let mut seen = HashSet::new();
        for g in &self.instructions {
            if !states.contains(g.state.as_str()) || !states.contains(g.next.as_str()) {
                return arg(format!("instruction uses an unknown state: {}", g.state));
            }
            if !symbols.contains(g.read.as_str()) || !symbols.contains(g.write.as_str()) {
                return arg(format!("instruction uses an unknown symbol: {}", g.read));
            }
            if !seen.insert((&g.state, &g.read)) {
                return arg(format!("two instructions for ({}, {})", g.state, g.read));
            }
        }
        Ok(())
    }

    /// Text form:
    ///
    /// ```text
    /// states q0 h
    /// symbols 0 1
    /// start q0
    /// final h
    /// space 2
    /// input 1 0
    /// q0 0 -> h 1 R
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut tm = TmSpec {
            states: vec![],
            symbols: vec![],
            start: String::new(),
            finals: vec![],
            instructions: vec![],
            space: 0,
            input: vec![],
        };
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<String> = line.split_whitespace().map(String::from).collect();
            let bad = || Error::Argument(format!("line {}: cannot read `{line}`", no + 1));
            match words[0].as_str() {
                "states" => tm.states = words[1..].to_vec(),
                "symbols" => tm.symbols = words[1..].to_vec(),
                "start" if words.len() == 2 => tm.start = words[1].clone(),
                "final" => tm.finals = words[1..].to_vec(),
                "space" if words.len() == 2 => tm.space = words[1].parse().map_err(|_| bad())?,
                "input" => tm.input = words[1..].to_vec(),
                _ if words.len() == 6 && words[2] == "->" => {
                    let dir = match words[5].as_str() {
                        "L" => Dir::L,
                        "R" => Dir::R,
                        _ => return Err(bad()),
                    };
                    tm.instructions.push(Instruction {
                        state: words[0].clone(),
                        read: words[1].clone(),
                        next: words[3].clone(),
                        write: words[4].clone(),
                        dir,
                    });
                }
                _ => return Err(bad()),
            }
        }
        tm.validate()?;
        Ok(tm)
    }

    /// Number of tape cells in the encoding.
    pub fn cells(&self) -> usize {
        self.space + 2
    }

    pub fn step_cell(&self, i: usize, d: Dir) -> usize {
        match d {
            Dir::L => i.saturating_sub(1),
            Dir::R => (i + 1).min(self.cells() - 1),
        }
    }
}

fn s(i: usize, q: &str) -> Fact {
    prop(&format!("S{i}_{q}"))
}

fn r(i: usize, a: &str) -> Fact {
    prop(&format!("R{i}_{a}"))
}

pub fn gen_tm(tm: &TmSpec) -> Result<SpecFile> {
    tm.validate()?;
    let cells = tm.cells();
    let mut sig = Signature::new();
    for i in 0..cells {
        for q in &tm.states {
            sig.add_predicate(&format!("S{i}_{q}"), &[])?;
        }
        for a in &tm.symbols {
            sig.add_predicate(&format!("R{i}_{a}"), &[])?;
        }
        for g in 0..tm.instructions.len() {
            for p in ["F", "H", "G"] {
                sig.add_predicate(&format!("{p}{i}_{g}"), &[])?;
            }
        }
    }
    let mut spec = SpecFile::new(sig);
    for (gi, g) in tm.instructions.iter().enumerate() {
        for i in 0..cells {
            let f = prop(&format!("F{i}_{gi}"));
            let h = prop(&format!("H{i}_{gi}"));
            let gg = prop(&format!("G{i}_{gi}"));
            let (read, written) = (r(i, &g.read), r(i, &g.write));
            let name = |k: usize| format!("i{gi}-cell{i}-{k}");
            spec.rules.push(rule(
                name(1),
                vec![at(s(i, &g.state), "T1"), at(read.clone(), "T2")],
                vec![],
                vec![keep(&read, "T2"), make(f.clone(), 1)],
            ));
            spec.rules.push(rule(
                name(2),
                vec![at(f.clone(), "T"), at(read.clone(), "T2")],
                vec![],
                vec![keep(&f, "T"), make(h.clone(), 1)],
            ));
            spec.rules.push(rule(
                name(3),
                vec![at(f.clone(), "T1"), at(h.clone(), "T")],
                vec![],
                vec![keep(&h, "T"), make(gg.clone(), 1)],
            ));
            spec.rules.push(rule(
                name(4),
                vec![at(gg.clone(), "T"), at(h.clone(), "T1")],
                vec![],
                vec![keep(&gg, "T"), make(written.clone(), 1)],
            ));
            spec.rules.push(rule(
                name(5),
                vec![at(gg.clone(), "T1"), at(written.clone(), "T")],
                vec![],
                vec![make(s(tm.step_cell(i, g.dir), &g.next), 1), make(written.clone(), 1)],
            ));
        }
    }
    let mut init = vec![TimestampedFact::new(Fact::time(), 0), TimestampedFact::new(s(1, &tm.start), 0)];
    for i in 0..cells {
        let a = i
            .checked_sub(1)
            .and_then(|k| tm.input.get(k))
            .unwrap_or(&tm.symbols[0]);
        init.push(TimestampedFact::new(r(i, a), 0));
    }
    spec.init = init;
    for q in &tm.finals {
        for i in 0..cells {
            spec.critical.push(CriticalDecl {
                name: format!("halt-{q}-cell{i}"),
                patterns: vec![at(s(i, q), "T")],
                constraints: vec![],
            });
        }
    }
    Ok(spec)
}

/// Direct simulation: does the machine reach a final state (or a state
/// with no instruction for the scanned symbol)? Repetition of a machine
/// configuration means it runs forever.
pub fn halts(tm: &TmSpec) -> bool {
    let mut tape: Vec<&str> = (0..tm.cells())
        .map(|i| {
            i.checked_sub(1)
                .and_then(|k| tm.input.get(k))
                .unwrap_or(&tm.symbols[0])
                .as_str()
        })
        .collect();
    let (mut q, mut head) = (tm.start.as_str(), 1usize);
    let mut seen = HashSet::new();
    loop {
        if tm.finals.iter().any(|f| f == q) {
            return true;
        }
        if !seen.insert((q, head, tape.clone())) {
            return false;
        }
        let Some(g) = tm.instructions.iter().find(|g| g.state == q && g.read == tape[head]) else {
            return true;
        };
        tape[head] = &g.write;
        q = &g.next;
        head = tm.step_cell(head, g.dir);
    }
}
