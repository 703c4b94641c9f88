//! 3-SAT as bounded realizability.
//!
//! At time 0 every `V_i` is rewritten to `A_i` (true) or `B_i` (false).
//! The clause counter `I_j` is consumed at time `j - 1` by a rule keyed on
//! one of the clause's literals, creating `I_{j+1}` one unit later. An
//! `I_j` (j <= n) that outlives its time unit is critical, so a compliant
//! trace with n ticks exists iff the formula is satisfiable.

use crate::dsl::{CriticalDecl, SpecFile, SrcConstraint, SrcRel};
use crate::error::{Error, Result};
use crate::term::{Fact, Signature, TimestampedFact};

use super::{at, keep, make, prop, rule};

/// A 3-CNF over variables `1..=vars`; literal `k` is `x_k`, `-k` its
/// negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3 {
    pub vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Cnf3 {
    pub fn new(vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > vars {
                    return Err(Error::Argument(format!("literal {l} outside 1..={vars}")));
                }
            }
        }
        Ok(Cnf3 { vars, clauses })
    }

    /// DIMACS CNF where every clause has one to three literals (shorter
    /// clauses are padded by repeating their last literal).
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut vars = None;
        let mut clauses = Vec::new();
        let mut cur: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::Argument(format!("bad problem line `{line}`")));
                }
                vars = Some(parts[1].parse().map_err(|_| Error::Argument(format!("bad problem line `{line}`")))?);
                continue;
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| Error::Argument(format!("bad literal `{tok}`")))?;
                if l != 0 {
                    cur.push(l);
                    continue;
                }
                let clause = match cur.as_slice() {
                    [a] => [*a, *a, *a],
                    [a, b] => [*a, *b, *b],
                    [a, b, c] => [*a, *b, *c],
                    _ => return Err(Error::Argument(format!("clause with {} literals", cur.len()))),
                };
                clauses.push(clause);
                cur.clear();
            }
        }
        if !cur.is_empty() {
            return Err(Error::Argument("last clause is not terminated by 0".into()));
        }
        let vars = vars.ok_or_else(|| Error::Argument("missing `p cnf` line".into()))?;
        Cnf3::new(vars, clauses)
    }

    /// Brute-force satisfiability.
    pub fn satisfiable(&self) -> bool {
        (0u64..1 << self.vars).any(|bits| {
            self.clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let v = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                    if l > 0 { v } else { !v }
                })
            })
        })
    }
}

pub fn gen_3sat(f: &Cnf3) -> Result<SpecFile> {
    let n = f.clauses.len();
    let mut sig = Signature::new();
    for i in 1..=f.vars {
        for p in ["V", "A", "B"] {
            sig.add_predicate(&format!("{p}{i}"), &[])?;
        }
    }
    for j in 1..=n + 1 {
        sig.add_predicate(&format!("I{j}"), &[])?;
    }
    let mut spec = SpecFile::new(sig);
    spec.params.ticks = Some(n.max(1) as u64);
    for i in 1..=f.vars {
        for (value, p) in [("true", "A"), ("false", "B")] {
            spec.rules.push(rule(
                format!("x{i}-{value}"),
                vec![at(prop(&format!("V{i}")), "T1")],
                vec![],
                vec![make(prop(&format!("{p}{i}")), 1)],
            ));
        }
    }
    for (j, c) in f.clauses.iter().enumerate() {
        let j = j + 1;
        for (pos, &l) in c.iter().enumerate() {
            let key = if l > 0 { "A" } else { "B" };
            let lit = prop(&format!("{key}{}", l.unsigned_abs()));
            spec.rules.push(rule(
                format!("clause{j}-lit{}", pos + 1),
                vec![at(lit.clone(), "T2"), at(prop(&format!("I{j}")), "T1")],
                vec![],
                vec![keep(&lit, "T2"), make(prop(&format!("I{}", j + 1)), 1)],
            ));
        }
    }
    let mut init = vec![TimestampedFact::new(Fact::time(), 0)];
    for i in 1..=f.vars {
        init.push(TimestampedFact::new(prop(&format!("V{i}")), 0));
    }
    init.push(TimestampedFact::new(prop("I1"), 0));
    spec.init = init;
    for j in 1..=n {
        spec.critical.push(CriticalDecl {
            name: format!("clause{j}-unsatisfied"),
            patterns: vec![at(Fact::time(), "T"), at(prop(&format!("I{j}")), "T1")],
            constraints: vec![SrcConstraint::new("T", SrcRel::Gt, "T1", 0)],
        });
    }
    Ok(spec)
}
