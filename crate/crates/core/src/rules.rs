//! Instantaneous rules, time constraints, critical configuration
//! specifications, matching under lazy time sampling, and the static
//! balanced / progressive classifier.

use std::collections::HashSet;
use std::fmt;

use crate::error::{DiagCode, Error, Result};
use crate::term::{
    apply_subst, match_fact, sym, Configuration, Fact, Signature, Substitution, Sym,
    TimestampedFact,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Greater,
    Equal,
}

/// `left > right + offset` or `left = right + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimeConstraint {
    pub rel: Relation,
    pub left: Sym,
    pub right: Sym,
    pub offset: i64,
}

impl TimeConstraint {
    pub fn new(rel: Relation, left: &str, right: &str, offset: i64) -> Self {
        TimeConstraint {
            rel,
            left: sym(left),
            right: sym(right),
            offset,
        }
    }

    pub fn gt(left: &str, right: &str, offset: i64) -> Self {
        Self::new(Relation::Greater, left, right, offset)
    }

    pub fn eq(left: &str, right: &str, offset: i64) -> Self {
        Self::new(Relation::Equal, left, right, offset)
    }
}

impl fmt::Display for TimeConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            Relation::Greater => ">",
            Relation::Equal => "=",
        };
        write!(f, "{} {op} {}", self.left, self.right)?;
        match self.offset {
            0 => Ok(()),
            n if n > 0 => write!(f, " + {n}"),
            n => write!(f, " - {}", -n),
        }
    }
}

pub fn eval_constraint(c: &TimeConstraint, s: &Substitution) -> Result<bool> {
    let l = s.time_of(&c.left)? as i128;
    let r = s.time_of(&c.right)? as i128 + c.offset as i128;
    Ok(match c.rel {
        Relation::Greater => l > r,
        Relation::Equal => l == r,
    })
}

/// A fact pattern with its timestamp variable, `F@T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternAtom {
    pub fact: Fact,
    pub time: Sym,
}

impl PatternAtom {
    pub fn new(fact: Fact, time: &str) -> Self {
        PatternAtom {
            fact,
            time: sym(time),
        }
    }
}

impl fmt::Display for PatternAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.fact, self.time)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LhsAtom {
    pub atom: PatternAtom,
    pub consumed: bool,
}

/// A created fact `Q@(T + offset)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Created {
    pub fact: Fact,
    pub offset: u64,
}

/// An instantaneous rule
/// `Time@T, W, F1@T1', ... | C -> Time@T, W, Q1@(T+D1), ...`.
///
/// `lhs` holds the whole precondition in declaration order with the
/// `Time@T` atom first; preserved atoms reappear unchanged on the right.
/// `past` is the implicit set `T >= Ti'` over consumed atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: Sym,
    /// Index among the rules sharing `name` (>= guards expand to several).
    pub variant: usize,
    pub time_var: Sym,
    pub lhs: Vec<LhsAtom>,
    pub created: Vec<Created>,
    pub guard: Vec<TimeConstraint>,
    pub past: Vec<Sym>,
}

impl Rule {
    /// Build a rule from its precondition (without the `Time` atom), the
    /// flags saying which atoms are consumed, the created facts and the
    /// guard. The `Time@time_var` atom is added in front.
    pub fn new(
        name: &str,
        time_var: &str,
        pre: Vec<(PatternAtom, bool)>,
        created: Vec<Created>,
        guard: Vec<TimeConstraint>,
    ) -> Result<Rule> {
        let mut lhs = vec![LhsAtom {
            atom: PatternAtom::new(Fact::time(), time_var),
            consumed: false,
        }];
        for (atom, consumed) in pre {
            if atom.fact.is_time() {
                return Err(Error::invalid(
                    DiagCode::RuleShape,
                    format!("rule `{name}`: Time may only appear once, as Time@{time_var}"),
                ));
            }
            lhs.push(LhsAtom { atom, consumed });
        }
        let tvars: HashSet<&str> = lhs.iter().map(|a| &*a.atom.time).collect();
        for c in &guard {
            for v in [&c.left, &c.right] {
                if !tvars.contains(&**v) {
                    return Err(Error::invalid(
                        DiagCode::RuleShape,
                        format!("rule `{name}`: guard variable `{v}` does not occur in the precondition"),
                    ));
                }
            }
        }
        // Term variables of created facts must be bound by the precondition.
        let mut bound = Vec::new();
        for a in &lhs {
            for v in a.atom.fact.vars() {
                if !bound.contains(&v) {
                    bound.push(v);
                }
            }
        }
        for c in &created {
            for v in c.fact.vars() {
                if !bound.contains(&v) {
                    return Err(Error::invalid(
                        DiagCode::RuleShape,
                        format!("rule `{name}`: variable `{}` of created fact is unbound", v.name),
                    ));
                }
            }
        }
        let past = lhs
            .iter()
            .filter(|a| a.consumed && *a.atom.time != *time_var)
            .map(|a| a.atom.time.clone())
            .fold(Vec::new(), |mut acc, v| {
                if !acc.contains(&v) {
                    acc.push(v);
                }
                acc
            });
        Ok(Rule {
            name: sym(name),
            variant: 0,
            time_var: sym(time_var),
            lhs,
            created,
            guard,
            past,
        })
    }

    pub fn consumed(&self) -> impl Iterator<Item = &PatternAtom> {
        self.lhs.iter().filter(|a| a.consumed).map(|a| &a.atom)
    }

    pub fn preserved(&self) -> impl Iterator<Item = &PatternAtom> {
        self.lhs.iter().filter(|a| !a.consumed).map(|a| &a.atom)
    }

    /// Facts on the right-hand side, `Time` and preserved facts included.
    pub fn rhs_len(&self) -> usize {
        self.preserved().count() + self.created.len()
    }

    fn guard_holds(&self, s: &Substitution) -> Result<bool> {
        let t = s.time_of(&self.time_var)?;
        for v in &self.past {
            if s.time_of(v)? > t {
                return Ok(false);
            }
        }
        for c in &self.guard {
            if !eval_constraint(c, s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Enumerate substitutions mapping `atoms` injectively onto elements of
/// `c`, in pattern order and canonical element order, deduplicated.
fn match_atoms<'a>(
    atoms: &[&'a PatternAtom],
    c: &Configuration,
    accept: &mut dyn FnMut(&Substitution) -> bool,
) -> Vec<Substitution> {
    fn go(
        atoms: &[&PatternAtom],
        facts: &[TimestampedFact],
        used: &mut [bool],
        s: &Substitution,
        accept: &mut dyn FnMut(&Substitution) -> bool,
        out: &mut Vec<Substitution>,
        seen: &mut HashSet<Substitution>,
    ) {
        let Some((first, rest)) = atoms.split_first() else {
            if accept(s) && seen.insert(s.clone()) {
                out.push(s.clone());
            }
            return;
        };
        for i in 0..facts.len() {
            if used[i] {
                continue;
            }
            let g = &facts[i];
            if g.fact.pred != first.fact.pred {
                continue;
            }
            if let Some(&t) = s.time.get(&first.time) {
                if t != g.ts {
                    continue;
                }
            }
            let mut next = s.clone();
            if !match_fact(&first.fact, &g.fact, &mut next) {
                continue;
            }
            next.time.insert(first.time.clone(), g.ts);
            used[i] = true;
            go(rest, facts, used, &next, accept, out, seen);
            used[i] = false;
        }
    }
    let mut used = vec![false; c.len()];
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    go(atoms, c.facts(), &mut used, &Substitution::new(), accept, &mut out, &mut seen);
    out
}

/// All substitutions under which `r` applies to `c`.
pub fn match_rule(r: &Rule, c: &Configuration) -> Vec<Substitution> {
    let atoms: Vec<&PatternAtom> = r.lhs.iter().map(|a| &a.atom).collect();
    match_atoms(&atoms, c, &mut |s| r.guard_holds(s).unwrap_or(false))
}

/// Rewrite `c` with rule `r` under `s`.
pub fn apply_rule(r: &Rule, c: &Configuration, s: &Substitution) -> Result<Configuration> {
    let mut pre = Vec::with_capacity(r.lhs.len());
    for a in &r.lhs {
        pre.push(TimestampedFact::new(
            apply_subst(&a.atom.fact, s)?,
            s.time_of(&a.atom.time)?,
        ));
    }
    if !c.contains_all(&pre) || !r.guard_holds(s)? {
        return Err(Error::NotApplicable(r.name.to_string()));
    }
    let now = s.time_of(&r.time_var)?;
    let mut facts = c.facts().to_vec();
    for (a, inst) in r.lhs.iter().zip(&pre) {
        if a.consumed {
            let pos = facts
                .iter()
                .position(|f| f == inst)
                .ok_or_else(|| Error::NotApplicable(r.name.to_string()))?;
            facts.remove(pos);
        }
    }
    for q in &r.created {
        facts.push(TimestampedFact::new(apply_subst(&q.fact, s)?, now + q.offset));
    }
    Ok(Configuration::from_unsorted_unchecked(facts))
}

/// One pair `<S_j, C_j>` of a critical configuration specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    pub name: Sym,
    pub patterns: Vec<PatternAtom>,
    pub constraints: Vec<TimeConstraint>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CriticalSpec {
    pub pairs: Vec<CriticalPair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalHit {
    pub index: usize,
    pub name: Sym,
    pub subst: Substitution,
}

impl CriticalSpec {
    pub fn new(pairs: Vec<CriticalPair>) -> Self {
        CriticalSpec { pairs }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// First critical pair (in declaration order) matching `c`, with its
/// grounding substitution.
pub fn is_critical(cs: &CriticalSpec, c: &Configuration) -> Option<CriticalHit> {
    for (index, pair) in cs.pairs.iter().enumerate() {
        let atoms: Vec<&PatternAtom> = pair.patterns.iter().collect();
        let mut found = None;
        match_atoms(&atoms, c, &mut |s| {
            if found.is_some() {
                return false;
            }
            let ok = pair
                .constraints
                .iter()
                .all(|k| eval_constraint(k, s).unwrap_or(false));
            if ok {
                found = Some(s.clone());
            }
            ok
        });
        if let Some(subst) = found {
            return Some(CriticalHit {
                index,
                name: pair.name.clone(),
                subst,
            });
        }
    }
    None
}

/// A timed MSR: instantaneous rules over a signature (the tick rule is
/// implicit), with the fact-size bound k.
#[derive(Debug, Clone)]
pub struct System {
    pub signature: Signature,
    pub rules: Vec<Rule>,
    pub declared_k: usize,
    pub dmax_override: Option<u64>,
}

impl System {
    pub fn new(signature: Signature, rules: Vec<Rule>, declared_k: usize) -> Self {
        System {
            signature,
            rules,
            declared_k,
            dmax_override: None,
        }
    }

    /// Distinct rule names in declaration order.
    pub fn rule_names(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = Vec::new();
        for r in &self.rules {
            if !out.contains(&r.name) {
                out.push(r.name.clone());
            }
        }
        out
    }

    /// Largest fact size over rule patterns.
    pub fn max_pattern_size(&self) -> usize {
        self.rules
            .iter()
            .flat_map(|r| {
                r.lhs
                    .iter()
                    .map(|a| a.atom.fact.size())
                    .chain(r.created.iter().map(|q| q.fact.size()))
            })
            .max()
            .unwrap_or(1)
    }

    /// Apply rule `idx`, enforcing the fact-size bound on created facts.
    pub fn fire(&self, idx: usize, c: &Configuration, s: &Substitution) -> Result<Configuration> {
        let r = &self.rules[idx];
        let next = apply_rule(r, c, s)?;
        for q in &r.created {
            let f = apply_subst(&q.fact, s)?;
            let size = f.size();
            if size > self.declared_k {
                return Err(Error::FactSizeExceeded {
                    fact: f.to_string(),
                    size,
                    bound: self.declared_k,
                });
            }
        }
        Ok(next)
    }
}

/// Applicable instances of instantaneous rules: rule declaration order,
/// then match order.
pub fn enabled(sys: &System, c: &Configuration) -> Vec<(usize, Substitution)> {
    let mut out = Vec::new();
    for (i, r) in sys.rules.iter().enumerate() {
        for s in match_rule(r, c) {
            out.push((i, s));
        }
    }
    out
}

/// Lazy time sampling: the tick fires only when no instantaneous rule
/// applies.
pub fn must_tick(sys: &System, c: &Configuration) -> bool {
    sys.rules.iter().all(|r| match_rule(r, c).is_empty())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleVerdict {
    pub rule: Sym,
    pub variant: usize,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassReport {
    pub verdicts: Vec<RuleVerdict>,
}

impl ClassReport {
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RuleVerdict> {
        self.verdicts.iter().filter(|v| !v.ok)
    }
}

pub fn check_balanced(sys: &System) -> ClassReport {
    let verdicts = sys
        .rules
        .iter()
        .map(|r| {
            let (l, rr) = (r.lhs.len(), r.rhs_len());
            RuleVerdict {
                rule: r.name.clone(),
                variant: r.variant,
                ok: l == rr,
                detail: format!("{l} facts in precondition, {rr} in postcondition"),
            }
        })
        .collect();
    ClassReport { verdicts }
}

pub fn check_progressive(sys: &System) -> ClassReport {
    let verdicts = sys
        .rules
        .iter()
        .map(|r| {
            let balanced = r.lhs.len() == r.rhs_len();
            let future = r.created.iter().any(|q| q.offset >= 1);
            let past_ok = r
                .consumed()
                .all(|a| a.time == r.time_var || r.past.contains(&a.time));
            let detail = if !balanced {
                "not balanced".to_string()
            } else if !future {
                "creates no fact with timestamp after the global time".to_string()
            } else if !past_ok {
                "may consume facts from the future".to_string()
            } else {
                "progressive".to_string()
            };
            RuleVerdict {
                rule: r.name.clone(),
                variant: r.variant,
                ok: balanced && future && past_ok,
                detail,
            }
        })
        .collect();
    ClassReport { verdicts }
}

/// Upper bound on timestamps of the initial configuration, creation
/// offsets and constraint offsets; at least 1. Numerals inside fact
/// arguments are not counted.
pub fn compute_dmax(sys: &System, init: &Configuration, cs: &CriticalSpec) -> u64 {
    let from_init = init.facts().iter().map(|f| f.ts).max().unwrap_or(0);
    let from_rules = sys.rules.iter().flat_map(|r| {
        r.created
            .iter()
            .map(|q| q.offset)
            .chain(r.guard.iter().map(|c| c.offset.unsigned_abs()))
    });
    let from_cs = cs
        .pairs
        .iter()
        .flat_map(|p| p.constraints.iter().map(|c| c.offset.unsigned_abs()));
    let computed = from_rules
        .chain(from_cs)
        .fold(from_init, u64::max)
        .max(1);
    match sys.dmax_override {
        Some(d) => d.max(computed),
        None => computed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Term, NAT};

    fn dr_pat(id: &str, x: Term, y: Term, e: Term) -> Fact {
        Fact::new("Dr", vec![Term::var(id, "Drone"), x, y, e])
    }

    fn v(n: &str) -> Term {
        Term::var(n, NAT)
    }

    fn cfg(facts: &[(Fact, u64)]) -> Configuration {
        Configuration::new(
            facts
                .iter()
                .map(|(f, t)| TimestampedFact::new(f.clone(), *t))
                .collect(),
        )
        .unwrap()
    }

    fn dr(id: &str, x: u64, y: u64, e: u64) -> Fact {
        Fact::new(
            "Dr",
            vec![Term::constant(id), Term::Nat(x), Term::Nat(y), Term::Nat(e)],
        )
    }

    fn p(id: &str, x: u64, y: u64) -> Fact {
        Fact::new("P", vec![Term::constant(id), Term::Nat(x), Term::Nat(y)])
    }

    /// Move north: Dr(Id,X,Y,s(E))@Td -> Dr(Id,X,s(Y),E)@(T+1).
    fn move_north() -> Rule {
        Rule::new(
            "north",
            "T",
            vec![(PatternAtom::new(dr_pat("Id", v("X"), v("Y"), Term::succ(v("E"))), "Td"), true)],
            vec![Created {
                fact: dr_pat("Id", v("X"), Term::succ(v("Y")), v("E")),
                offset: 1,
            }],
            vec![],
        )
        .unwrap()
    }

    fn charge_at(xb: u64, yb: u64, emax: u64) -> Vec<Rule> {
        (0..emax)
            .map(|e| {
                let mut r = Rule::new(
                    "charge",
                    "T",
                    vec![(PatternAtom::new(dr_pat("Id", Term::Nat(xb), Term::Nat(yb), Term::Nat(e)), "Td"), true)],
                    vec![Created {
                        fact: dr_pat("Id", Term::Nat(xb), Term::Nat(yb), Term::Nat(e + 1)),
                        offset: 1,
                    }],
                    vec![],
                )
                .unwrap();
                r.variant = e as usize;
                r
            })
            .collect()
    }

    /// Click at point p1: consumes P(p1,X,Y)@T1 and the drone fact,
    /// refreshes the picture at T.
    fn click() -> Rule {
        Rule::new(
            "click",
            "T",
            vec![
                (PatternAtom::new(Fact::new("P", vec![Term::constant("p1"), v("X"), v("Y")]), "T1"), true),
                (PatternAtom::new(dr_pat("Id", v("X"), v("Y"), Term::succ(v("E"))), "Td"), true),
            ],
            vec![
                Created {
                    fact: Fact::new("P", vec![Term::constant("p1"), v("X"), v("Y")]),
                    offset: 0,
                },
                Created {
                    fact: dr_pat("Id", v("X"), v("Y"), v("E")),
                    offset: 1,
                },
            ],
            vec![],
        )
        .unwrap()
    }

    fn stale(m: i64) -> CriticalSpec {
        CriticalSpec::new(vec![CriticalPair {
            name: sym("stale-p1"),
            patterns: vec![
                PatternAtom::new(Fact::new("P", vec![Term::constant("p1"), Term::Nat(1), Term::Nat(1)]), "T1"),
                PatternAtom::new(Fact::time(), "T"),
            ],
            constraints: vec![TimeConstraint::gt("T", "T1", m)],
        }])
    }

    fn no_energy() -> CriticalSpec {
        CriticalSpec::new(vec![CriticalPair {
            name: sym("no-energy"),
            patterns: vec![PatternAtom::new(dr_pat("Id", v("X"), v("Y"), Term::Nat(0)), "T")],
            constraints: vec![],
        }])
    }

    fn sys(rules: Vec<Rule>) -> System {
        let mut sig = Signature::new();
        sig.add_sort("Drone").unwrap();
        sig.add_sort("Point").unwrap();
        System::new(sig, rules, 64)
    }

    #[test]
    fn constraint_evaluation() {
        let s = Substitution::new().with_time("T", 60).with_time("T1", 3);
        assert!(eval_constraint(&TimeConstraint::gt("T", "T1", 50), &s).unwrap());
        let s = Substitution::new().with_time("T", 4).with_time("T'", 4);
        assert!(eval_constraint(&TimeConstraint::eq("T", "T'", 0), &s).unwrap());
        let s = Substitution::new().with_time("T", 0).with_time("T1", 0);
        assert!(eval_constraint(&TimeConstraint::gt("T", "T1", -1), &s).unwrap());
        assert!(matches!(
            eval_constraint(&TimeConstraint::gt("T", "U", 0), &s),
            Err(Error::Unbound(_))
        ));
    }

    #[test]
    fn time_only_pattern_matches_global_time() {
        let r = Rule::new("idle", "T", vec![], vec![], vec![]).unwrap();
        let c = crate::term::tests_support::eq1();
        let m = match_rule(&r, &c);
        assert_eq!(m, vec![Substitution::new().with_time("T", 4)]);
    }

    #[test]
    fn charge_needs_drone_at_base() {
        let c = cfg(&[(Fact::time(), 0), (dr("d1", 2, 2, 3), 0)]);
        for r in charge_at(1, 1, 5) {
            assert!(match_rule(&r, &c).is_empty());
        }
        let at_base = cfg(&[(Fact::time(), 0), (dr("d1", 1, 1, 3), 0)]);
        let s = sys(charge_at(1, 1, 5));
        let en = enabled(&s, &at_base);
        assert_eq!(en.len(), 1);
        assert_eq!(s.rules[en[0].0].variant, 3);
    }

    #[test]
    fn click_on_point_has_single_match() {
        let c = cfg(&[(Fact::time(), 2), (p("p1", 1, 1), 0), (dr("d1", 1, 1, 4), 2)]);
        let m = match_rule(&click(), &c);
        // brute force: the only injective assignment of the three atoms
        assert_eq!(m.len(), 1);
        let s = &m[0];
        assert_eq!(s.terms[&sym("Id")], Term::constant("d1"));
        assert_eq!(s.terms[&sym("E")], Term::Nat(3));
        assert_eq!(s.time[&sym("T1")], 0);
        let next = apply_rule(&click(), &c, s).unwrap();
        assert_eq!(next.len(), c.len());
        assert_eq!(next.count(&TimestampedFact::new(p("p1", 1, 1), 2)), 1);
        assert_eq!(next.count(&TimestampedFact::new(dr("d1", 1, 1, 3), 3)), 1);
    }

    #[test]
    fn move_north_rewrites_drone() {
        let c = cfg(&[(Fact::time(), 3), (dr("d1", 0, 0, 1), 3)]);
        let r = move_north();
        let m = match_rule(&r, &c);
        assert_eq!(m.len(), 1);
        let next = apply_rule(&r, &c, &m[0]).unwrap();
        assert_eq!(next.count(&TimestampedFact::new(dr("d1", 0, 1, 0), 4)), 1);
        assert_eq!(next.count(&TimestampedFact::new(dr("d1", 0, 0, 1), 3)), 0);
        assert_eq!(next.len(), 2);
    }

    #[test]
    fn consumed_future_fact_is_not_matched() {
        let c = cfg(&[(Fact::time(), 3), (dr("d1", 0, 0, 1), 4)]);
        assert!(match_rule(&move_north(), &c).is_empty());
    }

    #[test]
    fn apply_outside_match_is_rejected() {
        let c = cfg(&[(Fact::time(), 3), (dr("d1", 0, 0, 1), 3)]);
        let s = Substitution::new()
            .with_time("T", 3)
            .with_time("Td", 3)
            .with_term("Id", Term::constant("d2"))
            .with_term("X", Term::Nat(0))
            .with_term("Y", Term::Nat(0))
            .with_term("E", Term::Nat(0));
        assert!(matches!(apply_rule(&move_north(), &c, &s), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn tick_advances_time_only() {
        let c = cfg(&[(Fact::time(), 4), (Fact::new("F", vec![]), 2)]);
        let t = c.tick();
        assert_eq!(t, cfg(&[(Fact::time(), 5), (Fact::new("F", vec![]), 2)]));
    }

    #[test]
    fn enabled_lists_each_drone_move() {
        let c = cfg(&[(Fact::time(), 0), (dr("d1", 0, 0, 2), 0), (dr("d2", 1, 1, 1), 0)]);
        let s = sys(vec![move_north()]);
        let en = enabled(&s, &c);
        assert_eq!(en.len(), 2);
        assert!(!must_tick(&s, &c));
        let only_tick = cfg(&[(Fact::time(), 0), (dr("d1", 0, 0, 0), 0)]);
        assert!(enabled(&s, &only_tick).is_empty());
        assert!(must_tick(&s, &only_tick));
    }

    #[test]
    fn identical_patterns_need_two_elements() {
        let f = Fact::new("F", vec![]);
        let r = Rule::new(
            "pair",
            "T",
            vec![(PatternAtom::new(f.clone(), "T1"), true), (PatternAtom::new(f.clone(), "T2"), true)],
            vec![
                Created { fact: f.clone(), offset: 1 },
                Created { fact: f.clone(), offset: 1 },
            ],
            vec![],
        )
        .unwrap();
        let one = cfg(&[(Fact::time(), 1), (f.clone(), 0)]);
        assert!(match_rule(&r, &one).is_empty());
        let two = cfg(&[(Fact::time(), 1), (f.clone(), 0), (f.clone(), 0)]);
        assert_eq!(match_rule(&r, &two).len(), 1);
    }

    #[test]
    fn criticality_examples() {
        let energy = cfg(&[(Fact::time(), 7), (dr("d1", 3, 3, 0), 7), (p("p1", 1, 1), 3)]);
        assert!(is_critical(&no_energy(), &energy).is_some());
        let fresh = cfg(&[(Fact::time(), 4), (p("p1", 1, 1), 3)]);
        assert!(is_critical(&stale(50), &fresh).is_none());
        let old = cfg(&[(Fact::time(), 60), (p("p1", 1, 1), 3)]);
        let hit = is_critical(&stale(50), &old).unwrap();
        assert_eq!(hit.index, 0);
        assert_eq!(hit.subst.time[&sym("T")], 60);
    }

    #[test]
    fn classifier_flags_shapes() {
        let s = sys(vec![move_north(), click()]);
        assert!(check_balanced(&s).ok());
        assert!(check_progressive(&s).ok());

        let mut broken = move_north();
        broken.created.clear();
        let s = sys(vec![broken]);
        let rep = check_balanced(&s);
        assert!(!rep.ok());
        assert_eq!(&*rep.failures().next().unwrap().rule, "north");

        let f = Fact::new("P", vec![]);
        let flat = Rule::new(
            "tick-like",
            "T",
            vec![(PatternAtom::new(f.clone(), "T1"), true)],
            vec![Created { fact: f, offset: 0 }],
            vec![],
        )
        .unwrap();
        let s = sys(vec![flat]);
        assert!(check_balanced(&s).ok());
        assert!(!check_progressive(&s).ok());
    }

    #[test]
    fn past_constraints_are_materialized() {
        let r = click();
        assert_eq!(r.past, vec![sym("T1"), sym("Td")]);
    }

    #[test]
    fn dmax_inspects_timestamps_and_offsets() {
        let s = sys(vec![move_north(), click()]);
        let init = cfg(&[(Fact::time(), 0)]);
        assert_eq!(compute_dmax(&s, &init, &CriticalSpec::default()), 1);
        assert_eq!(compute_dmax(&s, &init, &stale(50)), 50);
        let e = crate::term::tests_support::eq1();
        assert_eq!(compute_dmax(&sys(vec![]), &e, &CriticalSpec::default()), 4);
    }

    #[test]
    fn fact_size_guard_aborts() {
        let mut s = sys(vec![move_north()]);
        s.declared_k = 4;
        let c = cfg(&[(Fact::time(), 0), (dr("d1", 0, 0, 1), 0)]);
        let (i, sub) = enabled(&s, &c).remove(0);
        assert!(matches!(s.fire(i, &c, &sub), Err(Error::FactSizeExceeded { .. })));
    }
}
