//! Test support: random small progressive systems, an explicit-state
//! oracle over normalized concrete configurations, and witness checks.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tmsr_core::dsl::{CriticalDecl, RhsAtom, RuleDecl, SrcConstraint, SrcRel};
use tmsr_core::rules::PatternAtom;
use tmsr_core::{
    validate_counterexample, validate_lasso, validate_trace, Fact, Model, Outcome, Signature, SpecFile, Term,
    TimestampedFact, Verdict, Witness,
};

// ---------------------------------------------------------------------------
// Witness certification

/// Check every trace a verdict carries. Holds verdicts must carry one.
pub fn certify(m: &Model, v: &Verdict) -> Result<(), String> {
    let (sys, cs) = (&m.system, &m.critical);
    if let Some(ce) = &v.counterexample {
        let idx = v.critical.as_ref().map(|h| h.index);
        let c = validate_counterexample(sys, cs, ce, idx);
        if !c.ok {
            return Err(format!("counterexample rejected: {}", c.message));
        }
    }
    match &v.witness {
        Some(Witness::Trace(t)) => {
            let c = validate_trace(sys, cs, t, v.ticks.map(|n| n as usize));
            if !c.ok {
                return Err(format!("witness rejected at {:?}: {}", c.failing_step, c.message));
            }
        }
        Some(Witness::Lasso(l)) => {
            let c = validate_lasso(sys, cs, l);
            if !c.ok {
                return Err(format!("lasso rejected at {:?}: {}", c.failing_step, c.message));
            }
        }
        None if v.outcome == Outcome::Holds => return Err("holds without a witness".into()),
        None => {}
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Random systems

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Gt,
    Eq,
    Ge,
}

/// `left rel right + offset` over time variables.
#[derive(Debug, Clone)]
pub struct Cons {
    pub left: String,
    pub rel: Rel,
    pub right: String,
    pub offset: i64,
}

#[derive(Debug, Clone)]
pub struct OracleRule {
    /// Non-Time precondition atoms: fact, time variable, consumed.
    pub lhs: Vec<(Fact, String, bool)>,
    pub guard: Vec<Cons>,
    pub created: Vec<(Fact, u64)>,
}

#[derive(Debug, Clone)]
pub struct OraclePair {
    /// Patterns; `Time` may appear among them.
    pub patterns: Vec<(Fact, String)>,
    pub constraints: Vec<Cons>,
}

/// A random system in two independent representations.
#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub spec: SpecFile,
    pub rules: Vec<OracleRule>,
    pub critical: Vec<OraclePair>,
    pub init: Vec<(Fact, u64)>,
    pub dmax: u64,
}

fn signature() -> Signature {
    let mut sig = Signature::new();
    for p in ["A", "B", "C"] {
        sig.add_predicate(p, &[]).unwrap();
    }
    sig.add_sort("S").unwrap();
    sig.add_predicate("Q", &["S"]).unwrap();
    sig.add_constant("a", "S").unwrap();
    sig.add_constant("b", "S").unwrap();
    sig.add_variable("Z", "S").unwrap();
    sig
}

fn ground_fact(rng: &mut StdRng) -> Fact {
    match rng.gen_range(0..5) {
        0 => Fact::new("A", vec![]),
        1 => Fact::new("B", vec![]),
        2 => Fact::new("C", vec![]),
        3 => Fact::new("Q", vec![Term::constant("a")]),
        _ => Fact::new("Q", vec![Term::constant("b")]),
    }
}

fn pattern_fact(rng: &mut StdRng, allow_var: bool) -> Fact {
    if allow_var && rng.gen_bool(0.25) {
        Fact::new("Q", vec![Term::var("Z", "S")])
    } else {
        ground_fact(rng)
    }
}

fn has_var(f: &Fact) -> bool {
    !f.is_ground()
}

fn random_cons(rng: &mut StdRng, vars: &[String], allow_ge: bool) -> Option<Cons> {
    if vars.len() < 2 {
        return None;
    }
    let i = rng.gen_range(0..vars.len());
    let mut j = rng.gen_range(0..vars.len() - 1);
    if j >= i {
        j += 1;
    }
    let rel = match rng.gen_range(0..if allow_ge { 3 } else { 2 }) {
        0 => Rel::Gt,
        1 => Rel::Eq,
        _ => Rel::Ge,
    };
    Some(Cons {
        left: vars[i].clone(),
        rel,
        right: vars[j].clone(),
        offset: rng.gen_range(-2..=2),
    })
}

fn src(c: &Cons) -> SrcConstraint {
    let rel = match c.rel {
        Rel::Gt => SrcRel::Gt,
        Rel::Eq => SrcRel::Eq,
        Rel::Ge => SrcRel::Ge,
    };
    SrcConstraint::new(&c.left, rel, &c.right, c.offset)
}

fn random_rule(rng: &mut StdRng) -> OracleRule {
    let n = rng.gen_range(1..=2);
    let mut lhs = Vec::new();
    for i in 0..n {
        let tv = if rng.gen_bool(0.15) { "T".to_string() } else { format!("T{}", i + 1) };
        lhs.push((pattern_fact(rng, true), tv, rng.gen_bool(0.6)));
    }
    if !lhs.iter().any(|a| a.2) {
        let k = rng.gen_range(0..n);
        lhs[k].2 = true;
    }
    let bound_z = lhs.iter().any(|a| has_var(&a.0));
    let consumed = lhs.iter().filter(|a| a.2).count();
    let mut created: Vec<(Fact, u64)> = (0..consumed)
        .map(|_| (pattern_fact(rng, bound_z), rng.gen_range(0..=2)))
        .collect();
    if created.iter().all(|c| c.1 == 0) {
        created[0].1 = 1;
    }
    let mut vars: Vec<String> = vec!["T".into()];
    for a in &lhs {
        if !vars.contains(&a.1) {
            vars.push(a.1.clone());
        }
    }
    let guard = (0..rng.gen_range(0..=1))
        .filter_map(|_| random_cons(rng, &vars, true))
        .collect();
    OracleRule { lhs, guard, created }
}

fn rule_decl(name: String, r: &OracleRule) -> RuleDecl {
    let mut lhs = vec![PatternAtom::new(Fact::time(), "T")];
    let mut rhs = vec![RhsAtom::new(Fact::time(), "T", 0)];
    for (f, tv, consumed) in &r.lhs {
        lhs.push(PatternAtom::new(f.clone(), tv));
        if !consumed {
            rhs.push(RhsAtom::new(f.clone(), tv, 0));
        }
    }
    for (f, off) in &r.created {
        rhs.push(RhsAtom::new(f.clone(), "T", *off));
    }
    RuleDecl {
        name,
        lhs,
        guard: r.guard.iter().map(src).collect(),
        rhs,
    }
}

impl RandomSystem {
    pub fn generate(seed: u64) -> RandomSystem {
        let mut rng = StdRng::seed_from_u64(seed);
        let rules: Vec<OracleRule> = (0..rng.gen_range(1..=5)).map(|_| random_rule(&mut rng)).collect();
        let mut init = vec![(Fact::time(), rng.gen_range(0..=2))];
        for _ in 0..rng.gen_range(1..=3) {
            init.push((ground_fact(&mut rng), rng.gen_range(0..=2)));
        }
        let mut critical = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let mut patterns = Vec::new();
            for i in 0..rng.gen_range(1..=2) {
                patterns.push((pattern_fact(&mut rng, true), format!("U{}", i + 1)));
            }
            if rng.gen_bool(0.5) {
                patterns.push((Fact::time(), "U0".into()));
            }
            let vars: Vec<String> = patterns.iter().map(|p| p.1.clone()).collect();
            let constraints = (0..rng.gen_range(0..=1))
                .filter_map(|_| random_cons(&mut rng, &vars, true))
                .collect();
            critical.push(OraclePair { patterns, constraints });
        }

        let mut spec = SpecFile::new(signature());
        for (i, r) in rules.iter().enumerate() {
            spec.rules.push(rule_decl(format!("r{i}"), r));
        }
        spec.init = init.iter().map(|(f, t)| TimestampedFact::new(f.clone(), *t)).collect();
        for (i, p) in critical.iter().enumerate() {
            spec.critical.push(CriticalDecl {
                name: format!("c{i}"),
                patterns: p.patterns.iter().map(|(f, t)| PatternAtom::new(f.clone(), t)).collect(),
                constraints: p.constraints.iter().map(src).collect(),
            });
        }
        let dmax = independent_dmax(&rules, &critical, &init);
        RandomSystem {
            spec,
            rules,
            critical,
            init,
            dmax,
        }
    }
}

fn independent_dmax(rules: &[OracleRule], critical: &[OraclePair], init: &[(Fact, u64)]) -> u64 {
    let mut d = init.iter().map(|f| f.1).max().unwrap_or(0);
    for r in rules {
        d = d.max(r.created.iter().map(|c| c.1).max().unwrap_or(0));
        d = d.max(r.guard.iter().map(|c| c.offset.unsigned_abs()).max().unwrap_or(0));
    }
    for p in critical {
        d = d.max(p.constraints.iter().map(|c| c.offset.unsigned_abs()).max().unwrap_or(0));
    }
    d.max(1)
}

// ---------------------------------------------------------------------------
// Oracle

/// Sorted list of `(canonical fact text, fact, timestamp)`.
pub type State = Vec<(String, Fact, u64)>;

fn key(s: &State) -> Vec<(String, u64)> {
    s.iter().map(|(t, _, ts)| (t.clone(), *ts)).collect()
}

/// Sort by (timestamp, text), shift to start at 0 and widen gaps above
/// `dmax` to exactly `dmax + 1`.
pub fn normalize(mut facts: Vec<(Fact, u64)>, dmax: u64) -> State {
    facts.sort_by(|a, b| (a.1, a.0.text()).cmp(&(b.1, b.0.text())));
    let mut out = Vec::with_capacity(facts.len());
    let mut prev: Option<u64> = None;
    let mut now = 0u64;
    for (f, ts) in facts {
        if let Some(p) = prev {
            now += (ts - p).min(dmax + 1);
        }
        prev = Some(ts);
        out.push((f.text().to_string(), f, now));
    }
    out
}

#[derive(Default, Clone)]
struct Binding {
    time: HashMap<String, u64>,
    z: Option<Term>,
}

fn unify(pat: &Fact, g: &Fact, b: &mut Binding) -> bool {
    if pat.pred != g.pred || pat.args.len() != g.args.len() {
        return false;
    }
    for (p, a) in pat.args.iter().zip(&g.args) {
        match p {
            Term::Var(_) => match &b.z {
                Some(v) if v != a => return false,
                Some(_) => {}
                None => b.z = Some(a.clone()),
            },
            _ if p != a => return false,
            _ => {}
        }
    }
    true
}

fn holds(c: &Cons, b: &Binding) -> bool {
    let l = b.time[&c.left] as i64;
    let r = b.time[&c.right] as i64 + c.offset;
    match c.rel {
        Rel::Gt => l > r,
        Rel::Eq => l == r,
        Rel::Ge => l >= r,
    }
}

/// All injective assignments of `atoms` to facts of `s`.
fn assignments(atoms: &[(Fact, String)], s: &State) -> Vec<(Vec<usize>, Binding)> {
    fn go(atoms: &[(Fact, String)], s: &State, used: &mut Vec<usize>, b: Binding, out: &mut Vec<(Vec<usize>, Binding)>) {
        let Some(((f, tv), rest)) = atoms.split_first() else {
            out.push((used.clone(), b));
            return;
        };
        for i in 0..s.len() {
            if used.contains(&i) {
                continue;
            }
            let mut nb = b.clone();
            if !unify(f, &s[i].1, &mut nb) {
                continue;
            }
            match nb.time.get(tv) {
                Some(&t) if t != s[i].2 => continue,
                _ => {
                    nb.time.insert(tv.clone(), s[i].2);
                }
            }
            used.push(i);
            go(rest, s, used, nb, out);
            used.pop();
        }
    }
    let mut out = Vec::new();
    go(atoms, s, &mut Vec::new(), Binding::default(), &mut out);
    out
}

fn subst(f: &Fact, b: &Binding) -> Fact {
    if f.is_ground() {
        return f.clone();
    }
    Fact::new(&f.pred, vec![b.z.clone().expect("created variable is bound")])
}

pub struct Oracle<'a> {
    pub sys: &'a RandomSystem,
}

impl Oracle<'_> {
    pub fn initial(&self) -> State {
        normalize(self.sys.init.clone(), self.sys.dmax)
    }

    pub fn critical(&self, s: &State) -> bool {
        self.sys.critical.iter().any(|p| {
            assignments(&p.patterns, s)
                .iter()
                .any(|(_, b)| p.constraints.iter().all(|c| holds(c, b)))
        })
    }

    pub fn successors(&self, s: &State) -> Vec<State> {
        let mut out: Vec<State> = Vec::new();
        let mut seen = HashSet::new();
        for r in &self.sys.rules {
            let mut atoms = vec![(Fact::time(), "T".to_string())];
            atoms.extend(r.lhs.iter().map(|(f, t, _)| (f.clone(), t.clone())));
            for (idx, b) in assignments(&atoms, s) {
                let now = b.time["T"];
                let consumed: Vec<usize> = r
                    .lhs
                    .iter()
                    .zip(&idx[1..])
                    .filter(|(a, _)| a.2)
                    .map(|(_, &i)| i)
                    .collect();
                if consumed.iter().any(|&i| s[i].2 > now) {
                    continue;
                }
                if !r.guard.iter().all(|c| holds(c, &b)) {
                    continue;
                }
                let mut next: Vec<(Fact, u64)> = s
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !consumed.contains(i))
                    .map(|(_, (_, f, t))| (f.clone(), *t))
                    .collect();
                for (f, off) in &r.created {
                    next.push((subst(f, &b), now + off));
                }
                let n = normalize(next, self.sys.dmax);
                if seen.insert(key(&n)) {
                    out.push(n);
                }
            }
        }
        if out.is_empty() {
            let next = s
                .iter()
                .map(|(_, f, t)| (f.clone(), if f.is_time() { t + 1 } else { *t }))
                .collect();
            out.push(normalize(next, self.sys.dmax));
        }
        out
    }

    /// `(realizable, survivable)` by explicit exploration.
    pub fn decide(&self) -> (bool, bool) {
        let init = self.initial();
        if self.critical(&init) {
            return (false, false);
        }
        let mut ids: HashMap<Vec<(String, u64)>, usize> = HashMap::new();
        let mut states = vec![init.clone()];
        let mut crit = vec![false];
        let mut edges: Vec<Vec<usize>> = vec![];
        ids.insert(key(&init), 0);
        let mut queue = VecDeque::from([0usize]);
        let mut any_critical = false;
        while let Some(i) = queue.pop_front() {
            while edges.len() <= i {
                edges.push(Vec::new());
            }
            if crit[i] {
                continue;
            }
            let succ = self.successors(&states[i]);
            for n in succ {
                let k = key(&n);
                let j = match ids.get(&k) {
                    Some(&j) => j,
                    None => {
                        let j = states.len();
                        ids.insert(k, j);
                        let c = self.critical(&n);
                        any_critical |= c;
                        states.push(n);
                        crit.push(c);
                        queue.push_back(j);
                        j
                    }
                };
                edges[i].push(j);
            }
        }
        while edges.len() < states.len() {
            edges.push(Vec::new());
        }
        // greatest set of non-critical states each with a successor inside
        let mut alive: BTreeSet<usize> = (0..states.len()).filter(|&i| !crit[i]).collect();
        loop {
            let dead: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&i| !edges[i].iter().any(|j| alive.contains(j)))
                .collect();
            if dead.is_empty() {
                break;
            }
            for d in dead {
                alive.remove(&d);
            }
        }
        let realizable = alive.contains(&0);
        (realizable, realizable && !any_critical)
    }
}
