//! Typed first-order terms, facts, timestamped facts and configurations.
//!
//! Natural-number literals are successor terms `s^n(z)`. They are stored
//! in collapsed form as [`Term::Nat`]; the smart constructor [`Term::app`]
//! keeps that representation canonical, so `s(s(z))` and `2` are the same
//! value. Every other function application is an ordinary [`Term::App`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{DiagCode, Error, Result};

pub type Sym = Arc<str>;

pub const NAT: &str = "Nat";
pub const ZERO: &str = "z";
pub const SUCC: &str = "s";
pub const TIME: &str = "Time";

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// Alphabet of a timed system: sorts, predicates, functions, constants
/// and the declared term variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub sorts: BTreeSet<Sym>,
    pub predicates: BTreeMap<Sym, Vec<Sym>>,
    pub functions: BTreeMap<Sym, (Vec<Sym>, Sym)>,
    pub constants: BTreeMap<Sym, Sym>,
    pub variables: BTreeMap<Sym, Sym>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    /// A signature holding only the built-ins `Nat`, `z`, `s` and `Time`.
    pub fn new() -> Self {
        let mut sig = Signature {
            sorts: BTreeSet::new(),
            predicates: BTreeMap::new(),
            functions: BTreeMap::new(),
            constants: BTreeMap::new(),
            variables: BTreeMap::new(),
        };
        sig.sorts.insert(sym(NAT));
        sig.constants.insert(sym(ZERO), sym(NAT));
        sig.functions
            .insert(sym(SUCC), (vec![sym(NAT)], sym(NAT)));
        sig.predicates.insert(sym(TIME), Vec::new());
        sig
    }

    pub fn is_builtin(name: &str) -> bool {
        matches!(name, NAT | ZERO | SUCC | TIME)
    }

    /// Number of predicate symbols (J).
    pub fn j(&self) -> usize {
        self.predicates.len()
    }

    /// Number of constant and function symbols (E).
    pub fn e(&self) -> usize {
        self.constants.len() + self.functions.len()
    }

    fn taken(&self, name: &str) -> bool {
        self.predicates.contains_key(name)
            || self.functions.contains_key(name)
            || self.constants.contains_key(name)
            || self.variables.contains_key(name)
    }

    fn require_sort(&self, s: &str) -> Result<()> {
        if self.sorts.contains(s) {
            Ok(())
        } else {
            Err(Error::invalid(DiagCode::Undeclared, format!("unknown sort `{s}`")))
        }
    }

    fn require_fresh(&self, name: &str) -> Result<()> {
        if self.taken(name) {
            Err(Error::invalid(DiagCode::Redeclared, format!("`{name}` is already declared")))
        } else {
            Ok(())
        }
    }

    pub fn add_sort(&mut self, name: &str) -> Result<()> {
        if self.sorts.contains(name) {
            return Err(Error::invalid(DiagCode::Redeclared, format!("sort `{name}` is already declared")));
        }
        self.sorts.insert(sym(name));
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, args: &[&str]) -> Result<()> {
        self.require_fresh(name)?;
        for a in args {
            self.require_sort(a)?;
        }
        self.predicates
            .insert(sym(name), args.iter().map(|a| sym(a)).collect());
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, args: &[&str], result: &str) -> Result<()> {
        self.require_fresh(name)?;
        for a in args {
            self.require_sort(a)?;
        }
        self.require_sort(result)?;
        self.functions.insert(
            sym(name),
            (args.iter().map(|a| sym(a)).collect(), sym(result)),
        );
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str, sort: &str) -> Result<()> {
        self.require_fresh(name)?;
        self.require_sort(sort)?;
        self.constants.insert(sym(name), sym(sort));
        Ok(())
    }

    pub fn add_variable(&mut self, name: &str, sort: &str) -> Result<()> {
        self.require_fresh(name)?;
        self.require_sort(sort)?;
        self.variables.insert(sym(name), sym(sort));
        Ok(())
    }

    /// Sort of a term, checking well-sortedness on the way down.
    pub fn sort_of(&self, t: &Term) -> Result<Sym> {
        match t {
            Term::Var(v) => Ok(v.sort.clone()),
            Term::Nat(_) => Ok(sym(NAT)),
            Term::App(f, args) => {
                if args.is_empty() {
                    if let Some(s) = self.constants.get(f) {
                        return Ok(s.clone());
                    }
                }
                let (params, result) = match self.functions.get(f) {
                    Some(sig) => sig,
                    None if args.is_empty() => {
                        return Err(Error::invalid(DiagCode::Undeclared, format!("unknown constant `{f}`")))
                    }
                    None => {
                        return Err(Error::invalid(DiagCode::Undeclared, format!("unknown function `{f}`")))
                    }
                };
                if params.len() != args.len() {
                    return Err(Error::invalid(
                        DiagCode::Arity,
                        format!("`{f}` expects {} arguments, got {}", params.len(), args.len()),
                    ));
                }
                for (i, (p, a)) in params.iter().zip(args).enumerate() {
                    let s = self.sort_of(a)?;
                    if &s != p {
                        return Err(Error::invalid(
                            DiagCode::Sort,
                            format!("argument {} of `{f}` has sort {s}, expected {p}", i + 1),
                        ));
                    }
                }
                Ok(result.clone())
            }
        }
    }

    pub fn check_fact(&self, f: &Fact) -> Result<()> {
        let params = self.predicates.get(&f.pred).ok_or_else(|| {
            Error::invalid(DiagCode::Undeclared, format!("unknown predicate `{}`", f.pred))
        })?;
        if params.len() != f.args.len() {
            return Err(Error::invalid(
                DiagCode::Arity,
                format!("`{}` expects {} arguments, got {}", f.pred, params.len(), f.args.len()),
            ));
        }
        for (i, (p, a)) in params.iter().zip(&f.args).enumerate() {
            let s = self.sort_of(a)?;
            if &s != p {
                return Err(Error::invalid(
                    DiagCode::Sort,
                    format!("argument {} of `{}` has sort {s}, expected {p}", i + 1, f.pred),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Sym,
    pub sort: Sym,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    /// `s^n(z)`.
    Nat(u64),
    /// Constant (no arguments) or function application.
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, sort: &str) -> Term {
        Term::Var(Var {
            name: sym(name),
            sort: sym(sort),
        })
    }

    pub fn constant(name: &str) -> Term {
        Term::app(sym(name), Vec::new())
    }

    /// Application that folds `z` and `s(<numeral>)` into [`Term::Nat`].
    pub fn app(f: Sym, mut args: Vec<Term>) -> Term {
        if args.is_empty() && &*f == ZERO {
            return Term::Nat(0);
        }
        if args.len() == 1 && &*f == SUCC {
            if let Term::Nat(n) = args[0] {
                return Term::Nat(n + 1);
            }
            return Term::App(f, vec![args.pop().unwrap()]);
        }
        Term::App(f, args)
    }

    pub fn succ(t: Term) -> Term {
        Term::app(sym(SUCC), vec![t])
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Nat(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Alphabet symbols after numeral desugaring.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Nat(n) => *n as usize + 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::Nat(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    /// Explicit successor form, e.g. `s(s(z))`. Only used for display of
    /// the desugared syntax; the canonical text resugars numerals.
    pub fn desugared(&self) -> String {
        match self {
            Term::Nat(n) => {
                let n = *n as usize;
                format!("{}z{}", "s(".repeat(n), ")".repeat(n))
            }
            Term::Var(v) => v.name.to_string(),
            Term::App(f, args) if args.is_empty() => f.to_string(),
            Term::App(f, args) => {
                let inner: Vec<String> = args.iter().map(Term::desugared).collect();
                format!("{f}({})", inner.join(","))
            }
        }
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            Term::Var(v) => out.push_str(&v.name),
            Term::Nat(n) => out.push_str(&n.to_string()),
            Term::App(f, args) => {
                out.push_str(f);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        a.write_canonical(out);
                    }
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_canonical(&mut s);
        f.write_str(&s)
    }
}

/// Desugar a numeral to its successor term.
pub fn desugar(n: u64) -> Term {
    Term::Nat(n)
}

/// Inverse of [`desugar`]: the natural a ground successor term denotes.
pub fn resugar(t: &Term) -> Option<u64> {
    match t {
        Term::Nat(n) => Some(*n),
        Term::App(f, args) if &**f == SUCC && args.len() == 1 => resugar(&args[0]).map(|n| n + 1),
        Term::App(f, args) if &**f == ZERO && args.is_empty() => Some(0),
        _ => None,
    }
}

/// A fact `P(t1,...,tn)`. Equality, hashing and ordering go through the
/// canonical text (predicate name, then arguments in prefix form with
/// numerals written in decimal), which is cached at construction.
#[derive(Clone)]
pub struct Fact {
    pub pred: Sym,
    pub args: Vec<Term>,
    text: Sym,
}

impl Fact {
    pub fn new(pred: &str, args: Vec<Term>) -> Fact {
        Fact::from_sym(sym(pred), args)
    }

    pub fn from_sym(pred: Sym, args: Vec<Term>) -> Fact {
        let mut text = String::from(&*pred);
        if !args.is_empty() {
            text.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    text.push(',');
                }
                a.write_canonical(&mut text);
            }
            text.push(')');
        }
        Fact {
            pred,
            args,
            text: Arc::from(text),
        }
    }

    pub fn time() -> Fact {
        Fact::new(TIME, Vec::new())
    }

    pub fn is_time(&self) -> bool {
        &*self.pred == TIME
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.vars(&mut out));
        out
    }
}

impl PartialEq for Fact {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}
impl Eq for Fact {}

impl std::hash::Hash for Fact {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.text.hash(state)
    }
}

impl PartialOrd for Fact {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Fact {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.text.cmp(&other.text)
    }
}

impl fmt::Debug for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `F@t`. Ordered by timestamp, then by the fact's canonical text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimestampedFact {
    pub fact: Fact,
    pub ts: u64,
}

impl TimestampedFact {
    pub fn new(fact: Fact, ts: u64) -> Self {
        TimestampedFact { fact, ts }
    }
}

impl PartialOrd for TimestampedFact {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TimestampedFact {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ts
            .cmp(&other.ts)
            .then_with(|| self.fact.cmp(&other.fact))
    }
}

impl fmt::Display for TimestampedFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.fact, self.ts)
    }
}

/// Size of a timestamped fact: alphabet symbols of the fact, timestamp
/// excluded.
pub fn fact_size(f: &TimestampedFact) -> usize {
    f.fact.size()
}

/// Multiset of ground timestamped facts containing exactly one `Time`
/// fact. Stored in canonical order, so structural equality is multiset
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    facts: Vec<TimestampedFact>,
}

impl Configuration {
    pub fn new(mut facts: Vec<TimestampedFact>) -> Result<Self> {
        let times = facts.iter().filter(|f| f.fact.is_time()).count();
        if times != 1 {
            return Err(Error::invalid(
                DiagCode::SingleTime,
                format!("single Time fact required, found {times}"),
            ));
        }
        if let Some(f) = facts.iter().find(|f| !f.fact.is_ground()) {
            return Err(Error::invalid(DiagCode::NotGround, format!("fact `{}` is not ground", f.fact)));
        }
        facts.sort();
        Ok(Configuration { facts })
    }

    /// Trusted constructor for already validated fact lists.
    pub(crate) fn from_sorted_unchecked(facts: Vec<TimestampedFact>) -> Self {
        debug_assert!(facts.windows(2).all(|w| w[0] <= w[1]));
        Configuration { facts }
    }

    pub(crate) fn from_unsorted_unchecked(mut facts: Vec<TimestampedFact>) -> Self {
        facts.sort();
        Configuration { facts }
    }

    pub fn facts(&self) -> &[TimestampedFact] {
        &self.facts
    }

    /// Number of facts (m), `Time` included.
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn time(&self) -> u64 {
        self.facts
            .iter()
            .find(|f| f.fact.is_time())
            .map(|f| f.ts)
            .expect("configuration without Time fact")
    }

    pub fn max_timestamp(&self) -> u64 {
        self.facts.last().map(|f| f.ts).unwrap_or(0)
    }

    /// Occurrences of an exact timestamped fact.
    pub fn count(&self, f: &TimestampedFact) -> usize {
        self.facts.iter().filter(|g| *g == f).count()
    }

    /// Multiset inclusion.
    pub fn contains_all(&self, sub: &[TimestampedFact]) -> bool {
        let mut used = vec![false; self.facts.len()];
        'outer: for want in sub {
            for (i, have) in self.facts.iter().enumerate() {
                if !used[i] && have == want {
                    used[i] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// The configuration with the global time advanced by one.
    pub fn tick(&self) -> Configuration {
        let facts = self
            .facts
            .iter()
            .map(|f| {
                if f.fact.is_time() {
                    TimestampedFact::new(f.fact.clone(), f.ts + 1)
                } else {
                    f.clone()
                }
            })
            .collect();
        Configuration::from_unsorted_unchecked(facts)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, tf) in self.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{tf}")?;
        }
        f.write_str("}")
    }
}

/// Facts of a configuration by non-decreasing timestamp; ties ordered by
/// the canonical fact text.
pub fn canonical_sequence(c: &Configuration) -> Vec<TimestampedFact> {
    c.facts.clone()
}

/// Grounding substitution: time variables to naturals and term variables
/// to ground terms. The two namespaces are disjoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    pub time: BTreeMap<Sym, u64>,
    pub terms: BTreeMap<Sym, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_time(mut self, var: &str, value: u64) -> Self {
        self.time.insert(sym(var), value);
        self
    }

    pub fn with_term(mut self, var: &str, value: Term) -> Self {
        self.terms.insert(sym(var), value);
        self
    }

    pub fn time_of(&self, var: &str) -> Result<u64> {
        self.time
            .get(var)
            .copied()
            .ok_or_else(|| Error::Unbound(var.to_string()))
    }

    /// Restriction to term variables.
    pub fn term_part(&self) -> Substitution {
        Substitution {
            time: BTreeMap::new(),
            terms: self.terms.clone(),
        }
    }
}

pub fn apply_subst_term(t: &Term, s: &Substitution) -> Result<Term> {
    match t {
        Term::Var(v) => s
            .terms
            .get(&v.name)
            .cloned()
            .ok_or_else(|| Error::Unbound(v.name.to_string())),
        Term::Nat(n) => Ok(Term::Nat(*n)),
        Term::App(f, args) => {
            let args = args
                .iter()
                .map(|a| apply_subst_term(a, s))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::app(f.clone(), args))
        }
    }
}

pub fn apply_subst(f: &Fact, s: &Substitution) -> Result<Fact> {
    if f.is_ground() {
        return Ok(f.clone());
    }
    let args = f
        .args
        .iter()
        .map(|a| apply_subst_term(a, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fact::from_sym(f.pred.clone(), args))
}

/// Instantiate a pattern `F@T` under `s`.
pub fn apply_subst_timed(f: &Fact, time_var: &str, s: &Substitution) -> Result<TimestampedFact> {
    Ok(TimestampedFact::new(apply_subst(f, s)?, s.time_of(time_var)?))
}

/// One-sided matching of a pattern term against a ground term, extending
/// `s`. On failure `s` may hold partial bindings; callers clone first.
pub(crate) fn match_term(pat: &Term, ground: &Term, s: &mut Substitution) -> bool {
    match (pat, ground) {
        (Term::Var(v), _) => match s.terms.get(&v.name) {
            Some(bound) => bound == ground,
            None => {
                s.terms.insert(v.name.clone(), ground.clone());
                true
            }
        },
        (Term::Nat(a), Term::Nat(b)) => a == b,
        (Term::App(f, args), Term::Nat(n)) if &**f == SUCC && args.len() == 1 => {
            *n > 0 && match_term(&args[0], &Term::Nat(n - 1), s)
        }
        (Term::App(f, pa), Term::App(g, ga)) => {
            f == g && pa.len() == ga.len() && pa.iter().zip(ga).all(|(p, g)| match_term(p, g, s))
        }
        _ => false,
    }
}

pub(crate) fn match_fact(pat: &Fact, ground: &Fact, s: &mut Substitution) -> bool {
    if pat.pred != ground.pred || pat.args.len() != ground.args.len() {
        return false;
    }
    if pat.args.iter().all(Term::is_ground) {
        return pat == ground;
    }
    pat.args
        .iter()
        .zip(&ground.args)
        .all(|(p, g)| match_term(p, g, s))
}
