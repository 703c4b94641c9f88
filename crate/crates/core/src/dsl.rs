//! Text format for systems.
//!
//! ```text
//! tmsr-spec 1
//! sort Drone
//! pred Dr : Drone Nat Nat Nat
//! const d1 : Drone
//! var I : Drone
//! var X : Nat
//! param ticks = 4
//! rule "recharge": Time@T, Dr(I,X,Y,E)@T1 | T >= T1 -> Time@T, Dr(I,X,Y,10)@(T+1)
//! init: Time@0, Dr(d1,0,0,10)@0
//! critical "empty": { Dr(I,X,Y,0)@T }
//! ```
//!
//! Whitespace (newlines included) only separates tokens; `#` starts a
//! comment. A right-hand atom `F@V` equal to a not yet paired left-hand
//! atom is preserved; every other left-hand atom is consumed and every
//! other right-hand atom is created at `T` or `T+d`. A `>=` constraint
//! expands the rule into one variant per choice of `>` or `=`.

use std::fmt::{self, Write as _};

use crate::error::{DiagCode, Error, Result};
use crate::rules::{Created, CriticalPair, CriticalSpec, PatternAtom, Relation, Rule, System, TimeConstraint};
use crate::term::{sym, Configuration, Fact, Signature, Sym, Term, TimestampedFact};

pub const HEADER: &str = "tmsr-spec 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SrcRel {
    Gt,
    Eq,
    Ge,
}

/// A constraint as written, before `>=` expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SrcConstraint {
    pub left: Sym,
    pub rel: SrcRel,
    pub right: Sym,
    pub offset: i64,
}

impl SrcConstraint {
    pub fn new(left: &str, rel: SrcRel, right: &str, offset: i64) -> Self {
        SrcConstraint {
            left: sym(left),
            rel,
            right: sym(right),
            offset,
        }
    }

    fn choices(&self) -> Vec<TimeConstraint> {
        let mk = |rel| TimeConstraint::new(rel, &self.left, &self.right, self.offset);
        match self.rel {
            SrcRel::Gt => vec![mk(Relation::Greater)],
            SrcRel::Eq => vec![mk(Relation::Equal)],
            SrcRel::Ge => vec![mk(Relation::Greater), mk(Relation::Equal)],
        }
    }
}

impl fmt::Display for SrcConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            SrcRel::Gt => ">",
            SrcRel::Eq => "=",
            SrcRel::Ge => ">=",
        };
        write!(f, "{} {op} {}", self.left, self.right)?;
        match self.offset {
            0 => Ok(()),
            n if n > 0 => write!(f, " + {n}"),
            n => write!(f, " - {}", -n),
        }
    }
}

/// Every combination of choices for the `>=` constraints.
fn expand(cs: &[SrcConstraint]) -> Vec<Vec<TimeConstraint>> {
    let mut out = vec![Vec::new()];
    for c in cs {
        let choices = c.choices();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |ch| {
                    let mut v = prefix.clone();
                    v.push(ch.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Right-hand atom `F@V` or `F@(T+d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RhsAtom {
    pub fact: Fact,
    pub time: Sym,
    pub offset: u64,
}

impl RhsAtom {
    pub fn new(fact: Fact, time: &str, offset: u64) -> Self {
        RhsAtom {
            fact,
            time: sym(time),
            offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDecl {
    pub name: String,
    pub lhs: Vec<PatternAtom>,
    pub guard: Vec<SrcConstraint>,
    pub rhs: Vec<RhsAtom>,
}

impl RuleDecl {
    /// The rule variants, one per expansion of `>=` constraints.
    pub fn build(&self) -> Result<Vec<Rule>> {
        let shape = |msg: String| Error::invalid(DiagCode::RuleShape, format!("rule `{}`: {msg}", self.name));
        let times: Vec<&PatternAtom> = self.lhs.iter().filter(|a| a.fact.is_time()).collect();
        if times.len() != 1 {
            return Err(shape("the precondition needs exactly one Time atom".into()));
        }
        let t = times[0].time.clone();
        let mut paired = vec![false; self.lhs.len()];
        let mut created = Vec::new();
        let mut time_seen = false;
        for r in &self.rhs {
            if r.fact.is_time() {
                if r.time != t || r.offset != 0 || time_seen {
                    return Err(shape(format!("the right-hand side must contain Time@{t} once")));
                }
                time_seen = true;
                continue;
            }
            if r.offset == 0 {
                let hit = self
                    .lhs
                    .iter()
                    .enumerate()
                    .position(|(i, a)| !paired[i] && !a.fact.is_time() && a.fact == r.fact && a.time == r.time);
                if let Some(i) = hit {
                    paired[i] = true;
                    continue;
                }
            }
            if r.time != t {
                return Err(shape(format!(
                    "created fact `{}` must be timestamped {t} or ({t}+d)",
                    r.fact
                )));
            }
            created.push(Created {
                fact: r.fact.clone(),
                offset: r.offset,
            });
        }
        if !time_seen {
            return Err(shape(format!("the right-hand side must contain Time@{t} once")));
        }
        let pre: Vec<(PatternAtom, bool)> = self
            .lhs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.fact.is_time())
            .map(|(i, a)| (a.clone(), !paired[i]))
            .collect();
        expand(&self.guard)
            .into_iter()
            .enumerate()
            .map(|(variant, guard)| {
                let mut r = Rule::new(&self.name, &t, pre.clone(), created.clone(), guard)?;
                r.variant = variant;
                Ok(r)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalDecl {
    pub name: String,
    pub patterns: Vec<PatternAtom>,
    pub constraints: Vec<SrcConstraint>,
}

impl CriticalDecl {
    pub fn build(&self) -> Result<Vec<CriticalPair>> {
        let tvars: Vec<&Sym> = self.patterns.iter().map(|a| &a.time).collect();
        for c in &self.constraints {
            for v in [&c.left, &c.right] {
                if !tvars.contains(&v) {
                    return Err(Error::invalid(
                        DiagCode::RuleShape,
                        format!("critical `{}`: variable `{v}` does not occur in a pattern", self.name),
                    ));
                }
            }
        }
        Ok(expand(&self.constraints)
            .into_iter()
            .map(|constraints| CriticalPair {
                name: sym(&self.name),
                patterns: self.patterns.clone(),
                constraints,
            })
            .collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    pub k: Option<usize>,
    pub dmax: Option<u64>,
    pub ticks: Option<u64>,
}

/// A parsed spec file, kept in source form so it can be printed back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub signature: Signature,
    pub params: Params,
    pub rules: Vec<RuleDecl>,
    pub init: Vec<TimestampedFact>,
    pub critical: Vec<CriticalDecl>,
}

/// A loaded system ready for verification.
#[derive(Debug, Clone)]
pub struct Model {
    pub system: System,
    pub init: Configuration,
    pub critical: CriticalSpec,
    pub ticks: Option<u64>,
}

impl SpecFile {
    pub fn new(signature: Signature) -> Self {
        SpecFile {
            signature,
            params: Params::default(),
            rules: Vec::new(),
            init: Vec::new(),
            critical: Vec::new(),
        }
    }

    pub fn load(&self) -> Result<Model> {
        let mut rules = Vec::new();
        for d in &self.rules {
            for a in &d.lhs {
                self.signature.check_fact(&a.fact)?;
            }
            for a in &d.rhs {
                self.signature.check_fact(&a.fact)?;
            }
            rules.extend(d.build()?);
        }
        let mut pairs = Vec::new();
        for d in &self.critical {
            for a in &d.patterns {
                self.signature.check_fact(&a.fact)?;
            }
            pairs.extend(d.build()?);
        }
        for f in &self.init {
            self.signature.check_fact(&f.fact)?;
        }
        let init = Configuration::new(self.init.clone())?;
        let init_k = init.facts().iter().map(|f| f.fact.size()).max().unwrap_or(1);
        let mut system = System::new(self.signature.clone(), rules, 1);
        system.declared_k = self.params.k.unwrap_or_else(|| init_k.max(system.max_pattern_size()));
        system.dmax_override = self.params.dmax;
        Ok(Model {
            system,
            init,
            critical: CriticalSpec::new(pairs),
            ticks: self.params.ticks,
        })
    }
}

fn write_atoms<T: fmt::Display>(out: &mut String, atoms: impl IntoIterator<Item = T>) {
    for (i, a) in atoms.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{a}");
    }
}

fn write_constraints(out: &mut String, cs: &[SrcConstraint]) {
    if !cs.is_empty() {
        out.push_str(" | ");
        write_atoms(out, cs);
    }
}

impl fmt::Display for RhsAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset == 0 {
            write!(f, "{}@{}", self.fact, self.time)
        } else {
            write!(f, "{}@({}+{})", self.fact, self.time, self.offset)
        }
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = &self.signature;
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        for s in sig.sorts.iter().filter(|s| !Signature::is_builtin(s)) {
            let _ = writeln!(out, "sort {s}");
        }
        for (p, args) in sig.predicates.iter().filter(|(p, _)| !Signature::is_builtin(p)) {
            if args.is_empty() {
                let _ = writeln!(out, "pred {p}");
            } else {
                let _ = writeln!(out, "pred {p} : {}", args.join(" "));
            }
        }
        for (g, (args, res)) in sig.functions.iter().filter(|(g, _)| !Signature::is_builtin(g)) {
            let _ = writeln!(out, "fn {g} : {} -> {res}", args.join(" "));
        }
        for (c, s) in sig.constants.iter().filter(|(c, _)| !Signature::is_builtin(c)) {
            let _ = writeln!(out, "const {c} : {s}");
        }
        for (v, s) in &sig.variables {
            let _ = writeln!(out, "var {v} : {s}");
        }
        if let Some(k) = self.params.k {
            let _ = writeln!(out, "param k = {k}");
        }
        if let Some(d) = self.params.dmax {
            let _ = writeln!(out, "param dmax = {d}");
        }
        if let Some(n) = self.params.ticks {
            let _ = writeln!(out, "param ticks = {n}");
        }
        for r in &self.rules {
            let _ = write!(out, "rule {:?}: ", r.name);
            write_atoms(&mut out, &r.lhs);
            write_constraints(&mut out, &r.guard);
            out.push_str(" -> ");
            write_atoms(&mut out, &r.rhs);
            out.push('\n');
        }
        out.push_str("init: ");
        write_atoms(&mut out, self.init.iter().map(|t| format!("{}@{}", t.fact, t.ts)));
        out.push('\n');
        for c in &self.critical {
            let _ = write!(out, "critical {:?}: {{ ", c.name);
            write_atoms(&mut out, &c.patterns);
            write_constraints(&mut out, &c.constraints);
            out.push_str(" }\n");
        }
        f.write_str(&out)
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn perr(code: DiagCode, line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        code,
        line,
        col,
        message: message.into(),
    }
}

const PUNCT: [&str; 14] = ["->", ">=", "(", ")", ",", "@", ":", "|", "+", "-", ">", "=", "{", "}"];

fn lex(src: &str, first_line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate().skip(first_line) {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (l, col) = (li + 1, i + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: l,
                    col,
                });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text
                    .parse()
                    .map_err(|_| perr(DiagCode::Syntax, l, col, format!("numeral `{text}` is too large")))?;
                out.push(Token { tok: Tok::Int(n), line: l, col });
                continue;
            }
            if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(perr(DiagCode::Syntax, l, col, "unterminated string"));
                }
                out.push(Token {
                    tok: Tok::Str(chars[start..i].iter().collect()),
                    line: l,
                    col,
                });
                i += 1;
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    out.push(Token {
                        tok: Tok::Punct(p),
                        line: l,
                        col,
                    });
                    i += p.len();
                }
                None => return Err(perr(DiagCode::Syntax, l, col, format!("unexpected character `{c}`"))),
            }
        }
    }
    let line = src.lines().count().max(1);
    out.push(Token {
        tok: Tok::Eof,
        line,
        col: 1,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    spec: SpecFile,
}

type Pos = (usize, usize);

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> Pos {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, expected: &str) -> Result<T> {
        let (l, c) = self.here();
        Err(perr(DiagCode::Syntax, l, c, format!("expected {expected}, found {}", self.peek())))
    }

    fn at(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.at(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.syntax(&format!("`{p}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.syntax("an identifier"),
        }
    }

    fn int(&mut self) -> Result<u64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.syntax("a number"),
        }
    }

    fn string(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.syntax("a quoted name"),
        }
    }

    /// Attach a position to a front-end error raised without one.
    fn locate<T>(&self, at: Pos, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Invalid { code, message } => perr(code, at.0, at.1, message),
            other => other,
        })
    }

    fn item(&mut self) -> Result<bool> {
        let at = self.here();
        let kw = match self.peek().clone() {
            Tok::Eof => return Ok(false),
            Tok::Ident(s) => s,
            _ => return self.syntax("a declaration"),
        };
        self.bump();
        match kw.as_str() {
            "sort" => {
                let name = self.ident()?;
                let r = self.spec.signature.add_sort(&name);
                self.locate(at, r)?;
            }
            "pred" => {
                let name = self.ident()?;
                let mut args = Vec::new();
                if self.eat(":") {
                    while let Tok::Ident(s) = self.peek().clone() {
                        if is_keyword(&s) {
                            break;
                        }
                        self.bump();
                        args.push(s);
                    }
                }
                let args: Vec<&str> = args.iter().map(String::as_str).collect();
                let r = self.spec.signature.add_predicate(&name, &args);
                self.locate(at, r)?;
            }
            "fn" => {
                let name = self.ident()?;
                self.expect(":")?;
                let mut args = Vec::new();
                while !self.at("->") {
                    args.push(self.ident()?);
                }
                self.expect("->")?;
                let res = self.ident()?;
                let args: Vec<&str> = args.iter().map(String::as_str).collect();
                let r = self.spec.signature.add_function(&name, &args, &res);
                self.locate(at, r)?;
            }
            "const" | "var" => {
                let name = self.ident()?;
                self.expect(":")?;
                let sort = self.ident()?;
                let r = if kw == "const" {
                    self.spec.signature.add_constant(&name, &sort)
                } else {
                    self.spec.signature.add_variable(&name, &sort)
                };
                self.locate(at, r)?;
            }
            "param" => {
                let pat = self.here();
                let name = self.ident()?;
                self.expect("=")?;
                let n = self.int()?;
                match name.as_str() {
                    "k" => self.spec.params.k = Some(n as usize),
                    "dmax" => self.spec.params.dmax = Some(n),
                    "ticks" => self.spec.params.ticks = Some(n),
                    _ => return Err(perr(DiagCode::Syntax, pat.0, pat.1, format!("unknown parameter `{name}`"))),
                }
            }
            "rule" => {
                let name = self.string()?;
                self.expect(":")?;
                let lhs = self.pattern_atoms()?;
                let guard = if self.eat("|") { self.constraints()? } else { Vec::new() };
                self.expect("->")?;
                let mut rhs = vec![self.rhs_atom()?];
                while self.eat(",") {
                    rhs.push(self.rhs_atom()?);
                }
                let decl = RuleDecl { name, lhs, guard, rhs };
                let r = decl.build();
                self.locate(at, r)?;
                self.spec.rules.push(decl);
            }
            "init" => {
                self.expect(":")?;
                let mut facts = Vec::new();
                loop {
                    let fat = self.here();
                    let f = self.fact()?;
                    if !f.is_ground() {
                        return Err(perr(DiagCode::NotGround, fat.0, fat.1, format!("initial fact `{f}` is not ground")));
                    }
                    self.expect("@")?;
                    let ts = self.int()?;
                    facts.push(TimestampedFact::new(f, ts));
                    if !self.eat(",") {
                        break;
                    }
                }
                let r = Configuration::new(facts.clone());
                self.locate(at, r)?;
                self.spec.init.extend(facts);
            }
            "critical" => {
                let name = self.string()?;
                self.expect(":")?;
                self.expect("{")?;
                let patterns = self.pattern_atoms()?;
                let constraints = if self.eat("|") { self.constraints()? } else { Vec::new() };
                self.expect("}")?;
                let decl = CriticalDecl {
                    name,
                    patterns,
                    constraints,
                };
                let r = decl.build();
                self.locate(at, r)?;
                self.spec.critical.push(decl);
            }
            other => return Err(perr(DiagCode::Syntax, at.0, at.1, format!("unknown declaration `{other}`"))),
        }
        Ok(true)
    }

    fn term(&mut self) -> Result<Term> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Nat(n))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat("(") {
                    let mut args = vec![self.term()?];
                    while self.eat(",") {
                        args.push(self.term()?);
                    }
                    self.expect(")")?;
                    let t = Term::app(sym(&name), args);
                    let r = self.spec.signature.sort_of(&t).map(|_| t);
                    return self.locate(at, r);
                }
                let sig = &self.spec.signature;
                if let Some(sort) = sig.variables.get(name.as_str()) {
                    Ok(Term::var(&name, sort))
                } else if sig.constants.contains_key(name.as_str()) {
                    Ok(Term::constant(&name))
                } else {
                    Err(perr(DiagCode::Undeclared, at.0, at.1, format!("unknown constant or variable `{name}`")))
                }
            }
            _ => self.syntax("a term"),
        }
    }

    fn fact(&mut self) -> Result<Fact> {
        let at = self.here();
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat("(") {
            args.push(self.term()?);
            while self.eat(",") {
                args.push(self.term()?);
            }
            self.expect(")")?;
        }
        let f = Fact::new(&name, args);
        let r = self.spec.signature.check_fact(&f);
        self.locate(at, r)?;
        Ok(f)
    }

    fn pattern_atoms(&mut self) -> Result<Vec<PatternAtom>> {
        let mut out = Vec::new();
        loop {
            let f = self.fact()?;
            self.expect("@")?;
            let t = self.ident()?;
            out.push(PatternAtom::new(f, &t));
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    fn rhs_atom(&mut self) -> Result<RhsAtom> {
        let f = self.fact()?;
        self.expect("@")?;
        if self.eat("(") {
            let t = self.ident()?;
            self.expect("+")?;
            let d = self.int()?;
            self.expect(")")?;
            Ok(RhsAtom::new(f, &t, d))
        } else {
            let t = self.ident()?;
            Ok(RhsAtom::new(f, &t, 0))
        }
    }

    fn constraints(&mut self) -> Result<Vec<SrcConstraint>> {
        let mut out = Vec::new();
        loop {
            let left = self.ident()?;
            let rel = if self.eat(">=") {
                SrcRel::Ge
            } else if self.eat(">") {
                SrcRel::Gt
            } else if self.eat("=") {
                SrcRel::Eq
            } else {
                return self.syntax("`>`, `>=` or `=`");
            };
            let right = self.ident()?;
            let offset = if self.eat("+") {
                self.int()? as i64
            } else if self.eat("-") {
                -(self.int()? as i64)
            } else {
                0
            };
            out.push(SrcConstraint::new(&left, rel, &right, offset));
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "sort" | "pred" | "fn" | "const" | "var" | "param" | "rule" | "init" | "critical")
}

/// Parse a spec file. Every rule and critical pair is checked for shape,
/// and the initial configuration for containing a single `Time` fact.
pub fn parse_spec(src: &str) -> Result<SpecFile> {
    let header = src
        .lines()
        .enumerate()
        .find(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
    let first = match header {
        Some((i, l)) if l.split('#').next().unwrap_or("").trim() == HEADER => i + 1,
        Some((i, _)) => {
            return Err(perr(DiagCode::Header, i + 1, 1, format!("expected header `{HEADER}`")));
        }
        None => return Err(perr(DiagCode::Header, 1, 1, format!("empty input, expected header `{HEADER}`"))),
    };
    let toks = lex(src, first)?;
    let mut p = Parser {
        toks,
        pos: 0,
        spec: SpecFile::new(Signature::new()),
    };
    while p.item()? {}
    if p.spec.init.is_empty() {
        let (l, c) = p.here();
        return Err(perr(DiagCode::SingleTime, l, c, "missing `init:`; single Time fact required"));
    }
    Ok(p.spec)
}

/// Reads ground facts and terms written in canonical text, e.g. the
/// configurations stored in a report.
pub struct TextReader {
    p: Parser,
}

impl TextReader {
    pub fn new(signature: &Signature) -> Self {
        TextReader {
            p: Parser {
                toks: Vec::new(),
                pos: 0,
                spec: SpecFile::new(signature.clone()),
            },
        }
    }

    fn load(&mut self, text: &str) -> Result<()> {
        self.p.toks = lex(text, 0)?;
        self.p.pos = 0;
        Ok(())
    }

    fn finish<T>(&mut self, v: T) -> Result<T> {
        match self.p.peek() {
            Tok::Eof => Ok(v),
            _ => self.p.syntax("end of input"),
        }
    }

    pub fn fact(&mut self, text: &str) -> Result<Fact> {
        self.load(text)?;
        let f = self.p.fact()?;
        self.finish(f)
    }

    pub fn term(&mut self, text: &str) -> Result<Term> {
        self.load(text)?;
        let t = self.p.term()?;
        self.finish(t)
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(src: &str) -> Result<Model> {
        parse_spec(src)?.load()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DRONE: &str = r#"tmsr-spec 1
# one drone on a line
sort Drone
pred Dr : Drone Nat Nat
const d1 : Drone
var I : Drone
var X : Nat
var E : Nat
rule "east": Time@T, Dr(I,X,s(E))@T1 | T >= T1 -> Time@T, Dr(I,s(X),E)@(T+1)
rule "wait": Time@T, Dr(I,X,E)@T | T = T -> Time@T, Dr(I,X,E)@T
init: Time@0, Dr(d1, 0, 2)@0
critical "empty": { Dr(I,X,0)@T }
"#;

    fn code_of(src: &str) -> (DiagCode, usize) {
        match parse_spec(src) {
            Err(Error::Parse { code, line, .. }) => (code, line),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_and_expands() {
        let spec = parse_spec(DRONE).unwrap();
        let m = spec.load().unwrap();
        assert_eq!(m.system.rules.len(), 3);
        assert_eq!(m.system.rules[1].variant, 1);
        assert!(m.system.rules[0].lhs[1].consumed);
        assert!(!m.system.rules[2].lhs[1].consumed);
        assert_eq!(m.init.to_string(), "{Dr(d1,0,2)@0, Time@0}");
        assert_eq!(m.critical.pairs.len(), 1);
    }

    #[test]
    fn printing_round_trips() {
        let spec = parse_spec(DRONE).unwrap();
        let printed = spec.to_string();
        let again = parse_spec(&printed).unwrap();
        assert_eq!(again, spec);
        assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn diagnostics_carry_codes_and_lines() {
        assert_eq!(code_of("tmsr 2\n").0, DiagCode::Header);
        assert_eq!(code_of("tmsr-spec 1\npred P : Foo\n"), (DiagCode::Undeclared, 2));
        assert_eq!(code_of("tmsr-spec 1\npred P\npred P\n"), (DiagCode::Redeclared, 3));
        assert_eq!(code_of("tmsr-spec 1\npred P : Nat\ninit: Time@0, P(1,2)@0\n"), (DiagCode::Arity, 3));
        assert_eq!(code_of("tmsr-spec 1\nsort A\nconst a : A\npred P : Nat\ninit: Time@0,\n P(a)@0\n"), (DiagCode::Sort, 6));
        assert_eq!(code_of("tmsr-spec 1\npred P\ninit: P@0\n").0, DiagCode::SingleTime);
        assert_eq!(code_of("tmsr-spec 1\npred P\ninit: P@0, Time@0, Time@1\n").0, DiagCode::SingleTime);
        assert_eq!(code_of("tmsr-spec 1\npred P : Nat\nvar X : Nat\ninit: Time@0, P(X)@0\n").0, DiagCode::NotGround);
        assert_eq!(code_of("tmsr-spec 1\npred P\nrule \"r\": P@T1 -> P@T1\n").0, DiagCode::RuleShape);
        assert_eq!(code_of("tmsr-spec 1\npred P\ninit: Time@0 $\n"), (DiagCode::Syntax, 3));
    }

    #[test]
    fn missing_init_is_reported() {
        let e = parse_spec("tmsr-spec 1\npred P\n").unwrap_err();
        assert!(e.to_string().contains("single Time fact required"));
    }

    #[test]
    fn created_at_other_variable_is_rejected() {
        let src = "tmsr-spec 1\npred P\npred Q\nrule \"r\": Time@T, P@T1 -> Time@T, Q@T1\ninit: Time@0\n";
        assert_eq!(code_of(src).0, DiagCode::RuleShape);
    }
}
