//! Decision procedures for realizability and survivability under lazy
//! time sampling.
//!
//! Unbounded modes search the graph of delta-configurations reachable from
//! the initial configuration: realizability holds iff the compliant part
//! of that graph contains a reachable cycle (a lasso), survivability
//! additionally needs that no critical delta-configuration is reachable.
//! Bounded modes search concrete configurations up to the n-th tick.
//!
//! Two structural bounds are monitored during every search: fewer than m
//! instantaneous steps between consecutive ticks, and bounded traces no
//! longer than `(n + 2) * m + n`. Violations are counted in [`Stats`] and
//! in process-wide counters (see [`invariant_violations`]).

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::delta::{abstract_config, count_bound, lazy_successors, DeltaConfig, Label};
use crate::error::{Error, Result};
use crate::rules::{check_progressive, compute_dmax, is_critical, CriticalHit, CriticalSpec, System};
use crate::term::{Configuration, Substitution};

static INSTANT_RUN_VIOLATIONS: AtomicU64 = AtomicU64::new(0);
static DEPTH_VIOLATIONS: AtomicU64 = AtomicU64::new(0);
static SEARCHES: AtomicU64 = AtomicU64::new(0);

/// Process-wide totals of monitored invariant violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InvariantCounters {
    pub searches: u64,
    pub instant_run: u64,
    pub depth: u64,
}

pub fn invariant_violations() -> InvariantCounters {
    InvariantCounters {
        searches: SEARCHES.load(Ordering::Relaxed),
        instant_run: INSTANT_RUN_VIOLATIONS.load(Ordering::Relaxed),
        depth: DEPTH_VIOLATIONS.load(Ordering::Relaxed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_states: usize,
    pub timeout: Option<Duration>,
    pub workers: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: 5_000_000,
            timeout: None,
            workers: 1,
        }
    }
}

impl SearchBudget {
    pub fn states(max_states: usize) -> Self {
        SearchBudget {
            max_states,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub label: Label,
    pub subst: Substitution,
    pub config: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: Configuration,
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn empty(initial: Configuration) -> Self {
        Trace {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &Configuration {
        self.steps.last().map(|s| &s.config).unwrap_or(&self.initial)
    }

    pub fn ticks(&self) -> usize {
        self.steps.iter().filter(|s| s.label.is_tick()).count()
    }

    /// Configurations in order, the initial one first.
    pub fn configs(&self) -> impl Iterator<Item = &Configuration> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.config))
    }

    /// `self` followed by `other`, which must start where `self` ends.
    pub fn concat(&self, other: &Trace) -> Trace {
        debug_assert_eq!(self.last(), &other.initial);
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Trace {
            initial: self.initial.clone(),
            steps,
        }
    }
}

/// Finite witness of an infinite compliant trace: the cycle returns to
/// the delta-configuration it starts from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Trace,
    pub cycle: Trace,
    pub dmax: u64,
}

impl Lasso {
    pub fn full(&self) -> Trace {
        self.stem.concat(&self.cycle)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Trace(Trace),
    Lasso(Lasso),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Unknown => "unknown",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Holds => 0,
            Outcome::Fails => 1,
            Outcome::Unknown => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Realizability,
    Survivability,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Realizability => "realizability",
            Mode::Survivability => "survivability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stats {
    pub states: usize,
    pub peak_frontier: usize,
    pub elapsed_ms: u128,
    pub l_sigma: BigUint,
    pub dmax: u64,
    pub facts: usize,
    pub max_depth: usize,
    /// Longest run of instantaneous steps seen without a tick.
    pub max_instantaneous_run: usize,
    pub instant_run_violations: u64,
    pub depth_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub mode: Mode,
    pub ticks: Option<u64>,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub counterexample: Option<Trace>,
    /// Critical pair matched at the end of the counterexample.
    pub critical: Option<CriticalHit>,
    pub stats: Stats,
}

impl Verdict {
    fn new(mode: Mode, ticks: Option<u64>, outcome: Outcome, stats: Stats) -> Self {
        Verdict {
            mode,
            ticks,
            outcome,
            witness: None,
            counterexample: None,
            critical: None,
            stats,
        }
    }
}

struct Setup {
    m: usize,
    dmax: u64,
    started: Instant,
    stats: Stats,
}

fn setup(sys: &System, init: &Configuration, cs: &CriticalSpec) -> Result<Setup> {
    let report = check_progressive(sys);
    if let Some(bad) = report.failures().next() {
        return Err(Error::NotProgressive(format!(
            "rule `{}` (variant {}): {}",
            bad.rule, bad.variant, bad.detail
        )));
    }
    SEARCHES.fetch_add(1, Ordering::Relaxed);
    let m = init.len();
    let dmax = compute_dmax(sys, init, cs);
    let stats = Stats {
        l_sigma: count_bound(
            m as u64,
            sys.declared_k as u64,
            dmax,
            sys.signature.j() as u64,
            sys.signature.e() as u64,
        ),
        dmax,
        facts: m,
        ..Stats::default()
    };
    Ok(Setup {
        m,
        dmax,
        started: Instant::now(),
        stats,
    })
}

impl Setup {
    fn out_of_time(&self, budget: &SearchBudget) -> bool {
        budget
            .timeout
            .is_some_and(|t| self.started.elapsed() >= t)
    }

    fn finish(mut self, mut v: Verdict) -> Verdict {
        self.stats.elapsed_ms = self.started.elapsed().as_millis();
        INSTANT_RUN_VIOLATIONS.fetch_add(self.stats.instant_run_violations, Ordering::Relaxed);
        DEPTH_VIOLATIONS.fetch_add(self.stats.depth_violations, Ordering::Relaxed);
        v.stats = self.stats;
        v
    }

    /// Record an instantaneous-run length; m - 1 is the largest allowed.
    fn note_run(&mut self, run: usize) {
        self.stats.max_instantaneous_run = self.stats.max_instantaneous_run.max(run);
        if run >= self.m {
            self.stats.instant_run_violations += 1;
        }
    }

    fn note_depth(&mut self, depth: usize, bound: Option<usize>) {
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if bound.is_some_and(|b| depth > b) {
            self.stats.depth_violations += 1;
        }
    }
}

fn initial_failure(
    mode: Mode,
    ticks: Option<u64>,
    init: &Configuration,
    hit: CriticalHit,
    st: Setup,
) -> Verdict {
    let mut v = Verdict::new(mode, ticks, Outcome::Fails, Stats::default());
    v.counterexample = Some(Trace::empty(init.clone()));
    v.critical = Some(hit);
    st.finish(v)
}

fn pool(workers: usize) -> Option<rayon::ThreadPool> {
    (workers > 1)
        .then(|| rayon::ThreadPoolBuilder::new().num_threads(workers).build().ok())
        .flatten()
}

type Successors = Vec<(Label, Substitution, Configuration)>;

/// Successors for a batch of configurations, in parallel when a pool is
/// given. The result order matches the input order.
fn expand_all(sys: &System, batch: &[&Configuration], pool: Option<&rayon::ThreadPool>) -> Result<Vec<Successors>> {
    match pool {
        Some(p) => p.install(|| batch.par_iter().map(|c| lazy_successors(sys, c)).collect()),
        None => batch.iter().map(|c| lazy_successors(sys, c)).collect(),
    }
}

// ---------------------------------------------------------------------------
// Bounded modes: concrete configurations up to the n-th tick.

fn depth_bound(n: u64, m: usize) -> usize {
    (n as usize + 2) * m + n as usize
}

/// Search for a compliant lazy trace from `init` with exactly `n` ticks.
pub fn bounded_realizability(
    sys: &System,
    init: &Configuration,
    cs: &CriticalSpec,
    n: u64,
    budget: &SearchBudget,
) -> Result<Verdict> {
    if n == 0 {
        return Err(Error::Argument("tick bound must be at least 1".into()));
    }
    let mut st = setup(sys, init, cs)?;
    if let Some(hit) = is_critical(cs, init) {
        return Ok(initial_failure(Mode::Realizability, Some(n), init, hit, st));
    }
    let outcome = bounded_search(sys, init, cs, n, budget, &mut st)?;
    let mut v = Verdict::new(Mode::Realizability, Some(n), Outcome::Fails, Stats::default());
    match outcome {
        Search::Found(trace) => {
            v.outcome = Outcome::Holds;
            v.witness = Some(Witness::Trace(trace));
        }
        Search::Exhausted => {}
        Search::Budget => v.outcome = Outcome::Unknown,
    }
    Ok(st.finish(v))
}

enum Search<T> {
    Found(T),
    Exhausted,
    Budget,
}

struct Frame {
    config: Configuration,
    label: Option<(Label, Substitution)>,
    succ: Option<Successors>,
    next: usize,
    run: usize,
}

fn bounded_search(
    sys: &System,
    init: &Configuration,
    cs: &CriticalSpec,
    n: u64,
    budget: &SearchBudget,
    st: &mut Setup,
) -> Result<Search<Trace>> {
    let t0 = init.time();
    let bound = depth_bound(n, st.m);
    // Configurations from which no compliant completion exists. The
    // bounded graph is acyclic (time or the count of present facts
    // strictly progresses), so this memo is exact.
    let mut dead: std::collections::HashSet<Configuration> = Default::default();
    let mut stack = vec![Frame {
        config: init.clone(),
        label: None,
        succ: None,
        next: 0,
        run: 0,
    }];
    let mut iterations = 0u64;
    while let Some(top) = stack.last_mut() {
        iterations += 1;
        if iterations.is_multiple_of(1024) && st.out_of_time(budget) {
            return Ok(Search::Budget);
        }
        if top.config.time() - t0 == n {
            let steps = stack
                .iter()
                .skip(1)
                .map(|f| {
                    let (label, subst) = f.label.clone().expect("non-root frame has a label");
                    Step {
                        label,
                        subst,
                        config: f.config.clone(),
                    }
                })
                .collect();
            st.stats.states = dead.len() + stack.len();
            return Ok(Search::Found(Trace {
                initial: init.clone(),
                steps,
            }));
        }
        if top.succ.is_none() {
            top.succ = Some(lazy_successors(sys, &top.config)?);
        }
        let succ = top.succ.as_ref().unwrap();
        if top.next >= succ.len() {
            let f = stack.pop().unwrap();
            dead.insert(f.config);
            continue;
        }
        let (label, subst, next) = succ[top.next].clone();
        top.next += 1;
        let run = if label.is_tick() { 0 } else { top.run + 1 };
        if dead.contains(&next) {
            continue;
        }
        if is_critical(cs, &next).is_some() {
            dead.insert(next);
            continue;
        }
        let depth = stack.len();
        st.note_run(run);
        st.note_depth(depth, Some(bound));
        if dead.len() + stack.len() >= budget.max_states {
            st.stats.states = dead.len() + stack.len();
            return Ok(Search::Budget);
        }
        stack.push(Frame {
            config: next,
            label: Some((label, subst)),
            succ: None,
            next: 0,
            run,
        });
        st.stats.peak_frontier = st.stats.peak_frontier.max(stack.len());
    }
    st.stats.states = dead.len();
    Ok(Search::Exhausted)
}

/// Bounded realizability plus: no lazy trace with at most `n` ticks
/// reaches a critical configuration. On failure the counterexample is a
/// shortest critical-reaching trace.
pub fn bounded_survivability(
    sys: &System,
    init: &Configuration,
    cs: &CriticalSpec,
    n: u64,
    budget: &SearchBudget,
) -> Result<Verdict> {
    if n == 0 {
        return Err(Error::Argument("tick bound must be at least 1".into()));
    }
    let mut st = setup(sys, init, cs)?;
    if let Some(hit) = is_critical(cs, init) {
        return Ok(initial_failure(Mode::Survivability, Some(n), init, hit, st));
    }
    let t0 = init.time();
    let bound = depth_bound(n, st.m);
    let pool = pool(budget.workers);

    struct Node {
        config: Configuration,
        parent: Option<(usize, Label, Substitution)>,
        run: usize,
        depth: usize,
    }
    let mut nodes = vec![Node {
        config: init.clone(),
        parent: None,
        run: 0,
        depth: 0,
    }];
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    index.insert(init.clone(), 0);
    let mut frontier = vec![0usize];
    let mut found: Option<(usize, CriticalHit)> = None;
    let mut exhausted_budget = false;

    'levels: while !frontier.is_empty() {
        st.stats.peak_frontier = st.stats.peak_frontier.max(frontier.len());
        if st.out_of_time(budget) {
            exhausted_budget = true;
            break;
        }
        let expandable: Vec<usize> = frontier
            .iter()
            .copied()
            .filter(|&i| nodes[i].config.time() - t0 < n)
            .collect();
        let batch: Vec<&Configuration> = expandable.iter().map(|&i| &nodes[i].config).collect();
        let expanded = expand_all(sys, &batch, pool.as_ref())?;
        let mut next_frontier = Vec::new();
        for (&from, succ) in expandable.iter().zip(expanded) {
            for (label, subst, next) in succ {
                if index.contains_key(&next) {
                    continue;
                }
                let run = if label.is_tick() { 0 } else { nodes[from].run + 1 };
                let depth = nodes[from].depth + 1;
                st.note_run(run);
                st.note_depth(depth, Some(bound));
                let id = nodes.len();
                index.insert(next.clone(), id);
                let hit = is_critical(cs, &next);
                nodes.push(Node {
                    config: next,
                    parent: Some((from, label, subst)),
                    run,
                    depth,
                });
                if let Some(hit) = hit {
                    found = Some((id, hit));
                    break 'levels;
                }
                if nodes.len() >= budget.max_states {
                    exhausted_budget = true;
                    break 'levels;
                }
                next_frontier.push(id);
            }
        }
        frontier = next_frontier;
    }
    st.stats.states = nodes.len();

    if let Some((id, hit)) = found {
        let mut steps = Vec::new();
        let mut cur = id;
        while let Some((p, label, subst)) = nodes[cur].parent.clone() {
            steps.push(Step {
                label,
                subst,
                config: nodes[cur].config.clone(),
            });
            cur = p;
        }
        steps.reverse();
        let mut v = Verdict::new(Mode::Survivability, Some(n), Outcome::Fails, Stats::default());
        v.counterexample = Some(Trace {
            initial: init.clone(),
            steps,
        });
        v.critical = Some(hit);
        return Ok(st.finish(v));
    }
    if exhausted_budget {
        let v = Verdict::new(Mode::Survivability, Some(n), Outcome::Unknown, Stats::default());
        return Ok(st.finish(v));
    }
    drop(nodes);
    drop(index);
    let states = st.stats.states;
    let found = bounded_search(sys, init, cs, n, budget, &mut st)?;
    st.stats.states += states;
    let mut v = Verdict::new(Mode::Survivability, Some(n), Outcome::Fails, Stats::default());
    match found {
        Search::Found(t) => {
            v.outcome = Outcome::Holds;
            v.witness = Some(Witness::Trace(t));
        }
        Search::Exhausted => {}
        Search::Budget => v.outcome = Outcome::Unknown,
    }
    Ok(st.finish(v))
}

// ---------------------------------------------------------------------------
// Unbounded modes: the delta-configuration graph.

/// Rebuild a concrete trace following a path of abstract edges. Each edge
/// is matched by label (tick, or rule index and term bindings) and by the
/// abstraction of the successor.
fn concretize(
    sys: &System,
    start: &Configuration,
    path: &[(Label, DeltaConfig)],
    dmax: u64,
) -> Result<Trace> {
    let mut cur = start.clone();
    let mut steps = Vec::with_capacity(path.len());
    for (label, target) in path {
        let succ = lazy_successors(sys, &cur)?;
        let pick = succ.into_iter().find(|(l, _, c)| {
            let same = match (l, label) {
                (Label::Tick, Label::Tick) => true,
                (Label::Rule { index: a, subst: sa, .. }, Label::Rule { index: b, subst: sb, .. }) => {
                    a == b && sa == sb
                }
                _ => false,
            };
            same && abstract_config(c, dmax) == *target
        });
        let (l, s, c) = pick.ok_or_else(|| {
            Error::Internal(format!("abstract edge `{}` has no concrete counterpart", label.name()))
        })?;
        steps.push(Step {
            label: l,
            subst: s,
            config: c.clone(),
        });
        cur = c;
    }
    Ok(Trace {
        initial: start.clone(),
        steps,
    })
}

struct DeltaGraph {
    nodes: Vec<DeltaConfig>,
    index: HashMap<DeltaConfig, usize>,
    critical: Vec<bool>,
}

impl DeltaGraph {
    fn new() -> Self {
        DeltaGraph {
            nodes: Vec::new(),
            index: HashMap::new(),
            critical: Vec::new(),
        }
    }

    fn intern(&mut self, d: DeltaConfig, cs: &CriticalSpec) -> (usize, bool) {
        if let Some(&i) = self.index.get(&d) {
            return (i, false);
        }
        let i = self.nodes.len();
        let crit = crate::delta::delta_is_critical(cs, &d);
        self.index.insert(d.clone(), i);
        self.nodes.push(d);
        self.critical.push(crit);
        (i, true)
    }

    fn successors(&self, sys: &System, id: usize) -> Result<Vec<(Label, DeltaConfig)>> {
        crate::delta::delta_step(sys, &self.nodes[id])
    }
}

/// Does some compliant lazy trace from `init` run forever?
pub fn realizability(
    sys: &System,
    init: &Configuration,
    cs: &CriticalSpec,
    budget: &SearchBudget,
) -> Result<Verdict> {
    let mut st = setup(sys, init, cs)?;
    if let Some(hit) = is_critical(cs, init) {
        return Ok(initial_failure(Mode::Realizability, None, init, hit, st));
    }
    let found = find_lasso(sys, init, cs, budget, &mut st)?;
    let mut v = Verdict::new(Mode::Realizability, None, Outcome::Fails, Stats::default());
    match found {
        Search::Found(lasso) => {
            v.outcome = Outcome::Holds;
            v.witness = Some(Witness::Lasso(lasso));
        }
        Search::Exhausted => {}
        Search::Budget => v.outcome = Outcome::Unknown,
    }
    Ok(st.finish(v))
}

/// Depth-first search with three-colour marking over the compliant
/// delta-graph; a grey successor closes a cycle.
fn find_lasso(
    sys: &System,
    init: &Configuration,
    cs: &CriticalSpec,
    budget: &SearchBudget,
    st: &mut Setup,
) -> Result<Search<Lasso>> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;

    let dmax = st.dmax;
    let mut g = DeltaGraph::new();
    let (root, _) = g.intern(abstract_config(init, dmax), cs);
    let mut color = vec![WHITE];

    struct DFrame {
        id: usize,
        // edge that led here
        via: Option<Label>,
        succ: Vec<(Label, usize)>,
        next: usize,
        run: usize,
    }

    let expand = |g: &mut DeltaGraph, color: &mut Vec<u8>, id: usize| -> Result<Vec<(Label, usize)>> {
        let succ = g.successors(sys, id)?;
        Ok(succ
            .into_iter()
            .map(|(l, d)| {
                let (i, fresh) = g.intern(d, cs);
                if fresh {
                    color.push(WHITE);
                }
                (l, i)
            })
            .collect())
    };

    color[root] = GREY;
    let first = expand(&mut g, &mut color, root)?;
    let mut stack = vec![DFrame {
        id: root,
        via: None,
        succ: first,
        next: 0,
        run: 0,
    }];
    let mut iterations = 0u64;
    while let Some(top) = stack.last_mut() {
        iterations += 1;
        if iterations.is_multiple_of(1024) && st.out_of_time(budget) {
            st.stats.states = g.nodes.len();
            return Ok(Search::Budget);
        }
        if top.next >= top.succ.len() {
            color[top.id] = BLACK;
            stack.pop();
            continue;
        }
        let (label, target) = top.succ[top.next].clone();
        top.next += 1;
        let run = if label.is_tick() { 0 } else { top.run + 1 };
        if g.critical[target] {
            continue;
        }
        match color[target] {
            BLACK => continue,
            GREY => {
                let pos = stack.iter().position(|f| f.id == target).expect("grey node on stack");
                let mut cycle_edges: Vec<(Label, DeltaConfig)> = stack[pos + 1..]
                    .iter()
                    .map(|f| (f.via.clone().unwrap(), g.nodes[f.id].clone()))
                    .collect();
                cycle_edges.push((label, g.nodes[target].clone()));
                st.note_run(run);
                if !cycle_edges.iter().any(|(l, _)| l.is_tick()) {
                    // A tick-free cycle contradicts the bound on instantaneous runs.
                    st.stats.instant_run_violations += 1;
                }
                let stem_edges: Vec<(Label, DeltaConfig)> = stack[1..=pos]
                    .iter()
                    .map(|f| (f.via.clone().unwrap(), g.nodes[f.id].clone()))
                    .collect();
                st.stats.states = g.nodes.len();
                let stem = concretize(sys, init, &stem_edges, dmax)?;
                let cycle = concretize(sys, stem.last(), &cycle_edges, dmax)?;
                return Ok(Search::Found(Lasso { stem, cycle, dmax }));
            }
            _ => {}
        }
        st.note_run(run);
        st.note_depth(stack.len(), None);
        color[target] = GREY;
        let succ = expand(&mut g, &mut color, target)?;
        if g.nodes.len() >= budget.max_states {
            st.stats.states = g.nodes.len();
            return Ok(Search::Budget);
        }
        stack.push(DFrame {
            id: target,
            via: Some(label),
            succ,
            next: 0,
            run,
        });
        st.stats.peak_frontier = st.stats.peak_frontier.max(stack.len());
    }
    st.stats.states = g.nodes.len();
    Ok(Search::Exhausted)
}

/// Realizability plus: no critical delta-configuration is reachable.
pub fn survivability(
    sys: &System,
    init: &Configuration,
    cs: &CriticalSpec,
    budget: &SearchBudget,
) -> Result<Verdict> {
    let mut st = setup(sys, init, cs)?;
    if let Some(hit) = is_critical(cs, init) {
        return Ok(initial_failure(Mode::Survivability, None, init, hit, st));
    }
    let dmax = st.dmax;
    let pool = pool(budget.workers);
    let mut g = DeltaGraph::new();
    let (root, _) = g.intern(abstract_config(init, dmax), cs);
    let mut parent: Vec<Option<(usize, Label)>> = vec![None];
    let mut run = vec![0usize];
    let mut depth = vec![0usize];
    let mut frontier = vec![root];
    let mut found = None;
    let mut out_of_budget = false;

    'levels: while !frontier.is_empty() {
        st.stats.peak_frontier = st.stats.peak_frontier.max(frontier.len());
        if st.out_of_time(budget) {
            out_of_budget = true;
            break;
        }
        let expanded: Vec<Vec<(Label, DeltaConfig)>> = {
            let nodes = &g.nodes;
            let step = |&id: &usize| crate::delta::delta_step(sys, &nodes[id]);
            match pool.as_ref() {
                Some(p) => p.install(|| frontier.par_iter().map(step).collect::<Result<_>>())?,
                None => frontier.iter().map(step).collect::<Result<_>>()?,
            }
        };
        let mut next_frontier = Vec::new();
        for (&from, succ) in frontier.iter().zip(expanded) {
            for (label, d) in succ {
                let (id, fresh) = g.intern(d, cs);
                if !fresh {
                    continue;
                }
                let r = if label.is_tick() { 0 } else { run[from] + 1 };
                parent.push(Some((from, label)));
                run.push(r);
                depth.push(depth[from] + 1);
                st.note_run(r);
                st.note_depth(depth[from] + 1, None);
                if g.critical[id] {
                    found = Some(id);
                    break 'levels;
                }
                if g.nodes.len() >= budget.max_states {
                    out_of_budget = true;
                    break 'levels;
                }
                next_frontier.push(id);
            }
        }
        frontier = next_frontier;
    }
    st.stats.states = g.nodes.len();

    if let Some(id) = found {
        let mut edges = Vec::new();
        let mut cur = id;
        while let Some((p, label)) = parent[cur].clone() {
            edges.push((label, g.nodes[cur].clone()));
            cur = p;
        }
        edges.reverse();
        let trace = concretize(sys, init, &edges, dmax)?;
        let hit = is_critical(cs, trace.last())
            .ok_or_else(|| Error::Internal("abstract critical node has a compliant concrete trace".into()))?;
        let mut v = Verdict::new(Mode::Survivability, None, Outcome::Fails, Stats::default());
        v.counterexample = Some(trace);
        v.critical = Some(hit);
        return Ok(st.finish(v));
    }
    if out_of_budget {
        let v = Verdict::new(Mode::Survivability, None, Outcome::Unknown, Stats::default());
        return Ok(st.finish(v));
    }
    let explored = g.nodes.len();
    drop(g);
    let found = find_lasso(sys, init, cs, budget, &mut st)?;
    st.stats.states = st.stats.states.max(explored);
    let mut v = Verdict::new(Mode::Survivability, None, Outcome::Fails, Stats::default());
    match found {
        Search::Found(lasso) => {
            v.outcome = Outcome::Holds;
            v.witness = Some(Witness::Lasso(lasso));
        }
        Search::Exhausted => {}
        Search::Budget => v.outcome = Outcome::Unknown,
    }
    Ok(st.finish(v))
}
