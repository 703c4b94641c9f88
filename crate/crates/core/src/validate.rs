//! Independent trace checker.
//!
//! Replays each step from its recorded substitution instead of searching
//! for matches, so it shares no matching code with the verifiers beyond
//! the enabledness test needed for lazy ticks.

use crate::delta::{abstract_config, Label};
use crate::rules::{enabled, eval_constraint, is_critical, CriticalSpec, Rule, System};
use crate::term::{apply_subst, Configuration, Substitution, TimestampedFact};
use crate::verify::{Lasso, Trace};

/// Result of checking a trace. Positions count configurations: 0 is the
/// initial configuration and `i + 1` is the configuration after step `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCheck {
    pub ok: bool,
    pub failing_step: Option<usize>,
    pub message: String,
}

impl TraceCheck {
    fn pass() -> Self {
        TraceCheck {
            ok: true,
            failing_step: None,
            message: "ok".into(),
        }
    }

    fn fail(at: usize, message: impl Into<String>) -> Self {
        TraceCheck {
            ok: false,
            failing_step: Some(at),
            message: message.into(),
        }
    }
}

fn replay_rule(rule: &Rule, c: &Configuration, s: &Substitution) -> Result<Configuration, String> {
    let now = s.time_of(&rule.time_var).map_err(|e| e.to_string())?;
    let mut facts: Vec<TimestampedFact> = c.facts().to_vec();
    for a in &rule.lhs {
        let f = apply_subst(&a.atom.fact, s).map_err(|e| e.to_string())?;
        let ts = s.time_of(&a.atom.time).map_err(|e| e.to_string())?;
        let inst = TimestampedFact::new(f, ts);
        let pos = facts
            .iter()
            .position(|g| *g == inst)
            .ok_or_else(|| format!("`{}@{}` is not present", inst.fact, inst.ts))?;
        if a.consumed {
            if ts > now {
                return Err(format!("consumed `{}@{ts}` lies in the future", inst.fact));
            }
            facts.remove(pos);
        } else {
            // mark as used so two atoms cannot share one fact
            facts.remove(pos);
            facts.push(TimestampedFact::new(inst.fact.clone(), u64::MAX));
        }
    }
    for g in &rule.guard {
        if !eval_constraint(g, s).map_err(|e| e.to_string())? {
            return Err(format!("guard `{g}` is false"));
        }
    }
    let mut next: Vec<TimestampedFact> = c.facts().to_vec();
    for a in rule.lhs.iter().filter(|a| a.consumed) {
        let inst = TimestampedFact::new(
            apply_subst(&a.atom.fact, s).map_err(|e| e.to_string())?,
            s.time_of(&a.atom.time).map_err(|e| e.to_string())?,
        );
        let pos = next.iter().position(|g| *g == inst).expect("checked above");
        next.remove(pos);
    }
    for q in &rule.created {
        let f = apply_subst(&q.fact, s).map_err(|e| e.to_string())?;
        next.push(TimestampedFact::new(f, now + q.offset));
    }
    Configuration::new(next).map_err(|e| e.to_string())
}

/// Check that `t` is a compliant lazy trace of `sys`, optionally with
/// exactly `ticks` ticks (and then ending with the last tick).
pub fn validate_trace(sys: &System, cs: &CriticalSpec, t: &Trace, ticks: Option<usize>) -> TraceCheck {
    if let Some(hit) = is_critical(cs, &t.initial) {
        return TraceCheck::fail(0, format!("initial configuration is critical (`{}`)", hit.name));
    }
    let mut cur = t.initial.clone();
    for (i, step) in t.steps.iter().enumerate() {
        let at = i + 1;
        let en = enabled(sys, &cur);
        let next = match &step.label {
            Label::Tick => {
                if !en.is_empty() {
                    return TraceCheck::fail(at, format!("tick while rule `{}` is enabled", sys.rules[en[0].0].name));
                }
                cur.tick()
            }
            Label::Rule { index, name, .. } => {
                let Some(rule) = sys.rules.get(*index) else {
                    return TraceCheck::fail(at, format!("no rule with index {index}"));
                };
                if rule.name != *name {
                    return TraceCheck::fail(at, format!("rule {index} is `{}`, not `{name}`", rule.name));
                }
                match replay_rule(rule, &cur, &step.subst) {
                    Ok(c) => c,
                    Err(e) => return TraceCheck::fail(at, format!("rule `{name}`: {e}")),
                }
            }
        };
        if next != step.config {
            return TraceCheck::fail(at, format!("recorded configuration {} differs from {}", step.config, next));
        }
        if let Some(hit) = is_critical(cs, &next) {
            return TraceCheck::fail(at, format!("configuration is critical (`{}`)", hit.name));
        }
        cur = next;
    }
    if let Some(n) = ticks {
        let seen = t.ticks();
        if seen != n {
            return TraceCheck::fail(t.len(), format!("trace has {seen} ticks, expected {n}"));
        }
        if n > 0 && !t.steps.last().is_some_and(|s| s.label.is_tick()) {
            return TraceCheck::fail(t.len(), "trace does not end with its last tick");
        }
    }
    TraceCheck::pass()
}

/// Check a lasso: stem and cycle form a compliant trace, the cycle
/// contains a tick, and it returns to the delta-configuration it left.
pub fn validate_lasso(sys: &System, cs: &CriticalSpec, l: &Lasso) -> TraceCheck {
    if l.stem.last() != &l.cycle.initial {
        return TraceCheck::fail(l.stem.len(), "cycle does not start where the stem ends");
    }
    if l.cycle.is_empty() {
        return TraceCheck::fail(l.stem.len(), "empty cycle");
    }
    if !l.cycle.steps.iter().any(|s| s.label.is_tick()) {
        return TraceCheck::fail(l.stem.len(), "cycle contains no tick");
    }
    let full = l.full();
    let check = validate_trace(sys, cs, &full, None);
    if !check.ok {
        return check;
    }
    let a = abstract_config(&l.cycle.initial, l.dmax);
    let b = abstract_config(l.cycle.last(), l.dmax);
    if a != b {
        return TraceCheck::fail(full.len(), format!("cycle ends in {b}, not {a}"));
    }
    TraceCheck::pass()
}

/// Check a counterexample: a lazy trace whose configurations are all
/// non-critical except the last, which matches critical pair `index`
/// when given.
pub fn validate_counterexample(sys: &System, cs: &CriticalSpec, t: &Trace, index: Option<usize>) -> TraceCheck {
    let check = validate_trace(sys, &CriticalSpec::default(), t, None);
    if !check.ok {
        return check;
    }
    let n = t.len();
    for (i, c) in t.configs().enumerate().take(n) {
        if let Some(hit) = is_critical(cs, c) {
            return TraceCheck::fail(i, format!("configuration is critical (`{}`) before the end", hit.name));
        }
    }
    match is_critical(cs, t.last()) {
        None => TraceCheck::fail(n, "final configuration is not critical"),
        Some(hit) if index.is_some_and(|i| i != hit.index) => {
            let i = index.unwrap();
            let matched = cs.pairs.get(i).map(|p| {
                is_critical(&CriticalSpec::new(vec![p.clone()]), t.last()).is_some()
            });
            if matched == Some(true) {
                TraceCheck::pass()
            } else {
                TraceCheck::fail(n, format!("final configuration does not match critical pair {i}"))
            }
        }
        Some(_) => TraceCheck::pass(),
    }
}
