//! Delta-configurations: configurations up to shifting time, with gaps
//! between consecutive facts truncated above `dmax`.
//!
//! Transitions are computed on a representative configuration and
//! re-abstracted. Any representative gives the same successor set, which
//! the bisimulation tests check.

use std::fmt;

use num_bigint::BigUint;

use crate::error::Result;
use crate::rules::{enabled, is_critical, CriticalSpec, System};
use crate::term::{Configuration, Fact, Substitution, Sym, TimestampedFact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaGap {
    Finite(u64),
    Infinite,
}

impl fmt::Display for DeltaGap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaGap::Finite(n) => write!(f, "{n}"),
            DeltaGap::Infinite => f.write_str("inf"),
        }
    }
}

/// `[Q1, d12, Q2, ..., Qn]` for a fixed `dmax`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaConfig {
    facts: Vec<Fact>,
    gaps: Vec<DeltaGap>,
    dmax: u64,
}

impl DeltaConfig {
    /// Build from parts, checking the shape invariants.
    pub fn from_parts(facts: Vec<Fact>, gaps: Vec<DeltaGap>, dmax: u64) -> Option<Self> {
        let shape = !facts.is_empty() && gaps.len() + 1 == facts.len();
        let bounded = gaps.iter().all(|g| match g {
            DeltaGap::Finite(n) => *n <= dmax,
            DeltaGap::Infinite => true,
        });
        let one_time = facts.iter().filter(|f| f.is_time()).count() == 1;
        (shape && bounded && one_time && dmax >= 1).then_some(DeltaConfig { facts, gaps, dmax })
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn gaps(&self) -> &[DeltaGap] {
        &self.gaps
    }

    pub fn dmax(&self) -> u64 {
        self.dmax
    }

    /// Stable text form, used for hashing dumps and reports:
    /// `[F1, g1, F2, ..., Fn]` with `inf` for truncated gaps.
    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DeltaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, fact) in self.facts.iter().enumerate() {
            if i > 0 {
                write!(f, ", {}, ", self.gaps[i - 1])?;
            }
            write!(f, "{fact}")?;
        }
        f.write_str("]")
    }
}

/// The delta-configuration of `c` for `dmax`.
pub fn abstract_config(c: &Configuration, dmax: u64) -> DeltaConfig {
    let seq = c.facts();
    let facts = seq.iter().map(|f| f.fact.clone()).collect();
    let gaps = seq
        .windows(2)
        .map(|w| {
            let d = w[1].ts - w[0].ts;
            if d <= dmax {
                DeltaGap::Finite(d)
            } else {
                DeltaGap::Infinite
            }
        })
        .collect();
    DeltaConfig { facts, gaps, dmax }
}

/// A concrete member of the class: the first fact at time 0, truncated
/// gaps widened to `dmax + 1`.
pub fn representative(d: &DeltaConfig) -> Configuration {
    let mut ts = 0;
    let mut out = Vec::with_capacity(d.facts.len());
    for (i, f) in d.facts.iter().enumerate() {
        if i > 0 {
            ts += match d.gaps[i - 1] {
                DeltaGap::Finite(n) => n,
                DeltaGap::Infinite => d.dmax + 1,
            };
        }
        out.push(TimestampedFact::new(f.clone(), ts));
    }
    // Canonical order is preserved: timestamps are non-decreasing and tied
    // facts keep their relative order.
    Configuration::from_sorted_unchecked(out)
}

/// Transition label: the tick, or a rule instance identified by the
/// rule's index and its term bindings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Tick,
    Rule {
        index: usize,
        name: Sym,
        subst: Substitution,
    },
}

impl Label {
    pub fn name(&self) -> &str {
        match self {
            Label::Tick => "tick",
            Label::Rule { name, .. } => name,
        }
    }

    pub fn is_tick(&self) -> bool {
        matches!(self, Label::Tick)
    }
}

/// Successors of a concrete configuration under lazy time sampling, with
/// the full substitution of each rule instance.
pub fn lazy_successors(
    sys: &System,
    c: &Configuration,
) -> Result<Vec<(Label, Substitution, Configuration)>> {
    let en = enabled(sys, c);
    if en.is_empty() {
        let s = Substitution::new().with_time("T", c.time());
        return Ok(vec![(Label::Tick, s, c.tick())]);
    }
    en.into_iter()
        .map(|(index, s)| {
            let next = sys.fire(index, c, &s)?;
            let label = Label::Rule {
                index,
                name: sys.rules[index].name.clone(),
                subst: s.term_part(),
            };
            Ok((label, s, next))
        })
        .collect()
}

/// Successors of a delta-configuration under lazy time sampling.
pub fn delta_step(sys: &System, d: &DeltaConfig) -> Result<Vec<(Label, DeltaConfig)>> {
    let rep = representative(d);
    Ok(lazy_successors(sys, &rep)?
        .into_iter()
        .map(|(l, _, c)| (l, abstract_config(&c, d.dmax)))
        .collect())
}

pub fn delta_is_critical(cs: &CriticalSpec, d: &DeltaConfig) -> bool {
    is_critical(cs, &representative(d)).is_some()
}

/// `(dmax + 2)^(m-1) * J^m * (E + 2mk)^(mk)`: the bound on the number of
/// distinct delta-configurations with m facts of size at most k.
pub fn count_bound(m: u64, k: u64, dmax: u64, j: u64, e: u64) -> BigUint {
    let m32 = u32::try_from(m).expect("m too large");
    let mk = u32::try_from(m * k).expect("m*k too large");
    BigUint::from(dmax + 2).pow(m32.saturating_sub(1))
        * BigUint::from(j).pow(m32)
        * BigUint::from(e + 2 * m * k).pow(mk)
}
