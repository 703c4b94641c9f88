//! Verification of timed multiset rewriting systems.
//!
//! A system is a set of instantaneous rewrite rules over timestamped facts
//! plus an implicit tick that advances the global `Time` fact. The crate
//! parses systems from a small text format, classifies them as balanced and
//! progressive, and decides realizability and survivability under lazy time
//! sampling, either unbounded (over delta-configurations) or for a fixed
//! number of ticks (over concrete configurations).

pub mod delta;
pub mod dsl;
pub mod encode;
pub mod error;
pub mod report;
pub mod rules;
pub mod term;
pub mod validate;
pub mod verify;

pub use delta::{abstract_config, count_bound, delta_is_critical, delta_step, representative, DeltaConfig, DeltaGap};
pub use dsl::{parse_spec, Model, SpecFile};
pub use error::{DiagCode, Error, Result};
pub use rules::{
    apply_rule, check_balanced, check_progressive, compute_dmax, enabled, eval_constraint, is_critical,
    match_rule, must_tick, CriticalPair, CriticalSpec, Relation, Rule, System, TimeConstraint,
};
pub use term::{
    apply_subst, canonical_sequence, fact_size, Configuration, Fact, Signature, Substitution, Term,
    TimestampedFact,
};
pub use validate::{validate_counterexample, validate_lasso, validate_trace, TraceCheck};
pub use verify::{
    bounded_realizability, bounded_survivability, realizability, survivability, Lasso, Outcome,
    SearchBudget, Stats, Step, Trace, Verdict, Witness,
};
