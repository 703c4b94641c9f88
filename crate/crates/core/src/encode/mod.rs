//! Generators for complete spec files: the drone scenario, the 3-SAT
//! reduction and the Turing-machine encoding.

pub mod drone;
pub mod sat;
pub mod tm;

pub use drone::{gen_drone, DroneParams, Strategy, Wind};
pub use sat::{gen_3sat, Cnf3};
pub use tm::{gen_tm, Dir, Instruction, TmSpec};

use crate::dsl::{RhsAtom, RuleDecl, SrcConstraint};
use crate::rules::PatternAtom;
use crate::term::{Fact, Term};

/// A zero-arity fact.
pub(crate) fn prop(name: &str) -> Fact {
    Fact::new(name, Vec::new())
}

pub(crate) fn nat(n: u64) -> Term {
    Term::Nat(n)
}

pub(crate) fn at(f: Fact, t: &str) -> PatternAtom {
    PatternAtom::new(f, t)
}

pub(crate) fn keep(f: &Fact, t: &str) -> RhsAtom {
    RhsAtom::new(f.clone(), t, 0)
}

pub(crate) fn make(f: Fact, offset: u64) -> RhsAtom {
    RhsAtom::new(f, "T", offset)
}

/// Rule with `Time@T` added on both sides.
pub(crate) fn rule(name: String, lhs: Vec<PatternAtom>, guard: Vec<SrcConstraint>, rhs: Vec<RhsAtom>) -> RuleDecl {
    let mut l = vec![at(Fact::time(), "T")];
    l.extend(lhs);
    let mut r = vec![keep(&Fact::time(), "T")];
    r.extend(rhs);
    RuleDecl {
        name,
        lhs: l,
        guard,
        rhs: r,
    }
}
