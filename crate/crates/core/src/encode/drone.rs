//! Drones photographing points on a grid.
//!
//! `Dr(d, x, y, e)@t`: drone `d` at `(x, y)` with energy `e`, free to act
//! from time `t`. `P(p, x, y)@t`: the last picture of point `p` was taken
//! at time `t`. Each drone acts at most once per time unit since every
//! action recreates its fact at `T+1`.
//!
//! The greedy strategy is compiled into ground rules, one per drone
//! state and vector of picture ages `T - T_i` in `0..=M`:
//!
//! 1. on a point whose age is at least `max(1, M - 1)`, with more energy
//!    than the way home needs plus two, take a picture;
//! 2. otherwise, at the base with less than `e_max`, charge;
//! 3. otherwise head for the base if energy is at most the distance plus
//!    two, else for the stalest point (lowest index on ties), moving along
//!    x first. A drone already at its target idles (no rule).
//!
//! Critical: a drone with no energy, a picture older than `M`, and with a
//! station, a drone docked for longer than the station limit.

use std::fmt;

use crate::dsl::{CriticalDecl, RhsAtom, SpecFile, SrcConstraint, SrcRel};
use crate::error::{Error, Result};
use crate::rules::PatternAtom;
use crate::term::{Fact, Signature, Term, TimestampedFact};

use super::{at, keep, make, nat, prop, rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heading {
    North,
    South,
    East,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::South, Heading::East, Heading::West];

    fn delta(self) -> (i64, i64) {
        match self {
            Heading::North => (0, 1),
            Heading::South => (0, -1),
            Heading::East => (1, 0),
            Heading::West => (-1, 0),
        }
    }

    pub fn parse(s: &str) -> Option<Heading> {
        match s {
            "N" | "north" => Some(Heading::North),
            "S" | "south" => Some(Heading::South),
            "E" | "east" => Some(Heading::East),
            "W" | "west" => Some(Heading::West),
            _ => None,
        }
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heading::North => "north",
            Heading::South => "south",
            Heading::East => "east",
            Heading::West => "west",
        })
    }
}

/// Wind at `(x, y)` pushes any drone one cell towards `dir` for free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wind {
    pub x: u64,
    pub y: u64,
    pub dir: Heading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Greedy,
    /// Every move, charge and click allowed whenever possible, without
    /// time constraints.
    Unguarded,
}

/// Scenario parameters. Coordinates range over `0..x_max` and `0..y_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroneParams {
    pub drones: usize,
    pub points: Vec<(u64, u64)>,
    pub x_max: u64,
    pub y_max: u64,
    pub m: u64,
    pub e_max: u64,
    pub base: (u64, u64),
    pub wind: Vec<Wind>,
    /// Single-slot charging station with the longest allowed stay.
    pub station: Option<u64>,
    pub strategy: Strategy,
    pub rule_ceiling: usize,
}

impl DroneParams {
    pub fn new(x_max: u64, y_max: u64, base: (u64, u64), points: Vec<(u64, u64)>, m: u64, e_max: u64) -> Self {
        DroneParams {
            drones: 1,
            points,
            x_max,
            y_max,
            m,
            e_max,
            base,
            wind: Vec::new(),
            station: None,
            strategy: Strategy::Greedy,
            rule_ceiling: 200_000,
        }
    }

    fn inside(&self, (x, y): (u64, u64)) -> bool {
        x < self.x_max && y < self.y_max
    }

    pub fn validate(&self) -> Result<()> {
        let arg = |m: &str| Err(Error::Argument(m.into()));
        if self.x_max == 0 || self.y_max == 0 {
            return arg("grid must be non-empty");
        }
        if self.drones == 0 {
            return arg("at least one drone is required");
        }
        if self.m == 0 {
            return arg("M must be at least 1");
        }
        if self.e_max == 0 {
            return arg("e_max must be at least 1");
        }
        if !self.inside(self.base) {
            return arg("base lies outside the grid");
        }
        if self.points.iter().any(|&p| !self.inside(p)) {
            return arg("a point lies outside the grid");
        }
        if self.wind.iter().any(|w| !self.inside((w.x, w.y))) {
            return arg("a wind cell lies outside the grid");
        }
        Ok(())
    }

    fn step(&self, (x, y): (u64, u64), h: Heading) -> Option<(u64, u64)> {
        let (dx, dy) = h.delta();
        let nx = x.checked_add_signed(dx)?;
        let ny = y.checked_add_signed(dy)?;
        self.inside((nx, ny)).then_some((nx, ny))
    }

    fn dist_to_base(&self, (x, y): (u64, u64)) -> u64 {
        x.abs_diff(self.base.0) + y.abs_diff(self.base.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Click(usize),
    Charge,
    Move(Heading),
    Idle,
}

/// The greedy choice for a drone at `pos` with energy `e` (at least 1)
/// given the ages of all pictures.
pub fn decide(p: &DroneParams, pos: (u64, u64), e: u64, ages: &[u64]) -> Action {
    let dist = p.dist_to_base(pos);
    let threshold = p.m.saturating_sub(1).max(1);
    if e > dist + 2 {
        if let Some(i) = (0..p.points.len()).find(|&i| p.points[i] == pos && ages[i] >= threshold) {
            return Action::Click(i);
        }
    }
    if pos == p.base && e < p.e_max {
        return Action::Charge;
    }
    let target = if e <= dist + 2 || p.points.is_empty() {
        p.base
    } else {
        let best = (0..p.points.len()).max_by_key(|&i| (ages[i], std::cmp::Reverse(i))).unwrap();
        p.points[best]
    };
    if pos == target {
        return Action::Idle;
    }
    let h = if pos.0 != target.0 {
        if target.0 > pos.0 { Heading::East } else { Heading::West }
    } else if target.1 > pos.1 {
        Heading::North
    } else {
        Heading::South
    };
    Action::Move(h)
}

fn dr(d: usize, (x, y): (u64, u64), e: u64) -> Fact {
    Fact::new("Dr", vec![Term::constant(&format!("d{d}")), nat(x), nat(y), nat(e)])
}

fn pt(p: &DroneParams, i: usize) -> Fact {
    let (x, y) = p.points[i];
    Fact::new("P", vec![Term::constant(&format!("p{}", i + 1)), nat(x), nat(y)])
}

fn docked(d: usize, e: u64) -> Fact {
    Fact::new("Docked", vec![Term::constant(&format!("d{d}")), nat(e)])
}

fn busy(d: usize) -> Fact {
    Fact::new("Busy", vec![Term::constant(&format!("d{d}"))])
}

/// Number of rules the parameters expand to.
pub fn rule_count(p: &DroneParams) -> usize {
    let cells = (p.x_max * p.y_max) as usize;
    let per_drone = match p.strategy {
        Strategy::Greedy => {
            let ages = (p.m as usize + 1).checked_pow(p.points.len() as u32).unwrap_or(usize::MAX);
            cells.saturating_mul(p.e_max as usize).saturating_mul(ages)
        }
        Strategy::Unguarded => cells * p.e_max as usize * (4 + 1 + p.points.len()),
    };
    let wind = p.wind.len() * p.e_max as usize;
    let station = if p.station.is_some() { 2 * p.e_max as usize } else { 0 };
    p.drones.saturating_mul(per_drone + wind + station)
}

pub fn gen_drone(p: &DroneParams) -> Result<SpecFile> {
    p.validate()?;
    let count = rule_count(p);
    if count > p.rule_ceiling {
        return Err(Error::TooManyRules {
            count,
            ceiling: p.rule_ceiling,
        });
    }
    let mut sig = Signature::new();
    sig.add_sort("Drone")?;
    sig.add_sort("Point")?;
    sig.add_predicate("Dr", &["Drone", "Nat", "Nat", "Nat"])?;
    sig.add_predicate("P", &["Point", "Nat", "Nat"])?;
    for d in 1..=p.drones {
        sig.add_constant(&format!("d{d}"), "Drone")?;
    }
    for i in 1..=p.points.len() {
        sig.add_constant(&format!("p{i}"), "Point")?;
    }
    if p.station.is_some() {
        sig.add_predicate("Free", &[])?;
        sig.add_predicate("Docked", &["Drone", "Nat"])?;
        sig.add_predicate("Busy", &["Drone"])?;
    }
    sig.add_variable("I", "Drone")?;
    sig.add_variable("X", "Nat")?;
    sig.add_variable("Y", "Nat")?;
    let mut spec = SpecFile::new(sig);

    for d in 1..=p.drones {
        match p.strategy {
            Strategy::Greedy => greedy_rules(p, d, &mut spec),
            Strategy::Unguarded => unguarded_rules(p, d, &mut spec),
        }
        for w in &p.wind {
            let Some(to) = p.step((w.x, w.y), w.dir) else { continue };
            for e in 1..=p.e_max {
                spec.rules.push(rule(
                    format!("d{d}-wind-{}-{}-{}-e{e}", w.x, w.y, w.dir),
                    vec![at(dr(d, (w.x, w.y), e), "T0")],
                    vec![],
                    vec![make(dr(d, to, e), 1)],
                ));
            }
        }
        if p.station.is_some() {
            for e in 1..p.e_max {
                spec.rules.push(rule(
                    format!("d{d}-docked-charge-e{e}"),
                    vec![at(docked(d, e), "T0")],
                    vec![],
                    vec![make(docked(d, e + 1), 1)],
                ));
            }
            spec.rules.push(rule(
                format!("d{d}-takeoff"),
                vec![at(docked(d, p.e_max), "T0"), at(busy(d), "T1")],
                vec![],
                vec![make(dr(d, p.base, p.e_max), 1), make(prop("Free"), 1)],
            ));
        }
    }

    let mut init = vec![TimestampedFact::new(Fact::time(), 0)];
    for d in 1..=p.drones {
        init.push(TimestampedFact::new(dr(d, p.base, p.e_max), 0));
    }
    for i in 0..p.points.len() {
        init.push(TimestampedFact::new(pt(p, i), 0));
    }
    if p.station.is_some() {
        init.push(TimestampedFact::new(prop("Free"), 0));
    }
    spec.init = init;

    spec.critical.push(CriticalDecl {
        name: "no-energy".into(),
        patterns: vec![at(
            Fact::new("Dr", vec![Term::var("I", "Drone"), Term::var("X", "Nat"), Term::var("Y", "Nat"), nat(0)]),
            "T",
        )],
        constraints: vec![],
    });
    for i in 0..p.points.len() {
        spec.critical.push(CriticalDecl {
            name: format!("stale-p{}", i + 1),
            patterns: vec![at(pt(p, i), "T1"), at(Fact::time(), "T")],
            constraints: vec![SrcConstraint::new("T", SrcRel::Gt, "T1", p.m as i64)],
        });
    }
    if let Some(limit) = p.station {
        spec.critical.push(CriticalDecl {
            name: "docked-too-long".into(),
            patterns: vec![at(Fact::new("Busy", vec![Term::var("I", "Drone")]), "T1"), at(Fact::time(), "T")],
            constraints: vec![SrcConstraint::new("T", SrcRel::Gt, "T1", limit as i64)],
        });
    }
    Ok(spec)
}

/// Charging: at the base directly, or by docking when there is a station.
fn charge_rule(p: &DroneParams, d: usize, e: u64, name: String, extra: (Vec<PatternAtom>, Vec<SrcConstraint>, Vec<RhsAtom>)) -> crate::dsl::RuleDecl {
    let (mut lhs, guard, mut rhs) = extra;
    lhs.insert(0, at(dr(d, p.base, e), "T0"));
    if p.station.is_some() {
        lhs.push(at(prop("Free"), "T3"));
        rhs.push(make(docked(d, e), 1));
        rhs.push(make(busy(d), 1));
    } else {
        rhs.push(make(dr(d, p.base, e + 1), 1));
    }
    rule(name, lhs, guard, rhs)
}

fn greedy_rules(p: &DroneParams, d: usize, spec: &mut SpecFile) {
    let n = p.points.len();
    let mut ages = vec![0u64; n];
    loop {
        for x in 0..p.x_max {
            for y in 0..p.y_max {
                for e in 1..=p.e_max {
                    let action = decide(p, (x, y), e, &ages);
                    if action == Action::Idle {
                        continue;
                    }
                    let tag = ages.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("_");
                    let name = |what: String| format!("d{d}-{x}-{y}-e{e}-a{tag}-{what}");
                    // picture facts with their age constraints
                    let mut lhs = Vec::new();
                    let mut guard = Vec::new();
                    let mut rhs = Vec::new();
                    for (i, &a) in ages.iter().enumerate() {
                        let tv = format!("T{}", i + 4);
                        lhs.push(at(pt(p, i), &tv));
                        guard.push(SrcConstraint::new("T", SrcRel::Eq, &tv, a as i64));
                        if action == Action::Click(i) {
                            rhs.push(make(pt(p, i), 0));
                        } else {
                            rhs.push(keep(&pt(p, i), &tv));
                        }
                    }
                    let decl = match action {
                        Action::Charge => charge_rule(p, d, e, name("charge".into()), (lhs, guard, rhs)),
                        Action::Click(i) => {
                            lhs.insert(0, at(dr(d, (x, y), e), "T0"));
                            rhs.push(make(dr(d, (x, y), e - 1), 1));
                            rule(name(format!("click-p{}", i + 1)), lhs, guard, rhs)
                        }
                        Action::Move(h) => {
                            let to = p.step((x, y), h).expect("strategy moves stay on the grid");
                            lhs.insert(0, at(dr(d, (x, y), e), "T0"));
                            rhs.push(make(dr(d, to, e - 1), 1));
                            rule(name(format!("move-{h}")), lhs, guard, rhs)
                        }
                        Action::Idle => unreachable!(),
                    };
                    spec.rules.push(decl);
                }
            }
        }
        // next age vector in lexicographic order
        let mut k = 0;
        while k < n && ages[k] == p.m {
            ages[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        ages[k] += 1;
    }
}

fn unguarded_rules(p: &DroneParams, d: usize, spec: &mut SpecFile) {
    for x in 0..p.x_max {
        for y in 0..p.y_max {
            for e in 1..=p.e_max {
                for h in Heading::ALL {
                    if let Some(to) = p.step((x, y), h) {
                        spec.rules.push(rule(
                            format!("d{d}-{x}-{y}-e{e}-move-{h}"),
                            vec![at(dr(d, (x, y), e), "T0")],
                            vec![],
                            vec![make(dr(d, to, e - 1), 1)],
                        ));
                    }
                }
                if (x, y) == p.base && (e < p.e_max || p.station.is_some()) {
                    let name = format!("d{d}-e{e}-charge");
                    spec.rules.push(charge_rule(p, d, e, name, (vec![], vec![], vec![])));
                }
                for i in (0..p.points.len()).filter(|&i| p.points[i] == (x, y)) {
                    spec.rules.push(rule(
                        format!("d{d}-{x}-{y}-e{e}-click-p{}", i + 1),
                        vec![at(dr(d, (x, y), e), "T0"), at(pt(p, i), "T1")],
                        vec![],
                        vec![make(pt(p, i), 0), make(dr(d, (x, y), e - 1), 1)],
                    ));
                }
            }
        }
    }
}
