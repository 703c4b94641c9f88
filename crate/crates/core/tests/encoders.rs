mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tmsr_core::encode::tm::halts;
use tmsr_core::encode::{gen_3sat, gen_drone, gen_tm, Cnf3, Dir, DroneParams, Instruction, TmSpec};
use tmsr_core::{
    bounded_realizability, check_balanced, check_progressive, realizability, survivability, Model, Outcome,
    SearchBudget,
};

use common::certify;

#[test]
fn drone_parked_on_its_point_survives() {
    for m in 2..=4 {
        let p = DroneParams::new(1, 1, (0, 0), vec![(0, 0)], m, 3);
        let model = gen_drone(&p).unwrap().load().unwrap();
        let v = survivability(&model.system, &model.init, &model.critical, &SearchBudget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Holds, "M = {m}");
        certify(&model, &v).unwrap();
    }
}

#[test]
fn generated_specs_round_trip_through_text() {
    let mut p = DroneParams::new(3, 2, (1, 0), vec![(0, 0), (2, 1)], 3, 4);
    p.station = Some(2);
    let spec = gen_drone(&p).unwrap();
    let reparsed: Model = spec.to_string().parse().unwrap();
    let direct = spec.load().unwrap();
    assert_eq!(reparsed.system.rules.len(), direct.system.rules.len());
    assert_eq!(reparsed.init, direct.init);
    assert!(check_balanced(&direct.system).ok());
    assert!(check_progressive(&direct.system).ok());
}

#[test]
fn random_formulas_match_brute_force() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..60 {
        let vars = rng.gen_range(1..=3);
        let clauses = (0..rng.gen_range(1..=4))
            .map(|_| {
                [0; 3].map(|_| {
                    let v = rng.gen_range(1..=vars) as i32;
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
            })
            .collect();
        let f = Cnf3::new(vars, clauses).unwrap();
        let m = gen_3sat(&f).unwrap().load().unwrap();
        let n = m.ticks.unwrap();
        let v = bounded_realizability(&m.system, &m.init, &m.critical, n, &SearchBudget::default()).unwrap();
        assert_eq!(v.outcome == Outcome::Holds, f.satisfiable(), "{f:?}");
        certify(&m, &v).unwrap();
    }
}

fn random_machine(rng: &mut StdRng) -> TmSpec {
    let states: Vec<String> = ["a", "b", "c", "h"].iter().map(|s| s.to_string()).collect();
    let symbols = vec!["0".to_string(), "1".to_string()];
    let mut instructions = Vec::new();
    for q in &states[..3] {
        for a in &symbols {
            instructions.push(Instruction {
                state: q.clone(),
                read: a.clone(),
                next: states[rng.gen_range(0..4)].clone(),
                write: symbols[rng.gen_range(0..2)].clone(),
                dir: if rng.gen_bool(0.5) { Dir::L } else { Dir::R },
            });
        }
    }
    TmSpec {
        states,
        symbols: symbols.clone(),
        start: "a".into(),
        finals: vec!["h".into()],
        instructions,
        space: 2,
        input: (0..2).map(|_| symbols[rng.gen_range(0..2)].clone()).collect(),
    }
}

#[test]
fn random_machines_match_simulation() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let tm = random_machine(&mut rng);
        let m = gen_tm(&tm).unwrap().load().unwrap();
        let v = realizability(&m.system, &m.init, &m.critical, &SearchBudget::default()).unwrap();
        assert_eq!(v.outcome == Outcome::Holds, !halts(&tm), "{tm:?}");
        certify(&m, &v).unwrap();
    }
}
