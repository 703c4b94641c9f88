mod common;

use tmsr_core::report::{parse_report, render, replay};
use tmsr_core::{
    bounded_realizability, bounded_survivability, realizability, survivability, Error, Model, Outcome,
    SearchBudget, Witness,
};

use common::certify;

fn model(body: &str) -> Model {
    format!("tmsr-spec 1\n{body}").parse().unwrap()
}

const PING_PONG: &str = "pred A
pred B
rule \"ab\": Time@T, A@T1 -> Time@T, B@(T+1)
rule \"ba\": Time@T, B@T1 -> Time@T, A@(T+1)
init: Time@0, A@0
critical \"stale\": { Time@T, A@T1 | T > T1 + 3 }
";

/// From `S` the system either loops safely through `A` or moves to `Bad`.
const FORK: &str = "pred S
pred A
pred Bad
rule \"safe\": Time@T, S@T1 -> Time@T, A@(T+1)
rule \"loop\": Time@T, A@T1 -> Time@T, A@(T+1)
rule \"risk\": Time@T, S@T1 -> Time@T, Bad@(T+2)
rule \"stay\": Time@T, Bad@T1 -> Time@T, Bad@(T+1)
init: Time@0, S@0
critical \"bad\": { Time@T, Bad@T1 | T = T1 }
";

fn budget() -> SearchBudget {
    SearchBudget::default()
}

#[test]
fn ping_pong_is_realizable_and_survivable() {
    let m = model(PING_PONG);
    for v in [
        realizability(&m.system, &m.init, &m.critical, &budget()).unwrap(),
        survivability(&m.system, &m.init, &m.critical, &budget()).unwrap(),
    ] {
        assert_eq!(v.outcome, Outcome::Holds);
        assert!(matches!(v.witness, Some(Witness::Lasso(_))));
        certify(&m, &v).unwrap();
    }
}

#[test]
fn fork_is_realizable_but_not_survivable() {
    let m = model(FORK);
    let r = realizability(&m.system, &m.init, &m.critical, &budget()).unwrap();
    assert_eq!(r.outcome, Outcome::Holds);
    certify(&m, &r).unwrap();

    let s = survivability(&m.system, &m.init, &m.critical, &budget()).unwrap();
    assert_eq!(s.outcome, Outcome::Fails);
    assert_eq!(s.critical.as_ref().unwrap().name.as_ref(), "bad");
    let cex = s.counterexample.as_ref().unwrap();
    assert_eq!(cex.ticks(), 2);
    certify(&m, &s).unwrap();
}

#[test]
fn bounded_modes_on_the_fork() {
    let m = model(FORK);
    let one = bounded_survivability(&m.system, &m.init, &m.critical, 1, &budget()).unwrap();
    assert_eq!(one.outcome, Outcome::Holds);
    certify(&m, &one).unwrap();

    let two = bounded_survivability(&m.system, &m.init, &m.critical, 2, &budget()).unwrap();
    assert_eq!(two.outcome, Outcome::Fails);
    certify(&m, &two).unwrap();

    let r = bounded_realizability(&m.system, &m.init, &m.critical, 5, &budget()).unwrap();
    assert_eq!(r.outcome, Outcome::Holds);
    match &r.witness {
        Some(Witness::Trace(t)) => assert_eq!(t.ticks(), 5),
        other => panic!("expected a trace, got {other:?}"),
    }
    certify(&m, &r).unwrap();
}

#[test]
fn critical_initial_configuration() {
    let m = model("pred A\nrule \"a\": Time@T, A@T1 -> Time@T, A@(T+1)\ninit: Time@0, A@0\ncritical \"a\": { A@T1 }\n");
    for v in [
        realizability(&m.system, &m.init, &m.critical, &budget()).unwrap(),
        survivability(&m.system, &m.init, &m.critical, &budget()).unwrap(),
    ] {
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(v.counterexample.as_ref().unwrap().len(), 0);
        certify(&m, &v).unwrap();
    }
}

#[test]
fn no_compliant_lasso() {
    // A single A ages forever once B is gone; it becomes critical after 3 units.
    let m = model(
        "pred A\npred B\nrule \"b\": Time@T, B@T1 -> Time@T, A@(T+1)\n\
         init: Time@0, B@0, A@0\ncritical \"old\": { Time@T, A@T1 | T > T1 + 2 }\n",
    );
    let r = realizability(&m.system, &m.init, &m.critical, &budget()).unwrap();
    assert_eq!(r.outcome, Outcome::Fails);
    assert!(r.witness.is_none());
}

#[test]
fn instant_rules_are_rejected() {
    let m = model("pred A\nrule \"z\": Time@T, A@T1 -> Time@T, A@T\ninit: Time@0, A@0\n");
    let err = realizability(&m.system, &m.init, &m.critical, &budget()).unwrap_err();
    assert!(matches!(err, Error::NotProgressive(..)), "{err}");
}

#[test]
fn zero_ticks_is_an_argument_error() {
    let m = model(PING_PONG);
    assert!(matches!(
        bounded_realizability(&m.system, &m.init, &m.critical, 0, &budget()),
        Err(Error::Argument(_))
    ));
}

#[test]
fn exhausted_budget_is_unknown() {
    let m = model(FORK);
    let v = survivability(&m.system, &m.init, &m.critical, &SearchBudget::states(1)).unwrap();
    assert_eq!(v.outcome, Outcome::Unknown);
}

#[test]
fn reports_replay() {
    let text = format!("tmsr-spec 1\n{FORK}");
    let m: Model = text.parse().unwrap();
    let verdicts = [
        realizability(&m.system, &m.init, &m.critical, &budget()).unwrap(),
        survivability(&m.system, &m.init, &m.critical, &budget()).unwrap(),
        bounded_realizability(&m.system, &m.init, &m.critical, 3, &budget()).unwrap(),
        bounded_survivability(&m.system, &m.init, &m.critical, 3, &budget()).unwrap(),
    ];
    for v in &verdicts {
        let json = render(v, &text);
        let parsed = parse_report(&m, &json).unwrap();
        assert_eq!(parsed.outcome, v.outcome);
        assert!(replay(&m, &parsed).unwrap().ok, "{json}");

        let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let steps = value["trace"].as_array_mut().unwrap();
        if steps.len() > 1 {
            let last = steps.len() - 1;
            steps.swap(0, last);
            let bad = parse_report(&m, &value.to_string()).unwrap();
            assert!(!replay(&m, &bad).unwrap().ok);
        }
    }
}
