mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use tmsr_core::delta::lazy_successors;
use tmsr_core::{abstract_config, compute_dmax, delta_step, representative, Configuration, TimestampedFact};

use common::RandomSystem;

/// Abstract successors of a concrete configuration, as a set of printed
/// (label, delta-configuration) pairs.
fn abstract_successors(m: &tmsr_core::Model, c: &Configuration, dmax: u64) -> BTreeSet<String> {
    lazy_successors(&m.system, c)
        .unwrap()
        .into_iter()
        .map(|(l, _, n)| format!("{l:?} {}", abstract_config(&n, dmax)))
        .collect()
}

/// Widen every gap above `dmax` by the next stretch amount and shift the
/// whole configuration; the abstraction is unchanged.
fn stretch(c: &Configuration, dmax: u64, shift: u64, extra: &[u64]) -> Configuration {
    let facts = c.facts();
    let mut out = Vec::with_capacity(facts.len());
    let mut ts = shift;
    let mut k = 0;
    for (i, f) in facts.iter().enumerate() {
        if i > 0 {
            let gap = f.ts - facts[i - 1].ts;
            ts += gap;
            if gap > dmax {
                ts += extra[k % extra.len()];
                k += 1;
            }
        }
        out.push(TimestampedFact::new(f.fact.clone(), ts));
    }
    Configuration::new(out).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delta_step_commutes_with_abstraction(
        seed in 0u64..1_000_000,
        walk in proptest::collection::vec(0usize..8, 0..12),
        shift in 0u64..20,
        extra in proptest::collection::vec(0u64..15, 1..4),
    ) {
        let rs = RandomSystem::generate(seed);
        let m = rs.spec.load().unwrap();
        let dmax = compute_dmax(&m.system, &m.init, &m.critical);
        let mut c = m.init.clone();
        for choice in walk {
            let d = abstract_config(&c, dmax);
            let concrete = abstract_successors(&m, &c, dmax);
            let symbolic: BTreeSet<String> = delta_step(&m.system, &d)
                .unwrap()
                .into_iter()
                .map(|(l, n)| format!("{l:?} {n}"))
                .collect();
            prop_assert_eq!(&concrete, &symbolic);

            let other = stretch(&c, dmax, shift, &extra);
            prop_assert_eq!(abstract_config(&other, dmax), d.clone());
            prop_assert_eq!(abstract_successors(&m, &other, dmax), concrete);
            prop_assert_eq!(abstract_config(&representative(&d), dmax), d);

            let next = lazy_successors(&m.system, &c).unwrap();
            c = next[choice % next.len()].2.clone();
        }
    }
}
