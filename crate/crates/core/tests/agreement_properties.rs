mod common;

use common::{event_in, states};
use num_traits::Signed;
use proptest::prelude::*;
use surething::bayes::condition;
use surething::decision::Event;
use surething::measure::ProbabilityMeasure;
use surething::qualitative::{
    agrees, conditional_order, find_agreeing_measure, AgreementOptions, EventJudgment, EventOrder, EventRel,
};
use surething::rational::ratio;

fn rel() -> impl Strategy<Value = EventRel> {
    prop_oneof![Just(EventRel::Less), Just(EventRel::LessOrEqual), Just(EventRel::Equivalent)]
}

fn order(max_states: usize) -> impl Strategy<Value = EventOrder> {
    (1usize..=max_states)
        .prop_flat_map(|n| {
            let j = (event_in(n), event_in(n), rel()).prop_map(|(left, right, rel)| EventJudgment { left, right, rel });
            (Just(n), prop::collection::vec(j, 1..=6))
        })
        .prop_filter_map("valid order", |(n, js)| EventOrder::new(states(n), js).ok())
}

/// Whether some measure with masses in twentieths satisfies every judgment.
fn on_grid(order: &EventOrder) -> bool {
    let n = order.states().len();
    let mut stack = vec![(Vec::<i64>::new(), 20i64)];
    while let Some((prefix, left)) = stack.pop() {
        if prefix.len() + 1 == n {
            let mut p = prefix.clone();
            p.push(left);
            let m = ProbabilityMeasure::new(states(n), p.iter().map(|&x| ratio(x, 20)).collect()).unwrap();
            if agrees(&m, order) {
                return true;
            }
            continue;
        }
        for x in 0..=left {
            let mut next = prefix.clone();
            next.push(x);
            stack.push((next, left - x));
        }
    }
    false
}

fn measure(max_states: usize) -> impl Strategy<Value = ProbabilityMeasure> {
    (1usize..=max_states)
        .prop_flat_map(|n| prop::collection::vec(0i64..=5, n))
        .prop_filter("some mass", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| {
            let total: i64 = w.iter().sum();
            ProbabilityMeasure::new(states(w.len()), w.iter().map(|&x| ratio(x, total)).collect()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn returned_measures_agree(o in order(4)) {
        if let Ok(a) = find_agreeing_measure(&o, &AgreementOptions::default()) {
            prop_assert!(agrees(&a.measure, &o));
            prop_assert!(a.slack.is_positive() || o.judgments().iter().all(|j| j.rel != EventRel::Less));
        }
    }

    #[test]
    fn grid_points_imply_feasibility(o in order(3)) {
        let lp = find_agreeing_measure(&o, &AgreementOptions::default()).is_ok();
        if on_grid(&o) {
            prop_assert!(lp);
        }
        if !lp {
            prop_assert!(!on_grid(&o));
        }
    }

    #[test]
    fn strict_agreement_implies_almost_agreement(o in order(4)) {
        let loose = AgreementOptions { strict: false, ..Default::default() };
        if find_agreeing_measure(&o, &AgreementOptions::default()).is_ok() {
            prop_assert!(find_agreeing_measure(&o, &loose).is_ok());
        }
    }

    #[test]
    fn conditioning_commutes_with_inducing_an_order(p in measure(3), d in 1u64..8) {
        let n = p.states().len();
        let d = Event::from_bits(d & ((1 << n) - 1));
        prop_assume!(p.prob(d).is_positive());
        let events: Vec<Event> = Event::all(n).collect();
        let given = conditional_order(&EventOrder::from_measure(&p, &events), d).unwrap();
        let pd = condition(&p, d).unwrap();
        prop_assert!(agrees(&pd, &given));
        let c = given.closure();
        for &a in &events {
            for &b in &events {
                prop_assert_eq!(c.leq(a, b), pd.prob(a) <= pd.prob(b), "{:?} vs {:?}", a, b);
            }
        }
    }
}
