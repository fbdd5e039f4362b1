//! Random finite decision problems shared by the property tests.
#![allow(dead_code)]

use proptest::prelude::*;
use surething::decision::{
    Act, ClosureMode, ConsequenceSet, DecisionProblem, Event, Judgment, PrefRel, PreferenceRelation, StateSpace,
};
use surething::measure::ProbabilityMeasure;
use surething::rational::{int, Rational};
use surething::representation::{Representation, UtilityFunction};

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn states(n: usize) -> StateSpace {
    StateSpace::new(labels("s", n)).unwrap()
}

/// Every act over `n` states and `k` consequences, in counting order.
pub fn all_acts(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut v = vec![0; n];
    loop {
        out.push(v.clone());
        let mut i = 0;
        while i < n && v[i] + 1 == k {
            v[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
        v[i] += 1;
    }
}

/// A measure with positive integer weights and a utility with at least
/// two distinct values.
#[derive(Debug, Clone)]
pub struct EuModel {
    pub n: usize,
    pub k: usize,
    pub weights: Vec<i64>,
    pub utils: Vec<i64>,
}

impl EuModel {
    pub fn measure(&self) -> ProbabilityMeasure {
        let total: i64 = self.weights.iter().sum();
        let masses = self.weights.iter().map(|&w| Rational::new(w.into(), total.into())).collect();
        ProbabilityMeasure::new(states(self.n), masses).unwrap()
    }

    pub fn utility(&self) -> UtilityFunction {
        UtilityFunction::new(self.utils.iter().map(|&u| int(u)).collect())
    }

    pub fn representation(&self) -> Representation {
        Representation {
            measure: self.measure(),
            utility: self.utility(),
        }
    }

    pub fn score(&self, act: &[usize]) -> i64 {
        act.iter().zip(&self.weights).map(|(&c, w)| w * self.utils[c]).sum()
    }

    /// A problem over `acts` whose judgments chain the acts by expected
    /// utility.
    pub fn problem(&self, acts: &[Vec<usize>]) -> DecisionProblem {
        let keys: Vec<i64> = acts.iter().map(|a| self.score(a)).collect();
        chain_problem(self.n, self.k, acts, &keys)
    }
}

pub fn eu_model() -> impl Strategy<Value = EuModel> {
    (2usize..=4, 2usize..=4).prop_flat_map(|(n, k)| {
        (
            Just(n),
            Just(k),
            prop::collection::vec(1i64..=6, n),
            prop::collection::vec(0i64..=5, k).prop_filter("two utility levels", |u| u.iter().any(|&x| x != u[0])),
        )
            .prop_map(|(n, k, weights, utils)| EuModel { n, k, weights, utils })
    })
}

pub fn consequences(k: usize) -> ConsequenceSet {
    ConsequenceSet::new((0..k).map(|c| (format!("c{c}"), None)).collect()).unwrap()
}

pub fn build(n: usize, k: usize, acts: &[Vec<usize>], judgments: Vec<Judgment>) -> Result<DecisionProblem, surething::Error> {
    let acts = acts.iter().enumerate().map(|(i, a)| Act::new(format!("a{i}"), a.clone())).collect();
    DecisionProblem::new(
        states(n),
        consequences(k),
        acts,
        vec![],
        PreferenceRelation::new(judgments, ClosureMode::TransitivelyClosed)?,
    )
}

/// Judgments linking the acts in order of `keys`, `~` on ties.
pub fn chain_problem(n: usize, k: usize, acts: &[Vec<usize>], keys: &[i64]) -> DecisionProblem {
    let mut order: Vec<usize> = (0..acts.len()).collect();
    order.sort_by_key(|&i| keys[i]);
    let judgments = order
        .windows(2)
        .map(|w| Judgment {
            left: w[0],
            right: w[1],
            rel: if keys[w[0]] == keys[w[1]] { PrefRel::Indifferent } else { PrefRel::Less },
        })
        .collect();
    build(n, k, acts, judgments).unwrap()
}

pub fn event_in(n: usize) -> impl Strategy<Value = Event> {
    (0u64..(1 << n)).prop_map(Event::from_bits)
}
