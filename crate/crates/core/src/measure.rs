//! Finitely additive probability on the subsets of a finite state space.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decision::{Event, StateSpace};
use crate::rational::{self, Rational};
use crate::Error;

/// Atom masses, one per state. Additivity holds by construction because
/// the mass of an event is always the sum over its members.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    states: StateSpace,
    masses: Vec<Rational>,
}

impl ProbabilityMeasure {
    pub fn new(states: StateSpace, masses: Vec<Rational>) -> Result<Self, Error> {
        if masses.len() != states.len() {
            return Err(Error::invalid(format!(
                "measure has {} masses for {} states",
                masses.len(),
                states.len()
            )));
        }
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| m.is_negative()) {
            return Err(Error::invalid(format!(
                "negative mass {} on state `{}`",
                rational::format(m),
                states.label(i)
            )));
        }
        let total: Rational = masses.iter().fold(Rational::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "masses sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(ProbabilityMeasure { states, masses })
    }

    pub fn uniform(states: StateSpace) -> Self {
        let n = states.len() as i64;
        let masses = vec![rational::ratio(1, n); states.len()];
        ProbabilityMeasure { states, masses }
    }

    /// Parses `{state: "p/q"}`; every state must be present.
    pub fn from_labels(states: StateSpace, map: &BTreeMap<String, Rational>) -> Result<Self, Error> {
        let mut masses = Vec::with_capacity(states.len());
        for label in states.labels() {
            match map.get(label) {
                Some(m) => masses.push(m.clone()),
                None => {
                    return Err(Error::invalid(format!("measure is missing state `{label}`")))
                }
            }
        }
        if let Some(extra) = map.keys().find(|k| states.index_of(k).is_none()) {
            return Err(Error::invalid(format!("measure names unknown state `{extra}`")));
        }
        ProbabilityMeasure::new(states, masses)
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn mass(&self, state: usize) -> &Rational {
        &self.masses[state]
    }

    /// P(E) as the sum of member masses.
    pub fn prob(&self, event: Event) -> Rational {
        event
            .members()
            .filter(|&i| i < self.masses.len())
            .fold(Rational::zero(), |acc, i| acc + &self.masses[i])
    }

    pub fn to_labels(&self) -> BTreeMap<String, Rational> {
        self.states
            .labels()
            .iter()
            .cloned()
            .zip(self.masses.iter().cloned())
            .collect()
    }
}

/// JSON shape `{state: "p/q"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasureDoc(#[serde(with = "rational::text_map")] pub BTreeMap<String, Rational>);

impl From<&ProbabilityMeasure> for MeasureDoc {
    fn from(m: &ProbabilityMeasure) -> Self {
        MeasureDoc(m.to_labels())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn three() -> StateSpace {
        StateSpace::new(vec!["s1".into(), "s2".into(), "s3".into()]).unwrap()
    }

    #[test]
    fn event_mass_is_additive() {
        let p = ProbabilityMeasure::new(three(), vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap();
        let b = Event::from_indices([0]);
        let c = Event::from_indices([2]);
        assert_eq!(p.prob(b.union(c)), p.prob(b) + p.prob(c));
        assert_eq!(p.prob(Event::full(3)), Rational::one());
        assert_eq!(p.prob(Event::empty()), Rational::zero());
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(ProbabilityMeasure::new(three(), vec![ratio(1, 2), ratio(1, 2), ratio(1, 2)]).is_err());
        assert!(ProbabilityMeasure::new(three(), vec![ratio(3, 2), ratio(-1, 2), ratio(0, 1)]).is_err());
        assert!(ProbabilityMeasure::new(three(), vec![ratio(1, 1)]).is_err());
    }
}
