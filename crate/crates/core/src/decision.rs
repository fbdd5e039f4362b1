//! Finite decision problems: states, consequences, acts, events and the
//! preference judgments recorded over acts.
//!
//! Everything here is an immutable value once constructed. Checkers in
//! [`crate::axioms`] and fitters in [`crate::representation`] read these
//! types; nothing mutates them in place.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::measure::{MeasureDoc, ProbabilityMeasure};
use crate::qualitative::EventRel;
use crate::rational::{self, Rational, Wire};
use crate::Error;

/// Events are bitsets, so a state space holds at most this many states.
pub const MAX_STATES: usize = 64;

#[derive(Debug, Clone)]
pub struct StateSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl StateSpace {
    pub fn new(labels: Vec<String>) -> Result<Self, Error> {
        if labels.is_empty() {
            return Err(Error::invalid("state space is empty"));
        }
        if labels.len() > MAX_STATES {
            return Err(Error::invalid(format!(
                "{} states exceed the supported maximum of {MAX_STATES}",
                labels.len()
            )));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate state label `{l}`")));
            }
        }
        Ok(StateSpace { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.len())
    }

    pub fn event(&self, labels: &[&str]) -> Result<Event, Error> {
        let mut e = Event::empty();
        for l in labels {
            let i = self
                .index_of(l)
                .ok_or_else(|| Error::invalid(format!("unknown state `{l}`")))?;
            e = e.with(i);
        }
        Ok(e)
    }

    pub fn event_labels(&self, event: Event) -> Vec<String> {
        event.members().map(|i| self.labels[i].clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ConsequenceSet {
    labels: Vec<String>,
    values: Vec<Option<Rational>>,
    index: HashMap<String, usize>,
}

impl PartialEq for ConsequenceSet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.values == other.values
    }
}

impl ConsequenceSet {
    pub fn new(entries: Vec<(String, Option<Rational>)>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::invalid("consequence set is empty"));
        }
        let mut index = HashMap::with_capacity(entries.len());
        let mut labels = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, (l, v)) in entries.into_iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate consequence label `{l}`")));
            }
            labels.push(l);
            values.push(v);
        }
        Ok(ConsequenceSet {
            labels,
            values,
            index,
        })
    }

    /// Consequences labelled by their own monetary value.
    pub fn monetary(values: &[Rational]) -> Result<Self, Error> {
        ConsequenceSet::new(
            values
                .iter()
                .map(|v| (rational::format(v), Some(v.clone())))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn value(&self, i: usize) -> Option<&Rational> {
        self.values[i].as_ref()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

/// A set of states, stored as a bitmask over state indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event(u64);

impl Event {
    pub const fn empty() -> Event {
        Event(0)
    }

    pub fn full(n: usize) -> Event {
        if n >= 64 {
            Event(u64::MAX)
        } else {
            Event((1u64 << n) - 1)
        }
    }

    pub const fn from_bits(bits: u64) -> Event {
        Event(bits)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Event {
        indices.into_iter().fold(Event::empty(), |e, i| e.with(i))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn with(self, i: usize) -> Event {
        Event(self.0 | 1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn difference(self, other: Event) -> Event {
        Event(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Event {
        Event(!self.0 & Event::full(n).0)
    }

    pub fn is_subset_of(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Event) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Whether every member indexes a state of an `n`-state space.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(Event::full(n))
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// All `2^n` subsets of an `n`-state space, in bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Event> {
        assert!(n < 64, "powerset enumeration needs fewer than 64 states");
        (0..1u64 << n).map(Event)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Act {
    name: String,
    outcomes: Vec<usize>,
}

impl Act {
    pub fn new(name: impl Into<String>, outcomes: Vec<usize>) -> Act {
        Act {
            name: name.into(),
            outcomes,
        }
    }

    /// The act yielding `consequence` in every one of `n` states.
    pub fn constant(name: impl Into<String>, n: usize, consequence: usize) -> Act {
        Act::new(name, vec![consequence; n])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn outcome(&self, state: usize) -> usize {
        self.outcomes[state]
    }

    /// `Some(c)` when the act yields `c` everywhere.
    pub fn constant_value(&self) -> Option<usize> {
        let first = *self.outcomes.first()?;
        self.outcomes.iter().all(|&c| c == first).then_some(first)
    }

    pub fn renamed(self, name: impl Into<String>) -> Act {
        Act {
            name: name.into(),
            ..self
        }
    }
}

/// The act equal to `f` on `event` and to `g` on its complement.
pub fn splice(f: &Act, g: &Act, event: Event) -> Result<Act, Error> {
    if f.outcomes.len() != g.outcomes.len() {
        return Err(Error::invalid("acts range over different state spaces"));
    }
    if !event.fits(f.outcomes.len()) {
        return Err(Error::EventOutOfRange);
    }
    let outcomes = (0..f.outcomes.len())
        .map(|s| if event.contains(s) { f.outcomes[s] } else { g.outcomes[s] })
        .collect();
    Ok(Act::new(format!("{}|{}", f.name, g.name), outcomes))
}

/// Whether `f(s) = g(s)` for every `s` in `event`.
pub fn agree_on(f: &Act, g: &Act, event: Event) -> Result<bool, Error> {
    if f.outcomes.len() != g.outcomes.len() {
        return Err(Error::invalid("acts range over different state spaces"));
    }
    if !event.fits(f.outcomes.len()) {
        return Err(Error::EventOutOfRange);
    }
    Ok(event.members().all(|s| f.outcomes[s] == g.outcomes[s]))
}

/// Outcome-vector agreement without the range checks, for hot loops.
pub(crate) fn agree_fast(f: &[usize], g: &[usize], event: Event) -> bool {
    event.members().all(|s| f[s] == g[s])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrefRel {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "~")]
    Indifferent,
}

/// `left < right` or `left ~ right`, by act index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Judgment {
    pub left: usize,
    pub right: usize,
    pub rel: PrefRel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureMode {
    Raw,
    #[default]
    TransitivelyClosed,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PreferenceRelation {
    judgments: Vec<Judgment>,
    mode: ClosureMode,
}

impl PreferenceRelation {
    /// Rejects a strict self-judgment and any pair judged two incompatible
    /// ways (strict both directions, or strict and indifferent); all other
    /// conflicts are left for the checkers to report.
    pub fn new(judgments: Vec<Judgment>, mode: ClosureMode) -> Result<Self, Error> {
        let mut seen: HashMap<(usize, usize), PrefRel> = HashMap::new();
        for (k, j) in judgments.iter().enumerate() {
            if j.rel == PrefRel::Less && j.left == j.right {
                return Err(Error::load(
                    format!("preferences[{k}]"),
                    "an act cannot be strictly preferred to itself",
                ));
            }
            let clash = match j.rel {
                PrefRel::Less => {
                    seen.contains_key(&(j.right, j.left))
                        || seen.get(&(j.left, j.right)) == Some(&PrefRel::Indifferent)
                }
                PrefRel::Indifferent => {
                    seen.get(&(j.left, j.right)) == Some(&PrefRel::Less)
                        || seen.get(&(j.right, j.left)).is_some_and(|r| *r == PrefRel::Less)
                }
            };
            if clash {
                return Err(Error::load(
                    format!("preferences[{k}]"),
                    "contradicts an earlier judgment on the same pair",
                ));
            }
            seen.insert((j.left, j.right), j.rel);
            if j.rel == PrefRel::Indifferent {
                seen.insert((j.right, j.left), j.rel);
            }
        }
        Ok(PreferenceRelation { judgments, mode })
    }

    pub fn judgments(&self) -> &[Judgment] {
        &self.judgments
    }

    pub fn mode(&self) -> ClosureMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: ClosureMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

/// A judgment between two events, as declared in a problem file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventJudgmentDecl {
    pub left: Event,
    pub right: Event,
    pub rel: EventRel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    states: StateSpace,
    consequences: ConsequenceSet,
    acts: Vec<Act>,
    act_index: HashMap<String, usize>,
    events: Vec<(String, Event)>,
    preferences: PreferenceRelation,
    /// Adds `const(x) < const(y)` whenever consequence values satisfy `x < y`.
    monotone_money: bool,
    probability: Option<ProbabilityMeasure>,
    small_events: Vec<String>,
    event_order: Vec<EventJudgmentDecl>,
}

impl DecisionProblem {
    pub fn new(
        states: StateSpace,
        consequences: ConsequenceSet,
        acts: Vec<Act>,
        events: Vec<(String, Event)>,
        preferences: PreferenceRelation,
    ) -> Result<Self, Error> {
        let mut act_index = HashMap::with_capacity(acts.len());
        for (i, act) in acts.iter().enumerate() {
            if act.outcomes.len() != states.len() {
                return Err(Error::load(
                    format!("acts[{i}] `{}`", act.name),
                    "partial act: assignment does not cover every state",
                ));
            }
            if let Some(c) = act.outcomes.iter().find(|&&c| c >= consequences.len()) {
                return Err(Error::load(
                    format!("acts[{i}] `{}`", act.name),
                    format!("unknown consequence index {c}"),
                ));
            }
            if act_index.insert(act.name.clone(), i).is_some() {
                return Err(Error::load(
                    format!("acts[{i}]"),
                    format!("duplicate act name `{}`", act.name),
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (name, e) in &events {
            if !e.fits(states.len()) {
                return Err(Error::load(format!("events.{name}"), "not a subset of the state space"));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::load(format!("events.{name}"), "duplicate event name"));
            }
        }
        for (k, j) in preferences.judgments().iter().enumerate() {
            if j.left >= acts.len() || j.right >= acts.len() {
                return Err(Error::load(format!("preferences[{k}]"), "unknown act reference"));
            }
            if j.rel == PrefRel::Less && acts[j.left].outcomes == acts[j.right].outcomes {
                return Err(Error::load(
                    format!("preferences[{k}]"),
                    format!(
                        "`{}` and `{}` are the same act; it cannot be strictly preferred to itself",
                        acts[j.left].name, acts[j.right].name
                    ),
                ));
            }
        }
        Ok(DecisionProblem {
            states,
            consequences,
            acts,
            act_index,
            events,
            preferences,
            monotone_money: false,
            probability: None,
            small_events: Vec::new(),
            event_order: Vec::new(),
        })
    }

    pub fn with_monotone_money(mut self, on: bool) -> Self {
        self.monotone_money = on;
        self
    }

    pub fn with_probability(mut self, p: Option<ProbabilityMeasure>) -> Result<Self, Error> {
        if let Some(m) = &p {
            if *m.states() != self.states {
                return Err(Error::invalid("probability is over a different state space"));
            }
        }
        self.probability = p;
        Ok(self)
    }

    pub fn with_small_events(mut self, names: Vec<String>) -> Result<Self, Error> {
        for n in &names {
            if self.event(n).is_none() {
                return Err(Error::load("small_events", format!("unknown event `{n}`")));
            }
        }
        self.small_events = names;
        Ok(self)
    }

    pub fn with_event_order(mut self, order: Vec<EventJudgmentDecl>) -> Result<Self, Error> {
        for (k, j) in order.iter().enumerate() {
            if !j.left.fits(self.states.len()) || !j.right.fits(self.states.len()) {
                return Err(Error::load(format!("event_order[{k}]"), "event outside the state space"));
            }
        }
        self.event_order = order;
        Ok(self)
    }

    pub fn with_preferences(mut self, preferences: PreferenceRelation) -> Result<Self, Error> {
        let rebuilt = DecisionProblem::new(
            self.states.clone(),
            self.consequences.clone(),
            self.acts.clone(),
            self.events.clone(),
            preferences,
        )?;
        self.preferences = rebuilt.preferences;
        Ok(self)
    }

    /// Appends one judgment by act name.
    pub fn with_judgment(&self, left: &str, right: &str, rel: PrefRel) -> Result<Self, Error> {
        let l = self.act_id(left).ok_or_else(|| Error::UnknownAct(left.to_string()))?;
        let r = self.act_id(right).ok_or_else(|| Error::UnknownAct(right.to_string()))?;
        let mut judgments = self.preferences.judgments().to_vec();
        judgments.push(Judgment { left: l, right: r, rel });
        let prefs = PreferenceRelation::new(judgments, self.preferences.mode())?;
        self.clone().with_preferences(prefs)
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn consequences(&self) -> &ConsequenceSet {
        &self.consequences
    }

    pub fn acts(&self) -> &[Act] {
        &self.acts
    }

    pub fn act(&self, name: &str) -> Option<&Act> {
        self.act_index.get(name).map(|&i| &self.acts[i])
    }

    pub fn act_id(&self, name: &str) -> Option<usize> {
        self.act_index.get(name).copied()
    }

    pub fn events(&self) -> &[(String, Event)] {
        &self.events
    }

    pub fn event(&self, name: &str) -> Option<Event> {
        self.events.iter().find(|(n, _)| n == name).map(|(_, e)| *e)
    }

    /// Name of a declared event equal to `e`, if any.
    pub fn event_name(&self, e: Event) -> Option<&str> {
        self.events.iter().find(|(_, x)| *x == e).map(|(n, _)| n.as_str())
    }

    pub fn preferences(&self) -> &PreferenceRelation {
        &self.preferences
    }

    pub fn monotone_money(&self) -> bool {
        self.monotone_money
    }

    pub fn probability(&self) -> Option<&ProbabilityMeasure> {
        self.probability.as_ref()
    }

    pub fn small_events(&self) -> Vec<Event> {
        self.small_events.iter().filter_map(|n| self.event(n)).collect()
    }

    pub fn event_order(&self) -> &[EventJudgmentDecl] {
        &self.event_order
    }

    /// Human-readable rendering of an outcome vector, e.g. `(100,0,100)`.
    pub fn describe_outcomes(&self, outcomes: &[usize]) -> String {
        let parts: Vec<&str> = outcomes.iter().map(|&c| self.consequences.label(c)).collect();
        format!("({})", parts.join(","))
    }

    pub fn outcome_labels(&self, outcomes: &[usize]) -> Vec<String> {
        outcomes
            .iter()
            .map(|&c| self.consequences.label(c).to_string())
            .collect()
    }

    /// Parses consequence labels back into an outcome vector.
    pub fn outcomes_from_labels(&self, labels: &[String]) -> Option<Vec<usize>> {
        if labels.len() != self.states.len() {
            return None;
        }
        labels.iter().map(|l| self.consequences.index_of(l)).collect()
    }
}

// ---------------------------------------------------------------------------
// Problem-file wire format

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsequenceDoc {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Wire>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActDoc {
    pub name: String,
    pub assignment: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgmentDoc {
    pub left: String,
    pub right: String,
    pub rel: PrefRel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventJudgmentDoc {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub rel: EventRel,
}

/// The problem file. Unknown top-level keys are ignored so corpus files can
/// carry extra sections (price systems, urn settings) next to the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub states: Vec<String>,
    pub consequences: Vec<ConsequenceDoc>,
    pub acts: Vec<ActDoc>,
    #[serde(default)]
    pub events: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub preferences: Vec<JudgmentDoc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub monotone_money: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<MeasureDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub small_events: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub event_order: Vec<EventJudgmentDoc>,
    #[serde(default, skip_serializing_if = "is_default_mode")]
    pub closure: ClosureMode,
}

fn is_default_mode(m: &ClosureMode) -> bool {
    *m == ClosureMode::default()
}

fn event_from_labels(states: &StateSpace, labels: &[String], location: &str) -> Result<Event, Error> {
    let mut e = Event::empty();
    for l in labels {
        let i = states
            .index_of(l)
            .ok_or_else(|| Error::load(location, format!("unknown state `{l}`")))?;
        e = e.with(i);
    }
    Ok(e)
}

fn string_list(value: &serde_json::Value, location: &str) -> Result<Vec<String>, Error> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::load(location, "expected an array of state labels"))?;
    arr.iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::load(location, "state labels must be strings"))
        })
        .collect()
}

impl ProblemDoc {
    pub fn into_problem(self) -> Result<DecisionProblem, Error> {
        let states = StateSpace::new(self.states).map_err(|e| Error::load("states", e.to_string()))?;
        let consequences = ConsequenceSet::new(
            self.consequences
                .into_iter()
                .map(|c| (c.label, c.value.map(|w| w.0)))
                .collect(),
        )
        .map_err(|e| Error::load("consequences", e.to_string()))?;

        let mut acts = Vec::with_capacity(self.acts.len());
        for (i, doc) in self.acts.into_iter().enumerate() {
            let location = format!("acts[{i}] `{}`", doc.name);
            let mut outcomes = vec![usize::MAX; states.len()];
            for (state, value) in &doc.assignment {
                let s = states
                    .index_of(state)
                    .ok_or_else(|| Error::load(&location, format!("unknown state `{state}`")))?;
                let label = value
                    .as_str()
                    .map(str::to_string)
                    .or_else(|| value.is_number().then(|| value.to_string()))
                    .ok_or_else(|| Error::load(&location, "consequence labels must be strings"))?;
                let c = consequences.index_of(&label).ok_or_else(|| {
                    Error::load(&location, format!("unknown consequence `{label}` at state `{state}`"))
                })?;
                outcomes[s] = c;
            }
            if let Some(s) = outcomes.iter().position(|&c| c == usize::MAX) {
                return Err(Error::load(
                    location,
                    format!("partial act: no consequence for state `{}`", states.label(s)),
                ));
            }
            acts.push(Act::new(doc.name, outcomes));
        }

        let mut events = Vec::with_capacity(self.events.len());
        for (name, value) in &self.events {
            let location = format!("events.{name}");
            let labels = string_list(value, &location)?;
            events.push((name.clone(), event_from_labels(&states, &labels, &location)?));
        }

        let names: HashMap<&str, usize> = acts.iter().enumerate().map(|(i, a)| (a.name(), i)).collect();
        let mut judgments = Vec::with_capacity(self.preferences.len());
        for (k, j) in self.preferences.iter().enumerate() {
            let location = format!("preferences[{k}]");
            let left = *names
                .get(j.left.as_str())
                .ok_or_else(|| Error::load(&location, format!("unknown act `{}`", j.left)))?;
            let right = *names
                .get(j.right.as_str())
                .ok_or_else(|| Error::load(&location, format!("unknown act `{}`", j.right)))?;
            judgments.push(Judgment {
                left,
                right,
                rel: j.rel,
            });
        }
        let preferences = PreferenceRelation::new(judgments, self.closure)?;

        let mut order = Vec::with_capacity(self.event_order.len());
        for (k, j) in self.event_order.iter().enumerate() {
            let location = format!("event_order[{k}]");
            order.push(EventJudgmentDecl {
                left: event_from_labels(&states, &j.left, &location)?,
                right: event_from_labels(&states, &j.right, &location)?,
                rel: j.rel,
            });
        }

        let probability = match self.probability {
            Some(doc) => Some(
                ProbabilityMeasure::from_labels(states.clone(), &doc.0)
                    .map_err(|e| Error::load("probability", e.to_string()))?,
            ),
            None => None,
        };

        DecisionProblem::new(states, consequences, acts, events, preferences)?
            .with_monotone_money(self.monotone_money)
            .with_probability(probability)?
            .with_small_events(self.small_events)?
            .with_event_order(order)
    }

    pub fn from_problem(p: &DecisionProblem) -> ProblemDoc {
        let states = p.states.labels().to_vec();
        let consequences = (0..p.consequences.len())
            .map(|i| ConsequenceDoc {
                label: p.consequences.label(i).to_string(),
                value: p.consequences.value(i).cloned().map(Wire),
            })
            .collect();
        let acts = p
            .acts
            .iter()
            .map(|a| ActDoc {
                name: a.name.clone(),
                assignment: a
                    .outcomes
                    .iter()
                    .enumerate()
                    .map(|(s, &c)| {
                        (
                            p.states.label(s).to_string(),
                            serde_json::Value::String(p.consequences.label(c).to_string()),
                        )
                    })
                    .collect(),
            })
            .collect();
        let events = p
            .events
            .iter()
            .map(|(n, e)| {
                (
                    n.clone(),
                    serde_json::Value::Array(
                        p.states
                            .event_labels(*e)
                            .into_iter()
                            .map(serde_json::Value::String)
                            .collect(),
                    ),
                )
            })
            .collect();
        let preferences = p
            .preferences
            .judgments()
            .iter()
            .map(|j| JudgmentDoc {
                left: p.acts[j.left].name.clone(),
                right: p.acts[j.right].name.clone(),
                rel: j.rel,
            })
            .collect();
        let event_order = p
            .event_order
            .iter()
            .map(|j| EventJudgmentDoc {
                left: p.states.event_labels(j.left),
                right: p.states.event_labels(j.right),
                rel: j.rel,
            })
            .collect();
        ProblemDoc {
            states,
            consequences,
            acts,
            events,
            preferences,
            monotone_money: p.monotone_money,
            probability: p.probability.as_ref().map(MeasureDoc::from),
            small_events: p.small_events.clone(),
            event_order,
            closure: p.preferences.mode(),
        }
    }
}

/// Parses and validates a problem file.
pub fn load_problem(document: &str) -> Result<DecisionProblem, Error> {
    let doc: ProblemDoc = serde_json::from_str(document)?;
    doc.into_problem()
}

pub fn save_problem(problem: &DecisionProblem) -> String {
    serde_json::to_string_pretty(&ProblemDoc::from_problem(problem))
        .expect("problem documents always serialise")
}

/// Label → value map for consequences carrying a monetary value.
pub fn monetary_values(problem: &DecisionProblem) -> BTreeMap<usize, Rational> {
    (0..problem.consequences.len())
        .filter_map(|i| problem.consequences.value(i).map(|v| (i, v.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HORSES: &str = r#"{
        "states": ["A", "B", "C"],
        "consequences": [{"label": "0", "value": "0"}, {"label": "25", "value": 25}, {"label": "100", "value": "100"}],
        "acts": [
            {"name": "f1", "assignment": {"A": "100", "B": "0", "C": "0"}},
            {"name": "f2", "assignment": {"A": "0", "B": "100", "C": "0"}},
            {"name": "f3", "assignment": {"A": "0", "B": "25", "C": "25"}}
        ],
        "events": {"AB": ["A", "B"]},
        "preferences": [{"left": "f3", "right": "f1", "rel": "<"}]
    }"#;

    fn horses() -> DecisionProblem {
        load_problem(HORSES).unwrap()
    }

    #[test]
    fn loads_table_of_three_horse_bets() {
        let p = horses();
        assert_eq!(p.acts().len(), 3);
        assert_eq!(p.states().len(), 3);
        assert_eq!(p.consequences().value(1), Some(&rational::int(25)));
        assert_eq!(p.describe_outcomes(p.act("f3").unwrap().outcomes()), "(0,25,25)");
    }

    #[test]
    fn partial_act_is_rejected_with_location() {
        let doc = HORSES.replace(r#""A": "0", "B": "25", "C": "25""#, r#""A": "0", "B": "25""#);
        let err = load_problem(&doc).unwrap_err().to_string();
        assert!(err.contains("partial act"), "{err}");
        assert!(err.contains("acts[2]"), "{err}");
    }

    #[test]
    fn unknown_labels_and_duplicates_are_rejected() {
        let doc = HORSES.replace(r#""C": "0"}},"#, r#""C": "7"}},"#);
        assert!(load_problem(&doc).unwrap_err().to_string().contains("unknown consequence"));
        let doc = HORSES.replace(r#"["A", "B", "C"]"#, r#"["A", "A", "C"]"#);
        assert!(load_problem(&doc).unwrap_err().to_string().contains("duplicate state"));
        let doc = HORSES.replace(r#""right": "f1""#, r#""right": "f9""#);
        assert!(load_problem(&doc).unwrap_err().to_string().contains("unknown act"));
    }

    #[test]
    fn contradictory_strict_pair_is_rejected() {
        let doc = HORSES.replace(
            r#"[{"left": "f3", "right": "f1", "rel": "<"}]"#,
            r#"[{"left": "f3", "right": "f1", "rel": "<"}, {"left": "f1", "right": "f3", "rel": "<"}]"#,
        );
        assert!(load_problem(&doc).is_err());
        let doc = HORSES.replace(r#""right": "f1""#, r#""right": "f3""#);
        assert!(load_problem(&doc).is_err());
        let doc = HORSES.replace(
            r#"[{"left": "f3", "right": "f1", "rel": "<"}]"#,
            r#"[{"left": "f3", "right": "f1", "rel": "<"}, {"left": "f1", "right": "f3", "rel": "~"}]"#,
        );
        let err = load_problem(&doc).unwrap_err().to_string();
        assert!(err.contains("preferences[1]"), "{err}");
    }

    #[test]
    fn splice_examples() {
        let p = horses();
        let f = p.act("f1").unwrap();
        let g = p.act("f2").unwrap();
        let s = p.states().full_event();
        let e = p.event("AB").unwrap();
        assert_eq!(splice(f, f, e).unwrap().outcomes(), f.outcomes());
        assert_eq!(splice(f, g, s).unwrap().outcomes(), f.outcomes());
        // Pay $100 on C, spliced with f on {A,B}: (100, 0, 100).
        let c100 = Act::constant("c100", 3, p.consequences().index_of("100").unwrap());
        let f_prime = splice(f, &c100, e).unwrap();
        assert_eq!(p.describe_outcomes(f_prime.outcomes()), "(100,0,100)");
        assert!(matches!(splice(f, g, Event::from_bits(0b1000)), Err(Error::EventOutOfRange)));
    }

    #[test]
    fn agree_on_examples() {
        let p = horses();
        let f = p.act("f1").unwrap();
        let g = p.act("f2").unwrap();
        let c100 = Act::constant("c100", 3, p.consequences().index_of("100").unwrap());
        let ab = p.event("AB").unwrap();
        let f_prime = splice(f, &c100, ab).unwrap();
        assert!(agree_on(f, f, Event::from_indices([1])).unwrap());
        assert!(agree_on(f, &f_prime, ab).unwrap());
        assert!(!agree_on(f, g, Event::from_indices([0])).unwrap());
    }

    #[test]
    fn save_then_load_is_identity() {
        let p = horses();
        let again = load_problem(&save_problem(&p)).unwrap();
        assert_eq!(p, again);
    }

    fn act_strategy(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0..k, n)
    }

    proptest! {
        #[test]
        fn splice_laws(f in act_strategy(5, 3), g in act_strategy(5, 3), h in act_strategy(5, 3), bits in 0u64..32) {
            let (f, g, h) = (Act::new("f", f), Act::new("g", g), Act::new("h", h));
            let e = Event::from_bits(bits);
            let once = splice(&f, &g, e).unwrap();
            let twice = splice(&once, &g, e).unwrap();
            prop_assert_eq!(once.outcomes(), twice.outcomes());
            let swapped = splice(&g, &f, e.complement(5)).unwrap();
            prop_assert_eq!(once.outcomes(), swapped.outcomes());
            if agree_on(&f, &g, e).unwrap() && agree_on(&g, &h, e).unwrap() {
                prop_assert!(agree_on(&f, &h, e).unwrap());
            }
        }
    }
}
