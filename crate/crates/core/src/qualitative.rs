//! Event orders ("B is not more probable than C"), their three defining
//! conditions, and agreement with a probability measure decided by LP.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decision::{DecisionProblem, Event, StateSpace};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::measure::ProbabilityMeasure;
use crate::order::{Closure, Edge};
use crate::rational::{self, Rational};
use crate::report::{AxiomId, Verdict, ViolationReport, Witness};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventRel {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "~")]
    Equivalent,
    #[serde(rename = "<=")]
    LessOrEqual,
}

impl EventRel {
    pub fn symbol(self) -> &'static str {
        match self {
            EventRel::Less => "<",
            EventRel::Equivalent => "~",
            EventRel::LessOrEqual => "<=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventJudgment {
    pub left: Event,
    pub right: Event,
    pub rel: EventRel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventOrder {
    states: StateSpace,
    judgments: Vec<EventJudgment>,
}

/// The events an order mentions, with the closure of its judgments.
pub struct EventClosure {
    pub nodes: Vec<Event>,
    pub index: HashMap<Event, usize>,
    pub closure: Closure,
}

impl EventClosure {
    pub fn node(&self, e: Event) -> Option<usize> {
        self.index.get(&e).copied()
    }

    /// `a <= b`, with identical events trivially related.
    pub fn leq(&self, a: Event, b: Event) -> bool {
        a == b
            || matches!((self.node(a), self.node(b)), (Some(x), Some(y)) if self.closure.leq(x, y))
    }

    pub fn lt(&self, a: Event, b: Event) -> bool {
        matches!((self.node(a), self.node(b)), (Some(x), Some(y)) if self.closure.lt(x, y))
    }
}

impl EventOrder {
    pub fn new(states: StateSpace, judgments: Vec<EventJudgment>) -> Result<Self, Error> {
        let n = states.len();
        for (k, j) in judgments.iter().enumerate() {
            if !j.left.fits(n) || !j.right.fits(n) {
                return Err(Error::load(format!("event_order[{k}]"), "event outside the state space"));
            }
            if j.rel == EventRel::Less && j.left == j.right {
                return Err(Error::load(
                    format!("event_order[{k}]"),
                    "an event cannot strictly precede itself",
                ));
            }
        }
        Ok(EventOrder { states, judgments })
    }

    pub fn empty(states: StateSpace) -> Self {
        EventOrder {
            states,
            judgments: Vec::new(),
        }
    }

    /// The complete order a measure induces on `events`.
    pub fn from_measure(p: &ProbabilityMeasure, events: &[Event]) -> Self {
        let mut judgments = Vec::new();
        for (i, &a) in events.iter().enumerate() {
            for &b in &events[i + 1..] {
                let (pa, pb) = (p.prob(a), p.prob(b));
                let j = if pa < pb {
                    EventJudgment {
                        left: a,
                        right: b,
                        rel: EventRel::Less,
                    }
                } else if pa > pb {
                    EventJudgment {
                        left: b,
                        right: a,
                        rel: EventRel::Less,
                    }
                } else {
                    EventJudgment {
                        left: a,
                        right: b,
                        rel: EventRel::Equivalent,
                    }
                };
                judgments.push(j);
            }
        }
        EventOrder {
            states: p.states().clone(),
            judgments,
        }
    }

    /// Declared `event_order` judgments plus those revealed by bets.
    pub fn from_problem(problem: &DecisionProblem) -> Self {
        let mut judgments: Vec<EventJudgment> = problem
            .event_order()
            .iter()
            .map(|d| EventJudgment {
                left: d.left,
                right: d.right,
                rel: d.rel,
            })
            .collect();
        for j in crate::axioms::derived_event_order(problem) {
            if !judgments.contains(&j) {
                judgments.push(j);
            }
        }
        EventOrder {
            states: problem.states().clone(),
            judgments,
        }
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn judgments(&self) -> &[EventJudgment] {
        &self.judgments
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    pub fn closure(&self) -> EventClosure {
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        let mut id = |e: Event, nodes: &mut Vec<Event>| {
            *index.entry(e).or_insert_with(|| {
                nodes.push(e);
                nodes.len() - 1
            })
        };
        let mut edges = Vec::new();
        for j in &self.judgments {
            let a = id(j.left, &mut nodes);
            let b = id(j.right, &mut nodes);
            edges.push(Edge {
                from: a,
                to: b,
                strict: j.rel == EventRel::Less,
            });
            if j.rel == EventRel::Equivalent {
                edges.push(Edge {
                    from: b,
                    to: a,
                    strict: false,
                });
            }
        }
        let closure = Closure::build(nodes.len(), edges, true);
        EventClosure {
            nodes,
            index,
            closure,
        }
    }

    /// `{s1,s2}` style rendering.
    pub fn show(&self, e: Event) -> String {
        format!("{{{}}}", self.states.event_labels(e).join(","))
    }

    pub fn describe(&self, j: &EventJudgment) -> String {
        format!("{} {} {}", self.show(j.left), j.rel.symbol(), self.show(j.right))
    }
}

/// Completeness and transitivity over the mentioned events, invariance under
/// adding a disjoint event, and nothing below the empty event.
pub fn check_qp_axioms(order: &EventOrder) -> ViolationReport {
    let c = order.closure();
    let labels = |e: Event| order.states.event_labels(e);
    let mut witnesses = Vec::new();
    let m = c.nodes.len();

    for i in 0..m {
        for j in i + 1..m {
            if !c.closure.comparable(i, j) {
                witnesses.push(Witness::EventIncomparable {
                    left: labels(c.nodes[i]),
                    right: labels(c.nodes[j]),
                });
            }
        }
    }
    for cycle in c.closure.strict_cycles() {
        witnesses.push(Witness::EventCycle {
            events: cycle.into_iter().map(|v| labels(c.nodes[v])).collect(),
        });
    }

    let mut seen = BTreeSet::new();
    for &b in &c.nodes {
        for &x in &c.nodes {
            // x = b ∪ d for a non-empty d disjoint from b.
            if x == b || !b.is_subset_of(x) {
                continue;
            }
            let d = x.difference(b);
            for &cc in &c.nodes {
                if cc == b || !cc.is_disjoint(d) {
                    continue;
                }
                let y = cc.union(d);
                if c.node(y).is_none() {
                    continue;
                }
                let forward = c.leq(b, cc) && c.lt(y, x);
                let backward = c.leq(x, y) && c.lt(cc, b);
                if (forward || backward) && seen.insert((b, cc, d)) {
                    witnesses.push(Witness::Additivity {
                        b: labels(b),
                        c: labels(cc),
                        d: labels(d),
                    });
                }
            }
        }
    }

    for &b in &c.nodes {
        if c.lt(b, Event::empty()) {
            witnesses.push(Witness::Negativity { event: labels(b) });
        }
    }

    ViolationReport::from_witnesses(AxiomId::QualitativeProbability, witnesses, Verdict::Satisfied)
}

impl Witness {
    /// Re-evaluates an event-order witness against `order`.
    pub fn reproduces_in_order(&self, order: &EventOrder) -> bool {
        let c = order.closure();
        let ev = |labels: &[String]| -> Option<Event> {
            labels
                .iter()
                .map(|l| order.states.index_of(l))
                .collect::<Option<Vec<_>>>()
                .map(Event::from_indices)
        };
        match self {
            Witness::EventIncomparable { left, right } => match (ev(left), ev(right)) {
                (Some(a), Some(b)) => a != b && !c.leq(a, b) && !c.leq(b, a),
                _ => false,
            },
            Witness::EventCycle { events } => {
                let Some(es) = events.iter().map(|e| ev(e)).collect::<Option<Vec<_>>>() else {
                    return false;
                };
                es.len() >= 2 && es.iter().all(|&e| c.lt(e, e))
            }
            Witness::Additivity { b, c: cc, d } => {
                let (Some(b), Some(cc), Some(d)) = (ev(b), ev(cc), ev(d)) else {
                    return false;
                };
                if d.is_empty() || !d.is_disjoint(b) || !d.is_disjoint(cc) {
                    return false;
                }
                let (x, y) = (b.union(d), cc.union(d));
                (c.leq(b, cc) && c.lt(y, x)) || (c.leq(x, y) && c.lt(cc, b))
            }
            Witness::Negativity { event } => ev(event).is_some_and(|b| c.lt(b, Event::empty())),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementOptions {
    /// Strict judgments need positive slack; off means "almost agrees".
    pub strict: bool,
    /// Extra constraints `P(E) = q`.
    pub pins: Vec<(Event, Rational)>,
}

impl Default for AgreementOptions {
    fn default() -> Self {
        AgreementOptions {
            strict: true,
            pins: Vec::new(),
        }
    }
}

/// A smallest set of judgments and pins that already admits no agreeing
/// measure: dropping any one of them makes the rest feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibleOrder {
    pub judgments: Vec<EventJudgment>,
    pub pins: Vec<(Event, Rational)>,
}

impl InfeasibleOrder {
    pub fn describe(&self, order: &EventOrder) -> Vec<String> {
        let mut out: Vec<String> = self.judgments.iter().map(|j| order.describe(j)).collect();
        out.extend(
            self.pins
                .iter()
                .map(|(e, q)| format!("P({}) = {}", order.show(*e), rational::format(q))),
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agreement {
    pub measure: ProbabilityMeasure,
    /// The common slack achieved by the strict judgments.
    pub slack: Rational,
}

fn coeffs(e: Event, sign: i64) -> impl Iterator<Item = (usize, Rational)> {
    e.members().map(move |s| (s, rational::int(sign)))
}

fn agreement_lp(n: usize, judgments: &[EventJudgment], pins: &[(Event, Rational)], strict: bool) -> LinearProgram {
    let delta = n;
    let mut lp = LinearProgram::new(n + 1);
    lp.constrain((0..n).map(|s| (s, Rational::one())).collect(), Relation::Eq, Rational::one());
    lp.bound_above(delta, Rational::one());
    lp.set_objective(delta, Rational::one());
    for j in judgments {
        // P(left) - P(right) (+ delta) <= 0
        let mut row: Vec<(usize, Rational)> = coeffs(j.left, 1).chain(coeffs(j.right, -1)).collect();
        match j.rel {
            EventRel::Equivalent => lp.constrain(row, Relation::Eq, Rational::zero()),
            EventRel::LessOrEqual => lp.constrain(row, Relation::Le, Rational::zero()),
            EventRel::Less => {
                if strict {
                    row.push((delta, Rational::one()));
                }
                lp.constrain(row, Relation::Le, Rational::zero())
            }
        }
    }
    for (e, q) in pins {
        lp.constrain(coeffs(*e, 1).collect(), Relation::Eq, q.clone());
    }
    lp
}

/// `Some((masses, slack))` when the judgments admit an agreeing measure.
fn solve_agreement(
    n: usize,
    judgments: &[EventJudgment],
    pins: &[(Event, Rational)],
    strict: bool,
) -> Option<(Vec<Rational>, Rational)> {
    let lp = agreement_lp(n, judgments, pins, strict);
    let sol = match lp.solve() {
        LpOutcome::Optimal(s) => s,
        _ => return None,
    };
    let needs_slack = strict && judgments.iter().any(|j| j.rel == EventRel::Less);
    if needs_slack && !sol.objective.is_positive() {
        return None;
    }
    let slack = if needs_slack { sol.objective } else { Rational::zero() };
    Some((sol.values[..n].to_vec(), slack))
}

/// Decides whether some measure agrees with every judgment of `order`.
pub fn find_agreeing_measure(order: &EventOrder, opts: &AgreementOptions) -> Result<Agreement, InfeasibleOrder> {
    let n = order.states.len();
    if order.judgments.is_empty() && opts.pins.is_empty() {
        return Ok(Agreement {
            measure: ProbabilityMeasure::uniform(order.states.clone()),
            slack: Rational::zero(),
        });
    }
    match solve_agreement(n, &order.judgments, &opts.pins, opts.strict) {
        Some((masses, slack)) => Ok(Agreement {
            measure: ProbabilityMeasure::new(order.states.clone(), masses)
                .expect("LP rows force a probability vector"),
            slack,
        }),
        None => Err(deletion_filter(n, &order.judgments, &opts.pins, opts.strict)),
    }
}

/// Drops constraints one at a time while the rest stays infeasible.
fn deletion_filter(n: usize, judgments: &[EventJudgment], pins: &[(Event, Rational)], strict: bool) -> InfeasibleOrder {
    let mut js = judgments.to_vec();
    let mut ps = pins.to_vec();
    let mut i = 0;
    while i < js.len() {
        let mut trial = js.clone();
        trial.remove(i);
        if solve_agreement(n, &trial, &ps, strict).is_none() {
            js = trial;
        } else {
            i += 1;
        }
    }
    let mut i = 0;
    while i < ps.len() {
        let mut trial = ps.clone();
        trial.remove(i);
        if solve_agreement(n, &js, &trial, strict).is_none() {
            ps = trial;
        } else {
            i += 1;
        }
    }
    InfeasibleOrder {
        judgments: js,
        pins: ps,
    }
}

/// Whether `p` honours every judgment of `order` (strictly where declared).
pub fn agrees(p: &ProbabilityMeasure, order: &EventOrder) -> bool {
    order.judgments.iter().all(|j| {
        let (a, b) = (p.prob(j.left), p.prob(j.right));
        match j.rel {
            EventRel::Less => a < b,
            EventRel::LessOrEqual => a <= b,
            EventRel::Equivalent => a == b,
        }
    })
}

/// `B <= C given D` iff `B∩D <= C∩D` in the original order.
pub fn conditional_order(order: &EventOrder, d: Event) -> Result<EventOrder, Error> {
    let n = order.states.len();
    if !d.fits(n) {
        return Err(Error::EventOutOfRange);
    }
    let c = order.closure();
    let empty = Event::empty();
    if d.is_empty() || (c.leq(d, empty) && c.leq(empty, d)) {
        return Err(Error::ConditioningOnNull);
    }
    let mut judgments = Vec::new();
    for (i, &a) in c.nodes.iter().enumerate() {
        for &b in &c.nodes[i + 1..] {
            let (x, y) = (a.intersection(d), b.intersection(d));
            let j = if x == y || (c.leq(x, y) && c.leq(y, x)) {
                EventJudgment {
                    left: a,
                    right: b,
                    rel: EventRel::Equivalent,
                }
            } else if c.lt(x, y) {
                EventJudgment {
                    left: a,
                    right: b,
                    rel: EventRel::Less,
                }
            } else if c.lt(y, x) {
                EventJudgment {
                    left: b,
                    right: a,
                    rel: EventRel::Less,
                }
            } else if c.leq(x, y) {
                EventJudgment {
                    left: a,
                    right: b,
                    rel: EventRel::LessOrEqual,
                }
            } else if c.leq(y, x) {
                EventJudgment {
                    left: b,
                    right: a,
                    rel: EventRel::LessOrEqual,
                }
            } else {
                continue;
            };
            judgments.push(j);
        }
    }
    EventOrder::new(order.states.clone(), judgments)
}

// ---------------------------------------------------------------------------
// Wire format for the `event_order` key and standalone order files.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventJudgmentWire {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub rel: EventRel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventOrderDoc {
    pub states: Vec<String>,
    pub event_order: Vec<EventJudgmentWire>,
}

impl EventOrderDoc {
    pub fn into_order(self) -> Result<EventOrder, Error> {
        let states = StateSpace::new(self.states).map_err(|e| Error::load("states", e.to_string()))?;
        let mut judgments = Vec::with_capacity(self.event_order.len());
        for (k, j) in self.event_order.iter().enumerate() {
            let loc = format!("event_order[{k}]");
            let parse = |labels: &[String]| -> Result<Event, Error> {
                let mut e = Event::empty();
                for l in labels {
                    let i = states
                        .index_of(l)
                        .ok_or_else(|| Error::load(&loc, format!("unknown state `{l}`")))?;
                    e = e.with(i);
                }
                Ok(e)
            };
            judgments.push(EventJudgment {
                left: parse(&j.left)?,
                right: parse(&j.right)?,
                rel: j.rel,
            });
        }
        EventOrder::new(states, judgments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn states(n: usize) -> StateSpace {
        StateSpace::new((1..=n).map(|i| format!("s{i}")).collect()).unwrap()
    }

    fn ev(ix: &[usize]) -> Event {
        Event::from_indices(ix.iter().copied())
    }

    fn measure() -> ProbabilityMeasure {
        ProbabilityMeasure::new(states(3), vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap()
    }

    #[test]
    fn measure_order_satisfies_conditions() {
        let order = EventOrder::from_measure(&measure(), &Event::all(3).collect::<Vec<_>>());
        assert_eq!(check_qp_axioms(&order).verdict, Verdict::Satisfied);
    }

    #[test]
    fn additivity_witness() {
        // {s1} < {s2} but {s1,s3} > {s2,s3}.
        let order = EventOrder::new(
            states(3),
            vec![
                EventJudgment {
                    left: ev(&[0]),
                    right: ev(&[1]),
                    rel: EventRel::Less,
                },
                EventJudgment {
                    left: ev(&[1, 2]),
                    right: ev(&[0, 2]),
                    rel: EventRel::Less,
                },
            ],
        )
        .unwrap();
        let r = check_qp_axioms(&order);
        assert!(r.witnesses.iter().any(|w| matches!(w, Witness::Additivity { .. })));
        assert!(r.witnesses.iter().all(|w| w.reproduces_in_order(&order)));
    }

    #[test]
    fn negativity_witness() {
        let order = EventOrder::new(
            states(2),
            vec![EventJudgment {
                left: ev(&[0]),
                right: Event::empty(),
                rel: EventRel::Less,
            }],
        )
        .unwrap();
        let r = check_qp_axioms(&order);
        assert!(r.witnesses.contains(&Witness::Negativity {
            event: vec!["s1".into()]
        }));
    }

    #[test]
    fn two_state_strict_order_gets_a_checked_measure() {
        let order = EventOrder::new(
            states(2),
            vec![EventJudgment {
                left: ev(&[0]),
                right: ev(&[1]),
                rel: EventRel::Less,
            }],
        )
        .unwrap();
        let a = find_agreeing_measure(&order, &AgreementOptions::default()).unwrap();
        assert!(a.slack.is_positive());
        assert!(a.measure.mass(0) < a.measure.mass(1));
        assert!(agrees(&a.measure, &order));
    }

    #[test]
    fn generated_order_is_recovered_event_by_event() {
        let all: Vec<Event> = Event::all(3).collect();
        let order = EventOrder::from_measure(&measure(), &all);
        let a = find_agreeing_measure(&order, &AgreementOptions::default()).unwrap();
        for &x in &all {
            for &y in &all {
                let p = measure();
                assert_eq!(p.prob(x) <= p.prob(y), a.measure.prob(x) <= a.measure.prob(y));
            }
        }
    }

    #[test]
    fn empty_order_gives_uniform() {
        let a = find_agreeing_measure(&EventOrder::empty(states(4)), &AgreementOptions::default()).unwrap();
        assert_eq!(a.measure, ProbabilityMeasure::uniform(states(4)));
    }

    #[test]
    fn infeasible_order_has_minimal_certificate() {
        // s1 < s2, s2 < s3, s3 < s1 among singletons, plus an unrelated judgment.
        let js = vec![
            EventJudgment {
                left: ev(&[0]),
                right: ev(&[1]),
                rel: EventRel::Less,
            },
            EventJudgment {
                left: Event::empty(),
                right: ev(&[0, 1, 2]),
                rel: EventRel::Less,
            },
            EventJudgment {
                left: ev(&[1]),
                right: ev(&[2]),
                rel: EventRel::Less,
            },
            EventJudgment {
                left: ev(&[2]),
                right: ev(&[0]),
                rel: EventRel::Less,
            },
        ];
        let order = EventOrder::new(states(3), js).unwrap();
        let cert = find_agreeing_measure(&order, &AgreementOptions::default()).unwrap_err();
        assert_eq!(cert.judgments.len(), 3);
        // Almost-agreement accepts the uniform-like tie.
        let loose = AgreementOptions {
            strict: false,
            ..Default::default()
        };
        assert!(find_agreeing_measure(&order, &loose).is_ok());
    }

    #[test]
    fn conditional_order_matches_conditional_measure() {
        let all: Vec<Event> = Event::all(3).collect();
        let order = EventOrder::from_measure(&measure(), &all);
        let d = ev(&[1, 2]);
        let cond = conditional_order(&order, d).unwrap();
        let pd = ProbabilityMeasure::new(states(3), vec![ratio(0, 1), ratio(2, 5), ratio(3, 5)]).unwrap();
        let expected = EventOrder::from_measure(&pd, &all).closure();
        let got = cond.closure();
        for &x in &all {
            for &y in &all {
                assert_eq!(got.leq(x, y), expected.leq(x, y), "{x:?} {y:?}");
            }
        }
        let same = conditional_order(&order, Event::full(3)).unwrap().closure();
        let original = order.closure();
        for &x in &all {
            for &y in &all {
                assert_eq!(same.leq(x, y), original.leq(x, y));
            }
        }
    }

    #[test]
    fn conditioning_on_null_event_fails() {
        let order = EventOrder::new(
            states(2),
            vec![EventJudgment {
                left: ev(&[0]),
                right: Event::empty(),
                rel: EventRel::Equivalent,
            }],
        )
        .unwrap();
        assert!(matches!(conditional_order(&order, ev(&[0])), Err(Error::ConditioningOnNull)));
    }
}
