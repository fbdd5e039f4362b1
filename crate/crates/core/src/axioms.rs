//! Checks of recorded preferences against the postulates P1–P5 and P7, plus
//! a finite small-event audit standing in for P6.
//!
//! All checks read a [`PreferenceIndex`]: the declared acts deduplicated by
//! outcome vector, one constant act per consequence (synthesised when not
//! declared), and the closure of the judgments. A spliced act that is not
//! in the index is simply unknown; checks that need one report
//! `not-decidable-from-data` instead of guessing.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_traits::Zero;

use crate::decision::{agree_fast, ClosureMode, DecisionProblem, Event, PrefRel};
use crate::measure::ProbabilityMeasure;
use crate::order::{Closure, Edge};
use crate::qualitative::{EventJudgment, EventRel};
use crate::rational::{self, Rational};
use crate::report::{ActRef, AxiomId, Ordering3, Side, Verdict, ViolationReport, Witness};
use crate::Error;

#[derive(Debug, Clone)]
pub struct CheckConfig {
    /// Witness lists are truncated past this length (a note says so).
    pub max_witnesses: usize,
    /// Missing-pair lists are truncated past this length.
    pub max_missing: usize,
    /// Events with at most this mass count as small in the P6 audit.
    pub small_event_threshold: Rational,
    /// Checks range over the declared events plus every subset when the
    /// state space has at most this many states. Larger spaces with no
    /// declared events fall back to singletons and their complements.
    pub max_enumerated_states: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            max_witnesses: 256,
            max_missing: 16,
            small_event_threshold: rational::ratio(1, 20),
            max_enumerated_states: 10,
        }
    }
}

/// Declared acts plus constants, with the closure of the judgments.
pub struct PreferenceIndex<'a> {
    problem: &'a DecisionProblem,
    outcomes: Vec<Vec<usize>>,
    names: Vec<String>,
    declared: Vec<bool>,
    lookup: HashMap<Vec<usize>, usize>,
    act_node: Vec<usize>,
    constant_node: Vec<usize>,
    closure: Closure,
}

impl<'a> PreferenceIndex<'a> {
    pub fn new(problem: &'a DecisionProblem) -> Self {
        let n = problem.states().len();
        let mut outcomes: Vec<Vec<usize>> = Vec::new();
        let mut names = Vec::new();
        let mut declared = Vec::new();
        let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut act_node = Vec::with_capacity(problem.acts().len());
        for act in problem.acts() {
            let id = *lookup.entry(act.outcomes().to_vec()).or_insert_with(|| {
                outcomes.push(act.outcomes().to_vec());
                names.push(act.name().to_string());
                declared.push(true);
                outcomes.len() - 1
            });
            act_node.push(id);
        }
        let consequences = problem.consequences();
        let mut constant_node = Vec::with_capacity(consequences.len());
        for c in 0..consequences.len() {
            let vector = vec![c; n];
            let id = *lookup.entry(vector.clone()).or_insert_with(|| {
                outcomes.push(vector);
                names.push(format!("const({})", consequences.label(c)));
                declared.push(false);
                outcomes.len() - 1
            });
            constant_node.push(id);
        }

        let mut edges = Vec::new();
        for j in problem.preferences().judgments() {
            let (a, b) = (act_node[j.left], act_node[j.right]);
            match j.rel {
                PrefRel::Less => edges.push(Edge {
                    from: a,
                    to: b,
                    strict: true,
                }),
                PrefRel::Indifferent => {
                    edges.push(Edge {
                        from: a,
                        to: b,
                        strict: false,
                    });
                    edges.push(Edge {
                        from: b,
                        to: a,
                        strict: false,
                    });
                }
            }
        }
        if problem.monotone_money() {
            for x in 0..consequences.len() {
                for y in 0..consequences.len() {
                    let (Some(vx), Some(vy)) = (consequences.value(x), consequences.value(y)) else {
                        continue;
                    };
                    if x != y && vx <= vy {
                        edges.push(Edge {
                            from: constant_node[x],
                            to: constant_node[y],
                            strict: vx < vy,
                        });
                    }
                }
            }
        }
        let transitive = problem.preferences().mode() == ClosureMode::TransitivelyClosed;
        let closure = Closure::build(outcomes.len(), edges, transitive);
        PreferenceIndex {
            problem,
            outcomes,
            names,
            declared,
            lookup,
            act_node,
            constant_node,
            closure,
        }
    }

    pub fn problem(&self) -> &DecisionProblem {
        self.problem
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn node(&self, outcomes: &[usize]) -> Option<usize> {
        self.lookup.get(outcomes).copied()
    }

    pub fn act_node(&self, act: usize) -> usize {
        self.act_node[act]
    }

    pub fn constant(&self, consequence: usize) -> usize {
        self.constant_node[consequence]
    }

    pub fn outcomes(&self, node: usize) -> &[usize] {
        &self.outcomes[node]
    }

    pub fn is_declared(&self, node: usize) -> bool {
        self.declared[node]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.closure.leq(a, b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.closure.lt(a, b)
    }

    pub fn equivalent(&self, a: usize, b: usize) -> bool {
        self.closure.equivalent(a, b)
    }

    pub fn act_ref(&self, node: usize) -> ActRef {
        ActRef {
            name: self.names[node].clone(),
            outcomes: self.problem.outcome_labels(&self.outcomes[node]),
        }
    }

    /// Reference to an outcome vector that may not be an indexed act.
    pub fn vector_ref(&self, outcomes: &[usize]) -> ActRef {
        match self.node(outcomes) {
            Some(id) => self.act_ref(id),
            None => ActRef {
                name: self.problem.describe_outcomes(outcomes),
                outcomes: self.problem.outcome_labels(outcomes),
            },
        }
    }

    pub fn resolve(&self, r: &ActRef) -> Option<usize> {
        self.node(&self.problem.outcomes_from_labels(&r.outcomes)?)
    }

    fn relation(&self, a: usize, b: usize) -> Option<Ordering3> {
        let (le, ge) = (self.leq(a, b), self.leq(b, a));
        if self.lt(a, b) {
            Some(Ordering3::Less)
        } else if self.lt(b, a) {
            Some(Ordering3::Greater)
        } else if le && ge {
            Some(Ordering3::Equivalent)
        } else {
            None
        }
    }

    /// Summary of `f' vs g'` over every common part `h` on the complement
    /// of `event`. Stops at the first unknown pair unless `collect` > 0.
    fn conditional(&self, f: &[usize], g: &[usize], event: Event, collect: usize) -> CondSummary {
        let n = f.len();
        let k = self.problem.consequences().len();
        let rest: Vec<usize> = event.complement(n).members().collect();
        let mut s = CondSummary::new();

        // Each common part gives a distinct f', so too few acts means some
        // f' is certainly unknown.
        let parts = (k as u128).checked_pow(rest.len() as u32).unwrap_or(u128::MAX);
        if collect == 0 && parts > self.outcomes.len() as u128 {
            s.undecided = true;
            return s;
        }

        let mut fp = f.to_vec();
        let mut gp = g.to_vec();
        let mut counter = vec![0usize; rest.len()];
        loop {
            for (slot, &state) in rest.iter().enumerate() {
                fp[state] = counter[slot];
                gp[state] = counter[slot];
            }
            match (self.node(&fp), self.node(&gp)) {
                (Some(a), Some(b)) if self.leq(a, b) || self.leq(b, a) => {
                    s.observe(self.leq(a, b), self.leq(b, a), self.lt(a, b), self.lt(b, a));
                }
                _ => {
                    s.undecided = true;
                    if s.missing.len() < collect {
                        s.missing.push((fp.clone(), gp.clone()));
                    }
                    if collect == 0 || s.missing.len() >= collect {
                        return s;
                    }
                }
            }
            // Advance the odometer over the common part.
            let mut slot = 0;
            loop {
                if slot == rest.len() {
                    return s;
                }
                counter[slot] += 1;
                if counter[slot] < k {
                    break;
                }
                counter[slot] = 0;
                slot += 1;
            }
        }
    }

    /// Whether `event` is null, not null, or unknown from the data.
    pub fn null_status(&self, event: Event) -> NullStatus {
        let n = self.problem.states().len();
        if event.is_empty() || self.problem.consequences().len() == 1 {
            return NullStatus::Null;
        }
        let off = event.complement(n);
        let mut all_equivalent = true;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if !agree_fast(&self.outcomes[i], &self.outcomes[j], off) {
                    continue;
                }
                if self.lt(i, j) || self.lt(j, i) {
                    return NullStatus::NotNull;
                }
                if !self.equivalent(i, j) {
                    all_equivalent = false;
                }
            }
        }
        // Nullness quantifies over every act, so every act must be known.
        let total = (self.problem.consequences().len() as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if all_equivalent && total <= self.len() as u128 {
            NullStatus::Null
        } else {
            NullStatus::Undecided
        }
    }

    fn event_labels(&self, e: Event) -> Vec<String> {
        self.problem.states().event_labels(e)
    }
}

#[derive(Debug, Clone)]
struct CondSummary {
    all_le: bool,
    all_ge: bool,
    all_lt: bool,
    all_gt: bool,
    any_le: bool,
    any_ge: bool,
    any_lt: bool,
    any_gt: bool,
    undecided: bool,
    missing: Vec<(Vec<usize>, Vec<usize>)>,
}

impl CondSummary {
    fn new() -> Self {
        CondSummary {
            all_le: true,
            all_ge: true,
            all_lt: true,
            all_gt: true,
            any_le: false,
            any_ge: false,
            any_lt: false,
            any_gt: false,
            undecided: false,
            missing: Vec::new(),
        }
    }

    fn observe(&mut self, le: bool, ge: bool, lt: bool, gt: bool) {
        self.all_le &= le;
        self.all_ge &= ge;
        self.all_lt &= lt;
        self.all_gt &= gt;
        self.any_le |= le;
        self.any_ge |= ge;
        self.any_lt |= lt;
        self.any_gt |= gt;
    }

    fn ill_defined(&self) -> bool {
        (self.any_le && self.any_gt) || (self.any_ge && self.any_lt)
    }

    fn decided(&self) -> bool {
        !self.undecided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullStatus {
    Null,
    NotNull,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionalPreference {
    /// `f <= g` given E, and not the reverse.
    FLeqG,
    GLeqF,
    Both,
    /// The order of the spliced pairs depends on the common part.
    NotWellDefined,
    NotDecidable { missing: Vec<[ActRef; 2]> },
}

fn scope(problem: &DecisionProblem, cfg: &CheckConfig) -> Vec<Event> {
    let n = problem.states().len();
    let mut seen = BTreeSet::new();
    let mut out: Vec<Event> = problem.events().iter().map(|(_, e)| *e).filter(|e| seen.insert(*e)).collect();
    if n <= cfg.max_enumerated_states {
        out.extend(Event::all(n).filter(|e| seen.insert(*e)));
    } else if out.is_empty() {
        for i in 0..n {
            let e = Event::from_indices([i]);
            out.push(e);
            out.push(e.complement(n));
        }
    }
    out
}

fn finish(mut report: ViolationReport, cfg: &CheckConfig) -> ViolationReport {
    if report.witnesses.len() > cfg.max_witnesses {
        let total = report.witnesses.len();
        report.witnesses.truncate(cfg.max_witnesses);
        report
            .notes
            .push(format!("{total} witnesses found; first {} kept", cfg.max_witnesses));
    }
    report
}

/// Completeness and transitivity, as two reports.
pub fn check_p1(problem: &DecisionProblem, cfg: &CheckConfig) -> (ViolationReport, ViolationReport) {
    let idx = PreferenceIndex::new(problem);
    (p1_complete(&idx, cfg), p1_transitive(&idx, cfg))
}

fn p1_complete(idx: &PreferenceIndex, cfg: &CheckConfig) -> ViolationReport {
    let declared: Vec<usize> = (0..idx.len()).filter(|&i| idx.is_declared(i)).collect();
    let mut witnesses = Vec::new();
    for (k, &a) in declared.iter().enumerate() {
        for &b in &declared[k + 1..] {
            if !idx.leq(a, b) && !idx.leq(b, a) {
                witnesses.push(Witness::Incomparable {
                    left: idx.act_ref(a),
                    right: idx.act_ref(b),
                });
            }
        }
    }
    finish(
        ViolationReport::from_witnesses(AxiomId::P1Complete, witnesses, Verdict::Satisfied),
        cfg,
    )
}

fn p1_transitive(idx: &PreferenceIndex, cfg: &CheckConfig) -> ViolationReport {
    let witnesses = idx
        .closure
        .strict_cycles()
        .into_iter()
        .map(|cycle| Witness::Cycle {
            acts: cycle.into_iter().map(|v| idx.act_ref(v)).collect(),
        })
        .collect();
    finish(
        ViolationReport::from_witnesses(AxiomId::P1Transitive, witnesses, Verdict::Satisfied),
        cfg,
    )
}

/// The conditional preference between `f` and `g` given `event`, with the
/// common part ranging over the declared consequences.
pub fn conditional_preference(
    problem: &DecisionProblem,
    f: &crate::decision::Act,
    g: &crate::decision::Act,
    event: Event,
    cfg: &CheckConfig,
) -> Result<ConditionalPreference, Error> {
    let n = problem.states().len();
    if !event.fits(n) {
        return Err(Error::EventOutOfRange);
    }
    if f.outcomes().len() != n || g.outcomes().len() != n {
        return Err(Error::invalid("act does not cover the state space"));
    }
    let idx = PreferenceIndex::new(problem);
    let s = idx.conditional(f.outcomes(), g.outcomes(), event, cfg.max_missing.max(1));
    Ok(summarise(&idx, &s))
}

fn summarise(idx: &PreferenceIndex, s: &CondSummary) -> ConditionalPreference {
    if s.ill_defined() {
        return ConditionalPreference::NotWellDefined;
    }
    if s.undecided {
        return ConditionalPreference::NotDecidable {
            missing: s
                .missing
                .iter()
                .map(|(a, b)| [idx.vector_ref(a), idx.vector_ref(b)])
                .collect(),
        };
    }
    match (s.all_le, s.all_ge) {
        (true, true) => ConditionalPreference::Both,
        (true, false) => ConditionalPreference::FLeqG,
        (false, true) => ConditionalPreference::GLeqF,
        (false, false) => ConditionalPreference::NotWellDefined,
    }
}

type Pair = (usize, usize);

/// Sure-thing principle over every quadruple of indexed acts.
pub fn check_p2(problem: &DecisionProblem, cfg: &CheckConfig) -> ViolationReport {
    let idx = PreferenceIndex::new(problem);
    p2(&idx, &scope(problem, cfg), cfg)
}

fn restrict(v: &[usize], e: Event) -> Vec<usize> {
    e.members().map(|s| v[s]).collect()
}

fn p2(idx: &PreferenceIndex, events: &[Event], cfg: &CheckConfig) -> ViolationReport {
    let n = idx.problem.states().len();
    let full = Event::full(n);
    let mut witnesses = Vec::new();
    for &e in events {
        if e.is_empty() || e == full {
            continue;
        }
        let off = e.complement(n);
        // Ordered pairs agreeing off E, grouped by their restriction to E.
        let mut groups: BTreeMap<(Vec<usize>, Vec<usize>), Vec<Pair>> = BTreeMap::new();
        for i in 0..idx.len() {
            for j in 0..idx.len() {
                if i != j && agree_fast(&idx.outcomes[i], &idx.outcomes[j], off) {
                    groups
                        .entry((restrict(&idx.outcomes[i], e), restrict(&idx.outcomes[j], e)))
                        .or_default()
                        .push((i, j));
                }
            }
        }
        for members in groups.values().filter(|m| m.len() > 1) {
            for &(f, g) in members {
                if !idx.leq(f, g) {
                    continue;
                }
                for &(fp, gp) in members {
                    if (fp, gp) != (f, g) && idx.lt(gp, fp) {
                        witnesses.push(Witness::SureThing {
                            event: idx.event_labels(e),
                            f: idx.act_ref(f),
                            g: idx.act_ref(g),
                            f_prime: idx.act_ref(fp),
                            g_prime: idx.act_ref(gp),
                        });
                    }
                }
            }
        }
    }
    finish(
        ViolationReport::from_witnesses(AxiomId::P2, witnesses, Verdict::Satisfied),
        cfg,
    )
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NullEvents {
    pub null: Vec<Event>,
    pub not_null: Vec<Event>,
    /// Events whose status needs judgments the data lacks.
    pub undecided: Vec<Event>,
}

pub fn null_events(problem: &DecisionProblem, cfg: &CheckConfig) -> NullEvents {
    let idx = PreferenceIndex::new(problem);
    let mut out = NullEvents::default();
    for e in scope(problem, cfg) {
        match idx.null_status(e) {
            NullStatus::Null => out.null.push(e),
            NullStatus::NotNull => out.not_null.push(e),
            NullStatus::Undecided => out.undecided.push(e),
        }
    }
    out
}

/// Ordering of constant acts must survive conditioning on a non-null event.
pub fn check_p3(problem: &DecisionProblem, cfg: &CheckConfig) -> ViolationReport {
    let idx = PreferenceIndex::new(problem);
    p3(&idx, &scope(problem, cfg), cfg)
}

fn p3_mismatch(idx: &PreferenceIndex, e: Event, x: usize, y: usize) -> Option<(Option<Ordering3>, Witness)> {
    let (cx, cy) = (idx.constant(x), idx.constant(y));
    let uncond = idx.relation(cx, cy)?;
    let s = idx.conditional(idx.outcomes(cx), idx.outcomes(cy), e, 0);
    if !s.decided() || s.ill_defined() {
        return None;
    }
    let cond = if s.all_le && s.all_ge {
        Ordering3::Equivalent
    } else if s.all_lt {
        Ordering3::Less
    } else if s.all_gt {
        Ordering3::Greater
    } else if s.all_le {
        Ordering3::LessOrEqual
    } else if s.all_ge {
        Ordering3::GreaterOrEqual
    } else {
        return None;
    };
    let clash = match uncond {
        Ordering3::Less => s.all_ge,
        Ordering3::Greater => s.all_le,
        Ordering3::Equivalent => s.all_lt || s.all_gt,
        _ => false,
    };
    let labels = idx.problem.consequences();
    let witness = Witness::ConditionalMismatch {
        event: idx.event_labels(e),
        low: labels.label(x).to_string(),
        high: labels.label(y).to_string(),
        unconditional: uncond,
        conditional: cond,
    };
    Some((clash.then_some(uncond), witness))
}

fn p3(idx: &PreferenceIndex, events: &[Event], cfg: &CheckConfig) -> ViolationReport {
    let k = idx.problem.consequences().len();
    let mut witnesses = Vec::new();
    let mut decided = false;
    for &e in events {
        if idx.null_status(e) != NullStatus::NotNull {
            continue;
        }
        for x in 0..k {
            for y in x + 1..k {
                if let Some((clash, w)) = p3_mismatch(idx, e, x, y) {
                    decided = true;
                    if clash.is_some() {
                        witnesses.push(w);
                    }
                }
            }
        }
    }
    let fallback = if decided {
        Verdict::Satisfied
    } else {
        Verdict::NotDecidable
    };
    finish(ViolationReport::from_witnesses(AxiomId::P3, witnesses, fallback), cfg)
}

/// `(win, lose)` → event → bet act, for every indexed act shaped like a bet.
fn bets(idx: &PreferenceIndex) -> BTreeMap<(usize, usize), BTreeMap<Event, usize>> {
    let k = idx.problem.consequences().len();
    let n = idx.problem.states().len();
    let strictly = |lo: usize, hi: usize| idx.lt(idx.constant(lo), idx.constant(hi));
    let mut out: BTreeMap<(usize, usize), BTreeMap<Event, usize>> = BTreeMap::new();
    for node in 0..idx.len() {
        let o = idx.outcomes(node);
        let values: BTreeSet<usize> = o.iter().copied().collect();
        let values: Vec<usize> = values.into_iter().collect();
        match values[..] {
            [c] => {
                for other in (0..k).filter(|&other| other != c) {
                    if strictly(other, c) {
                        out.entry((c, other)).or_default().insert(Event::full(n), node);
                    }
                    if strictly(c, other) {
                        out.entry((other, c)).or_default().insert(Event::empty(), node);
                    }
                }
            }
            [x, y] => {
                let (win, lose) = if strictly(y, x) {
                    (x, y)
                } else if strictly(x, y) {
                    (y, x)
                } else {
                    continue;
                };
                let a = Event::from_indices((0..n).filter(|&s| o[s] == win));
                out.entry((win, lose)).or_default().insert(a, node);
            }
            _ => {}
        }
    }
    out
}

/// Betting on A rather than B must not depend on the stakes.
pub fn check_p4(problem: &DecisionProblem, cfg: &CheckConfig) -> ViolationReport {
    let idx = PreferenceIndex::new(problem);
    let groups = bets(&idx);
    let mut witnesses = Vec::new();
    for (key1, g1) in &groups {
        for (key2, g2) in &groups {
            if key1 == key2 {
                continue;
            }
            for (&a, &fa) in g1 {
                for (&b, &fb) in g1 {
                    if a == b || !idx.leq(fa, fb) {
                        continue;
                    }
                    if let (Some(&ga), Some(&gb)) = (g2.get(&a), g2.get(&b)) {
                        if idx.lt(gb, ga) {
                            witnesses.push(Witness::BetReversal {
                                a: idx.event_labels(a),
                                b: idx.event_labels(b),
                                f_a: idx.act_ref(fa),
                                f_b: idx.act_ref(fb),
                                g_a: idx.act_ref(ga),
                                g_b: idx.act_ref(gb),
                            });
                        }
                    }
                }
            }
        }
    }
    finish(
        ViolationReport::from_witnesses(AxiomId::P4, witnesses, Verdict::Satisfied),
        cfg,
    )
}

/// Some pair of consequences must be strictly ordered.
pub fn check_p5(problem: &DecisionProblem, _cfg: &CheckConfig) -> ViolationReport {
    let idx = PreferenceIndex::new(problem);
    let k = problem.consequences().len();
    for x in 0..k {
        for y in 0..k {
            if idx.lt(idx.constant(x), idx.constant(y)) {
                return ViolationReport::new(AxiomId::P5, Verdict::Satisfied);
            }
        }
    }
    if problem.preferences().is_empty() && !problem.monotone_money() {
        return ViolationReport::new(AxiomId::P5, Verdict::NotDecidable)
            .with_note("no judgments recorded");
    }
    let all_equivalent = (0..idx.len()).all(|a| (0..idx.len()).all(|b| idx.equivalent(a, b)));
    if all_equivalent {
        let acts = (0..idx.len()).map(|v| idx.act_ref(v)).collect();
        ViolationReport::from_witnesses(
            AxiomId::P5,
            vec![Witness::AllIndifferent { acts }],
            Verdict::Satisfied,
        )
    } else {
        ViolationReport::new(AxiomId::P5, Verdict::NotDecidable)
            .with_note("no strict judgment between constant acts")
    }
}

/// Strong dominance, conditional on each event in scope, plus statewise
/// dominance inversions.
pub fn check_p7(problem: &DecisionProblem, cfg: &CheckConfig) -> ViolationReport {
    let idx = PreferenceIndex::new(problem);
    p7(&idx, &scope(problem, cfg), cfg)
}

fn p7(idx: &PreferenceIndex, events: &[Event], cfg: &CheckConfig) -> ViolationReport {
    let mut witnesses = Vec::new();
    let mut fired = false;
    let n = idx.problem.states().len();

    for f in 0..idx.len() {
        for g in 0..idx.len() {
            if f == g {
                continue;
            }
            let (of, og) = (idx.outcomes(f), idx.outcomes(g));
            if (0..n).all(|s| idx.leq(idx.constant(of[s]), idx.constant(og[s]))) {
                fired = true;
                if idx.lt(g, f) {
                    witnesses.push(Witness::StatewiseDominance {
                        f: idx.act_ref(f),
                        g: idx.act_ref(g),
                    });
                }
            }
        }
    }

    for &b in events {
        if b.is_empty() {
            continue;
        }
        // Memo of f against each constant, given b.
        let mut against_const: HashMap<(usize, usize), CondSummary> = HashMap::new();
        let mut cond = |idx: &PreferenceIndex, f: usize, c: usize| -> CondSummary {
            against_const
                .entry((f, c))
                .or_insert_with(|| idx.conditional(idx.outcomes(f), idx.outcomes(idx.constant(c)), b, 0))
                .clone()
        };
        for f in 0..idx.len() {
            for g in 0..idx.len() {
                if f == g {
                    continue;
                }
                let og = idx.outcomes(g).to_vec();
                let sums: Vec<CondSummary> = b.members().map(|s| cond(idx, f, og[s])).collect();
                if sums.iter().any(|s| !s.decided() || s.ill_defined()) {
                    continue;
                }
                let below = sums.iter().all(|s| s.all_le);
                let above = sums.iter().all(|s| s.all_ge);
                if !below && !above {
                    continue;
                }
                let fg = idx.conditional(idx.outcomes(f), &og, b, 0);
                if !fg.decided() {
                    continue;
                }
                fired = true;
                if below && fg.all_gt {
                    witnesses.push(Witness::Dominance {
                        event: idx.event_labels(b),
                        f: idx.act_ref(f),
                        g: idx.act_ref(g),
                        dual: false,
                    });
                }
                if above && fg.all_lt {
                    witnesses.push(Witness::Dominance {
                        event: idx.event_labels(b),
                        f: idx.act_ref(f),
                        g: idx.act_ref(g),
                        dual: true,
                    });
                }
            }
        }
    }
    let fallback = if fired {
        Verdict::Satisfied
    } else {
        Verdict::NotDecidable
    };
    finish(ViolationReport::from_witnesses(AxiomId::P7, witnesses, fallback), cfg)
}

/// Replays declared strict preferences with one side changed on a small
/// event, flagging every change that reverses the preference.
pub fn small_event_continuity_audit(
    problem: &DecisionProblem,
    small_events: &[Event],
    probability: Option<&ProbabilityMeasure>,
    cfg: &CheckConfig,
) -> Result<ViolationReport, Error> {
    let p = probability.ok_or(Error::MissingProbability)?;
    if *p.states() != *problem.states() {
        return Err(Error::invalid("probability is over a different state space"));
    }
    let idx = PreferenceIndex::new(problem);
    let n = problem.states().len();
    let k = problem.consequences().len();
    let mut witnesses = Vec::new();
    let mut notes = Vec::new();
    let mut audited = 0usize;

    for &e in small_events {
        if !e.fits(n) {
            return Err(Error::EventOutOfRange);
        }
        let mass = p.prob(e);
        if mass > cfg.small_event_threshold {
            notes.push(format!(
                "{} skipped: mass {} exceeds threshold {}",
                problem.states().event_labels(e).join(","),
                rational::format(&mass),
                rational::format(&cfg.small_event_threshold)
            ));
            continue;
        }
        for j in problem.preferences().judgments() {
            if j.rel != PrefRel::Less {
                continue;
            }
            let (l, r) = (idx.act_node(j.left), idx.act_node(j.right));
            for h in 0..k {
                for side in [Side::Left, Side::Right] {
                    let base = match side {
                        Side::Left => l,
                        Side::Right => r,
                    };
                    let mut modified = idx.outcomes(base).to_vec();
                    for s in e.members() {
                        modified[s] = h;
                    }
                    if modified == idx.outcomes(base) {
                        continue;
                    }
                    let Some(m) = idx.node(&modified) else {
                        continue;
                    };
                    audited += 1;
                    let reversed = match side {
                        Side::Left => idx.leq(r, m),
                        Side::Right => idx.leq(m, l),
                    };
                    if reversed {
                        let constant = |v: &[usize]| v.iter().all(|&c| c == v[0]);
                        witnesses.push(Witness::SmallEventReversal {
                            event: idx.event_labels(e),
                            mass: mass.clone(),
                            consequence: problem.consequences().label(h).to_string(),
                            left: idx.act_ref(l),
                            right: idx.act_ref(r),
                            modified: idx.act_ref(m),
                            modified_side: side,
                            creates_sure_act: constant(&modified) && !constant(idx.outcomes(base)),
                            removes_sure_act: !constant(&modified) && constant(idx.outcomes(base)),
                        });
                    }
                }
            }
        }
    }
    let fallback = if audited > 0 {
        Verdict::Satisfied
    } else {
        Verdict::NotDecidable
    };
    let mut report = ViolationReport::from_witnesses(AxiomId::P6Audit, witnesses, fallback);
    report.notes = notes;
    Ok(finish(report, cfg))
}

/// Event comparisons revealed by bets with a common pair of stakes.
pub fn derived_event_order(problem: &DecisionProblem) -> Vec<EventJudgment> {
    let idx = PreferenceIndex::new(problem);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for group in bets(&idx).values() {
        let entries: Vec<(Event, usize)> = group.iter().map(|(e, v)| (*e, *v)).collect();
        for &(a, fa) in &entries {
            for &(b, fb) in &entries {
                if a == b {
                    continue;
                }
                let rel = if idx.lt(fa, fb) {
                    EventRel::Less
                } else if idx.equivalent(fa, fb) {
                    if a > b {
                        continue;
                    }
                    EventRel::Equivalent
                } else if idx.leq(fa, fb) {
                    EventRel::LessOrEqual
                } else {
                    continue;
                };
                let j = EventJudgment {
                    left: a,
                    right: b,
                    rel,
                };
                if seen.insert(j) {
                    out.push(j);
                }
            }
        }
    }
    out
}

/// Every act-level check; the audit runs when the problem carries a measure.
pub fn check_all(problem: &DecisionProblem, cfg: &CheckConfig) -> Vec<ViolationReport> {
    let idx = PreferenceIndex::new(problem);
    let events = scope(problem, cfg);
    let mut out = vec![
        p1_complete(&idx, cfg),
        p1_transitive(&idx, cfg),
        p2(&idx, &events, cfg),
        p3(&idx, &events, cfg),
        check_p4(problem, cfg),
        check_p5(problem, cfg),
        p7(&idx, &events, cfg),
    ];
    if let Some(p) = problem.probability() {
        let small = audit_events(problem, p, cfg);
        if let Ok(r) = small_event_continuity_audit(problem, &small, Some(p), cfg) {
            out.push(r);
        }
    }
    out
}

/// Declared small events, or else every singleton under the threshold.
pub fn audit_events(problem: &DecisionProblem, p: &ProbabilityMeasure, cfg: &CheckConfig) -> Vec<Event> {
    let declared = problem.small_events();
    if !declared.is_empty() {
        return declared;
    }
    (0..problem.states().len())
        .map(|i| Event::from_indices([i]))
        .filter(|e| p.prob(*e) <= cfg.small_event_threshold)
        .collect()
}

fn event_of(problem: &DecisionProblem, labels: &[String]) -> Option<Event> {
    labels
        .iter()
        .map(|l| problem.states().index_of(l))
        .collect::<Option<Vec<_>>>()
        .map(Event::from_indices)
}

impl Witness {
    /// Re-evaluates this witness against `problem` from scratch.
    pub fn reproduces(&self, problem: &DecisionProblem) -> bool {
        let idx = PreferenceIndex::new(problem);
        let n = problem.states().len();
        match self {
            Witness::Incomparable { left, right } => match (idx.resolve(left), idx.resolve(right)) {
                (Some(a), Some(b)) => a != b && !idx.leq(a, b) && !idx.leq(b, a),
                _ => false,
            },
            Witness::Cycle { acts } => {
                let Some(nodes) = acts.iter().map(|a| idx.resolve(a)).collect::<Option<Vec<_>>>() else {
                    return false;
                };
                if nodes.len() < 2 {
                    return false;
                }
                let links: Vec<(usize, usize)> = (0..nodes.len())
                    .map(|i| (nodes[i], nodes[(i + 1) % nodes.len()]))
                    .collect();
                let declared = |a: usize, b: usize, strict: bool| {
                    idx.closure
                        .edges()
                        .iter()
                        .any(|e| e.from == a && e.to == b && (e.strict || !strict))
                };
                links.iter().all(|&(a, b)| declared(a, b, false))
                    && links.iter().any(|&(a, b)| declared(a, b, true))
            }
            Witness::SureThing {
                event,
                f,
                g,
                f_prime,
                g_prime,
            } => {
                let (Some(e), Some(a), Some(b), Some(c), Some(d)) = (
                    event_of(problem, event),
                    idx.resolve(f),
                    idx.resolve(g),
                    idx.resolve(f_prime),
                    idx.resolve(g_prime),
                ) else {
                    return false;
                };
                let off = e.complement(n);
                let (oa, ob, oc, od) = (idx.outcomes(a), idx.outcomes(b), idx.outcomes(c), idx.outcomes(d));
                agree_fast(oa, ob, off)
                    && agree_fast(oc, od, off)
                    && agree_fast(oa, oc, e)
                    && agree_fast(ob, od, e)
                    && idx.leq(a, b)
                    && idx.lt(d, c)
            }
            Witness::ConditionalMismatch {
                event, low, high, ..
            } => {
                let cs = problem.consequences();
                let (Some(e), Some(x), Some(y)) = (event_of(problem, event), cs.index_of(low), cs.index_of(high))
                else {
                    return false;
                };
                idx.null_status(e) == NullStatus::NotNull
                    && matches!(p3_mismatch(&idx, e, x, y), Some((Some(_), _)))
            }
            Witness::BetReversal {
                a,
                b,
                f_a,
                f_b,
                g_a,
                g_b,
            } => {
                let (Some(ea), Some(eb)) = (event_of(problem, a), event_of(problem, b)) else {
                    return false;
                };
                let (Some(fa), Some(fb), Some(ga), Some(gb)) =
                    (idx.resolve(f_a), idx.resolve(f_b), idx.resolve(g_a), idx.resolve(g_b))
                else {
                    return false;
                };
                // Two distinct stake pairs, each holding its bets on both events.
                let groups = bets(&idx);
                let holds = |g: &BTreeMap<Event, usize>, x: usize, y: usize| g.get(&ea) == Some(&x) && g.get(&eb) == Some(&y);
                let first: Vec<_> = groups.iter().filter(|(_, g)| holds(g, fa, fb)).map(|(k, _)| *k).collect();
                let second: Vec<_> = groups.iter().filter(|(_, g)| holds(g, ga, gb)).map(|(k, _)| *k).collect();
                ea != eb
                    && first.iter().any(|k1| second.iter().any(|k2| k1 != k2))
                    && idx.leq(fa, fb)
                    && idx.lt(gb, ga)
            }
            Witness::AllIndifferent { acts } => {
                let Some(nodes) = acts.iter().map(|a| idx.resolve(a)).collect::<Option<Vec<_>>>() else {
                    return false;
                };
                check_p5(problem, &CheckConfig::default()).verdict == Verdict::Violated
                    && nodes.iter().all(|&a| nodes.iter().all(|&b| idx.equivalent(a, b)))
            }
            Witness::StatewiseDominance { f, g } => {
                let (Some(a), Some(b)) = (idx.resolve(f), idx.resolve(g)) else {
                    return false;
                };
                let (oa, ob) = (idx.outcomes(a), idx.outcomes(b));
                (0..n).all(|s| idx.leq(idx.constant(oa[s]), idx.constant(ob[s]))) && idx.lt(b, a)
            }
            Witness::Dominance { event, f, g, dual } => {
                let (Some(e), Some(a), Some(b)) = (event_of(problem, event), idx.resolve(f), idx.resolve(g)) else {
                    return false;
                };
                let og = idx.outcomes(b).to_vec();
                let sums: Vec<CondSummary> = e
                    .members()
                    .map(|s| idx.conditional(idx.outcomes(a), idx.outcomes(idx.constant(og[s])), e, 0))
                    .collect();
                if sums.iter().any(|s| !s.decided() || s.ill_defined()) {
                    return false;
                }
                let fg = idx.conditional(idx.outcomes(a), &og, e, 0);
                if *dual {
                    sums.iter().all(|s| s.all_ge) && fg.decided() && fg.all_lt
                } else {
                    sums.iter().all(|s| s.all_le) && fg.decided() && fg.all_gt
                }
            }
            Witness::SmallEventReversal {
                event,
                mass,
                consequence,
                left,
                right,
                modified,
                modified_side,
                ..
            } => {
                let (Some(e), Some(h), Some(l), Some(r), Some(m)) = (
                    event_of(problem, event),
                    problem.consequences().index_of(consequence),
                    idx.resolve(left),
                    idx.resolve(right),
                    idx.resolve(modified),
                ) else {
                    return false;
                };
                if let Some(p) = problem.probability() {
                    if p.prob(e) != *mass {
                        return false;
                    }
                }
                let declared = problem.preferences().judgments().iter().any(|j| {
                    j.rel == PrefRel::Less && idx.act_node(j.left) == l && idx.act_node(j.right) == r
                });
                let base = match modified_side {
                    Side::Left => l,
                    Side::Right => r,
                };
                let mut expect = idx.outcomes(base).to_vec();
                for s in e.members() {
                    expect[s] = h;
                }
                let reversed = match modified_side {
                    Side::Left => idx.leq(r, m),
                    Side::Right => idx.leq(m, l),
                };
                declared && expect == idx.outcomes(m) && reversed
            }
            Witness::JudgmentMismatch {
                left,
                right,
                declared,
                left_value,
                right_value,
            } => {
                let (Some(a), Some(b)) = (idx.resolve(left), idx.resolve(right)) else {
                    return false;
                };
                let rel = match declared {
                    Ordering3::Less => PrefRel::Less,
                    Ordering3::Equivalent => PrefRel::Indifferent,
                    _ => return false,
                };
                let present = problem
                    .preferences()
                    .judgments()
                    .iter()
                    .any(|j| j.rel == rel && idx.act_node(j.left) == a && idx.act_node(j.right) == b);
                let contradicted = match rel {
                    PrefRel::Less => left_value >= right_value,
                    PrefRel::Indifferent => left_value != right_value,
                };
                present && contradicted
            }
            Witness::EventIncomparable { .. }
            | Witness::EventCycle { .. }
            | Witness::Additivity { .. }
            | Witness::Negativity { .. } => false,
        }
    }
}

/// Sum of a mass vector over an event, used by tests and generators.
pub fn event_mass(masses: &[Rational], e: Event) -> Rational {
    e.members().fold(Rational::zero(), |acc, s| acc + &masses[s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::load_problem;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    fn problem(states: &[&str], consequences: &[&str], acts: &[(&str, &[&str])], prefs: &[(&str, &str, &str)]) -> String {
        let states_json: Vec<String> = states.iter().map(|s| format!("\"{s}\"")).collect();
        let cons_json: Vec<String> = consequences
            .iter()
            .map(|c| format!("{{\"label\": \"{c}\", \"value\": \"{c}\"}}"))
            .collect();
        let acts_json: Vec<String> = acts
            .iter()
            .map(|(name, outs)| {
                let pairs: Vec<String> = states
                    .iter()
                    .zip(outs.iter())
                    .map(|(s, o)| format!("\"{s}\": \"{o}\""))
                    .collect();
                format!("{{\"name\": \"{name}\", \"assignment\": {{{}}}}}", pairs.join(", "))
            })
            .collect();
        let prefs_json: Vec<String> = prefs
            .iter()
            .map(|(l, r, rel)| format!("{{\"left\": \"{l}\", \"right\": \"{r}\", \"rel\": \"{rel}\"}}"))
            .collect();
        format!(
            "{{\"states\": [{}], \"consequences\": [{}], \"acts\": [{}], \"preferences\": [{}]}}",
            states_json.join(", "),
            cons_json.join(", "),
            acts_json.join(", "),
            prefs_json.join(", ")
        )
    }

    fn horses(prefs: &[(&str, &str, &str)]) -> DecisionProblem {
        load_problem(&problem(
            &["A", "B", "C"],
            &["0", "25", "100"],
            &[
                ("f1", &["100", "0", "0"]),
                ("f2", &["0", "100", "0"]),
                ("f3", &["0", "25", "25"]),
            ],
            prefs,
        ))
        .unwrap()
    }

    #[test]
    fn three_cycle_is_intransitive() {
        let p = horses(&[("f1", "f2", "<"), ("f2", "f3", "<"), ("f3", "f1", "<")]);
        let (_, t) = check_p1(&p, &cfg());
        assert_eq!(t.verdict, Verdict::Violated);
        let Witness::Cycle { acts } = &t.witnesses[0] else {
            panic!("expected a cycle")
        };
        let names: Vec<&str> = acts.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["f1", "f2", "f3"]);
        assert!(t.witnesses[0].reproduces(&p));
    }

    #[test]
    fn chain_closes_to_complete() {
        let p = horses(&[("f1", "f2", "<"), ("f2", "f3", "<")]);
        let (c, t) = check_p1(&p, &cfg());
        assert_eq!(c.verdict, Verdict::Satisfied);
        assert_eq!(t.verdict, Verdict::Satisfied);
    }

    #[test]
    fn sparse_horse_judgments_are_incomplete() {
        let p = horses(&[("f3", "f1", "<")]);
        let (c, _) = check_p1(&p, &cfg());
        assert_eq!(c.verdict, Verdict::Violated);
        let pairs: Vec<(String, String)> = c
            .witnesses
            .iter()
            .map(|w| match w {
                Witness::Incomparable { left, right } => (left.name.clone(), right.name.clone()),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(pairs, [("f1".into(), "f2".into()), ("f2".into(), "f3".into())]);
        assert!(c.witnesses.iter().all(|w| w.reproduces(&p)));
    }

    fn table2(prefs: &[(&str, &str, &str)]) -> DecisionProblem {
        load_problem(&problem(
            &["A", "B", "C"],
            &["0", "100"],
            &[
                ("f", &["100", "0", "0"]),
                ("g", &["0", "100", "0"]),
                ("f'", &["100", "0", "100"]),
                ("g'", &["0", "100", "100"]),
            ],
            prefs,
        ))
        .unwrap()
    }

    #[test]
    fn conditional_preference_on_table_two() {
        let ab = Event::from_indices([0, 1]);
        let p = table2(&[("f", "g", "<"), ("f'", "g'", "<")]);
        let (f, g) = (p.act("f").unwrap(), p.act("g").unwrap());
        assert_eq!(
            conditional_preference(&p, f, g, ab, &cfg()).unwrap(),
            ConditionalPreference::FLeqG
        );
        let p = table2(&[("f", "g", "<"), ("g'", "f'", "<")]);
        let (f, g) = (p.act("f").unwrap(), p.act("g").unwrap());
        assert_eq!(
            conditional_preference(&p, f, g, ab, &cfg()).unwrap(),
            ConditionalPreference::NotWellDefined
        );
        // Given the whole space it is the plain preference.
        let full = Event::full(3);
        assert_eq!(
            conditional_preference(&p, f, g, full, &cfg()).unwrap(),
            ConditionalPreference::FLeqG
        );
    }

    #[test]
    fn conditional_preference_lists_missing_pairs() {
        let p = table2(&[("f", "g", "<")]);
        let (f, g) = (p.act("f").unwrap(), p.act("g").unwrap());
        match conditional_preference(&p, f, g, Event::from_indices([0, 1]), &cfg()).unwrap() {
            ConditionalPreference::NotDecidable { missing } => {
                assert_eq!(missing.len(), 1);
                assert_eq!(missing[0][0].name, "f'");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    fn allais(first: (&str, &str), second: (&str, &str)) -> DecisionProblem {
        load_problem(&problem(
            &["1", "2-11", "12-100"],
            &["0", "500", "2500"],
            &[
                ("I", &["500", "500", "500"]),
                ("II", &["0", "2500", "500"]),
                ("III", &["500", "500", "0"]),
                ("IV", &["0", "2500", "0"]),
            ],
            &[(first.0, first.1, "<"), (second.0, second.1, "<")],
        ))
        .unwrap()
    }

    #[test]
    fn allais_mixed_pattern_violates_p2() {
        let p = allais(("II", "I"), ("III", "IV"));
        let r = check_p2(&p, &cfg());
        assert_eq!(r.verdict, Verdict::Violated);
        let expected = Witness::SureThing {
            event: vec!["1".into(), "2-11".into()],
            f: p_ref(&p, "II"),
            g: p_ref(&p, "I"),
            f_prime: p_ref(&p, "IV"),
            g_prime: p_ref(&p, "III"),
        };
        assert!(r.witnesses.contains(&expected), "{:?}", r.witnesses);
        assert!(r.witnesses.iter().all(|w| w.reproduces(&p)));
    }

    fn p_ref(p: &DecisionProblem, name: &str) -> ActRef {
        ActRef {
            name: name.into(),
            outcomes: p.outcome_labels(p.act(name).unwrap().outcomes()),
        }
    }

    #[test]
    fn allais_pure_pattern_satisfies_p2() {
        let p = allais(("II", "I"), ("IV", "III"));
        assert_eq!(check_p2(&p, &cfg()).verdict, Verdict::Satisfied);
        let single = load_problem(&problem(&["s"], &["0"], &[("f", &["0"])], &[])).unwrap();
        assert_eq!(check_p2(&single, &cfg()).verdict, Verdict::Satisfied);
    }

    fn two_state(prefs: &[(&str, &str, &str)]) -> DecisionProblem {
        load_problem(&problem(
            &["healthy", "sick"],
            &["0", "100"],
            &[
                ("c0", &["0", "0"]),
                ("c100", &["100", "100"]),
                ("h100", &["100", "0"]),
                ("s100", &["0", "100"]),
            ],
            prefs,
        ))
        .unwrap()
    }

    #[test]
    fn p3_consistent_and_inverted() {
        // Money is better in either state.
        let ok = two_state(&[("c0", "h100", "<"), ("h100", "c100", "<"), ("c0", "s100", "<"), ("s100", "c100", "<")]);
        assert_eq!(check_p3(&ok, &cfg()).verdict, Verdict::Satisfied);
        // Money is worth less than nothing when sick: payoff order flips on {sick}.
        let flipped = two_state(&[("c0", "c100", "<"), ("s100", "c0", "<"), ("c100", "h100", "<")]);
        let r = check_p3(&flipped, &cfg());
        assert_eq!(r.verdict, Verdict::Violated);
        let sick = vec!["sick".to_string()];
        assert!(r.witnesses.iter().any(|w| matches!(w,
            Witness::ConditionalMismatch { event, .. } if *event == sick)));
        assert!(r.witnesses.iter().all(|w| w.reproduces(&flipped)));
    }

    #[test]
    fn null_event_from_indifference() {
        // Three states, all 27 acts over {0, 25, 100}; acts differing only on C
        // are declared indifferent, and money matters on A.
        let labels = ["0", "25", "100"];
        let mut acts = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    acts.push((format!("a{a}{b}{c}"), [labels[a], labels[b], labels[c]]));
                }
            }
        }
        let mut prefs = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 1..3 {
                    prefs.push((format!("a{a}{b}0"), format!("a{a}{b}{c}"), "~"));
                }
            }
        }
        prefs.push(("a000".to_string(), "a200".to_string(), "<"));
        let act_refs: Vec<(&str, &[&str])> = acts.iter().map(|(n, o)| (n.as_str(), &o[..])).collect();
        let pref_refs: Vec<(&str, &str, &str)> =
            prefs.iter().map(|(l, r, x)| (l.as_str(), r.as_str(), *x)).collect();
        let mut doc: serde_json::Value =
            serde_json::from_str(&problem(&["A", "B", "C"], &labels, &act_refs, &pref_refs)).unwrap();
        doc["events"] = serde_json::json!({"C": ["C"], "A": ["A"], "none": [], "all": ["A", "B", "C"]});
        let p = load_problem(&doc.to_string()).unwrap();
        let nulls = null_events(&p, &cfg());
        assert!(nulls.null.contains(&Event::from_indices([2])));
        assert!(nulls.null.contains(&Event::empty()));
        assert!(nulls.not_null.contains(&Event::from_indices([0])));
        assert!(nulls.not_null.contains(&Event::full(3)));
    }

    #[test]
    fn p4_stake_reversal() {
        let p = load_problem(&problem(
            &["A", "B", "C"],
            &["0", "100", "200"],
            &[
                ("a100", &["100", "0", "0"]),
                ("b100", &["0", "100", "0"]),
                ("a200", &["200", "0", "0"]),
                ("b200", &["0", "200", "0"]),
            ],
            &[("a100", "b100", "<"), ("b200", "a200", "<")],
        ))
        .unwrap()
        .with_monotone_money(true);
        let r = check_p4(&p, &cfg());
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.witnesses.iter().all(|w| w.reproduces(&p)));
    }

    #[test]
    fn p4_vacuous_with_one_stake() {
        let p = horses(&[("f1", "f2", "<")]).with_monotone_money(true);
        assert_eq!(check_p4(&p, &cfg()).verdict, Verdict::Satisfied);
    }

    #[test]
    fn p5_cases() {
        let p = horses(&[("f1", "f2", "~"), ("f2", "f3", "~")]);
        assert_eq!(check_p5(&p, &cfg()).verdict, Verdict::NotDecidable);
        let tiny = load_problem(&problem(
            &["s"],
            &["0", "100"],
            &[("a", &["0"]), ("b", &["100"])],
            &[("a", "b", "~")],
        ))
        .unwrap();
        let r = check_p5(&tiny, &cfg());
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.witnesses[0].reproduces(&tiny));
        let strict = load_problem(&problem(
            &["s"],
            &["0", "100"],
            &[("a", &["0"]), ("b", &["100"])],
            &[("a", "b", "<")],
        ))
        .unwrap();
        assert_eq!(check_p5(&strict, &cfg()).verdict, Verdict::Satisfied);
        let empty = horses(&[]);
        assert_eq!(check_p5(&empty, &cfg()).verdict, Verdict::NotDecidable);
    }

    #[test]
    fn p7_dominance_inversion() {
        let p = load_problem(&problem(
            &["A", "B"],
            &["0", "100"],
            &[("f", &["0", "0"]), ("g", &["100", "100"]), ("h", &["0", "100"])],
            &[("h", "f", "<")],
        ))
        .unwrap()
        .with_monotone_money(true);
        let r = check_p7(&p, &cfg());
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.witnesses.iter().all(|w| w.reproduces(&p)));
    }

    #[test]
    fn p7_single_state_is_satisfied() {
        let p = load_problem(&problem(
            &["s"],
            &["0", "100"],
            &[("f", &["0"]), ("g", &["100"])],
            &[("f", "g", "<")],
        ))
        .unwrap();
        assert_eq!(check_p7(&p, &cfg()).verdict, Verdict::Satisfied);
    }

    #[test]
    fn derived_order_from_horse_bets() {
        let p = horses(&[("f1", "f2", "<")]).with_monotone_money(true);
        let order = derived_event_order(&p);
        assert!(order.contains(&EventJudgment {
            left: Event::from_indices([0]),
            right: Event::from_indices([1]),
            rel: EventRel::Less
        }));
        let none = horses(&[]);
        assert!(derived_event_order(&none).is_empty());
    }

    #[test]
    fn audit_needs_probability() {
        let p = horses(&[("f1", "f2", "<")]);
        assert!(matches!(
            small_event_continuity_audit(&p, &[], None, &cfg()),
            Err(Error::MissingProbability)
        ));
    }
}
