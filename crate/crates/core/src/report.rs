//! Verdicts and witnesses shared by every checker.
//!
//! Witnesses name acts by their full outcome vector as well as a display
//! name, so a witness stays re-checkable even when it mentions an act the
//! checker synthesised (a constant act, or a splice of two declared acts).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomId {
    #[serde(rename = "P1-complete")]
    P1Complete,
    #[serde(rename = "P1-transitive")]
    P1Transitive,
    P2,
    P3,
    P4,
    P5,
    P7,
    #[serde(rename = "P6-audit")]
    P6Audit,
    /// The three conditions on an event order.
    #[serde(rename = "qualitative-probability")]
    QualitativeProbability,
    /// Declared judgments against an expected-utility representation.
    #[serde(rename = "eu-agreement")]
    EuAgreement,
}

impl AxiomId {
    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::P1Complete => "P1-complete",
            AxiomId::P1Transitive => "P1-transitive",
            AxiomId::P2 => "P2",
            AxiomId::P3 => "P3",
            AxiomId::P4 => "P4",
            AxiomId::P5 => "P5",
            AxiomId::P7 => "P7",
            AxiomId::P6Audit => "P6-audit",
            AxiomId::QualitativeProbability => "qualitative-probability",
            AxiomId::EuAgreement => "eu-agreement",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "satisfied")]
    Satisfied,
    #[serde(rename = "violated")]
    Violated,
    #[serde(rename = "not-decidable-from-data")]
    NotDecidable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::NotDecidable => "not-decidable-from-data",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActRef {
    pub name: String,
    /// Consequence label per state, in state order.
    pub outcomes: Vec<String>,
}

/// A weak relation summary used inside witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ordering3 {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "~")]
    Equivalent,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<=")]
    LessOrEqual,
    #[serde(rename = ">=")]
    GreaterOrEqual,
}

impl Ordering3 {
    pub fn symbol(self) -> &'static str {
        match self {
            Ordering3::Less => "<",
            Ordering3::Equivalent => "~",
            Ordering3::Greater => ">",
            Ordering3::LessOrEqual => "<=",
            Ordering3::GreaterOrEqual => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Two declared acts with no known ordering.
    Incomparable { left: ActRef, right: ActRef },
    /// A chain of judgments returning to its start with at least one strict link.
    Cycle { acts: Vec<ActRef> },
    /// `f <= g` but `g' < f'` although the pairs differ only by a common part off `event`.
    SureThing {
        event: Vec<String>,
        f: ActRef,
        g: ActRef,
        f_prime: ActRef,
        g_prime: ActRef,
    },
    /// Constant acts ordered one way outright and another way given `event`.
    ConditionalMismatch {
        event: Vec<String>,
        low: String,
        high: String,
        unconditional: Ordering3,
        conditional: Ordering3,
    },
    /// Bets on `a` and `b` ranked differently at two stake levels.
    BetReversal {
        a: Vec<String>,
        b: Vec<String>,
        f_a: ActRef,
        f_b: ActRef,
        g_a: ActRef,
        g_b: ActRef,
    },
    /// Every listed act is indifferent to every other, constants included.
    AllIndifferent { acts: Vec<ActRef> },
    /// `f` is at most every consequence of `g` on `event`, yet `g < f` there
    /// (or the dual with the roles swapped, see `dual`).
    Dominance {
        event: Vec<String>,
        f: ActRef,
        g: ActRef,
        dual: bool,
    },
    /// Statewise dominance: `f(s) <= g(s)` as constants everywhere, yet `g < f`.
    StatewiseDominance { f: ActRef, g: ActRef },
    /// A declared `left < right` that flips once one side is changed to
    /// `consequence` on a small event.
    SmallEventReversal {
        event: Vec<String>,
        #[serde(with = "crate::rational::text")]
        mass: crate::rational::Rational,
        consequence: String,
        left: ActRef,
        right: ActRef,
        modified: ActRef,
        modified_side: Side,
        creates_sure_act: bool,
        removes_sure_act: bool,
    },
    /// Two events in a declared order with no known relation.
    EventIncomparable { left: Vec<String>, right: Vec<String> },
    /// Event judgments forming a strict cycle.
    EventCycle { events: Vec<Vec<String>> },
    /// `b <= c` and `c ∪ d < b ∪ d` (or the reverse) with `d` disjoint from both.
    Additivity {
        b: Vec<String>,
        c: Vec<String>,
        d: Vec<String>,
    },
    /// An event ranked strictly below the empty event.
    Negativity { event: Vec<String> },
    /// A declared judgment contradicted by expected-utility values.
    JudgmentMismatch {
        left: ActRef,
        right: ActRef,
        declared: Ordering3,
        #[serde(with = "crate::rational::text")]
        left_value: crate::rational::Rational,
        #[serde(with = "crate::rational::text")]
        right_value: crate::rational::Rational,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub axiom: AxiomId,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    /// Act pairs whose ordering would have been needed to decide.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<[ActRef; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ViolationReport {
    pub fn new(axiom: AxiomId, verdict: Verdict) -> Self {
        ViolationReport {
            axiom,
            verdict,
            witnesses: Vec::new(),
            missing: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Violated when there are witnesses, otherwise `fallback`.
    pub fn from_witnesses(axiom: AxiomId, witnesses: Vec<Witness>, fallback: Verdict) -> Self {
        let verdict = if witnesses.is_empty() {
            fallback
        } else {
            Verdict::Violated
        };
        ViolationReport {
            witnesses,
            ..ViolationReport::new(axiom, verdict)
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

fn event_text(e: &[String]) -> String {
    format!("{{{}}}", e.join(","))
}

fn act_text(a: &ActRef) -> String {
    format!("{}({})", a.name, a.outcomes.join(","))
}

impl Witness {
    /// One-line human rendering.
    pub fn describe(&self) -> String {
        match self {
            Witness::Incomparable { left, right } => {
                format!("no judgment orders {} and {}", left.name, right.name)
            }
            Witness::Cycle { acts } => {
                let mut names: Vec<&str> = acts.iter().map(|a| a.name.as_str()).collect();
                if let Some(first) = names.first().copied() {
                    names.push(first);
                }
                format!("cycle {}", names.join(" -> "))
            }
            Witness::SureThing {
                event,
                f,
                g,
                f_prime,
                g_prime,
            } => format!(
                "{} <= {} but {} < {}; the pairs agree off E={}",
                f.name,
                g.name,
                g_prime.name,
                f_prime.name,
                event_text(event)
            ),
            Witness::ConditionalMismatch {
                event,
                low,
                high,
                unconditional,
                conditional,
            } => format!(
                "{low} {} {high} outright but {low} {} {high} given {}",
                unconditional.symbol(),
                conditional.symbol(),
                event_text(event)
            ),
            Witness::BetReversal {
                a,
                b,
                f_a,
                f_b,
                g_a,
                g_b,
            } => format!(
                "bet on {} <= bet on {} at one stake ({} vs {}), reversed strictly at another ({} vs {})",
                event_text(a),
                event_text(b),
                act_text(f_a),
                act_text(f_b),
                act_text(g_b),
                act_text(g_a)
            ),
            Witness::AllIndifferent { acts } => {
                let names: Vec<&str> = acts.iter().map(|a| a.name.as_str()).collect();
                format!("all acts indifferent: {}", names.join(", "))
            }
            Witness::Dominance { event, f, g, dual } => {
                if *dual {
                    format!(
                        "{} is at least every outcome of {} on {}, yet {} < {} there",
                        f.name,
                        g.name,
                        event_text(event),
                        f.name,
                        g.name
                    )
                } else {
                    format!(
                        "{} is at most every outcome of {} on {}, yet {} < {} there",
                        f.name,
                        g.name,
                        event_text(event),
                        g.name,
                        f.name
                    )
                }
            }
            Witness::StatewiseDominance { f, g } => format!(
                "{} is statewise at least {}, yet {} < {}",
                act_text(g),
                act_text(f),
                g.name,
                f.name
            ),
            Witness::SmallEventReversal {
                event,
                mass,
                consequence,
                left,
                right,
                modified,
                modified_side,
                creates_sure_act,
                removes_sure_act,
            } => {
                let side = match modified_side {
                    Side::Left => &left.name,
                    Side::Right => &right.name,
                };
                let mut text = format!(
                    "{} < {} flips when {} is set to {} on {} (mass {}), giving {}",
                    left.name,
                    right.name,
                    side,
                    consequence,
                    event_text(event),
                    crate::rational::format(mass),
                    act_text(modified)
                );
                if *creates_sure_act {
                    text.push_str("; modification creates sure gain");
                }
                if *removes_sure_act {
                    text.push_str("; modification removes a sure gain");
                }
                text
            }
            Witness::EventIncomparable { left, right } => {
                format!("no judgment orders {} and {}", event_text(left), event_text(right))
            }
            Witness::EventCycle { events } => {
                let mut parts: Vec<String> = events.iter().map(|e| event_text(e)).collect();
                if let Some(first) = parts.first().cloned() {
                    parts.push(first);
                }
                format!("event cycle {}", parts.join(" -> "))
            }
            Witness::Additivity { b, c, d } => format!(
                "B={} and C={} change order once D={} is added to both",
                event_text(b),
                event_text(c),
                event_text(d)
            ),
            Witness::Negativity { event } => {
                format!("{} ranked strictly below the empty event", event_text(event))
            }
            Witness::JudgmentMismatch {
                left,
                right,
                declared,
                left_value,
                right_value,
            } => format!(
                "declared {} {} {} but expected utilities are {} and {}",
                left.name,
                declared.symbol(),
                right.name,
                crate::rational::format(left_value),
                crate::rational::format(right_value)
            ),
        }
    }
}
