//! Interactive elicitation: a bisection over betting prices driven by the
//! role-reversal threat, plus live axiom feedback on preference choices.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

use crate::axioms::{check_p1, check_p2, check_p7, CheckConfig};
use crate::decision::{DecisionProblem, PrefRel, ProblemDoc};
use crate::rational::{self, ratio, Rational};
use crate::report::ViolationReport;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// What the respondent is betting on.
    pub event: String,
    #[serde(with = "rational::text", default = "default_width")]
    pub width: Rational,
    /// Stake paid out if the event happens.
    #[serde(with = "rational::text", default = "default_payoff")]
    pub payoff: Rational,
    /// Acts the respondent will be asked to compare.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemDoc>,
}

fn default_width() -> Rational {
    ratio(1, 1024)
}

fn default_payoff() -> Rational {
    rational::int(100)
}

impl SessionConfig {
    pub fn new(event: impl Into<String>) -> Self {
        SessionConfig {
            event: event.into(),
            width: default_width(),
            payoff: default_payoff(),
            problem: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Active,
    Converged,
    Abandoned,
}

/// Answer to "would you pay `q` for a ticket paying the stake?".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Response {
    /// Happy to buy at `q`, even knowing the roles may be swapped: `p ≥ q`.
    Player,
    /// Would rather sell at `q`: `p ≤ q`.
    Bookie,
    Indifferent,
}

impl FromStr for Response {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "player" | "p" | "buy" => Ok(Response::Player),
            "bookie" | "b" | "sell" => Ok(Response::Bookie),
            "indifferent" | "i" | "=" => Ok(Response::Indifferent),
            _ => Err(Error::UnknownResponse(s.to_string())),
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Response::Player => "player",
            Response::Bookie => "bookie",
            Response::Indifferent => "indifferent",
        })
    }
}

/// Preference input; `>` is stored with the sides swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChoiceRel {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "~")]
    Indifferent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceInput {
    pub left: String,
    pub right: String,
    pub rel: ChoiceRel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    #[serde(with = "rational::text")]
    pub price: Rational,
    pub framing: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    #[serde(with = "rational::text")]
    pub price: Rational,
    pub response: Response,
}

/// Everything that changes a session, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "input", rename_all = "lowercase")]
pub enum SessionInput {
    Query,
    Answer { response: Response },
    Preference(ChoiceInput),
    Abandon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    id: String,
    config: SessionConfig,
    problem: Option<DecisionProblem>,
    lo: Rational,
    hi: Rational,
    pending: Option<Rational>,
    transcript: Vec<Exchange>,
    status: Status,
    violations: Vec<ViolationReport>,
    log: Vec<SessionInput>,
}

impl Session {
    pub fn new(id: impl Into<String>, config: SessionConfig) -> Result<Self, Error> {
        if !config.width.is_positive() || config.width >= Rational::one() {
            return Err(Error::OutOfRange {
                value: rational::format(&config.width),
                lo: "0 (exclusive)".into(),
                hi: "1 (exclusive)".into(),
            });
        }
        if !config.payoff.is_positive() {
            return Err(Error::invalid("payoff must be positive"));
        }
        let problem = config.problem.clone().map(ProblemDoc::into_problem).transpose()?;
        Ok(Session {
            id: id.into(),
            config,
            problem,
            lo: Rational::zero(),
            hi: Rational::one(),
            pending: None,
            transcript: Vec::new(),
            status: Status::Active,
            violations: Vec::new(),
            log: Vec::new(),
        })
    }

    /// Rebuilds a session by feeding `inputs` through the same transitions.
    pub fn replay(id: impl Into<String>, config: SessionConfig, inputs: &[SessionInput]) -> Result<Self, Error> {
        let mut s = Session::new(id, config)?;
        for input in inputs {
            s.apply(input.clone())?;
        }
        Ok(s)
    }

    pub fn apply(&mut self, input: SessionInput) -> Result<(), Error> {
        match input {
            SessionInput::Query => self.next_query().map(drop),
            SessionInput::Answer { response } => self.submit_answer(response),
            SessionInput::Preference(c) => self.record_preference(&c).map(drop),
            SessionInput::Abandon => {
                self.abandon();
                Ok(())
            }
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn transcript(&self) -> &[Exchange] {
        &self.transcript
    }

    pub fn violations(&self) -> &[ViolationReport] {
        &self.violations
    }

    pub fn inputs(&self) -> &[SessionInput] {
        &self.log
    }

    pub fn problem(&self) -> Option<&DecisionProblem> {
        self.problem.as_ref()
    }

    /// Midpoint of the current interval; asking twice returns the same query.
    pub fn next_query(&mut self) -> Result<Query, Error> {
        if self.status != Status::Active {
            return Err(Error::SessionNotActive);
        }
        let price = match &self.pending {
            Some(q) => q.clone(),
            None => {
                let q = (&self.lo + &self.hi) / rational::int(2);
                self.pending = Some(q.clone());
                self.log.push(SessionInput::Query);
                q
            }
        };
        let framing = format!(
            "Would you pay {} for a ticket that pays {} if {}? \
             Answer as a player if you would buy at this price, as a bookie if you would rather sell it, \
             knowing the other side may swap roles with you at this price.",
            money(&(&price * &self.config.payoff)),
            money(&self.config.payoff),
            self.config.event
        );
        Ok(Query { price, framing })
    }

    pub fn submit_answer(&mut self, response: Response) -> Result<(), Error> {
        if self.status != Status::Active {
            return Err(Error::SessionNotActive);
        }
        let q = self.pending.take().ok_or(Error::NoPendingQuery)?;
        match response {
            Response::Player => self.lo = q.clone(),
            Response::Bookie => self.hi = q.clone(),
            Response::Indifferent => {
                self.lo = q.clone();
                self.hi = q.clone();
            }
        }
        self.transcript.push(Exchange { price: q, response });
        self.log.push(SessionInput::Answer { response });
        if &self.hi - &self.lo <= self.config.width {
            self.status = Status::Converged;
        }
        Ok(())
    }

    /// Adds a choice and returns the reports it newly triggers.
    pub fn record_preference(&mut self, choice: &ChoiceInput) -> Result<Vec<ViolationReport>, Error> {
        let problem = self.problem.as_ref().ok_or(Error::NoPreferenceProblem)?;
        let (left, right, rel) = match choice.rel {
            ChoiceRel::Less => (&choice.left, &choice.right, PrefRel::Less),
            ChoiceRel::Greater => (&choice.right, &choice.left, PrefRel::Less),
            ChoiceRel::Indifferent => (&choice.left, &choice.right, PrefRel::Indifferent),
        };
        let updated = problem.with_judgment(left, right, rel)?;
        let cfg = CheckConfig::default();
        // Sparse choices are incomplete by design, so only the
        // transitivity half of the ordering check is fed back.
        let (_, transitive) = check_p1(&updated, &cfg);
        let fresh: Vec<ViolationReport> = [transitive, check_p2(&updated, &cfg), check_p7(&updated, &cfg)]
            .into_iter()
            .filter(ViolationReport::is_violated)
            .filter_map(|mut r| {
                r.witnesses.retain(|w| {
                    !self
                        .violations
                        .iter()
                        .any(|seen| seen.axiom == r.axiom && seen.witnesses.contains(w))
                });
                (!r.witnesses.is_empty()).then_some(r)
            })
            .collect();
        self.problem = Some(updated);
        self.violations.extend(fresh.iter().cloned());
        self.log.push(SessionInput::Preference(choice.clone()));
        Ok(fresh)
    }

    pub fn abandon(&mut self) {
        if self.status == Status::Active {
            self.status = Status::Abandoned;
            self.pending = None;
            self.log.push(SessionInput::Abandon);
        }
    }

    /// Point estimate once converged: the common value or the midpoint.
    pub fn estimate(&self) -> Option<Rational> {
        (self.status == Status::Converged).then(|| (&self.lo + &self.hi) / rational::int(2))
    }

    pub fn report(&self) -> SessionReport {
        let estimate = self.estimate();
        SessionReport {
            id: self.id.clone(),
            event: self.config.event.clone(),
            status: self.status,
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            fair_price: estimate.as_ref().map(|p| p * &self.config.payoff),
            estimate,
            payoff: self.config.payoff.clone(),
            transcript: self.transcript.clone(),
            violations: self.violations.clone(),
        }
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            id: self.id.clone(),
            config: self.config.clone(),
            inputs: self.log.clone(),
            report: self.report(),
        }
    }

    /// Replays a snapshot and checks the stored report still matches.
    pub fn restore(snapshot: &SessionSnapshot) -> Result<Self, Error> {
        let s = Session::replay(snapshot.id.clone(), snapshot.config.clone(), &snapshot.inputs)?;
        if s.report() != snapshot.report {
            return Err(Error::invalid("snapshot report does not match its replayed inputs"));
        }
        Ok(s)
    }
}

fn money(x: &Rational) -> String {
    if x.is_integer() {
        format!("${}", x.to_integer())
    } else {
        format!("${}", rational::to_decimal(x, 2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub id: String,
    pub event: String,
    pub status: Status,
    #[serde(with = "rational::text")]
    pub lo: Rational,
    #[serde(with = "rational::text")]
    pub hi: Rational,
    #[serde(with = "rational::text_opt")]
    pub estimate: Option<Rational>,
    #[serde(with = "rational::text")]
    pub payoff: Rational,
    #[serde(with = "rational::text_opt")]
    pub fair_price: Option<Rational>,
    pub transcript: Vec<Exchange>,
    pub violations: Vec<ViolationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub id: String,
    pub config: SessionConfig,
    pub inputs: Vec<SessionInput>,
    pub report: SessionReport,
}

/// Answers truthfully for a hidden probability `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedRespondent {
    pub p: Rational,
}

impl ScriptedRespondent {
    pub fn new(p: Rational) -> Self {
        ScriptedRespondent { p }
    }

    pub fn answer(&self, price: &Rational) -> Response {
        match self.p.cmp(price) {
            std::cmp::Ordering::Greater => Response::Player,
            std::cmp::Ordering::Less => Response::Bookie,
            std::cmp::Ordering::Equal => Response::Indifferent,
        }
    }

    /// Plays until the session stops or `max_answers` is reached; returns
    /// the number of answers given.
    pub fn drive(&self, session: &mut Session, max_answers: usize) -> Result<usize, Error> {
        let mut n = 0;
        while session.status() == Status::Active && n < max_answers {
            let q = session.next_query()?;
            session.submit_answer(self.answer(&q.price))?;
            n += 1;
        }
        Ok(n)
    }
}

/// Sessions by id. Lookups share the map; each session is locked on its own.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(&self, config: SessionConfig) -> Result<String, Error> {
        let id = uuid::Uuid::new_v4().to_string();
        let session = Session::new(id.clone(), config)?;
        self.sessions.write().insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, Error> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.to_string()))
    }

    /// Runs `f` with the session locked.
    pub fn with<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, Error>) -> Result<T, Error> {
        let s = self.get(id)?;
        let mut guard = s.lock();
        f(&mut guard)
    }

    pub fn remove(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.write().remove(id)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn snapshots(&self) -> Vec<SessionSnapshot> {
        let handles: Vec<_> = self.sessions.read().values().cloned().collect();
        let mut out: Vec<_> = handles.iter().map(|s| s.lock().snapshot()).collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::report::AxiomId;
    use proptest::prelude::*;

    fn session(width: Rational) -> Session {
        Session::new(
            "t",
            SessionConfig {
                width,
                ..SessionConfig::new("the horse wins")
            },
        )
        .unwrap()
    }

    fn quiz() -> SessionConfig {
        let doc: ProblemDoc = serde_json::from_str(
            r#"{"states":["1","2-11","12-100"],
                "consequences":[{"label":"$0","value":0},{"label":"$500k","value":500},{"label":"$2500k","value":2500}],
                "acts":[{"name":"I","assignment":{"1":"$500k","2-11":"$500k","12-100":"$500k"}},
                        {"name":"II","assignment":{"1":"$0","2-11":"$2500k","12-100":"$500k"}},
                        {"name":"III","assignment":{"1":"$500k","2-11":"$500k","12-100":"$0"}},
                        {"name":"IV","assignment":{"1":"$0","2-11":"$2500k","12-100":"$0"}}]}"#,
        )
        .unwrap();
        SessionConfig {
            problem: Some(doc),
            ..SessionConfig::new("quiz")
        }
    }

    fn choice(l: &str, rel: ChoiceRel, r: &str) -> ChoiceInput {
        ChoiceInput {
            left: l.into(),
            right: r.into(),
            rel,
        }
    }

    #[test]
    fn creation_and_first_query() {
        let mut s = session(ratio(1, 1024));
        assert_eq!(s.interval(), (&int(0), &int(1)));
        assert_eq!(s.next_query().unwrap().price, ratio(1, 2));
        assert!(Session::new("x", SessionConfig { width: int(0), ..SessionConfig::new("e") }).is_err());
        assert!(Session::new("x", SessionConfig { width: int(1), ..SessionConfig::new("e") }).is_err());
    }

    #[test]
    fn midpoint_of_narrowed_interval() {
        let mut s = session(ratio(1, 1024));
        s.next_query().unwrap();
        s.submit_answer(Response::Bookie).unwrap();
        s.next_query().unwrap();
        s.submit_answer(Response::Player).unwrap();
        assert_eq!(s.interval(), (&ratio(1, 4), &ratio(1, 2)));
        assert_eq!(s.next_query().unwrap().price, ratio(3, 8));
    }

    #[test]
    fn half_width_converges_after_one_answer() {
        let mut s = session(ratio(1, 2));
        s.next_query().unwrap();
        s.submit_answer(Response::Player).unwrap();
        assert_eq!(s.status(), Status::Converged);
        assert!(matches!(s.next_query(), Err(Error::SessionNotActive)));
    }

    #[test]
    fn answer_needs_a_query() {
        let mut s = session(ratio(1, 8));
        assert!(matches!(s.submit_answer(Response::Player), Err(Error::NoPendingQuery)));
        assert!(matches!("maybe".parse::<Response>(), Err(Error::UnknownResponse(_))));
    }

    #[test]
    fn quarter_respondent_and_fair_price() {
        let mut s = session(ratio(1, 1024));
        let n = ScriptedRespondent::new(ratio(1, 4)).drive(&mut s, 12).unwrap();
        assert!(n <= 12);
        assert_eq!(s.status(), Status::Converged);
        let r = s.report();
        assert!(r.lo <= ratio(1, 4) && ratio(1, 4) <= r.hi);
        assert_eq!(r.fair_price, Some(int(25)));
    }

    #[test]
    fn immediate_indifference_and_zero_respondent() {
        let mut s = session(ratio(1, 1024));
        s.next_query().unwrap();
        s.submit_answer(Response::Indifferent).unwrap();
        assert_eq!(s.estimate(), Some(ratio(1, 2)));

        let mut z = session(ratio(1, 1024));
        ScriptedRespondent::new(int(0)).drive(&mut z, 20).unwrap();
        assert_eq!(z.interval().0, &int(0));
        assert!(z.interval().1 <= &ratio(1, 1024));
    }

    #[test]
    fn fresh_and_abandoned_reports() {
        let s = session(ratio(1, 16));
        let r = s.report();
        assert_eq!((r.lo, r.hi, r.estimate), (int(0), int(1), None));

        let mut a = session(ratio(1, 16));
        a.next_query().unwrap();
        a.submit_answer(Response::Bookie).unwrap();
        a.abandon();
        let r = a.report();
        assert_eq!(r.status, Status::Abandoned);
        assert_eq!(r.transcript.len(), 1);
        assert!(r.estimate.is_none() && r.fair_price.is_none());
    }

    #[test]
    fn allais_quiz_feeds_a_sure_thing_report() {
        let mut s = Session::new("q", quiz()).unwrap();
        assert!(s.record_preference(&choice("I", ChoiceRel::Greater, "II")).unwrap().is_empty());
        let fresh = s.record_preference(&choice("IV", ChoiceRel::Greater, "III")).unwrap();
        assert!(fresh.iter().any(|r| r.axiom == AxiomId::P2));
        assert_eq!(s.violations().len(), fresh.len());
    }

    #[test]
    fn consistent_quiz_keeps_feed_empty() {
        let mut s = Session::new("q", quiz()).unwrap();
        s.record_preference(&choice("I", ChoiceRel::Greater, "II")).unwrap();
        s.record_preference(&choice("III", ChoiceRel::Greater, "IV")).unwrap();
        assert!(s.violations().is_empty());
        assert!(s.record_preference(&choice("I", ChoiceRel::Less, "V")).is_err());
    }

    #[test]
    fn three_cycle_reported_once() {
        let mut s = Session::new("q", quiz()).unwrap();
        s.record_preference(&choice("I", ChoiceRel::Less, "II")).unwrap();
        s.record_preference(&choice("II", ChoiceRel::Less, "III")).unwrap();
        let fresh = s.record_preference(&choice("III", ChoiceRel::Less, "I")).unwrap();
        assert!(fresh.iter().any(|r| r.axiom == AxiomId::P1Transitive));
        // Restating a choice adds nothing new.
        let again = s.record_preference(&choice("I", ChoiceRel::Less, "II")).unwrap();
        assert!(again.iter().all(|r| r.axiom != AxiomId::P1Transitive));
    }

    #[test]
    fn snapshot_round_trip() {
        let mut s = Session::new("q", quiz()).unwrap();
        ScriptedRespondent::new(ratio(2, 7)).drive(&mut s, 5).unwrap();
        s.record_preference(&choice("I", ChoiceRel::Greater, "II")).unwrap();
        s.next_query().unwrap();
        let json = serde_json::to_string(&s.snapshot()).unwrap();
        let back: SessionSnapshot = serde_json::from_str(&json).unwrap();
        assert_eq!(Session::restore(&back).unwrap(), s);
    }

    #[test]
    fn store_round_trip() {
        let store = SessionStore::new();
        let id = store.create(SessionConfig::new("rain")).unwrap();
        let q = store.with(&id, |s| s.next_query()).unwrap();
        assert_eq!(q.price, ratio(1, 2));
        assert!(matches!(store.get("nope"), Err(Error::UnknownSession(_))));
        assert_eq!(store.snapshots().len(), 1);
    }

    proptest! {
        #[test]
        fn bisection_contracts_and_contains_p(num in 0u32..=1000, answers in 1usize..16) {
            let p = Rational::new(num.into(), 1000.into());
            let mut s = session(ratio(1, 1 << 20));
            let n = ScriptedRespondent::new(p.clone()).drive(&mut s, answers).unwrap();
            let (lo, hi) = s.interval();
            prop_assert!(lo <= &p && &p <= hi);
            prop_assert!(hi - lo <= Rational::new(1.into(), (1u64 << n).into()));
        }

        #[test]
        fn replay_reproduces_state(answers in prop::collection::vec(0u8..3, 0..12)) {
            let mut s = session(ratio(1, 4096));
            for a in answers {
                if s.status() != Status::Active { break; }
                s.next_query().unwrap();
                let r = [Response::Player, Response::Bookie, Response::Indifferent][a as usize];
                s.submit_answer(r).unwrap();
            }
            let again = Session::replay("t", s.config().clone(), s.inputs()).unwrap();
            prop_assert_eq!(again, s);
        }
    }
}
