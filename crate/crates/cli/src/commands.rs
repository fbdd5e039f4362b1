use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;
use serde_json::{json, Value};
use surething::axioms::{check_all, CheckConfig};
use surething::coherence::{coherence_check, two_agent_dutch_book, DutchBook, PriceSystem, PriceSystemDoc};
use surething::decision::{load_problem, DecisionProblem};
use surething::measure::MeasureDoc;
use surething::qualitative::{check_qp_axioms, EventOrder};
use surething::rational::{self, Wire};
use surething::report::ViolationReport;
use surething::representation::{
    fit_joint, fit_probability, fit_utility, verify_agreement, FitInfeasible, JointConfig, Representation, UtilityFunction,
};
use surething::scoring::{eu_score, prospect_score, subcertainty_check, Lottery, MoneyUtility, WeightFunction};
use surething::session::{Response, ScriptedRespondent, Session, SessionConfig, Status};
use surething::Rational;

use crate::args::{CheckArgs, ElicitArgs, FitArgs, FitMode};
use crate::output::{both, code, dollars, report_text, table, Output};

pub fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn problem_from(path: &Path) -> anyhow::Result<DecisionProblem> {
    let text = read(path)?;
    load_problem(&text).with_context(|| format!("{} is not a valid problem", path.display()))
}

/// Every applicable report for a problem: the postulates, the continuity
/// audit when a probability is present, and the event-order conditions
/// when an order is declared.
pub fn reports(problem: &DecisionProblem, cfg: &CheckConfig) -> Vec<ViolationReport> {
    let mut out = check_all(problem, cfg);
    if !problem.event_order().is_empty() {
        let order = EventOrder::from_problem(problem);
        out.push(check_qp_axioms(&order));
    }
    out
}

pub fn check(a: &CheckArgs) -> anyhow::Result<Output> {
    let problem = problem_from(&a.file)?;
    let mut cfg = CheckConfig {
        max_witnesses: a.max_witnesses,
        ..CheckConfig::default()
    };
    if let Some(t) = &a.threshold {
        cfg.small_event_threshold = t.clone();
    }
    let mut all = reports(&problem, &cfg);
    if !a.axioms.is_empty() {
        let known: Vec<&str> = all.iter().map(|r| r.axiom.as_str()).collect();
        for wanted in &a.axioms {
            if !known.iter().any(|k| k.eq_ignore_ascii_case(wanted)) {
                bail!("no check named `{wanted}` applies here (available: {})", known.join(", "));
            }
        }
        all.retain(|r| a.axioms.iter().any(|w| w.eq_ignore_ascii_case(r.axiom.as_str())));
    }
    Ok(check_output(&a.file.display().to_string(), &all))
}

pub fn check_output(name: &str, all: &[ViolationReport]) -> Output {
    let violated = all.iter().any(ViolationReport::is_violated);
    let mut text = format!("{name}\n");
    for r in all {
        report_text(&mut text, r);
    }
    Output {
        code: code(violated),
        text,
        json: json!({ "file": name, "violated": violated, "reports": all }),
    }
}

fn resolve_mode(problem: &DecisionProblem, mode: FitMode) -> FitMode {
    match mode {
        FitMode::Auto if problem.probability().is_some() => FitMode::Utility,
        FitMode::Auto if UtilityFunction::monetary(problem).is_ok() => FitMode::Probability,
        FitMode::Auto => FitMode::Joint,
        m => m,
    }
}

pub fn fit(a: &FitArgs) -> anyhow::Result<Output> {
    let problem = problem_from(&a.file)?;
    let mode = resolve_mode(&problem, a.mode);
    let fitted: Result<Representation, Option<FitInfeasible>> = match mode {
        FitMode::Probability => {
            let utility = UtilityFunction::monetary(&problem)
                .context("fitting a probability needs monetary values on every consequence")?
                .normalized();
            fit_probability(&problem, &utility)
                .map(|measure| Representation { measure, utility })
                .map_err(Some)
        }
        FitMode::Utility => {
            let measure = problem
                .probability()
                .cloned()
                .ok_or_else(|| anyhow!("fitting a utility needs a `probability` section"))?;
            fit_utility(&problem, &measure)
                .map(|utility| Representation { measure, utility })
                .map_err(Some)
        }
        FitMode::Joint => {
            let cfg = JointConfig {
                cap: a.cap,
                ..JointConfig::default()
            };
            fit_joint(&problem, &cfg)?.ok_or(None)
        }
        FitMode::Auto => unreachable!("resolved above"),
    };
    let mode_name = format!("{mode:?}").to_lowercase();
    let mut text = format!("{} (fitting {mode_name})\n", a.file.display());
    Ok(match fitted {
        Ok(rep) => {
            let agreement = verify_agreement(&problem, &rep);
            let doc = rep.to_doc(&problem);
            let rows: Vec<Vec<String>> = doc.measure.0.iter().map(|(s, p)| vec![format!("P({s})"), both(p)]).collect();
            table(&mut text, &rows);
            let rows: Vec<Vec<String>> = doc.utility.iter().map(|(c, u)| vec![format!("U({c})"), both(u)]).collect();
            table(&mut text, &rows);
            report_text(&mut text, &agreement);
            Output {
                code: code(agreement.is_violated()),
                text,
                json: json!({ "mode": mode_name, "representation": doc, "agreement": agreement }),
            }
        }
        Err(cert) => {
            let lines = cert.map(|c| c.describe(&problem)).unwrap_or_default();
            if lines.is_empty() {
                text.push_str("  no agreeing representation found\n");
            } else {
                text.push_str("  no agreeing representation; these constraints conflict:\n");
                for l in &lines {
                    let _ = writeln!(text, "    {l}");
                }
            }
            Output {
                code: 1,
                text,
                json: json!({ "mode": mode_name, "representation": Value::Null, "certificate": lines }),
            }
        }
    })
}

#[derive(Deserialize)]
struct TwoAgentDoc {
    #[serde(default = "default_event")]
    event: String,
    agents: BTreeMap<String, Wire>,
    stake: Wire,
}

fn default_event() -> String {
    "E".into()
}

/// A price file, a problem file with a `prices` section, or a two-agent
/// file with `agents` and `stake`.
pub fn dutch_book(path: &Path) -> anyhow::Result<Output> {
    let text = read(path)?;
    dutch_book_text(&path.display().to_string(), &text)
}

pub fn dutch_book_text(name: &str, text: &str) -> anyhow::Result<Output> {
    let value: Value = serde_json::from_str(text).with_context(|| format!("{name} is not valid JSON"))?;
    if value.get("agents").is_some() {
        let doc: TwoAgentDoc = serde_json::from_value(value).with_context(|| format!("{name}: bad two-agent file"))?;
        return two_agent(name, doc);
    }
    let section = value.get("prices").cloned().unwrap_or(value);
    let doc: PriceSystemDoc = serde_json::from_value(section).with_context(|| format!("{name}: bad price system"))?;
    let prices = doc.into_prices().with_context(|| format!("{name}: bad price system"))?;
    Ok(coherence_output(name, &prices))
}

pub fn coherence_output(name: &str, prices: &PriceSystem) -> Output {
    let mut text = format!("{name}\n");
    match coherence_check(prices) {
        Ok(measure) => {
            text.push_str("  coherent; a probability reproducing every price:\n");
            let rows: Vec<Vec<String>> = measure.to_labels().iter().map(|(s, p)| vec![format!("P({s})"), both(p)]).collect();
            table(&mut text, &rows);
            Output {
                code: 0,
                text,
                json: json!({ "file": name, "coherent": true, "measure": MeasureDoc::from(&measure) }),
            }
        }
        Err(inc) => {
            text.push_str("  incoherent; no probability reproduces these offers together:\n");
            for &i in &inc.offers {
                let o = &prices.offers()[i];
                let _ = writeln!(
                    text,
                    "    {{{}}} at {}",
                    prices.states().event_labels(o.event).join(","),
                    rational::format(&o.price)
                );
            }
            if let Some(book) = &inc.book {
                ledger(&mut text, prices, book);
            }
            Output {
                code: 1,
                text,
                json: json!({
                    "file": name,
                    "coherent": false,
                    "conflicting_offers": inc.offers,
                    "book": inc.book.as_ref().map(|b| b.to_doc(prices)),
                }),
            }
        }
    }
}

/// Stakes, cash flow and the outcome in every state.
pub fn ledger(out: &mut String, prices: &PriceSystem, book: &DutchBook) {
    let mut rows = vec![vec!["bet on".to_string(), "price".into(), "stake".into(), "cash".into()]];
    for (x, o) in book.stakes.iter().zip(prices.offers()) {
        if x == &rational::zero() {
            continue;
        }
        let side = if x > &rational::zero() { "buy" } else { "sell" };
        rows.push(vec![
            format!("{{{}}}", prices.states().event_labels(o.event).join(",")),
            rational::to_decimal(&o.price, 2),
            format!("{side} {}", dollars(&if x > &rational::zero() { x.clone() } else { -x })),
            dollars(&-(x * &o.price)),
        ]);
    }
    table(out, &rows);
    let net = book.net_cost(prices);
    let _ = writeln!(out, "  paid up front {}", dollars(&net));
    let rows: Vec<Vec<String>> = prices
        .states()
        .labels()
        .iter()
        .zip(&book.per_state_profit)
        .map(|(s, g)| vec![format!("if {s}"), format!("gain {}", dollars(g))])
        .collect();
    table(out, &rows);
    let _ = writeln!(out, "  guaranteed gain {}", dollars(&book.guaranteed_profit));
}

fn two_agent(name: &str, doc: TwoAgentDoc) -> anyhow::Result<Output> {
    let mut quotes = doc.agents.into_iter();
    let (a, pa) = quotes.next().ok_or_else(|| anyhow!("{name}: two agents are needed"))?;
    let (b, pb) = quotes.next().ok_or_else(|| anyhow!("{name}: two agents are needed"))?;
    if quotes.next().is_some() {
        bail!("{name}: exactly two agents are supported");
    }
    let mut text = format!(
        "{name}\n  {a} prices {} at {}, {b} at {}; stake {}\n",
        doc.event,
        rational::format(&pa.0),
        rational::format(&pb.0),
        dollars(&doc.stake.0)
    );
    Ok(match two_agent_dutch_book(&pa.0, &pb.0, &doc.stake.0)? {
        None => {
            text.push_str("  the quotes agree; no book between them\n");
            Output {
                code: 0,
                text,
                json: json!({ "file": name, "coherent": true, "book": Value::Null }),
            }
        }
        Some(tab) => {
            let (hi, lo) = if pa.0 >= pb.0 { (&a, &b) } else { (&b, &a) };
            let _ = writeln!(text, "  sell the bet to {hi}, buy it from {lo}");
            let states = tab.prices.states().labels().to_vec();
            let rows: Vec<Vec<String>> = states
                .iter()
                .zip(&tab.book.per_state_profit)
                .map(|(s, g)| vec![format!("if {s}"), format!("gain {}", dollars(g))])
                .collect();
            table(&mut text, &rows);
            Output {
                code: 1,
                text,
                json: json!({
                    "file": name,
                    "coherent": false,
                    "sell_to": hi,
                    "buy_from": lo,
                    "book": tab.book.to_doc(&tab.prices),
                }),
            }
        }
    })
}

#[derive(Deserialize)]
struct BranchDoc {
    p: Wire,
    payoff: Wire,
}

#[derive(Deserialize)]
struct LotteryDoc {
    name: String,
    branches: Vec<BranchDoc>,
}

#[derive(Deserialize)]
struct AnchorDoc {
    p: Wire,
    w: Wire,
}

#[derive(Deserialize)]
struct WeightsDoc {
    #[serde(default)]
    anchors: Vec<AnchorDoc>,
    zero_limit: Option<Wire>,
    one_limit: Option<Wire>,
}

#[derive(Deserialize)]
struct ScoreDoc {
    lotteries: Vec<LotteryDoc>,
    /// Payoff → utility; linear when absent.
    utility: Option<BTreeMap<String, Wire>>,
    weights: Option<WeightsDoc>,
}

pub fn score(path: &Path) -> anyhow::Result<Output> {
    let text = read(path)?;
    score_text(&path.display().to_string(), &text)
}

pub fn score_text(name: &str, text: &str) -> anyhow::Result<Output> {
    let doc: ScoreDoc = serde_json::from_str(text).with_context(|| format!("{name} is not a valid score file"))?;
    let utility = match doc.utility {
        None => MoneyUtility::Linear,
        Some(map) => MoneyUtility::Table(
            map.into_iter()
                .map(|(k, v)| Ok((rational::parse(&k).with_context(|| format!("utility key `{k}`"))?, v.0)))
                .collect::<anyhow::Result<_>>()?,
        ),
    };
    let weights = doc
        .weights
        .map(|w| {
            WeightFunction::new(
                w.anchors.into_iter().map(|a| (a.p.0, a.w.0)).collect(),
                w.zero_limit.map_or_else(rational::zero, |v| v.0),
                w.one_limit.map_or_else(rational::one, |v| v.0),
            )
        })
        .transpose()
        .context("bad weights")?;
    let mut rows = vec![vec!["lottery".to_string(), "expected utility".into()]];
    if weights.is_some() {
        rows[0].push("prospect score".into());
    }
    let mut scored = Vec::new();
    let mut interior: Vec<Rational> = Vec::new();
    for l in doc.lotteries {
        let lottery = Lottery::new(&l.name, l.branches.into_iter().map(|b| (b.p.0, b.payoff.0)).collect())
            .with_context(|| format!("lottery `{}`", l.name))?;
        let eu = eu_score(&lottery, &utility).with_context(|| format!("lottery `{}`", l.name))?;
        let mut row = vec![l.name.clone(), both(&eu)];
        let mut entry = json!({ "name": l.name, "expected_utility": rational::format(&eu) });
        if let Some(w) = &weights {
            let v = prospect_score(&lottery, &utility, w).with_context(|| format!("lottery `{}`", l.name))?;
            row.push(both(&v));
            entry["prospect_score"] = json!(rational::format(&v));
            for (p, _) in lottery.branches() {
                if p > &rational::zero() && p < &rational::one() && !interior.contains(p) {
                    interior.push(p.clone());
                }
            }
        }
        rows.push(row);
        scored.push(entry);
    }
    let mut text = format!("{name}\n");
    table(&mut text, &rows);
    let mut sub = serde_json::Map::new();
    if let Some(w) = &weights {
        interior.sort();
        for p in &interior {
            let holds = subcertainty_check(w, p)?;
            let _ = writeln!(
                text,
                "  π({p}) + π(1-{p}) {} 1",
                if holds { "<" } else { ">=" },
                p = rational::format(p)
            );
            sub.insert(rational::format(p), json!(holds));
        }
    }
    Ok(Output {
        code: 0,
        text,
        json: json!({ "file": name, "lotteries": scored, "subcertainty": sub }),
    })
}

pub fn session_config(a: &ElicitArgs) -> SessionConfig {
    SessionConfig {
        width: a.width.clone(),
        payoff: a.payoff.clone(),
        ..SessionConfig::new(a.event.clone())
    }
}

fn session_output(session: &Session) -> Output {
    let r = session.report();
    let mut text = String::new();
    for (k, e) in r.transcript.iter().enumerate() {
        let _ = writeln!(text, "  {:>2}. price {:<12} {}", k + 1, rational::to_decimal(&e.price, 6), e.response);
    }
    let _ = writeln!(
        text,
        "  {:?}: P({}) in [{}, {}]",
        r.status,
        r.event,
        both(&r.lo),
        both(&r.hi)
    );
    if let (Some(p), Some(price)) = (&r.estimate, &r.fair_price) {
        let _ = writeln!(text, "  estimate {}, fair price {}", both(p), dollars(price));
    }
    Output {
        code: code(r.status != Status::Converged),
        text,
        json: serde_json::to_value(&r).expect("reports serialise"),
    }
}

/// `elicit --respond-as p`: plays the game against a truthful respondent.
pub fn elicit_scripted(a: &ElicitArgs) -> anyhow::Result<Output> {
    let p = a
        .respond_as
        .clone()
        .ok_or_else(|| anyhow!("interactive elicitation needs a terminal; pass --respond-as to script it"))?;
    if p < rational::zero() || p > rational::one() {
        bail!("--respond-as must lie in [0, 1], got {}", rational::format(&p));
    }
    let mut session = Session::new("cli", session_config(a))?;
    ScriptedRespondent::new(p).drive(&mut session, a.max_answers)?;
    Ok(session_output(&session))
}

/// The line-based game: one query per prompt, answers read from `input`.
pub fn elicit_interactive<R: BufRead, W: Write>(a: &ElicitArgs, input: R, mut out: W) -> anyhow::Result<Output> {
    let mut session = Session::new("cli", session_config(a))?;
    let mut lines = input.lines();
    let mut answered = 0;
    while session.status() == Status::Active && answered < a.max_answers {
        let q = session.next_query()?;
        writeln!(out, "\n{}", q.framing)?;
        loop {
            write!(out, "[player/bookie/indifferent/quit] > ")?;
            out.flush()?;
            let Some(line) = lines.next().transpose()? else {
                session.abandon();
                break;
            };
            if matches!(line.trim(), "q" | "quit" | "exit") {
                session.abandon();
                break;
            }
            match line.parse::<Response>() {
                Ok(r) => {
                    session.submit_answer(r)?;
                    answered += 1;
                    let (lo, hi) = session.interval();
                    writeln!(out, "interval now [{}, {}]", rational::to_decimal(lo, 6), rational::to_decimal(hi, 6))?;
                    break;
                }
                Err(e) => writeln!(out, "{e}")?,
            }
        }
    }
    Ok(session_output(&session))
}
