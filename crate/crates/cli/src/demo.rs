//! Walkthroughs of the bundled examples, driven by the corpus files.

use std::fmt::Write as _;

use anyhow::Context;
use serde::Deserialize;
use serde_json::{json, Value};
use surething::axioms::{audit_events, check_p2, small_event_continuity_audit, CheckConfig};
use surething::bayes::laplace_urn;
use surething::decision::{load_problem, DecisionProblem};
use surething::rational::{self, int, ratio};
use surething::report::ViolationReport;
use surething::Rational;
use surething::scoring::{
    allais_analysis, allais_lotteries, combine_simultaneous, ellsberg_analysis, eu_score, AllaisFirst, AllaisSecond,
    EllsbergFirst, EllsbergSecond, Lottery, MoneyUtility, StateBet,
};

use crate::args::DemoName;
use crate::commands::dutch_book_text;
use crate::corpus;
use crate::output::{both, code, dollars, report_text, table, Output};

pub fn run(which: DemoName) -> anyhow::Result<Output> {
    match which {
        DemoName::Allais => allais(),
        DemoName::Ellsberg => ellsberg(),
        DemoName::Ryder => ryder(),
        DemoName::Laplace => laplace(),
    }
}

#[derive(Deserialize)]
struct Choices<A, B> {
    first: A,
    second: B,
}

#[derive(Deserialize)]
struct WithChoices<A, B> {
    choices: Choices<A, B>,
}

/// Act payoffs per state, consequence values scaled by `scale`.
fn act_table(out: &mut String, problem: &DecisionProblem, names: &[&str], scale: i64) {
    let mut rows = vec![std::iter::once(String::new())
        .chain(problem.states().labels().iter().cloned())
        .collect::<Vec<_>>()];
    for name in names {
        let Some(act) = problem.act(name) else { continue };
        let mut row = vec![name.to_string()];
        for &c in act.outcomes() {
            let cs = problem.consequences();
            row.push(cs.value(c).map_or_else(|| cs.label(c).to_string(), |v| dollars(&(v * int(scale)))));
        }
        rows.push(row);
    }
    table(out, &rows);
}

/// Branches with equal payoffs combined, in first-seen order.
fn merged(l: &Lottery) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for (p, x) in l.branches() {
        match out.iter_mut().find(|(_, y)| y == x) {
            Some((q, _)) => *q += p,
            None => out.push((p.clone(), x.clone())),
        }
    }
    out.retain(|(p, _)| p > &rational::zero());
    out
}

fn allais() -> anyhow::Result<Output> {
    let problem = load_problem(corpus::ALLAIS).context("allais.json")?;
    let picks: WithChoices<AllaisFirst, AllaisSecond> = serde_json::from_str(corpus::ALLAIS)?;
    let (first, second) = (picks.choices.first, picks.choices.second);
    let thousand = int(1000);
    let mut text = String::from("Two choice situations, payoffs in dollars\n");
    let lotteries = allais_lotteries();
    let mut rows = Vec::new();
    for l in &lotteries {
        let branches: Vec<String> = merged(l)
            .iter()
            .map(|(p, x)| {
                if p == &rational::one() {
                    format!("{} for certain", dollars(&(x * &thousand)))
                } else {
                    format!("{} chance of {}", rational::to_decimal(p, 2), dollars(&(x * &thousand)))
                }
            })
            .collect();
        rows.push(vec![l.name.clone(), branches.join(", ")]);
    }
    table(&mut text, &rows);

    text.push_str("\nThe same bets as lottery tickets 1-100\n");
    act_table(&mut text, &problem, &["I", "II", "III", "IV"], 1000);

    text.push_str("\nExpected value with utility linear in money\n");
    let mut eu_json = serde_json::Map::new();
    for l in &lotteries {
        let v = eu_score(l, &MoneyUtility::Linear)? * &thousand;
        let terms: Vec<String> = merged(l)
            .iter()
            .filter(|(_, x)| x > &rational::zero())
            .map(|(p, x)| {
                let amount = dollars(&(x * &thousand)).trim_start_matches('$').to_string();
                if p == &rational::one() {
                    amount
                } else {
                    format!("{} x {amount}", rational::to_decimal(p, 2))
                }
            })
            .collect();
        let total = dollars(&v).trim_start_matches('$').to_string();
        let sum = terms.join(" + ");
        if sum == total {
            let _ = writeln!(text, "  U({}) = {total}", l.name);
        } else {
            let _ = writeln!(text, "  U({}) = {sum} = {total}", l.name);
        }
        eu_json.insert(l.name.clone(), json!(rational::format(&v)));
    }

    let analysis = allais_analysis(first, second, &MoneyUtility::Linear)?;
    let _ = writeln!(text, "\nChosen: {first:?} and {second:?}");
    for (k, ineq) in analysis.implied.iter().enumerate() {
        let _ = writeln!(text, "  choice {} implies {}", k + 1, ineq.render());
    }
    let cfg = CheckConfig::default();
    let p2 = check_p2(&problem, &cfg);
    if let Some(c) = &analysis.contradiction {
        let _ = writeln!(text, "  together: {c}");
    }
    if analysis.sure_thing_violation {
        text.push_str("  no utility satisfies both; the pattern breaks the sure-thing principle\n");
    } else {
        text.push_str("  consistent with some expected-utility maximiser\n");
    }
    report_text(&mut text, &p2);

    let _ = writeln!(text, "\nDecision weights needed to reproduce the choices: {}", analysis.weight_condition);
    let weights_json = match &analysis.rationalization {
        Some(w) => {
            let mut m = serde_json::Map::new();
            for (p, v) in w.anchors() {
                let _ = writeln!(text, "  π({}) = {}", rational::to_decimal(p, 2), both(v));
                m.insert(rational::format(p), json!(rational::format(v)));
            }
            let sum = w.eval(&ratio(89, 100))? + w.eval(&ratio(11, 100))?;
            let _ = writeln!(text, "  π(0.89) + π(0.11) = {}", both(&sum));
            Value::Object(m)
        }
        None => {
            text.push_str("  no monotone weights reproduce them\n");
            Value::Null
        }
    };

    text.push_str("\nBoth bets settled on one draw\n");
    let bet = |n: &str| StateBet::from_act(&problem, n);
    let mut rows = vec![std::iter::once("bets".to_string())
        .chain(problem.states().labels().iter().cloned())
        .collect::<Vec<_>>()];
    let mut combos = serde_json::Map::new();
    for (a, b) in [("I", "IV"), ("II", "III"), ("I", "III"), ("II", "IV")] {
        let sum = combine_simultaneous(&[bet(a)?, bet(b)?])?;
        let scaled: Vec<_> = sum.payoffs.iter().map(|x| x * &thousand).collect();
        rows.push(std::iter::once(sum.name.clone()).chain(scaled.iter().map(dollars)).collect());
        combos.insert(sum.name, json!(scaled.iter().map(rational::format).collect::<Vec<_>>()));
    }
    table(&mut text, &rows);
    text.push_str("  I+IV and II+III pay the same in every state\n");

    let p = problem.probability().context("allais.json carries a probability")?;
    let audit = small_event_continuity_audit(&problem, &audit_events(&problem, p, &cfg), Some(p), &cfg)?;
    text.push_str("\nSmall-event modifications (ticket 1)\n");
    report_text(&mut text, &audit);

    Ok(Output {
        code: code(p2.is_violated() || analysis.sure_thing_violation),
        text,
        json: json!({
            "expected_utility": eu_json,
            "choices": [format!("{first:?}"), format!("{second:?}")],
            "implied": analysis.implied.iter().map(|i| i.render()).collect::<Vec<_>>(),
            "contradiction": analysis.contradiction,
            "sure_thing_violation": analysis.sure_thing_violation,
            "p2": p2,
            "weight_condition": analysis.weight_condition,
            "weights": weights_json,
            "simultaneous": combos,
            "audit": audit,
        }),
    })
}

#[derive(Deserialize)]
struct Urn {
    red: u32,
    unknown: u32,
}

#[derive(Deserialize)]
struct EllsbergExtras {
    urn: Urn,
}

fn ellsberg() -> anyhow::Result<Output> {
    let problem = load_problem(corpus::ELLSBERG).context("ellsberg.json")?;
    let picks: WithChoices<EllsbergFirst, EllsbergSecond> = serde_json::from_str(corpus::ELLSBERG)?;
    let extras: EllsbergExtras = serde_json::from_str(corpus::ELLSBERG)?;
    let (first, second) = (picks.choices.first, picks.choices.second);
    let mut text = format!(
        "An urn with {} red balls and {} black or yellow in unknown proportion\n",
        extras.urn.red, extras.urn.unknown
    );
    act_table(&mut text, &problem, &["I", "II"], 1);
    act_table(&mut text, &problem, &["III", "IV"], 1);

    let urn = laplace_urn(extras.urn.unknown, extras.urn.red);
    let black = urn.marginal_overall.clone().context("urn is not empty")?;
    let red = ratio(extras.urn.red.into(), (extras.urn.red + extras.urn.unknown).into());
    let hundred = int(100);
    let fair = [
        ("I", red.clone()),
        ("II", black.clone()),
        ("III", rational::one() - &black),
        ("IV", rational::one() - &red),
    ];
    let _ = writeln!(
        text,
        "\nUniform prior over the {} compositions: P(black) = {}",
        urn.compositions.len(),
        both(&black)
    );
    let rows: Vec<Vec<String>> = fair
        .iter()
        .map(|(n, p)| vec![n.to_string(), format!("fair price {}", dollars(&(p * &hundred)))])
        .collect();
    table(&mut text, &rows);

    let analysis = ellsberg_analysis(first, second);
    let _ = writeln!(text, "\nChosen: {first:?} and {second:?}");
    for j in analysis.order.judgments() {
        let _ = writeln!(text, "  implies {}", analysis.order.describe(j));
    }
    if analysis.ambiguity_averse {
        text.push_str("  ambiguity aversion: the known-odds bet wins both times\n");
    }
    if analysis.ambiguity_seeking {
        text.push_str("  ambiguity seeking: the unknown-odds bet wins both times\n");
    }
    let measure_json = match &analysis.measure {
        Ok(m) => {
            text.push_str("  a probability with P(Red) = 1/3 agrees:\n");
            let rows: Vec<Vec<String>> = m.to_labels().iter().map(|(s, p)| vec![format!("P({s})"), both(p)]).collect();
            table(&mut text, &rows);
            json!(surething::measure::MeasureDoc::from(m))
        }
        Err(cert) => {
            text.push_str("  no probability agrees; these conflict:\n");
            let lines = cert.describe(&analysis.order);
            for l in &lines {
                let _ = writeln!(text, "    {l}");
            }
            json!({ "certificate": lines })
        }
    };
    let p2 = check_p2(&problem, &CheckConfig::default());
    report_text(&mut text, &p2);

    text.push_str("\nPrices set by an ambiguity-averse bettor, bought together on one draw\n");
    let book = dutch_book_text("ellsberg.json", corpus::ELLSBERG)?;
    text.push_str(book.text.split_once('\n').map_or("", |(_, rest)| rest));

    Ok(Output {
        code: code(p2.is_violated() || analysis.sure_thing_violation || book.code != 0),
        text,
        json: json!({
            "marginal_black": rational::format(&black),
            "fair_prices": fair.iter().map(|(n, p)| (n.to_string(), json!(rational::format(&(p * &hundred))))).collect::<serde_json::Map<_, _>>(),
            "choices": [format!("{first:?}"), format!("{second:?}")],
            "ambiguity_averse": analysis.ambiguity_averse,
            "ambiguity_seeking": analysis.ambiguity_seeking,
            "sure_thing_violation": analysis.sure_thing_violation,
            "agreement": measure_json,
            "p2": p2,
            "dutch_book": book.json,
        }),
    })
}

fn ryder() -> anyhow::Result<Output> {
    let mut out = dutch_book_text("ryder.json", corpus::RYDER)?;
    out.text = format!("Two agents quoting different prices for one event\n{}", out.text);
    Ok(out)
}

fn laplace() -> anyhow::Result<Output> {
    let extras: EllsbergExtras = serde_json::from_str(corpus::ELLSBERG)?;
    let urn = laplace_urn(extras.urn.unknown, extras.urn.red);
    let n = urn.n_unknown;
    let mut text = format!("{n} balls of unknown colour (black or yellow), {} red\n", urn.fixed_other);
    let first = urn.compositions.first().cloned().unwrap_or_else(rational::one);
    if urn.compositions.iter().all(|p| *p == first) {
        let _ = writeln!(text, "  P(k black) = {} for k = 0..{n}", rational::format(&first));
    }
    let _ = writeln!(text, "  expected black balls {}", both(&urn.expected_black));
    if let Some(m) = &urn.marginal_unknown {
        let _ = writeln!(text, "  P(black | drawn from the unknown {n}) = {}", both(m));
    }
    if let Some(m) = &urn.marginal_overall {
        let _ = writeln!(text, "  P(black) for a draw from the whole urn = {}", both(m));
    }
    Ok(Output {
        code: 0,
        text,
        json: json!({
            "n_unknown": n,
            "fixed_red": urn.fixed_other,
            "compositions": urn.compositions.iter().map(rational::format).collect::<Vec<_>>(),
            "expected_black": rational::format(&urn.expected_black),
            "marginal_unknown": urn.marginal_unknown.as_ref().map(rational::format),
            "marginal_overall": urn.marginal_overall.as_ref().map(rational::format),
        }),
    })
}

/// Reports each demo would produce, for the exit-code tests.
pub fn reports(which: DemoName) -> anyhow::Result<Vec<ViolationReport>> {
    let out = run(which)?;
    let mut found = Vec::new();
    for key in ["p2", "audit"] {
        if let Some(v) = out.json.get(key) {
            found.push(serde_json::from_value(v.clone())?);
        }
    }
    Ok(found)
}
