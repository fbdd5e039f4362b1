//! Lottery scores under expected utility and under decision weights, and
//! the two classic choice paradoxes worked out exactly.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decision::{DecisionProblem, Event, StateSpace};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::measure::ProbabilityMeasure;
use crate::qualitative::{find_agreeing_measure, AgreementOptions, EventJudgment, EventOrder, EventRel, InfeasibleOrder};
use crate::rational::{self, ratio, Rational};
use crate::Error;

/// `(probability, payoff)` branches; leftover probability pays 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    pub name: String,
    branches: Vec<(Rational, Rational)>,
}

impl Lottery {
    pub fn new(name: impl Into<String>, branches: Vec<(Rational, Rational)>) -> Result<Self, Error> {
        let mut total = Rational::zero();
        for (p, _) in &branches {
            if p.is_negative() {
                return Err(Error::OutOfRange {
                    value: rational::format(p),
                    lo: "0".into(),
                    hi: "1".into(),
                });
            }
            total += p;
        }
        if total > Rational::one() {
            return Err(Error::invalid(format!(
                "branch probabilities sum to {}",
                rational::format(&total)
            )));
        }
        Ok(Lottery {
            name: name.into(),
            branches,
        })
    }

    pub fn branches(&self) -> &[(Rational, Rational)] {
        &self.branches
    }

    /// Probability left over for the implicit zero payoff.
    pub fn residual(&self) -> Rational {
        Rational::one() - self.branches.iter().fold(Rational::zero(), |a, (p, _)| a + p)
    }
}

/// Utility of money.
#[derive(Debug, Clone, PartialEq)]
pub enum MoneyUtility {
    Linear,
    /// Exact values at listed payoffs; other payoffs are an error.
    Table(BTreeMap<Rational, Rational>),
}

impl MoneyUtility {
    pub fn eval(&self, x: &Rational) -> Result<Rational, Error> {
        match self {
            MoneyUtility::Linear => Ok(x.clone()),
            MoneyUtility::Table(t) => t
                .get(x)
                .cloned()
                .ok_or_else(|| Error::invalid(format!("utility undefined at payoff {}", rational::format(x)))),
        }
    }
}

/// Decision weights: `π(0)=0`, `π(1)=1`, piecewise linear in between
/// through `(0, zero_limit)`, the interior anchors, and `(1, one_limit)`.
/// The limits let π jump at either end.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    anchors: Vec<(Rational, Rational)>,
    zero_limit: Rational,
    one_limit: Rational,
}

impl WeightFunction {
    pub fn new(mut anchors: Vec<(Rational, Rational)>, zero_limit: Rational, one_limit: Rational) -> Result<Self, Error> {
        anchors.sort_by(|a, b| a.0.cmp(&b.0));
        for w in anchors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid("duplicate weight anchor"));
            }
        }
        let unit = |v: &Rational| !v.is_negative() && *v <= Rational::one();
        if anchors.iter().any(|(p, _)| p.is_zero() || !p.is_positive() || *p >= Rational::one()) {
            return Err(Error::invalid("weight anchors must lie strictly between 0 and 1"));
        }
        let mut chain = vec![&zero_limit];
        chain.extend(anchors.iter().map(|(_, w)| w));
        chain.push(&one_limit);
        if !chain.iter().all(|v| unit(v)) {
            return Err(Error::invalid("weights must lie in [0, 1]"));
        }
        if chain.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("weights must be non-decreasing"));
        }
        Ok(WeightFunction {
            anchors,
            zero_limit,
            one_limit,
        })
    }

    pub fn identity() -> Self {
        WeightFunction {
            anchors: Vec::new(),
            zero_limit: Rational::zero(),
            one_limit: Rational::one(),
        }
    }

    pub fn zero_limit(&self) -> &Rational {
        &self.zero_limit
    }

    pub fn one_limit(&self) -> &Rational {
        &self.one_limit
    }

    pub fn anchors(&self) -> &[(Rational, Rational)] {
        &self.anchors
    }

    pub fn eval(&self, p: &Rational) -> Result<Rational, Error> {
        if p.is_negative() || *p > Rational::one() {
            return Err(Error::OutOfRange {
                value: rational::format(p),
                lo: "0".into(),
                hi: "1".into(),
            });
        }
        if p.is_zero() {
            return Ok(Rational::zero());
        }
        if p.is_one() {
            return Ok(Rational::one());
        }
        let mut left = (Rational::zero(), self.zero_limit.clone());
        for (x, y) in self.anchors.iter().chain(std::iter::once(&(Rational::one(), self.one_limit.clone()))) {
            if p <= x {
                let (x0, y0) = &left;
                return Ok(y0 + (y - y0) * (p - x0) / (x - x0));
            }
            left = (x.clone(), y.clone());
        }
        unreachable!("p < 1 always meets the last segment")
    }
}

/// `Σ p_i·u(f_i)`, the residual paying 0.
pub fn eu_score(l: &Lottery, u: &MoneyUtility) -> Result<Rational, Error> {
    let mut total = Rational::zero();
    for (p, f) in &l.branches {
        total += p * u.eval(f)?;
    }
    let residual = l.residual();
    if !residual.is_zero() {
        total += residual * u.eval(&Rational::zero())?;
    }
    Ok(total)
}

fn require_zero_at_zero(u: &MoneyUtility) -> Result<(), Error> {
    match u.eval(&Rational::zero()) {
        Ok(v) if v.is_zero() => Ok(()),
        Ok(_) => Err(Error::invalid("prospect scores need u(0) = 0")),
        // An undefined u(0) only matters if a zero payoff is scored.
        Err(_) => Ok(()),
    }
}

/// `Σ π(p_i)·u(f_i)` over the non-zero payoffs. Branches paying the same
/// amount are merged first, so a sure payoff scores `u(f)`.
pub fn prospect_score(l: &Lottery, u: &MoneyUtility, w: &WeightFunction) -> Result<Rational, Error> {
    require_zero_at_zero(u)?;
    let mut merged: BTreeMap<&Rational, Rational> = BTreeMap::new();
    for (p, f) in &l.branches {
        w.eval(p)?;
        *merged.entry(f).or_insert_with(Rational::zero) += p;
    }
    let mut total = Rational::zero();
    for (f, p) in merged {
        if !f.is_zero() {
            total += w.eval(&p)? * u.eval(f)?;
        }
    }
    Ok(total)
}

/// `π(p)·u(f)/p`, the utility that makes the prospect score an expectation.
pub fn chance_dependent_utility(p: &Rational, f: &Rational, u: &MoneyUtility, w: &WeightFunction) -> Result<Rational, Error> {
    if p.is_zero() {
        return Err(Error::invalid("chance-dependent utility needs p > 0"));
    }
    Ok(w.eval(p)? * u.eval(f)? / p)
}

/// `π(p) + π(1-p) < 1`.
pub fn subcertainty_check(w: &WeightFunction, p: &Rational) -> Result<bool, Error> {
    if !p.is_positive() || *p >= Rational::one() {
        return Err(Error::OutOfRange {
            value: rational::format(p),
            lo: "0 (exclusive)".into(),
            hi: "1 (exclusive)".into(),
        });
    }
    Ok(w.eval(p)? + w.eval(&(Rational::one() - p))? < Rational::one())
}

// ---------------------------------------------------------------------------
// The common-consequence paradox

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AllaisFirst {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AllaisSecond {
    III,
    IV,
}

/// Ticket masses: ticket 1, tickets 2–11, tickets 12–100.
pub fn allais_probabilities() -> [Rational; 3] {
    [ratio(1, 100), ratio(10, 100), ratio(89, 100)]
}

/// Payoffs in thousands of dollars on the three ticket groups.
pub fn allais_payoffs() -> [(&'static str, [i64; 3]); 4] {
    [
        ("I", [500, 500, 500]),
        ("II", [0, 2500, 500]),
        ("III", [500, 500, 0]),
        ("IV", [0, 2500, 0]),
    ]
}

pub fn allais_lotteries() -> Vec<Lottery> {
    let probs = allais_probabilities();
    allais_payoffs()
        .iter()
        .map(|(name, pay)| {
            let branches = probs.iter().zip(pay).map(|(p, x)| (p.clone(), rational::int(*x))).collect();
            Lottery::new(*name, branches).expect("fixed lottery")
        })
        .collect()
}

/// `a·U(500) + b·U(2500) + c·U(0)`, read as "> 0" or "< 0".
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityInequality {
    pub terms: Vec<(Rational, Rational)>,
    pub positive: bool,
}

impl UtilityInequality {
    pub fn render(&self) -> String {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for (coeff, payoff) in &self.terms {
            let term = format!("{}·U({})", short_decimal(&coeff.abs()), rational::format(payoff));
            if coeff.is_positive() == self.positive {
                lhs.push(term);
            } else {
                rhs.push(term);
            }
        }
        let side = |v: &Vec<String>| if v.is_empty() { "0".to_string() } else { v.join(" + ") };
        format!("{} > {}", side(&lhs), side(&rhs))
    }

    pub fn holds(&self, u: &MoneyUtility) -> Result<bool, Error> {
        let mut v = Rational::zero();
        for (c, x) in &self.terms {
            v += c * u.eval(x)?;
        }
        Ok(if self.positive { v.is_positive() } else { v.is_negative() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllaisReport {
    pub first: AllaisFirst,
    pub second: AllaisSecond,
    /// Expected utility of I–IV under the supplied utility.
    pub expected: Vec<(String, Rational)>,
    pub implied: [UtilityInequality; 2],
    pub sure_thing_violation: bool,
    /// Rendered chain for mixed patterns.
    pub contradiction: Option<String>,
    /// Whether the supplied utility itself produces both choices.
    pub matches_given_utility: bool,
    /// The weight condition a decision-weight account needs.
    pub weight_condition: String,
    /// Weights reproducing both choices under the supplied utility.
    pub rationalization: Option<WeightFunction>,
}

/// `0.1` rather than `0.10`.
fn short_decimal(x: &Rational) -> String {
    let d = rational::to_decimal(x, 6);
    let d = d.trim_end_matches('0');
    d.strip_suffix('.').unwrap_or(d).to_string()
}

/// `U(I) - U(II) = 0.11 U(500) - 0.1 U(2500) - 0.01 U(0)`, and the same
/// difference for III - IV.
fn common_difference() -> Vec<(Rational, Rational)> {
    vec![
        (ratio(11, 100), rational::int(500)),
        (ratio(-1, 10), rational::int(2500)),
        (ratio(-1, 100), rational::int(0)),
    ]
}

pub fn allais_analysis(first: AllaisFirst, second: AllaisSecond, u: &MoneyUtility) -> Result<AllaisReport, Error> {
    let expected = allais_lotteries()
        .iter()
        .map(|l| Ok((l.name.clone(), eu_score(l, u)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let implied = [
        UtilityInequality {
            terms: common_difference(),
            positive: first == AllaisFirst::I,
        },
        UtilityInequality {
            terms: common_difference(),
            positive: second == AllaisSecond::III,
        },
    ];
    let mixed = implied[0].positive != implied[1].positive;
    let contradiction = mixed.then(|| {
        if first == AllaisFirst::I {
            "0.11·U(500) > 0.1·U(2500) > 0.11·U(500) (taking U(0) = 0)".to_string()
        } else {
            "0.1·U(2500) > 0.11·U(500) > 0.1·U(2500) (taking U(0) = 0)".to_string()
        }
    });
    let matches_given_utility = implied[0].holds(u)? && implied[1].holds(u)?;
    let weight_condition = match (first, second) {
        (AllaisFirst::I, AllaisSecond::IV) => "π(0.89) + π(0.11) < 1",
        (AllaisFirst::II, AllaisSecond::III) => "π(0.89) + π(0.11) > 1",
        (AllaisFirst::I, AllaisSecond::III) => "π(0.89) + π(0.11) ≤ 1 is not forced; 0.11·U(500) > 0.1·U(2500) suffices",
        (AllaisFirst::II, AllaisSecond::IV) => "π(0.89) + π(0.11) ≥ 1 is not forced; 0.1·U(2500) > 0.11·U(500) suffices",
    }
    .to_string();
    let rationalization = allais_rationalization(first, second, u)?;
    Ok(AllaisReport {
        first,
        second,
        expected,
        implied,
        sure_thing_violation: mixed,
        contradiction,
        matches_given_utility,
        weight_condition,
        rationalization,
    })
}

/// Weights `π(0.10) ≤ π(0.11) ≤ π(0.89)` making both choices strict
/// under prospect scores. Among those with a usable margin, the one
/// closest to the identity (sum of absolute changes) is returned.
/// Utilities are measured from `U(0)`, the common worst outcome.
pub fn allais_rationalization(first: AllaisFirst, second: AllaisSecond, u: &MoneyUtility) -> Result<Option<WeightFunction>, Error> {
    let u0 = u.eval(&Rational::zero())?;
    let u500 = u.eval(&rational::int(500))? - &u0;
    let u2500 = u.eval(&rational::int(2500))? - &u0;
    let s1 = if first == AllaisFirst::I { Rational::one() } else { -Rational::one() };
    let s2 = if second == AllaisSecond::III { Rational::one() } else { -Rational::one() };
    let points = [ratio(10, 100), ratio(11, 100), ratio(89, 100)];

    // Variables: w10, w11, w89, then (up, down) per weight, then the margin.
    let build = |margin: Option<&Rational>| {
        let one = Rational::one;
        let m = 9;
        let mut lp = LinearProgram::new(10);
        for v in 0..3 {
            lp.bound_above(v, one());
        }
        lp.constrain(vec![(0, one()), (1, -one())], Relation::Le, Rational::zero());
        lp.constrain(vec![(1, one()), (2, -one())], Relation::Le, Rational::zero());
        // V(I) - V(II) = U500 - w10·U2500 - w89·U500
        let mut r1 = vec![(0, -&s1 * &u2500), (2, -&s1 * &u500)];
        // V(III) - V(IV) = w11·U500 - w10·U2500
        let mut r2 = vec![(1, &s2 * &u500), (0, -&s2 * &u2500)];
        match margin {
            None => {
                r1.push((m, -one()));
                r2.push((m, -one()));
                lp.bound_above(m, one());
                lp.set_objective(m, one());
                lp.constrain(r1, Relation::Ge, -&s1 * &u500);
                lp.constrain(r2, Relation::Ge, Rational::zero());
            }
            Some(d) => {
                lp.constrain(r1, Relation::Ge, d - &s1 * &u500);
                lp.constrain(r2, Relation::Ge, d.clone());
                for (k, p) in points.iter().enumerate() {
                    let (up, down) = (3 + 2 * k, 4 + 2 * k);
                    lp.constrain(vec![(k, one()), (up, -one()), (down, one())], Relation::Eq, p.clone());
                    lp.set_objective(up, -one());
                    lp.set_objective(down, -one());
                }
            }
        }
        lp
    };
    let best = match build(None).solve() {
        LpOutcome::Optimal(s) if s.objective.is_positive() => s.objective,
        _ => return Ok(None),
    };
    let half = best / rational::int(2);
    let v = match build(Some(&half)).solve() {
        LpOutcome::Optimal(s) => s.values,
        _ => return Ok(None),
    };
    let w = WeightFunction::new(
        points.iter().cloned().zip(v[..3].iter().cloned()).collect(),
        Rational::zero(),
        Rational::one(),
    )?;
    Ok(Some(w))
}

/// Payoffs of one bet on each cell of a shared partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateBet {
    pub name: String,
    pub partition: Vec<String>,
    pub payoffs: Vec<Rational>,
}

impl StateBet {
    pub fn from_act(problem: &DecisionProblem, act: &str) -> Result<Self, Error> {
        let a = problem.act(act).ok_or_else(|| Error::UnknownAct(act.into()))?;
        let cs = problem.consequences();
        let payoffs = a
            .outcomes()
            .iter()
            .map(|&c| {
                cs.value(c)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("consequence `{}` has no monetary value", cs.label(c))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StateBet {
            name: act.to_string(),
            partition: problem.states().labels().to_vec(),
            payoffs,
        })
    }
}

/// Statewise sum of bets settled by one draw.
pub fn combine_simultaneous(bets: &[StateBet]) -> Result<StateBet, Error> {
    let first = bets.first().ok_or_else(|| Error::invalid("no bets to combine"))?;
    let mut payoffs = vec![Rational::zero(); first.partition.len()];
    for b in bets {
        if b.partition != first.partition || b.payoffs.len() != payoffs.len() {
            return Err(Error::invalid(format!(
                "bet `{}` is over a different partition than `{}`",
                b.name, first.name
            )));
        }
        for (acc, x) in payoffs.iter_mut().zip(&b.payoffs) {
            *acc += x;
        }
    }
    let name = bets.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join("+");
    Ok(StateBet {
        name,
        partition: first.partition.clone(),
        payoffs,
    })
}

// ---------------------------------------------------------------------------
// The urn with unknown composition

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EllsbergFirst {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EllsbergSecond {
    III,
    IV,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllsbergReport {
    pub first: EllsbergFirst,
    pub second: EllsbergSecond,
    pub order: EventOrder,
    pub ambiguity_averse: bool,
    pub ambiguity_seeking: bool,
    pub sure_thing_violation: bool,
    /// A measure with P(Red) = 1/3 agreeing with both choices.
    pub measure: Result<ProbabilityMeasure, InfeasibleOrder>,
}

pub fn ellsberg_states() -> StateSpace {
    StateSpace::new(vec!["Red".into(), "Black".into(), "Yellow".into()]).expect("fixed labels")
}

pub fn ellsberg_analysis(first: EllsbergFirst, second: EllsbergSecond) -> EllsbergReport {
    let states = ellsberg_states();
    let (red, black, yellow) = (0, 1, 2);
    let e = |ix: &[usize]| Event::from_indices(ix.iter().copied());
    let j1 = match first {
        EllsbergFirst::I => EventJudgment {
            left: e(&[black]),
            right: e(&[red]),
            rel: EventRel::Less,
        },
        EllsbergFirst::II => EventJudgment {
            left: e(&[red]),
            right: e(&[black]),
            rel: EventRel::Less,
        },
    };
    let j2 = match second {
        EllsbergSecond::IV => EventJudgment {
            left: e(&[red, yellow]),
            right: e(&[black, yellow]),
            rel: EventRel::Less,
        },
        EllsbergSecond::III => EventJudgment {
            left: e(&[black, yellow]),
            right: e(&[red, yellow]),
            rel: EventRel::Less,
        },
    };
    let order = EventOrder::new(states, vec![j1, j2]).expect("events fit");
    let opts = AgreementOptions {
        strict: true,
        pins: vec![(e(&[red]), ratio(1, 3))],
    };
    let measure = find_agreeing_measure(&order, &opts).map(|a| a.measure);
    let averse = first == EllsbergFirst::I && second == EllsbergSecond::IV;
    let seeking = first == EllsbergFirst::II && second == EllsbergSecond::III;
    EllsbergReport {
        first,
        second,
        order,
        ambiguity_averse: averse,
        ambiguity_seeking: seeking,
        sure_thing_violation: averse || seeking,
        measure,
    }
}
