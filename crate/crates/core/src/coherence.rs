//! Betting prices on events, Dutch books against them, and the coherence
//! test that a measure reproduces the prices.
//!
//! A stake `x` on an offer `(E, q)` pays its holder `x` if `E` obtains and
//! costs `x·q` up front. Positive stakes buy the bet from the agent at the
//! agent's price; negative stakes sell it to the agent. Utility is linear in
//! money throughout.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decision::{Event, StateSpace};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::measure::ProbabilityMeasure;
use crate::rational::{self, Rational, Wire};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct BetOffer {
    pub event: Event,
    /// Dollars per winning dollar.
    pub price: Rational,
    /// Largest absolute stake the agent accepts.
    pub bound: Rational,
    /// Whether the agent also takes the other side at the same price.
    pub two_sided: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSystem {
    states: StateSpace,
    offers: Vec<BetOffer>,
}

fn check_unit(value: &Rational) -> Result<(), Error> {
    if value.is_negative() || *value > Rational::one() {
        return Err(Error::OutOfRange {
            value: rational::format(value),
            lo: "0".into(),
            hi: "1".into(),
        });
    }
    Ok(())
}

impl PriceSystem {
    pub fn new(states: StateSpace, offers: Vec<BetOffer>) -> Result<Self, Error> {
        for (k, o) in offers.iter().enumerate() {
            let loc = format!("offers[{k}]");
            if !o.event.fits(states.len()) {
                return Err(Error::load(loc, "event outside the state space"));
            }
            check_unit(&o.price).map_err(|e| Error::load(&loc, format!("price: {e}")))?;
            if !o.bound.is_positive() {
                return Err(Error::load(loc, "stake bound must be positive"));
            }
        }
        Ok(PriceSystem { states, offers })
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn offers(&self) -> &[BetOffer] {
        &self.offers
    }

    /// Net payoff of one unit staked on `offer` in `state`.
    pub fn unit_profit(&self, offer: usize, state: usize) -> Rational {
        let o = &self.offers[offer];
        let win = if o.event.contains(state) {
            Rational::one()
        } else {
            Rational::zero()
        };
        win - &o.price
    }

    /// Same offers with every stake bound multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Result<Self, Error> {
        let offers = self
            .offers
            .iter()
            .map(|o| BetOffer {
                bound: &o.bound * factor,
                ..o.clone()
            })
            .collect();
        PriceSystem::new(self.states.clone(), offers)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DutchBook {
    /// One signed stake per offer.
    pub stakes: Vec<Rational>,
    pub guaranteed_profit: Rational,
    pub per_state_profit: Vec<Rational>,
}

impl DutchBook {
    /// Ledger of `stakes` against `prices`.
    pub fn evaluate(prices: &PriceSystem, stakes: Vec<Rational>) -> DutchBook {
        let per_state_profit: Vec<Rational> = (0..prices.states.len())
            .map(|s| {
                stakes
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (i, x)| acc + x * prices.unit_profit(i, s))
            })
            .collect();
        let guaranteed_profit = per_state_profit.iter().min().cloned().unwrap_or_else(Rational::zero);
        DutchBook {
            stakes,
            guaranteed_profit,
            per_state_profit,
        }
    }

    /// Re-derives the ledger and checks bounds and sidedness.
    pub fn reproduces(&self, prices: &PriceSystem) -> bool {
        if self.stakes.len() != prices.offers.len() {
            return false;
        }
        let respects = self.stakes.iter().zip(&prices.offers).all(|(x, o)| {
            x.abs() <= o.bound && (o.two_sided || !x.is_negative())
        });
        respects
            && DutchBook::evaluate(prices, self.stakes.clone()) == *self
            && self.guaranteed_profit.is_positive()
    }

    /// Up-front money paid by the bookie (negative when received).
    pub fn net_cost(&self, prices: &PriceSystem) -> Rational {
        self.stakes
            .iter()
            .zip(&prices.offers)
            .fold(Rational::zero(), |acc, (x, o)| acc + x * &o.price)
    }

    pub fn to_doc(&self, prices: &PriceSystem) -> DutchBookDoc {
        DutchBookDoc {
            stakes: self
                .stakes
                .iter()
                .zip(&prices.offers)
                .map(|(x, o)| StakeDoc {
                    event: prices.states.event_labels(o.event),
                    price: o.price.clone(),
                    stake: x.clone(),
                })
                .collect(),
            guaranteed_profit: self.guaranteed_profit.clone(),
            per_state_profit: prices
                .states
                .labels()
                .iter()
                .cloned()
                .zip(self.per_state_profit.iter().cloned())
                .collect(),
        }
    }
}

/// Price per unit payoff equals the subjective probability.
pub fn fair_price(p: &Rational) -> Result<Rational, Error> {
    check_unit(p)?;
    Ok(p.clone())
}

/// What an agent quoting `q` while believing `p` stands to lose per unit
/// once the counterparty may pick the side.
pub fn exposure(p: &Rational, q: &Rational) -> Result<Rational, Error> {
    check_unit(p)?;
    check_unit(q)?;
    Ok((p - q).abs())
}

/// Maximises the worst-state profit over bounded stakes; a book exists
/// exactly when that optimum is positive.
pub fn dutch_book_search(prices: &PriceSystem) -> Option<DutchBook> {
    let m = prices.offers.len();
    let n = prices.states.len();
    let t = m;
    let mut lp = LinearProgram::new(m + 1);
    lp.set_free(t);
    lp.set_objective(t, Rational::one());
    for (i, o) in prices.offers.iter().enumerate() {
        lp.bound_above(i, o.bound.clone());
        if o.two_sided {
            lp.set_free(i);
            lp.constrain(vec![(i, Rational::one())], Relation::Ge, -o.bound.clone());
        }
    }
    for s in 0..n {
        let mut row: Vec<(usize, Rational)> = (0..m)
            .map(|i| (i, prices.unit_profit(i, s)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        row.push((t, -Rational::one()));
        lp.constrain(row, Relation::Ge, Rational::zero());
    }
    let sol = match lp.solve() {
        LpOutcome::Optimal(s) => s,
        // Bounded stakes keep the LP bounded; zero stakes keep it feasible.
        _ => return None,
    };
    if !sol.objective.is_positive() {
        return None;
    }
    let book = DutchBook::evaluate(prices, sol.values[..m].to_vec());
    debug_assert_eq!(book.guaranteed_profit, sol.objective);
    Some(book)
}

/// Offers that jointly admit no measure (minimal under deletion), with a
/// book exploiting the full price system.
#[derive(Debug, Clone, PartialEq)]
pub struct Incoherent {
    pub offers: Vec<usize>,
    pub book: Option<DutchBook>,
}

fn measure_for(prices: &PriceSystem, picks: &[usize]) -> Option<Vec<Rational>> {
    let n = prices.states.len();
    let mut lp = LinearProgram::new(n);
    lp.constrain((0..n).map(|s| (s, Rational::one())).collect(), Relation::Eq, Rational::one());
    for &i in picks {
        let o = &prices.offers[i];
        let row = o.event.members().map(|s| (s, Rational::one())).collect();
        let rel = if o.two_sided { Relation::Eq } else { Relation::Le };
        lp.constrain(row, rel, o.price.clone());
    }
    lp.solve().optimal().map(|s| s.values)
}

/// A measure matching every two-sided price (and under every one-sided
/// price), or the reason none exists.
#[allow(clippy::result_large_err)]
pub fn coherence_check(prices: &PriceSystem) -> Result<ProbabilityMeasure, Incoherent> {
    let all: Vec<usize> = (0..prices.offers.len()).collect();
    if let Some(masses) = measure_for(prices, &all) {
        return Ok(ProbabilityMeasure::new(prices.states.clone(), masses).expect("simplex row"));
    }
    let mut core = all;
    let mut i = 0;
    while i < core.len() {
        let mut trial = core.clone();
        trial.remove(i);
        if measure_for(prices, &trial).is_none() {
            core = trial;
        } else {
            i += 1;
        }
    }
    Err(Incoherent {
        offers: core,
        book: dutch_book_search(prices),
    })
}

/// Two agents quoting different prices on the same event.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAgentBook {
    /// States `[E, not E]`; offers `[agent A, agent B]`.
    pub prices: PriceSystem,
    pub book: DutchBook,
}

/// Sells to whoever quotes high and buys from whoever quotes low.
pub fn two_agent_dutch_book(p_a: &Rational, p_b: &Rational, stake: &Rational) -> Result<Option<TwoAgentBook>, Error> {
    check_unit(p_a)?;
    check_unit(p_b)?;
    if !stake.is_positive() {
        return Err(Error::invalid("stake must be positive"));
    }
    if p_a == p_b {
        return Ok(None);
    }
    let states = StateSpace::new(vec!["E".into(), "not E".into()])?;
    let e = Event::from_indices([0]);
    let offer = |price: &Rational| BetOffer {
        event: e,
        price: price.clone(),
        bound: stake.clone(),
        two_sided: true,
    };
    let prices = PriceSystem::new(states, vec![offer(p_a), offer(p_b)])?;
    let stakes = if p_a > p_b {
        vec![-stake.clone(), stake.clone()]
    } else {
        vec![stake.clone(), -stake.clone()]
    };
    let book = DutchBook::evaluate(&prices, stakes);
    Ok(Some(TwoAgentBook { prices, book }))
}

// ---------------------------------------------------------------------------
// Wire format

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfferDoc {
    pub event: Vec<String>,
    pub price: Wire,
    pub bound: Wire,
    #[serde(default = "yes")]
    pub two_sided: bool,
}

fn yes() -> bool {
    true
}

/// `{states: [...], offers: [{event, price, bound, two_sided}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceSystemDoc {
    pub states: Vec<String>,
    pub offers: Vec<OfferDoc>,
}

impl PriceSystemDoc {
    pub fn into_prices(self) -> Result<PriceSystem, Error> {
        let states = StateSpace::new(self.states).map_err(|e| Error::load("states", e.to_string()))?;
        let mut offers = Vec::with_capacity(self.offers.len());
        for (k, o) in self.offers.into_iter().enumerate() {
            let mut e = Event::empty();
            for l in &o.event {
                let i = states
                    .index_of(l)
                    .ok_or_else(|| Error::load(format!("offers[{k}]"), format!("unknown state `{l}`")))?;
                e = e.with(i);
            }
            offers.push(BetOffer {
                event: e,
                price: o.price.0,
                bound: o.bound.0,
                two_sided: o.two_sided,
            });
        }
        PriceSystem::new(states, offers)
    }

    pub fn from_prices(p: &PriceSystem) -> Self {
        PriceSystemDoc {
            states: p.states.labels().to_vec(),
            offers: p
                .offers
                .iter()
                .map(|o| OfferDoc {
                    event: p.states.event_labels(o.event),
                    price: Wire(o.price.clone()),
                    bound: Wire(o.bound.clone()),
                    two_sided: o.two_sided,
                })
                .collect(),
        }
    }
}

pub fn load_prices(document: &str) -> Result<PriceSystem, Error> {
    let doc: PriceSystemDoc = serde_json::from_str(document)?;
    doc.into_prices()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StakeDoc {
    pub event: Vec<String>,
    #[serde(with = "rational::text")]
    pub price: Rational,
    #[serde(with = "rational::text")]
    pub stake: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DutchBookDoc {
    pub stakes: Vec<StakeDoc>,
    #[serde(with = "rational::text")]
    pub guaranteed_profit: Rational,
    #[serde(with = "rational::text_map")]
    pub per_state_profit: std::collections::BTreeMap<String, Rational>,
}
