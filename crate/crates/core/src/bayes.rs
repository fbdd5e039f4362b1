//! Conditioning and posterior updating on finite spaces.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decision::Event;
use crate::measure::ProbabilityMeasure;
use crate::rational::{self, Rational};
use crate::Error;

/// `B ↦ P(B∩D)/P(D)`.
pub fn condition(p: &ProbabilityMeasure, d: Event) -> Result<ProbabilityMeasure, Error> {
    if !d.fits(p.states().len()) {
        return Err(Error::EventOutOfRange);
    }
    let pd = p.prob(d);
    if pd.is_zero() {
        return Err(Error::ZeroProbability);
    }
    let masses = (0..p.states().len())
        .map(|s| {
            if d.contains(s) {
                p.mass(s) / &pd
            } else {
                Rational::zero()
            }
        })
        .collect();
    ProbabilityMeasure::new(p.states().clone(), masses)
}

/// Hypotheses with priors and per-hypothesis observation likelihoods.
/// Observations are independent given the hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteModel {
    hypotheses: Vec<(String, Rational)>,
    likelihood: Vec<BTreeMap<String, Rational>>,
    alphabet: BTreeSet<String>,
}

impl FiniteModel {
    /// `likelihood[i]` maps observations to `P(x | B_i)`; absent
    /// observations have likelihood zero.
    pub fn new(hypotheses: Vec<(String, Rational)>, likelihood: Vec<BTreeMap<String, Rational>>) -> Result<Self, Error> {
        if hypotheses.is_empty() {
            return Err(Error::invalid("model has no hypotheses"));
        }
        if likelihood.len() != hypotheses.len() {
            return Err(Error::invalid("one likelihood table is needed per hypothesis"));
        }
        let mut seen = BTreeSet::new();
        let mut total = Rational::zero();
        for (label, prior) in &hypotheses {
            if !seen.insert(label.as_str()) {
                return Err(Error::invalid(format!("duplicate hypothesis `{label}`")));
            }
            if prior.is_negative() {
                return Err(Error::invalid(format!("prior of `{label}` is negative")));
            }
            total += prior;
        }
        if !total.is_one() {
            return Err(Error::invalid(format!("priors sum to {}", rational::format(&total))));
        }
        for ((label, _), table) in hypotheses.iter().zip(&likelihood) {
            if table.values().any(|v| v.is_negative()) {
                return Err(Error::invalid(format!("negative likelihood under `{label}`")));
            }
            let sum = table.values().fold(Rational::zero(), |a, v| a + v);
            if !sum.is_one() {
                return Err(Error::invalid(format!(
                    "likelihoods under `{label}` sum to {}",
                    rational::format(&sum)
                )));
            }
        }
        let alphabet = likelihood.iter().flat_map(|t| t.keys().cloned()).collect();
        Ok(FiniteModel {
            hypotheses,
            likelihood,
            alphabet,
        })
    }

    pub fn hypotheses(&self) -> &[(String, Rational)] {
        &self.hypotheses
    }

    pub fn priors(&self) -> Vec<Rational> {
        self.hypotheses.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn likelihood(&self, hypothesis: usize, observation: &str) -> Rational {
        self.likelihood[hypothesis].get(observation).cloned().unwrap_or_else(Rational::zero)
    }

    /// Same likelihoods, new priors.
    pub fn with_priors(&self, priors: Vec<Rational>) -> Result<Self, Error> {
        let hypotheses = self.hypotheses.iter().zip(priors).map(|((l, _), p)| (l.clone(), p)).collect();
        FiniteModel::new(hypotheses, self.likelihood.clone())
    }

    /// Probability of the next observation, averaging over hypotheses.
    pub fn predictive(&self, observation: &str) -> Rational {
        self.hypotheses
            .iter()
            .enumerate()
            .map(|(i, (_, p))| p * self.likelihood(i, observation))
            .fold(Rational::zero(), |a, v| a + v)
    }
}

/// `P(B_i | x_1..x_n) ∝ P(B_i) Π P(x_k | B_i)`.
pub fn posterior<S: AsRef<str>>(model: &FiniteModel, observations: &[S]) -> Result<Vec<Rational>, Error> {
    for o in observations {
        if !model.alphabet.contains(o.as_ref()) {
            return Err(Error::invalid(format!("observation `{}` is not in the model", o.as_ref())));
        }
    }
    let joint: Vec<Rational> = model
        .hypotheses
        .iter()
        .enumerate()
        .map(|(i, (_, prior))| {
            observations
                .iter()
                .fold(prior.clone(), |acc, o| acc * model.likelihood(i, o.as_ref()))
        })
        .collect();
    let evidence = joint.iter().fold(Rational::zero(), |a, v| a + v);
    if evidence.is_zero() {
        return Err(Error::invalid("observations have zero probability under the model"));
    }
    Ok(joint.into_iter().map(|v| v / &evidence).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisDoc {
    pub label: String,
    #[serde(with = "rational::text")]
    pub prior: Rational,
}

/// `{hypotheses: [{label, prior}], likelihoods: {label: {obs: "p/q"}}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDoc {
    pub hypotheses: Vec<HypothesisDoc>,
    pub likelihoods: BTreeMap<String, LikelihoodRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LikelihoodRow(#[serde(with = "rational::text_map")] pub BTreeMap<String, Rational>);

impl ModelDoc {
    pub fn into_model(self) -> Result<FiniteModel, Error> {
        let mut rows = self.likelihoods;
        let mut tables = Vec::new();
        for h in &self.hypotheses {
            let row = rows
                .remove(&h.label)
                .ok_or_else(|| Error::load(format!("likelihoods.{}", h.label), "missing likelihood table"))?;
            tables.push(row.0);
        }
        if let Some(extra) = rows.keys().next() {
            return Err(Error::load(format!("likelihoods.{extra}"), "no such hypothesis"));
        }
        let hyps = self.hypotheses.into_iter().map(|h| (h.label, h.prior)).collect();
        FiniteModel::new(hyps, tables)
    }

    pub fn from_model(model: &FiniteModel) -> Self {
        ModelDoc {
            hypotheses: model
                .hypotheses
                .iter()
                .map(|(label, prior)| HypothesisDoc {
                    label: label.clone(),
                    prior: prior.clone(),
                })
                .collect(),
            likelihoods: model
                .hypotheses
                .iter()
                .zip(&model.likelihood)
                .map(|((l, _), t)| (l.clone(), LikelihoodRow(t.clone())))
                .collect(),
        }
    }
}

pub fn load_model(json: &str) -> Result<FiniteModel, Error> {
    serde_json::from_str::<ModelDoc>(json)?.into_model()
}

/// An urn with `n_unknown` balls of unknown black/yellow split plus
/// `fixed_other` balls of a known third colour, under a uniform prior
/// over the number `k` of black balls.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceUrn {
    pub n_unknown: u32,
    pub fixed_other: u32,
    /// `P(k)` for `k = 0..=n_unknown`.
    pub compositions: Vec<Rational>,
    pub expected_black: Rational,
    /// Chance the drawn ball is black given it is one of the unknown ones.
    pub marginal_unknown: Option<Rational>,
    /// Chance a ball drawn from the whole urn is black.
    pub marginal_overall: Option<Rational>,
}

impl LaplaceUrn {
    /// The compositions as a model over a single draw from the whole urn.
    pub fn model(&self) -> Option<FiniteModel> {
        let total = self.n_unknown + self.fixed_other;
        if total == 0 {
            return None;
        }
        let total = Rational::from_integer(total.into());
        let (hyps, tables) = self
            .compositions
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let k = k as u32;
                let mut t = BTreeMap::new();
                let frac = |n: u32| Rational::from_integer(n.into()) / &total;
                for (obs, n) in [("black", k), ("yellow", self.n_unknown - k), ("red", self.fixed_other)] {
                    if n > 0 {
                        t.insert(obs.to_string(), frac(n));
                    }
                }
                ((format!("k={k}"), p.clone()), t)
            })
            .unzip();
        Some(FiniteModel::new(hyps, tables).expect("urn model is well formed"))
    }
}

pub fn laplace_urn(n_unknown: u32, fixed_other: u32) -> LaplaceUrn {
    let each = Rational::new(1.into(), (n_unknown + 1).into());
    let compositions = vec![each.clone(); n_unknown as usize + 1];
    // Total probability over compositions.
    let expected_black = (0..=n_unknown).fold(Rational::zero(), |a, k| a + &each * Rational::from_integer(k.into()));
    let share = |n: u32| (n > 0).then(|| &expected_black / Rational::from_integer(n.into()));
    LaplaceUrn {
        n_unknown,
        fixed_other,
        compositions,
        marginal_unknown: share(n_unknown),
        marginal_overall: share(n_unknown + fixed_other),
        expected_black,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConglomerabilityBound {
    pub lo: Rational,
    pub hi: Rational,
    pub value: Rational,
    pub ok: bool,
}

/// `min_i P(E|B_i) ≤ P(E) ≤ max_i P(E|B_i)` over a finite partition.
pub fn conglomerability_bound(p: &ProbabilityMeasure, e: Event, partition: &[Event]) -> Result<ConglomerabilityBound, Error> {
    let n = p.states().len();
    if !e.fits(n) || partition.iter().any(|b| !b.fits(n)) {
        return Err(Error::EventOutOfRange);
    }
    if partition.is_empty() {
        return Err(Error::invalid("empty partition"));
    }
    let mut union = Event::empty();
    for b in partition {
        if !b.is_disjoint(union) {
            return Err(Error::invalid("partition cells overlap"));
        }
        union = union.union(*b);
    }
    if union != Event::full(n) {
        return Err(Error::invalid("partition cells do not cover the state space"));
    }
    let mut ratios = Vec::with_capacity(partition.len());
    for b in partition {
        let pb = p.prob(*b);
        if pb.is_zero() {
            return Err(Error::invalid(format!(
                "partition cell {{{}}} has probability zero",
                p.states().event_labels(*b).join(",")
            )));
        }
        ratios.push(p.prob(e.intersection(*b)) / pb);
    }
    let lo = ratios.iter().min().cloned().expect("non-empty");
    let hi = ratios.iter().max().cloned().expect("non-empty");
    let value = p.prob(e);
    let ok = lo <= value && value <= hi;
    Ok(ConglomerabilityBound { lo, hi, value, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::StateSpace;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn space(n: usize) -> StateSpace {
        StateSpace::new((1..=n).map(|i| format!("s{i}")).collect()).unwrap()
    }

    fn measure(masses: &[Rational]) -> ProbabilityMeasure {
        ProbabilityMeasure::new(space(masses.len()), masses.to_vec()).unwrap()
    }

    fn coin_model() -> FiniteModel {
        let fair: BTreeMap<_, _> = [("H".to_string(), ratio(1, 2)), ("T".to_string(), ratio(1, 2))].into();
        let two_headed: BTreeMap<_, _> = [("H".to_string(), int(1))].into();
        FiniteModel::new(
            vec![("fair".into(), ratio(1, 2)), ("two-headed".into(), ratio(1, 2))],
            vec![fair, two_headed],
        )
        .unwrap()
    }

    #[test]
    fn conditioning_examples() {
        let p = measure(&[ratio(1, 6), ratio(1, 3), ratio(1, 2)]);
        let q = condition(&p, Event::from_indices([1, 2])).unwrap();
        assert_eq!(q.masses(), &[int(0), ratio(2, 5), ratio(3, 5)]);
        assert_eq!(condition(&p, Event::full(3)).unwrap(), p);
        let u = ProbabilityMeasure::uniform(space(3));
        assert_eq!(condition(&u, Event::from_indices([0, 2])).unwrap().masses(), &[ratio(1, 2), int(0), ratio(1, 2)]);
        let z = measure(&[int(0), int(1)]);
        assert!(matches!(condition(&z, Event::from_indices([0])), Err(Error::ZeroProbability)));
    }

    #[test]
    fn posterior_examples() {
        let m = coin_model();
        assert_eq!(posterior(&m, &["H"]).unwrap(), vec![ratio(1, 3), ratio(2, 3)]);
        assert_eq!(posterior::<&str>(&m, &[]).unwrap(), m.priors());
        // Tails rules out the two-headed coin; a later head cannot revive it.
        assert_eq!(posterior(&m, &["T", "H"]).unwrap(), vec![int(1), int(0)]);
        let t: BTreeMap<_, _> = [("x".to_string(), int(1)), ("y".to_string(), int(0))].into();
        let degenerate = FiniteModel::new(vec![("a".into(), int(1))], vec![t]).unwrap();
        assert!(posterior(&degenerate, &["y"]).is_err());
        assert!(posterior(&m, &["edge"]).is_err());
    }

    #[test]
    fn identical_likelihoods_leave_prior() {
        let row: BTreeMap<_, _> = [("a".to_string(), ratio(1, 4)), ("b".to_string(), ratio(3, 4))].into();
        let m = FiniteModel::new(
            vec![("x".into(), ratio(1, 3)), ("y".into(), ratio(1, 3)), ("z".into(), ratio(1, 3))],
            vec![row.clone(), row.clone(), row],
        )
        .unwrap();
        assert_eq!(posterior(&m, &["a", "b", "b"]).unwrap(), m.priors());
    }

    #[test]
    fn model_validation() {
        let bad: BTreeMap<_, _> = [("H".to_string(), ratio(1, 2))].into();
        assert!(FiniteModel::new(vec![("a".into(), int(1))], vec![bad]).is_err());
        let ok: BTreeMap<_, _> = [("H".to_string(), int(1))].into();
        assert!(FiniteModel::new(vec![("a".into(), ratio(1, 2))], vec![ok]).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let json = r#"{"hypotheses":[{"label":"fair","prior":"1/2"},{"label":"biased","prior":0.5}],
            "likelihoods":{"fair":{"H":"1/2","T":"1/2"},"biased":{"H":"9/10","T":"1/10"}}}"#;
        let m = load_model(json).unwrap();
        assert_eq!(m.likelihood(1, "H"), ratio(9, 10));
        let again = serde_json::to_string(&ModelDoc::from_model(&m)).unwrap();
        assert_eq!(load_model(&again).unwrap(), m);
        assert!(load_model(r#"{"hypotheses":[{"label":"a","prior":1}],"likelihoods":{}}"#).is_err());
    }

    #[test]
    fn urn_sizes() {
        let u = laplace_urn(60, 30);
        assert!(u.compositions.iter().all(|p| *p == ratio(1, 61)));
        assert_eq!(u.compositions.len(), 61);
        assert_eq!(u.expected_black, int(30));
        assert_eq!(u.marginal_overall, Some(ratio(1, 3)));
        assert_eq!(u.marginal_unknown, Some(ratio(1, 2)));
        assert_eq!(u.model().unwrap().predictive("black"), ratio(1, 3));

        let empty = laplace_urn(0, 0);
        assert_eq!(empty.compositions, vec![int(1)]);
        assert!(empty.model().is_none());
        let two = laplace_urn(2, 0);
        assert_eq!(two.compositions, vec![ratio(1, 3); 3]);
        assert_eq!(two.marginal_unknown, Some(ratio(1, 2)));
    }

    #[test]
    fn conglomerability_examples() {
        let p = measure(&[ratio(1, 6), ratio(1, 3), ratio(1, 2)]);
        let e = Event::from_indices([0, 2]);
        let trivial = conglomerability_bound(&p, e, &[Event::full(3)]).unwrap();
        assert_eq!((trivial.lo.clone(), trivial.hi.clone()), (ratio(2, 3), ratio(2, 3)));
        assert!(trivial.ok);
        let two = conglomerability_bound(&p, e, &[Event::from_indices([0]), Event::from_indices([1, 2])]).unwrap();
        assert_eq!((two.lo, two.hi), (ratio(3, 5), int(1)));
        assert!(conglomerability_bound(&p, e, &[Event::from_indices([0, 1]), Event::from_indices([1, 2])]).is_err());
        assert!(conglomerability_bound(&p, e, &[Event::from_indices([0])]).is_err());
        let z = measure(&[int(0), int(1)]);
        assert!(conglomerability_bound(&z, Event::full(2), &[Event::from_indices([0]), Event::from_indices([1])]).is_err());
    }

    fn arb_measure() -> impl Strategy<Value = ProbabilityMeasure> {
        prop::collection::vec(1u32..20, 2..6).prop_map(|w| {
            let total: u32 = w.iter().sum();
            measure(&w.iter().map(|&x| Rational::new(x.into(), total.into())).collect::<Vec<_>>())
        })
    }

    proptest! {
        #[test]
        fn conditioning_is_the_ratio(p in arb_measure(), b in any::<u64>(), d in any::<u64>()) {
            let n = p.states().len();
            let b = Event::from_bits(b).intersection(Event::full(n));
            let d = Event::from_bits(d).intersection(Event::full(n));
            prop_assume!(!d.is_empty());
            let q = condition(&p, d).unwrap();
            prop_assert_eq!(q.prob(b) * p.prob(d), p.prob(b.intersection(d)));
        }

        #[test]
        fn sequential_updates_compose(obs in prop::collection::vec(prop::bool::ANY, 0..6)) {
            let m = coin_model();
            let obs: Vec<&str> = obs.iter().map(|&h| if h { "H" } else { "T" }).collect();
            let all_heads = obs.iter().all(|o| *o == "H");
            let batch = posterior(&m, &obs).unwrap();
            let mut step = m.clone();
            for o in &obs {
                step = step.with_priors(posterior(&step, &[o]).unwrap()).unwrap();
            }
            prop_assert_eq!(&batch, &step.priors());
            let mut reversed = obs.clone();
            reversed.reverse();
            prop_assert_eq!(&batch, &posterior(&m, &reversed).unwrap());
            prop_assert_eq!(all_heads, !batch[1].is_zero());
        }

        #[test]
        fn urn_marginal_is_expected_fraction(n in 0u32..40, fixed in 0u32..40) {
            let u = laplace_urn(n, fixed);
            let total = u.compositions.iter().fold(Rational::zero(), |a, v| a + v);
            prop_assert!(total.is_one());
            if n + fixed > 0 {
                let expected = &u.expected_black / Rational::from_integer((n + fixed).into());
                prop_assert_eq!(u.marginal_overall.clone(), Some(expected.clone()));
                prop_assert_eq!(u.model().unwrap().predictive("black"), expected);
            }
        }

        #[test]
        fn conglomerability_holds_on_finite_partitions(p in arb_measure(), e in any::<u64>(), labels in prop::collection::vec(0usize..3, 5)) {
            let n = p.states().len();
            let e = Event::from_bits(e).intersection(Event::full(n));
            let mut cells = vec![Event::empty(); 3];
            for s in 0..n {
                cells[labels[s]] = cells[labels[s]].with(s);
            }
            cells.retain(|c| !c.is_empty());
            let b = conglomerability_bound(&p, e, &cells).unwrap();
            prop_assert!(b.ok);
        }
    }
}
