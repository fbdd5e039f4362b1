//! Expected utility, and fitting a measure and/or a utility so that
//! expected utility reproduces the declared judgments.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{Act, DecisionProblem, PrefRel};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::measure::{MeasureDoc, ProbabilityMeasure};
use crate::rational::{self, Rational};
use crate::report::{ActRef, AxiomId, Ordering3, Verdict, ViolationReport, Witness};
use crate::Error;

/// One utility value per consequence, in consequence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityFunction {
    values: Vec<Rational>,
}

impl UtilityFunction {
    pub fn new(values: Vec<Rational>) -> Self {
        UtilityFunction { values }
    }

    /// Utility equal to the monetary value of each consequence.
    pub fn monetary(problem: &DecisionProblem) -> Result<Self, Error> {
        let cs = problem.consequences();
        (0..cs.len())
            .map(|i| {
                cs.value(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("consequence `{}` has no monetary value", cs.label(i))))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(UtilityFunction::new)
    }

    pub fn from_labels(problem: &DecisionProblem, map: &BTreeMap<String, Rational>) -> Result<Self, Error> {
        let cs = problem.consequences();
        let mut values = Vec::with_capacity(cs.len());
        for l in cs.labels() {
            values.push(
                map.get(l)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("utility is missing consequence `{l}`")))?,
            );
        }
        if let Some(extra) = map.keys().find(|k| cs.index_of(k).is_none()) {
            return Err(Error::invalid(format!("utility names unknown consequence `{extra}`")));
        }
        Ok(UtilityFunction::new(values))
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, consequence: usize) -> &Rational {
        &self.values[consequence]
    }

    pub fn to_labels(&self, problem: &DecisionProblem) -> BTreeMap<String, Rational> {
        problem
            .consequences()
            .labels()
            .iter()
            .cloned()
            .zip(self.values.iter().cloned())
            .collect()
    }

    /// `a·U + b`.
    pub fn affine(&self, a: &Rational, b: &Rational) -> Self {
        UtilityFunction::new(self.values.iter().map(|v| a * v + b).collect())
    }

    /// Rescaled so the minimum is 0 and the maximum 1; constants map to 0.
    pub fn normalized(&self) -> Self {
        let (Some(lo), Some(hi)) = (self.values.iter().min(), self.values.iter().max()) else {
            return self.clone();
        };
        if lo == hi {
            return UtilityFunction::new(vec![Rational::zero(); self.values.len()]);
        }
        let scale = Rational::one() / (hi - lo);
        self.affine(&scale, &(-lo * &scale))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub measure: ProbabilityMeasure,
    pub utility: UtilityFunction,
}

impl Representation {
    pub fn to_doc(&self, problem: &DecisionProblem) -> RepresentationDoc {
        RepresentationDoc {
            measure: MeasureDoc::from(&self.measure),
            utility: self.utility.to_labels(problem),
        }
    }
}

/// JSON `{measure: {state: "p/q"}, utility: {consequence: "p/q"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationDoc {
    pub measure: MeasureDoc,
    #[serde(with = "rational::text_map")]
    pub utility: BTreeMap<String, Rational>,
}

impl RepresentationDoc {
    pub fn into_representation(self, problem: &DecisionProblem) -> Result<Representation, Error> {
        Ok(Representation {
            measure: ProbabilityMeasure::from_labels(problem.states().clone(), &self.measure.0)?,
            utility: UtilityFunction::from_labels(problem, &self.utility)?,
        })
    }
}

pub fn expected_utility(act: &Act, rep: &Representation) -> Rational {
    expected(act.outcomes(), rep.measure.masses(), rep.utility.values())
}

fn expected(outcomes: &[usize], masses: &[Rational], utility: &[Rational]) -> Rational {
    outcomes
        .iter()
        .zip(masses)
        .fold(Rational::zero(), |acc, (&c, p)| acc + p * &utility[c])
}

/// Every declared judgment against the expected-utility order.
pub fn verify_agreement(problem: &DecisionProblem, rep: &Representation) -> ViolationReport {
    let mut witnesses = Vec::new();
    for j in problem.preferences().judgments() {
        let (l, r) = (&problem.acts()[j.left], &problem.acts()[j.right]);
        let (lu, ru) = (expected_utility(l, rep), expected_utility(r, rep));
        let ok = match j.rel {
            PrefRel::Less => lu < ru,
            PrefRel::Indifferent => lu == ru,
        };
        if !ok {
            witnesses.push(Witness::JudgmentMismatch {
                left: act_ref(problem, l),
                right: act_ref(problem, r),
                declared: match j.rel {
                    PrefRel::Less => Ordering3::Less,
                    PrefRel::Indifferent => Ordering3::Equivalent,
                },
                left_value: lu,
                right_value: ru,
            });
        }
    }
    ViolationReport::from_witnesses(AxiomId::EuAgreement, witnesses, Verdict::Satisfied)
}

fn act_ref(problem: &DecisionProblem, act: &Act) -> ActRef {
    ActRef {
        name: act.name().to_string(),
        outcomes: problem.outcome_labels(act.outcomes()),
    }
}

/// Judgments (by index) that jointly admit no fit; removing any one of
/// them makes the remainder feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitInfeasible {
    pub judgments: Vec<usize>,
    /// Consequence-value orderings that took part (utility fits only).
    pub monotone: Vec<(usize, usize)>,
}

impl FitInfeasible {
    pub fn describe(&self, problem: &DecisionProblem) -> Vec<String> {
        let mut out: Vec<String> = self
            .judgments
            .iter()
            .map(|&k| {
                let j = problem.preferences().judgments()[k];
                let sym = match j.rel {
                    PrefRel::Less => "<",
                    PrefRel::Indifferent => "~",
                };
                format!("{} {sym} {}", problem.acts()[j.left].name(), problem.acts()[j.right].name())
            })
            .collect();
        let cs = problem.consequences();
        out.extend(
            self.monotone
                .iter()
                .map(|&(x, y)| format!("U({}) <= U({}) (more money is better)", cs.label(x), cs.label(y))),
        );
        out
    }
}

/// A linear constraint family over one block of unknowns, one row per
/// judgment, plus the shared slack.
struct SlackRows {
    rows: Vec<(Vec<(usize, Rational)>, bool)>,
}

fn judgment_rows_in_masses(problem: &DecisionProblem, utility: &[Rational], picks: &[usize]) -> SlackRows {
    let n = problem.states().len();
    let rows = picks
        .iter()
        .map(|&k| {
            let j = problem.preferences().judgments()[k];
            let (f, g) = (&problem.acts()[j.left], &problem.acts()[j.right]);
            let coeffs = (0..n)
                .map(|s| (s, &utility[g.outcome(s)] - &utility[f.outcome(s)]))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            (coeffs, j.rel == PrefRel::Less)
        })
        .collect();
    SlackRows { rows }
}

fn judgment_rows_in_utility(problem: &DecisionProblem, masses: &[Rational], picks: &[usize]) -> SlackRows {
    let k = problem.consequences().len();
    let rows = picks
        .iter()
        .map(|&idx| {
            let j = problem.preferences().judgments()[idx];
            let (f, g) = (&problem.acts()[j.left], &problem.acts()[j.right]);
            let mut acc = vec![Rational::zero(); k];
            for (s, p) in masses.iter().enumerate() {
                acc[g.outcome(s)] += p;
                acc[f.outcome(s)] -= p;
            }
            let coeffs = acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            (coeffs, j.rel == PrefRel::Less)
        })
        .collect();
    SlackRows { rows }
}

/// Strictly ordered monetary pairs `(lower, higher)` and tied pairs.
fn monotone_pairs(problem: &DecisionProblem) -> Vec<(usize, usize, bool)> {
    if !problem.monotone_money() {
        return Vec::new();
    }
    let cs = problem.consequences();
    let mut out = Vec::new();
    for x in 0..cs.len() {
        for y in 0..cs.len() {
            if let (Some(a), Some(b)) = (cs.value(x), cs.value(y)) {
                if a < b {
                    out.push((x, y, true));
                } else if a == b && x < y {
                    out.push((x, y, false));
                }
            }
        }
    }
    out
}

enum Block {
    Masses,
    Utility,
}

/// Maximises the shared slack. With `free_slack` the slack may go negative
/// (used by the alternating search to measure how far off a point is).
fn slack_lp(width: usize, block: Block, rows: &SlackRows, extra: &[(usize, usize, bool)], free_slack: bool) -> LinearProgram {
    let delta = width;
    let mut lp = LinearProgram::new(width + 1);
    lp.set_objective(delta, Rational::one());
    lp.bound_above(delta, Rational::one());
    if free_slack {
        lp.set_free(delta);
        lp.constrain(vec![(delta, Rational::one())], Relation::Ge, -Rational::one());
    }
    match block {
        Block::Masses => {
            lp.constrain((0..width).map(|s| (s, Rational::one())).collect(), Relation::Eq, Rational::one());
        }
        Block::Utility => {
            for c in 0..width {
                lp.bound_above(c, Rational::one());
            }
        }
    }
    for (coeffs, strict) in &rows.rows {
        if *strict {
            // Σ coeff·x - δ >= 0
            let mut row = coeffs.clone();
            row.push((delta, -Rational::one()));
            lp.constrain(row, Relation::Ge, Rational::zero());
        } else {
            lp.constrain(coeffs.clone(), Relation::Eq, Rational::zero());
        }
    }
    for &(lo, hi, strict) in extra {
        if strict {
            lp.constrain(
                vec![(hi, Rational::one()), (lo, -Rational::one()), (delta, -Rational::one())],
                Relation::Ge,
                Rational::zero(),
            );
        } else {
            lp.constrain(vec![(hi, Rational::one()), (lo, -Rational::one())], Relation::Eq, Rational::zero());
        }
    }
    lp
}

fn has_strict(rows: &SlackRows, extra: &[(usize, usize, bool)]) -> bool {
    rows.rows.iter().any(|(_, s)| *s) || extra.iter().any(|e| e.2)
}

/// `(solution, slack)` when feasible with positive slack (or no strict rows).
fn solve_slack(width: usize, block: Block, rows: &SlackRows, extra: &[(usize, usize, bool)]) -> Option<(Vec<Rational>, Rational)> {
    let strict = has_strict(rows, extra);
    let lp = slack_lp(width, block, rows, extra, false);
    let sol = lp.solve().optimal()?;
    if strict && !sol.objective.is_positive() {
        return None;
    }
    Some((sol.values[..width].to_vec(), sol.objective))
}

pub fn fit_probability(problem: &DecisionProblem, utility: &UtilityFunction) -> Result<ProbabilityMeasure, FitInfeasible> {
    let n = problem.states().len();
    if utility.values().len() != problem.consequences().len() {
        return Err(FitInfeasible {
            judgments: Vec::new(),
            monotone: Vec::new(),
        });
    }
    let all: Vec<usize> = (0..problem.preferences().judgments().len()).collect();
    if all.is_empty() {
        return Ok(ProbabilityMeasure::uniform(problem.states().clone()));
    }
    let solve = |picks: &[usize]| {
        solve_slack(n, Block::Masses, &judgment_rows_in_masses(problem, utility.values(), picks), &[])
    };
    match solve(&all) {
        Some((masses, _)) => Ok(ProbabilityMeasure::new(problem.states().clone(), masses).expect("simplex row")),
        None => Err(FitInfeasible {
            judgments: shrink(all, |picks| solve(picks).is_none()),
            monotone: Vec::new(),
        }),
    }
}

pub fn fit_utility(problem: &DecisionProblem, measure: &ProbabilityMeasure) -> Result<UtilityFunction, FitInfeasible> {
    let k = problem.consequences().len();
    let all: Vec<usize> = (0..problem.preferences().judgments().len()).collect();
    let mono = monotone_pairs(problem);
    let solve = |picks: &[usize], extra: &[(usize, usize, bool)]| {
        solve_slack(k, Block::Utility, &judgment_rows_in_utility(problem, measure.masses(), picks), extra)
    };
    match solve(&all, &mono) {
        Some((values, _)) => Ok(UtilityFunction::new(values).normalized()),
        None => {
            let judgments = shrink(all, |picks| solve(picks, &mono).is_none());
            let kept: Vec<usize> = (0..mono.len()).collect();
            let kept = shrink(kept, |m| {
                let extra: Vec<_> = m.iter().map(|&i| mono[i]).collect();
                solve(&judgments, &extra).is_none()
            });
            Err(FitInfeasible {
                judgments,
                monotone: kept.into_iter().map(|i| (mono[i].0, mono[i].1)).collect(),
            })
        }
    }
}

/// Deletion filter: drops items while `still_bad` holds for the rest.
fn shrink(mut items: Vec<usize>, still_bad: impl Fn(&[usize]) -> bool) -> Vec<usize> {
    let mut i = 0;
    while i < items.len() {
        let mut trial = items.clone();
        trial.remove(i);
        if still_bad(&trial) {
            items = trial;
        } else {
            i += 1;
        }
    }
    items
}

#[derive(Debug, Clone)]
pub struct JointConfig {
    /// Largest `|S|·|F|` accepted.
    pub cap: usize,
    pub starts: usize,
    pub rounds: usize,
    /// Grid fallback step is `1/grid_resolution`.
    pub grid_resolution: usize,
    /// Grid fallback stops after this many points.
    pub grid_limit: usize,
    pub seed: u64,
}

impl Default for JointConfig {
    fn default() -> Self {
        JointConfig {
            cap: 64,
            starts: 16,
            rounds: 12,
            grid_resolution: 10,
            grid_limit: 5000,
            seed: 0x5eed,
        }
    }
}

/// Searches for any agreeing representation. `Ok(None)` means none was
/// found; that is not a proof that none exists.
pub fn fit_joint(problem: &DecisionProblem, cfg: &JointConfig) -> Result<Option<Representation>, Error> {
    let n = problem.states().len();
    let k = problem.consequences().len();
    if n * k > cfg.cap {
        return Err(Error::CapExceeded { size: n * k, cap: cfg.cap });
    }
    let uniform = ProbabilityMeasure::uniform(problem.states().clone());
    if let Some(rep) = try_measure(problem, &uniform) {
        return Ok(Some(rep));
    }
    let found = (0..cfg.starts).into_par_iter().find_map_first(|start| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(start as u64));
        let masses: Vec<Rational> = {
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=24)).collect();
            let total: i64 = w.iter().sum();
            w.into_iter().map(|x| rational::ratio(x, total)).collect()
        };
        alternate(problem, masses, cfg.rounds)
    });
    if found.is_some() {
        return Ok(found);
    }
    let grid = simplex_grid(n, cfg.grid_resolution, cfg.grid_limit);
    Ok(grid.into_par_iter().find_map_first(|masses| {
        let p = ProbabilityMeasure::new(problem.states().clone(), masses).ok()?;
        try_measure(problem, &p)
    }))
}

fn try_measure(problem: &DecisionProblem, p: &ProbabilityMeasure) -> Option<Representation> {
    let utility = fit_utility(problem, p).ok()?;
    let rep = Representation {
        measure: p.clone(),
        utility,
    };
    (verify_agreement(problem, &rep).verdict == Verdict::Satisfied && monotone_ok(problem, &rep.utility)).then_some(rep)
}

fn monotone_ok(problem: &DecisionProblem, u: &UtilityFunction) -> bool {
    monotone_pairs(problem).iter().all(|&(lo, hi, strict)| {
        if strict {
            u.value(lo) < u.value(hi)
        } else {
            u.value(lo) == u.value(hi)
        }
    })
}

/// Alternates the two slack LPs; the common slack never decreases.
fn alternate(problem: &DecisionProblem, mut masses: Vec<Rational>, rounds: usize) -> Option<Representation> {
    let n = problem.states().len();
    let k = problem.consequences().len();
    let all: Vec<usize> = (0..problem.preferences().judgments().len()).collect();
    let mono = monotone_pairs(problem);
    for _ in 0..rounds {
        let rows = judgment_rows_in_utility(problem, &masses, &all);
        let sol = slack_lp(k, Block::Utility, &rows, &mono, true).solve().optimal()?;
        let utility: Vec<Rational> = sol.values[..k].to_vec();
        let p = ProbabilityMeasure::new(problem.states().clone(), masses.clone()).ok()?;
        if let Some(rep) = try_measure(problem, &p) {
            return Some(rep);
        }
        let rows = judgment_rows_in_masses(problem, &utility, &all);
        let sol = match slack_lp(n, Block::Masses, &rows, &[], true).solve() {
            LpOutcome::Optimal(s) => s,
            _ => return None,
        };
        masses = sol.values[..n].to_vec();
        let p = ProbabilityMeasure::new(problem.states().clone(), masses.clone()).ok()?;
        if let Some(rep) = try_measure(problem, &p) {
            return Some(rep);
        }
    }
    None
}

/// Points of the probability simplex with denominator `resolution`,
/// interior points first.
fn simplex_grid(n: usize, resolution: usize, limit: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out, limit);
        }
    }
    let mut raw = Vec::new();
    rec(0, resolution, &mut current, &mut raw, limit.saturating_mul(4));
    raw.sort_by_key(|v| v.iter().filter(|&&x| x == 0).count());
    raw.truncate(limit);
    for v in raw {
        out.push(v.into_iter().map(|x| rational::ratio(x as i64, resolution as i64)).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::load_problem;
    use crate::rational::{int, ratio};

    const ALLAIS: &str = r#"{
        "states": ["1", "2-11", "12-100"],
        "consequences": [{"label": "0", "value": 0}, {"label": "500", "value": 500}, {"label": "2500", "value": 2500}],
        "acts": [
            {"name": "I", "assignment": {"1": "500", "2-11": "500", "12-100": "500"}},
            {"name": "II", "assignment": {"1": "0", "2-11": "2500", "12-100": "500"}},
            {"name": "III", "assignment": {"1": "500", "2-11": "500", "12-100": "0"}},
            {"name": "IV", "assignment": {"1": "0", "2-11": "2500", "12-100": "0"}}
        ],
        "preferences": [{"left": "II", "right": "I", "rel": "<"}, {"left": "III", "right": "IV", "rel": "<"}]
    }"#;

    fn allais_probability(p: &DecisionProblem) -> ProbabilityMeasure {
        ProbabilityMeasure::new(p.states().clone(), vec![ratio(1, 100), ratio(10, 100), ratio(89, 100)]).unwrap()
    }

    #[test]
    fn allais_expected_values() {
        let p = load_problem(ALLAIS).unwrap();
        let rep = Representation {
            measure: allais_probability(&p),
            utility: UtilityFunction::monetary(&p).unwrap(),
        };
        // Thousands of dollars.
        assert_eq!(expected_utility(p.act("II").unwrap(), &rep), int(695));
        assert_eq!(expected_utility(p.act("I").unwrap(), &rep), int(500));
        let r = verify_agreement(&p, &rep);
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.witnesses.iter().all(|w| w.reproduces(&p)));
    }

    #[test]
    fn allais_has_no_measure_under_linear_utility() {
        let p = load_problem(ALLAIS).unwrap();
        let cert = fit_probability(&p, &UtilityFunction::monetary(&p).unwrap()).unwrap_err();
        assert_eq!(cert.judgments.len(), 2);
    }

    #[test]
    fn risk_averse_single_choice_has_a_utility() {
        let doc = ALLAIS.replace(r#", {"left": "III", "right": "IV", "rel": "<"}"#, "");
        let p = load_problem(&doc).unwrap();
        let u = fit_utility(&p, &allais_probability(&p)).unwrap();
        // 0.11 u(500) > 0.1 u(2500) + 0.01 u(0)
        let lhs = ratio(11, 100) * u.value(1);
        let rhs = ratio(1, 10) * u.value(2) + ratio(1, 100) * u.value(0);
        assert!(lhs > rhs);
        assert!(u.values().iter().all(|v| *v >= Rational::zero() && *v <= Rational::one()));
    }

    #[test]
    fn allais_joint_fit_is_not_found() {
        let p = load_problem(ALLAIS).unwrap();
        assert_eq!(fit_joint(&p, &JointConfig::default()).unwrap(), None);
    }

    #[test]
    fn cap_is_enforced() {
        let p = load_problem(ALLAIS).unwrap();
        let cfg = JointConfig {
            cap: 4,
            ..Default::default()
        };
        assert!(matches!(fit_joint(&p, &cfg), Err(Error::CapExceeded { size: 9, cap: 4 })));
    }

    #[test]
    fn constant_act_scores_its_utility() {
        let p = load_problem(ALLAIS).unwrap();
        let rep = Representation {
            measure: ProbabilityMeasure::uniform(p.states().clone()),
            utility: UtilityFunction::new(vec![int(0), int(3), int(7)]),
        };
        assert_eq!(expected_utility(p.act("I").unwrap(), &rep), int(3));
    }

    #[test]
    fn normalization_pins_the_gauge() {
        let u = UtilityFunction::new(vec![int(3), int(5), int(11)]).normalized();
        assert_eq!(u.values(), &[int(0), ratio(1, 4), int(1)]);
    }

    #[test]
    fn grid_starts_in_the_interior() {
        let g = simplex_grid(3, 4, 100);
        assert_eq!(g.len(), 15);
        assert!(g[0].iter().all(|x| !x.is_zero()));
    }

    #[test]
    fn representation_json_round_trip() {
        let p = load_problem(ALLAIS).unwrap();
        let rep = Representation {
            measure: allais_probability(&p),
            utility: UtilityFunction::new(vec![int(0), ratio(1, 2), int(1)]),
        };
        let text = serde_json::to_string(&rep.to_doc(&p)).unwrap();
        assert!(text.contains(r#""12-100":"89/100""#));
        let back: RepresentationDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_representation(&p).unwrap(), rep);
    }
}
