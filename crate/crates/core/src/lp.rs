//! Dense two-phase simplex over exact rationals.
//!
//! Problems here are desk-sized (tens of variables, at most a few hundred
//! rows), so the solver keeps a full tableau and uses Bland's rule, which
//! cannot cycle. Every verdict is exact: there is no tolerance anywhere.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
}

/// `maximize c·x` subject to linear rows; variables are `>= 0` unless
/// marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    rows: Vec<Row>,
    free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<Solution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            rows: Vec::new(),
            free: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        self.objective[var] = coeff;
    }

    /// Adds `Σ coeff·x[var]  (relation)  rhs`. Repeated variables are summed.
    pub fn constrain(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(v, _)| *v < self.num_vars));
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Upper bound `x[var] <= bound`.
    pub fn bound_above(&mut self, var: usize, bound: Rational) {
        self.constrain(vec![(var, Rational::from_integer(1.into()))], Relation::Le, bound);
    }

    /// Whether `values` satisfies every row and sign restriction exactly.
    pub fn is_feasible_point(&self, values: &[Rational]) -> bool {
        if values.len() != self.num_vars {
            return false;
        }
        if values
            .iter()
            .zip(&self.free)
            .any(|(v, free)| !free && v.is_negative())
        {
            return false;
        }
        self.rows.iter().all(|row| {
            let lhs: Rational = row
                .coeffs
                .iter()
                .map(|(v, c)| c * &values[*v])
                .fold(Rational::zero(), |a, b| a + b);
            match row.relation {
                Relation::Le => lhs <= row.rhs,
                Relation::Ge => lhs >= row.rhs,
                Relation::Eq => lhs == row.rhs,
            }
        })
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(values)
            .map(|(c, v)| c * v)
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

/// Column layout: structural columns (free variables split into a positive
/// and a negative part), then one slack/surplus per inequality row, then
/// one artificial per `>=`/`=` row (after sign normalisation).
struct Tableau {
    /// `rows[i]` has `width + 1` entries; the last is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
    /// Structural column of each original variable, plus the negative-part
    /// column for free variables.
    pos_col: Vec<usize>,
    neg_col: Vec<Option<usize>>,
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut pos_col = Vec::with_capacity(lp.num_vars);
        let mut neg_col = Vec::with_capacity(lp.num_vars);
        let mut next = 0;
        for v in 0..lp.num_vars {
            pos_col.push(next);
            next += 1;
            if lp.free[v] {
                neg_col.push(Some(next));
                next += 1;
            } else {
                neg_col.push(None);
            }
        }
        let structural = next;

        // Normalise so every rhs is non-negative.
        let mut normalised = Vec::with_capacity(lp.rows.len());
        for row in &lp.rows {
            let mut dense = vec![Rational::zero(); structural];
            for (v, c) in &row.coeffs {
                dense[pos_col[*v]] += c;
                if let Some(n) = neg_col[*v] {
                    dense[n] -= c;
                }
            }
            let (dense, relation, rhs) = if row.rhs.is_negative() {
                let flipped = match row.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (dense.into_iter().map(|c| -c).collect(), flipped, -row.rhs.clone())
            } else {
                (dense, row.relation, row.rhs.clone())
            };
            normalised.push((dense, relation, rhs));
        }

        let slack_count = normalised
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let artificial_count = normalised
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let artificial_start = structural + slack_count;
        let width = artificial_start + artificial_count;

        let mut rows = Vec::with_capacity(normalised.len());
        let mut basis = Vec::with_capacity(normalised.len());
        let mut slack = structural;
        let mut artificial = artificial_start;
        for (dense, relation, rhs) in normalised {
            let mut row = dense;
            row.resize(width + 1, Rational::zero());
            row[width] = rhs;
            match relation {
                Relation::Le => {
                    row[slack] = Rational::from_integer(1.into());
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = Rational::from_integer((-1).into());
                    slack += 1;
                    row[artificial] = Rational::from_integer(1.into());
                    basis.push(artificial);
                    artificial += 1;
                }
                Relation::Eq => {
                    row[artificial] = Rational::from_integer(1.into());
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            rows.push(row);
        }

        Tableau {
            rows,
            basis,
            width,
            pos_col,
            neg_col,
            artificial_start,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximises `cost·x` over the columns `< limit`. Returns false when
    /// unbounded.
    fn optimise(&mut self, cost: &[Rational], limit: usize) -> bool {
        loop {
            // Reduced cost of column j: cost_j - Σ_i cost_{basis_i} a_ij.
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        reduced -= cb * &row[j];
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.width] / &row[c];
                    let better = match &leaving {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            match leaving {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let width = self.width;
        if self.artificial_start < width {
            let mut phase_one = vec![Rational::zero(); width];
            for c in phase_one.iter_mut().skip(self.artificial_start) {
                *c = Rational::from_integer((-1).into());
            }
            self.optimise(&phase_one, width);
            let infeasibility: Rational = self
                .rows
                .iter()
                .zip(&self.basis)
                .filter(|(_, b)| **b >= self.artificial_start)
                .map(|(row, _)| row[width].clone())
                .fold(Rational::zero(), |a, b| a + b);
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-valued artificials out of the basis.
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.artificial_start {
                    match (0..self.artificial_start).find(|&j| !self.rows[r][j].is_zero()) {
                        Some(c) => {
                            self.pivot(r, c);
                            r += 1;
                        }
                        None => {
                            // Redundant row.
                            self.rows.remove(r);
                            self.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
        }

        let mut cost = vec![Rational::zero(); width];
        for v in 0..lp.num_vars {
            cost[self.pos_col[v]] = lp.objective[v].clone();
            if let Some(n) = self.neg_col[v] {
                cost[n] = -lp.objective[v].clone();
            }
        }
        if !self.optimise(&cost, self.artificial_start) {
            return LpOutcome::Unbounded;
        }

        let mut column_values = vec![Rational::zero(); width];
        for (row, b) in self.rows.iter().zip(&self.basis) {
            column_values[*b] = row[width].clone();
        }
        let values: Vec<Rational> = (0..lp.num_vars)
            .map(|v| {
                let mut x = column_values[self.pos_col[v]].clone();
                if let Some(n) = self.neg_col[v] {
                    x -= &column_values[n];
                }
                x
            })
            .collect();
        let objective = lp.objective_value(&values);
        LpOutcome::Optimal(Solution { values, objective })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, int(3));
        lp.set_objective(1, int(5));
        lp.constrain(vec![(0, int(1))], Relation::Le, int(4));
        lp.constrain(vec![(1, int(2))], Relation::Le, int(12));
        lp.constrain(vec![(0, int(3)), (1, int(2))], Relation::Le, int(18));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.values, vec![int(2), int(6)]);
        assert_eq!(s.objective, int(36));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![(0, int(1))], Relation::Ge, int(2));
        lp.constrain(vec![(0, int(1))], Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, int(1));
        lp.constrain(vec![(0, int(1))], Relation::Ge, int(2));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // max -x with x free, x = -3/2 + y, y in [0, 1] -> x = -3/2
        let mut lp = LinearProgram::new(2);
        lp.set_free(0);
        lp.set_objective(0, int(-1));
        lp.constrain(vec![(0, int(1)), (1, int(-1))], Relation::Eq, ratio(-3, 2));
        lp.bound_above(1, int(1));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.values[0], ratio(-3, 2));
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, int(1));
        lp.constrain(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        lp.constrain(vec![(0, int(2)), (1, int(2))], Relation::Eq, int(2));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.values, vec![int(1), int(0)]);
    }

    /// Vertex-enumeration oracle for two bounded variables: the optimum of a
    /// bounded feasible LP is attained at an intersection of two tight rows
    /// (sign restrictions included as rows).
    fn brute_force_2d(rows: &[(Rational, Rational, Relation, Rational)], c: (Rational, Rational)) -> Option<Rational> {
        let mut lines: Vec<(Rational, Rational, Rational)> =
            rows.iter().map(|(a, b, _, r)| (a.clone(), b.clone(), r.clone())).collect();
        lines.push((int(1), int(0), int(0)));
        lines.push((int(0), int(1), int(0)));
        let feasible = |x: &Rational, y: &Rational| {
            !x.is_negative()
                && !y.is_negative()
                && rows.iter().all(|(a, b, rel, r)| {
                    let lhs = a * x + b * y;
                    match rel {
                        Relation::Le => lhs <= *r,
                        Relation::Ge => lhs >= *r,
                        Relation::Eq => lhs == *r,
                    }
                })
        };
        let mut best: Option<Rational> = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a1, b1, r1) = &lines[i];
                let (a2, b2, r2) = &lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.is_zero() {
                    continue;
                }
                let x = (r1 * b2 - r2 * b1) / &det;
                let y = (a1 * r2 - a2 * r1) / &det;
                if feasible(&x, &y) {
                    let v = &c.0 * &x + &c.1 * &y;
                    if best.as_ref().is_none_or(|b| v > *b) {
                        best = Some(v);
                    }
                }
            }
        }
        best
    }

    fn relation() -> impl Strategy<Value = Relation> {
        prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            rows in proptest::collection::vec((-5i64..6, -5i64..6, relation(), -6i64..10), 0..5),
            c in (-4i64..5, -4i64..5),
        ) {
            let mut rows: Vec<_> = rows
                .into_iter()
                .map(|(a, b, rel, r)| (int(a), int(b), rel, int(r)))
                .collect();
            // Box keeps everything bounded.
            rows.push((int(1), int(0), Relation::Le, int(7)));
            rows.push((int(0), int(1), Relation::Le, int(7)));
            let mut lp = LinearProgram::new(2);
            lp.set_objective(0, int(c.0));
            lp.set_objective(1, int(c.1));
            for (a, b, rel, r) in &rows {
                lp.constrain(vec![(0, a.clone()), (1, b.clone())], *rel, r.clone());
            }
            let oracle = brute_force_2d(&rows, (int(c.0), int(c.1)));
            match lp.solve() {
                LpOutcome::Optimal(s) => {
                    prop_assert!(lp.is_feasible_point(&s.values));
                    prop_assert_eq!(Some(s.objective), oracle);
                }
                LpOutcome::Infeasible => prop_assert_eq!(oracle, None),
                LpOutcome::Unbounded => prop_assert!(false, "box-bounded LP reported unbounded"),
            }
        }
    }
}
