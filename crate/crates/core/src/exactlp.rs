//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex on a tableau of [`Rational`]s, with
//! Bland's rule for both entering and leaving variables so that degenerate
//! problems cannot cycle.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// `min cᵀx` subject to `rows[i]·x (sense[i]) rhs[i]` and per-variable bounds.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<Rational>,
    pub bounds: Vec<VarBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values; empty unless optimal.
    pub values: Vec<Rational>,
    pub objective: Rational,
}

impl LpProblem {
    /// An empty problem over `nvars` nonnegative variables with zero objective.
    pub fn new(nvars: usize) -> Self {
        LpProblem {
            objective: vec![Rational::zero(); nvars],
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![VarBound::NonNegative; nvars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, row: Vec<Rational>, sense: Sense, rhs: Rational) {
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.bounds.len(),
            });
        }
        if self.senses.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                found: self.senses.len().min(self.rhs.len()),
            });
        }
        for row in &self.rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Ok(())
    }

    /// Value of the objective at `x`.
    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Whether `x` satisfies every row and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = self
            .bounds
            .iter()
            .zip(x)
            .all(|(b, v)| *b == VarBound::Free || !v.is_negative());
        bounds_ok
            && self
                .rows
                .iter()
                .zip(&self.senses)
                .zip(&self.rhs)
                .all(|((row, sense), rhs)| {
                    let lhs = dot(row, x);
                    match sense {
                        Sense::Le => lhs <= *rhs,
                        Sense::Eq => lhs == *rhs,
                        Sense::Ge => lhs >= *rhs,
                    }
                })
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

struct Tableau {
    /// Constraint rows, each of length `ncols + 1` (last entry is the right-hand side).
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, cost: &mut [Rational]) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                row[j] -= delta;
            }
        }
        if !cost[c].is_zero() {
            let f = cost[c].clone();
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                cost[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for objective `c` (length `ncols + 1`, last entry is `-z`).
    fn reduced_costs(&self, c: &[Rational]) -> Vec<Rational> {
        let mut cost: Vec<Rational> = c.to_vec();
        cost.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let f = cost[b].clone();
            for (j, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= &f * v;
                }
            }
        }
        cost
    }

    /// Runs Bland's rule on columns `allowed`; returns false when unbounded.
    fn optimize(&mut self, cost: &mut [Rational], allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| cost[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[enter];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((leave, _)) = best else {
                return false;
            };
            self.pivot(leave, enter, cost);
        }
    }
}

/// Solves `p` exactly. Infeasible and unbounded problems are reported through
/// [`LpStatus`]; only malformed input returns an error.
pub fn solve(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    let n = p.num_vars();
    // Column map: structural variable j becomes x⁺ (and x⁻ when free).
    let mut col_of = Vec::with_capacity(n);
    let mut ncols = 0usize;
    for b in &p.bounds {
        match b {
            VarBound::NonNegative => {
                col_of.push((ncols, None));
                ncols += 1;
            }
            VarBound::Free => {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
    }
    let structural = ncols;
    let m = p.rows.len();
    let slack_count = p.senses.iter().filter(|s| **s != Sense::Eq).count();
    let first_artificial = structural + slack_count;

    // Each row is normalized to a nonnegative right-hand side before adding slacks.
    let mut rows = Vec::with_capacity(m);
    let mut slack_col = structural;
    let mut needs_artificial = Vec::with_capacity(m);
    let mut initial_basis = Vec::with_capacity(m);
    for ((row, sense), rhs) in p.rows.iter().zip(&p.senses).zip(&p.rhs) {
        let flip = rhs.is_negative();
        let sign = if flip { -Rational::one() } else { Rational::one() };
        let mut t = vec![Rational::zero(); structural + slack_count];
        for (j, a) in row.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (pos, neg) = col_of[j];
            t[pos] = a * &sign;
            if let Some(neg) = neg {
                t[neg] = -(a * &sign);
            }
        }
        let sense = match (sense, flip) {
            (Sense::Le, true) => Sense::Ge,
            (Sense::Ge, true) => Sense::Le,
            (s, _) => *s,
        };
        match sense {
            Sense::Le => {
                t[slack_col] = Rational::one();
                initial_basis.push(Some(slack_col));
                needs_artificial.push(false);
                slack_col += 1;
            }
            Sense::Ge => {
                t[slack_col] = -Rational::one();
                initial_basis.push(None);
                needs_artificial.push(true);
                slack_col += 1;
            }
            Sense::Eq => {
                initial_basis.push(None);
                needs_artificial.push(true);
            }
        }
        t.push(rhs * &sign);
        rows.push(t);
    }
    let artificial_count = needs_artificial.iter().filter(|b| **b).count();
    let total = first_artificial + artificial_count;
    let mut basis = Vec::with_capacity(m);
    let mut art = first_artificial;
    for (i, row) in rows.iter_mut().enumerate() {
        let rhs = row.pop().expect("rhs present");
        row.resize(total, Rational::zero());
        if needs_artificial[i] {
            row[art] = Rational::one();
            basis.push(art);
            art += 1;
        } else {
            basis.push(initial_basis[i].expect("slack basis"));
        }
        row.push(rhs);
    }
    let mut tab = Tableau {
        rows,
        basis,
        ncols: total,
    };

    if artificial_count > 0 {
        let mut phase1: Vec<Rational> = vec![Rational::zero(); total];
        for v in phase1.iter_mut().skip(first_artificial) {
            *v = Rational::one();
        }
        let mut cost = tab.reduced_costs(&phase1);
        tab.optimize(&mut cost, total);
        if !cost[total].is_zero() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: Rational::zero(),
            });
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] < first_artificial {
                r += 1;
                continue;
            }
            match (0..first_artificial).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(j) => {
                    let mut dummy = vec![Rational::zero(); total + 1];
                    tab.pivot(r, j, &mut dummy);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                }
            }
        }
        for row in tab.rows.iter_mut() {
            let rhs = row.pop().expect("rhs present");
            row.truncate(first_artificial);
            row.push(rhs);
        }
        tab.ncols = first_artificial;
    }

    let mut c = vec![Rational::zero(); tab.ncols];
    for (j, cj) in p.objective.iter().enumerate() {
        let (pos, neg) = col_of[j];
        c[pos] = cj.clone();
        if let Some(neg) = neg {
            c[neg] = -cj.clone();
        }
    }
    let mut cost = tab.reduced_costs(&c);
    if !tab.optimize(&mut cost, tab.ncols) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective: Rational::zero(),
        });
    }
    let mut col_values = vec![Rational::zero(); tab.ncols];
    for (r, &b) in tab.basis.iter().enumerate() {
        col_values[b] = tab.rows[r][tab.ncols].clone();
    }
    let values: Vec<Rational> = col_of
        .iter()
        .map(|(pos, neg)| match neg {
            Some(neg) => &col_values[*pos] - &col_values[*neg],
            None => col_values[*pos].clone(),
        })
        .collect();
    let objective = p.objective_at(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, rat};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn single_lower_bound() {
        let mut p = LpProblem::new(1);
        p.objective = ints(&[1]);
        p.add_row(ints(&[1]), Sense::Ge, int(3));
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values, ints(&[3]));
    }

    #[test]
    fn maximize_x_over_triangle() {
        let mut p = LpProblem::new(2);
        p.objective = ints(&[-1, 0]);
        p.bounds = vec![VarBound::Free; 2];
        p.add_row(ints(&[-1, 0]), Sense::Le, int(-1));
        p.add_row(ints(&[0, -1]), Sense::Le, int(-1));
        p.add_row(ints(&[1, 1]), Sense::Le, int(3));
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, int(-2));
        assert_eq!(s.values, ints(&[2, 1]));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut p = LpProblem::new(1);
        p.add_row(ints(&[1]), Sense::Le, int(-1));
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray_is_detected() {
        let mut p = LpProblem::new(2);
        p.objective = ints(&[-1, -1]);
        p.add_row(ints(&[1, -1]), Sense::Le, int(1));
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut p = LpProblem::new(2);
        p.objective = ints(&[1, 2]);
        p.add_row(ints(&[1, 1]), Sense::Eq, int(2));
        p.add_row(ints(&[2, 2]), Sense::Eq, int(4));
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, int(2));
    }

    #[test]
    fn malformed_problem_is_an_error() {
        let mut p = LpProblem::new(2);
        p.add_row(ints(&[1]), Sense::Le, int(1));
        assert!(solve(&p).is_err());
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let mut p = LpProblem::new(4);
        p.objective = vec![rat(-3, 4), int(150), rat(-1, 50), int(6)];
        p.add_row(vec![rat(1, 4), int(-60), rat(-1, 25), int(9)], Sense::Le, int(0));
        p.add_row(vec![rat(1, 2), int(-90), rat(-1, 50), int(3)], Sense::Le, int(0));
        p.add_row(ints(&[0, 0, 1, 0]), Sense::Le, int(1));
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, rat(-1, 20));
    }

    type Instance = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>);

    fn small_lp() -> impl Strategy<Value = Instance> {
        (1usize..4, 1usize..5).prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(prop::collection::vec(-3i64..4, n), m),
                prop::collection::vec(0i64..6, m),
                prop::collection::vec(-3i64..4, n),
            )
        })
    }

    fn build((rows, rhs, c): &Instance, perm: &[usize]) -> LpProblem {
        let n = c.len();
        let mut p = LpProblem::new(n);
        p.objective = ints(c);
        for &i in perm {
            p.add_row(ints(&rows[i]), Sense::Le, int(rhs[i]));
        }
        // keep everything bounded
        p.add_row(vec![int(1); n], Sense::Le, int(10));
        p
    }

    proptest! {
        #[test]
        fn optimum_beats_sampled_feasible_points(inst in small_lp(), samples in prop::collection::vec(prop::collection::vec(0i64..11, 3), 20)) {
            let p = build(&inst, &(0..inst.0.len()).collect::<Vec<_>>());
            let s = solve(&p).unwrap();
            // origin is always feasible (rhs ≥ 0), so the LP is feasible and bounded
            prop_assert_eq!(s.status, LpStatus::Optimal);
            prop_assert!(p.is_feasible(&s.values));
            for x in samples {
                let x: Vec<Rational> = x[..p.num_vars()].iter().map(|&v| rat(v, 2)).collect();
                if p.is_feasible(&x) {
                    prop_assert!(s.objective <= p.objective_at(&x));
                }
            }
        }

        #[test]
        fn row_permutation_keeps_optimal_value(inst in small_lp(), seed in any::<u64>()) {
            let m = inst.0.len();
            let mut perm: Vec<usize> = (0..m).collect();
            let mut state = seed;
            for i in (1..m).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (state >> 33) as usize % (i + 1));
            }
            let a = solve(&build(&inst, &(0..m).collect::<Vec<_>>())).unwrap();
            let b = solve(&build(&inst, &perm)).unwrap();
            prop_assert_eq!(a.objective, b.objective);
        }

        #[test]
        fn complementary_slackness_holds(inst in small_lp()) {
            // Solve the primal and the dual independently and compare values.
            let (rows, rhs, c) = &inst;
            let n = c.len();
            let m = rows.len();
            let primal = build(&inst, &(0..m).collect::<Vec<_>>());
            let ps = solve(&primal).unwrap();
            // dual of min cᵀx, Ax ≤ b, x ≥ 0 is max bᵀy, Aᵀy ≤ c, y ≤ 0
            let mut all_rows = rows.clone();
            all_rows.push(vec![1; n]);
            let mut all_rhs = rhs.clone();
            all_rhs.push(10);
            let mut dual = LpProblem::new(m + 1);
            dual.objective = all_rhs.iter().map(|&b| int(b)).collect();
            for j in 0..n {
                dual.add_row(all_rows.iter().map(|r| int(-r[j])).collect(), Sense::Le, int(c[j]));
            }
            // variables w = -y ≥ 0: min bᵀw s.t. -Aᵀw ≤ c
            let ds = solve(&dual).unwrap();
            prop_assert_eq!(ds.status, LpStatus::Optimal);
            prop_assert_eq!(&ps.objective, &-ds.objective.clone());
            // slack in a primal row forces its dual multiplier to zero
            for (i, row) in all_rows.iter().enumerate() {
                let lhs = dot(&ints(row), &ps.values);
                if lhs < int(all_rhs[i]) {
                    prop_assert!(ds.values[i].is_zero());
                }
            }
        }
    }
}
