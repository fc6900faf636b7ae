//! Dense two-phase simplex over exact rationals (Bland's rule).
//!
//! Only meant for the small programs of the nucleolus computation: a few
//! dozen variables and a few hundred rows at most.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("row has {found} coefficients, program has {expected} variables")]
    Dimension { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

/// `minimize c·x` subject to linear rows. Variables are non-negative unless
/// marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    free: Vec<bool>,
    objective: Vec<Rational>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    /// Dual value of each inequality row (`None` for equalities). A `Ge` row
    /// with a positive dual is tight at every optimal solution.
    pub duals: Vec<Option<Rational>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            free: vec![false; num_vars],
            objective: vec![Rational::zero(); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn minimize(&mut self, objective: Vec<Rational>) -> Result<(), LpError> {
        self.check(objective.len())?;
        self.objective = objective;
        Ok(())
    }

    pub fn add_row(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<(), LpError> {
        self.check(coeffs.len())?;
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    fn check(&self, found: usize) -> Result<(), LpError> {
        if found == self.num_vars {
            Ok(())
        } else {
            Err(LpError::Dimension {
                expected: self.num_vars,
                found,
            })
        }
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        // Column layout: split variables, then slack/surplus, then artificials.
        let mut columns: Vec<(usize, bool)> = Vec::new(); // (original var, negated)
        for v in 0..self.num_vars {
            columns.push((v, false));
            if self.free[v] {
                columns.push((v, true));
            }
        }
        let structural = columns.len();
        let m = self.rows.len();

        let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = self
            .rows
            .iter()
            .map(|row| {
                let coeffs: Vec<Rational> = columns
                    .iter()
                    .map(|&(v, neg)| {
                        if neg {
                            -&row.coeffs[v]
                        } else {
                            row.coeffs[v].clone()
                        }
                    })
                    .collect();
                if row.rhs.is_negative() {
                    let flipped = match row.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (coeffs.into_iter().map(|c| -c).collect(), flipped, -&row.rhs)
                } else {
                    (coeffs, row.relation, row.rhs.clone())
                }
            })
            .collect();

        let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let art_start = structural + slack_count;
        let width = art_start + art_count;

        let mut tableau = vec![vec![Rational::zero(); width + 1]; m + 1];
        let mut basis = vec![0usize; m];
        let mut slack_of: Vec<Option<usize>> = vec![None; m];
        let (mut slack, mut art) = (structural, art_start);
        for (r, (coeffs, relation, rhs)) in rows.iter_mut().enumerate() {
            for (c, value) in coeffs.iter_mut().enumerate() {
                tableau[r][c] = std::mem::take(value);
            }
            tableau[r][width] = rhs.clone();
            match relation {
                Relation::Le => {
                    tableau[r][slack] = Rational::one();
                    basis[r] = slack;
                    slack_of[r] = Some(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    tableau[r][slack] = -Rational::one();
                    slack_of[r] = Some(slack);
                    slack += 1;
                    tableau[r][art] = Rational::one();
                    basis[r] = art;
                    art += 1;
                }
                Relation::Eq => {
                    tableau[r][art] = Rational::one();
                    basis[r] = art;
                    art += 1;
                }
            }
        }

        let mut tab = Tableau {
            rows: tableau,
            basis,
            width,
        };

        if art_count > 0 {
            let mut cost = vec![Rational::zero(); width];
            for c in cost.iter_mut().skip(art_start) {
                *c = Rational::one();
            }
            tab.set_objective(&cost);
            tab.run(width)?;
            if !tab.value().is_zero() {
                return Err(LpError::Infeasible);
            }
            tab.expel_artificials(art_start);
        }

        let mut cost = vec![Rational::zero(); width];
        for (c, &(v, neg)) in columns.iter().enumerate() {
            cost[c] = if neg {
                -&self.objective[v]
            } else {
                self.objective[v].clone()
            };
        }
        tab.set_objective(&cost);
        tab.run(art_start)?;

        let mut column_values = vec![Rational::zero(); width];
        for (r, &b) in tab.basis.iter().enumerate() {
            column_values[b] = tab.rows[r][width].clone();
        }
        let mut x = vec![Rational::zero(); self.num_vars];
        for (c, &(v, neg)) in columns.iter().enumerate() {
            if neg {
                x[v] -= &column_values[c];
            } else {
                x[v] += &column_values[c];
            }
        }
        let reduced = &tab.rows[tab.constraint_count()];
        let duals = self
            .rows
            .iter()
            .zip(&slack_of)
            .map(|(row, col)| {
                col.map(|c| match row.relation {
                    Relation::Ge => reduced[c].clone(),
                    _ => -&reduced[c],
                })
            })
            .collect();
        Ok(LpSolution {
            value: tab.value(),
            x,
            duals,
        })
    }
}

struct Tableau {
    /// Constraint rows followed by the reduced-cost row; last column is the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn constraint_count(&self) -> usize {
        self.rows.len() - 1
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let m = self.constraint_count();
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.push(Rational::zero());
        for r in 0..m {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.rows[r]) {
                *o -= cb * t;
            }
        }
        self.rows[m] = obj;
    }

    fn value(&self) -> Rational {
        -&self.rows[self.constraint_count()][self.width]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[row].clone();
        for (r, target) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = target[col].clone();
            if factor.is_zero() {
                continue;
            }
            for (t, p) in target.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Simplex iterations over columns `< limit` with Bland's rule.
    fn run(&mut self, limit: usize) -> Result<(), LpError> {
        let m = self.constraint_count();
        loop {
            let Some(col) = (0..limit).find(|&c| self.rows[m][c].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..m {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[r][self.width] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((row, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
    }

    /// After phase one: pivot basic artificials out, dropping redundant rows.
    fn expel_artificials(&mut self, art_start: usize) {
        let mut r = 0;
        while r < self.constraint_count() {
            if self.basis[r] >= art_start {
                match (0..art_start).find(|&c| !self.rows[r][c].is_zero()) {
                    Some(c) => self.pivot(r, c),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ints(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y st x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.minimize(ints(&[-3, -5])).unwrap();
        lp.add_row(ints(&[1, 0]), Relation::Le, int(4)).unwrap();
        lp.add_row(ints(&[0, 2]), Relation::Le, int(12)).unwrap();
        lp.add_row(ints(&[3, 2]), Relation::Le, int(18)).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, int(-36));
        assert_eq!(sol.x, ints(&[2, 6]));
    }

    #[test]
    fn equalities_free_variables_and_fractions() {
        // min e st x + y = 1, x - e ≤ 1/3, y - e ≤ 0, x, y, e free
        let mut lp = LinearProgram::new(3);
        for v in 0..3 {
            lp.set_free(v);
        }
        lp.minimize(ints(&[0, 0, 1])).unwrap();
        lp.add_row(ints(&[1, 1, 0]), Relation::Eq, int(1)).unwrap();
        lp.add_row(ints(&[1, 0, -1]), Relation::Le, rat(1, 3))
            .unwrap();
        lp.add_row(ints(&[0, 1, -1]), Relation::Le, int(0)).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, rat(1, 3));
        assert_eq!(sol.x, vec![rat(2, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(sol.duals, vec![None, Some(rat(-1, 2)), Some(rat(-1, 2))]);
    }

    #[test]
    fn negative_rhs_and_ge_rows() {
        let mut lp = LinearProgram::new(2);
        lp.minimize(ints(&[1, 1])).unwrap();
        lp.add_row(ints(&[-1, -1]), Relation::Le, int(-3)).unwrap();
        lp.add_row(ints(&[1, 0]), Relation::Ge, int(1)).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, int(3));
        assert_eq!(sol.duals, vec![Some(int(-1)), Some(int(0))]);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.minimize(ints(&[1, 2])).unwrap();
        lp.add_row(ints(&[1, 1]), Relation::Eq, int(2)).unwrap();
        lp.add_row(ints(&[2, 2]), Relation::Eq, int(4)).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, int(2));
        assert_eq!(sol.x, ints(&[2, 0]));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_row(ints(&[1]), Relation::Ge, int(2)).unwrap();
        lp.add_row(ints(&[1]), Relation::Le, int(1)).unwrap();
        assert_eq!(lp.solve(), Err(LpError::Infeasible));

        let mut lp = LinearProgram::new(1);
        lp.set_free(0);
        lp.minimize(ints(&[1])).unwrap();
        lp.add_row(ints(&[1]), Relation::Le, int(1)).unwrap();
        assert_eq!(lp.solve(), Err(LpError::Unbounded));

        let mut lp = LinearProgram::new(2);
        assert_eq!(
            lp.add_row(ints(&[1]), Relation::Le, int(1)),
            Err(LpError::Dimension {
                expected: 2,
                found: 1
            })
        );
    }
}
