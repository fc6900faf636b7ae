//! The core in worker space, competitive salaries and the constant-decrease
//! machinery.
//!
//! Every constraint is stored in the unified form `y_to − y_from ≥ bound`
//! over nodes `0..=n`, where node `0` is a fictitious worker with salary 0
//! and node `j + 1` is worker `j`. The tight digraph is then simply the set
//! of tight rows read as arcs `from → to`.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{essential_candidates_of, Coalition, GameTable};
use crate::market::{balance, check_index, clamp_nonnegative, BalancedMarket, Market, RawMarket};
use crate::matching::{
    all_optimal_matchings, ensure_optimal, optimal_matching, optimal_value, Instance, Matching,
};
use crate::rational::{format_rational, Rational};

pub type SalaryVector = Vec<Rational>;

/// Firm payoffs `x` and worker salaries `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    pub firms: Vec<Rational>,
    pub workers: Vec<Rational>,
}

impl Allocation {
    pub fn new(firms: Vec<Rational>, workers: Vec<Rational>) -> Self {
        Allocation { firms, workers }
    }

    /// Splits a player-indexed payoff (firms first).
    pub fn from_payoff(payoff: &[Rational], firm_count: usize) -> Self {
        Allocation {
            firms: payoff[..firm_count].to_vec(),
            workers: payoff[firm_count..].to_vec(),
        }
    }

    /// Player-indexed payoff, firms first.
    pub fn payoff(&self) -> Vec<Rational> {
        self.firms.iter().chain(&self.workers).cloned().collect()
    }

    pub fn total(&self) -> Rational {
        self.firms
            .iter()
            .chain(&self.workers)
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Midpoint of two allocations.
    pub fn midpoint(&self, other: &Allocation) -> Allocation {
        let half = |a: &Rational, b: &Rational| (a + b) / Rational::from_integer(2.into());
        Allocation {
            firms: self
                .firms
                .iter()
                .zip(&other.firms)
                .map(|(a, b)| half(a, b))
                .collect(),
            workers: self
                .workers
                .iter()
                .zip(&other.workers)
                .map(|(a, b)| half(a, b))
                .collect(),
        }
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(", ");
        write!(f, "({}; {})", join(&self.firms), join(&self.workers))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    /// `y_j ≥ 0`
    Lower,
    /// `y_j ≤ a_{j^μ j}`
    Upper,
    /// `y_k − y_j ≥ a_{j^μ k} − a_{j^μ j}` for workers at different firms
    Difference,
    /// The same inequality for two workers at the same firm (buyer-seller CE only)
    SameFirm,
}

/// `y_to − y_from ≥ bound`, with node 0 the fictitious worker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub from: usize,
    pub to: usize,
    pub bound: Rational,
    pub kind: ConstraintKind,
}

impl Constraint {
    /// `y_to − y_from − bound` for a salary vector indexed by worker.
    pub fn slack(&self, y: &[Rational]) -> Rational {
        node_value(y, self.to) - node_value(y, self.from) - &self.bound
    }

    pub fn holds(&self, y: &[Rational]) -> bool {
        !self.slack(y).is_negative()
    }

    pub fn is_tight(&self, y: &[Rational]) -> bool {
        self.slack(y).is_zero()
    }
}

fn node_value(y: &[Rational], node: usize) -> Rational {
    if node == 0 {
        Rational::zero()
    } else {
        y[node - 1].clone()
    }
}

/// Worker-space description of the core for a balanced market and a
/// (completed) optimal matching.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreConstraintSystem {
    balanced: BalancedMarket,
    matching: Matching,
    house: Vec<usize>,
    upper: Vec<Rational>,
    constraints: Vec<Constraint>,
    all_pairs: bool,
}

impl CoreConstraintSystem {
    /// Balances `m` and uses its tie-broken optimal matching.
    pub fn for_market(m: &Market) -> Self {
        let balanced = balance(m);
        let mu = optimal_matching(balanced.market()).matching;
        CoreConstraintSystem::build(balanced, mu, false).expect("the solver's matching is optimal")
    }

    pub(crate) fn build(balanced: BalancedMarket, mu: Matching, all_pairs: bool) -> Result<Self> {
        let market = balanced.market();
        if !market.is_balanced() {
            return Err(Error::NotBalanced {
                capacity: market.total_capacity(),
                workers: market.worker_count(),
            });
        }
        ensure_optimal(market, &mu)?;
        let matching = complete(market, &mu);
        let n = market.worker_count();
        let house: Vec<usize> = (0..n)
            .map(|j| matching.firm_of(j).expect("completed matching is perfect"))
            .collect();
        let upper: Vec<Rational> = (0..n)
            .map(|j| market.surplus(house[j], j).clone())
            .collect();

        let mut constraints = Vec::new();
        for (j, u) in upper.iter().enumerate() {
            constraints.push(Constraint {
                from: 0,
                to: j + 1,
                bound: Rational::zero(),
                kind: ConstraintKind::Lower,
            });
            constraints.push(Constraint {
                from: j + 1,
                to: 0,
                bound: -u,
                kind: ConstraintKind::Upper,
            });
        }
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let same = house[j] == house[k];
                if same && !all_pairs {
                    continue;
                }
                let firm = house[j];
                constraints.push(Constraint {
                    from: j + 1,
                    to: k + 1,
                    bound: market.surplus(firm, k) - market.surplus(firm, j),
                    kind: if same {
                        ConstraintKind::SameFirm
                    } else {
                        ConstraintKind::Difference
                    },
                });
            }
        }
        Ok(CoreConstraintSystem {
            balanced,
            matching,
            house,
            upper,
            constraints,
            all_pairs,
        })
    }

    pub fn balanced(&self) -> &BalancedMarket {
        &self.balanced
    }

    pub fn market(&self) -> &Market {
        self.balanced.market()
    }

    /// The perfect optimal matching the system is built on.
    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    /// `j^μ` for every (balanced) worker.
    pub fn house(&self, worker: usize) -> usize {
        self.house[worker]
    }

    /// `a_{j^μ j}`.
    pub fn upper(&self, worker: usize) -> &Rational {
        &self.upper[worker]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn has_all_pairs(&self) -> bool {
        self.all_pairs
    }

    /// Number of workers in the balanced market.
    pub fn worker_count(&self) -> usize {
        self.upper.len()
    }

    pub fn original_worker_count(&self) -> usize {
        self.balanced.original().worker_count()
    }

    /// Accepts salaries for the original or the balanced worker set and
    /// returns them on the balanced set (dummy workers at 0).
    pub fn lift(&self, y: &[Rational]) -> Result<SalaryVector> {
        if y.len() == self.worker_count() {
            Ok(y.to_vec())
        } else {
            self.balanced.lift_salaries(y)
        }
    }

    /// Salaries restricted to the original workers.
    pub fn project(&self, y: &[Rational]) -> SalaryVector {
        y[..self.original_worker_count()].to_vec()
    }

    /// Membership in C(W) (or in the CE set when built with all pairs).
    pub fn contains(&self, y: &[Rational]) -> Result<bool> {
        let y = self.lift(y)?;
        Ok(self.constraints.iter().all(|c| c.holds(&y)))
    }

    /// First violated constraint, if any.
    pub fn violation(&self, y: &[Rational]) -> Result<Option<&Constraint>> {
        let y = self.lift(y)?;
        Ok(self.constraints.iter().find(|c| !c.holds(&y)))
    }

    /// `x_i = Σ_{j∈μ(i)} (a_ij − y_j)` with dummies stripped.
    pub fn allocation(&self, y: &[Rational]) -> Result<Allocation> {
        let y = self.lift(y)?;
        let market = self.market();
        let original = self.balanced.original();
        let firms = (0..original.firm_count())
            .map(|i| {
                self.matching
                    .workers_of(i)
                    .into_iter()
                    .fold(Rational::zero(), |acc, j| {
                        acc + market.surplus(i, j) - &y[j]
                    })
            })
            .collect();
        Ok(Allocation::new(firms, self.project(&y)))
    }
}

/// Adds zero-valued pairs until the matching is perfect on a balanced market.
fn complete(m: &Market, mu: &Matching) -> Matching {
    let mut pairs = mu.pairs().to_vec();
    let mut load: Vec<usize> = (0..m.firm_count())
        .map(|i| mu.workers_of(i).len())
        .collect();
    for j in 0..m.worker_count() {
        if mu.firm_of(j).is_some() {
            continue;
        }
        if let Some(i) = (0..m.firm_count()).find(|&i| load[i] < m.capacity(i)) {
            load[i] += 1;
            pairs.push((i, j));
        }
    }
    Matching::from_sorted(pairs)
}

/// Constraints (i)/(ii) of the worker-space core description.
pub fn core_constraints(bm: &BalancedMarket, mu: &Matching) -> Result<CoreConstraintSystem> {
    CoreConstraintSystem::build(bm.clone(), mu.clone(), false)
}

pub fn is_in_cw(sys: &CoreConstraintSystem, y: &[Rational]) -> Result<bool> {
    sys.contains(y)
}

pub fn firm_payoffs(sys: &CoreConstraintSystem, y: &[Rational]) -> Result<Allocation> {
    sys.allocation(y)
}

/// Why an allocation is outside the core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreViolation {
    Inefficient {
        total: Rational,
        value: Rational,
    },
    Blocked {
        coalition: Coalition,
        excess: Rational,
    },
}

fn check_allocation(g: &GameTable, alloc: &Allocation) -> Result<Vec<Rational>> {
    if alloc.firms.len() != g.firm_count() {
        return Err(Error::Dimension {
            expected: g.firm_count(),
            found: alloc.firms.len(),
        });
    }
    if alloc.workers.len() != g.worker_count() {
        return Err(Error::Dimension {
            expected: g.worker_count(),
            found: alloc.workers.len(),
        });
    }
    Ok(alloc.payoff())
}

fn violation_over(
    g: &GameTable,
    alloc: &Allocation,
    coalitions: impl Iterator<Item = Coalition>,
) -> Result<Option<CoreViolation>> {
    let z = check_allocation(g, alloc)?;
    let total = g.sum(&z, g.grand());
    if &total != g.value(g.grand()) {
        return Ok(Some(CoreViolation::Inefficient {
            total,
            value: g.value(g.grand()).clone(),
        }));
    }
    let mut worst: Option<(Coalition, Rational)> = None;
    for s in coalitions {
        let e = g.excess(&z, s);
        if !e.is_positive() {
            continue;
        }
        let better = match &worst {
            None => true,
            Some((ws, we)) => e > *we || (e == *we && (s.count_ones(), s) < (ws.count_ones(), *ws)),
        };
        if better {
            worst = Some((s, e));
        }
    }
    Ok(worst.map(|(coalition, excess)| CoreViolation::Blocked { coalition, excess }))
}

/// Core violation witness checked over essential candidates: the coalition
/// with the largest excess, ties broken by size and then bitmask.
pub fn core_violation(g: &GameTable, alloc: &Allocation) -> Result<Option<CoreViolation>> {
    violation_over(g, alloc, essential_candidates_of(g).into_iter())
}

/// Same as [`core_violation`] but over every coalition.
pub fn core_violation_full(g: &GameTable, alloc: &Allocation) -> Result<Option<CoreViolation>> {
    violation_over(g, alloc, 1..=g.grand())
}

pub fn is_core_allocation(g: &GameTable, alloc: &Allocation) -> Result<bool> {
    Ok(core_violation(g, alloc)?.is_none())
}

pub fn is_core_allocation_full(g: &GameTable, alloc: &Allocation) -> Result<bool> {
    Ok(core_violation_full(g, alloc)?.is_none())
}

/// Best value firm `i` can get from any bundle of at most `r_i` workers.
fn demand_value(m: &Market, i: usize, y: &[Rational]) -> Rational {
    let mut gains: Vec<Rational> = (0..m.worker_count())
        .map(|j| m.surplus(i, j) - &y[j])
        .filter(|g| g.is_positive())
        .collect();
    gains.sort_unstable_by(|a, b| b.cmp(a));
    gains
        .into_iter()
        .take(m.capacity(i))
        .fold(Rational::zero(), |acc, g| acc + g)
}

/// `(μ, y)` is a competitive equilibrium: every `μ(i)` is a most profitable
/// bundle at salaries `y`, and unmatched workers earn nothing.
pub fn is_competitive_equilibrium(m: &Market, mu: &Matching, y: &[Rational]) -> Result<bool> {
    Matching::new(m, mu.pairs().to_vec())?;
    if y.len() != m.worker_count() {
        return Err(Error::Dimension {
            expected: m.worker_count(),
            found: y.len(),
        });
    }
    if y.iter().any(Signed::is_negative) {
        return Ok(false);
    }
    for (j, yj) in y.iter().enumerate() {
        if mu.firm_of(j).is_none() && !yj.is_zero() {
            return Ok(false);
        }
    }
    for i in 0..m.firm_count() {
        let held = mu
            .workers_of(i)
            .into_iter()
            .fold(Rational::zero(), |acc, j| acc + m.surplus(i, j) - &y[j]);
        if held != demand_value(m, i, y) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ȳ_j = v(F ∪ W) − v(F ∪ (W \ {j}))`.
pub fn max_competitive_salaries(m: &Market) -> SalaryVector {
    let total = optimal_value(m);
    let firms: Vec<usize> = (0..m.firm_count()).collect();
    (0..m.worker_count())
        .map(|j| {
            let rest: Vec<usize> = (0..m.worker_count()).filter(|&k| k != j).collect();
            &total - optimal_value(&m.restrict(&firms, &rest).expect("indices in range"))
        })
        .collect()
}

/// `y̲_j = v_{+j} − v`, where the market is extended with a copy `j'` of
/// worker `j` that may not join the same firm as `j`.
pub fn min_competitive_salaries(m: &Market) -> SalaryVector {
    let base = Instance::of(m);
    let total = base.value();
    (0..m.worker_count())
        .map(|j| {
            // Either j stays idle (value v), or j goes to some firm i and the
            // copy competes for the remaining seats everywhere except at i.
            let mut best = total.clone();
            for i in 0..m.firm_count() {
                let mut inst = base.clone();
                inst.caps[i] -= 1;
                inst.forbidden[i][j] = true;
                let value = m.surplus(i, j) + inst.value();
                if value > best {
                    best = value;
                }
            }
            best - &total
        })
        .collect()
}

/// Outcome of a constant decrease of one firm's valuations.
#[derive(Debug, Clone, PartialEq)]
pub struct DecreaseReport {
    /// The decreased surplus matrix `A^c`.
    pub market: Market,
    /// `c ≤ a_{i0 j}` for every pair of every optimal matching.
    pub condition_iii: bool,
    /// Every optimal matching of `A` stays optimal under `A^c`.
    pub condition_iv: bool,
}

impl DecreaseReport {
    pub fn is_valid(&self) -> bool {
        self.condition_iii && self.condition_iv
    }
}

/// Lowers every hire value of firm `i0` by `c`. The decreased hire values may
/// go negative; the surplus clamp absorbs that.
pub fn constant_decrease(
    raw: &RawMarket,
    i0: usize,
    c: &Rational,
) -> Result<(RawMarket, DecreaseReport)> {
    check_index("firm", i0, raw.firms().len())?;
    if c.is_negative() {
        return Err(Error::NegativeDecrease);
    }
    let row = (0..raw.workers().len())
        .map(|j| raw.hire(i0, j) - c)
        .collect();
    let decreased = raw.with_hire_row(i0, row);
    let original = crate::market::surplus_matrix(raw);
    let report = decrease_report(&original, i0, c, crate::market::surplus_matrix(&decreased))?;
    Ok((decreased, report))
}

/// Surplus-level version: `a^c_{i0 j} = max{a_{i0 j} − c, 0}`, which agrees
/// with decreasing the hire values by `c`.
pub fn decrease_surplus(m: &Market, i0: usize, c: &Rational) -> Result<DecreaseReport> {
    check_index("firm", i0, m.firm_count())?;
    if c.is_negative() {
        return Err(Error::NegativeDecrease);
    }
    let mut matrix = m.matrix().to_vec();
    for a in matrix[i0].iter_mut() {
        *a = clamp_nonnegative(&*a - c);
    }
    decrease_report(m, i0, c, m.with_matrix(matrix)?)
}

fn decrease_report(
    original: &Market,
    i0: usize,
    c: &Rational,
    decreased: Market,
) -> Result<DecreaseReport> {
    let optimal = all_optimal_matchings(original)?;
    let condition_iii = optimal.iter().all(|mu| {
        mu.workers_of(i0)
            .iter()
            .all(|&j| c <= original.surplus(i0, j))
    });
    let best = optimal_value(&decreased);
    let condition_iv = optimal.iter().all(|mu| mu.value(&decreased) == best);
    Ok(DecreaseReport {
        market: decreased,
        condition_iii,
        condition_iv,
    })
}

/// `c* = min_{j∈μ(i0)} (a_{i0 j} − y̲_j)`.
pub fn max_valid_decrease(m: &Market, i0: usize) -> Result<Rational> {
    check_index("firm", i0, m.firm_count())?;
    let mu = optimal_matching(m).matching;
    let hired = mu.workers_of(i0);
    if hired.is_empty() {
        return Err(Error::UnmatchedFirm(i0));
    }
    let low = min_competitive_salaries(m);
    Ok(hired
        .into_iter()
        .map(|j| m.surplus(i0, j) - &low[j])
        .min()
        .expect("firm hires someone"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build_game;
    use crate::market::Firm;
    use crate::rational::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn example1() -> Market {
        Market::from_ints(&[2, 1], &[[8, 6, 3], [7, 6, 4]]).unwrap()
    }

    #[test]
    fn example1_system() {
        let sys = CoreConstraintSystem::for_market(&example1());
        assert_eq!(sys.constraints().len(), 10);
        assert!(sys.constraints().len() <= 9 + 6);
        let diffs: Vec<(usize, usize, Rational)> = sys
            .constraints()
            .iter()
            .filter(|c| c.kind == ConstraintKind::Difference)
            .map(|c| (c.from, c.to, c.bound.clone()))
            .collect();
        assert_eq!(
            diffs,
            vec![
                (1, 3, int(-5)),
                (2, 3, int(-3)),
                (3, 1, int(3)),
                (3, 2, int(2)),
            ]
        );
        assert!(sys.contains(&ints(&[3, 2, 0])).unwrap());
        assert!(!sys.contains(&ints(&[0, 6, 3])).unwrap());
        assert!(sys.contains(&ints(&[8, 6, 4])).unwrap());
        assert!(sys.contains(&ints(&[1, 2])).is_err());
    }

    #[test]
    fn single_firm_has_only_boxes() {
        let sys = CoreConstraintSystem::for_market(&Market::from_ints(&[3], &[[1, 2, 3]]).unwrap());
        assert!(sys
            .constraints()
            .iter()
            .all(|c| matches!(c.kind, ConstraintKind::Lower | ConstraintKind::Upper)));
    }

    #[test]
    fn example2_system() {
        let sys = CoreConstraintSystem::for_market(
            &Market::from_ints(&[2, 2], &[[1, 1, 1], [1, 1, 1]]).unwrap(),
        );
        let real = |node: usize| node <= 3;
        for c in sys
            .constraints()
            .iter()
            .filter(|c| real(c.from) && real(c.to))
        {
            match c.kind {
                ConstraintKind::Upper => assert_eq!(c.bound, int(-1)),
                _ => assert_eq!(c.bound, int(0)),
            }
        }
        // μ = {(f1,w1),(f1,w2),(f2,w3)}, balanced with one dummy worker.
        assert_eq!(sys.worker_count(), 4);
        assert_eq!(
            sys.constraints()
                .iter()
                .filter(|c| c.kind == ConstraintKind::Difference)
                .count(),
            8
        );
    }

    #[test]
    fn payoffs() {
        let sys = CoreConstraintSystem::for_market(&example1());
        let a = sys.allocation(&ints(&[3, 2, 0])).unwrap();
        assert_eq!(a.firms, ints(&[9, 4]));
        assert_eq!(a.to_string(), "(9, 4; 3, 2, 0)");
        let a = sys.allocation(&ints(&[8, 6, 4])).unwrap();
        assert_eq!(a.firms, ints(&[0, 0]));
    }

    #[test]
    fn core_membership_examples() {
        let g2 = build_game(&Market::from_ints(&[2, 2], &[[1, 1, 1], [1, 1, 1]]).unwrap()).unwrap();
        let third = rat(1, 3);
        let kernel_point =
            Allocation::new(ints(&[1, 1]), vec![third.clone(), third.clone(), third]);
        assert!(!is_core_allocation(&g2, &kernel_point).unwrap());
        assert!(
            is_core_allocation(&g2, &Allocation::new(ints(&[0, 0]), ints(&[1, 1, 1]))).unwrap()
        );

        let b = Market::from_ints(&[2, 1], &[[6, 4, 1], [5, 4, 5]]).unwrap();
        let gb = build_game(&b).unwrap();
        let alloc = Allocation::new(ints(&[0, 5]), ints(&[6, 4, 0]));
        let v = core_violation(&gb, &alloc).unwrap();
        assert_eq!(
            v,
            Some(CoreViolation::Blocked {
                coalition: gb.coalition(&[0], &[2]),
                excess: int(1)
            })
        );
        assert_eq!(v, core_violation_full(&gb, &alloc).unwrap());

        let inefficient = Allocation::new(ints(&[0, 0]), ints(&[0, 0, 0]));
        assert!(matches!(
            core_violation(&gb, &inefficient).unwrap(),
            Some(CoreViolation::Inefficient { .. })
        ));
        assert!(core_violation(&gb, &Allocation::new(ints(&[0]), ints(&[0, 0, 0]))).is_err());
    }

    #[test]
    fn competitive_equilibrium_examples() {
        let m = example1();
        let mu = optimal_matching(&m).matching;
        assert!(is_competitive_equilibrium(&m, &mu, &ints(&[3, 2, 0])).unwrap());
        assert!(!is_competitive_equilibrium(&m, &mu, &ints(&[0, 0, 0])).unwrap());
        let partial = Matching::new(&m, vec![(0, 0), (0, 1)]).unwrap();
        assert!(!is_competitive_equilibrium(&m, &partial, &ints(&[3, 2, 1])).unwrap());
    }

    #[test]
    fn competitive_salary_extremes() {
        let m = example1();
        assert_eq!(max_competitive_salaries(&m), ints(&[8, 6, 4]));
        assert_eq!(min_competitive_salaries(&m), ints(&[3, 2, 0]));
        let b = Market::from_ints(&[2, 1], &[[6, 4, 1], [5, 4, 5]]).unwrap();
        assert_eq!(max_competitive_salaries(&b), ints(&[6, 4, 5]));
        assert_eq!(min_competitive_salaries(&b), ints(&[0, 0, 0]));
        let one = Market::from_ints(&[1], &[[5]]).unwrap();
        assert_eq!(min_competitive_salaries(&one), ints(&[0]));
        assert_eq!(max_competitive_salaries(&one), ints(&[5]));
        let null = Market::from_ints(&[1, 1], &[[3, 0], [1, 0]]).unwrap();
        assert_eq!(max_competitive_salaries(&null)[1], int(0));
    }

    #[test]
    fn decrease_examples() {
        let m = example1();
        assert_eq!(max_valid_decrease(&m, 0).unwrap(), int(4));
        assert_eq!(max_valid_decrease(&m, 1).unwrap(), int(4));

        let report = decrease_surplus(&m, 1, &int(4)).unwrap();
        assert_eq!(report.market.row(1), &ints(&[3, 2, 0])[..]);
        assert!(report.condition_iii);

        let report = decrease_surplus(&m, 1, &int(0)).unwrap();
        assert_eq!(report.market, m);
        assert!(report.is_valid());

        let report = decrease_surplus(&m, 0, &int(9)).unwrap();
        assert!(report.market.row(0).iter().all(Zero::is_zero));
        assert!(!report.condition_iii);
        assert_eq!(
            decrease_surplus(&m, 0, &int(-1)),
            Err(Error::NegativeDecrease)
        );

        let raw = RawMarket::new(
            vec![Firm::new("f1", 2), Firm::new("f2", 1)],
            vec!["w1".into(), "w2".into(), "w3".into()],
            vec![ints(&[9, 7, 3]), ints(&[8, 7, 4])],
            ints(&[1, 1, 0]),
        )
        .unwrap();
        let (decreased, report) = constant_decrease(&raw, 1, &int(4)).unwrap();
        assert_eq!(decreased.hire(1, 2), &int(0));
        assert_eq!(report, decrease_surplus(&m, 1, &int(4)).unwrap());
        assert_eq!(min_competitive_salaries(&report.market)[2], int(0));
    }

    #[test]
    fn unmatched_firm() {
        let m = Market::from_ints(&[1, 1], &[[5], [3]]).unwrap();
        assert_eq!(max_valid_decrease(&m, 1), Err(Error::UnmatchedFirm(1)));
    }
}
