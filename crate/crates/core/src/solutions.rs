//! Single-valued and set-valued solutions: kernel, nucleolus, Shapley value,
//! tau-value, fair division, dominant diagonal and convexity.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::competitive::{
    is_core_allocation, max_competitive_salaries, min_competitive_salaries, Allocation,
    CoreConstraintSystem,
};
use crate::error::{Error, Result};
use crate::game::{essential_candidates, members, Coalition, GameTable};
use crate::lp::{LinearProgram, Relation};
use crate::market::Market;
use crate::matching::{all_optimal_matchings, optimal_matching, Matching};
use crate::rational::Rational;

fn imputation(g: &GameTable, z: &Allocation) -> Result<Vec<Rational>> {
    let payoff = z.payoff();
    if payoff.len() != g.player_count() || z.firms.len() != g.firm_count() {
        return Err(Error::Dimension {
            expected: g.player_count(),
            found: payoff.len(),
        });
    }
    let efficient = &g.sum(&payoff, g.grand()) == g.value(g.grand());
    let rational = payoff
        .iter()
        .enumerate()
        .all(|(p, zp)| zp >= g.value(1 << p));
    if efficient && rational {
        Ok(payoff)
    } else {
        Err(Error::NotImputation)
    }
}

fn surplus_over(
    g: &GameTable,
    z: &[Rational],
    i: usize,
    j: usize,
    coalitions: impl Iterator<Item = Coalition>,
) -> Rational {
    coalitions
        .filter(|s| s >> i & 1 == 1 && s >> j & 1 == 0)
        .map(|s| g.excess(z, s))
        .max()
        .expect("the singleton {i} always qualifies")
}

/// `s_ij(z)`: the largest excess of a coalition containing `i` but not `j`.
pub fn max_surplus(g: &GameTable, z: &Allocation, i: usize, j: usize) -> Result<Rational> {
    let payoff = imputation(g, z)?;
    for p in [i, j] {
        crate::market::check_index("player", p, g.player_count())?;
    }
    Ok(surplus_over(g, &payoff, i, j, 1..=g.grand()))
}

/// First pair `(i, j, s_ij, s_ji)` with unequal maximum surpluses.
pub fn kernel_violation(
    g: &GameTable,
    z: &Allocation,
) -> Result<Option<(usize, usize, Rational, Rational)>> {
    let payoff = imputation(g, z)?;
    let p = g.player_count();
    for i in 0..p {
        for j in i + 1..p {
            let sij = surplus_over(g, &payoff, i, j, 1..=g.grand());
            let sji = surplus_over(g, &payoff, j, i, 1..=g.grand());
            if sij != sji {
                return Ok(Some((i, j, sij, sji)));
            }
        }
    }
    Ok(None)
}

/// `s_ij(z) = s_ji(z)` for every pair of players.
pub fn is_in_kernel(g: &GameTable, z: &Allocation) -> Result<bool> {
    Ok(kernel_violation(g, z)?.is_none())
}

/// Blocks `{i} ∪ μ(i)` that appear in every optimal matching.
pub fn common_blocks(m: &Market) -> Result<Vec<Coalition>> {
    let all = all_optimal_matchings(m)?;
    let firms = m.firm_count();
    let block = |mu: &Matching, i: usize| -> Coalition {
        mu.workers_of(i)
            .into_iter()
            .fold(1 << i, |acc, j| acc | 1 << (firms + j))
    };
    Ok((0..firms)
        .filter(|&i| all.iter().all(|mu| !mu.workers_of(i).is_empty()))
        .map(|i| block(&all[0], i))
        .filter(|&b| all.iter().all(|mu| (0..firms).any(|k| block(mu, k) == b)))
        .collect())
}

/// Kernel test for a core allocation: only pairs inside blocks common to all
/// optimal matchings matter, with surpluses over essential coalitions.
pub fn kernel_core_test(m: &Market, g: &GameTable, z: &Allocation) -> Result<bool> {
    if !is_core_allocation(g, z)? {
        return Err(Error::NotInCore);
    }
    let payoff = z.payoff();
    let candidates = essential_candidates(m);
    for block in common_blocks(m)? {
        let players: Vec<usize> = members(block).collect();
        for (a, &i) in players.iter().enumerate() {
            for &j in &players[a + 1..] {
                let sij = surplus_over(g, &payoff, i, j, candidates.iter().copied());
                let sji = surplus_over(g, &payoff, j, i, candidates.iter().copied());
                if sij != sji {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Nucleolus over the essential candidate coalitions.
pub fn nucleolus(m: &Market, g: &GameTable) -> Result<Allocation> {
    let mut family = essential_candidates(m);
    family.retain(|&s| s != g.grand());
    let payoff = lexicographic_center(g, family)?;
    Ok(Allocation::from_payoff(&payoff, g.firm_count()))
}

/// Nucleolus over all coalitions; an independent check of [`nucleolus`].
pub fn nucleolus_full(g: &GameTable) -> Result<Allocation> {
    let family: Vec<Coalition> = (1..g.grand()).collect();
    let payoff = lexicographic_center(g, family)?;
    Ok(Allocation::from_payoff(&payoff, g.firm_count()))
}

fn indicator(s: Coalition, p: usize) -> Vec<Rational> {
    (0..p)
        .map(|k| {
            if s >> k & 1 == 1 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// Row-echelon span membership over rationals.
#[derive(Default)]
struct Span {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Span {
    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            let f = v[*pivot].clone();
            if !f.is_zero() {
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= &f * b;
                }
            }
        }
        v
    }

    fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    fn insert(&mut self, v: &[Rational]) -> bool {
        let mut r = self.reduce(v);
        let Some(pivot) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = r[pivot].clone();
        for x in r.iter_mut() {
            *x /= &lead;
        }
        // Keep existing rows reduced in the new pivot column.
        for (_, row) in self.rows.iter_mut() {
            let f = row[pivot].clone();
            if !f.is_zero() {
                for (a, b) in row.iter_mut().zip(&r) {
                    *a -= &f * b;
                }
            }
        }
        self.rows.push((pivot, r));
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Iterated LPs: minimize the largest excess over the active coalitions,
/// fix those that are tight at every optimum (positive dual), drop the ones
/// whose payoff is already determined, repeat until the point is unique.
fn lexicographic_center(g: &GameTable, family: Vec<Coalition>) -> Result<Vec<Rational>> {
    let p = g.player_count();
    let eps = p;
    let mut span = Span::default();
    span.insert(&indicator(g.grand(), p));
    let mut fixed: Vec<(Coalition, Rational)> = Vec::new();
    let mut active = family;
    active.retain(|&s| !span.contains(&indicator(s, p)));

    let mut x = vec![Rational::zero(); p];
    if p == 0 {
        return Ok(x);
    }
    loop {
        let mut lp = LinearProgram::new(p + 1);
        for v in 0..=p {
            lp.set_free(v);
        }
        let mut objective = vec![Rational::zero(); p + 1];
        objective[eps] = Rational::one();
        lp.minimize(objective)?;
        let mut grand = indicator(g.grand(), p);
        grand.push(Rational::zero());
        lp.add_row(grand, Relation::Eq, g.value(g.grand()).clone())?;
        for (s, rhs) in &fixed {
            let mut row = indicator(*s, p);
            row.push(Rational::zero());
            lp.add_row(row, Relation::Eq, rhs.clone())?;
        }
        for &s in &active {
            let mut row = indicator(s, p);
            row.push(Rational::one());
            lp.add_row(row, Relation::Ge, g.value(s).clone())?;
        }
        let solution = lp.solve()?;
        x = solution.x[..p].to_vec();
        if active.is_empty() || span.rank() == p {
            break;
        }
        let level = solution.value.clone();
        let offset = 1 + fixed.len();
        let newly: Vec<Coalition> = active
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                solution.duals[offset + k]
                    .as_ref()
                    .is_some_and(|d| d.is_positive())
            })
            .map(|(_, &s)| s)
            .collect();
        for s in newly {
            fixed.push((s, g.value(s) - &level));
            span.insert(&indicator(s, p));
        }
        active.retain(|&s| !span.contains(&indicator(s, p)));
        if span.rank() == p {
            break;
        }
    }
    if span.rank() == p {
        // The final point is pinned by the fixed equalities; the last LP
        // solution may predate the final round of fixing, so resolve.
        let mut lp = LinearProgram::new(p);
        for v in 0..p {
            lp.set_free(v);
        }
        lp.add_row(
            indicator(g.grand(), p),
            Relation::Eq,
            g.value(g.grand()).clone(),
        )?;
        for (s, rhs) in &fixed {
            lp.add_row(indicator(*s, p), Relation::Eq, rhs.clone())?;
        }
        x = lp.solve()?.x;
    }
    Ok(x)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Shapley value by the subset formula.
pub fn shapley(g: &GameTable) -> Allocation {
    let n = g.player_count();
    let total = factorial(n);
    let weights: Vec<Rational> = (0..n)
        .map(|s| Rational::new(factorial(s) * factorial(n - s - 1), total.clone()))
        .collect();
    let mut phi = vec![Rational::zero(); n];
    for (i, phi_i) in phi.iter_mut().enumerate() {
        for s in 0..=g.grand() {
            if s >> i & 1 == 1 {
                continue;
            }
            let gain = g.value(s | 1 << i) - g.value(s);
            if !gain.is_zero() {
                *phi_i += &weights[s.count_ones() as usize] * gain;
            }
        }
    }
    Allocation::from_payoff(&phi, g.firm_count())
}

/// Utopia payoffs `M_i = v(N) − v(N \ i)`.
pub fn utopia_vector(g: &GameTable) -> Vec<Rational> {
    (0..g.player_count())
        .map(|i| g.value(g.grand()) - g.value(g.grand() & !(1 << i)))
        .collect()
}

/// Minimum rights `m_i = max_{S∋i} v(S) − Σ_{k∈S\i} M_k`.
pub fn minimum_rights(g: &GameTable) -> Vec<Rational> {
    let utopia = utopia_vector(g);
    (0..g.player_count())
        .map(|i| {
            (1..=g.grand())
                .filter(|s| s >> i & 1 == 1)
                .map(|s| g.value(s) - g.sum(&utopia, s & !(1 << i)))
                .max()
                .expect("{i} itself qualifies")
        })
        .collect()
}

/// `τ = m + κ(M − m)` with `κ` chosen for efficiency.
pub fn tau_value(g: &GameTable) -> Result<Allocation> {
    let upper = utopia_vector(g);
    let lower = minimum_rights(g);
    if upper.iter().zip(&lower).any(|(u, l)| u < l) {
        return Err(Error::TauUndefined(
            "minimum rights exceed the utopia vector",
        ));
    }
    let vn = g.value(g.grand());
    let sum_l = g.sum(&lower, g.grand());
    let sum_u = g.sum(&upper, g.grand());
    if &sum_l > vn || &sum_u < vn {
        return Err(Error::TauUndefined("v(N) lies outside [m(N), M(N)]"));
    }
    let tau = if sum_u == sum_l {
        lower
    } else {
        let kappa = (vn - &sum_l) / (&sum_u - &sum_l);
        lower
            .iter()
            .zip(&upper)
            .map(|(l, u)| l + &kappa * (u - l))
            .collect()
    };
    Ok(Allocation::from_payoff(&tau, g.firm_count()))
}

/// Firm-optimal and worker-optimal core allocations built from the minimum
/// and maximum competitive salaries.
pub fn optimal_core_allocations(m: &Market) -> Result<(Allocation, Allocation)> {
    let sys = CoreConstraintSystem::for_market(m);
    Ok((
        sys.allocation(&min_competitive_salaries(m))?,
        sys.allocation(&max_competitive_salaries(m))?,
    ))
}

/// Midpoint of the two side-optimal core allocations.
pub fn fair_division(m: &Market) -> Result<Allocation> {
    let (firm_best, worker_best) = optimal_core_allocations(m)?;
    Ok(firm_best.midpoint(&worker_best))
}

/// Outcome of the dominant-diagonal test on one optimal matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominantDiagonal {
    pub holds: bool,
    pub matching: Matching,
    /// Firm whose bundle is not row-maximal, if condition (1) fails.
    pub bundle_failure: Option<usize>,
    /// `(firm, worker)` with `a_ij > a_{j^μ j}`, if condition (2) fails.
    pub column_failure: Option<(usize, usize)>,
}

pub fn has_dominant_diagonal(m: &Market) -> Result<DominantDiagonal> {
    if !m.is_balanced() {
        return Err(Error::NotBalanced {
            capacity: m.total_capacity(),
            workers: m.worker_count(),
        });
    }
    let mu = optimal_matching(m).matching;
    let bundle_failure = (0..m.firm_count()).find(|&i| {
        let held = mu
            .workers_of(i)
            .into_iter()
            .fold(Rational::zero(), |acc, j| acc + m.surplus(i, j));
        let mut row: Vec<&Rational> = m.row(i).iter().collect();
        row.sort_unstable_by(|a, b| b.cmp(a));
        let best = row
            .into_iter()
            .take(m.capacity(i))
            .fold(Rational::zero(), |acc, a| acc + a);
        held < best
    });
    let mut column_failure = None;
    'outer: for j in 0..m.worker_count() {
        let house = mu
            .firm_of(j)
            .expect("perfect matching on a balanced market");
        for i in 0..m.firm_count() {
            if m.surplus(i, j) > m.surplus(house, j) {
                column_failure = Some((i, j));
                break 'outer;
            }
        }
    }
    Ok(DominantDiagonal {
        holds: bundle_failure.is_none() && column_failure.is_none(),
        matching: mu,
        bundle_failure,
        column_failure,
    })
}

/// `(x^f; 0)` and `(0; y^w)` for a dominant-diagonal market.
pub fn side_optimal_allocations(m: &Market) -> Result<(Allocation, Allocation)> {
    let dd = has_dominant_diagonal(m)?;
    if !dd.holds {
        return Err(Error::NotDominantDiagonal);
    }
    let mu = &dd.matching;
    let xf: Vec<Rational> = (0..m.firm_count())
        .map(|i| {
            mu.workers_of(i)
                .into_iter()
                .fold(Rational::zero(), |acc, j| acc + m.surplus(i, j))
        })
        .collect();
    let yw: Vec<Rational> = (0..m.worker_count())
        .map(|j| {
            m.surplus(mu.firm_of(j).expect("perfect matching"), j)
                .clone()
        })
        .collect();
    let sys = CoreConstraintSystem::for_market(m);
    let zeros = vec![Rational::zero(); m.worker_count()];
    if !sys.contains(&zeros)? || !sys.contains(&yw)? {
        return Err(Error::NotInCore);
    }
    Ok((
        Allocation::new(xf, zeros),
        Allocation::new(vec![Rational::zero(); m.firm_count()], yw),
    ))
}

/// Every row has at most `r_i` positive entries and every column at most one.
pub fn is_convex_market(m: &Market) -> bool {
    let rows_ok = (0..m.firm_count())
        .all(|i| m.row(i).iter().filter(|a| a.is_positive()).count() <= m.capacity(i));
    let cols_ok = (0..m.worker_count()).all(|j| {
        (0..m.firm_count())
            .filter(|&i| m.surplus(i, j).is_positive())
            .count()
            <= 1
    });
    rows_ok && cols_ok
}

/// Supermodularity of the game, checked on every coalition.
pub fn is_convex_game(g: &GameTable) -> bool {
    let n = g.player_count();
    (0..=g.grand()).all(|s| {
        (0..n).filter(|i| s >> i & 1 == 0).all(|i| {
            (i + 1..n).filter(|j| s >> j & 1 == 0).all(|j| {
                g.value(s | 1 << i | 1 << j) + g.value(s)
                    >= g.value(s | 1 << i) + g.value(s | 1 << j)
            })
        })
    })
}
