//! Buyer-seller markets with unit-demand buyers and multi-unit sellers.
//!
//! A buyer-seller market is handled as the transposed job market: sellers
//! play the firms and buyers the workers, so a buyer payoff vector `x` is a
//! salary vector. The competitive-equilibrium set adds the difference
//! constraints between buyers of the same seller, which forces a single
//! price per seller.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::competitive::{CoreConstraintSystem, SalaryVector};
use crate::error::{Error, Result};
use crate::market::{balance, validate_matrix, Firm, Market};
use crate::matching::{optimal_matching, Matching};
use crate::maxmin::{brute_force_vertices, maxmin_table_with_limit, ORDER_LIMIT};
use crate::rational::Rational;
use crate::tight_digraph::{build_tight_digraph, TightDigraph};

#[derive(Debug, Clone, PartialEq)]
pub struct BuyerMarket {
    market: Market,
}

impl BuyerMarket {
    /// `valuation[i][j]` is the value of a unit of seller `j` to buyer `i`.
    pub fn new(
        buyers: Vec<String>,
        sellers: Vec<Firm>,
        valuation: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        validate_matrix(&valuation, buyers.len(), sellers.len())?;
        let transposed = (0..sellers.len())
            .map(|j| valuation.iter().map(|row| row[j].clone()).collect())
            .collect();
        Ok(BuyerMarket {
            market: Market::new(sellers, buyers, transposed)?,
        })
    }

    /// Sellers `s1..` with the given capacities, buyers `b1..` one per row.
    pub fn from_ints<R: AsRef<[i64]>>(capacities: &[usize], rows: &[R]) -> Result<Self> {
        let sellers = capacities
            .iter()
            .enumerate()
            .map(|(j, &r)| Firm::new(format!("s{}", j + 1), r))
            .collect();
        let buyers = (1..=rows.len()).map(|i| format!("b{i}")).collect();
        let valuation = rows
            .iter()
            .map(|row| {
                row.as_ref()
                    .iter()
                    .map(|&a| Rational::from_integer(a.into()))
                    .collect()
            })
            .collect();
        BuyerMarket::new(buyers, sellers, valuation)
    }

    /// The transposed job market: sellers as firms, buyers as workers.
    pub fn as_job_market(&self) -> &Market {
        &self.market
    }

    pub fn buyers(&self) -> &[String] {
        self.market.workers()
    }

    pub fn sellers(&self) -> &[Firm] {
        self.market.firms()
    }

    pub fn buyer_count(&self) -> usize {
        self.market.worker_count()
    }

    pub fn seller_count(&self) -> usize {
        self.market.firm_count()
    }

    pub fn valuation(&self, buyer: usize, seller: usize) -> &Rational {
        self.market.surplus(seller, buyer)
    }
}

/// Optimal matching as `(seller, buyer)` pairs.
pub fn optimal_buyer_matching(bm: &BuyerMarket) -> Matching {
    optimal_matching(bm.as_job_market()).matching
}

/// Buyer-space core: boxes plus differences between buyers of distinct sellers.
pub fn buyer_core_constraints(bm: &BuyerMarket, mu: &Matching) -> Result<CoreConstraintSystem> {
    CoreConstraintSystem::build(balance(bm.as_job_market()), mu.clone(), false)
}

/// Competitive-equilibrium set: the core rows plus differences between every
/// ordered pair of buyers, including buyers of the same seller.
pub fn ce_constraints(bm: &BuyerMarket, mu: &Matching) -> Result<CoreConstraintSystem> {
    CoreConstraintSystem::build(balance(bm.as_job_market()), mu.clone(), true)
}

/// Per-seller prices `p_j = a_ij − x_i` of a CE payoff vector.
pub fn ce_prices(sys: &CoreConstraintSystem, x: &[Rational]) -> Result<Vec<Rational>> {
    let x = sys.lift(x)?;
    if !sys.has_all_pairs() || !sys.contains(&x)? {
        return Err(Error::NotInCore);
    }
    let market = sys.market();
    let sellers = sys.balanced().original().firm_count();
    Ok((0..sellers)
        .map(|j| {
            let i = sys
                .matching()
                .workers_of(j)
                .first()
                .copied()
                .expect("every seller has capacity and the matching is perfect");
            market.surplus(j, i) - &x[i]
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CePoint {
    pub buyers: SalaryVector,
    pub prices: Vec<Rational>,
    /// `y_j = Σ_{μ(i)=j} (a_ij − x_i)`.
    pub sellers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeVertices {
    /// Sorted ascending by buyer payoffs.
    pub points: Vec<CePoint>,
    /// Whether the in-CE max-min vectors give exactly the same set.
    pub maxmin_agrees: bool,
}

impl CeVertices {
    pub fn buyer_vectors(&self) -> Vec<SalaryVector> {
        self.points.iter().map(|p| p.buyers.clone()).collect()
    }
}

/// Extreme points of CE(B), from the vertex oracle on the CE system.
pub fn ce_vertices(bm: &BuyerMarket) -> Result<CeVertices> {
    let sys = ce_constraints(bm, &optimal_buyer_matching(bm))?;
    let vertices = brute_force_vertices(&sys)?;
    let maxmin_agrees = if sys.worker_count() <= ORDER_LIMIT {
        let from_orders: BTreeSet<SalaryVector> = maxmin_table_with_limit(&sys, ORDER_LIMIT)?
            .into_iter()
            .filter(|r| r.in_core)
            .map(|r| sys.project(&r.salaries))
            .collect();
        from_orders.into_iter().eq(vertices.iter().cloned())
    } else {
        false
    };
    let points = vertices
        .into_iter()
        .map(|x| {
            let prices = ce_prices(&sys, &x)?;
            let sellers = sys.allocation(&x)?.firms;
            Ok(CePoint {
                buyers: x,
                prices,
                sellers,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CeVertices {
        points,
        maxmin_agrees,
    })
}

/// Tight digraph built from every row of the CE system.
pub fn extended_tight_digraph(
    bm: &BuyerMarket,
    mu: &Matching,
    x: &[Rational],
) -> Result<TightDigraph> {
    build_tight_digraph(&ce_constraints(bm, mu)?, x)
}

/// Sufficient condition for C(B) = CE(B): for sellers `j ≠ j'`, buyers
/// `i, k` of `j` and `i'` of `j'`, both `a_kj' + a_i'j ≥ a_kj + a_i'j'` and
/// the same with `i` in place of `k`. Checked on the balanced market.
pub fn ce_equals_core(bm: &BuyerMarket) -> bool {
    let balanced = balance(bm.as_job_market());
    let market = balanced.market();
    let mu = optimal_matching(market).matching;
    let sys = CoreConstraintSystem::build(balanced.clone(), mu, false)
        .expect("the solver's matching is optimal");
    let mu = sys.matching();
    let a = |buyer: usize, seller: usize| market.surplus(seller, buyer);
    let sellers = market.firm_count();
    for j in 0..sellers {
        let block = mu.workers_of(j);
        for jp in (0..sellers).filter(|&jp| jp != j) {
            for ip in mu.workers_of(jp) {
                for &k in &block {
                    if a(k, jp) + a(ip, j) < a(k, j) + a(ip, jp) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Whether every vertex of C(B) already satisfies the CE rows.
pub fn core_vertices_in_ce(bm: &BuyerMarket) -> Result<bool> {
    let mu = optimal_buyer_matching(bm);
    let core = buyer_core_constraints(bm, &mu)?;
    let ce = ce_constraints(bm, &mu)?;
    for x in brute_force_vertices(&core)? {
        if !ce.contains(&x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ_i x_i + Σ_j y_j`, equal to the optimal value on CE points.
pub fn total_payoff(point: &CePoint) -> Rational {
    point
        .buyers
        .iter()
        .chain(&point.sellers)
        .fold(Rational::zero(), |acc, v| acc + v)
}
