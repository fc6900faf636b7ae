//! Market data: raw valuations, the surplus matrix, and capacity balancing.

use std::collections::HashSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Ids starting with this prefix are reserved for generated dummy agents.
pub const DUMMY_PREFIX: &str = "__dummy_";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Firm {
    pub id: String,
    pub capacity: usize,
}

impl Firm {
    pub fn new(id: impl Into<String>, capacity: usize) -> Self {
        Firm {
            id: id.into(),
            capacity,
        }
    }
}

/// Market as reported: hire values `h_ij` and worker reservation values `t_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMarket {
    firms: Vec<Firm>,
    workers: Vec<String>,
    hire: Vec<Vec<Rational>>,
    reservation: Vec<Rational>,
}

impl RawMarket {
    pub fn new(
        firms: Vec<Firm>,
        workers: Vec<String>,
        hire: Vec<Vec<Rational>>,
        reservation: Vec<Rational>,
    ) -> Result<Self> {
        validate_agents(&firms, &workers)?;
        validate_matrix(&hire, firms.len(), workers.len())?;
        if reservation.len() != workers.len() {
            return Err(Error::Dimension {
                expected: workers.len(),
                found: reservation.len(),
            });
        }
        if let Some((col, value)) = reservation
            .iter()
            .enumerate()
            .find(|(_, t)| t.is_negative())
        {
            return Err(Error::NegativeEntry {
                row: 0,
                col,
                value: Box::new(value.clone()),
            });
        }
        Ok(RawMarket {
            firms,
            workers,
            hire,
            reservation,
        })
    }

    pub fn firms(&self) -> &[Firm] {
        &self.firms
    }

    pub fn workers(&self) -> &[String] {
        &self.workers
    }

    pub fn hire(&self, firm: usize, worker: usize) -> &Rational {
        &self.hire[firm][worker]
    }

    pub fn reservation(&self, worker: usize) -> &Rational {
        &self.reservation[worker]
    }

    pub(crate) fn with_hire_row(&self, firm: usize, row: Vec<Rational>) -> RawMarket {
        let mut out = self.clone();
        out.hire[firm] = row;
        out
    }
}

/// Market in surplus form `(F, W, A, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    firms: Vec<Firm>,
    workers: Vec<String>,
    surplus: Vec<Vec<Rational>>,
}

impl Market {
    pub fn new(
        firms: Vec<Firm>,
        workers: Vec<String>,
        surplus: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        validate_agents(&firms, &workers)?;
        validate_matrix(&surplus, firms.len(), workers.len())?;
        Ok(Market {
            firms,
            workers,
            surplus,
        })
    }

    /// Builds a market with generated ids `f1..` and `w1..`.
    pub fn from_rows(capacities: &[usize], rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let firms = capacities
            .iter()
            .enumerate()
            .map(|(i, &r)| Firm::new(format!("f{}", i + 1), r))
            .collect();
        let workers = (1..=n).map(|j| format!("w{j}")).collect();
        Market::new(firms, workers, rows)
    }

    /// Integer-matrix shorthand for [`Market::from_rows`].
    pub fn from_ints<R: AsRef<[i64]>>(capacities: &[usize], rows: &[R]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|row| row.as_ref().iter().map(|&a| int(a)).collect())
            .collect();
        Market::from_rows(capacities, rows)
    }

    pub fn firms(&self) -> &[Firm] {
        &self.firms
    }

    pub fn workers(&self) -> &[String] {
        &self.workers
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn worker_count(&self) -> usize {
        self.workers.len()
    }

    pub fn capacity(&self, firm: usize) -> usize {
        self.firms[firm].capacity
    }

    pub fn capacities(&self) -> Vec<usize> {
        self.firms.iter().map(|f| f.capacity).collect()
    }

    pub fn total_capacity(&self) -> usize {
        self.firms.iter().map(|f| f.capacity).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.total_capacity() == self.worker_count()
    }

    pub fn surplus(&self, firm: usize, worker: usize) -> &Rational {
        &self.surplus[firm][worker]
    }

    pub fn row(&self, firm: usize) -> &[Rational] {
        &self.surplus[firm]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.surplus
    }

    pub fn firm_index(&self, id: &str) -> Option<usize> {
        self.firms.iter().position(|f| f.id == id)
    }

    pub fn worker_index(&self, id: &str) -> Option<usize> {
        self.workers.iter().position(|w| w == id)
    }

    /// Submarket `γ_(S,T)`, keeping the given index order.
    pub fn restrict(&self, firms: &[usize], workers: &[usize]) -> Result<Market> {
        for &i in firms {
            check_index("firm", i, self.firm_count())?;
        }
        for &j in workers {
            check_index("worker", j, self.worker_count())?;
        }
        Ok(Market {
            firms: firms.iter().map(|&i| self.firms[i].clone()).collect(),
            workers: workers.iter().map(|&j| self.workers[j].clone()).collect(),
            surplus: firms
                .iter()
                .map(|&i| {
                    workers
                        .iter()
                        .map(|&j| self.surplus[i][j].clone())
                        .collect()
                })
                .collect(),
        })
    }

    /// Same market with the surplus matrix replaced (dimensions must match).
    pub fn with_matrix(&self, surplus: Vec<Vec<Rational>>) -> Result<Market> {
        Market::new(self.firms.clone(), self.workers.clone(), surplus)
    }
}

/// `a_ij = max{h_ij − t_j, 0}`.
pub fn surplus_matrix(raw: &RawMarket) -> Market {
    let surplus = raw
        .hire
        .iter()
        .map(|row| {
            row.iter()
                .zip(&raw.reservation)
                .map(|(h, t)| clamp_nonnegative(h - t))
                .collect()
        })
        .collect();
    Market {
        firms: raw.firms.clone(),
        workers: raw.workers.clone(),
        surplus,
    }
}

pub(crate) fn clamp_nonnegative(value: Rational) -> Rational {
    if value.is_negative() {
        Rational::zero()
    } else {
        value
    }
}

/// A market padded with null agents so that total capacity equals the number
/// of workers. Dummies are always appended after the original agents, so the
/// original indices are unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedMarket {
    market: Market,
    original: Market,
    dummy_workers: Vec<usize>,
    dummy_firm: Option<usize>,
}

impl BalancedMarket {
    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn original(&self) -> &Market {
        &self.original
    }

    pub fn dummy_workers(&self) -> &[usize] {
        &self.dummy_workers
    }

    pub fn dummy_firm(&self) -> Option<usize> {
        self.dummy_firm
    }

    pub fn worker_count(&self) -> usize {
        self.market.worker_count()
    }

    pub fn original_worker(&self, j: usize) -> Option<usize> {
        (j < self.original.worker_count()).then_some(j)
    }

    pub fn original_firm(&self, i: usize) -> Option<usize> {
        (i < self.original.firm_count()).then_some(i)
    }

    /// Extends original worker salaries with zeros for the dummy workers.
    pub fn lift_salaries(&self, salaries: &[Rational]) -> Result<Vec<Rational>> {
        if salaries.len() != self.original.worker_count() {
            return Err(Error::Dimension {
                expected: self.original.worker_count(),
                found: salaries.len(),
            });
        }
        let mut out = salaries.to_vec();
        out.resize(self.market.worker_count(), Rational::zero());
        Ok(out)
    }
}

pub fn balance(market: &Market) -> BalancedMarket {
    let n = market.worker_count();
    let capacity = market.total_capacity();
    let mut balanced = market.clone();
    let mut dummy_workers = Vec::new();
    let mut dummy_firm = None;
    if capacity > n {
        for k in 0..capacity - n {
            dummy_workers.push(balanced.workers.len());
            balanced.workers.push(format!("{DUMMY_PREFIX}w{}", k + 1));
            for row in &mut balanced.surplus {
                row.push(Rational::zero());
            }
        }
    } else if n > capacity {
        dummy_firm = Some(balanced.firms.len());
        balanced
            .firms
            .push(Firm::new(format!("{DUMMY_PREFIX}f0"), n - capacity));
        balanced.surplus.push(vec![Rational::zero(); n]);
    }
    BalancedMarket {
        market: balanced,
        original: market.clone(),
        dummy_workers,
        dummy_firm,
    }
}

fn validate_agents(firms: &[Firm], workers: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for firm in firms {
        if firm.capacity == 0 {
            return Err(Error::ZeroCapacity(firm.id.clone()));
        }
    }
    for id in firms.iter().map(|f| &f.id) {
        if id.starts_with(DUMMY_PREFIX) {
            return Err(Error::ReservedId(id.clone()));
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    let mut seen = HashSet::new();
    for id in workers {
        if id.starts_with(DUMMY_PREFIX) {
            return Err(Error::ReservedId(id.clone()));
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

pub(crate) fn validate_matrix(matrix: &[Vec<Rational>], rows: usize, cols: usize) -> Result<()> {
    let shape_ok = matrix.len() == rows && matrix.iter().all(|r| r.len() == cols);
    if !shape_ok {
        return Err(Error::Shape {
            expected_rows: rows,
            expected_cols: cols,
            found: format!(
                "{} rows with lengths {:?}",
                matrix.len(),
                matrix.iter().map(Vec::len).collect::<Vec<_>>()
            ),
        });
    }
    for (row, values) in matrix.iter().enumerate() {
        for (col, value) in values.iter().enumerate() {
            if value.is_negative() {
                return Err(Error::NegativeEntry {
                    row,
                    col,
                    value: Box::new(value.clone()),
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn check_index(what: &'static str, index: usize, size: usize) -> Result<()> {
    if index < size {
        Ok(())
    } else {
        Err(Error::OutOfRange { what, index, size })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn example1() -> Market {
        Market::from_ints(&[2, 1], &[[8, 6, 3], [7, 6, 4]]).unwrap()
    }

    fn raw(hire: &[[i64; 3]; 2], reservation: [i64; 3], caps: [usize; 2]) -> RawMarket {
        RawMarket::new(
            caps.iter()
                .enumerate()
                .map(|(i, &r)| Firm::new(format!("f{}", i + 1), r))
                .collect(),
            (1..=3).map(|j| format!("w{j}")).collect(),
            hire.iter()
                .map(|row| row.iter().map(|&h| int(h)).collect())
                .collect(),
            reservation.iter().map(|&t| int(t)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn surplus_subtracts_reservation_and_clamps() {
        let m = surplus_matrix(&raw(&[[9, 7, 3], [8, 7, 4]], [1, 1, 0], [2, 1]));
        assert_eq!(m, example1());

        let m = surplus_matrix(&raw(&[[8, 3, 0], [0, 0, 0]], [0, 5, 0], [1, 1]));
        assert_eq!(m.surplus(0, 0), &int(8));
        assert_eq!(m.surplus(0, 1), &int(0));
    }

    #[test]
    fn balance_is_identity_when_balanced() {
        let b = balance(&example1());
        assert_eq!(b.market(), &example1());
        assert!(b.dummy_workers().is_empty());
        assert_eq!(b.dummy_firm(), None);
    }

    #[test]
    fn balance_adds_dummy_worker_columns() {
        let m = Market::from_ints(&[2, 2], &[[1, 1, 1], [1, 1, 1]]).unwrap();
        let b = balance(&m);
        assert_eq!(b.dummy_workers(), &[3]);
        assert!(b.market().is_balanced());
        assert_eq!(b.market().surplus(0, 3), &int(0));
        assert_eq!(b.market().surplus(1, 3), &int(0));
        let back = b.market().restrict(&[0, 1], &[0, 1, 2]).unwrap();
        assert_eq!(&back, b.original());
        assert_eq!(back, m);
    }

    #[test]
    fn balance_adds_dummy_firm() {
        let m = Market::from_ints(&[1, 1], &[[1, 2, 3], [4, 5, 6]]).unwrap();
        let b = balance(&m);
        assert_eq!(b.dummy_firm(), Some(2));
        assert_eq!(b.market().capacity(2), 1);
        assert!(b.market().row(2).iter().all(Zero::is_zero));
        assert!(b.market().firms()[2].id.starts_with(DUMMY_PREFIX));
    }

    #[test]
    fn restrict_examples() {
        let m = example1();
        assert_eq!(m.restrict(&[0, 1], &[0, 1, 2]).unwrap(), m);
        let sub = m.restrict(&[1], &[2]).unwrap();
        assert_eq!(sub.matrix(), &[vec![int(4)]]);
        assert_eq!(sub.capacities(), vec![1]);
        let sub = m.restrict(&[0], &[0, 1]).unwrap();
        assert_eq!(sub.matrix(), &[vec![int(8), int(6)]]);
        assert_eq!(sub.capacities(), vec![2]);
        assert!(m.restrict(&[2], &[]).is_err());
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Market::from_ints(&[0], &[[1]]),
            Err(Error::ZeroCapacity(_))
        ));
        assert!(matches!(
            Market::from_rows(&[1], vec![vec![rat(-1, 2)]]),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(
            Market::new(
                vec![Firm::new("a", 1), Firm::new("a", 1)],
                vec!["w".into()],
                vec![vec![int(1)], vec![int(1)]]
            ),
            Err(Error::DuplicateId(_))
        ));
        assert!(matches!(
            Market::new(
                vec![Firm::new("a", 1)],
                vec![format!("{DUMMY_PREFIX}x")],
                vec![vec![int(1)]]
            ),
            Err(Error::ReservedId(_))
        ));
        assert!(matches!(
            Market::new(
                vec![Firm::new("a", 1)],
                vec!["w1".into(), "w2".into()],
                vec![vec![int(1)]]
            ),
            Err(Error::Shape { .. })
        ));
    }
}
