//! Extended orders, max-min salary vectors and extreme point enumeration.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::competitive::{Allocation, CoreConstraintSystem, SalaryVector};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default worker limit for order enumeration (`n!·2^n` orders).
pub const ORDER_LIMIT: usize = 8;
/// Worker limit for the brute-force vertex oracle.
pub const ORACLE_LIMIT: usize = 6;

/// A worker permutation with a min/max flag per position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedOrder {
    workers: Vec<usize>,
    maximize: Vec<bool>,
}

impl ExtendedOrder {
    pub fn new(workers: Vec<usize>, maximize: Vec<bool>) -> Result<Self> {
        if workers.len() != maximize.len() {
            return Err(Error::InvalidOrder(format!(
                "{} workers but {} flags",
                workers.len(),
                maximize.len()
            )));
        }
        let mut seen = vec![false; workers.len()];
        for &w in &workers {
            if w >= workers.len() || seen[w] {
                return Err(Error::InvalidOrder(format!(
                    "{workers:?} is not a permutation"
                )));
            }
            seen[w] = true;
        }
        Ok(ExtendedOrder { workers, maximize })
    }

    pub fn workers(&self) -> &[usize] {
        &self.workers
    }

    pub fn maximize(&self) -> &[bool] {
        &self.maximize
    }

    pub fn len(&self) -> usize {
        self.workers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.workers.is_empty()
    }
}

/// `(3-,1-,2+)`: 1-based workers, `-` minimizes, `+` maximizes.
impl fmt::Display for ExtendedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .workers
            .iter()
            .zip(&self.maximize)
            .map(|(w, &max)| format!("{}{}", w + 1, if max { '+' } else { '-' }))
            .collect();
        write!(f, "({})", items.join(","))
    }
}

impl FromStr for ExtendedOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut workers = Vec::new();
        let mut maximize = Vec::new();
        for item in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (num, flag) = item.split_at(item.len() - 1);
            let max = match flag {
                "+" => true,
                "-" => false,
                _ => return Err(Error::InvalidOrder(format!("{item:?} lacks a +/- flag"))),
            };
            let w: usize = num
                .parse()
                .map_err(|_| Error::InvalidOrder(format!("{item:?} is not a worker index")))?;
            if w == 0 {
                return Err(Error::InvalidOrder("worker indices start at 1".into()));
            }
            workers.push(w - 1);
            maximize.push(max);
        }
        ExtendedOrder::new(workers, maximize)
    }
}

/// `bounds[from][to]`: the strongest `y_to − y_from ≥ b` row between two nodes.
struct Bounds {
    rows: Vec<Vec<Option<Rational>>>,
}

impl Bounds {
    fn of(sys: &CoreConstraintSystem) -> Self {
        let nodes = sys.worker_count() + 1;
        let mut rows = vec![vec![None; nodes]; nodes];
        for c in sys.constraints() {
            let slot: &mut Option<Rational> = &mut rows[c.from][c.to];
            if slot.as_ref().map_or(true, |b| c.bound > *b) {
                *slot = Some(c.bound.clone());
            }
        }
        Bounds { rows }
    }

    /// Salary of node `w` given the already fixed nodes (`y[0]` is node 0).
    fn step(&self, y: &[Option<Rational>], w: usize, maximize: bool) -> Rational {
        let known = y
            .iter()
            .enumerate()
            .filter_map(|(u, v)| v.as_ref().map(|v| (u, v)));
        if maximize {
            known
                .filter_map(|(u, yu)| self.rows[w][u].as_ref().map(|b| yu - b))
                .min()
                .expect("upper bound row is always present")
        } else {
            known
                .filter_map(|(u, yu)| self.rows[u][w].as_ref().map(|b| yu + b))
                .max()
                .expect("lower bound row is always present")
        }
    }
}

/// Max-min salary vector of `order` on the balanced worker set.
pub fn maxmin_vector(sys: &CoreConstraintSystem, order: &ExtendedOrder) -> Result<SalaryVector> {
    if order.len() != sys.worker_count() {
        return Err(Error::Dimension {
            expected: sys.worker_count(),
            found: order.len(),
        });
    }
    let bounds = Bounds::of(sys);
    let mut y: Vec<Option<Rational>> = vec![None; order.len() + 1];
    y[0] = Some(Rational::zero());
    for (&w, &max) in order.workers.iter().zip(&order.maximize) {
        y[w + 1] = Some(bounds.step(&y, w + 1, max));
    }
    Ok(y.into_iter()
        .skip(1)
        .map(|v| v.expect("every worker is fixed"))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxMinRow {
    pub order: ExtendedOrder,
    /// Balanced-market salaries.
    pub salaries: SalaryVector,
    pub in_core: bool,
}

fn check_limit(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        Err(Error::LimitExceeded {
            what,
            size: n,
            limit,
        })
    } else {
        Ok(())
    }
}

/// Every extended order with its max-min vector, permutations in
/// lexicographic order and flags counted MIN-first with the first position
/// most significant.
pub fn maxmin_table(sys: &CoreConstraintSystem) -> Result<Vec<MaxMinRow>> {
    maxmin_table_with_limit(sys, ORDER_LIMIT)
}

pub fn maxmin_table_with_limit(sys: &CoreConstraintSystem, limit: usize) -> Result<Vec<MaxMinRow>> {
    let n = sys.worker_count();
    check_limit(n, limit, "workers for order enumeration")?;
    let bounds = Bounds::of(sys);
    let starts: Vec<(usize, bool)> = (0..n).flat_map(|w| [(w, false), (w, true)]).collect();
    let mut rows: Vec<MaxMinRow> = starts
        .into_par_iter()
        .flat_map_iter(|(w, max)| {
            let mut y: Vec<Option<Rational>> = vec![None; n + 1];
            y[0] = Some(Rational::zero());
            let mut out = Vec::new();
            let mut workers = vec![w];
            let mut flags = vec![max];
            y[w + 1] = Some(bounds.step(&y, w + 1, max));
            extend(sys, &bounds, &mut y, &mut workers, &mut flags, &mut out);
            out
        })
        .collect();
    if n == 0 {
        rows.push(MaxMinRow {
            order: ExtendedOrder::default(),
            salaries: Vec::new(),
            in_core: true,
        });
    }
    rows.sort_by(|a, b| {
        (&a.order.workers, &a.order.maximize).cmp(&(&b.order.workers, &b.order.maximize))
    });
    Ok(rows)
}

fn extend(
    sys: &CoreConstraintSystem,
    bounds: &Bounds,
    y: &mut Vec<Option<Rational>>,
    workers: &mut Vec<usize>,
    flags: &mut Vec<bool>,
    out: &mut Vec<MaxMinRow>,
) {
    let n = sys.worker_count();
    if workers.len() == n {
        let salaries: SalaryVector = y[1..].iter().map(|v| v.clone().unwrap()).collect();
        let in_core = sys.constraints().iter().all(|c| c.holds(&salaries));
        out.push(MaxMinRow {
            order: ExtendedOrder {
                workers: workers.clone(),
                maximize: flags.clone(),
            },
            salaries,
            in_core,
        });
        return;
    }
    for w in 0..n {
        if y[w + 1].is_some() {
            continue;
        }
        for max in [false, true] {
            y[w + 1] = Some(bounds.step(y, w + 1, max));
            workers.push(w);
            flags.push(max);
            extend(sys, bounds, y, workers, flags, out);
            workers.pop();
            flags.pop();
        }
        y[w + 1] = None;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremePoint {
    /// Salaries of the original workers.
    pub salaries: SalaryVector,
    pub allocation: Allocation,
    /// Supporting extended orders, sorted.
    pub witnesses: Vec<ExtendedOrder>,
}

/// Extreme points of the core (or CE set), sorted by salary vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeSet {
    pub points: Vec<ExtremePoint>,
    /// Number of extended orders evaluated.
    pub orders: usize,
}

impl ExtremeSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn salaries(&self) -> Vec<SalaryVector> {
        self.points.iter().map(|p| p.salaries.clone()).collect()
    }

    pub fn in_core_orders(&self) -> usize {
        self.points.iter().map(|p| p.witnesses.len()).sum()
    }

    pub fn find(&self, salaries: &[Rational]) -> Option<&ExtremePoint> {
        self.points.iter().find(|p| p.salaries == salaries)
    }
}

pub fn enumerate_extremes(sys: &CoreConstraintSystem) -> Result<ExtremeSet> {
    enumerate_extremes_with_limit(sys, ORDER_LIMIT)
}

pub fn enumerate_extremes_with_limit(
    sys: &CoreConstraintSystem,
    limit: usize,
) -> Result<ExtremeSet> {
    let table = maxmin_table_with_limit(sys, limit)?;
    let orders = table.len();
    let mut grouped: BTreeMap<SalaryVector, Vec<ExtendedOrder>> = BTreeMap::new();
    for row in table.into_iter().filter(|r| r.in_core) {
        grouped.entry(row.salaries).or_default().push(row.order);
    }
    let points = grouped
        .into_iter()
        .map(|(y, witnesses)| {
            Ok(ExtremePoint {
                salaries: sys.project(&y),
                allocation: sys.allocation(&y)?,
                witnesses,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtremeSet { points, orders })
}

/// All extended orders whose max-min vector is `y`; empty when `y` is not
/// extreme.
pub fn witnesses_for(sys: &CoreConstraintSystem, y: &[Rational]) -> Result<Vec<ExtendedOrder>> {
    let y = sys.lift(y)?;
    Ok(maxmin_table(sys)?
        .into_iter()
        .filter(|r| r.in_core && r.salaries == y)
        .map(|r| r.order)
        .collect())
}

/// Vertices of the constraint polytope (original workers) by solving every
/// independent set of `n` tight rows. Independent of the max-min machinery; used as an oracle.
pub fn brute_force_vertices(sys: &CoreConstraintSystem) -> Result<Vec<SalaryVector>> {
    let n = sys.worker_count();
    check_limit(n, ORACLE_LIMIT, "workers for the vertex oracle")?;
    // Each row as a dense vector over the n worker variables plus rhs.
    let rows: Vec<(Vec<Rational>, Rational)> = sys
        .constraints()
        .iter()
        .map(|c| {
            let mut coeffs = vec![Rational::zero(); n];
            if c.to > 0 {
                coeffs[c.to - 1] += Rational::one();
            }
            if c.from > 0 {
                coeffs[c.from - 1] -= Rational::one();
            }
            (coeffs, c.bound.clone())
        })
        .collect();
    let mut seen: HashSet<SalaryVector> = HashSet::new();
    let mut vertices: Vec<SalaryVector> = Vec::new();
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut echelon: Vec<(usize, Vec<Rational>, Rational)> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    oracle_dfs(
        sys,
        &rows,
        0,
        &mut chosen,
        &mut echelon,
        &mut seen,
        &mut vertices,
    );
    vertices.sort();
    Ok(vertices)
}

/// `echelon` holds reduced rows (pivot column, coefficients, rhs) of the
/// rows chosen so far; dependent rows are skipped.
fn oracle_dfs(
    sys: &CoreConstraintSystem,
    rows: &[(Vec<Rational>, Rational)],
    start: usize,
    chosen: &mut Vec<usize>,
    echelon: &mut Vec<(usize, Vec<Rational>, Rational)>,
    seen: &mut HashSet<SalaryVector>,
    vertices: &mut Vec<SalaryVector>,
) {
    let n = sys.worker_count();
    if echelon.len() == n {
        let y = back_substitute(echelon, n);
        if seen.insert(y.clone()) && sys.constraints().iter().all(|c| c.holds(&y)) {
            vertices.push(sys.project(&y));
        }
        return;
    }
    let needed = n - echelon.len();
    for r in start..rows.len() {
        if rows.len() - r < needed {
            break;
        }
        let Some(reduced) = reduce(echelon, &rows[r]) else {
            continue;
        };
        echelon.push(reduced);
        chosen.push(r);
        oracle_dfs(sys, rows, r + 1, chosen, echelon, seen, vertices);
        chosen.pop();
        echelon.pop();
    }
}

fn reduce(
    echelon: &[(usize, Vec<Rational>, Rational)],
    row: &(Vec<Rational>, Rational),
) -> Option<(usize, Vec<Rational>, Rational)> {
    let (mut coeffs, mut rhs) = row.clone();
    for (pivot, prow, prhs) in echelon {
        let factor = coeffs[*pivot].clone();
        if factor.is_zero() {
            continue;
        }
        for (c, p) in coeffs.iter_mut().zip(prow) {
            if !p.is_zero() {
                *c -= &factor * p;
            }
        }
        rhs -= &factor * prhs;
    }
    let pivot = coeffs.iter().position(|c| !c.is_zero())?;
    let lead = coeffs[pivot].clone();
    for c in coeffs.iter_mut() {
        *c /= &lead;
    }
    rhs /= &lead;
    Some((pivot, coeffs, rhs))
}

fn back_substitute(echelon: &[(usize, Vec<Rational>, Rational)], n: usize) -> SalaryVector {
    // Each row is reduced against all earlier pivots, so solving in reverse
    // order of insertion yields the unique solution.
    let mut y: Vec<Option<Rational>> = vec![None; n];
    for (pivot, coeffs, rhs) in echelon.iter().rev() {
        let mut value = rhs.clone();
        for (k, c) in coeffs.iter().enumerate() {
            if k != *pivot && !c.is_zero() {
                value -= c * y[k].as_ref().expect("later pivots solved first");
            }
        }
        y[*pivot] = Some(value);
    }
    y.into_iter().map(|v| v.expect("full rank")).collect()
}
