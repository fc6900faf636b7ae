//! Optimal matchings: exact min-cost flow, enumeration, and coalition values.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::market::{check_index, Market};
use crate::rational::Rational;

/// Default worker limit for [`all_optimal_matchings`].
pub const ALL_MATCHINGS_LIMIT: usize = 10;

/// A set of (firm, worker) pairs, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    /// Validates capacities and single assignment of workers against `m`.
    pub fn new(m: &Market, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        let mut load = vec![0usize; m.firm_count()];
        let mut taken = vec![false; m.worker_count()];
        for &(i, j) in &pairs {
            check_index("firm", i, m.firm_count())?;
            check_index("worker", j, m.worker_count())?;
            if taken[j] {
                return Err(Error::InvalidMatching(format!(
                    "worker {} assigned twice",
                    m.workers()[j]
                )));
            }
            taken[j] = true;
            load[i] += 1;
            if load[i] > m.capacity(i) {
                return Err(Error::InvalidMatching(format!(
                    "firm {} exceeds capacity {}",
                    m.firms()[i].id,
                    m.capacity(i)
                )));
            }
        }
        Ok(Matching { pairs })
    }

    pub(crate) fn from_sorted(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Matching { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, firm: usize, worker: usize) -> bool {
        self.pairs.binary_search(&(firm, worker)).is_ok()
    }

    /// `j^μ`, the firm worker `j` is matched to.
    pub fn firm_of(&self, worker: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == worker).map(|p| p.0)
    }

    /// `μ(i)` in increasing worker order.
    pub fn workers_of(&self, firm: usize) -> Vec<usize> {
        self.pairs
            .iter()
            .filter(|p| p.0 == firm)
            .map(|p| p.1)
            .collect()
    }

    pub fn value(&self, m: &Market) -> Rational {
        self.pairs
            .iter()
            .map(|&(i, j)| m.surplus(i, j))
            .fold(Rational::zero(), |acc, a| acc + a)
    }

    /// Workers' firms as a dense vector.
    pub fn assignment(&self, worker_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; worker_count];
        for &(i, j) in &self.pairs {
            out[j] = Some(i);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingResult {
    pub matching: Matching,
    pub value: Rational,
    /// Set when the matching was produced by the exact solver.
    pub optimal: bool,
}

/// Assignment instance: surplus rows, firm capacities and forbidden pairs.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub rows: Vec<Vec<Rational>>,
    pub caps: Vec<usize>,
    pub forbidden: Vec<Vec<bool>>,
}

impl Instance {
    pub fn of(m: &Market) -> Self {
        Instance {
            rows: m.matrix().to_vec(),
            caps: m.capacities(),
            forbidden: vec![vec![false; m.worker_count()]; m.firm_count()],
        }
    }

    fn cols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Maximum total surplus and one matching attaining it.
    pub fn solve(&self) -> (Rational, Vec<(usize, usize)>) {
        max_weight_flow(self)
    }

    pub fn value(&self) -> Rational {
        self.solve().0
    }
}

struct Edge {
    to: usize,
    cap: usize,
    cost: Rational,
}

/// Successive shortest paths with Dijkstra on reduced costs. Augmentation
/// stops as soon as the cheapest path no longer decreases the cost.
fn max_weight_flow(inst: &Instance) -> (Rational, Vec<(usize, usize)>) {
    let m = inst.rows.len();
    let n = inst.cols();
    let source = 0;
    let sink = m + n + 1;
    let nodes = m + n + 2;
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut add = |edges: &mut Vec<Edge>, u: usize, v: usize, cap: usize, cost: Rational| {
        adj[u].push(edges.len());
        edges.push(Edge {
            to: v,
            cap,
            cost: cost.clone(),
        });
        adj[v].push(edges.len());
        edges.push(Edge {
            to: u,
            cap: 0,
            cost: -cost,
        });
    };
    for (i, &cap) in inst.caps.iter().enumerate() {
        add(&mut edges, source, 1 + i, cap, Rational::zero());
    }
    let mut pair_edges = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if !inst.forbidden[i][j] {
                pair_edges.push((edges.len(), i, j));
                add(&mut edges, 1 + i, 1 + m + j, 1, -&inst.rows[i][j]);
            }
        }
    }
    for j in 0..n {
        add(&mut edges, 1 + m + j, sink, 1, Rational::zero());
    }

    // Initial potentials: shortest distances in the (acyclic) initial network.
    let mut potential: Vec<Option<Rational>> = vec![None; nodes];
    potential[source] = Some(Rational::zero());
    for _ in 0..nodes {
        let mut changed = false;
        for u in 0..nodes {
            let Some(pu) = potential[u].clone() else {
                continue;
            };
            for &e in &adj[u] {
                let edge = &edges[e];
                if edge.cap == 0 {
                    continue;
                }
                let cand = &pu + &edge.cost;
                if potential[edge.to].as_ref().map_or(true, |pv| cand < *pv) {
                    potential[edge.to] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    loop {
        let mut dist: Vec<Option<Rational>> = vec![None; nodes];
        let mut prev_edge: Vec<Option<usize>> = vec![None; nodes];
        let mut done = vec![false; nodes];
        dist[source] = Some(Rational::zero());
        loop {
            let mut best: Option<usize> = None;
            for v in 0..nodes {
                if done[v] {
                    continue;
                }
                if let Some(dv) = &dist[v] {
                    if best.map_or(true, |b| dist[b].as_ref().is_some_and(|db| dv < db)) {
                        best = Some(v);
                    }
                }
            }
            let Some(u) = best else { break };
            done[u] = true;
            let du = dist[u].clone().expect("settled node has a distance");
            let pu = potential[u]
                .clone()
                .expect("reachable node has a potential");
            for &e in &adj[u] {
                let edge = &edges[e];
                if edge.cap == 0 || done[edge.to] {
                    continue;
                }
                let pv = potential[edge.to]
                    .as_ref()
                    .expect("residual arc leads to a reachable node");
                let cand = &du + &edge.cost + &pu - pv;
                if dist[edge.to].as_ref().map_or(true, |d| cand < *d) {
                    dist[edge.to] = Some(cand);
                    prev_edge[edge.to] = Some(e);
                }
            }
        }
        let Some(dt) = dist[sink].clone() else { break };
        let path_cost =
            &dt + potential[sink].as_ref().unwrap() - potential[source].as_ref().unwrap();
        if !path_cost.is_negative() {
            break;
        }
        for v in 0..nodes {
            if let (Some(d), Some(p)) = (&dist[v], &mut potential[v]) {
                *p += d;
            }
        }
        let mut v = sink;
        while let Some(e) = prev_edge[v] {
            edges[e].cap -= 1;
            edges[e ^ 1].cap += 1;
            v = edges[e ^ 1].to;
        }
    }

    let mut value = Rational::zero();
    let mut pairs = Vec::new();
    for (e, i, j) in pair_edges {
        if edges[e].cap == 0 {
            value += &inst.rows[i][j];
            pairs.push((i, j));
        }
    }
    (value, pairs)
}

/// Value of the best completion once `forced` pairs are fixed and `excluded`
/// pairs are forbidden; `None` if the forced pairs are themselves infeasible.
fn constrained_value(
    base: &Instance,
    forced: &[(usize, usize)],
    excluded: &[(usize, usize)],
) -> Option<Rational> {
    let mut inst = base.clone();
    let mut fixed = Rational::zero();
    for &(i, j) in excluded {
        inst.forbidden[i][j] = true;
    }
    for &(i, j) in forced {
        if inst.caps[i] == 0 || inst.forbidden[i][j] {
            return None;
        }
        inst.caps[i] -= 1;
        fixed += &inst.rows[i][j];
        for row in inst.forbidden.iter_mut() {
            row[j] = true;
        }
    }
    Some(fixed + inst.value())
}

/// Optimal matching; among optimal matchings the lexicographically smallest
/// sorted pair list is returned.
pub fn optimal_matching(m: &Market) -> MatchingResult {
    let inst = Instance::of(m);
    let optimum = inst.value();
    let mut forced: Vec<(usize, usize)> = Vec::new();
    let mut excluded: Vec<(usize, usize)> = Vec::new();
    for i in 0..m.firm_count() {
        for j in 0..m.worker_count() {
            if forced.iter().any(|p| p.1 == j)
                || forced.iter().filter(|p| p.0 == i).count() == m.capacity(i)
            {
                continue;
            }
            forced.push((i, j));
            if constrained_value(&inst, &forced, &excluded).as_ref() != Some(&optimum) {
                forced.pop();
                excluded.push((i, j));
            }
        }
    }
    MatchingResult {
        matching: Matching::from_sorted(forced),
        value: optimum,
        optimal: true,
    }
}

/// Maximum matching value, without constructing the tie-broken matching.
pub fn optimal_value(m: &Market) -> Rational {
    Instance::of(m).value()
}

/// Checks that `mu` is feasible for `m` and attains the optimum.
pub fn ensure_optimal(m: &Market, mu: &Matching) -> Result<()> {
    Matching::new(m, mu.pairs().to_vec())?;
    let found = mu.value(m);
    let optimum = optimal_value(m);
    if found != optimum {
        return Err(Error::NotOptimal {
            found: Box::new(found),
            optimum: Box::new(optimum),
        });
    }
    Ok(())
}

/// All maximal optimal matchings (no pair can be added), sorted.
pub fn all_optimal_matchings(m: &Market) -> Result<Vec<Matching>> {
    all_optimal_matchings_with_limit(m, ALL_MATCHINGS_LIMIT)
}

pub fn all_optimal_matchings_with_limit(m: &Market, limit: usize) -> Result<Vec<Matching>> {
    if m.worker_count() > limit {
        return Err(Error::LimitExceeded {
            what: "workers for matching enumeration",
            size: m.worker_count(),
            limit,
        });
    }
    let inst = Instance::of(m);
    let optimum = inst.value();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut load = vec![0usize; m.firm_count()];
    enumerate(&inst, &optimum, 0, &mut chosen, &mut load, &mut out);
    out.sort();
    Ok(out)
}

fn enumerate(
    inst: &Instance,
    optimum: &Rational,
    worker: usize,
    chosen: &mut Vec<(usize, usize)>,
    load: &mut Vec<usize>,
    out: &mut Vec<Matching>,
) {
    let n = inst.cols();
    if worker == n {
        let spare = load.iter().zip(&inst.caps).any(|(l, c)| l < c);
        let idle = (0..n).any(|j| chosen.iter().all(|p| p.1 != j));
        if !(spare && idle) {
            out.push(Matching::from_sorted(chosen.clone()));
        }
        return;
    }
    // Branch: worker assigned to each firm in turn, then left unassigned.
    for i in 0..=inst.rows.len() {
        if i < inst.rows.len() {
            if load[i] == inst.caps[i] {
                continue;
            }
            chosen.push((i, worker));
            load[i] += 1;
        }
        if completion_bound(inst, chosen, load, worker + 1) == *optimum {
            enumerate(inst, optimum, worker + 1, chosen, load, out);
        }
        if i < inst.rows.len() {
            chosen.pop();
            load[i] -= 1;
        }
    }
}

fn completion_bound(
    inst: &Instance,
    chosen: &[(usize, usize)],
    load: &[usize],
    next_worker: usize,
) -> Rational {
    let fixed = chosen
        .iter()
        .fold(Rational::zero(), |acc, &(i, j)| acc + &inst.rows[i][j]);
    let rest = Instance {
        rows: inst
            .rows
            .iter()
            .map(|r| r[next_worker..].to_vec())
            .collect(),
        caps: inst.caps.iter().zip(load).map(|(c, l)| c - l).collect(),
        forbidden: inst
            .forbidden
            .iter()
            .map(|r| r[next_worker..].to_vec())
            .collect(),
    };
    fixed + rest.value()
}

/// `v(S ∪ T)`: the optimal value of the submarket on firms `S`, workers `T`.
pub fn coalition_value(m: &Market, firms: &[usize], workers: &[usize]) -> Result<Rational> {
    Ok(optimal_value(&m.restrict(firms, workers)?))
}

/// Memoized coalition values keyed by (firm mask, worker mask).
#[derive(Debug)]
pub struct CoalitionValues<'a> {
    market: &'a Market,
    memo: Mutex<HashMap<(u64, u64), Rational>>,
}

impl<'a> CoalitionValues<'a> {
    pub fn new(market: &'a Market) -> Result<Self> {
        let size = market.firm_count().max(market.worker_count());
        if size > 64 {
            return Err(Error::LimitExceeded {
                what: "agents per side for coalition masks",
                size,
                limit: 64,
            });
        }
        Ok(CoalitionValues {
            market,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn market(&self) -> &Market {
        self.market
    }

    pub fn value(&self, firm_mask: u64, worker_mask: u64) -> Rational {
        if firm_mask == 0 || worker_mask == 0 {
            return Rational::zero();
        }
        if let Some(v) = self.memo.lock().unwrap().get(&(firm_mask, worker_mask)) {
            return v.clone();
        }
        let firms = bits(firm_mask);
        let workers = bits(worker_mask);
        let value = optimal_value(
            &self
                .market
                .restrict(&firms, &workers)
                .expect("masks are within the market"),
        );
        self.memo
            .lock()
            .unwrap()
            .insert((firm_mask, worker_mask), value.clone());
        value
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }
}

pub(crate) fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn example1() -> Market {
        Market::from_ints(&[2, 1], &[[8, 6, 3], [7, 6, 4]]).unwrap()
    }

    fn example2() -> Market {
        Market::from_ints(&[2, 2], &[[1, 1, 1], [1, 1, 1]]).unwrap()
    }

    /// Every capacity-feasible matching, by assigning each worker a firm or none.
    fn all_feasible(m: &Market) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new()];
        for j in 0..m.worker_count() {
            let mut next = Vec::new();
            for partial in out {
                next.push(partial.clone());
                for i in 0..m.firm_count() {
                    let load = partial
                        .iter()
                        .filter(|p: &&(usize, usize)| p.0 == i)
                        .count();
                    if load < m.capacity(i) {
                        let mut p = partial.clone();
                        p.push((i, j));
                        next.push(p);
                    }
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn example1_unique_optimum() {
        let m = example1();
        let res = optimal_matching(&m);
        assert_eq!(res.value, int(18));
        assert_eq!(res.matching.pairs(), &[(0, 0), (0, 1), (1, 2)]);
        assert_eq!(all_optimal_matchings(&m).unwrap(), vec![res.matching]);
    }

    #[test]
    fn example2_matchings() {
        let m = example2();
        let res = optimal_matching(&m);
        assert_eq!(res.value, int(3));
        assert_eq!(res.matching.pairs(), &[(0, 0), (0, 1), (1, 2)]);
        let all = all_optimal_matchings(&m).unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|mu| mu.len() == 3 && mu.value(&m) == int(3)));
    }

    #[test]
    fn trivial_markets() {
        let m = Market::from_ints(&[1], &[[5]]).unwrap();
        assert_eq!(all_optimal_matchings(&m).unwrap().len(), 1);
        let z = Market::from_ints(&[2, 1], &[[0, 0, 0], [0, 0, 0]]).unwrap();
        let res = optimal_matching(&z);
        assert_eq!(res.value, int(0));
        assert_eq!(res.matching.len(), 3);
    }

    #[test]
    fn coalition_values() {
        let m = example1();
        assert_eq!(coalition_value(&m, &[0], &[0, 2]).unwrap(), int(11));
        assert_eq!(coalition_value(&m, &[0, 1], &[]).unwrap(), int(0));
        let a = Market::from_ints(&[2, 1], &[[4, 3], [3, 2]]).unwrap();
        assert_eq!(coalition_value(&a, &[0], &[0, 1]).unwrap(), int(7));
        let cache = CoalitionValues::new(&m).unwrap();
        assert_eq!(cache.value(0b01, 0b101), int(11));
        assert_eq!(cache.value(0b01, 0b101), int(11));
        assert_eq!(cache.memo_len(), 1);
    }

    #[test]
    fn rejects_invalid_matchings() {
        let m = example1();
        assert!(Matching::new(&m, vec![(0, 0), (1, 0)]).is_err());
        assert!(Matching::new(&m, vec![(1, 0), (1, 1)]).is_err());
        let suboptimal = Matching::new(&m, vec![(0, 0), (0, 2), (1, 1)]).unwrap();
        assert!(matches!(
            ensure_optimal(&m, &suboptimal),
            Err(Error::NotOptimal { .. })
        ));
    }

    #[test]
    fn enumeration_limit() {
        let m = Market::from_ints(&[11], &[[1; 11]]).unwrap();
        assert!(matches!(
            all_optimal_matchings(&m),
            Err(Error::LimitExceeded { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn market() -> impl Strategy<Value = Market> {
            (1usize..=3, 1usize..=5).prop_flat_map(|(firms, workers)| {
                (
                    prop::collection::vec(1usize..=3, firms),
                    prop::collection::vec(prop::collection::vec(0i64..8, workers), firms),
                )
                    .prop_map(|(caps, rows)| Market::from_ints(&caps, &rows).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn flow_matches_exhaustive(m in market()) {
                let feasible = all_feasible(&m);
                let best = feasible
                    .iter()
                    .map(|p| p.iter().fold(Rational::zero(), |a, &(i, j)| a + m.surplus(i, j)))
                    .max()
                    .unwrap();
                let res = optimal_matching(&m);
                prop_assert_eq!(&res.value, &best);
                prop_assert_eq!(res.matching.value(&m), best.clone());

                // Enumeration equals the maximal optimal matchings found exhaustively.
                let mut expected: Vec<Matching> = feasible
                    .into_iter()
                    .map(Matching::from_sorted)
                    .filter(|mu| mu.value(&m) == best)
                    .filter(|mu| {
                        let spare = (0..m.firm_count())
                            .any(|i| mu.workers_of(i).len() < m.capacity(i));
                        let idle = (0..m.worker_count()).any(|j| mu.firm_of(j).is_none());
                        !(spare && idle)
                    })
                    .collect();
                expected.sort();
                let all = all_optimal_matchings(&m).unwrap();
                prop_assert!(all.contains(&res.matching));
                prop_assert_eq!(all, expected);
            }

            #[test]
            fn superadditive(m in market(), s in any::<u64>(), t in any::<u64>()) {
                let cache = CoalitionValues::new(&m).unwrap();
                let fm = (1u64 << m.firm_count()) - 1;
                let wm = (1u64 << m.worker_count()) - 1;
                let (s1, t1) = (s & fm, t & wm);
                let (s2, t2) = (!s & fm, !t & wm);
                let whole = cache.value(fm, wm);
                prop_assert!(whole >= cache.value(s1, t1) + cache.value(s2, t2));
            }

            #[test]
            fn balanced_markets_saturate(rows in prop::collection::vec(prop::collection::vec(0i64..6, 4), 2)) {
                let m = Market::from_ints(&[3, 1], &rows).unwrap();
                for mu in all_optimal_matchings(&m).unwrap() {
                    prop_assert_eq!(mu.workers_of(0).len(), 3);
                    prop_assert_eq!(mu.workers_of(1).len(), 1);
                }
            }
        }
    }
}
