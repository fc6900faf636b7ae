//! Explicit coalitional games built from markets.
//!
//! Players are indexed firms first, then workers; a coalition is a bitmask
//! over that index.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market::Market;
use crate::matching::optimal_value;
use crate::rational::Rational;

pub type Coalition = u64;

/// Default player limit for [`build_game`].
pub const GAME_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GameTable {
    names: Vec<String>,
    firm_count: usize,
    capacities: Vec<usize>,
    values: Vec<Rational>,
}

impl GameTable {
    /// Wraps an explicit value table; `values[S]` is `v(S)` for bitmask `S`.
    pub fn from_values(
        names: Vec<String>,
        firm_count: usize,
        capacities: Vec<usize>,
        values: Vec<Rational>,
    ) -> Result<Self> {
        let players = names.len();
        if players > GAME_LIMIT {
            return Err(Error::LimitExceeded {
                what: "players",
                size: players,
                limit: GAME_LIMIT,
            });
        }
        if values.len() != 1 << players {
            return Err(Error::Dimension {
                expected: 1 << players,
                found: values.len(),
            });
        }
        if capacities.len() != firm_count || firm_count > players {
            return Err(Error::Dimension {
                expected: firm_count,
                found: capacities.len(),
            });
        }
        Ok(GameTable {
            names,
            firm_count,
            capacities,
            values,
        })
    }

    pub fn player_count(&self) -> usize {
        self.names.len()
    }

    pub fn firm_count(&self) -> usize {
        self.firm_count
    }

    pub fn worker_count(&self) -> usize {
        self.names.len() - self.firm_count
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn is_firm(&self, player: usize) -> bool {
        player < self.firm_count
    }

    pub fn grand(&self) -> Coalition {
        (1 << self.player_count()) - 1
    }

    pub fn value(&self, s: Coalition) -> &Rational {
        &self.values[s as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Player index of worker `j`.
    pub fn worker(&self, j: usize) -> usize {
        self.firm_count + j
    }

    pub fn coalition(&self, firms: &[usize], workers: &[usize]) -> Coalition {
        firms
            .iter()
            .map(|&i| 1 << i)
            .chain(workers.iter().map(|&j| 1 << (self.firm_count + j)))
            .fold(0, |acc, b| acc | b)
    }

    /// `z(S)`.
    pub fn sum(&self, payoff: &[Rational], s: Coalition) -> Rational {
        members(s).fold(Rational::zero(), |acc, p| acc + &payoff[p])
    }

    /// `e(S, z) = v(S) − z(S)`.
    pub fn excess(&self, payoff: &[Rational], s: Coalition) -> Rational {
        self.value(s) - self.sum(payoff, s)
    }

    /// Renders a coalition as `{f1,w3}` using player names.
    pub fn describe(&self, s: Coalition) -> String {
        let names: Vec<&str> = members(s).map(|p| self.names[p].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

pub(crate) fn members(s: Coalition) -> impl Iterator<Item = usize> {
    (0..64).filter(move |b| s >> b & 1 == 1)
}

pub fn build_game(m: &Market) -> Result<GameTable> {
    build_game_with_limit(m, GAME_LIMIT)
}

pub fn build_game_with_limit(m: &Market, limit: usize) -> Result<GameTable> {
    let firms = m.firm_count();
    let players = firms + m.worker_count();
    let limit = limit.min(GAME_LIMIT);
    if players > limit {
        return Err(Error::LimitExceeded {
            what: "players",
            size: players,
            limit,
        });
    }
    let firm_mask: Coalition = (1 << firms) - 1;
    let values: Vec<Rational> = (0..1u64 << players)
        .into_par_iter()
        .map(|s| {
            let f: Vec<usize> = members(s & firm_mask).collect();
            let w: Vec<usize> = members(s >> firms).collect();
            if f.is_empty() || w.is_empty() {
                Rational::zero()
            } else {
                optimal_value(&m.restrict(&f, &w).expect("coalition within market"))
            }
        })
        .collect();
    let names = m
        .firms()
        .iter()
        .map(|f| f.id.clone())
        .chain(m.workers().iter().cloned())
        .collect();
    GameTable::from_values(names, firms, m.capacities(), values)
}

/// `v*(S) = v(N) − v(N \ S)`.
pub fn dual_value(g: &GameTable, s: Coalition) -> Rational {
    let n = g.grand();
    g.value(n) - g.value(n & !s)
}

/// Singletons plus every `{i} ∪ T` with one firm `i` and `1 ≤ |T| ≤ r_i`,
/// sorted by bitmask.
pub fn essential_candidates(m: &Market) -> Vec<Coalition> {
    candidates(m.firm_count(), m.worker_count(), &m.capacities())
}

pub fn essential_candidates_of(g: &GameTable) -> Vec<Coalition> {
    candidates(g.firm_count(), g.worker_count(), g.capacities())
}

fn candidates(firms: usize, workers: usize, caps: &[usize]) -> Vec<Coalition> {
    let mut out: Vec<Coalition> = (0..firms + workers).map(|p| 1 << p).collect();
    for (i, &cap) in caps.iter().enumerate() {
        for t in 1u64..1 << workers {
            let size = t.count_ones() as usize;
            if size <= cap {
                out.push(1 << i | t << firms);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// True iff some split `S = T ∪ U` has `v(S) ≤ v(T) + v(U)`.
pub fn is_inessential(g: &GameTable, s: Coalition) -> bool {
    let low = s & s.wrapping_neg();
    let rest = s & !low;
    // Enumerate T as `low` plus a proper subset of the remaining members.
    let mut sub = rest;
    loop {
        let t = low | sub;
        if t != s && g.value(s) <= &(g.value(t) + g.value(s & !t)) {
            return true;
        }
        if sub == 0 {
            return false;
        }
        sub = (sub - 1) & rest;
    }
}

/// A permutation of the players, first to last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerOrder(Vec<usize>);

impl PlayerOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &p in &order {
            if p >= order.len() || seen[p] {
                return Err(Error::InvalidOrder(format!(
                    "{order:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        Ok(PlayerOrder(order))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// All orders of `n` players in lexicographic order.
    pub fn all(n: usize) -> Vec<PlayerOrder> {
        permutations(n).into_iter().map(PlayerOrder).collect()
    }
}

/// Permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(k) = (1..n).rev().find(|&k| current[k - 1] < current[k]) else {
            return out;
        };
        let k = k - 1;
        let l = (k + 1..n).rev().find(|&l| current[k] < current[l]).unwrap();
        current.swap(k, l);
        current[k + 1..].reverse();
        out.push(current.clone());
    }
}

fn check_order(g: &GameTable, order: &PlayerOrder) -> Result<()> {
    if order.0.len() == g.player_count() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: g.player_count(),
            found: order.0.len(),
        })
    }
}

/// Marginal contributions along `order`, indexed by player.
pub fn marginal_vector(g: &GameTable, order: &PlayerOrder) -> Result<Vec<Rational>> {
    check_order(g, order)?;
    let mut out = vec![Rational::zero(); g.player_count()];
    let mut before: Coalition = 0;
    for &p in &order.0 {
        let with = before | 1 << p;
        out[p] = g.value(with) - g.value(before);
        before = with;
    }
    Ok(out)
}

/// Lemaral vector: `r̄_σi = min over Q ⊆ P_σi of v*(Q ∪ {σi}) − r̄(Q)`,
/// indexed by player.
pub fn lemaral_vector(g: &GameTable, order: &PlayerOrder) -> Result<Vec<Rational>> {
    check_order(g, order)?;
    let mut out = vec![Rational::zero(); g.player_count()];
    let mut before: Coalition = 0;
    for &p in &order.0 {
        let mut best: Option<Rational> = None;
        let mut q = before;
        loop {
            let cand = dual_value(g, q | 1 << p) - g.sum(&out, q);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
            if q == 0 {
                break;
            }
            q = (q - 1) & before;
        }
        out[p] = best.expect("at least the empty predecessor set");
        before |= 1 << p;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn two_firm_game() -> GameTable {
        build_game(&Market::from_ints(&[2, 1], &[[4, 3], [3, 2]]).unwrap()).unwrap()
    }

    #[test]
    fn two_firm_values_and_duals() {
        let g = two_firm_game();
        assert_eq!(g.value(g.coalition(&[0], &[0, 1])), &int(7));
        assert_eq!(g.value(g.grand()), &int(7));
        assert_eq!(dual_value(&g, g.coalition(&[0], &[])), int(4));
        assert_eq!(dual_value(&g, g.coalition(&[0, 1], &[])), int(7));
        assert_eq!(dual_value(&g, g.coalition(&[], &[1])), int(3));
        assert_eq!(dual_value(&g, 0), int(0));
        assert_eq!(dual_value(&g, g.grand()), int(7));
    }

    #[test]
    fn example2_values() {
        let g = build_game(&Market::from_ints(&[2, 2], &[[1, 1, 1], [1, 1, 1]]).unwrap()).unwrap();
        assert_eq!(g.value(g.coalition(&[0], &[0, 1])), &int(2));
        assert_eq!(g.value(g.grand()), &int(3));
    }

    #[test]
    fn candidate_counts() {
        let m = Market::from_ints(&[2, 1], &[[8, 6, 3], [7, 6, 4]]).unwrap();
        assert_eq!(essential_candidates(&m).len(), 14);
        let single = Market::from_ints(&[1], &[[5]]).unwrap();
        assert_eq!(essential_candidates(&single), vec![0b01, 0b10, 0b11]);
    }

    #[test]
    fn inessential_coalitions() {
        let m = Market::from_ints(&[2, 1], &[[8, 6, 3], [7, 6, 4]]).unwrap();
        let g = build_game(&m).unwrap();
        assert!(is_inessential(&g, g.coalition(&[0, 1], &[0])));
        assert!(!is_inessential(&g, g.coalition(&[], &[2])));
        assert!(is_inessential(&g, g.coalition(&[1], &[0, 2])));
        let cands = essential_candidates(&m);
        for s in 1..=g.grand() {
            if !is_inessential(&g, s) {
                assert!(cands.contains(&s), "{}", g.describe(s));
            }
        }
    }

    #[test]
    fn lemaral_examples() {
        let g = two_firm_game();
        let order = PlayerOrder::new(vec![1, 0, 2, 3]).unwrap();
        let r = lemaral_vector(&g, &order).unwrap();
        assert_eq!(r[1], int(0));
        assert_eq!(r[0], int(4));
        let order = PlayerOrder::new(vec![1, 2, 0, 3]).unwrap();
        assert_eq!(lemaral_vector(&g, &order).unwrap()[2], int(4));
    }

    #[test]
    fn marginal_vectors_are_efficient() {
        let g = two_firm_game();
        for order in PlayerOrder::all(4) {
            let mv = marginal_vector(&g, &order).unwrap();
            assert_eq!(g.sum(&mv, g.grand()), int(7));
            if order.as_slice()[3] == 0 {
                assert_eq!(mv[0], int(4));
            }
        }
        assert_eq!(PlayerOrder::all(4).len(), 24);
        assert!(PlayerOrder::new(vec![0, 0]).is_err());
    }

    #[test]
    fn zero_game() {
        let g = build_game(&Market::from_ints(&[1, 1], &[[0, 0], [0, 0]]).unwrap()).unwrap();
        assert!(g.values().iter().all(Zero::is_zero));
        let order = PlayerOrder::new(vec![3, 1, 0, 2]).unwrap();
        assert!(marginal_vector(&g, &order)
            .unwrap()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn limit() {
        let m = Market::from_ints(&[16], &[[1; 16]]).unwrap();
        assert!(matches!(build_game(&m), Err(Error::LimitExceeded { .. })));
    }
}
