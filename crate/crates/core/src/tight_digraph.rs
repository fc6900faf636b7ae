//! Tight digraphs of competitive salary vectors.
//!
//! Nodes are `0..=n`: node 0 is the fictitious worker, node `j + 1` is worker
//! `j`. Arcs are the core constraints that hold with equality.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::competitive::{ConstraintKind, CoreConstraintSystem};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TightArc {
    pub from: usize,
    pub to: usize,
    /// Kinds of the tight constraints that produced this arc.
    pub kinds: Vec<ConstraintKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightDigraph {
    node_count: usize,
    arcs: Vec<TightArc>,
}

impl TightDigraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Arcs sorted by `(from, to)`.
    pub fn arcs(&self) -> &[TightArc] {
        &self.arcs
    }

    pub fn arc_pairs(&self) -> Vec<(usize, usize)> {
        self.arcs.iter().map(|a| (a.from, a.to)).collect()
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.arcs.iter().any(|a| a.from == from && a.to == to)
    }

    fn reachable(&self, start: usize, forward: bool, undirected: bool) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for arc in &self.arcs {
                let next = if (forward || undirected) && arc.from == u {
                    Some(arc.to)
                } else if (!forward || undirected) && arc.to == u {
                    Some(arc.from)
                } else {
                    None
                };
                if let Some(v) = next {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        seen
    }

    /// Base graph connected.
    pub fn is_connected(&self) -> bool {
        self.reachable(0, true, true).into_iter().all(|s| s)
    }

    /// Every node reachable from 0 (a 0-sourced spanning tree exists).
    pub fn is_zero_sourced(&self) -> bool {
        self.reachable(0, true, false).into_iter().all(|s| s)
    }

    /// 0 reachable from every node (a 0-sinked spanning tree exists).
    pub fn is_zero_sinked(&self) -> bool {
        self.reachable(0, false, false).into_iter().all(|s| s)
    }

    /// Nodes without incoming arcs.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.node_count)
            .filter(|&v| self.arcs.iter().all(|a| a.to != v))
            .collect()
    }

    /// Nodes without outgoing arcs.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.node_count)
            .filter(|&v| self.arcs.iter().all(|a| a.from != v))
            .collect()
    }

    /// Graphviz text; arcs in sorted order, LF line endings.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tight {\n");
        for v in 0..self.node_count {
            writeln!(out, "  {v};").unwrap();
        }
        for arc in &self.arcs {
            writeln!(out, "  {} -> {};", arc.from, arc.to).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Tight digraph of `y` (original or balanced salaries) under `sys`.
pub fn build_tight_digraph(sys: &CoreConstraintSystem, y: &[Rational]) -> Result<TightDigraph> {
    let y = sys.lift(y)?;
    if !sys.contains(&y)? {
        return Err(Error::NotInCore);
    }
    let mut arcs: Vec<TightArc> = Vec::new();
    for c in sys.constraints().iter().filter(|c| c.is_tight(&y)) {
        match arcs.iter_mut().find(|a| a.from == c.from && a.to == c.to) {
            Some(arc) => {
                if !arc.kinds.contains(&c.kind) {
                    arc.kinds.push(c.kind);
                    arc.kinds.sort_unstable();
                }
            }
            None => arcs.push(TightArc {
                from: c.from,
                to: c.to,
                kinds: vec![c.kind],
            }),
        }
    }
    arcs.sort();
    Ok(TightDigraph {
        node_count: sys.worker_count() + 1,
        arcs,
    })
}

pub fn is_extreme(sys: &CoreConstraintSystem, y: &[Rational]) -> Result<bool> {
    Ok(build_tight_digraph(sys, y)?.is_connected())
}

pub fn is_minimum(sys: &CoreConstraintSystem, y: &[Rational]) -> Result<bool> {
    Ok(build_tight_digraph(sys, y)?.is_zero_sourced())
}

pub fn is_maximum(sys: &CoreConstraintSystem, y: &[Rational]) -> Result<bool> {
    Ok(build_tight_digraph(sys, y)?.is_zero_sinked())
}

pub fn to_dot(d: &TightDigraph) -> String {
    d.to_dot()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::Market;
    use crate::rational::int;

    fn sys() -> CoreConstraintSystem {
        CoreConstraintSystem::for_market(
            &Market::from_ints(&[2, 1], &[[8, 6, 3], [7, 6, 4]]).unwrap(),
        )
    }

    fn y(v: [i64; 3]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn figure_arc_sets() {
        let s = sys();
        let arcs = |v| build_tight_digraph(&s, &y(v)).unwrap().arc_pairs();
        assert_eq!(arcs([3, 2, 0]), vec![(0, 3), (3, 1), (3, 2)]);
        assert_eq!(arcs([8, 6, 4]), vec![(1, 0), (2, 0), (3, 0), (3, 2)]);
        assert_eq!(arcs([7, 6, 4]), vec![(2, 0), (3, 0), (3, 1), (3, 2)]);
        assert_eq!(arcs([3, 3, 0]), vec![(0, 3), (2, 3), (3, 1)]);
    }

    #[test]
    fn characterizations() {
        let s = sys();
        assert!(is_extreme(&s, &y([3, 3, 0])).unwrap());
        assert!(!is_extreme(&s, &y([4, 3, 1])).unwrap());
        assert!(is_minimum(&s, &y([3, 2, 0])).unwrap());
        assert!(!is_minimum(&s, &y([3, 3, 0])).unwrap());
        assert!(!is_minimum(&s, &y([8, 6, 4])).unwrap());
        assert!(is_maximum(&s, &y([8, 6, 4])).unwrap());
        assert!(!is_maximum(&s, &y([7, 6, 4])).unwrap());
        assert!(!is_maximum(&s, &y([3, 2, 0])).unwrap());
        let d = build_tight_digraph(&s, &y([3, 3, 0])).unwrap();
        assert_eq!(d.sources(), vec![0, 2]);
        let d = build_tight_digraph(&s, &y([7, 6, 4])).unwrap();
        assert_eq!(d.sinks(), vec![0, 1]);
        assert_eq!(
            build_tight_digraph(&s, &y([0, 6, 3])),
            Err(Error::NotInCore)
        );
    }

    #[test]
    fn dot_output() {
        let s = sys();
        let dot = build_tight_digraph(&s, &y([3, 2, 0])).unwrap().to_dot();
        assert_eq!(
            dot,
            "digraph tight {\n  0;\n  1;\n  2;\n  3;\n  0 -> 3;\n  3 -> 1;\n  3 -> 2;\n}\n"
        );
        let empty = TightDigraph {
            node_count: 2,
            arcs: Vec::new(),
        };
        assert_eq!(to_dot(&empty), "digraph tight {\n  0;\n  1;\n}\n");
        let dot = build_tight_digraph(&s, &y([8, 6, 4])).unwrap().to_dot();
        for arc in ["1 -> 0", "2 -> 0", "3 -> 0", "3 -> 2"] {
            assert!(dot.contains(arc));
        }
    }
}
