//! Exact solvers for many-to-one assignment markets.

pub mod competitive;
pub mod error;
pub mod game;
pub mod kaneko;
pub mod lp;
pub mod market;
pub mod matching;
pub mod maxmin;
pub mod rational;
pub mod solutions;
pub mod tight_digraph;

pub use competitive::{
    core_constraints, is_competitive_equilibrium, is_core_allocation, max_competitive_salaries,
    min_competitive_salaries, Allocation, CoreConstraintSystem, SalaryVector,
};
pub use error::{Error, Result};
pub use game::{build_game, Coalition, GameTable, PlayerOrder};
pub use kaneko::{ce_vertices, BuyerMarket};
pub use market::{balance, surplus_matrix, BalancedMarket, Firm, Market, RawMarket};
pub use matching::{
    all_optimal_matchings, coalition_value, optimal_matching, Matching, MatchingResult,
};
pub use maxmin::{enumerate_extremes, maxmin_table, maxmin_vector, ExtendedOrder, ExtremeSet};
pub use rational::Rational;
pub use solutions::{fair_division, nucleolus, shapley, tau_value};
pub use tight_digraph::{build_tight_digraph, is_extreme, is_maximum, is_minimum, TightDigraph};
