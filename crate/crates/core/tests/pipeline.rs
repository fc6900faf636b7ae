use jobmarket_core::competitive::{
    core_violation, core_violation_full, is_core_allocation, is_core_allocation_full,
    max_competitive_salaries, min_competitive_salaries,
};
use jobmarket_core::maxmin::brute_force_vertices;
use jobmarket_core::solutions::{fair_division, nucleolus, nucleolus_full};
use jobmarket_core::{
    build_game, enumerate_extremes, is_extreme, CoreConstraintSystem, Error, Market, Rational,
};
use proptest::prelude::*;

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter()
        .map(|&x| Rational::from_integer(x.into()))
        .collect()
}

#[test]
fn excess_workers_get_a_dummy_firm() {
    // Three workers, one slot.
    let m = Market::from_ints(&[1], &[[5, 3, 1]]).unwrap();
    let sys = CoreConstraintSystem::for_market(&m);
    assert_eq!(sys.worker_count(), 3);
    assert_eq!(sys.balanced().dummy_firm(), Some(1));
    // The firm can always fall back on the second worker.
    assert_eq!(min_competitive_salaries(&m), ints(&[0, 0, 0]));
    assert_eq!(max_competitive_salaries(&m), ints(&[2, 0, 0]));
    let extremes = enumerate_extremes(&sys).unwrap();
    assert_eq!(
        extremes.salaries(),
        vec![ints(&[0, 0, 0]), ints(&[2, 0, 0])]
    );
    assert_eq!(extremes.points[1].allocation.firms, ints(&[3]));
}

#[test]
fn excess_capacity_gets_dummy_workers() {
    let m = Market::from_ints(&[3, 2], &[[4, 1], [2, 3]]).unwrap();
    let sys = CoreConstraintSystem::for_market(&m);
    assert_eq!(sys.worker_count(), 5);
    assert_eq!(sys.original_worker_count(), 2);
    let extremes = enumerate_extremes(&sys).unwrap();
    assert_eq!(extremes.salaries(), brute_force_vertices(&sys).unwrap());
    // Both firms have free slots, so each worker is worth its outside offer.
    assert_eq!(min_competitive_salaries(&m), ints(&[2, 1]));
    assert_eq!(max_competitive_salaries(&m), ints(&[4, 3]));
    assert!(is_extreme(&sys, &ints(&[2, 1])).unwrap());
    assert!(!is_extreme(&sys, &ints(&[3, 2])).unwrap());
}

#[test]
fn salary_vectors_of_the_wrong_length_are_rejected() {
    let m = Market::from_ints(&[2, 1], &[[8, 6, 3], [7, 6, 4]]).unwrap();
    let sys = CoreConstraintSystem::for_market(&m);
    assert!(matches!(
        sys.contains(&ints(&[1, 2])),
        Err(Error::Dimension { .. })
    ));
}

fn market() -> impl Strategy<Value = Market> {
    (1usize..=2, 1usize..=4).prop_flat_map(|(firms, workers)| {
        (
            prop::collection::vec(1usize..=3, firms),
            prop::collection::vec(prop::collection::vec(0i64..10, workers), firms),
        )
            .prop_map(|(caps, rows)| Market::from_ints(&caps, &rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extremes_match_the_oracle_on_unbalanced_markets(m in market()) {
        let sys = CoreConstraintSystem::for_market(&m);
        prop_assume!(sys.worker_count() <= 6);
        prop_assert_eq!(enumerate_extremes(&sys).unwrap().salaries(), brute_force_vertices(&sys).unwrap());
    }

    #[test]
    fn extreme_allocations_are_core_allocations(m in market()) {
        let sys = CoreConstraintSystem::for_market(&m);
        prop_assume!(sys.worker_count() <= 6);
        let g = build_game(&m).unwrap();
        for point in enumerate_extremes(&sys).unwrap().points {
            prop_assert!(is_core_allocation_full(&g, &point.allocation).unwrap());
        }
    }

    #[test]
    fn essential_coalitions_decide_core_membership(m in market(), shift in 0i64..3) {
        let g = build_game(&m).unwrap();
        let mut z = fair_division(&m).unwrap();
        // Move `shift` from the first worker to the first firm.
        z.firms[0] += Rational::from_integer(shift.into());
        z.workers[0] -= Rational::from_integer(shift.into());
        prop_assert_eq!(is_core_allocation(&g, &z).unwrap(), is_core_allocation_full(&g, &z).unwrap());
        let essential = core_violation(&g, &z).unwrap().is_some();
        let full = core_violation_full(&g, &z).unwrap().is_some();
        prop_assert_eq!(essential, full);
    }

    #[test]
    fn nucleolus_needs_only_essential_coalitions(m in market()) {
        let g = build_game(&m).unwrap();
        prop_assert_eq!(nucleolus(&m, &g).unwrap(), nucleolus_full(&g).unwrap());
    }
}
