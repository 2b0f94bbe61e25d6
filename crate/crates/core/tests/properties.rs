//! Property tests for the engine, stepper and predicates over random
//! well-formed ensembles.

use dpss_core::ensemble::{reflect, wf_ensemble, Direction, Ensemble, UavState};
use dpss_core::event::{
    always_smallest_min_time_to_impending_impact, event_for_uav, events, flip_on_events, impending_impact_event_for_uav,
    min_time_to_impact_for_uav,
};
use dpss_core::invariants::{
    all_contained_p, all_have_met_p, have_met_left_p, have_met_right_p, left_synchronized_p, right_synchronized_p,
};
use dpss_core::scenario::{emit_scenario, parse_scenario};
use dpss_core::stepper::{step_time_default, update_location_all};
use dpss_core::{average, Scalar, Simulator};
use proptest::prelude::*;

const PERIMETERS: [(i64, i64); 4] = [(1, 1), (2, 1), (7, 3), (10, 1)];

/// Locations on a coarse grid of the perimeter so that co-locations and
/// boundary placements are common.
fn arb_ensemble(max_n: usize) -> impl Strategy<Value = Ensemble> {
    (1..=max_n, 0..PERIMETERS.len(), prop::sample::select(vec![2i64, 3, 4, 6, 8, 12]))
        .prop_flat_map(|(n, p, grid)| {
            let slots = prop::collection::vec((0..=grid * n as i64, any::<bool>()), n);
            (Just(p), Just(grid * n as i64), slots)
        })
        .prop_map(|(p, steps, mut slots)| {
            let (pn, pd) = PERIMETERS[p];
            let perimeter = Scalar::ratio(pn, pd);
            slots.sort_by_key(|(k, _)| *k);
            let states = slots.into_iter().map(|(k, right)| {
                let loc = &perimeter * Scalar::ratio(k, steps);
                (loc, if right { Direction::Right } else { Direction::Left })
            });
            Ensemble::from_states(perimeter.clone(), states).unwrap()
        })
}

fn arb_time() -> impl Strategy<Value = Scalar> {
    (0i64..=96, prop::sample::select(vec![1i64, 2, 3, 4, 8, 16])).prop_map(|(k, d)| Scalar::ratio(k, d))
}

/// Right predicates transcribed by hand, as mirror images of the left ones.
fn have_met_right_by_hand(i: usize, ens: &Ensemble) -> bool {
    let me = ens.uav(i);
    if i == 0 || me.direction != Direction::Right {
        return true;
    }
    let left = ens.uav(i - 1);
    let lo = ens.uav_left_boundary(i);
    let hi = ens.uav_right_boundary(i);
    let loc = &me.location;
    if *loc < lo && !(left.direction == Direction::Right && *loc == left.location) {
        return false;
    }
    if lo <= *loc && *loc < hi {
        if *loc > lo && left.direction != Direction::Left {
            return false;
        }
        if average(loc, &left.location) != lo {
            return false;
        }
    }
    true
}

fn right_synchronized_by_hand(j: usize, ens: &Ensemble) -> bool {
    let n = ens.count();
    if j + 1 >= n {
        return true;
    }
    let me = ens.uav(j);
    let right = ens.uav(j + 1);
    if ens.uav_right_boundary(j) < average(&me.location, &right.location) {
        return false;
    }
    if me.direction == Direction::Right && me.location != right.location {
        return right.direction == Direction::Left;
    }
    true
}

/// Replaces every UAV more than one index away from `i` by a copy of its
/// nearest kept neighbour pushed to the far end, keeping the ensemble sorted.
fn scramble_far_uavs(i: usize, ens: &Ensemble, seed: u64) -> Ensemble {
    let n = ens.count();
    let lo_keep = i.saturating_sub(1);
    let hi_keep = (i + 1).min(n - 1);
    let uavs = (0..n)
        .map(|k| {
            let u = ens.uav(k);
            let flip = (seed >> (k % 64)) & 1 == 1;
            let direction = if flip { -u.direction } else { u.direction };
            let location = if k < lo_keep {
                Scalar::zero()
            } else if k > hi_keep {
                ens.perimeter().clone()
            } else {
                u.location.clone()
            };
            if (lo_keep..=hi_keep).contains(&k) {
                u.clone()
            } else {
                UavState::new(k, location, direction)
            }
        })
        .collect();
    Ensemble::new(ens.perimeter().clone(), uavs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scenario_round_trip(ens in arb_ensemble(7)) {
        let text = emit_scenario(&ens);
        prop_assert_eq!(parse_scenario(text.as_bytes()).unwrap().into_ensemble(), ens);
    }

    #[test]
    fn reflection_is_an_involution(ens in arb_ensemble(7)) {
        let mirrored = reflect(&ens);
        prop_assert!(wf_ensemble(&mirrored));
        prop_assert_eq!(reflect(&mirrored), ens);
    }

    #[test]
    fn flips_leave_no_events_and_keep_locations(ens in arb_ensemble(7)) {
        let flipped = flip_on_events(&ens);
        prop_assert!(events(&flipped).is_empty());
        prop_assert!(wf_ensemble(&flipped));
        prop_assert!(flipped.locations().eq(ens.locations()));
    }

    #[test]
    fn some_uav_always_has_an_impending_impact(ens in arb_ensemble(7)) {
        prop_assert!((0..ens.count()).any(|i| impending_impact_event_for_uav(i, &ens)));
        let quiet = flip_on_events(&ens);
        prop_assert!(always_smallest_min_time_to_impending_impact(&quiet).unwrap().is_positive());
    }

    #[test]
    fn next_event_lands_exactly(ens in arb_ensemble(7)) {
        let quiet = flip_on_events(&ens);
        let t = always_smallest_min_time_to_impending_impact(&quiet).unwrap();
        let at = update_location_all(&t, &quiet).unwrap();
        prop_assert!(!events(&at).is_empty(), "no event at {} from {}", t, quiet);
        let half = update_location_all(&(&t / Scalar::from_integer(2)), &quiet).unwrap();
        prop_assert!(events(&half).is_empty());
    }

    #[test]
    fn impact_time_names_an_event_nearby(ens in arb_ensemble(7)) {
        // if i's impact is the earliest, the event lands on i or a neighbour
        let quiet = flip_on_events(&ens);
        let t = always_smallest_min_time_to_impending_impact(&quiet).unwrap();
        let at = update_location_all(&t, &quiet).unwrap();
        let fired = events(&at);
        for i in 0..quiet.count() {
            if min_time_to_impact_for_uav(i, &quiet).as_ref() == Some(&t) {
                prop_assert!(fired.iter().any(|&j| j + 1 >= i && j <= i + 1), "UAV {} at {}: {:?}", i, t, fired);
            }
        }
    }

    #[test]
    fn engine_is_local(ens in arb_ensemble(7), seed in any::<u64>()) {
        for i in 0..ens.count() {
            let other = scramble_far_uavs(i, &ens, seed);
            prop_assert_eq!(event_for_uav(i, &ens), event_for_uav(i, &other));
            prop_assert_eq!(min_time_to_impact_for_uav(i, &ens), min_time_to_impact_for_uav(i, &other));
        }
    }

    #[test]
    fn engine_commutes_with_reflection(ens in arb_ensemble(7)) {
        let mirrored = reflect(&ens);
        let n = ens.count();
        for i in 0..n {
            prop_assert_eq!(event_for_uav(i, &ens), event_for_uav(n - 1 - i, &mirrored));
            prop_assert_eq!(
                impending_impact_event_for_uav(i, &ens),
                impending_impact_event_for_uav(n - 1 - i, &mirrored)
            );
            prop_assert_eq!(min_time_to_impact_for_uav(i, &ens), min_time_to_impact_for_uav(n - 1 - i, &mirrored));
        }
    }

    #[test]
    fn right_predicates_match_hand_mirror(ens in arb_ensemble(7)) {
        for i in 0..ens.count() {
            prop_assert_eq!(have_met_right_p(i, &ens), have_met_right_by_hand(i, &ens));
            prop_assert_eq!(right_synchronized_p(i, &ens), right_synchronized_by_hand(i, &ens));
        }
    }

    #[test]
    fn edge_predicates_are_vacuous(ens in arb_ensemble(7)) {
        let n = ens.count();
        prop_assert!(left_synchronized_p(0, &ens));
        prop_assert!(have_met_left_p(n - 1, &ens));
        prop_assert!(right_synchronized_p(n - 1, &ens));
        prop_assert!(have_met_right_p(0, &ens));
    }

    #[test]
    fn stepping_composes(ens in arb_ensemble(6), a in arb_time(), b in arb_time()) {
        let whole = step_time_default(&(&a + &b), &ens).unwrap();
        let nested = step_time_default(&b, &step_time_default(&a, &ens).unwrap()).unwrap();
        prop_assert_eq!(whole, nested);
    }

    #[test]
    fn stepping_preserves_well_formedness_and_symmetry(ens in arb_ensemble(6), dt in arb_time()) {
        let after = step_time_default(&dt, &ens).unwrap();
        prop_assert!(wf_ensemble(&after));
        prop_assert_eq!(reflect(&after), step_time_default(&dt, &reflect(&ens)).unwrap());
    }

    #[test]
    fn stepping_is_deterministic(ens in arb_ensemble(6), dt in arb_time()) {
        prop_assert_eq!(step_time_default(&dt, &ens).unwrap(), step_time_default(&dt, &ens).unwrap());
    }

    #[test]
    fn have_met_is_invariant(ens in arb_ensemble(6), dt in arb_time()) {
        let before = flip_on_events(&ens);
        let after = flip_on_events(&step_time_default(&dt, &ens).unwrap());
        for i in 0..ens.count() {
            if have_met_left_p(i, &before) {
                prop_assert!(have_met_left_p(i, &after), "UAV {} lost have-met-left after {}", i, dt);
            }
            if have_met_right_p(i, &before) {
                prop_assert!(have_met_right_p(i, &after), "UAV {} lost have-met-right after {}", i, dt);
            }
        }
    }

    #[test]
    fn synchronized_prefix_is_invariant_once_all_have_met(ens in arb_ensemble(6), dt in arb_time()) {
        // a synchronized UAV stays so when all have met and every UAV on the
        // near side of it is synchronized too
        let before = flip_on_events(&ens);
        let after = flip_on_events(&step_time_default(&dt, &ens).unwrap());
        let n = ens.count();
        if (0..n).all(|i| have_met_left_p(i, &before)) {
            for j in (0..n).take_while(|&j| left_synchronized_p(j, &before)) {
                prop_assert!(left_synchronized_p(j, &after), "UAV {} after {} from {}", j, dt, before);
            }
        }
        if (0..n).all(|i| have_met_right_p(i, &before)) {
            for j in (0..n).rev().take_while(|&j| right_synchronized_p(j, &before)) {
                prop_assert!(right_synchronized_p(j, &after), "UAV {} after {} from {}", j, dt, before);
            }
        }
    }

    #[test]
    fn all_have_met_after_traverse_time(ens in arb_ensemble(8)) {
        let later = step_time_default(&ens.traverse_time(), &ens).unwrap();
        prop_assert!(all_have_met_p(&flip_on_events(&later)));
    }

    #[test]
    fn synchronization_propagates_within_one_unit(ens in arb_ensemble(6), start in arb_time()) {
        let base = flip_on_events(&step_time_default(&start, &ens).unwrap());
        if all_have_met_p(&base) {
            let later = flip_on_events(&step_time_default(&Scalar::one(), &base).unwrap());
            for j in 1..ens.count() {
                if left_synchronized_p(j - 1, &base) {
                    prop_assert!(left_synchronized_p(j, &later), "UAV {} not synchronized one unit after {}", j, start);
                }
            }
        }
    }

    #[test]
    fn contained_after_convergence(ens in arb_ensemble(8), extra in arb_time()) {
        let bound = Scalar::from_integer(2 * ens.count() as i64 - 1);
        let at = step_time_default(&(&bound + &extra), &ens).unwrap();
        prop_assert!(all_contained_p(&at));
    }

    #[test]
    fn own_flip_establishes_have_met(ens in arb_ensemble(6)) {
        // follow events for a while; whenever a UAV flips after t = 0, both
        // have-met predicates hold for it right after
        let sim = Simulator::new();
        let mut state = sim.step_to_next_event(&ens).unwrap().1;
        for _ in 0..20 {
            let fired = events(&state);
            let after = flip_on_events(&state);
            for i in fired {
                prop_assert!(have_met_left_p(i, &after) && have_met_right_p(i, &after), "UAV {} in {}", i, state);
            }
            state = sim.step_to_next_event(&state).unwrap().1;
        }
    }
}
