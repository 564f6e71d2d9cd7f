mod common;

use common::{network, METRIC_BOUNDS, ORACLE_BOUNDS};
use proptest::prelude::*;
use ttmetric_core::metric::{maxmin_metric, regularized};
use ttmetric_core::{
    load_network, network_to_json, oracle_best_travel_time, Algorithm, Duration, Router, SearchPolicy, TimePoint,
    TravelTimeProfile,
};

fn scan(profile: &TravelTimeProfile, t: TimePoint) -> Option<Duration> {
    profile.breakpoints().iter().take_while(|(bp, _)| *bp <= t).last().map(|&(_, d)| d)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn json_round_trip_preserves_networks(net in network(METRIC_BOUNDS)) {
        let text = network_to_json(&net).unwrap();
        prop_assert_eq!(load_network(&text).unwrap(), net);
    }

    #[test]
    fn profile_lookup_matches_a_linear_scan(net in network(METRIC_BOUNDS), half in -4i64..140) {
        let t = TimePoint::from_half_ticks(half);
        for seg in net.segments() {
            prop_assert_eq!(seg.profile.duration_at(t).ok(), scan(&seg.profile, t));
        }
    }

    #[test]
    fn ceil_tick_is_the_next_whole_tick(half in -1000i64..1000) {
        let t = TimePoint::from_half_ticks(half);
        let c = t.ceil_tick();
        prop_assert!(c.is_whole_tick());
        prop_assert!(c >= t && c.half_ticks() - half < 2);
    }

    #[test]
    fn search_algorithms_agree(net in network(METRIC_BOUNDS)) {
        let reg = regularized(&net).unwrap();
        let policy = SearchPolicy::for_network(&reg);
        let label = Router::new(&reg, policy.with_algorithm(Algorithm::LabelSetting));
        let expanded = Router::new(&reg, policy.with_algorithm(Algorithm::TimeExpanded));
        let fifo = reg.waiting() == ttmetric_core::WaitingPolicy::WaitingAllowed;
        for t in reg.period().grid() {
            for origin in 0..reg.locations().len() {
                let slow = expanded.earliest_arrival(origin, t).unwrap();
                let fast = label.earliest_arrival(origin, t).unwrap();
                for b in 0..reg.locations().len() {
                    if fifo {
                        prop_assert_eq!(fast.arrival(b), slow.arrival(b));
                    }
                    if let (Some(arr), Some(walk)) = (slow.arrival(b), slow.walk(b)) {
                        prop_assert_eq!(walk.last().map_or(t, |leg| leg.arrive), arr);
                    }
                }
            }
        }
    }

    #[test]
    fn regularized_maxmin_is_symmetric_with_zero_diagonal(net in network(METRIC_BOUNDS)) {
        let m = maxmin_metric(&regularized(&net).unwrap(), SearchPolicy::for_network(&net)).unwrap();
        let ids = m.locations.clone();
        for a in &ids {
            prop_assert!(m.get(a, a).unwrap().is_zero());
            for b in &ids {
                prop_assert_eq!(m.get(a, b), m.get(b, a));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn engine_matches_exhaustive_search(net in network(ORACLE_BOUNDS)) {
        let reg = regularized(&net).unwrap();
        let router = Router::new(&reg, SearchPolicy::for_network(&reg));
        let (start, end) = (reg.period().start, reg.period().end);
        let mid = TimePoint::from_half_ticks((start.half_ticks() + end.half_ticks()) / 2).ceil_tick();
        for t in [start, mid, end] {
            for a in reg.locations() {
                for b in reg.locations() {
                    let ia = reg.location_index(&a.id).unwrap();
                    let ib = reg.location_index(&b.id).unwrap();
                    let engine = router.best_travel_time(ia, ib, t).unwrap();
                    let oracle = oracle_best_travel_time(&reg, &a.id, &b.id, t, 8).unwrap();
                    prop_assert_eq!(engine, oracle, "T({},{},{})", a.id, b.id, t);
                }
            }
        }
    }
}
