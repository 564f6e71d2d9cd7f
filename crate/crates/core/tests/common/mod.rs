#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use ttmetric_core::{Location, TimePoint};
use ttmetric_core::{Network, Period, RouteSegment, TravelTimeProfile, WaitingPolicy};

/// Bounds for randomly generated networks.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub max_locations: usize,
    pub max_segments: usize,
    pub max_breakpoints: usize,
    pub max_period_ticks: i64,
    pub max_duration: i64,
}

pub const METRIC_BOUNDS: Bounds =
    Bounds { max_locations: 6, max_segments: 12, max_breakpoints: 5, max_period_ticks: 50, max_duration: 20 };

pub const ORACLE_BOUNDS: Bounds =
    Bounds { max_locations: 5, max_segments: 10, max_breakpoints: 4, max_period_ticks: 41, max_duration: 15 };

fn profile(bounds: Bounds, horizon: i64) -> impl Strategy<Value = TravelTimeProfile> {
    (
        prop::collection::btree_set(1..=horizon.max(1), 0..bounds.max_breakpoints),
        prop::collection::vec(1..=bounds.max_duration, bounds.max_breakpoints),
    )
        .prop_map(|(starts, durations)| {
            let pieces: Vec<(i64, i64)> = std::iter::once(0).chain(starts).zip(durations).collect();
            TravelTimeProfile::from_ticks(&pieces).expect("sorted by construction")
        })
}

/// A random network that satisfies every consistency requirement: a
/// directed ring through all locations guarantees a route between every
/// ordered pair, and every profile starts at tick 0.
pub fn network(bounds: Bounds) -> impl Strategy<Value = Network> {
    (2..=bounds.max_locations, 0..=10i64, 0..bounds.max_period_ticks, any::<bool>()).prop_flat_map(
        move |(n, start, len, wait)| {
            let end = start + len;
            let extra = bounds.max_segments - n;
            (
                prop::collection::vec(profile(bounds, end + 5), n),
                prop::collection::vec((0..n, 0..n - 1, profile(bounds, end + 5)), 0..=extra),
            )
                .prop_map(move |(ring, extras)| {
                    let mut segments = Vec::new();
                    for (i, p) in ring.into_iter().enumerate() {
                        segments.push(segment(format!("r{i}"), i, (i + 1) % n, p));
                    }
                    for (k, (from, offset, p)) in extras.into_iter().enumerate() {
                        // Skip `from` itself so there are no self-loops.
                        let to = (from + 1 + offset) % n;
                        segments.push(segment(format!("x{k}"), from, to, p));
                    }
                    let locations = (0..n).map(|i| Location::new(format!("l{i}"))).collect();
                    let waiting = if wait { WaitingPolicy::WaitingAllowed } else { WaitingPolicy::NoWaiting };
                    Network::new("tick", locations, segments, Period::from_ticks(start, end).unwrap(), waiting)
                        .expect("generated ids are unique")
                })
        },
    )
}

fn segment(id: String, from: usize, to: usize, profile: TravelTimeProfile) -> RouteSegment {
    RouteSegment { id, from, to, profile, mode: None, capacity: None, synthetic: false }
}

/// A reproducible runner for the harness-free acceptance target.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn tick(t: i64) -> TimePoint {
    TimePoint::from_ticks(t)
}
