//! Canonical example networks.

use serde::Serialize;

use crate::model::{Network, Period, TravelTimeProfile, WaitingPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BuiltinExample {
    MinMinCounterexample,
    BoundaryExample,
    IntegralViolation,
}

impl BuiltinExample {
    pub const ALL: [BuiltinExample; 3] = [Self::MinMinCounterexample, Self::BoundaryExample, Self::IntegralViolation];

    pub fn network(self) -> Network {
        match self {
            Self::MinMinCounterexample => minmin_counterexample(),
            Self::BoundaryExample => boundary_example(),
            Self::IntegralViolation => integral_violation(),
        }
    }
}

pub fn builtin_example(id: BuiltinExample) -> Network {
    id.network()
}

/// One day in minutes. `a -> b` takes 10 during the 17:00 hour and 60
/// otherwise; `b -> c` takes 10 during the 10:00 hour and 60 otherwise;
/// `a -> c` always takes 45. Reverse routes are constant at the forward
/// off-peak value.
pub fn minmin_counterexample() -> Network {
    Network::builder(Period::from_ticks(0, 1439).expect("static period"))
        .location("a")
        .location("b")
        .location("c")
        .segment("r1", "a", "b", TravelTimeProfile::from_ticks(&[(0, 60), (1020, 10), (1080, 60)]).unwrap())
        .segment("r2", "b", "c", TravelTimeProfile::from_ticks(&[(0, 60), (600, 10), (660, 60)]).unwrap())
        .constant("r3", "a", "c", 45)
        .constant("r1rev", "b", "a", 60)
        .constant("r2rev", "c", "b", 60)
        .constant("r3rev", "c", "a", 45)
        .build()
        .expect("static network")
}

/// Eight hours in minutes with stationary routes: `a -> c` 120, `a -> b` 30,
/// `b -> c` 30, and the same durations in reverse.
pub fn boundary_example() -> Network {
    Network::builder(Period::from_ticks(0, 480).expect("static period"))
        .location("a")
        .location("b")
        .location("c")
        .constant("r1", "a", "c", 120)
        .constant("r2", "a", "b", 30)
        .constant("r3", "b", "c", 30)
        .constant("r1rev", "c", "a", 120)
        .constant("r2rev", "b", "a", 30)
        .constant("r3rev", "c", "b", 30)
        .build()
        .expect("static network")
}

/// A network whose uniform-mean aggregate breaks the triangle inequality
/// even after boundary regularization.
///
/// `b -> c` takes a strictly increasing time `f(t)` (mean 60 over the period
/// `[0, 100]`). `a -> b` is the only way out of `a`; it takes 10 until tick
/// 90, then exactly as long as needed to reach `b` at tick 100 (the most
/// expensive boarding of `f`), and 28 for the last two departures, whose
/// arrivals fall after the period and continue on the regularization route.
/// Means are exactly `T(a,b) = 10`, `T(b,c) = 60`, `T(a,c) = 80`.
///
/// Waiting is disabled and `b -> a` is long: either would let a traveller
/// slip past the period end and take the regularization route to `c`.
pub fn integral_violation() -> Network {
    let mut a_to_b: Vec<(i64, i64)> = vec![(0, 10)];
    a_to_b.extend((91..=98).map(|t| (t, 100 - t)));
    a_to_b.push((99, 28));

    let mut b_to_c: Vec<(i64, i64)> = vec![(0, 4)];
    b_to_c.extend((1..=9).map(|t| (t, 7 + t)));
    b_to_c.extend((10..=96).map(|t| (t, 10 + t)));
    b_to_c.extend([(97, 108), (98, 109), (99, 110), (100, 140)]);

    Network::builder(Period::from_ticks(0, 100).expect("static period"))
        .location("a")
        .location("b")
        .location("c")
        .segment("g", "a", "b", TravelTimeProfile::from_ticks(&a_to_b).unwrap())
        .segment("f", "b", "c", TravelTimeProfile::from_ticks(&b_to_c).unwrap())
        .constant("g_rev", "b", "a", 200)
        .constant("f_rev", "c", "b", 10)
        .constant("ca", "c", "a", 10)
        .waiting(WaitingPolicy::NoWaiting)
        .build()
        .expect("static network")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{Duration, TimePoint};

    fn sum_over_period(net: &Network, seg: &str) -> i64 {
        let p = &net.segment(seg).unwrap().profile;
        net.period().grid().map(|t| p.duration_at(t).unwrap().half_ticks()).sum::<i64>() / 2
    }

    #[test]
    fn integral_construction_profile_sums() {
        let net = integral_violation();
        assert_eq!(sum_over_period(&net, "g"), 1010);
        assert_eq!(sum_over_period(&net, "f"), 6060);
        let f = &net.segment("f").unwrap().profile;
        let durations: Vec<_> = f.breakpoints().iter().map(|p| p.1).collect();
        assert!(durations.windows(2).all(|w| w[0] < w[1]), "f must increase");
    }

    /// Sums `T(a, b, t)` over the period with the exhaustive walker, which
    /// shares no code with the engine.
    fn oracle_sum(net: &Network, a: &str, b: &str) -> i64 {
        let half: i64 = net
            .period()
            .grid()
            .map(|t| crate::oracle::oracle_best_travel_time(net, a, b, t, 6).unwrap().unwrap().half_ticks())
            .sum();
        half / 2
    }

    #[test]
    fn integral_construction_means_by_exhaustive_search() {
        let reg = crate::metric::regularized(&integral_violation()).unwrap();
        assert_eq!(
            reg.segments().iter().filter(|s| s.synthetic).map(|s| s.profile.min_duration()).max(),
            Some(Duration::from_ticks(1))
        );
        assert_eq!(oracle_sum(&reg, "a", "b"), 1010);
        assert_eq!(oracle_sum(&reg, "b", "c"), 6060);
        assert_eq!(oracle_sum(&reg, "a", "c"), 8080);
    }

    #[test]
    fn rush_hour_duration_is_ten() {
        let net = minmin_counterexample();
        let p = &net.segment("r1").unwrap().profile;
        assert_eq!(p.duration_at(TimePoint::from_ticks(1020)).unwrap(), Duration::from_ticks(10));
    }
}
