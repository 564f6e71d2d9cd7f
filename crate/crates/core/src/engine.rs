//! Earliest-arrival search over time-dependent route segments.
//!
//! Boarding rules: a real segment can be boarded at any departure inside the
//! period; a synthetic segment only strictly after the period end. Waiting
//! in place, when allowed, may last until the period end and no longer.
//!
//! Two exact algorithms are provided. Label-setting keeps one label per
//! (location, before/after period end) and is exact whenever every edge's
//! arrival function is non-decreasing inside each of those two phases: always
//! with waiting, otherwise only on FIFO profiles without synthetic segments.
//! The time-expanded search enumerates distinct (location, time) states in
//! increasing time order and is exact in all cases.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{fifo_violations, Network, RouteSegment, WaitingPolicy};
use crate::oracle;
use crate::time::{Duration, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("departure {t} outside the search domain (period {start}..={end}, regularized: {regularized})")]
    DepartureOutsideDomain { t: TimePoint, start: TimePoint, end: TimePoint, regularized: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    Auto,
    LabelSetting,
    TimeExpanded,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchPolicy {
    pub waiting: WaitingPolicy,
    pub algorithm: Algorithm,
    /// Walk-length budget for [`Algorithm::BruteForce`].
    pub max_walk_edges: usize,
}

impl SearchPolicy {
    pub fn new(waiting: WaitingPolicy) -> Self {
        Self { waiting, algorithm: Algorithm::Auto, max_walk_edges: 8 }
    }

    /// Uses the network's own waiting policy.
    pub fn for_network(net: &Network) -> Self {
        Self::new(net.waiting())
    }

    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }
}

/// One boarded segment of a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Leg {
    pub segment: usize,
    pub board: TimePoint,
    pub arrive: TimePoint,
}

/// Earliest arrivals at every location from one origin and departure time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalLabels {
    pub origin: usize,
    pub departure: TimePoint,
    arrivals: Vec<Option<TimePoint>>,
    walks: Vec<Option<Vec<Leg>>>,
}

impl ArrivalLabels {
    /// `None` when the location cannot be reached.
    pub fn arrival(&self, location: usize) -> Option<TimePoint> {
        self.arrivals[location]
    }

    pub fn arrivals(&self) -> &[Option<TimePoint>] {
        &self.arrivals
    }

    pub fn travel_time(&self, location: usize) -> Option<Duration> {
        self.arrivals[location].map(|a| a - self.departure)
    }

    /// The walk realizing the earliest arrival. Brute-force searches do not
    /// record walks.
    pub fn walk(&self, location: usize) -> Option<&[Leg]> {
        self.walks[location].as_deref()
    }

    /// Last leg into `location`.
    pub fn predecessor(&self, location: usize) -> Option<&Leg> {
        self.walk(location).and_then(|w| w.last())
    }
}

/// Which departures of real segments are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Boarding {
    /// Real segments only depart inside the period.
    WithinPeriod,
    /// Real segments depart at any time; profiles continue past the period.
    Extended,
}

/// Precomputed search state for one network and policy.
#[derive(Debug)]
pub struct Router<'n> {
    net: &'n Network,
    waiting: WaitingPolicy,
    algorithm: Algorithm,
    max_walk_edges: usize,
    boarding: Boarding,
    outgoing: Vec<Vec<usize>>,
    rank: Vec<usize>,
    period_end: TimePoint,
    horizon: TimePoint,
}

impl<'n> Router<'n> {
    pub fn new(net: &'n Network, policy: SearchPolicy) -> Self {
        Self::with_boarding(net, policy, Boarding::WithinPeriod)
    }

    pub(crate) fn with_boarding(net: &'n Network, policy: SearchPolicy, boarding: Boarding) -> Self {
        let n = net.locations().len();
        let mut outgoing = vec![Vec::new(); n];
        for (i, seg) in net.segments().iter().enumerate() {
            outgoing[seg.from].push(i);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| net.location_id(a).cmp(net.location_id(b)));
        let mut rank = vec![0; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let period_end = net.period().end;
        let horizon = match boarding {
            Boarding::WithinPeriod => period_end,
            Boarding::Extended => {
                net.segments().iter().map(|s| s.profile.last_breakpoint()).fold(period_end, TimePoint::max)
            }
        };
        let mut router = Self {
            net,
            waiting: policy.waiting,
            algorithm: policy.algorithm,
            max_walk_edges: policy.max_walk_edges,
            boarding,
            outgoing,
            rank,
            period_end,
            horizon,
        };
        if router.algorithm == Algorithm::Auto {
            router.algorithm = router.resolve_auto();
        }
        router
    }

    /// The concrete algorithm this router runs.
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn network(&self) -> &'n Network {
        self.net
    }

    fn resolve_auto(&self) -> Algorithm {
        if self.waiting == WaitingPolicy::WaitingAllowed {
            return Algorithm::LabelSetting;
        }
        let start = self.net.period().start;
        let fifo = self.net.segments().iter().all(|s| {
            !s.synthetic
                && fifo_violations(&s.profile, start.max(s.profile.first_breakpoint()), self.horizon).is_empty()
        });
        if fifo {
            Algorithm::LabelSetting
        } else {
            Algorithm::TimeExpanded
        }
    }

    fn check_departure(&self, t: TimePoint) -> Result<(), EngineError> {
        let period = self.net.period();
        let beyond_ok = self.net.is_regularized() || self.boarding == Boarding::Extended;
        if t < period.start || (t > period.end && !beyond_ok) {
            return Err(EngineError::DepartureOutsideDomain {
                t,
                start: period.start,
                end: period.end,
                regularized: self.net.is_regularized(),
            });
        }
        Ok(())
    }

    fn boardable(&self, seg: &RouteSegment, at: TimePoint) -> bool {
        if at < seg.profile.first_breakpoint() {
            return false;
        }
        seg.synthetic || self.boarding == Boarding::Extended || at <= self.period_end
    }

    /// Latest instant waiting may end at, if waiting is allowed.
    fn wait_limit(&self) -> Option<TimePoint> {
        match (self.waiting, self.boarding) {
            (WaitingPolicy::NoWaiting, _) => None,
            (WaitingPolicy::WaitingAllowed, Boarding::WithinPeriod) => Some(self.period_end),
            (WaitingPolicy::WaitingAllowed, Boarding::Extended) => Some(TimePoint::from_half_ticks(i64::MAX)),
        }
    }

    /// `(board, arrive)` pairs for taking `seg` when standing at its tail at
    /// time `now`: board immediately, wait for a later breakpoint, or wait
    /// just long enough to arrive after the period end.
    fn options(&self, seg: &RouteSegment, now: TimePoint, out: &mut Vec<(TimePoint, TimePoint)>) {
        out.clear();
        if self.boardable(seg, now) {
            let d = seg.profile.duration_at(now).expect("boardable implies in domain");
            out.push((now, now + d));
        }
        let Some(limit) = self.wait_limit() else { return };
        let pieces = seg.profile.breakpoints();
        for (k, &(bp, d)) in pieces.iter().enumerate() {
            if bp > now && bp <= limit && self.boardable(seg, bp) {
                out.push((bp, bp + d));
            }
            if self.boarding == Boarding::Extended || seg.synthetic {
                continue;
            }
            // Earliest whole tick in this piece whose arrival lands past the period end.
            let crossing = TimePoint::from_half_ticks(self.period_end.half_ticks() - d.half_ticks() + 1).ceil_tick();
            let board = crossing.max(bp).max(now.ceil_tick());
            let piece_end = pieces.get(k + 1).map(|p| p.0);
            if board > now && board <= limit && piece_end.is_none_or(|e| board < e) && self.boardable(seg, board) {
                out.push((board, board + d));
            }
        }
    }

    fn phase(&self, t: TimePoint) -> usize {
        usize::from(self.boarding == Boarding::WithinPeriod && t > self.period_end)
    }

    /// Earliest arrivals from `origin` (a location index) departing at `t`.
    pub fn earliest_arrival(&self, origin: usize, t: TimePoint) -> Result<ArrivalLabels, EngineError> {
        self.check_departure(t)?;
        Ok(match self.algorithm {
            Algorithm::LabelSetting | Algorithm::Auto => self.label_setting(origin, t),
            Algorithm::TimeExpanded => self.time_expanded(origin, t),
            Algorithm::BruteForce => {
                let arrivals = oracle::earliest_arrivals(self.net, origin, t, self.max_walk_edges, self.waiting);
                let walks = vec![None; arrivals.len()];
                ArrivalLabels { origin, departure: t, arrivals, walks }
            }
        })
    }

    fn label_setting(&self, origin: usize, t: TimePoint) -> ArrivalLabels {
        let n = self.net.locations().len();
        let key = |node: usize, phase: usize| node * 2 + phase;
        let mut best: Vec<Option<TimePoint>> = vec![None; 2 * n];
        let mut pred: Vec<Option<(usize, Leg)>> = vec![None; 2 * n];
        let mut settled = vec![false; 2 * n];
        let mut heap = BinaryHeap::new();

        let start_phase = self.phase(t);
        best[key(origin, start_phase)] = Some(t);
        heap.push(Reverse((t, self.rank[origin], start_phase, origin)));

        let mut options = Vec::new();
        let mut last_pop = t;
        while let Some(Reverse((time, _, phase, node))) = heap.pop() {
            let k = key(node, phase);
            if settled[k] || best[k] != Some(time) {
                continue;
            }
            debug_assert!(time >= last_pop, "labels must settle in non-decreasing order");
            last_pop = time;
            settled[k] = true;

            for &si in &self.outgoing[node] {
                let seg = &self.net.segments()[si];
                self.options(seg, time, &mut options);
                let mut per_phase: [Option<(TimePoint, TimePoint)>; 2] = [None, None];
                for &(board, arrive) in &options {
                    let slot = &mut per_phase[self.phase(arrive)];
                    if slot.is_none_or(|(_, a)| arrive < a) {
                        *slot = Some((board, arrive));
                    }
                }
                for (ph, cand) in per_phase.into_iter().enumerate() {
                    let Some((board, arrive)) = cand else { continue };
                    let target = key(seg.to, ph);
                    if settled[target] || best[target].is_some_and(|b| b <= arrive) {
                        continue;
                    }
                    best[target] = Some(arrive);
                    pred[target] = Some((k, Leg { segment: si, board, arrive }));
                    heap.push(Reverse((arrive, self.rank[seg.to], ph, seg.to)));
                }
            }
        }

        let mut arrivals = vec![None; n];
        let mut walks = vec![None; n];
        for node in 0..n {
            let chosen = match (best[key(node, 0)], best[key(node, 1)]) {
                (Some(a), Some(b)) if b < a => Some(key(node, 1)),
                (Some(_), _) => Some(key(node, 0)),
                (None, Some(_)) => Some(key(node, 1)),
                (None, None) => None,
            };
            if let Some(mut k) = chosen {
                arrivals[node] = best[k];
                let mut walk = Vec::new();
                while let Some((prev, leg)) = pred[k] {
                    walk.push(leg);
                    k = prev;
                }
                walk.reverse();
                walks[node] = Some(walk);
            }
        }
        ArrivalLabels { origin, departure: t, arrivals, walks }
    }

    fn time_expanded(&self, origin: usize, t: TimePoint) -> ArrivalLabels {
        type State = (usize, TimePoint);
        let n = self.net.locations().len();
        let mut first: Vec<Option<TimePoint>> = vec![None; n];
        let mut past_horizon = vec![false; n];
        let mut visited: HashSet<State> = HashSet::new();
        let mut pred: HashMap<State, (State, Leg)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((t, self.rank[origin], origin)));

        let mut options = Vec::new();
        while let Some(Reverse((time, _, node))) = heap.pop() {
            if !visited.insert((node, time)) {
                continue;
            }
            if first[node].is_none() {
                first[node] = Some(time);
            }
            // Past the horizon every usable profile is constant and waiting
            // is over, so the earliest such state per location dominates.
            if time > self.horizon {
                if past_horizon[node] {
                    continue;
                }
                past_horizon[node] = true;
            }
            for &si in &self.outgoing[node] {
                let seg = &self.net.segments()[si];
                self.options(seg, time, &mut options);
                for &(board, arrive) in &options {
                    let state = (seg.to, arrive);
                    if visited.contains(&state) || (arrive > self.horizon && past_horizon[seg.to]) {
                        continue;
                    }
                    if let Entry::Vacant(e) = pred.entry(state) {
                        e.insert(((node, time), Leg { segment: si, board, arrive }));
                        heap.push(Reverse((arrive, self.rank[seg.to], seg.to)));
                    }
                }
            }
        }

        let walks = (0..n)
            .map(|node| {
                first[node].map(|time| {
                    let mut walk = Vec::new();
                    let mut state = (node, time);
                    while let Some(&(prev, leg)) = pred.get(&state) {
                        if state == (origin, t) {
                            break;
                        }
                        walk.push(leg);
                        state = prev;
                    }
                    walk.reverse();
                    walk
                })
            })
            .collect();
        ArrivalLabels { origin, departure: t, arrivals: first, walks }
    }

    /// `T(a, b, t)`; zero when `a == b`, `None` when unreachable.
    pub fn best_travel_time(&self, a: usize, b: usize, t: TimePoint) -> Result<Option<Duration>, EngineError> {
        if a == b {
            self.check_departure(t)?;
            return Ok(Some(Duration::ZERO));
        }
        Ok(self.earliest_arrival(a, t)?.travel_time(b))
    }

    /// Departure ticks the aggregation ranges over.
    pub fn departure_grid(&self) -> impl Iterator<Item = TimePoint> + Clone {
        self.net.period().grid()
    }
}

fn resolve(net: &Network, id: &str) -> Result<usize, EngineError> {
    net.location_index(id).ok_or_else(|| EngineError::UnknownLocation(id.to_string()))
}

/// Earliest arrivals at every location from `origin` departing at `t`.
pub fn earliest_arrival(
    net: &Network,
    origin: &str,
    t: TimePoint,
    policy: SearchPolicy,
) -> Result<ArrivalLabels, EngineError> {
    Router::new(net, policy).earliest_arrival(resolve(net, origin)?, t)
}

/// Best travel time from `a` to `b` departing at `t`; `None` if no walk exists.
pub fn best_travel_time(
    net: &Network,
    a: &str,
    b: &str,
    t: TimePoint,
    policy: SearchPolicy,
) -> Result<Option<Duration>, EngineError> {
    Router::new(net, policy).best_travel_time(resolve(net, a)?, resolve(net, b)?, t)
}

/// Outcome of the time-dependent triangle check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TriangleOutcome {
    Holds {
        direct: Duration,
        via: Duration,
    },
    Violated {
        direct: Option<Duration>,
        via: Duration,
    },
    /// The second leg would depart outside the search domain, or the first
    /// leg is impossible.
    PremiseViolated,
}

impl TriangleOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, TriangleOutcome::Holds { .. })
    }
}

/// Checks `T(a,c,t) <= T(a,b,t) + T(b,c, t + T(a,b,t))`.
pub fn check_td_triangle(
    net: &Network,
    a: &str,
    b: &str,
    c: &str,
    t: TimePoint,
    policy: SearchPolicy,
) -> Result<TriangleOutcome, EngineError> {
    let router = Router::new(net, policy);
    check_td_triangle_with(&router, resolve(net, a)?, resolve(net, b)?, resolve(net, c)?, t)
}

pub(crate) fn check_td_triangle_with(
    router: &Router<'_>,
    a: usize,
    b: usize,
    c: usize,
    t: TimePoint,
) -> Result<TriangleOutcome, EngineError> {
    let Some(first) = router.best_travel_time(a, b, t)? else {
        return Ok(TriangleOutcome::PremiseViolated);
    };
    let mid = t + first;
    if router.check_departure(mid).is_err() {
        return Ok(TriangleOutcome::PremiseViolated);
    }
    let Some(second) = router.best_travel_time(b, c, mid)? else {
        return Ok(TriangleOutcome::PremiseViolated);
    };
    let via = first + second;
    Ok(match router.best_travel_time(a, c, t)? {
        Some(direct) if direct <= via => TriangleOutcome::Holds { direct, via },
        direct => TriangleOutcome::Violated { direct, via },
    })
}
