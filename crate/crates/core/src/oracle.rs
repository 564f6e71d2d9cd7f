//! Exhaustive walk enumeration, used as an independent check on the engine.
//!
//! Deliberately shares no search code with [`crate::engine`]: it scans the
//! raw segment list, re-derives the boarding rules, and explores every walk
//! up to a fixed number of edges, memoizing only exact duplicate states.

use std::collections::HashMap;

use crate::engine::EngineError;
use crate::model::{Network, WaitingPolicy};
use crate::time::{Duration, TimePoint};

struct Walker<'a> {
    net: &'a Network,
    waiting: WaitingPolicy,
    end: TimePoint,
    best: Vec<Option<TimePoint>>,
    seen: HashMap<(usize, TimePoint), usize>,
}

impl Walker<'_> {
    fn can_board(&self, seg: usize, at: TimePoint) -> bool {
        let s = &self.net.segments()[seg];
        if s.profile.duration_at(at).is_err() {
            return false;
        }
        if s.synthetic {
            at > self.end
        } else {
            at <= self.end
        }
    }

    fn visit(&mut self, node: usize, now: TimePoint, budget: usize) {
        if self.best[node].is_none_or(|b| now < b) {
            self.best[node] = Some(now);
        }
        if budget == 0 {
            return;
        }
        match self.seen.get(&(node, now)) {
            Some(&left) if left >= budget => return,
            _ => {
                self.seen.insert((node, now), budget);
            }
        }
        for si in 0..self.net.segments().len() {
            let seg = &self.net.segments()[si];
            if seg.from != node {
                continue;
            }
            // Waiting ends on a whole tick no later than the period end.
            let mut boards = vec![now];
            if self.waiting == WaitingPolicy::WaitingAllowed {
                let mut s = now.ceil_tick();
                while s <= self.end {
                    if s > now {
                        boards.push(s);
                    }
                    s = s.next_tick();
                }
            }
            for board in boards {
                if !self.can_board(si, board) {
                    continue;
                }
                let arrive = board + seg.profile.duration_at(board).unwrap();
                self.visit(seg.to, arrive, budget - 1);
            }
        }
    }
}

pub(crate) fn earliest_arrivals(
    net: &Network,
    origin: usize,
    t: TimePoint,
    max_walk_edges: usize,
    waiting: WaitingPolicy,
) -> Vec<Option<TimePoint>> {
    let mut walker =
        Walker { net, waiting, end: net.period().end, best: vec![None; net.locations().len()], seen: HashMap::new() };
    walker.visit(origin, t, max_walk_edges);
    walker.best
}

/// Minimum travel time over every walk of at most `max_walk_edges` edges,
/// using the network's waiting policy. `None` if no such walk reaches `b`.
pub fn oracle_best_travel_time(
    net: &Network,
    a: &str,
    b: &str,
    t: TimePoint,
    max_walk_edges: usize,
) -> Result<Option<Duration>, EngineError> {
    let ia = net.location_index(a).ok_or_else(|| EngineError::UnknownLocation(a.into()))?;
    let ib = net.location_index(b).ok_or_else(|| EngineError::UnknownLocation(b.into()))?;
    let best = earliest_arrivals(net, ia, t, max_walk_edges, net.waiting());
    Ok(best[ib].map(|arr| arr - t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::minmin_counterexample;
    use crate::model::Period;

    #[test]
    fn rush_hour_example() {
        let net = minmin_counterexample();
        let t = TimePoint::from_ticks(1020);
        assert_eq!(oracle_best_travel_time(&net, "a", "c", t, 3).unwrap(), Some(Duration::from_ticks(45)));
        assert_eq!(oracle_best_travel_time(&net, "a", "b", t, 3).unwrap(), Some(Duration::from_ticks(10)));
    }

    #[test]
    fn single_edge() {
        let net = Network::builder(Period::from_ticks(0, 5).unwrap())
            .location("a")
            .location("b")
            .constant("ab", "a", "b", 7)
            .build()
            .unwrap();
        for t in 0..=5 {
            let got = oracle_best_travel_time(&net, "a", "b", TimePoint::from_ticks(t), 1).unwrap();
            assert_eq!(got, Some(Duration::from_ticks(7)));
        }
        assert_eq!(oracle_best_travel_time(&net, "b", "a", TimePoint::from_ticks(0), 4).unwrap(), None);
    }

    #[test]
    fn edge_budget_limits_the_search() {
        let net = Network::builder(Period::from_ticks(0, 5).unwrap())
            .location("a")
            .location("b")
            .location("c")
            .constant("ab", "a", "b", 1)
            .constant("bc", "b", "c", 1)
            .build()
            .unwrap();
        let t = TimePoint::from_ticks(0);
        assert_eq!(oracle_best_travel_time(&net, "a", "c", t, 1).unwrap(), None);
        assert_eq!(oracle_best_travel_time(&net, "a", "c", t, 2).unwrap(), Some(Duration::from_ticks(2)));
    }
}
