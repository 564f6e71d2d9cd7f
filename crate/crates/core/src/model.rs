//! Locations, periods, time-dependent route segments and networks.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::{Duration, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("profile has no breakpoints")]
    EmptyProfile,
    #[error("unsorted profile: breakpoint {next} does not follow {prev}")]
    UnsortedProfile { prev: TimePoint, next: TimePoint },
    #[error("time {t} precedes the first profile breakpoint {first}")]
    BeforeProfileStart { t: TimePoint, first: TimePoint },
    #[error("period start {start} is after its end {end}")]
    InvertedPeriod { start: TimePoint, end: TimePoint },
    #[error("negative time {0}")]
    NegativeTime(TimePoint),
    #[error("duplicate location id `{0}`")]
    DuplicateLocation(String),
    #[error("duplicate segment id `{0}`")]
    DuplicateSegment(String),
    #[error("segment `{segment}` references unknown location `{location}`")]
    UnknownLocation { segment: String, location: String },
    #[error("rescale factor must be positive, got {0}")]
    BadScale(i64),
}

/// Whether a route may contain in-place waiting between legs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaitingPolicy {
    WaitingAllowed,
    NoWaiting,
}

/// The closed interval of departure times `[start, end]` over which
/// aggregation happens. Both ends lie on the input tick grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Period {
    pub start: TimePoint,
    pub end: TimePoint,
}

impl Period {
    pub fn new(start: TimePoint, end: TimePoint) -> Result<Self, ModelError> {
        if start.half_ticks() < 0 {
            return Err(ModelError::NegativeTime(start));
        }
        if start > end {
            return Err(ModelError::InvertedPeriod { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn from_ticks(start: i64, end: i64) -> Result<Self, ModelError> {
        Self::new(TimePoint::from_ticks(start), TimePoint::from_ticks(end))
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        self.start <= t && t <= self.end
    }

    /// Every whole tick from `start` to `end` inclusive.
    pub fn grid(&self) -> impl Iterator<Item = TimePoint> + Clone {
        let (start, end) = (self.start.half_ticks(), self.end.half_ticks());
        (start..=end).step_by(2).map(TimePoint::from_half_ticks)
    }

    pub fn tick_count(&self) -> usize {
        ((self.end.half_ticks() - self.start.half_ticks()) / 2 + 1) as usize
    }

    pub fn span(&self) -> Duration {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Location {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), name: None }
    }
}

/// Piecewise-constant duration as a function of departure time.
///
/// Each breakpoint's duration applies from the breakpoint up to (excluding)
/// the next one; the last piece extends forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TravelTimeProfile {
    breakpoints: Vec<(TimePoint, Duration)>,
}

impl TravelTimeProfile {
    pub fn new(breakpoints: Vec<(TimePoint, Duration)>) -> Result<Self, ModelError> {
        if breakpoints.is_empty() {
            return Err(ModelError::EmptyProfile);
        }
        for pair in breakpoints.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(ModelError::UnsortedProfile { prev: pair[0].0, next: pair[1].0 });
            }
        }
        Ok(Self { breakpoints })
    }

    /// Convenience constructor from whole ticks.
    pub fn from_ticks(pieces: &[(i64, i64)]) -> Result<Self, ModelError> {
        Self::new(pieces.iter().map(|&(t, d)| (TimePoint::from_ticks(t), Duration::from_ticks(d))).collect())
    }

    pub fn constant(duration: Duration) -> Self {
        Self { breakpoints: vec![(TimePoint::from_ticks(0), duration)] }
    }

    pub fn breakpoints(&self) -> &[(TimePoint, Duration)] {
        &self.breakpoints
    }

    pub fn first_breakpoint(&self) -> TimePoint {
        self.breakpoints[0].0
    }

    pub fn last_breakpoint(&self) -> TimePoint {
        self.breakpoints[self.breakpoints.len() - 1].0
    }

    /// Index of the piece containing `t`, if `t` is inside the domain.
    pub fn piece_at(&self, t: TimePoint) -> Option<usize> {
        match self.breakpoints.partition_point(|&(bp, _)| bp <= t) {
            0 => None,
            n => Some(n - 1),
        }
    }

    pub fn duration_at(&self, t: TimePoint) -> Result<Duration, ModelError> {
        self.piece_at(t)
            .map(|i| self.breakpoints[i].1)
            .ok_or(ModelError::BeforeProfileStart { t, first: self.first_breakpoint() })
    }

    /// Durations of every piece that overlaps the closed window `[from, to]`.
    pub fn durations_within(&self, from: TimePoint, to: TimePoint) -> impl Iterator<Item = Duration> + '_ {
        self.breakpoints.iter().enumerate().filter_map(move |(i, &(bp, d))| {
            let next = self.breakpoints.get(i + 1).map(|p| p.0);
            let starts_before_end = bp <= to;
            let ends_after_start = next.is_none_or(|n| n > from);
            (starts_before_end && ends_after_start).then_some(d)
        })
    }

    pub fn min_duration(&self) -> Duration {
        self.breakpoints.iter().map(|p| p.1).min().expect("non-empty profile")
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self { breakpoints: self.breakpoints.iter().map(|&(t, d)| (t.scaled(k), d.scaled(k))).collect() }
    }
}

/// Duration of `profile` for a departure at `t`.
pub fn profile_duration(profile: &TravelTimeProfile, t: TimePoint) -> Result<Duration, ModelError> {
    profile.duration_at(t)
}

/// Grid ticks `t` of `grid` where departing one tick later arrives strictly
/// earlier, i.e. `t + d(t) > (t + 1) + d(t + 1)`. Empty means FIFO on the grid.
pub fn fifo_check(profile: &TravelTimeProfile, grid: Period) -> Vec<TimePoint> {
    fifo_violations(profile, grid.start, grid.end)
}

pub(crate) fn fifo_violations(profile: &TravelTimeProfile, from: TimePoint, to: TimePoint) -> Vec<TimePoint> {
    let mut out = Vec::new();
    let mut t = from;
    while t < to {
        let next = t.next_tick();
        if let (Ok(d0), Ok(d1)) = (profile.duration_at(t), profile.duration_at(next)) {
            if t + d0 > next + d1 {
                out.push(t);
            }
        }
        t = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteSegment {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub profile: TravelTimeProfile,
    pub mode: Option<String>,
    pub capacity: Option<u32>,
    /// Set only on regularization routes appended after the period end.
    pub synthetic: bool,
}

/// Locations, route segments and the aggregation period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    unit: String,
    locations: Vec<Location>,
    segments: Vec<RouteSegment>,
    period: Period,
    waiting: WaitingPolicy,
    regularized: bool,
    index: HashMap<String, usize>,
}

impl Network {
    pub fn new(
        unit: impl Into<String>,
        locations: Vec<Location>,
        segments: Vec<RouteSegment>,
        period: Period,
        waiting: WaitingPolicy,
    ) -> Result<Self, ModelError> {
        Self::assemble(unit.into(), locations, segments, period, waiting, false)
    }

    pub(crate) fn assemble(
        unit: String,
        locations: Vec<Location>,
        segments: Vec<RouteSegment>,
        period: Period,
        waiting: WaitingPolicy,
        regularized: bool,
    ) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(locations.len());
        for (i, loc) in locations.iter().enumerate() {
            if index.insert(loc.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateLocation(loc.id.clone()));
            }
        }
        let mut seen = HashMap::with_capacity(segments.len());
        for seg in &segments {
            if seen.insert(seg.id.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateSegment(seg.id.clone()));
            }
            for end in [seg.from, seg.to] {
                if end >= locations.len() {
                    return Err(ModelError::UnknownLocation { segment: seg.id.clone(), location: format!("#{end}") });
                }
            }
        }
        Ok(Self { unit, locations, segments, period, waiting, regularized, index })
    }

    pub fn builder(period: Period) -> NetworkBuilder {
        NetworkBuilder::new(period)
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn segments(&self) -> &[RouteSegment] {
        &self.segments
    }

    pub fn period(&self) -> Period {
        self.period
    }

    pub fn waiting(&self) -> WaitingPolicy {
        self.waiting
    }

    pub fn is_regularized(&self) -> bool {
        self.regularized
    }

    pub fn location_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn location_id(&self, index: usize) -> &str {
        &self.locations[index].id
    }

    pub fn segment(&self, id: &str) -> Option<&RouteSegment> {
        self.segments.iter().find(|s| s.id == id)
    }

    pub fn with_waiting(&self, waiting: WaitingPolicy) -> Self {
        Self { waiting, ..self.clone() }
    }

    /// Same network over a different aggregation period. Synthetic
    /// regularization routes are dropped since they belong to the old period.
    pub fn with_period(&self, period: Period) -> Self {
        let mut net = self.without_regularization();
        net.period = period;
        net
    }

    /// Drops synthetic segments and clears the regularized flag.
    pub fn without_regularization(&self) -> Self {
        let mut net = self.clone();
        net.segments.retain(|s| !s.synthetic);
        net.regularized = false;
        net
    }

    /// Keeps only the segments for which `keep` returns true.
    pub fn retain_segments(&self, mut keep: impl FnMut(&RouteSegment) -> bool) -> Self {
        let mut net = self.clone();
        net.segments.retain(|s| keep(s));
        net
    }

    pub(crate) fn into_regularized(mut self, extra: Vec<RouteSegment>) -> Self {
        self.segments.extend(extra);
        self.regularized = true;
        self
    }

    /// Multiplies every duration, breakpoint and the period by `k`.
    pub fn scaled(&self, k: i64) -> Result<Self, ModelError> {
        if k <= 0 {
            return Err(ModelError::BadScale(k));
        }
        let mut net = self.without_regularization();
        net.period = Period::new(net.period.start.scaled(k), net.period.end.scaled(k))?;
        for seg in &mut net.segments {
            seg.profile = seg.profile.scaled(k);
        }
        Ok(net)
    }
}

/// Incremental construction by string ids.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    unit: String,
    period: Period,
    waiting: WaitingPolicy,
    locations: Vec<Location>,
    segments: Vec<(String, String, String, TravelTimeProfile, Option<u32>)>,
}

impl NetworkBuilder {
    pub fn new(period: Period) -> Self {
        Self {
            unit: "minute".into(),
            period,
            waiting: WaitingPolicy::WaitingAllowed,
            locations: Vec::new(),
            segments: Vec::new(),
        }
    }

    pub fn unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = unit.into();
        self
    }

    pub fn waiting(mut self, waiting: WaitingPolicy) -> Self {
        self.waiting = waiting;
        self
    }

    pub fn location(mut self, id: impl Into<String>) -> Self {
        self.locations.push(Location::new(id));
        self
    }

    pub fn segment(
        mut self,
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        profile: TravelTimeProfile,
    ) -> Self {
        self.segments.push((id.into(), from.into(), to.into(), profile, None));
        self
    }

    /// A segment with a time-invariant duration in whole ticks.
    pub fn constant(self, id: impl Into<String>, from: impl Into<String>, to: impl Into<String>, ticks: i64) -> Self {
        self.segment(id, from, to, TravelTimeProfile::constant(Duration::from_ticks(ticks)))
    }

    pub fn capacity(mut self, capacity: u32) -> Self {
        if let Some(last) = self.segments.last_mut() {
            last.4 = Some(capacity);
        }
        self
    }

    pub fn build(self) -> Result<Network, ModelError> {
        let lookup: HashMap<&str, usize> = self.locations.iter().enumerate().map(|(i, l)| (l.id.as_str(), i)).collect();
        let mut segments = Vec::with_capacity(self.segments.len());
        for (id, from, to, profile, capacity) in self.segments {
            let resolve = |loc: &str| {
                lookup
                    .get(loc)
                    .copied()
                    .ok_or_else(|| ModelError::UnknownLocation { segment: id.clone(), location: loc.to_string() })
            };
            let (from, to) = (resolve(&from)?, resolve(&to)?);
            segments.push(RouteSegment { id, from, to, profile, mode: None, capacity, synthetic: false });
        }
        Network::new(self.unit, self.locations, segments, self.period, self.waiting)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe1_ab() -> TravelTimeProfile {
        TravelTimeProfile::from_ticks(&[(0, 60), (1020, 10), (1080, 60)]).unwrap()
    }

    #[test]
    fn constant_profile_is_constant() {
        let p = TravelTimeProfile::constant(Duration::from_ticks(60));
        for t in [0, 1, 500, 100_000] {
            assert_eq!(profile_duration(&p, TimePoint::from_ticks(t)).unwrap(), Duration::from_ticks(60));
        }
    }

    #[test]
    fn rush_hour_piece_lookup() {
        let p = pe1_ab();
        assert_eq!(p.duration_at(TimePoint::from_ticks(1020)).unwrap(), Duration::from_ticks(10));
        assert_eq!(p.duration_at(TimePoint::from_ticks(1019)).unwrap(), Duration::from_ticks(60));
        assert_eq!(p.duration_at(TimePoint::from_ticks(1079)).unwrap(), Duration::from_ticks(10));
        assert_eq!(p.duration_at(TimePoint::from_ticks(1080)).unwrap(), Duration::from_ticks(60));
        // half-tick instants inside a piece
        assert_eq!(p.duration_at(TimePoint::from_half_ticks(2039)).unwrap(), Duration::from_ticks(60));
    }

    #[test]
    fn lookup_before_first_breakpoint_is_a_domain_error() {
        let p = TravelTimeProfile::from_ticks(&[(5, 3)]).unwrap();
        assert!(matches!(p.duration_at(TimePoint::from_ticks(4)), Err(ModelError::BeforeProfileStart { .. })));
    }

    #[test]
    fn unsorted_breakpoints_rejected() {
        let err = TravelTimeProfile::from_ticks(&[(10, 1), (5, 1)]).unwrap_err();
        assert!(err.to_string().contains("unsorted profile"));
        assert_eq!(TravelTimeProfile::from_ticks(&[]).unwrap_err(), ModelError::EmptyProfile);
    }

    #[test]
    fn fifo_check_cases() {
        let grid = Period::from_ticks(0, 1439).unwrap();
        let constant = TravelTimeProfile::constant(Duration::from_ticks(60));
        assert!(fifo_check(&constant, grid).is_empty());

        let v = fifo_check(&pe1_ab(), grid);
        assert!(v.contains(&TimePoint::from_ticks(1019)));
        assert_eq!(v, vec![TimePoint::from_ticks(1019)]);

        let drop = TravelTimeProfile::from_ticks(&[(0, 50), (10, 45)]).unwrap();
        assert_eq!(fifo_check(&drop, Period::from_ticks(0, 20).unwrap()), vec![TimePoint::from_ticks(9)]);
    }

    #[test]
    fn durations_within_window() {
        let p = pe1_ab();
        let w: Vec<_> = p.durations_within(TimePoint::from_ticks(0), TimePoint::from_ticks(1019)).collect();
        assert_eq!(w, vec![Duration::from_ticks(60)]);
        let w: Vec<_> = p.durations_within(TimePoint::from_ticks(1079), TimePoint::from_ticks(1200)).collect();
        assert_eq!(w, vec![Duration::from_ticks(10), Duration::from_ticks(60)]);
    }

    #[test]
    fn builder_rejects_duplicates_and_unknown_ids() {
        let p = Period::from_ticks(0, 10).unwrap();
        let dup = Network::builder(p).location("a").location("a").build();
        assert_eq!(dup.unwrap_err(), ModelError::DuplicateLocation("a".into()));
        let unknown = Network::builder(p).location("a").constant("r", "a", "z", 3).build();
        assert!(matches!(unknown, Err(ModelError::UnknownLocation { .. })));
        let dup_seg = Network::builder(p)
            .location("a")
            .location("b")
            .constant("r", "a", "b", 3)
            .constant("r", "b", "a", 3)
            .build();
        assert_eq!(dup_seg.unwrap_err(), ModelError::DuplicateSegment("r".into()));
    }

    #[test]
    fn period_grid_is_inclusive() {
        let p = Period::from_ticks(3, 6).unwrap();
        let ticks: Vec<_> = p.grid().map(|t| t.to_string()).collect();
        assert_eq!(ticks, ["3", "4", "5", "6"]);
        assert_eq!(p.tick_count(), 4);
        assert!(Period::from_ticks(5, 4).is_err());
    }
}
