//! Sensitivity analyses built on the max-min metric: stability under removal
//! of the fastest route, capacity scenarios and rolling periods.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, SearchPolicy};
use crate::metric::{maxmin_metric, regularized, MetricError, MetricMatrix, MetricValue};
use crate::model::{ModelError, Network, Period, WaitingPolicy};
use crate::time::{Duration, TimePoint};
use crate::validate::{validate_network, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("network must be regularized first")]
    NotRegularized,
    #[error("scenario `{scenario}` references unknown segment `{segment}`")]
    UnknownSegment { scenario: String, segment: String },
    #[error("existence requirement violated after removing at-capacity segments")]
    Existence(Box<ValidationReport>),
    #[error("window length and stride must be positive")]
    BadRollingSpec,
    #[error("window of length {window} does not fit in the data period {start}..={end}")]
    WindowOutsidePeriod { window: Duration, start: TimePoint, end: TimePoint },
}

impl From<EngineError> for AnalysisError {
    fn from(e: EngineError) -> Self {
        Self::Metric(e.into())
    }
}

impl From<ModelError> for AnalysisError {
    fn from(e: ModelError) -> Self {
        Self::Metric(e.into())
    }
}

/// A departure where no second walk exists within the enumeration budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlaggedCell {
    pub from: String,
    pub to: String,
    /// First offending tick.
    pub departure: TimePoint,
    /// Number of offending ticks.
    pub ticks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub baseline: MetricMatrix,
    pub excluded: MetricMatrix,
    /// `excluded - baseline`, elementwise.
    pub delta: Vec<Vec<MetricValue>>,
    pub flagged: Vec<FlaggedCell>,
}

/// The two best walks found so far to one destination, ordered by
/// `(arrival, segment id sequence)`.
#[derive(Default, Clone)]
struct TopTwo {
    best: Vec<(TimePoint, Vec<usize>)>,
}

impl TopTwo {
    fn offer(&mut self, arrival: TimePoint, walk: &[usize], net: &Network) {
        let key = |w: &[usize]| w.iter().map(|&s| net.segments()[s].id.as_str()).collect::<Vec<_>>();
        let candidate = (arrival, walk.to_vec());
        let pos = self.best.iter().position(|(a, w)| (arrival, key(walk)) < (*a, key(w))).unwrap_or(self.best.len());
        if pos < 2 {
            self.best.insert(pos, candidate);
            self.best.truncate(2);
        }
    }

    fn second(&self) -> Option<TimePoint> {
        self.best.get(1).map(|p| p.0)
    }
}

struct WalkEnumerator<'a> {
    net: &'a Network,
    budget: usize,
    top: Vec<TopTwo>,
    origin: usize,
    path: Vec<usize>,
}

impl WalkEnumerator<'_> {
    fn boardable(&self, seg: usize, at: TimePoint) -> bool {
        let s = &self.net.segments()[seg];
        let end = self.net.period().end;
        s.profile.duration_at(at).is_ok() && if s.synthetic { at > end } else { at <= end }
    }

    /// Nothing an extension can reach beats every destination's second best.
    fn dominated(&self, now: TimePoint) -> bool {
        self.top
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.origin)
            .all(|(_, t)| t.second().is_some_and(|s| now >= s))
    }

    fn walk(&mut self, node: usize, now: TimePoint) {
        if !self.path.is_empty() {
            let net = self.net;
            let path = std::mem::take(&mut self.path);
            self.top[node].offer(now, &path, net);
            self.path = path;
        }
        if self.path.len() == self.budget || self.dominated(now) {
            return;
        }
        for si in 0..self.net.segments().len() {
            let seg = &self.net.segments()[si];
            if seg.from != node || !self.boardable(si, now) {
                continue;
            }
            let arrive = now + seg.profile.duration_at(now).unwrap();
            self.path.push(si);
            self.walk(seg.to, arrive);
            self.path.pop();
        }
    }
}

/// Second-best walk times (no waiting) from `origin` at `t` to every location.
fn second_best_from(net: &Network, origin: usize, t: TimePoint, budget: usize) -> Vec<Option<Duration>> {
    let mut e =
        WalkEnumerator { net, budget, top: vec![TopTwo::default(); net.locations().len()], origin, path: Vec::new() };
    e.walk(origin, t);
    e.top.iter().map(|top| top.second().map(|a| a - t)).collect()
}

/// Compares the max-min metric against the same metric computed after
/// removing, for every `(a, b, t)`, the single fastest walk.
///
/// Walks are enumerated without waiting (a waiting variant of the fastest
/// walk would make the exclusion meaningless) up to `2 |M|` edges.
#[allow(clippy::needless_range_loop)]
pub fn stability_metric(net: &Network) -> Result<StabilityReport, AnalysisError> {
    if !net.is_regularized() {
        return Err(AnalysisError::NotRegularized);
    }
    let policy = SearchPolicy::new(WaitingPolicy::NoWaiting);
    let baseline = maxmin_metric(net, policy)?;
    let n = net.locations().len();
    let budget = 2 * n;

    let mut worst = vec![vec![Some(Duration::ZERO); n]; n];
    let mut flags: BTreeMap<(usize, usize), (TimePoint, usize)> = BTreeMap::new();
    for a in 0..n {
        for t in net.period().grid() {
            let second = second_best_from(net, a, t, budget);
            for b in (0..n).filter(|&b| b != a) {
                match second[b] {
                    Some(d) => {
                        if let Some(w) = &mut worst[a][b] {
                            *w = (*w).max(d);
                        }
                    }
                    None => {
                        worst[a][b] = None;
                        flags.entry((a, b)).and_modify(|f| f.1 += 1).or_insert((t, 1));
                    }
                }
            }
        }
    }

    let values: Vec<Vec<MetricValue>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| MetricValue::from_duration(worst[i][j]).max(MetricValue::from_duration(worst[j][i])))
                .collect()
        })
        .collect();
    let delta = (0..n).map(|i| (0..n).map(|j| values[i][j].minus(baseline.values[i][j])).collect()).collect();
    let excluded = MetricMatrix { values, ..baseline.clone() };
    let flagged = flags
        .into_iter()
        .map(|((a, b), (departure, ticks))| FlaggedCell {
            from: net.location_id(a).into(),
            to: net.location_id(b).into(),
            departure,
            ticks,
        })
        .collect();
    Ok(StabilityReport { baseline, excluded, delta, flagged })
}

/// Assumed existing traffic per segment id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityScenario {
    pub name: String,
    #[serde(default)]
    pub volumes: BTreeMap<String, u32>,
}

/// The max-min metric with every at-capacity segment removed.
///
/// The input may or may not be regularized; the reduced network is
/// revalidated and regularized from scratch.
pub fn capacity_scenario(net: &Network, scenario: &CapacityScenario) -> Result<MetricMatrix, AnalysisError> {
    for id in scenario.volumes.keys() {
        if net.segment(id).is_none_or(|s| s.synthetic) {
            return Err(AnalysisError::UnknownSegment { scenario: scenario.name.clone(), segment: id.clone() });
        }
    }
    let reduced =
        net.without_regularization().retain_segments(|seg| match (seg.capacity, scenario.volumes.get(&seg.id)) {
            (Some(cap), Some(&volume)) => volume < cap,
            _ => true,
        });
    let report = validate_network(&reduced);
    if !report.ok {
        return Err(AnalysisError::Existence(Box::new(report)));
    }
    let reg = regularized(&reduced)?;
    Ok(maxmin_metric(&reg, SearchPolicy::for_network(&reg))?)
}

/// Sliding windows `[t - window, t]` advanced by `stride`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RollingSpec {
    pub window: Duration,
    pub stride: Duration,
}

impl RollingSpec {
    pub fn new(window: Duration, stride: Duration) -> Result<Self, AnalysisError> {
        if window.is_zero() || stride.is_zero() {
            return Err(AnalysisError::BadRollingSpec);
        }
        Ok(Self { window, stride })
    }

    pub fn from_ticks(window: i64, stride: i64) -> Result<Self, AnalysisError> {
        if window <= 0 || stride <= 0 {
            return Err(AnalysisError::BadRollingSpec);
        }
        Self::new(Duration::from_ticks(window), Duration::from_ticks(stride))
    }

    /// Window end ticks inside `data`.
    pub fn evaluation_times(&self, data: Period) -> Result<Vec<TimePoint>, AnalysisError> {
        let first = data.start + self.window;
        if first > data.end {
            return Err(AnalysisError::WindowOutsidePeriod { window: self.window, start: data.start, end: data.end });
        }
        let mut out = Vec::new();
        let mut t = first;
        while t <= data.end {
            out.push(t);
            t = t + self.stride;
        }
        Ok(out)
    }
}

/// One max-min metric per window, each regularized relative to its own
/// window.
pub fn rolling_metrics(net: &Network, spec: &RollingSpec) -> Result<Vec<(TimePoint, MetricMatrix)>, AnalysisError> {
    let data = net.period();
    spec.evaluation_times(data)?
        .into_iter()
        .map(|end| {
            let start = TimePoint::from_half_ticks(end.half_ticks() - spec.window.half_ticks());
            let windowed = net.with_period(Period::new(start, end)?);
            let reg = regularized(&windowed)?;
            Ok((end, maxmin_metric(&reg, SearchPolicy::for_network(&reg))?))
        })
        .collect()
}
