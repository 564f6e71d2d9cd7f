//! Aggregation of best travel times over departure times and direction.
//!
//! [`maxmin_metric`] takes, for each unordered pair, the worst best travel
//! time over the period in either direction. On a regularized network
//! satisfying the consistency requirements it is a metric. The min-min and
//! uniform-mean aggregates are kept as reproducible counterexamples.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_rational::Ratio;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::engine::{EngineError, Router, SearchPolicy};
use crate::model::{ModelError, Network, Period, RouteSegment, TravelTimeProfile};
use crate::time::{format_ticks, Duration, TimePoint};

pub use crate::builtin::integral_violation as construct_integral_violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("network has no route segments")]
    NoSegments,
    #[error("network is already regularized")]
    AlreadyRegularized,
    #[error("epsilon {eps} must be positive and below the shortest route duration {min}")]
    InvalidEpsilon { eps: Duration, min: Duration },
    #[error("no route from `{from}` to `{to}` departing at {departure}")]
    Unreachable { from: String, to: String, departure: TimePoint },
}

/// An exact aggregated value in input ticks, or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetricValue(Option<Ratio<i64>>);

impl MetricValue {
    pub const INFINITE: MetricValue = MetricValue(None);
    pub const ZERO: MetricValue = MetricValue(Some(Ratio::new_raw(0, 1)));

    pub fn finite(ticks: Ratio<i64>) -> Self {
        Self(Some(ticks))
    }

    pub fn ticks(t: i64) -> Self {
        Self(Some(Ratio::from_integer(t)))
    }

    pub fn from_duration(d: Option<Duration>) -> Self {
        Self(d.map(Duration::ticks))
    }

    pub fn as_ratio(self) -> Option<Ratio<i64>> {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_none()
    }

    pub fn is_zero(self) -> bool {
        self.0 == Some(Ratio::from_integer(0))
    }

    /// `self - other`; infinite if either side is.
    pub fn minus(self, other: MetricValue) -> MetricValue {
        match (self.0, other.0) {
            (Some(a), Some(b)) => Self(Some(a - b)),
            _ => Self::INFINITE,
        }
    }

    pub fn scaled(self, k: i64) -> MetricValue {
        Self(self.0.map(|r| r * k))
    }
}

impl Ord for MetricValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        }
    }
}

impl PartialOrd for MetricValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for MetricValue {
    type Output = MetricValue;

    fn add(self, rhs: MetricValue) -> MetricValue {
        match (self.0, rhs.0) {
            (Some(a), Some(b)) => Self(Some(a + b)),
            _ => Self::INFINITE,
        }
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(r) => f.write_str(&format_ticks(r)),
            None => f.write_str("inf"),
        }
    }
}

struct MetricValueVisitor;

impl Visitor<'_> for MetricValueVisitor {
    type Value = MetricValue;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a tick count, a \"p/q\" string or \"inf\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<MetricValue, E> {
        Ok(MetricValue::ticks(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<MetricValue, E> {
        i64::try_from(v).map(MetricValue::ticks).map_err(|_| E::custom("value out of range"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<MetricValue, E> {
        let doubled = v * 2.0;
        if doubled.fract() != 0.0 || !doubled.is_finite() || doubled.abs() > (1u64 << 52) as f64 {
            return Err(E::custom(format!("{v} is not a multiple of half a tick")));
        }
        Ok(MetricValue::finite(Ratio::new(doubled as i64, 2)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<MetricValue, E> {
        if v == "inf" {
            return Ok(MetricValue::INFINITE);
        }
        let bad = || E::custom(format!("malformed metric value `{v}`"));
        let (p, q) = v.split_once('/').ok_or_else(bad)?;
        let (p, q): (i64, i64) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
        if q <= 0 {
            return Err(bad());
        }
        Ok(MetricValue::finite(Ratio::new(p, q)))
    }
}

impl<'de> Deserialize<'de> for MetricValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(MetricValueVisitor)
    }
}

/// JSON encoding: integers and half-ticks as numbers, other rationals as
/// `"p/q"` strings, infinity as `"inf"`.
impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            None => s.serialize_str("inf"),
            Some(r) if r.is_integer() => s.serialize_i64(r.to_integer()),
            Some(r) if *r.denom() == 2 => s.serialize_f64(*r.numer() as f64 / 2.0),
            Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Aggregator {
    MaxMin,
    MinMin,
    IntegralUniform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricMatrix {
    pub aggregator: Aggregator,
    pub symmetrized: bool,
    pub regularized: bool,
    pub unit: String,
    pub period: Period,
    pub locations: Vec<String>,
    pub values: Vec<Vec<MetricValue>>,
}

impl MetricMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<MetricValue> {
        let i = self.locations.iter().position(|l| l == a)?;
        let j = self.locations.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// Best travel times `T(a, b, t)` for every ordered pair and period tick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestTimeTable {
    pub ticks: Vec<TimePoint>,
    /// Indexed `[origin][destination][tick]`; `None` means unreachable.
    pub values: Vec<Vec<Vec<Option<Duration>>>>,
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Evaluates the best travel-time function over every period tick.
pub fn best_time_table(net: &Network, policy: SearchPolicy) -> Result<BestTimeTable, EngineError> {
    let router = Router::new(net, policy);
    let n = net.locations().len();
    let ticks: Vec<TimePoint> = net.period().grid().collect();
    let jobs: Vec<(usize, usize)> = (0..n).flat_map(|o| (0..ticks.len()).map(move |k| (o, k))).collect();
    let rows = par_map(&jobs, |&(origin, k)| {
        router
            .earliest_arrival(origin, ticks[k])
            .map(|labels| (0..n).map(|b| labels.travel_time(b)).collect::<Vec<_>>())
    });
    let mut values = vec![vec![vec![None; ticks.len()]; n]; n];
    for (&(origin, k), row) in jobs.iter().zip(rows) {
        for (dest, tt) in row?.into_iter().enumerate() {
            values[origin][dest][k] = tt;
        }
    }
    Ok(BestTimeTable { ticks, values })
}

fn location_ids(net: &Network) -> Vec<String> {
    net.locations().iter().map(|l| l.id.clone()).collect()
}

fn matrix(net: &Network, aggregator: Aggregator, symmetrized: bool, values: Vec<Vec<MetricValue>>) -> MetricMatrix {
    MetricMatrix {
        aggregator,
        symmetrized,
        regularized: net.is_regularized(),
        unit: net.unit().to_string(),
        period: net.period(),
        locations: location_ids(net),
        values,
    }
}

/// Directed worst-case best travel times `T_U(a, b)` for every ordered pair.
#[allow(clippy::needless_range_loop)]
fn directed_table(net: &Network, table: &BestTimeTable) -> Result<Vec<Vec<MetricValue>>, MetricError> {
    let n = net.locations().len();
    let mut out = vec![vec![MetricValue::ZERO; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut worst = Duration::ZERO;
            for (k, tt) in table.values[a][b].iter().enumerate() {
                match tt {
                    Some(d) => worst = worst.max(*d),
                    None => {
                        return Err(MetricError::Unreachable {
                            from: net.location_id(a).into(),
                            to: net.location_id(b).into(),
                            departure: table.ticks[k],
                        })
                    }
                }
            }
            out[a][b] = MetricValue::from_duration(Some(worst));
        }
    }
    Ok(out)
}

/// `T_U(a, b)`: the largest best travel time over period ticks.
///
/// After regularization, departures past the period end only see the
/// regularization duration, which is below every real duration, so the scan
/// stops at the period end.
pub fn directed_worst_best(net: &Network, a: &str, b: &str, policy: SearchPolicy) -> Result<MetricValue, MetricError> {
    let ia = net.location_index(a).ok_or_else(|| EngineError::UnknownLocation(a.into()))?;
    let ib = net.location_index(b).ok_or_else(|| EngineError::UnknownLocation(b.into()))?;
    if ia == ib {
        return Ok(MetricValue::ZERO);
    }
    let router = Router::new(net, policy);
    let mut worst = Duration::ZERO;
    for t in net.period().grid() {
        match router.earliest_arrival(ia, t)?.travel_time(ib) {
            Some(d) => worst = worst.max(d),
            None => return Err(MetricError::Unreachable { from: a.into(), to: b.into(), departure: t }),
        }
    }
    Ok(MetricValue::from_duration(Some(worst)))
}

/// The unsymmetrized worst-case matrix `T_U`.
pub fn directed_worst_best_matrix(net: &Network, policy: SearchPolicy) -> Result<MetricMatrix, MetricError> {
    let table = best_time_table(net, policy)?;
    Ok(matrix(net, Aggregator::MaxMin, false, directed_table(net, &table)?))
}

/// Symmetrizes a directed table by taking the larger direction.
fn symmetrize(values: &[Vec<MetricValue>]) -> Vec<Vec<MetricValue>> {
    let n = values.len();
    (0..n).map(|i| (0..n).map(|j| values[i][j].max(values[j][i])).collect()).collect()
}

/// The max-min metric: `max(T_U(a,b), T_U(b,a))`.
pub fn maxmin_metric(net: &Network, policy: SearchPolicy) -> Result<MetricMatrix, MetricError> {
    let table = best_time_table(net, policy)?;
    maxmin_from_table(net, &table)
}

pub(crate) fn maxmin_from_table(net: &Network, table: &BestTimeTable) -> Result<MetricMatrix, MetricError> {
    let directed = directed_table(net, table)?;
    Ok(matrix(net, Aggregator::MaxMin, true, symmetrize(&directed)))
}

/// Minimum over period ticks of `T(a, b, t)`. Not a metric in general.
pub fn minmin_aggregate(net: &Network, policy: SearchPolicy) -> Result<MetricMatrix, MetricError> {
    let table = best_time_table(net, policy)?;
    let n = net.locations().len();
    let values = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        return MetricValue::ZERO;
                    }
                    MetricValue::from_duration(table.values[a][b].iter().flatten().min().copied())
                })
                .collect()
        })
        .collect();
    Ok(matrix(net, Aggregator::MinMin, false, values))
}

/// Uniform mean over period ticks of `T(a, b, t)`, exact. Not a metric in
/// general.
pub fn integral_aggregate(net: &Network, policy: SearchPolicy) -> Result<MetricMatrix, MetricError> {
    let table = best_time_table(net, policy)?;
    let n = net.locations().len();
    let count = table.ticks.len() as i64;
    let values = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        return MetricValue::ZERO;
                    }
                    let total: Option<i64> = table.values[a][b].iter().map(|d| d.map(Duration::half_ticks)).sum();
                    MetricValue(total.map(|half| Ratio::new(half, 2 * count)))
                })
                .collect()
        })
        .collect();
    Ok(matrix(net, Aggregator::IntegralUniform, false, values))
}

/// Runs the chosen aggregator.
pub fn aggregate(net: &Network, aggregator: Aggregator, policy: SearchPolicy) -> Result<MetricMatrix, MetricError> {
    match aggregator {
        Aggregator::MaxMin => maxmin_metric(net, policy),
        Aggregator::MinMin => minmin_aggregate(net, policy),
        Aggregator::IntegralUniform => integral_aggregate(net, policy),
    }
}

/// The regularization duration and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EpsilonChoice {
    pub value: Duration,
    /// Shortest real duration over the period.
    pub minimum: Duration,
    /// Segment attaining `minimum`.
    pub segment: String,
    /// Number of (segment, profile piece) combinations overlapping the period.
    pub pieces_considered: usize,
}

fn shortest_real_duration(net: &Network) -> Option<(Duration, &RouteSegment, usize)> {
    let period = net.period();
    let mut pieces = 0;
    let mut best: Option<(Duration, &RouteSegment)> = None;
    for seg in net.segments().iter().filter(|s| !s.synthetic) {
        for d in seg.profile.durations_within(period.start, period.end) {
            pieces += 1;
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, seg));
            }
        }
    }
    best.map(|(d, s)| (d, s, pieces))
}

/// Half the shortest real route duration occurring over the period.
pub fn compute_epsilon(net: &Network) -> Result<EpsilonChoice, MetricError> {
    let (minimum, seg, pieces_considered) = shortest_real_duration(net).ok_or(MetricError::NoSegments)?;
    let value = Duration::from_half_ticks(minimum.half_ticks() / 2);
    if value.is_zero() {
        return Err(MetricError::InvalidEpsilon { eps: value, min: minimum });
    }
    Ok(EpsilonChoice { value, minimum, segment: seg.id.clone(), pieces_considered })
}

/// Adds one synthetic route of duration `eps` per ordered pair, boardable
/// only after the period end.
pub fn regularize(net: &Network, eps: &EpsilonChoice) -> Result<Network, MetricError> {
    if net.is_regularized() {
        return Err(MetricError::AlreadyRegularized);
    }
    let (minimum, _, _) = shortest_real_duration(net).ok_or(MetricError::NoSegments)?;
    if eps.value.is_zero() || eps.value >= minimum {
        return Err(MetricError::InvalidEpsilon { eps: eps.value, min: minimum });
    }
    let start = TimePoint::from_half_ticks(net.period().end.half_ticks() + 1);
    let profile = TravelTimeProfile::new(vec![(start, eps.value)])?;
    let n = net.locations().len();
    let mut extra = Vec::with_capacity(n * n.saturating_sub(1));
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            let mut id = format!("~eps:{}->{}", net.location_id(from), net.location_id(to));
            while net.segment(&id).is_some() {
                id.push('\'');
            }
            extra.push(RouteSegment {
                id,
                from,
                to,
                profile: profile.clone(),
                mode: None,
                capacity: None,
                synthetic: true,
            });
        }
    }
    Ok(net.clone().into_regularized(extra))
}

/// [`compute_epsilon`] followed by [`regularize`].
pub fn regularized(net: &Network) -> Result<Network, MetricError> {
    regularize(net, &compute_epsilon(net)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub a: String,
    pub b: String,
    pub ab: MetricValue,
    pub ba: MetricValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleWitness {
    pub a: String,
    pub b: String,
    pub c: String,
    /// `m(a, c)`
    pub lhs: MetricValue,
    /// `m(a, b) + m(b, c)`
    pub rhs: MetricValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck<W> {
    pub passed: bool,
    pub witnesses: Vec<W>,
}

impl<W> AxiomCheck<W> {
    fn from_witnesses(witnesses: Vec<W>) -> Self {
        Self { passed: witnesses.is_empty(), witnesses }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AxiomReport {
    pub non_negativity: AxiomCheck<PairWitness>,
    pub identity_of_indiscernibles: AxiomCheck<PairWitness>,
    pub symmetry: AxiomCheck<PairWitness>,
    pub triangle: AxiomCheck<TriangleWitness>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.non_negativity.passed
            && self.identity_of_indiscernibles.passed
            && self.symmetry.passed
            && self.triangle.passed
    }
}

/// Exhaustively checks the four metric axioms on a matrix.
pub fn verify_metric_axioms(m: &MetricMatrix) -> AxiomReport {
    let n = m.len();
    let v = &m.values;
    let id = |i: usize| m.locations[i].clone();
    let pair = |i: usize, j: usize| PairWitness { a: id(i), b: id(j), ab: v[i][j], ba: v[j][i] };

    let mut negative = Vec::new();
    let mut identity = Vec::new();
    let mut asymmetric = Vec::new();
    let mut triangle = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if v[i][j] < MetricValue::ZERO {
                negative.push(pair(i, j));
            }
            if (i == j) != v[i][j].is_zero() {
                identity.push(pair(i, j));
            }
            if i < j && v[i][j] != v[j][i] {
                asymmetric.push(pair(i, j));
            }
            for k in 0..n {
                let rhs = v[i][j] + v[j][k];
                if v[i][k] > rhs {
                    triangle.push(TriangleWitness { a: id(i), b: id(j), c: id(k), lhs: v[i][k], rhs });
                }
            }
        }
    }
    AxiomReport {
        non_negativity: AxiomCheck::from_witnesses(negative),
        identity_of_indiscernibles: AxiomCheck::from_witnesses(identity),
        symmetry: AxiomCheck::from_witnesses(asymmetric),
        triangle: AxiomCheck::from_witnesses(triangle),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{boundary_example, minmin_counterexample};
    use crate::model::{Period, WaitingPolicy};

    fn v(t: i64) -> MetricValue {
        MetricValue::ticks(t)
    }

    fn policy(net: &Network) -> SearchPolicy {
        SearchPolicy::for_network(net)
    }

    #[test]
    fn epsilon_is_half_the_shortest_duration() {
        assert_eq!(compute_epsilon(&boundary_example()).unwrap().value, Duration::from_ticks(15));
        let pe1 = compute_epsilon(&minmin_counterexample()).unwrap();
        assert_eq!(pe1.value, Duration::from_ticks(5));
        assert_eq!(pe1.segment, "r1");

        let single = Network::builder(Period::from_ticks(0, 3).unwrap())
            .location("a")
            .location("b")
            .constant("ab", "a", "b", 7)
            .build()
            .unwrap();
        let eps = compute_epsilon(&single).unwrap();
        assert_eq!(eps.value, Duration::from_half_ticks(7));
        assert_eq!(eps.value.to_string(), "3.5");

        let empty = Network::builder(Period::from_ticks(0, 3).unwrap()).location("a").build().unwrap();
        assert_eq!(compute_epsilon(&empty).unwrap_err(), MetricError::NoSegments);
    }

    #[test]
    fn epsilon_ignores_pieces_outside_the_period() {
        let net = minmin_counterexample().with_period(Period::from_ticks(0, 500).unwrap());
        assert_eq!(compute_epsilon(&net).unwrap().value, Duration::from_ticks(22) + Duration::from_half_ticks(1));
    }

    #[test]
    fn regularization_adds_one_route_per_ordered_pair() {
        let net = boundary_example();
        let reg = regularized(&net).unwrap();
        assert!(reg.is_regularized());
        let synthetic: Vec<_> = reg.segments().iter().filter(|s| s.synthetic).collect();
        assert_eq!(synthetic.len(), 3 * 2);
        assert_eq!(reg.segments().len(), net.segments().len() + 6);
        assert_eq!(regularized(&reg).unwrap_err(), MetricError::AlreadyRegularized);

        let eps = compute_epsilon(&net).unwrap();
        let bad = EpsilonChoice { value: Duration::from_ticks(30), ..eps };
        assert!(matches!(regularize(&net, &bad), Err(MetricError::InvalidEpsilon { .. })));
    }

    #[test]
    fn rush_hour_directed_maxima() {
        let net = minmin_counterexample();
        let p = policy(&net);
        assert_eq!(directed_worst_best(&net, "a", "b", p).unwrap(), v(60));
        assert_eq!(directed_worst_best(&net, "a", "c", p).unwrap(), v(45));
        assert_eq!(directed_worst_best(&net, "a", "a", p).unwrap(), v(0));
    }

    #[test]
    fn boundary_directed_maxima() {
        let raw = boundary_example();
        assert_eq!(directed_worst_best(&raw, "a", "c", policy(&raw)).unwrap(), v(120));
        let reg = regularized(&raw).unwrap();
        assert_eq!(directed_worst_best(&reg, "a", "c", policy(&reg)).unwrap(), v(60));
    }

    #[test]
    fn maxmin_values_and_axioms() {
        let reg = regularized(&boundary_example()).unwrap();
        let m = maxmin_metric(&reg, policy(&reg)).unwrap();
        assert_eq!(m.get("a", "b"), Some(v(30)));
        assert_eq!(m.get("b", "c"), Some(v(30)));
        assert_eq!(m.get("a", "c"), Some(v(60)));
        assert!(m.symmetrized && m.regularized);
        assert!(verify_metric_axioms(&m).all_pass());
        for i in 0..3 {
            assert!(m.values[i][i].is_zero());
        }
    }

    #[test]
    fn minmin_violates_triangle_on_rush_hour_network() {
        let reg = regularized(&minmin_counterexample()).unwrap();
        let m = minmin_aggregate(&reg, policy(&reg)).unwrap();
        assert_eq!((m.get("a", "b"), m.get("b", "c"), m.get("a", "c")), (Some(v(10)), Some(v(10)), Some(v(45))));
        let report = verify_metric_axioms(&m);
        assert!(!report.triangle.passed);
        assert!(report.triangle.witnesses.contains(&TriangleWitness {
            a: "a".into(),
            b: "b".into(),
            c: "c".into(),
            lhs: v(45),
            rhs: v(20),
        }));
    }

    #[test]
    fn minmin_picks_up_regularization_shortcuts() {
        let reg = regularized(&boundary_example().with_waiting(WaitingPolicy::NoWaiting)).unwrap();
        let p = policy(&reg);
        let maxmin = maxmin_metric(&reg, p).unwrap();
        let minmin = minmin_aggregate(&reg, p).unwrap();
        // a -> c is 60 while the composed route fits in the period, 45 after.
        assert_eq!(minmin.get("a", "c"), Some(v(45)));
        assert_eq!(minmin.get("a", "b"), maxmin.get("a", "b"));
        let mean = integral_aggregate(&reg, p).unwrap();
        assert_eq!(mean.get("a", "b"), Some(v(30)));
        assert_eq!(mean.get("a", "a"), Some(v(0)));
    }

    #[test]
    fn unregularized_boundary_breaks_the_triangle() {
        let raw = boundary_example();
        let m = directed_worst_best_matrix(&raw, policy(&raw)).unwrap();
        assert_eq!((m.get("a", "c"), m.get("a", "b"), m.get("b", "c")), (Some(v(120)), Some(v(30)), Some(v(30))));
        assert!(!verify_metric_axioms(&m).triangle.passed);
    }

    #[test]
    fn unreachable_pairs_are_errors_for_maxmin() {
        let net = boundary_example().retain_segments(|s| s.id != "r2" && s.id != "r1");
        let err = maxmin_metric(&net, policy(&net)).unwrap_err();
        assert!(matches!(err, MetricError::Unreachable { ref from, .. } if from == "a"));
    }

    #[test]
    fn infinite_values_order_last() {
        assert!(MetricValue::INFINITE > v(1_000_000));
        assert_eq!(v(3) + MetricValue::INFINITE, MetricValue::INFINITE);
        assert_eq!(MetricValue::INFINITE.to_string(), "inf");
        assert_eq!(serde_json::to_string(&MetricValue::finite(Ratio::new(1, 3))).unwrap(), "\"1/3\"");
        assert_eq!(serde_json::to_string(&MetricValue::finite(Ratio::new(5, 2))).unwrap(), "2.5");
    }

    #[test]
    fn witnesses_reproduce_on_the_matrix() {
        let mut m =
            maxmin_metric(&regularized(&boundary_example()).unwrap(), SearchPolicy::new(WaitingPolicy::WaitingAllowed))
                .unwrap();
        m.values[0][2] = v(100);
        let report = verify_metric_axioms(&m);
        assert!(!report.symmetry.passed);
        for w in &report.triangle.witnesses {
            assert_eq!(m.get(&w.a, &w.c), Some(w.lhs));
            assert_eq!(m.get(&w.a, &w.b).unwrap() + m.get(&w.b, &w.c).unwrap(), w.rhs);
            assert!(w.lhs > w.rhs);
        }
        assert_eq!(report.triangle.witnesses.len(), 1);
    }
}
