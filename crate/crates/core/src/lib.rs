//! Travel-time metrics over time-dependent route networks.
//!
//! A [`Network`] holds locations, route segments with piecewise-constant
//! travel-time profiles and an aggregation period. The [`engine`] answers
//! earliest-arrival queries; [`metric`] aggregates best travel times over the
//! period into a symmetric distance matrix and checks the metric axioms;
//! [`analysis`] layers stability, capacity and rolling-window studies on top.
//!
//! All times are integer ticks in the network's unit. Internally they are
//! stored in half-ticks so regularization durations stay exact.

pub mod analysis;
pub mod builtin;
pub mod engine;
pub mod io;
pub mod metric;
pub mod model;
pub mod oracle;
pub mod time;
pub mod validate;

pub use analysis::{
    capacity_scenario, rolling_metrics, stability_metric, AnalysisError, CapacityScenario, FlaggedCell, RollingSpec,
    StabilityReport,
};
pub use builtin::{builtin_example, BuiltinExample};
pub use engine::{
    best_travel_time, check_td_triangle, earliest_arrival, Algorithm, ArrivalLabels, EngineError, Leg, Router,
    SearchPolicy, TriangleOutcome,
};
pub use io::{
    load_network, load_scenario, network_to_json, parse_matrix_json, to_json, write_matrix, IoError, MatrixFormat,
    NetworkDocument,
};
pub use metric::{
    aggregate, best_time_table, compute_epsilon, construct_integral_violation, directed_worst_best,
    directed_worst_best_matrix, integral_aggregate, maxmin_metric, minmin_aggregate, regularize, regularized,
    verify_metric_axioms, Aggregator, AxiomReport, BestTimeTable, EpsilonChoice, MetricError, MetricMatrix,
    MetricValue,
};
pub use model::{
    fifo_check, profile_duration, Location, ModelError, Network, NetworkBuilder, Period, RouteSegment,
    TravelTimeProfile, WaitingPolicy,
};
pub use oracle::oracle_best_travel_time;
pub use time::{Duration, TimePoint};
pub use validate::{validate_network, Rule, ValidationReport, Violation, Witness};
