//! JSON network documents, scenario files and matrix export.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::CapacityScenario;
use crate::metric::MetricMatrix;
use crate::model::{Location, ModelError, Network, Period, RouteSegment, TravelTimeProfile, WaitingPolicy};
use crate::time::{Duration, TimePoint};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("{}", located(.path, .message))]
    Parse { path: String, message: String },
    #[error("unsupported schemaVersion {0} (expected {SCHEMA_VERSION})")]
    UnsupportedVersion(u32),
    #[error("regularized networks cannot be written as documents; serialize the source network")]
    RegularizedNetwork,
    #[error("segment `{0}` has a breakpoint or duration off the whole-tick grid")]
    OffGrid(String),
}

fn located(path: &str, message: &str) -> String {
    if path.is_empty() || path == "." || path == "?" {
        message.to_string()
    } else {
        format!("{path}: {message}")
    }
}

fn parse_error(path: impl Into<String>, message: impl ToString) -> IoError {
    IoError::Parse { path: path.into(), message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationDocument {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDocument {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
    /// `[fromTick, duration]` pairs in whole ticks.
    pub profile: Vec<[i64; 2]>,
}

/// The on-disk form of a [`Network`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NetworkDocument {
    pub schema_version: u32,
    pub unit: String,
    pub period: [i64; 2],
    pub locations: Vec<LocationDocument>,
    pub segments: Vec<SegmentDocument>,
    pub waiting_policy: WaitingPolicy,
}

impl NetworkDocument {
    pub fn from_network(net: &Network) -> Result<Self, IoError> {
        if net.is_regularized() || net.segments().iter().any(|s| s.synthetic) {
            return Err(IoError::RegularizedNetwork);
        }
        let whole = |half: i64| (half % 2 == 0).then_some(half / 2);
        let period = net.period();
        let (Some(start), Some(end)) = (whole(period.start.half_ticks()), whole(period.end.half_ticks())) else {
            return Err(IoError::OffGrid("period".into()));
        };
        let segments = net
            .segments()
            .iter()
            .map(|seg| {
                let profile = seg
                    .profile
                    .breakpoints()
                    .iter()
                    .map(|(t, d)| match (whole(t.half_ticks()), whole(d.half_ticks())) {
                        (Some(t), Some(d)) => Ok([t, d]),
                        _ => Err(IoError::OffGrid(seg.id.clone())),
                    })
                    .collect::<Result<_, _>>()?;
                Ok(SegmentDocument {
                    id: seg.id.clone(),
                    from: net.location_id(seg.from).into(),
                    to: net.location_id(seg.to).into(),
                    mode: seg.mode.clone(),
                    capacity: seg.capacity,
                    profile,
                })
            })
            .collect::<Result<_, IoError>>()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            unit: net.unit().into(),
            period: [start, end],
            locations: net
                .locations()
                .iter()
                .map(|l| LocationDocument { id: l.id.clone(), name: l.name.clone() })
                .collect(),
            segments,
            waiting_policy: net.waiting(),
        })
    }

    /// Structural checks only; consistency is left to `validate_network`.
    pub fn into_network(self) -> Result<Network, IoError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(IoError::UnsupportedVersion(self.schema_version));
        }
        let [start, end] = self.period;
        let period = Period::from_ticks(start, end).map_err(|e| parse_error("period", e))?;

        let mut index = HashMap::new();
        let mut locations = Vec::with_capacity(self.locations.len());
        for (i, loc) in self.locations.into_iter().enumerate() {
            if index.insert(loc.id.clone(), i).is_some() {
                return Err(parse_error(format!("locations[{i}].id"), ModelError::DuplicateLocation(loc.id)));
            }
            locations.push(Location { id: loc.id, name: loc.name });
        }

        let mut seen = HashSet::new();
        let mut segments = Vec::with_capacity(self.segments.len());
        for (i, seg) in self.segments.into_iter().enumerate() {
            let here = |field: &str| format!("segments[{i}].{field}");
            if !seen.insert(seg.id.clone()) {
                return Err(parse_error(here("id"), ModelError::DuplicateSegment(seg.id)));
            }
            let resolve = |field: &str, loc: &str| {
                index.get(loc).copied().ok_or_else(|| {
                    parse_error(
                        here(field),
                        ModelError::UnknownLocation { segment: seg.id.clone(), location: loc.to_string() },
                    )
                })
            };
            let from = resolve("from", &seg.from)?;
            let to = resolve("to", &seg.to)?;
            let mut pieces = Vec::with_capacity(seg.profile.len());
            for (k, &[t, d]) in seg.profile.iter().enumerate() {
                if t < 0 || d < 0 {
                    return Err(parse_error(format!("segments[{i}].profile[{k}]"), "negative time or duration"));
                }
                pieces.push((TimePoint::from_ticks(t), Duration::from_ticks(d)));
            }
            let profile = TravelTimeProfile::new(pieces).map_err(|e| parse_error(here("profile"), e))?;
            segments.push(RouteSegment {
                id: seg.id,
                from,
                to,
                profile,
                mode: seg.mode,
                capacity: seg.capacity,
                synthetic: false,
            });
        }
        Network::new(self.unit, locations, segments, period, self.waiting_policy).map_err(|e| parse_error("", e))
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(path, e.into_inner())
    })
}

pub fn parse_network_document(text: &str) -> Result<NetworkDocument, IoError> {
    from_json(text)
}

/// Parses a network document. Errors name the offending JSON path, e.g.
/// `segments[2].profile: unsorted profile: ...`.
pub fn load_network(text: &str) -> Result<Network, IoError> {
    parse_network_document(text)?.into_network()
}

/// Pretty-printed document with a trailing newline.
pub fn network_to_json(net: &Network) -> Result<String, IoError> {
    Ok(to_json(&NetworkDocument::from_network(net)?))
}

pub fn load_scenario(text: &str) -> Result<CapacityScenario, IoError> {
    from_json(text)
}

/// Pretty JSON with a trailing newline for any report type.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    out.push('\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixFormat {
    Csv,
    Json,
}

/// Deterministic matrix text. CSV has a header row of location ids and one
/// row per origin in the same order; JSON carries the metadata too.
pub fn write_matrix(m: &MetricMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Csv => {
            let mut out = m.locations.join(",");
            out.push('\n');
            for row in &m.values {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            out
        }
        MatrixFormat::Json => to_json(m),
    }
}

pub fn parse_matrix_json(text: &str) -> Result<MetricMatrix, IoError> {
    let m: MetricMatrix = from_json(text)?;
    let n = m.locations.len();
    if m.values.len() != n || m.values.iter().any(|row| row.len() != n) {
        return Err(parse_error("values", format!("expected a {n}x{n} matrix")));
    }
    Ok(m)
}
