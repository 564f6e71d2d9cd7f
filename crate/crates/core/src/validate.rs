//! Consistency checks on a network: identity, positivity, profile domains and
//! existence of a finite route between every ordered pair at every tick.

use serde::Serialize;

use crate::engine::{Boarding, Router, SearchPolicy};
use crate::model::Network;
use crate::time::{Duration, TimePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Identity,
    Positivity,
    Existence,
    Composition,
    Profile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Witness {
    /// A stored segment that loops back to its own tail.
    SelfLoop { segment: String, location: String },
    /// A stored duration that is not strictly positive.
    ZeroDuration { segment: String, from_tick: TimePoint, duration: Duration },
    /// A real segment whose profile starts after the period does.
    LateProfile { segment: String, first_breakpoint: TimePoint, period_start: TimePoint },
    /// No finite route from `from` to `to` departing at `departure`.
    Unreachable { from: String, to: String, departure: TimePoint },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Requirements that hold by construction of the route model.
    pub structural: Vec<Rule>,
}

impl ValidationReport {
    pub fn violations_of(&self, rule: Rule) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.rule == rule)
    }
}

/// Runs every check. Existence is only evaluated when all profiles are
/// defined over the period, and reports the first failing tick per pair.
///
/// Existence considers real segments departing after the period end too
/// (their last piece extends forever): boundary effects are handled by
/// regularization, not by the data.
pub fn validate_network(net: &Network) -> ValidationReport {
    let mut violations = Vec::new();
    let period = net.period();

    for seg in net.segments() {
        if seg.from == seg.to {
            violations.push(Violation {
                rule: Rule::Identity,
                witness: Witness::SelfLoop { segment: seg.id.clone(), location: net.location_id(seg.from).into() },
            });
        }
        for &(from_tick, duration) in seg.profile.breakpoints() {
            if duration.is_zero() {
                violations.push(Violation {
                    rule: Rule::Positivity,
                    witness: Witness::ZeroDuration { segment: seg.id.clone(), from_tick, duration },
                });
            }
        }
        if !seg.synthetic && seg.profile.first_breakpoint() > period.start {
            violations.push(Violation {
                rule: Rule::Profile,
                witness: Witness::LateProfile {
                    segment: seg.id.clone(),
                    first_breakpoint: seg.profile.first_breakpoint(),
                    period_start: period.start,
                },
            });
        }
    }

    let profiles_ok = !violations.iter().any(|v| v.rule == Rule::Profile);
    if profiles_ok {
        violations.extend(existence_violations(net));
    }

    let mut structural = vec![Rule::Composition];
    if !violations.iter().any(|v| v.rule == Rule::Identity) {
        structural.insert(0, Rule::Identity);
    }
    ValidationReport { ok: violations.is_empty(), violations, structural }
}

fn existence_violations(net: &Network) -> Vec<Violation> {
    let n = net.locations().len();
    let router = Router::with_boarding(net, SearchPolicy::for_network(net), Boarding::Extended);
    let mut first_failure: Vec<Option<TimePoint>> = vec![None; n * n];
    for origin in 0..n {
        for t in net.period().grid() {
            let labels = router.earliest_arrival(origin, t).expect("grid ticks lie in the period");
            for dest in 0..n {
                let slot = &mut first_failure[origin * n + dest];
                if slot.is_none() && labels.arrival(dest).is_none() {
                    *slot = Some(t);
                }
            }
        }
    }
    let mut out = Vec::new();
    for origin in 0..n {
        for dest in 0..n {
            if let Some(departure) = first_failure[origin * n + dest] {
                out.push(Violation {
                    rule: Rule::Existence,
                    witness: Witness::Unreachable {
                        from: net.location_id(origin).into(),
                        to: net.location_id(dest).into(),
                        departure,
                    },
                });
            }
        }
    }
    out
}
