//! Browser bindings for the travel-time metric. Every operation takes and
//! returns JSON text so the page needs no generated type glue.

use serde_json::json;
use ttmetric_core::metric::{aggregate, regularized, verify_metric_axioms, Aggregator};
use ttmetric_core::{load_network, network_to_json, BuiltinExample, Network, Router, SearchPolicy};
use wasm_bindgen::prelude::*;

fn builtin(name: &str) -> Result<BuiltinExample, String> {
    match name {
        "minmin" => Ok(BuiltinExample::MinMinCounterexample),
        "boundary" => Ok(BuiltinExample::BoundaryExample),
        "integral" => Ok(BuiltinExample::IntegralViolation),
        other => Err(format!("unknown example `{other}` (expected minmin, boundary or integral)")),
    }
}

fn aggregator(name: &str) -> Result<Aggregator, String> {
    match name {
        "maxmin" => Ok(Aggregator::MaxMin),
        "minmin" => Ok(Aggregator::MinMin),
        "integral" => Ok(Aggregator::IntegralUniform),
        other => Err(format!("unknown aggregator `{other}` (expected maxmin, minmin or integral)")),
    }
}

fn prepare(network_json: &str, regularize: bool) -> Result<Network, String> {
    let net = load_network(network_json).map_err(|e| e.to_string())?;
    if regularize {
        regularized(&net).map_err(|e| e.to_string())
    } else {
        Ok(net)
    }
}

/// Network document for a built-in example.
pub fn example_network(name: &str) -> Result<String, String> {
    network_to_json(&builtin(name)?.network()).map_err(|e| e.to_string())
}

/// `T(from, to, t)` for every tick of the period, as `{"points": [[t, T], ...]}`
/// with `null` where the destination is unreachable.
pub fn travel_time_curve(network_json: &str, from: &str, to: &str, regularize: bool) -> Result<String, String> {
    let net = prepare(network_json, regularize)?;
    let ia = net.location_index(from).ok_or_else(|| format!("unknown location `{from}`"))?;
    let ib = net.location_index(to).ok_or_else(|| format!("unknown location `{to}`"))?;
    let router = Router::new(&net, SearchPolicy::for_network(&net));
    let mut points = Vec::new();
    for t in net.period().grid() {
        let d = router.best_travel_time(ia, ib, t).map_err(|e| e.to_string())?;
        points.push(json!([t, d]));
    }
    Ok(json!({ "from": from, "to": to, "regularized": net.is_regularized(), "points": points }).to_string())
}

/// Aggregated matrix plus the axiom report, as `{"matrix": ..., "axioms": ...}`.
pub fn metric_report(network_json: &str, aggregator_name: &str, regularize: bool) -> Result<String, String> {
    let net = prepare(network_json, regularize)?;
    let m =
        aggregate(&net, aggregator(aggregator_name)?, SearchPolicy::for_network(&net)).map_err(|e| e.to_string())?;
    let report = verify_metric_axioms(&m);
    Ok(json!({ "matrix": m, "axioms": report, "pass": report.all_pass() }).to_string())
}

#[wasm_bindgen(js_name = exampleNetwork)]
pub fn example_network_js(name: &str) -> Result<String, JsError> {
    example_network(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = travelTimeCurve)]
pub fn travel_time_curve_js(network_json: &str, from: &str, to: &str, regularize: bool) -> Result<String, JsError> {
    travel_time_curve(network_json, from, to, regularize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = metricReport)]
pub fn metric_report_js(network_json: &str, aggregator: &str, regularize: bool) -> Result<String, JsError> {
    metric_report(network_json, aggregator, regularize).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_names_are_rejected() {
        assert!(example_network("nope").is_err());
        assert!(aggregator("mean").is_err());
    }

    #[test]
    fn unknown_locations_are_rejected() {
        let text = example_network("boundary").unwrap();
        assert!(travel_time_curve(&text, "a", "zz", false).is_err());
    }
}
