//! Browser bindings: JSON-in/JSON-out wrappers around the analysis
//! pipeline, compiled to WebAssembly for the static demo page.
//!
//! Every function takes and returns strings so the page needs no glue
//! types: measures go in using the same format the CLI reads, results come
//! back as JSON (`curve_svg` returns SVG markup directly). Errors never
//! cross the boundary as panics — they come back as `{"error": "..."}`.
//!
//! The crate also builds natively so the wrappers stay under ordinary
//! `cargo test`; the `wasm_bindgen` attribute is only attached when
//! compiling for the browser.

use std::f64::consts::TAU;

use serde_json::json;

use uct::curve::{build_curve, enumerate_nests, export_curve};
use uct::measures::{measure_to_json, parse_measure};
use uct::minimizer::{analyze, AnalyzeOptions, SearchConfig};
use uct::sample::{fixture_rectangle, fixture_small_rho, fixture_square, fixture_triangle};
use uct::trigfun::h_from_measure;

#[cfg(target_arch = "wasm32")]
use wasm_bindgen::prelude::wasm_bindgen;

fn error_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("report encoding cannot fail")
}

fn options(seed: u64, restarts: u32) -> AnalyzeOptions {
    AnalyzeOptions {
        search: SearchConfig {
            seed,
            restarts: restarts.clamp(1, 64) as usize,
            ..SearchConfig::default()
        },
        cross_check: false,
    }
}

/// Full analysis of a measure: critical types, balance, nests, and the
/// constructed complement, as pretty-printed JSON.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn analyze_json(measure: &str, seed: u64, restarts: u32) -> String {
    let (rho, delta) = match parse_measure(measure) {
        Ok(pair) => pair,
        Err(e) => return error_json(e),
    };
    match analyze(&delta, &rho, &options(seed, restarts)) {
        Ok(report) => pretty(&report.to_json()),
        Err(e) => error_json(e),
    }
}

/// Just the complement: the constructed measure, the method that produced
/// it, and the independent verification, as pretty-printed JSON.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn minimize_json(measure: &str, seed: u64, restarts: u32) -> String {
    let (rho, delta) = match parse_measure(measure) {
        Ok(pair) => pair,
        Err(e) => return error_json(e),
    };
    match analyze(&delta, &rho, &options(seed, restarts)) {
        Ok(report) => pretty(&json!({
            "achieved": report.result.achieved,
            "delta_star": measure_to_json(&rho, &report.result.delta_star),
            "method": report.result.method.tag(),
            "target": report.result.target,
            "verification": serde_json::to_value(report.verification)
                .expect("report encoding cannot fail"),
        })),
        Err(e) => error_json(e),
    }
}

/// The swept curve with its nest circles as standalone SVG markup; parse
/// or domain failures come back as `{"error": "..."}` instead.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn curve_svg(measure: &str) -> String {
    let (rho, delta) = match parse_measure(measure) {
        Ok(pair) => pair,
        Err(e) => return error_json(e),
    };
    let h = match h_from_measure(&delta, &rho) {
        Ok(h) => h,
        Err(e) => return error_json(e),
    };
    let nests = match enumerate_nests(&h) {
        Ok(nests) => nests,
        Err(e) => return error_json(e),
    };
    // Trace the full closed curve when the order's denominator allows; the
    // tracer caps the window at four stretched periods.
    let periods = match rho.rational() {
        Some((_, q)) => q.min(4),
        None => 1,
    };
    let window = (0.0, TAU * rho.value() * periods as f64);
    let polygon = match build_curve(&h, window) {
        Ok(polygon) => polygon,
        Err(e) => return error_json(e),
    };
    match export_curve(&polygon, &nests, "svg") {
        Ok(svg) => svg,
        Err(e) => error_json(e),
    }
}

/// The bundled example measures, keyed by name, each in the input format
/// the other entry points accept.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn presets_json() -> String {
    let mut doc = serde_json::Map::new();
    for (name, (rho, m)) in [
        ("triangle", fixture_triangle()),
        ("square", fixture_square()),
        ("rectangle", fixture_rectangle()),
        ("small-order", fixture_small_rho()),
    ] {
        doc.insert(name.to_string(), measure_to_json(&rho, &m));
    }
    pretty(&serde_json::Value::Object(doc))
}
