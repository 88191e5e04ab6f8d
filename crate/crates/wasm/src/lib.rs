//! Browser bindings for the layout and complexity measures.
//!
//! Every call takes and returns JSON text so the page needs no generated
//! type bindings. The plain functions in [`api`] hold the logic and are what
//! the native tests exercise; the exported wrappers only turn their errors
//! into JS exceptions.

use wasm_bindgen::prelude::*;

pub mod api;

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Edge list of a synthetic spatial graph.
#[wasm_bindgen(js_name = sampleGraph)]
pub fn sample_graph(nodes: usize, density: f64, seed: u64) -> String {
    api::sample_graph(nodes, density, seed)
}

/// Parses an edge list (or JSON graph), lays it out and normalizes it into a
/// 1 m view cube.
#[wasm_bindgen(js_name = layoutGraph)]
pub fn layout_graph(text: &str, seed: u64, restarts: usize) -> Result<String, JsError> {
    js(api::layout_graph(text, seed, restarts))
}

/// Signal, noise and region for the pair `u`, `v` under task `cn` or `sp`.
#[wasm_bindgen(js_name = scorePair)]
pub fn score_pair(text: &str, layout: &str, u: usize, v: usize, task: &str) -> Result<String, JsError> {
    js(api::score_pair(text, layout, u, v, task))
}

/// Minimum-volume ellipsoid around `[[x, y, z], ...]`.
#[wasm_bindgen(js_name = encloseNodes)]
pub fn enclose_nodes(points: &str) -> Result<String, JsError> {
    js(api::enclose(points))
}
