//! Browser bindings for the convexity crate. Each export takes and returns
//! JSON text; rationals travel as `"num/den"` strings.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// `points`: `[["x","y"], …]`; `weights`: `["1/2", …]`.
#[wasm_bindgen]
pub fn barycentre(points: &str, weights: &str) -> Result<String, JsError> {
    js(ops::barycentre(points, weights))
}

#[wasm_bindgen(js_name = lambdaSequence)]
pub fn lambda_sequence(lambda0: &str, k: usize) -> Result<String, JsError> {
    js(ops::lambda_sequence(lambda0, k))
}

/// `spec`: a model spec as accepted by the command-line tool; `direction`:
/// comma-separated rationals.
#[wasm_bindgen(js_name = recoverNorm)]
pub fn recover_norm(spec: &str, direction: &str) -> Result<String, JsError> {
    js(ops::recover_norm(spec, direction))
}
