//! Browser bindings: fidelity curves, the noise budget and the squeezing solver.
//!
//! Each export returns a JSON string. The plain functions are callable from
//! host tests; the `#[wasm_bindgen]` wrappers turn errors into JS exceptions.

use cvtelefid_core::analytics::{
    coherent_entanglement_fidelity, ecs_entanglement_fidelity, is_quantum_duty, required_sigma_for_ecs_fidelity,
    squeezing_db, EcsSpec, NoiseBudget, Threshold,
};
use cvtelefid_core::entfid::entanglement_fidelity_overlap;
use cvtelefid_core::fock::ComplexAmplitude;
use cvtelefid_core::quadrature::QuadratureGrid;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_STEPS: usize = 201;
const GH_ORDER: usize = 20;

#[derive(Serialize)]
struct Curve {
    alpha: f64,
    sigma: Vec<f64>,
    coherent: Vec<f64>,
    ecs_closed: Vec<f64>,
    ecs_exact: Vec<f64>,
}

#[derive(Serialize)]
struct Budget {
    components: NoiseBudget,
    total: f64,
    coherent_fidelity: f64,
    thresholds: Vec<(&'static str, bool)>,
    squeezing_db: f64,
    quantum_duty: bool,
}

#[derive(Serialize)]
struct Squeezing {
    alpha: f64,
    target: f64,
    sigma: f64,
    db: f64,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Coherent and ECS `|Ψ(α, −α)⟩` fidelities on `steps` points of `[0, sigma_max]`.
pub fn curve_json(alpha: f64, sigma_max: f64, steps: usize) -> Result<String, String> {
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(format!("steps must be in 2..={MAX_STEPS}"));
    }
    if !(sigma_max > 0.0 && sigma_max.is_finite()) {
        return Err("sigma_max must be > 0".into());
    }
    let (a, b) = (ComplexAmplitude::real(alpha), ComplexAmplitude::real(-alpha));
    let spec = EcsSpec::new(a, b).map_err(|e| e.to_string())?;
    let grid = QuadratureGrid::gauss_hermite(GH_ORDER).map_err(|e| e.to_string())?;
    let mut c = Curve {
        alpha,
        sigma: Vec::with_capacity(steps),
        coherent: Vec::with_capacity(steps),
        ecs_closed: Vec::with_capacity(steps),
        ecs_exact: Vec::with_capacity(steps),
    };
    for i in 0..steps {
        let s = sigma_max * i as f64 / (steps - 1) as f64;
        c.sigma.push(s);
        c.coherent.push(coherent_entanglement_fidelity(s).map_err(|e| e.to_string())?);
        c.ecs_closed.push(ecs_entanglement_fidelity(&spec, s).map_err(|e| e.to_string())?);
        c.ecs_exact.push(entanglement_fidelity_overlap(a, b, s, &grid).map_err(|e| e.to_string())?.value);
    }
    to_json(&c)
}

pub fn budget_json(sigma_g: f64, eta: f64, nu: f64, sigma_other: f64) -> Result<String, String> {
    let components = NoiseBudget::from_physical(sigma_g, eta, nu, sigma_other).map_err(|e| e.to_string())?;
    let total = components.total();
    to_json(&Budget {
        components,
        total,
        coherent_fidelity: coherent_entanglement_fidelity(total).map_err(|e| e.to_string())?,
        thresholds: Threshold::ALL.iter().map(|t| (t.label(), t.passes(total))).collect(),
        squeezing_db: squeezing_db(components.sigma_eta).map_err(|e| e.to_string())?,
        quantum_duty: is_quantum_duty(total),
    })
}

pub fn squeezing_json(alpha: f64, target: f64) -> Result<String, String> {
    let spec = EcsSpec::symmetric(alpha).map_err(|e| e.to_string())?;
    let sigma = required_sigma_for_ecs_fidelity(&spec, target).map_err(|e| e.to_string())?;
    let db = if sigma >= 1.0 { 0.0 } else { squeezing_db(sigma).map_err(|e| e.to_string())? };
    to_json(&Squeezing { alpha, target, sigma, db })
}

#[wasm_bindgen]
pub fn fidelity_curve(alpha: f64, sigma_max: f64, steps: usize) -> Result<String, JsValue> {
    curve_json(alpha, sigma_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn noise_budget(sigma_g: f64, eta: f64, nu: f64, sigma_other: f64) -> Result<String, JsValue> {
    budget_json(sigma_g, eta, nu, sigma_other).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn required_squeezing(alpha: f64, target: f64) -> Result<String, JsValue> {
    squeezing_json(alpha, target).map_err(|e| JsValue::from_str(&e))
}
