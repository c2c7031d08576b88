//! Browser bindings for the interactive demo page in `www/`.
//!
//! Each exported function returns a flat `Float64Array`; singular points come
//! back as `Infinity`.

use wasm_bindgen::prelude::*;
use weakmetro::dynamics::{dynamic_report, linear_grid};
use weakmetro::models::{build, ModelKind, ModelSpec};
use weakmetro::statics::analyze_static;

fn kind(name: &str) -> Result<ModelKind, String> {
    match name {
        "qubit" => Ok(ModelKind::Qubit1Param),
        "qubit2" => Ok(ModelKind::Qubit2Param),
        "qutrit" => Ok(ModelKind::Qutrit2Param),
        "anharmonic" => Ok(ModelKind::Anharmonic2Param),
        other => Err(format!("unknown model {other}")),
    }
}

/// `[static B, t_0, B(t_0), t_1, B(t_1), ...]` for a preset started in its
/// reference eigenstate. The static entry is `Infinity` when that bound is singular.
pub fn bound_scan(model: &str, alpha: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let spec = ModelSpec::new(kind(model)?).with_alpha(alpha);
    let p = build(&spec).map_err(|e| e.to_string())?;
    let psi = p.unperturbed_state();
    let static_b = analyze_static(&p).map(|a| a.report.bound_b).unwrap_or(f64::INFINITY);
    let times = linear_grid(t_max / steps as f64, t_max, steps).map_err(|e| e.to_string())?;
    let mut out = vec![static_b];
    for t in times {
        let b = dynamic_report(&p, &psi, t).map(|r| r.bound_b).unwrap_or(f64::INFINITY);
        out.extend([t, b]);
    }
    Ok(out)
}

/// `[t_0, Q(t_0), ...]` for the single-coupling qubit with probe angles `(theta, phi)`.
pub fn qubit_qfi_curve(theta: f64, phi: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let spec = ModelSpec::new(ModelKind::Qubit1Param);
    let p = build(&spec).map_err(|e| e.to_string())?;
    let psi = spec.probe_state(theta, phi).map_err(|e| e.to_string())?;
    let times = linear_grid(0.0, t_max, steps).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * steps);
    for t in times {
        let q = dynamic_report(&p, &psi, t).map_err(|e| e.to_string())?.qfim.get(0, 0);
        out.extend([t, q]);
    }
    Ok(out)
}

/// `[alpha_0, B_0, R_0, ...]`: static bound and quantumness against the angle
/// between the two couplings, for `qubit2` or `qutrit`.
pub fn static_angle_sweep(model: &str, steps: usize) -> Result<Vec<f64>, String> {
    let kind = kind(model)?;
    if steps < 2 {
        return Err("need at least two angles".into());
    }
    let mut out = Vec::with_capacity(3 * steps);
    for i in 0..steps {
        let alpha = std::f64::consts::PI * (i as f64 + 0.5) / steps as f64;
        let p = build(&ModelSpec::new(kind).with_alpha(alpha)).map_err(|e| e.to_string())?;
        let r = analyze_static(&p).map_err(|e| e.to_string())?.report;
        out.extend([alpha, r.bound_b, r.quantumness_r.unwrap_or(f64::NAN)]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = boundScan)]
pub fn bound_scan_js(model: &str, alpha: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    bound_scan(model, alpha, t_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = qubitQfiCurve)]
pub fn qubit_qfi_curve_js(theta: f64, phi: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    qubit_qfi_curve(theta, phi, t_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = staticAngleSweep)]
pub fn static_angle_sweep_js(model: &str, steps: usize) -> Result<Vec<f64>, JsValue> {
    static_angle_sweep(model, steps).map_err(|e| JsValue::from_str(&e))
}
