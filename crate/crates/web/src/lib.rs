//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every function takes plain numbers and returns a JSON string so the page
//! needs no generated type glue beyond `wasm-bindgen`'s string passing.

use qqo_core::dynamics;
use qqo_core::families::{self, AbcParams};
use qqo_core::ks;
use qqo_core::report::{self, Num};
use qqo_core::vec3;
use qqo_core::{ScanConfig, StateVec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn params(a: f64, b: f64, c: f64) -> Result<AbcParams, JsError> {
    AbcParams::new(a, b, c).map_err(|e| JsError::new(&e.to_string()))
}

/// Lighter sampling than the CLI default; keeps a slider drag responsive.
fn demo_scan() -> ScanConfig {
    ScanConfig {
        sphere_points: 400,
        pair_samples: 1024,
        oracle_samples: 512,
        refine_steps: 20,
        ..ScanConfig::default()
    }
}

#[derive(Serialize)]
struct Summary {
    bb5: Num,
    bb5_holds: bool,
    e14: Num,
    e15: Num,
    not_ks: bool,
    regime: &'static str,
    dynamics_class: &'static str,
    ks2_at_e1_e2: Num,
    ks_worst_margin: Num,
    ks_worst_channel: &'static str,
}

/// Family certificates, the non-KS predicate and a sampled KS scan.
#[wasm_bindgen]
pub fn abc_summary(a: f64, b: f64, c: f64) -> Result<String, JsError> {
    let p = params(a, b, c)?;
    let t = p.to_tensor();
    let bb5 = families::check_bb5(&p);
    let nk = families::not_ks_predicate(&p);
    let err = |e: qqo_core::Error| JsError::new(&e.to_string());
    let anchor = ks::ks2_margin(&t, &StateVec::e1(), &vec3::from_real(&[0.0, 1.0, 0.0])).map_err(err)?;
    let worst = ks::ks_scan(&t, &demo_scan()).map_err(err)?.worst();
    Ok(report::to_json(&Summary {
        bb5: Num(bb5.value),
        bb5_holds: bb5.holds,
        e14: Num(nk.e14),
        e15: Num(nk.e15),
        not_ks: nk.proved_not_ks,
        regime: families::abc_regime(&p),
        dynamics_class: dynamics::certificates(&t).label(),
        ks2_at_e1_e2: Num(anchor),
        ks_worst_margin: Num(worst.margin),
        ks_worst_channel: worst.channel.as_str(),
    }))
}

/// Orbit of `f0 = (f1, f2, f3)` under the family's Bloch-ball map.
#[wasm_bindgen]
pub fn abc_trajectory(a: f64, b: f64, c: f64, f1: f64, f2: f64, f3: f64, steps: usize) -> Result<String, JsError> {
    let p = params(a, b, c)?;
    let f0 = StateVec::new([f1, f2, f3]).map_err(|e| JsError::new(&e.to_string()))?;
    let tr = dynamics::iterate(&p.to_tensor(), &f0, steps.max(1), dynamics::DEFAULT_ZERO_TOL);
    Ok(report::trajectory_json(&tr))
}

#[derive(Serialize)]
struct PhaseCell {
    a: Num,
    b: Num,
    regime: &'static str,
    not_ks: bool,
}

/// `n x n` grid over `a, b ∈ [-1, 1]` at fixed `c`, row-major in `b` then `a`.
#[wasm_bindgen]
pub fn abc_phase_map(c: f64, n: usize) -> Result<String, JsError> {
    let n = n.clamp(2, 256);
    let axis: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let mut cells = Vec::with_capacity(n * n);
    for &b in &axis {
        for &a in &axis {
            let p = params(a, b, c)?;
            cells.push(PhaseCell {
                a: Num(a),
                b: Num(b),
                regime: families::abc_regime(&p),
                not_ks: families::not_ks_predicate(&p).proved_not_ks,
            });
        }
    }
    Ok(report::to_json(&cells))
}
