//! Browser bindings for three interactive views: the `φ`-profile heatmap,
//! Sol linking numbers and boundary linking q-expansions.
//!
//! Each binding wraps a plain function returning `Result<_, String>` so the
//! logic is testable natively.

use wasm_bindgen::prelude::*;

use sollink::qfield::make_field;
use sollink::qseries;
use sollink::rational;
use sollink::sol::{self, FiberClass, IntMat2};
use sollink::special_fn::{phi_profile, WPoint};

fn ints(s: &str, n: usize) -> Result<Vec<i64>, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| format!("{t:?} is not an integer")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated integers, got {s:?}"));
    }
    Ok(v)
}

/// Row-major grid of one component of `φ = (A + A', B + B')` over
/// `[x2_min, x2_max] × [x3_min, x3_max]`; rows run over `x₃` from the top.
pub fn phi_grid_values(
    x2_min: f64,
    x2_max: f64,
    x3_min: f64,
    x3_max: f64,
    width: usize,
    height: usize,
    component: u8,
) -> Result<Vec<f64>, String> {
    if width < 2 || height < 2 || width * height > 1 << 20 {
        return Err("grid must be at least 2x2 and at most 2^20 cells".into());
    }
    if component > 1 {
        return Err("component is 0 (A + A') or 1 (B + B')".into());
    }
    let mut out = Vec::with_capacity(width * height);
    for j in 0..height {
        let x3 = x3_max - (x3_max - x3_min) * j as f64 / (height - 1) as f64;
        for i in 0..width {
            let x2 = x2_min + (x2_max - x2_min) * i as f64 / (width - 1) as f64;
            let (a, b) = phi_profile(WPoint::new(x2, x3));
            out.push(if component == 0 { a.value } else { b.value });
        }
    }
    Ok(out)
}

pub fn sol_link_text(f: &str, a: &str, b: &str) -> Result<String, String> {
    let f = ints(f, 4)?;
    let (a, b) = (ints(a, 2)?, ints(b, 2)?);
    let m = sol::make_sol(IntMat2::from_i64([[f[0], f[1]], [f[2], f[3]]])).map_err(|e| e.to_string())?;
    let lk = sol::link_fiber(&m, &FiberClass::new(a[0], a[1]), &FiberClass::new(b[0], b[1]));
    Ok(rational::to_string(&lk))
}

pub fn qexp_text(d: i64, m: u32, nmax: u32) -> Result<String, String> {
    if nmax > 200 {
        return Err("nmax is limited to 200 in the browser".into());
    }
    let fd = make_field(d).map_err(|e| e.to_string())?;
    qseries::lk_qexpansion(&fd, m, nmax).map(|q| q.to_json()).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn phi_grid(
    x2_min: f64,
    x2_max: f64,
    x3_min: f64,
    x3_max: f64,
    width: usize,
    height: usize,
    component: u8,
) -> Result<Vec<f64>, JsValue> {
    phi_grid_values(x2_min, x2_max, x3_min, x3_max, width, height, component).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sol_link(f: &str, a: &str, b: &str) -> Result<String, JsValue> {
    sol_link_text(f, a, b).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn qexp_json(d: i64, m: u32, nmax: u32) -> Result<String, JsValue> {
    qexp_text(d, m, nmax).map_err(|e| JsValue::from_str(&e))
}
