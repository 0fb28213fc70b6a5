//! Independent slow reference computations used to cross-check the fast
//! paths: Pell brute force, bounded unit searches and adaptive quadrature.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::qfield::{FieldData, QuadElem, QuadField};
use crate::rational::Rational;

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).find(|&s| s >= 0 && s * s == n)
}

/// Smallest unit `ε₀ > 1` found by scanning `y = 1, 2, …` for
/// `x² - d·y² = ±1` (or `±4` when `d ≡ 1 mod 4`), up to `y_max`.
pub fn pell_unit(field: &QuadField, y_max: i128) -> Result<QuadElem> {
    let d = field.d() as i128;
    let k = if d % 4 == 1 { 4 } else { 1 };
    for y in 1..=y_max {
        let dy2 = d * y * y;
        for c in [-k, k] {
            if let Some(x) = isqrt_exact(dy2 + c) {
                if x == 0 {
                    continue;
                }
                let den = if k == 4 { 2 } else { 1 };
                return Ok(field.from_sqrt_parts(
                    Rational::new(BigInt::from(x), BigInt::from(den)),
                    Rational::new(BigInt::from(y), BigInt::from(den)),
                ));
            }
        }
    }
    Err(Error::Overflow(format!("no Pell solution with y <= {y_max} for d = {}", field.d())))
}

fn small_coords(x: &QuadElem) -> Result<(i128, i128)> {
    let [a, b] = x.int_coords().ok_or_else(|| Error::input(format!("{x} is not integral")))?;
    match (a.to_i128(), b.to_i128()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Overflow(format!("coordinates of {x} exceed i128"))),
    }
}

/// Searches every `u = a + bω` with `1 < u < ε` for a totally positive
/// unit. Such `u` has `0 < b < b(ε)`, so the scan is exhaustive; returns
/// the first counterexample if any.
pub fn smaller_totally_positive_unit(fd: &FieldData) -> Result<Option<QuadElem>> {
    let field = fd.field;
    let (_, b_eps) = small_coords(&fd.eps)?;
    let (tr, disc) = (field.omega_trace() as i128, field.disc() as i128);
    for b in 1..b_eps {
        // (2a + b·tr)² = b²·disc + 4
        let Some(s) = isqrt_exact(b * b * disc + 4) else { continue };
        for root in [s, -s] {
            let num = root - b * tr;
            if num % 2 != 0 {
                continue;
            }
            let u = field.elem(
                Rational::from_integer(BigInt::from(num / 2)),
                Rational::from_integer(BigInt::from(b)),
            );
            if u.is_totally_positive() && u > field.one() && u < fd.eps {
                return Ok(Some(u));
            }
        }
    }
    Ok(None)
}

/// Seven-point Gauss / fifteen-point Kronrod pair on `[a, b]`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_18,
        0.140_653_259_715_525_92,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_83,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let fc = f(c);
    let (mut k, mut g) = (WGK[7] * fc, WG[3] * fc);
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature; returns `(value, error estimate)`.
/// Bisects the worst interval until the summed estimate meets `tol`, the
/// estimate is at rounding level, or 2000 intervals are in use.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    loop {
        let value: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        let floor = 50.0 * f64::EPSILON * parts.iter().map(|p| p.2 .0.abs()).sum::<f64>();
        if err <= tol.max(floor) || parts.len() >= 2000 {
            return (value, err);
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].2 .1.total_cmp(&parts[j].2 .1))
            .expect("nonempty");
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = (lo + hi) / 2.0;
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
}

/// `Γ(½, a) = 2∫_{√a}^∞ e^{-w²} dw` by quadrature.
pub fn gamma_half_quad(a: f64) -> (f64, f64) {
    let lo = a.max(0.0).sqrt();
    let (v, e) = integrate(|w| (-w * w).exp(), lo, lo + 10.0, 1e-16);
    (2.0 * v, 2.0 * e)
}

/// `β(s)` from `∫₁^∞ e^{-st}t^{-3/2}dt = ∫₀¹ 2e^{-s/x²} dx`.
pub fn beta_quad(s: f64) -> (f64, f64) {
    let (v, e) = integrate(|x| if x == 0.0 { 0.0 } else { 2.0 * (-s / (x * x)).exp() }, 0.0, 1.0, 1e-17);
    let c = 16.0 * std::f64::consts::PI;
    (v / c, e / c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::make_field;

    #[test]
    fn pell_small_cases() {
        let f = QuadField::new(2).unwrap();
        assert_eq!(pell_unit(&f, 10).unwrap(), f.int_elem(1, 1));
        let f = QuadField::new(5).unwrap();
        // (1 + sqrt 5)/2
        assert_eq!(pell_unit(&f, 10).unwrap(), f.omega());
        let f = QuadField::new(94).unwrap();
        assert!(pell_unit(&f, 1000).is_err());
    }

    #[test]
    fn minimality_holds_and_detects() {
        let fd = make_field(13).unwrap();
        assert_eq!(smaller_totally_positive_unit(&fd).unwrap(), None);
        let mut bad = fd.clone();
        bad.eps = &fd.eps * &fd.eps;
        assert_eq!(smaller_totally_positive_unit(&bad).unwrap(), Some(fd.eps.clone()));
    }

    #[test]
    fn quadrature_reference_values() {
        let (g, _) = gamma_half_quad(1.0);
        assert!((g - 0.278_805_585_280_661_98).abs() < 1e-14);
        let (b, e) = beta_quad(1.0);
        assert!((b - 0.003_544_136_116_318_208).abs() < 1e-15);
        assert!(e < 1e-12);
        let (z, _) = beta_quad(0.0);
        assert!((z - 1.0 / (8.0 * std::f64::consts::PI)).abs() < 1e-15);
    }
}
