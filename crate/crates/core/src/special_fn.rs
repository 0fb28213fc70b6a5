//! Scalar profiles `A, B, A', B'` of the singular Schwartz form on the
//! two-dimensional space `W_R` with `(x, x) = x₂² - x₃²`, and the kernel `β`.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Rounding-level error attached to closed-form values.
fn rounding(v: f64) -> f64 {
    16.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WPoint {
    pub x2: f64,
    pub x3: f64,
}

impl WPoint {
    pub fn new(x2: f64, x3: f64) -> Self {
        WPoint { x2, x3 }
    }

    /// `(x, x) = x₂² - x₃²`.
    pub fn norm(&self) -> f64 {
        self.x2 * self.x2 - self.x3 * self.x3
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub value: f64,
    pub singular: bool,
    pub est_error: f64,
    /// `(limit from x₃ < 0, limit from x₃ > 0)` when `singular`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_sided: Option<(f64, f64)>,
}

impl EvalReport {
    fn exact(value: f64) -> Self {
        EvalReport { value, singular: false, est_error: rounding(value), one_sided: None }
    }

    fn add(self, other: EvalReport) -> EvalReport {
        let one_sided = match (self.one_sided, other.one_sided) {
            (None, None) => None,
            (l, r) => {
                let (l0, l1) = l.unwrap_or((self.value, self.value));
                let (r0, r1) = r.unwrap_or((other.value, other.value));
                Some((l0 + r0, l1 + r1))
            }
        };
        EvalReport {
            value: self.value + other.value,
            singular: self.singular || other.singular,
            est_error: self.est_error + other.est_error,
            one_sided,
        }
    }
}

/// `Γ(½, a) = sqrt(π)·erfc(sqrt a)`.
pub fn gamma_half(a: f64) -> Result<f64> {
    if a.is_nan() || a < 0.0 {
        return Err(Error::input(format!("gamma_half needs a >= 0, got {a}")));
    }
    Ok(SQRT_PI * libm::erfc(a.sqrt()))
}

/// `sqrt(π)·e^{x²}·erfc(x)` for `x ≥ 4`, by the Laplace continued fraction.
fn scaled_erfc(x: f64) -> f64 {
    // K = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut t = x;
    for k in (1..=60).rev() {
        t = x + (k as f64 / 2.0) / t;
    }
    1.0 / t
}

/// `∫₁^∞ e^{-st} t^{-3/2} dt`.
fn beta_integral(s: f64) -> f64 {
    if s == 0.0 {
        return 2.0;
    }
    let x = s.sqrt();
    if x < 4.0 {
        2.0 * (-s).exp() - 2.0 * (PI * s).sqrt() * libm::erfc(x)
    } else {
        2.0 * (-s).exp() * (1.0 - x * scaled_erfc(x))
    }
}

/// `β(s) = (1/16π) ∫₁^∞ e^{-st} t^{-3/2} dt`.
pub fn beta_fn(s: f64) -> Result<EvalReport> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::input(format!("beta needs s >= 0, got {s}")));
    }
    Ok(EvalReport::exact(beta_integral(s) / (16.0 * PI)))
}

/// `e^s·β(s)`, finite for all `s ≥ 0`; lets callers combine `β` with
/// growing exponentials without overflow.
pub fn beta_scaled(s: f64) -> f64 {
    let x = s.sqrt();
    let scaled = if x < 4.0 { beta_integral(s) * s.exp() } else { 2.0 * (1.0 - x * scaled_erfc(x)) };
    scaled / (16.0 * PI)
}

/// Leading two terms of the large-`s` expansion of `β`.
pub fn beta_asymptotic(s: f64) -> f64 {
    (-s).exp() / (16.0 * PI * s) * (1.0 - 1.5 / s)
}

pub fn b_profile(p: WPoint) -> EvalReport {
    let gauss = (-PI * (p.x2 * p.x2 + p.x3 * p.x3)).exp();
    let g = SQRT_PI * libm::erfc((2.0 * PI).sqrt() * p.x3.abs());
    let v = -gauss / (2.0 * SQRT_2 * PI) + p.x3.abs() * g * (-PI * p.norm()).exp() / (2.0 * SQRT_PI);
    EvalReport::exact(v)
}

fn a_formula(x2: f64, x3: f64, sign: f64) -> f64 {
    let g = SQRT_PI * libm::erfc((2.0 * PI).sqrt() * x3.abs());
    sign * x2 * g * (-PI * (x2 * x2 - x3 * x3)).exp() / (2.0 * SQRT_PI)
}

/// `A` jumps across `x₃ = 0`; there the report is singular with value 0
/// and the one-sided limits `∓½x₂e^{-πx₂²}`.
pub fn a_profile(p: WPoint) -> EvalReport {
    if p.x3 == 0.0 {
        let lim = a_formula(p.x2, 0.0, 1.0);
        return EvalReport { value: 0.0, singular: true, est_error: rounding(lim), one_sided: Some((-lim, lim)) };
    }
    EvalReport::exact(a_formula(p.x2, p.x3, p.x3.signum()))
}

pub fn bp_profile(p: WPoint) -> EvalReport {
    let q = p.norm();
    if q <= 0.0 {
        return EvalReport::exact(0.0);
    }
    let m = (p.x2 - p.x3).abs().min((p.x2 + p.x3).abs());
    EvalReport::exact(0.5 * m * (-PI * q).exp())
}

fn sgn0(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum()
    }
}

/// `A' = -sgn(x₂x₃)·B'`, singular on `x₃ = 0` inside the cone.
pub fn ap_profile(p: WPoint) -> EvalReport {
    let b = bp_profile(p).value;
    if p.x3 == 0.0 && b != 0.0 {
        let lim = sgn0(p.x2) * b;
        return EvalReport { value: 0.0, singular: true, est_error: rounding(lim), one_sided: Some((lim, -lim)) };
    }
    EvalReport::exact(-sgn0(p.x2 * p.x3) * b)
}

/// `(A + A', B + B')`.
pub fn phi_profile(p: WPoint) -> (EvalReport, EvalReport) {
    (a_profile(p).add(ap_profile(p)), b_profile(p).add(bp_profile(p)))
}

/// `m(s)p`, the hyperbolic rotation fixing the form.
pub fn orbit_action(s: f64, p: WPoint) -> WPoint {
    let (c, sh) = (s.cosh(), s.sinh());
    WPoint { x2: p.x2 * c + p.x3 * sh, x3: p.x2 * sh + p.x3 * c }
}

/// `-X₂₃F(p) = d/ds F(m(s)p)` at `s = 0`, by central differences.
pub fn neg_x23(f: impl Fn(WPoint) -> f64, p: WPoint, h: f64) -> f64 {
    (f(orbit_action(h, p)) - f(orbit_action(-h, p))) / (2.0 * h)
}

/// Left side of `(-1/4π)(∂₂² - ∂₃²)F + π(x,x)F = 2F`, by second differences.
pub fn eigen_lhs(f: impl Fn(WPoint) -> f64, p: WPoint, h: f64) -> f64 {
    let c = f(p);
    let d22 = (f(WPoint::new(p.x2 + h, p.x3)) - 2.0 * c + f(WPoint::new(p.x2 - h, p.x3))) / (h * h);
    let d33 = (f(WPoint::new(p.x2, p.x3 + h)) - 2.0 * c + f(WPoint::new(p.x2, p.x3 - h))) / (h * h);
    -(d22 - d33) / (4.0 * PI) + PI * p.norm() * c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(0.0).unwrap() - SQRT_PI).abs() < 1e-15);
        assert!((gamma_half(1.0).unwrap() - 0.278_805_585_280_661_98).abs() < 1e-13);
        assert!((gamma_half(2.0 * PI).unwrap() - 6.961_322_926_534_489e-4).abs() < 1e-15);
        let a = 25.0;
        let ratio = gamma_half(a).unwrap() / ((-a).exp() / a.sqrt());
        assert!((ratio - 1.0).abs() < 0.03);
        assert!(gamma_half(-1.0).is_err());
        assert!(gamma_half(f64::NAN).is_err());
    }

    #[test]
    fn profile_values() {
        let b00 = b_profile(WPoint::new(0.0, 0.0)).value;
        assert!(close(b00, -0.112_539_539_519_638_26, 1e-13));
        let b10 = b_profile(WPoint::new(1.0, 0.0)).value;
        assert!(close(b10, -(-PI).exp() / (2.0 * SQRT_2 * PI), 1e-14));
        assert!(close(b10, -0.004_863_274_5, 1e-8));
        let a11 = a_profile(WPoint::new(1.0, 1.0)).value;
        assert!(close(a11, 1.963_752_941_431_47e-4, 1e-12));
        assert!(close(bp_profile(WPoint::new(1.0, 0.0)).value, 0.021_606_959_131_886_125, 1e-14));
        assert_eq!(bp_profile(WPoint::new(0.0, 1.0)).value, 0.0);
        assert_eq!(bp_profile(WPoint::new(1.0, 1.0)).value, 0.0);
        let ap = ap_profile(WPoint::new(1.0, 0.5)).value;
        assert!(close(ap, -0.25 * (-0.75 * PI).exp(), 1e-14));
        assert!(close(ap, -0.023_695_056_2, 1e-8));
    }

    #[test]
    fn phi_examples() {
        let (a, b) = phi_profile(WPoint::new(0.0, 1.0));
        assert_eq!(a.value, 0.0);
        assert_eq!(b.value, b_profile(WPoint::new(0.0, 1.0)).value);
        let (a, b) = phi_profile(WPoint::new(1.0, 0.0));
        assert!(a.singular);
        let (l, r) = a.one_sided.unwrap();
        assert!(l.abs() < 1e-15 && r.abs() < 1e-15);
        assert!(close(b.value, -(-PI).exp() / (2.0 * SQRT_2 * PI) + 0.5 * (-PI).exp(), 1e-14));
        let (a, b) = phi_profile(WPoint::new(6.0, 1.0));
        assert!(a.value.abs() < 1e-40 && b.value.abs() < 1e-40);
    }

    #[test]
    fn a_one_sided_limits() {
        let x2 = 0.7;
        let a = a_profile(WPoint::new(x2, 0.0));
        let lim = 0.5 * x2 * (-PI * x2 * x2).exp();
        let (l, r) = a.one_sided.unwrap();
        assert!(close(r, lim, 1e-14) && close(l, -lim, 1e-14));
        let near = a_profile(WPoint::new(x2, 1e-12)).value;
        assert!((near - lim).abs() < 1e-10);
    }

    #[test]
    fn beta_values() {
        assert!(close(beta_fn(0.0).unwrap().value, 1.0 / (8.0 * PI), 1e-15));
        assert!(close(beta_fn(1e-14).unwrap().value, 1.0 / (8.0 * PI), 1e-6));
        assert!(close(beta_fn(1.0).unwrap().value, 0.003_544_136_116_318_208, 1e-12));
        assert!(close(beta_fn(10.0).unwrap().value, 7.932_539_751_45e-8, 1e-10));
        // the two branches of the closed form agree at the switch
        let (lo, hi) = (2.0 * (-16.0f64).exp() - 2.0 * (PI * 16.0).sqrt() * libm::erfc(4.0), beta_integral(16.0));
        assert!(close(lo, hi, 1e-9));
        assert!(beta_fn(-0.5).is_err());
        for s in [0.0, 0.5, 3.0, 15.9, 16.1, 30.0] {
            assert!(close(beta_scaled(s) * (-s).exp(), beta_fn(s).unwrap().value, 1e-9));
        }
        assert!(close(beta_scaled(1e6), 1.0 / (16.0 * PI * 1e6), 1e-5));
    }

    #[test]
    fn beta_asymptotics() {
        let s = 10.0;
        let b = beta_fn(s).unwrap().value;
        assert!(close(b, beta_asymptotic(s), 0.04));
        let lead = (-s).exp() / (16.0 * PI * s);
        assert!((b / lead - 1.0).abs() < 0.13);
        assert!(close(beta_fn(400.0).unwrap().value, beta_asymptotic(400.0), 1e-4));
    }

    #[test]
    fn orbit_examples() {
        let p = WPoint::new(0.3, -1.2);
        assert_eq!(orbit_action(0.0, p), p);
        let q = orbit_action(0.8, p);
        assert!((q.norm() - p.norm()).abs() < 1e-12);
        let e3 = orbit_action(1.0, WPoint::new(0.0, 1.0));
        assert!(close(e3.x2, 1f64.sinh(), 1e-15) && close(e3.x3, 1f64.cosh(), 1e-15));
    }

    #[test]
    fn infinitesimal_relations() {
        for &(x2, x3) in &[(0.3, 0.7), (1.2, 0.4), (-0.5, 0.9), (0.8, -0.3)] {
            let p = WPoint::new(x2, x3);
            let d = neg_x23(|q| b_profile(q).value, p, 1e-4);
            assert!(close(d, a_profile(p).value, 1e-5));
        }
        let p = WPoint::new(1.2, 0.4);
        assert!(close(neg_x23(|q| bp_profile(q).value, p, 1e-4), ap_profile(p).value, 1e-5));
    }

    #[test]
    fn eigen_equation() {
        let p = WPoint::new(0.8, -0.3);
        for f in [b_profile as fn(WPoint) -> EvalReport, bp_profile] {
            let lhs = eigen_lhs(|q| f(q).value, p, 1e-3);
            assert!(close(lhs, 2.0 * f(p).value, 1e-3));
        }
    }
}
