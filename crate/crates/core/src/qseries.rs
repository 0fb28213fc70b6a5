//! Generating series of boundary linking numbers, the boundary theta
//! function `W(τ)` and the capped-intersection combiner.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cycles::{self, TableContext};
use crate::error::{Error, Result};
use crate::qfield::{enumerate_norm_classes, FieldData};
use crate::rational::{self, Rational};
use crate::special_fn::beta_scaled;

mod coeff_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{self, Rational};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u32, Rational>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (*k, rational::to_string(v)))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, Rational>, D::Error> {
        let raw = BTreeMap::<u32, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| match rational::parse(&v) {
                Some(q) => Ok((k, q)),
                None => Err(serde::de::Error::custom(format!("bad rational {v:?} at index {k}"))),
            })
            .collect()
    }
}

fn weight_two() -> u32 {
    2
}

/// A q-expansion with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QExpansion {
    pub d: i64,
    pub m: u32,
    #[serde(default = "weight_two")]
    pub weight: u32,
    pub nmax: u32,
    #[serde(with = "coeff_map")]
    pub coeffs: BTreeMap<u32, Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl QExpansion {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("q-expansion serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let q: QExpansion = serde_json::from_str(s).map_err(|e| Error::input(format!("q-expansion JSON: {e}")))?;
        if let Some(k) = q.coeffs.keys().find(|&&k| k == 0 || k > q.nmax) {
            return Err(Error::input(format!("coefficient index {k} outside 1..={}", q.nmax)));
        }
        Ok(q)
    }
}

fn check_index(name: &str, v: u32) -> Result<()> {
    if v < 1 {
        return Err(Error::input(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// `Σ_{n ≤ nmax} Lk(∂Cₙ, ∂Cₘ) qⁿ`.
pub fn lk_qexpansion(fd: &FieldData, m: u32, nmax: u32) -> Result<QExpansion> {
    check_index("m", m)?;
    check_index("nmax", nmax)?;
    let ctx = TableContext::new(fd, nmax.max(m))?;
    let coeffs = (1..=nmax).map(|n| Ok((n, ctx.cell(fd, n, m)?))).collect::<Result<_>>()?;
    Ok(QExpansion {
        d: fd.d(),
        m,
        weight: 2,
        nmax,
        coeffs,
        description: Some(format!("boundary linking numbers Lk(dC_n, dC_{m}), d = {}", fd.d())),
    })
}

/// A real value with an estimate of its truncation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truncated {
    pub value: f64,
    pub tail_estimate: f64,
}

/// `(1/sqrt(2·disc)) Σ_μ Σ_± Σ_{|k| ≤ K} min(|±με^k|, |±μ'ε^{-k}|)`.
pub fn min_series_coeff(fd: &FieldData, n: u32, k_range: u32) -> Result<Truncated> {
    check_index("n", n)?;
    check_index("k_range", k_range)?;
    let ln_eps = fd.eps.to_f64().ln();
    let nf = n as f64;
    let mut value = 0.0;
    let mut tail = 0.0;
    for class in enumerate_norm_classes(fd, &rational::rat(n as i64))? {
        let ln_mu = class.rep.to_f64().ln();
        let ln_mu_c = nf.ln() - ln_mu;
        let term = |k: f64| (ln_mu + k * ln_eps).exp().min((ln_mu_c - k * ln_eps).exp());
        for _sign in [1.0, -1.0] {
            for k in -(k_range as i64)..=k_range as i64 {
                value += term(k as f64);
            }
            // geometric tails on both ends, ratio 1/ε
            let edge = term(k_range as f64 + 1.0) + term(-(k_range as f64) - 1.0);
            tail += edge / (1.0 - (-ln_eps).exp());
        }
    }
    let norm = (2.0 * fd.disc() as f64).sqrt();
    Ok(Truncated { value: value / norm, tail_estimate: tail / norm })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    /// `(n, min-series coefficient / Lk(∂Cₙ, ∂C₁))`.
    pub ratios: Vec<(u32, f64)>,
    /// Indices with zero linking number and zero min-series value.
    pub omitted: Vec<u32>,
    /// Indices with zero linking number but a nonzero min-series value.
    pub inconsistent: Vec<u32>,
    pub mean: f64,
    /// `max |ratio - mean| / |mean|`.
    pub relative_spread: f64,
}

pub fn holomorphic_ratio_test(fd: &FieldData, nmax: u32, k_range: u32) -> Result<RatioReport> {
    let lk = lk_qexpansion(fd, 1, nmax)?;
    let mut report = RatioReport { ratios: vec![], omitted: vec![], inconsistent: vec![], mean: 0.0, relative_spread: 0.0 };
    for (&n, c) in &lk.coeffs {
        let s = min_series_coeff(fd, n, k_range)?.value;
        if c.is_zero() {
            if s == 0.0 {
                report.omitted.push(n);
            } else {
                report.inconsistent.push(n);
            }
        } else {
            report.ratios.push((n, s / rational::to_f64(c)));
        }
    }
    if !report.ratios.is_empty() {
        report.mean = report.ratios.iter().map(|r| r.1).sum::<f64>() / report.ratios.len() as f64;
        report.relative_spread =
            report.ratios.iter().map(|r| (r.1 - report.mean).abs()).fold(0.0, f64::max) / report.mean.abs();
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WEvalParams {
    pub tau: Complex64,
    pub k_range: u32,
    #[serde(rename = "box")]
    pub box_: u32,
    pub n_cut: u32,
}

impl WEvalParams {
    pub fn new(tau: Complex64) -> Self {
        WEvalParams { tau, k_range: 60, box_: 40, n_cut: 40 }
    }

    pub fn doubled(&self) -> Self {
        WEvalParams { tau: self.tau, k_range: 2 * self.k_range, box_: 2 * self.box_, n_cut: 2 * self.n_cut }
    }

    fn validate(&self) -> Result<()> {
        if self.tau.im.is_nan() || self.tau.im <= 0.0 || !self.tau.re.is_finite() {
            return Err(Error::input(format!("tau must lie in the upper half plane, got {}", self.tau)));
        }
        if self.k_range < 1 || self.box_ < 1 || self.n_cut < 1 {
            return Err(Error::input("truncation parameters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WEval {
    pub params: WEvalParams,
    pub holomorphic: Complex64,
    pub holomorphic_tail: f64,
    pub beta_sum: Complex64,
    pub beta_tail: f64,
    /// Graded pieces of the holomorphic part, `(n, coefficient, tail)`.
    pub coefficients: Vec<(u32, Truncated)>,
}

/// `e^{2πiNτ}` for integral `N`, with the real part of `τ` reduced first.
fn q_power(n: f64, tau: Complex64) -> Complex64 {
    let phase = 2.0 * std::f64::consts::PI * (n * tau.re).rem_euclid(1.0);
    Complex64::from_polar((-2.0 * std::f64::consts::PI * n * tau.im).exp(), phase)
}

/// Holomorphic min-series part and the `β`-kernel lattice sum of `W(τ)`.
pub fn eval_w(fd: &FieldData, params: &WEvalParams) -> Result<WEval> {
    params.validate()?;
    let tau = params.tau;
    let v = tau.im;

    let mut holomorphic = Complex64::zero();
    let mut holomorphic_tail = 0.0;
    let mut coefficients = Vec::with_capacity(params.n_cut as usize);
    for n in 1..=params.n_cut {
        let c = min_series_coeff(fd, n, params.k_range)?;
        let q = q_power(n as f64, tau);
        holomorphic += q * c.value;
        holomorphic_tail += c.tail_estimate * q.norm();
        coefficients.push((n, c));
    }
    // coefficients grow at most linearly in n times the class count; bound
    // the omitted n-tail by the last coefficient scale
    let qabs = (-2.0 * std::f64::consts::PI * v).exp();
    let last = coefficients.iter().map(|c| c.1.value).fold(1.0, f64::max);
    let n1 = params.n_cut as f64 + 1.0;
    holomorphic_tail += last * n1 * qabs.powf(n1) / (1.0 - qabs).powi(2);

    // β-sum over λ = a + bω with |a|, |b| ≤ box:
    // λλ' = N(λ), (λ - λ')² = b²·disc
    let field = fd.field;
    let (tr, nw) = (field.omega_trace() as f64, field.omega_norm() as f64);
    let disc = fd.disc() as f64;
    let bx = params.box_ as i64;
    let mut sum = Complex64::zero();
    let mut shell = 0.0;
    for b in -bx..=bx {
        for a in -bx..=bx {
            let (af, bf) = (a as f64, b as f64);
            let norm = af * af + af * bf * tr + bf * bf * nw;
            let s = std::f64::consts::PI * v * bf * bf * disc;
            let mag = beta_scaled(s) * (-s - 2.0 * std::f64::consts::PI * v * norm).exp();
            let phase = 2.0 * std::f64::consts::PI * (norm * tau.re).rem_euclid(1.0);
            sum += Complex64::from_polar(mag, phase);
            if a.abs() == bx || b.abs() == bx {
                shell += mag;
            }
        }
    }
    let pref = -(2.0f64).sqrt() / (disc * v).sqrt();
    Ok(WEval {
        params: *params,
        holomorphic,
        holomorphic_tail,
        beta_sum: sum * pref,
        beta_tail: shell * pref.abs(),
        coefficients,
    })
}

/// User-supplied interior intersection numbers `(Tₙ·Tₘ)_X` for fixed `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteriorTable {
    pub m: u32,
    #[serde(with = "coeff_map")]
    pub entries: BTreeMap<u32, Rational>,
    #[serde(default)]
    pub provenance: String,
}

impl InteriorTable {
    pub fn from_json(s: &str) -> Result<Self> {
        let t: InteriorTable =
            serde_json::from_str(s).map_err(|e| Error::input(format!("interior table JSON: {e}")))?;
        if t.m == 0 || t.entries.contains_key(&0) {
            return Err(Error::input("interior table indices must be positive"));
        }
        Ok(t)
    }
}

/// `Cᶜₙ·C_m = (Tₙ·Tₘ)_X - Lk(∂Cₙ, ∂Cₘ)` for `1 ≤ n ≤ nmax`.
pub fn combine_interior(interior: &InteriorTable, fd: &FieldData, nmax: u32) -> Result<QExpansion> {
    check_index("nmax", nmax)?;
    let missing: Vec<String> =
        (1..=nmax).filter(|n| !interior.entries.contains_key(n)).map(|n| format!("({n},{})", interior.m)).collect();
    if !missing.is_empty() {
        return Err(Error::input(format!("interior table is missing entries {}", missing.join(", "))));
    }
    let lk = lk_qexpansion(fd, interior.m, nmax)?;
    let coeffs = lk.coeffs.iter().map(|(n, l)| (*n, &interior.entries[n] - l)).collect();
    Ok(QExpansion {
        d: fd.d(),
        m: interior.m,
        weight: 2,
        nmax,
        coeffs,
        description: Some(format!("capped intersections; interior data: {}", interior.provenance)),
    })
}

/// Rows `n, value, tail_estimate`.
pub fn numeric_csv(rows: &[(u32, Truncated)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "value", "tail_estimate"]).map_err(csv_err)?;
    for (n, t) in rows {
        w.write_record([n.to_string(), format!("{:e}", t.value), format!("{:e}", t.tail_estimate)])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Rows `n, value` of an exact expansion, values as `p/q`.
pub fn qexp_csv(q: &QExpansion) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "value"]).map_err(csv_err)?;
    for (n, c) in &q.coeffs {
        w.write_record([n.to_string(), rational::to_string(c)]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::input(format!("csv: {e}"))
}

/// Exact linking number `Lk(∂Cₙ, ∂Cₘ)` as an `f64`, for display.
pub fn coeff_f64(q: &QExpansion, n: u32) -> Option<f64> {
    q.coeffs.get(&n).and_then(|c| c.numer().to_f64().zip(c.denom().to_f64())).map(|(a, b)| a / b)
}

/// Circles of `∂Cₙ` counted with multiplicity; handy for reports.
pub fn circle_count(fd: &FieldData, n: u32) -> Result<usize> {
    Ok(cycles::boundary_circles(fd, &rational::rat(n as i64))?.len())
}
