//! Seeded randomized consistency checks shared by the command line
//! `self-test` and the acceptance suite.
//!
//! Every check compares a fast path against an independent computation and
//! reports a deterministic one-line summary.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cycles;
use crate::error::Result;
use crate::oracle;
use crate::qfield::{self, brute_force_norm_solutions, enumerate_norm_classes, make_field, reduce, FieldData};
use crate::qseries;
use crate::rational::{self, Rational, RVec2};
use crate::sol::{self, FiberClass, IntMat2, SolManifold};
use crate::special_fn::{self as sf, WPoint};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((ok, detail)) => Check::new(name, ok, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hyperbolic `f ∈ SL₂(Z)` with entries bounded by `bound`.
pub fn random_hyperbolic(rng: &mut impl Rng, bound: i64) -> IntMat2 {
    loop {
        let a = rng.random_range(-bound..=bound);
        let b = rng.random_range(-bound..=bound);
        let c = rng.random_range(-bound..=bound);
        if a == 0 || (1 + b * c) % a != 0 {
            continue;
        }
        let d = (1 + b * c) / a;
        if d.abs() <= bound && (a + d).abs() > 2 {
            return IntMat2::from_i64([[a, b], [c, d]]);
        }
    }
}

/// Nonzero integer class with entries bounded by `bound`.
pub fn random_class(rng: &mut impl Rng, bound: i64) -> FiberClass {
    loop {
        let v = FiberClass::new(rng.random_range(-bound..=bound), rng.random_range(-bound..=bound));
        if !v.is_zero() {
            return v;
        }
    }
}

/// Point of the fiber with small rational coordinates.
pub fn random_offset(rng: &mut impl Rng) -> RVec2 {
    let mut c = || rational::frac(rng.random_range(-12..=12), rng.random_range(1..=12));
    [c(), c()]
}

pub fn random_sol(rng: &mut impl Rng, bound: i64) -> SolManifold {
    sol::make_sol(random_hyperbolic(rng, bound)).expect("generator yields hyperbolic SL2(Z) matrices")
}

/// `link_fiber = cap_intersect` on `count` random manifolds and classes.
pub fn check_sol_oracle(seed: u64, count: usize) -> Check {
    let mut r = rng(seed);
    let mut run = || -> Result<(bool, String)> {
        let mut bad = Vec::new();
        for i in 0..count {
            let m = random_sol(&mut r, 30);
            let (a, b) = (random_class(&mut r, 10), random_class(&mut r, 10));
            let offset = random_offset(&mut r);
            let s_b = rational::frac(r.random_range(1..=6), 7);
            let cap = sol::build_cap(&m, &a, &offset);
            let via_cap = sol::cap_intersect(&cap, &m, &b, &s_b)?;
            let lk = sol::link_fiber(&m, &a, &b);
            if via_cap != lk {
                bad.push(format!("#{i}: f = {}, a = {a}, b = {b}: {lk} vs {via_cap}", m.f));
            }
        }
        Ok((bad.is_empty(), summary(count, &bad)))
    };
    Check::from_result("sol linking vs cap intersection", run())
}

/// Random caps have zero area period and the right boundary.
pub fn check_caps(seed: u64, count: usize) -> Check {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for i in 0..count {
        let m = random_sol(&mut r, 30);
        let a = random_class(&mut r, 10);
        let cap = sol::build_cap(&m, &a, &random_offset(&mut r));
        if !cap.area_period().is_zero() {
            bad.push(format!("#{i}: period {}", cap.area_period()));
        }
        if cap.boundary() != cap.target() {
            bad.push(format!("#{i}: boundary mismatch for a = {a}"));
        }
    }
    Check::new("cap normalization", bad.is_empty(), summary(count, &bad))
}

fn summary(count: usize, bad: &[String]) -> String {
    if bad.is_empty() {
        format!("{count} cases agree")
    } else {
        format!("{} of {count} cases differ; first: {}", bad.len(), bad[0])
    }
}

/// Squarefree `d` in `2..dmax`.
pub fn squarefree_upto(dmax: i64) -> Vec<i64> {
    (2..dmax).filter(|&d| qfield::is_squarefree(d)).collect()
}

/// Continued-fraction units against Pell brute force, and minimality of
/// the totally positive generator.
pub fn check_units(dmax: i64) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut bad = Vec::new();
        let ds = squarefree_upto(dmax);
        for &d in &ds {
            let fd = make_field(d)?;
            let pell = oracle::pell_unit(&fd.field, 1_000_000)?;
            if pell != fd.eps0 {
                bad.push(format!("d = {d}: {} vs Pell {pell}", fd.eps0));
            }
            if let Some(u) = oracle::smaller_totally_positive_unit(&fd)? {
                bad.push(format!("d = {d}: {u} is a smaller totally positive unit"));
            }
        }
        Ok((bad.is_empty(), summary(ds.len(), &bad)))
    };
    Check::from_result("fundamental units", run())
}

/// Box guaranteed to contain a representative of each class: some unit
/// multiple has `μ, μ' < sqrt(n·ε)`.
pub fn brute_force_bound(fd: &FieldData, n: i64) -> i64 {
    let r = ((n as f64) * fd.eps.to_f64()).sqrt();
    (2.0 * r / (fd.disc() as f64).sqrt()).ceil() as i64 + r.ceil() as i64 + 2
}

pub fn check_norm_classes(ds: &[i64], nmax: i64) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut bad = Vec::new();
        for &d in ds {
            let fd = make_field(d)?;
            for n in 1..=nmax {
                let nr = rational::rat(n);
                let fast: BTreeSet<String> =
                    enumerate_norm_classes(&fd, &nr)?.into_iter().map(|c| c.rep.to_string()).collect();
                let mut slow = BTreeSet::new();
                for x in brute_force_norm_solutions(&fd, &nr, brute_force_bound(&fd, n)) {
                    slow.insert(reduce(&fd, &x)?.to_string());
                }
                if fast != slow {
                    bad.push(format!("d = {d}, n = {n}: {fast:?} vs {slow:?}"));
                }
            }
        }
        Ok((bad.is_empty(), summary(ds.len() * nmax as usize, &bad)))
    };
    Check::from_result("norm class enumeration", run())
}

/// General double sum against the closed form for `m = 1`.
pub fn check_cross_formula(ds: &[i64], nmax: u32) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut bad = Vec::new();
        for &d in ds {
            let fd = make_field(d)?;
            for n in 1..=nmax {
                let nr = rational::rat(n as i64);
                let general = cycles::link_boundary(&fd, &nr, &rational::rat(1))?;
                let closed = cycles::link_boundary_closed(&fd, &nr)?;
                if general != closed {
                    bad.push(format!("d = {d}, n = {n}: {general} vs {closed}"));
                }
            }
        }
        Ok((bad.is_empty(), summary(ds.len() * nmax as usize, &bad)))
    };
    Check::from_result("linking double sum vs closed form", run())
}

/// Every table entry is rational with `N·entry ∈ Z`.
pub fn check_tables(ds: &[i64], nmax: u32) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut bad = Vec::new();
        let mut cells = 0;
        for &d in ds {
            let t = cycles::link_table(&make_field(d)?, nmax)?;
            let n = Rational::from_integer(t.n_det.clone());
            for ((i, j), v) in &t.entries {
                cells += 1;
                if !(v * &n).is_integer() {
                    bad.push(format!("d = {d}, ({i},{j}) = {v}"));
                }
            }
        }
        Ok((bad.is_empty(), summary(cells, &bad)))
    };
    Check::from_result("link table integrality", run())
}

pub fn check_ratio(ds: &[i64], nmax: u32, k_range: u32, tol: f64) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for &d in ds {
            let r = qseries::holomorphic_ratio_test(&make_field(d)?, nmax, k_range)?;
            ok &= r.relative_spread <= tol && r.inconsistent.is_empty() && !r.ratios.is_empty();
            parts.push(format!("d = {d}: {} ratios, mean {:.12}, spread {:.1e}", r.ratios.len(), r.mean, r.relative_spread));
        }
        Ok((ok, parts.join("; ")))
    };
    Check::from_result("min-series / linking ratio constancy", run())
}

/// Doubling all truncation parameters at `τ = i` moves both parts by
/// less than `tol`.
pub fn check_w_stability(d: i64, tol: f64) -> Check {
    let run = || -> Result<(bool, String)> {
        let fd = make_field(d)?;
        let p = qseries::WEvalParams::new(Complex64::new(0.0, 1.0));
        let (a, b) = (qseries::eval_w(&fd, &p)?, qseries::eval_w(&fd, &p.doubled())?);
        let (dh, db) = ((a.holomorphic - b.holomorphic).norm(), (a.beta_sum - b.beta_sum).norm());
        Ok((dh < tol && db < tol, format!("changes {dh:.1e} (holomorphic), {db:.1e} (beta sum)")))
    };
    Check::from_result("W(i) truncation stability", run())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn sample_point(r: &mut impl Rng, inside_cone: bool) -> WPoint {
    loop {
        let x2 = r.random_range(-2.0..2.0);
        let x3 = r.random_range(0.2..1.5) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = WPoint::new(x2, x3);
        let cone = x2.abs() - x3.abs();
        if x2.abs() < 0.05 || (inside_cone && cone < 0.2) || (!inside_cone && cone.abs() < 0.05) {
            continue;
        }
        return p;
    }
}

/// Differential identities of the profiles and the `β` closed form.
pub fn check_special_functions(seed: u64, points: usize) -> Check {
    let mut r = rng(seed);
    let mut worst = [0.0f64; 5];
    for _ in 0..points {
        let p = sample_point(&mut r, false);
        worst[0] = worst[0].max(rel(sf::neg_x23(|q| sf::b_profile(q).value, p, 1e-4), sf::a_profile(p).value));
        worst[1] = worst[1].max(rel(sf::eigen_lhs(|q| sf::b_profile(q).value, p, 1e-3), 2.0 * sf::b_profile(p).value));
        let c = sample_point(&mut r, true);
        worst[0] = worst[0].max(rel(sf::neg_x23(|q| sf::bp_profile(q).value, c, 1e-4), sf::ap_profile(c).value));
        worst[1] = worst[1].max(rel(sf::eigen_lhs(|q| sf::bp_profile(q).value, c, 1e-3), 2.0 * sf::bp_profile(c).value));
        // jumps of A and A' across x₃ = 0 cancel, and B + B' is continuous
        let x2 = r.random_range(0.1..2.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let (lo, hi) = (WPoint::new(x2, -1e-12), WPoint::new(x2, 1e-12));
        let jump = |f: fn(WPoint) -> sf::EvalReport| f(hi).value - f(lo).value;
        worst[2] = worst[2].max((jump(sf::a_profile) + jump(sf::ap_profile)).abs());
        let bsum = |p| sf::b_profile(p).value + sf::bp_profile(p).value;
        worst[3] = worst[3].max((bsum(hi) - bsum(lo)).abs());
    }
    for i in 0..20 {
        let s = 0.01 * (3000.0f64).powf(i as f64 / 19.0);
        let closed = sf::beta_fn(s).map(|e| e.value).unwrap_or(f64::NAN);
        let (quad, _) = oracle::beta_quad(s);
        worst[4] = worst[4].max((closed - quad).abs());
    }
    let ok = worst[0] <= 1e-5 && worst[1] <= 1e-3 && worst[2] <= 1e-8 && worst[3] <= 1e-10 && worst[4] <= 1e-10;
    let detail = format!(
        "{points} points: X23 rel {:.1e}, eigen rel {:.1e}, jump {:.1e}, continuity {:.1e}; beta vs quadrature {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    );
    Check::new("special function identities", ok, detail)
}

/// `Γ(½, a)` against quadrature of its defining integral.
pub fn check_gamma_half() -> Check {
    let mut worst = 0.0f64;
    for a in [0.0, 0.3, 1.0, 2.0 * PI, 10.0, 25.0] {
        let (q, _) = oracle::gamma_half_quad(a);
        worst = worst.max((sf::gamma_half(a).unwrap_or(f64::NAN) - q).abs());
    }
    Check::new("incomplete gamma vs quadrature", worst <= 1e-12, format!("max abs difference {worst:.1e}"))
}

/// A reduced configuration for the command line.
pub fn run_quick(seed: u64) -> Vec<Check> {
    vec![
        check_sol_oracle(seed, 30),
        check_caps(seed.wrapping_add(1), 20),
        check_units(40),
        check_norm_classes(&[2, 5, 13], 20),
        check_cross_formula(&[5, 13], 12),
        check_tables(&[5], 8),
        check_ratio(&[5], 12, 60, 1e-8),
        check_w_stability(5, 1e-8),
        check_special_functions(seed.wrapping_add(2), 20),
        check_gamma_half(),
    ]
}

/// Number of circles on each boundary, as a sanity listing.
pub fn circle_counts(fd: &FieldData, nmax: u32) -> Result<Vec<(u32, BigInt)>> {
    (1..=nmax)
        .map(|n| {
            let comps = cycles::boundary_components(fd, &rational::rat(n as i64))?;
            Ok((n, comps.iter().map(|c| c.multiplicity.clone()).sum()))
        })
        .collect()
}
