//! Boundary circles of the special cycles `Cₙ` at the cusp and their exact
//! linking numbers in the Sol boundary manifold.
//!
//! The torus fiber is `K_R / O_K`, with intersection form the symplectic
//! pairing `⟨λ, μ⟩ = (λμ' - λ'μ)/sqrt(disc)` and gluing by `ε'`. Each
//! `U₊`-class `μ` of totally positive integers of norm `n` contributes
//! `min'|⟨λ, μ⟩|` parallel circles in the direction of `μ`, all in the fiber
//! at height `log(μ/μ') / log(ε²)` counted downwards.
//!
//! Lattice vectors are written in the *W-basis* `(ω, 1)`: `a + bω ↦ (b, a)`.
//! In that basis the symplectic pairing is the standard determinant, so the
//! generic [`crate::sol`] formulas apply unchanged.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qfield::{self, embedding_ratio, enumerate_norm_classes, symplectic, FieldData, NormClass, QuadElem};
use crate::rational::{self, Rational, Vec2};
use crate::sol::{self, FiberClass, IntMat2, SolManifold};

/// Each geometric circle is traced by the boundary of both `C_x` and
/// `C_{-x}`; the sum over lattice vectors therefore counts every class twice.
const SIGN_PAIR: i64 = 2;

/// A family of parallel boundary circles coming from one norm class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub class: NormClass,
    /// `min'` over the lattice of `|⟨λ, μ⟩|`: the number of parallel circles.
    pub multiplicity: BigInt,
    /// Primitive lattice direction of the circles, in the W-basis.
    pub direction: FiberClass,
    /// `μ/μ'`; equal labels mean equal fibers.
    pub fiber_label: QuadElem,
}

/// `a + bω ↦ (b, a)`.
pub fn to_w_coords(x: &QuadElem) -> Result<Vec2> {
    let [a, b] = x
        .int_coords()
        .ok_or_else(|| Error::inconsistent(format!("{x} is not an integer of the field")))?;
    Ok([b, a])
}

pub fn from_w_coords(field: qfield::QuadField, v: &Vec2) -> QuadElem {
    field.elem(Rational::from_integer(v[1].clone()), Rational::from_integer(v[0].clone()))
}

/// Sol manifold of the cusp, in W-basis coordinates.
pub fn w_gluing(fd: &FieldData) -> Result<SolManifold> {
    let m = sol::glueing_from_unit(fd)?;
    let f = &m.f.0;
    // conjugate by the coordinate swap
    sol::make_sol(IntMat2([
        [f[1][1].clone(), f[1][0].clone()],
        [f[0][1].clone(), f[0][0].clone()],
    ]))
}

/// `min'_{λ ∈ O_K} |⟨λ, μ⟩|`, the gcd of the pairing on the basis `(1, ω)`.
pub fn min_prime(fd: &FieldData, mu: &QuadElem) -> BigInt {
    let f = fd.field;
    let p1 = symplectic(&f.one(), mu).to_integer();
    let p2 = symplectic(&f.omega(), mu).to_integer();
    rational::gcd(&p1, &p2)
}

/// The primitive lattice vector on the line `{λ : ⟨λ, μ⟩ = 0}`, oriented
/// as a positive multiple of `μ`.
pub fn symplectic_perp(fd: &FieldData, mu: &QuadElem) -> Result<FiberClass> {
    if mu.is_zero() {
        return Err(Error::input("direction of the zero vector"));
    }
    let k = min_prime(fd, mu);
    let prim = mu.scale(&Rational::new(BigInt::one(), k));
    let v = to_w_coords(&prim)?;
    Ok(FiberClass(v))
}

pub fn boundary_components(fd: &FieldData, n: &Rational) -> Result<Vec<BoundaryComponent>> {
    enumerate_norm_classes(fd, n)?
        .into_iter()
        .map(|class| {
            let multiplicity = min_prime(fd, &class.rep);
            let direction = symplectic_perp(fd, &class.rep)?;
            let fiber_label = embedding_ratio(&class.rep);
            Ok(BoundaryComponent { class, multiplicity, direction, fiber_label })
        })
        .collect()
}

/// The individual circles `c_{x + ku}`, `0 ≤ k < multiplicity`, as
/// `(direction, fiber label)` pairs.
pub fn boundary_circles(fd: &FieldData, n: &Rational) -> Result<Vec<(FiberClass, QuadElem)>> {
    let mut out = Vec::new();
    for comp in boundary_components(fd, n)? {
        let mut k = BigInt::zero();
        while k < comp.multiplicity {
            out.push((comp.direction.clone(), comp.fiber_label.clone()));
            k += 1;
        }
    }
    Ok(out)
}

/// An integral binary quadratic lattice `(Z², gram)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WLattice {
    pub gram: [[BigInt; 2]; 2],
}

impl WLattice {
    pub fn from_i64(g: [[i64; 2]; 2]) -> Self {
        WLattice { gram: g.map(|r| r.map(BigInt::from)) }
    }

    pub fn bilinear(&self, x: &Vec2, y: &Vec2) -> BigInt {
        let g = &self.gram;
        &x[0] * (&g[0][0] * &y[0] + &g[0][1] * &y[1]) + &x[1] * (&g[1][0] * &y[0] + &g[1][1] * &y[1])
    }
}

/// Gram matrix of the trace form `(λ, μ) = Tr(λμ')` on the basis `(1, ω)`.
pub fn trace_form(fd: &FieldData) -> WLattice {
    let f = fd.field;
    let t = |x: &QuadElem, y: &QuadElem| (x * &y.conj()).trace().to_integer();
    let (one, w) = (f.one(), f.omega());
    WLattice { gram: [[t(&one, &one), t(&one, &w)], [t(&w, &one), t(&w, &w)]] }
}

/// Primitive `v` with `(x, v) = 0` and `det(x, v) > 0`.
pub fn j_perp(lattice: &WLattice, x: &Vec2) -> Result<Vec2> {
    if x[0].is_zero() && x[1].is_zero() {
        return Err(Error::input("j_perp of the zero vector"));
    }
    let e0 = [BigInt::one(), BigInt::zero()];
    let e1 = [BigInt::zero(), BigInt::one()];
    let (l0, l1) = (lattice.bilinear(x, &e0), lattice.bilinear(x, &e1));
    if l0.is_zero() && l1.is_zero() {
        return Err(Error::input("degenerate form: x is in the radical"));
    }
    let k = rational::gcd(&l0, &l1);
    let mut v = [-&l1 / &k, &l0 / &k];
    let orient = &x[0] * &v[1] - &x[1] * &v[0];
    if orient.is_zero() {
        return Err(Error::input("x is isotropic; orthogonal complement contains x"));
    }
    if orient.is_negative() {
        v = [-&v[0], -&v[1]];
    }
    Ok(v)
}

/// Multiplies `nu` by powers of `ε` so that its fiber sits at or below the
/// fiber of `mu` and above the fiber one period lower:
/// `ratio(μ)/ε² < ratio(ν*) ≤ ratio(μ)`.
fn align_below(fd: &FieldData, mu: &QuadElem, nu: &QuadElem) -> QuadElem {
    let eps2 = &fd.eps * &fd.eps;
    let eps_conj = fd.eps.conj();
    let rm = embedding_ratio(mu);
    let mut out = nu.clone();
    let mut r = embedding_ratio(nu);
    while r > rm {
        out = &out * &eps_conj;
        r = embedding_ratio(&out);
    }
    while &r * &eps2 <= rm {
        out = &out * &fd.eps;
        r = embedding_ratio(&out);
    }
    out
}

/// Linking number of one circle of `a` with one circle of `b`; `b` is
/// moved into the fiber period just below `a` first.
pub fn link_boundary_pair(
    fd: &FieldData,
    m: &SolManifold,
    a: &BoundaryComponent,
    b: &BoundaryComponent,
) -> Result<Rational> {
    let partner = align_below(fd, &a.class.rep, &b.class.rep);
    Ok(sol::link_fiber(m, &a.direction, &symplectic_perp(fd, &partner)?))
}

fn link_components(
    fd: &FieldData,
    m: &SolManifold,
    comps_n: &[BoundaryComponent],
    comps_m: &[BoundaryComponent],
) -> Result<Rational> {
    let mut total = Rational::zero();
    for a in comps_n {
        for b in comps_m {
            let mult = Rational::from_integer(&a.multiplicity * &b.multiplicity);
            total += mult * link_boundary_pair(fd, m, a, b)?;
        }
    }
    Ok(total * rational::rat(SIGN_PAIR))
}

/// `Lk(∂Cₙ, ∂Cₘ)` at the cusp.
pub fn link_boundary(fd: &FieldData, n: &Rational, m: &Rational) -> Result<Rational> {
    let comps_n = boundary_components(fd, n)?;
    let comps_m = boundary_components(fd, m)?;
    let sol = w_gluing(fd)?;
    link_components(fd, &sol, &comps_n, &comps_m)
}

/// Closed form `Lk(∂Cₙ, ∂C₁) = (2/sqrt disc) Σ_μ (μ + μ'ε)/(ε - 1)`,
/// evaluated in field arithmetic.
pub fn link_boundary_closed(fd: &FieldData, n: &Rational) -> Result<Rational> {
    if enumerate_norm_classes(fd, &Rational::one())?.is_empty() {
        return Err(Error::input("field has no norm-1 class"));
    }
    let f = fd.field;
    let eps_minus_one = &fd.eps - &f.one();
    let mut sum = f.zero();
    for class in enumerate_norm_classes(fd, n)? {
        let mu = &class.rep;
        let top = mu + &(&mu.conj() * &fd.eps);
        sum = &sum + &top.div(&eps_minus_one).expect("ε ≠ 1");
    }
    let value = sum.div(&f.sqrt_disc()).expect("sqrt(disc) ≠ 0");
    if !value.is_rational() {
        return Err(Error::inconsistent(format!(
            "closed-form linking number {value} is irrational for d = {}, n = {n}",
            fd.d()
        )));
    }
    Ok(value.a * rational::rat(2))
}

/// All `Lk(∂Cₙ, ∂Cₘ)` for `1 ≤ n, m ≤ nmax`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkTable {
    pub field: FieldData,
    pub nmax: u32,
    pub n_det: BigInt,
    pub entries: BTreeMap<(u32, u32), Rational>,
}

#[derive(Serialize)]
struct LinkTableJson<'a> {
    d: i64,
    disc: i64,
    nmax: u32,
    n_det: String,
    entries: Vec<LinkEntryJson<'a>>,
}

#[derive(Serialize)]
struct LinkEntryJson<'a> {
    n: u32,
    m: u32,
    #[serde(with = "rational::serde_str")]
    lk: &'a Rational,
}

impl LinkTable {
    pub fn get(&self, n: u32, m: u32) -> Option<&Rational> {
        self.entries.get(&(n, m))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = LinkTableJson {
            d: self.field.d(),
            disc: self.field.disc(),
            nmax: self.nmax,
            n_det: self.n_det.to_string(),
            entries: self.entries.iter().map(|(&(n, m), lk)| LinkEntryJson { n, m, lk }).collect(),
        };
        serde_json::to_value(j).expect("link table serializes")
    }
}

/// Per-index boundary data shared by all cells of a table row or column.
pub struct TableContext {
    sol: SolManifold,
    comps: Vec<Vec<BoundaryComponent>>,
}

impl TableContext {
    pub fn new(fd: &FieldData, nmax: u32) -> Result<Self> {
        let sol = w_gluing(fd)?;
        let comps = (1..=nmax)
            .map(|n| boundary_components(fd, &rational::rat(n as i64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TableContext { sol, comps })
    }

    pub fn n_det(&self) -> &BigInt {
        &self.sol.n_det
    }

    /// One cell; `n, m` are 1-based.
    pub fn cell(&self, fd: &FieldData, n: u32, m: u32) -> Result<Rational> {
        link_components(fd, &self.sol, &self.comps[n as usize - 1], &self.comps[m as usize - 1])
    }
}

pub fn link_table(fd: &FieldData, nmax: u32) -> Result<LinkTable> {
    if nmax < 1 {
        return Err(Error::input("nmax must be at least 1"));
    }
    let ctx = TableContext::new(fd, nmax)?;
    let mut entries = BTreeMap::new();
    for n in 1..=nmax {
        for m in 1..=nmax {
            entries.insert((n, m), ctx.cell(fd, n, m)?);
        }
    }
    Ok(LinkTable { field: fd.clone(), nmax, n_det: ctx.n_det().clone(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::make_field;
    use crate::rational::rat;

    fn d5() -> FieldData {
        make_field(5).unwrap()
    }

    #[test]
    fn components_d5() {
        let fd = d5();
        let one = boundary_components(&fd, &rat(1)).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].class.rep, fd.field.one());
        assert_eq!(one[0].multiplicity, BigInt::from(1));
        assert!(boundary_components(&fd, &rat(2)).unwrap().is_empty());
        let four = boundary_components(&fd, &rat(4)).unwrap();
        assert_eq!(four.len(), 1);
        assert_eq!(four[0].class.rep, fd.field.int_elem(2, 0));
        assert_eq!(four[0].multiplicity, BigInt::from(2));
        assert_eq!(four[0].direction, FiberClass::new(0, 1));
        assert!(boundary_components(&fd, &rat(-1)).is_err());
    }

    #[test]
    fn multiplicity_matches_bounded_search() {
        let fd = make_field(13).unwrap();
        for n in 1..=30 {
            for comp in boundary_components(&fd, &rat(n)).unwrap() {
                let mut best: Option<BigInt> = None;
                for a in -6..=6 {
                    for b in -6..=6 {
                        let v = symplectic(&fd.field.int_elem(a, b), &comp.class.rep).to_integer().abs();
                        if !v.is_zero() && best.as_ref().is_none_or(|m| &v < m) {
                            best = Some(v);
                        }
                    }
                }
                assert_eq!(best.unwrap(), comp.multiplicity, "n = {n}");
            }
        }
    }

    #[test]
    fn j_perp_examples() {
        let lor = WLattice::from_i64([[1, 0], [0, -1]]);
        let e = |x: i64, y: i64| [BigInt::from(x), BigInt::from(y)];
        assert_eq!(j_perp(&lor, &e(1, 0)).unwrap(), e(0, 1));
        assert_eq!(j_perp(&lor, &e(2, 0)).unwrap(), e(0, 1));
        assert!(j_perp(&lor, &e(0, 0)).is_err());
        assert!(j_perp(&lor, &e(1, 1)).is_err());
        let tf = trace_form(&d5());
        assert_eq!(tf, WLattice::from_i64([[2, 1], [1, -2]]));
        // (-1, 2) = -1 + 2ω = sqrt 5, trace-orthogonal to 1
        let v = j_perp(&tf, &e(1, 0)).unwrap();
        assert_eq!(v, e(-1, 2));
        assert_eq!(d5().field.int_elem(-1, 2), d5().field.sqrt_disc());
    }

    #[test]
    fn link_boundary_d5_values() {
        let fd = d5();
        assert_eq!(link_boundary(&fd, &rat(1), &rat(1)).unwrap(), rat(2));
        assert_eq!(link_boundary(&fd, &rat(4), &rat(1)).unwrap(), rat(4));
        assert_eq!(link_boundary(&fd, &rat(5), &rat(1)).unwrap(), rat(4));
        assert_eq!(link_boundary(&fd, &rat(2), &rat(1)).unwrap(), rat(0));
        assert_eq!(link_boundary(&fd, &rat(1), &rat(2)).unwrap(), rat(0));
    }

    #[test]
    fn closed_form_d5_values() {
        let fd = d5();
        assert_eq!(link_boundary_closed(&fd, &rat(1)).unwrap(), rat(2));
        assert_eq!(link_boundary_closed(&fd, &rat(4)).unwrap(), rat(4));
        assert_eq!(link_boundary_closed(&fd, &rat(5)).unwrap(), rat(4));
        assert_eq!(link_boundary_closed(&fd, &rat(2)).unwrap(), rat(0));
    }

    #[test]
    fn table_shapes() {
        let fd = d5();
        let t1 = link_table(&fd, 1).unwrap();
        assert_eq!(t1.entries.len(), 1);
        assert_eq!(t1.get(1, 1), Some(&rat(2)));
        let t2 = link_table(&fd, 2).unwrap();
        assert_eq!(t2.entries.len(), 4);
        for k in 1..=2 {
            assert_eq!(t2.get(2, k), Some(&rat(0)));
            assert_eq!(t2.get(k, 2), Some(&rat(0)));
        }
        assert!(link_table(&fd, 0).is_err());
    }

    #[test]
    fn table_entries_are_n_integral() {
        let fd = make_field(13).unwrap();
        let t = link_table(&fd, 12).unwrap();
        let n = Rational::from_integer(t.n_det.clone());
        for v in t.entries.values() {
            assert!((v * &n).is_integer());
        }
    }

    #[test]
    fn w_gluing_is_conjugate() {
        let fd = d5();
        let w = w_gluing(&fd).unwrap();
        assert_eq!(w.f, IntMat2::from_i64([[1, -1], [-1, 2]]));
        // multiplication by ε' on the W-coordinates of ω
        let img = w.f.apply(&to_w_coords(&fd.field.omega()).unwrap());
        assert_eq!(from_w_coords(fd.field, &img), &fd.eps.conj() * &fd.field.omega());
    }
}
