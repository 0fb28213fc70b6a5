//! Torus bundles `M = R × T² / (s, w) ~ (s + 1, f(w))` with hyperbolic
//! gluing `f ∈ SL(2, Z)`.
//!
//! Circles in torus fibers are rationally null-homologous in `M`, so any two
//! disjoint ones have a rational linking number. For a circle of class `a`
//! in the fiber `s = 0` and a circle of class `b` in a fiber `0 < s < 1`
//! (a circle in the same fiber is pushed off towards positive `s`),
//!
//! ```text
//! Lk(a, b) = ⟨g·a, b⟩,   g = (f⁻¹ - I)⁻¹,   ⟨x, y⟩ = x₁y₂ - x₂y₁.
//! ```
//!
//! [`build_cap`] constructs an explicit rational 2-chain bounding a fiber
//! circle; [`cap_intersect`] intersects it with a second circle by counting
//! crossings on the torus, which gives an independent route to the same
//! number.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qfield::FieldData;
use crate::rational::{self, fract, rdet2, to_rvec, RVec2, Rational, Vec2};

/// 2×2 integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat2(pub [[BigInt; 2]; 2]);

impl IntMat2 {
    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        IntMat2(m.map(|row| row.map(BigInt::from)))
    }

    pub fn det(&self) -> BigInt {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> BigInt {
        &self.0[0][0] + &self.0[1][1]
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> IntMat2 {
        let m = &self.0;
        let det = self.det();
        let adj = [
            [m[1][1].clone(), -&m[0][1]],
            [-&m[1][0], m[0][0].clone()],
        ];
        if det.is_one() {
            IntMat2(adj)
        } else {
            IntMat2(adj.map(|row| row.map(|x| -x)))
        }
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        [&m[0][0] * &v[0] + &m[0][1] * &v[1], &m[1][0] * &v[0] + &m[1][1] * &v[1]]
    }

    pub fn mul(&self, other: &IntMat2) -> IntMat2 {
        let (a, b) = (&self.0, &other.0);
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        IntMat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// 2×2 rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat2(pub [[Rational; 2]; 2]);

impl RatMat2 {
    pub fn apply(&self, v: &RVec2) -> RVec2 {
        let m = &self.0;
        [&m[0][0] * &v[0] + &m[0][1] * &v[1], &m[1][0] * &v[0] + &m[1][1] * &v[1]]
    }
}

impl fmt::Display for RatMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// A Sol torus bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolManifold {
    pub f: IntMat2,
    /// `(f⁻¹ - I)⁻¹`
    pub g: RatMat2,
    /// `det(f⁻¹ - I)`
    pub n_det: BigInt,
}

/// A class in `H₁(T², Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberClass(pub Vec2);

impl FiberClass {
    pub fn new(x: i64, y: i64) -> Self {
        FiberClass([BigInt::from(x), BigInt::from(y)])
    }

    pub fn is_zero(&self) -> bool {
        self.0[0].is_zero() && self.0[1].is_zero()
    }
}

impl fmt::Display for FiberClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

pub fn make_sol(f: IntMat2) -> Result<SolManifold> {
    if !f.det().is_one() {
        return Err(Error::input(format!("gluing matrix {f} has det {} != 1", f.det())));
    }
    if f.trace().abs() <= BigInt::from(2) {
        return Err(Error::input(format!(
            "gluing matrix {f} has |trace| = {} <= 2 (not hyperbolic)",
            f.trace().abs()
        )));
    }
    let inv = f.unimodular_inverse();
    let h = &inv.0;
    let h = [
        [&h[0][0] - 1, h[0][1].clone()],
        [h[1][0].clone(), &h[1][1] - 1],
    ];
    let n_det = &h[0][0] * &h[1][1] - &h[0][1] * &h[1][0];
    let r = |x: &BigInt| Rational::new(x.clone(), n_det.clone());
    let g = RatMat2([
        [r(&h[1][1]), r(&-&h[0][1])],
        [r(&-&h[1][0]), r(&h[0][0])],
    ]);
    Ok(SolManifold { f, g, n_det })
}

/// The bundle glued by multiplication with `ε'` on the basis `(1, ω)` of
/// the ring of integers.
pub fn glueing_from_unit(fd: &FieldData) -> Result<SolManifold> {
    let field = fd.field;
    let e = fd.eps.conj();
    let col0 = e.clone();
    let col1 = &e * &field.omega();
    let c0 = col0.int_coords().ok_or_else(|| Error::inconsistent("ε' is not integral"))?;
    let c1 = col1.int_coords().ok_or_else(|| Error::inconsistent("ε'ω is not integral"))?;
    let [a, c] = c0;
    let [b, d] = c1;
    make_sol(IntMat2([[a, b], [c, d]]))
}

/// Intersection pairing on `H₁(T²)`.
pub fn pairing(x: &RVec2, y: &RVec2) -> Rational {
    rdet2(x, y)
}

/// `Lk(a, b) = ⟨g·a, b⟩` with `b` in a later fiber.
pub fn link_fiber(m: &SolManifold, a: &FiberClass, b: &FiberClass) -> Rational {
    let ga = m.g.apply(&to_rvec(&a.0));
    pairing(&ga, &to_rvec(&b.0))
}

/// Explicit rational 2-chain bounding a fiber circle.
///
/// The chain is `P + w·T + w·M(γ₀) + κ·[T²]` in the fiber `s = 0`, with
/// `w = 1/N`: the parallelogram `P` translates the circle through
/// `base_offset` to the origin, the triangle `T = (0, γ₀, f⁻¹γ₀)` and the
/// monodromy cylinder `M(γ₀) = γ₀ × [0, 1]` together bound `N` copies of the
/// circle through the origin, and `κ` copies of the fiber torus cancel the
/// area-form period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CapChain {
    #[serde(serialize_with = "ser_vec2")]
    pub circle: Vec2,
    #[serde(serialize_with = "ser_rvec2")]
    pub base_offset: RVec2,
    #[serde(serialize_with = "ser_rvecs")]
    pub parallelogram: Vec<RVec2>,
    #[serde(serialize_with = "ser_vecs")]
    pub triangle: Vec<Vec2>,
    #[serde(serialize_with = "ser_vec2")]
    pub monodromy_class: Vec2,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
    #[serde(with = "rational::serde_str")]
    pub fiber_correction: Rational,
    #[serde(serialize_with = "ser_vec2")]
    f_inverse_gamma: Vec2,
}

fn ser_vec2<S: serde::Serializer>(v: &Vec2, s: S) -> std::result::Result<S::Ok, S::Error> {
    [v[0].to_string(), v[1].to_string()].serialize(s)
}

fn ser_rvec2<S: serde::Serializer>(v: &RVec2, s: S) -> std::result::Result<S::Ok, S::Error> {
    [v[0].to_string(), v[1].to_string()].serialize(s)
}

fn ser_vecs<S: serde::Serializer>(v: &[Vec2], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|p| [p[0].to_string(), p[1].to_string()]).collect::<Vec<_>>().serialize(s)
}

fn ser_rvecs<S: serde::Serializer>(v: &[RVec2], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|p| [p[0].to_string(), p[1].to_string()]).collect::<Vec<_>>().serialize(s)
}

impl CapChain {
    pub fn is_empty(&self) -> bool {
        self.circle[0].is_zero() && self.circle[1].is_zero()
    }

    /// `∫ Ω` over the chain, `Ω` the unit-area form on the fibers.
    pub fn area_period(&self) -> Rational {
        if self.is_empty() {
            return Rational::zero();
        }
        self.parallelogram_area() + &self.weight * self.triangle_area() + &self.fiber_correction
    }

    fn parallelogram_area(&self) -> Rational {
        polygon_area(&self.parallelogram)
    }

    fn triangle_area(&self) -> Rational {
        let tri: Vec<RVec2> = self.triangle.iter().map(to_rvec).collect();
        polygon_area(&tri)
    }

    /// Formal boundary as a 1-chain on the fiber torus.
    pub fn boundary(&self) -> Chain1 {
        let mut chain = Chain1::default();
        if self.is_empty() {
            return chain;
        }
        chain.add_polygon(&self.parallelogram, &Rational::one());
        let tri: Vec<RVec2> = self.triangle.iter().map(to_rvec).collect();
        chain.add_polygon(&tri, &self.weight);
        // ∂M(γ₀) = f⁻¹(γ₀) - γ₀
        let origin = [Rational::zero(), Rational::zero()];
        chain.add_segment(&origin, &to_rvec(&self.f_inverse_gamma), &self.weight);
        chain.add_segment(&origin, &to_rvec(&self.monodromy_class), &-&self.weight);
        chain
    }

    /// The circle the cap is meant to bound, as a 1-chain.
    pub fn target(&self) -> Chain1 {
        let mut chain = Chain1::default();
        chain.add_segment(&self.base_offset, &to_rvec(&self.circle), &Rational::one());
        chain
    }
}

fn polygon_area(vs: &[RVec2]) -> Rational {
    let mut twice = Rational::zero();
    for i in 0..vs.len() {
        twice += rdet2(&vs[i], &vs[(i + 1) % vs.len()]);
    }
    twice / rational::rat(2)
}

/// Cell of a 1-chain on `T² = R²/Z²`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell {
    /// Closed geodesic with primitive direction `dir` (first nonzero entry
    /// positive) through the points `p` with `det(dir, p) ≡ offset (mod 1)`.
    Closed { dir: Vec2, offset: Rational },
    /// Straight segment with non-integral displacement, start reduced mod 1,
    /// oriented so the displacement's first nonzero entry is positive.
    Open { start: RVec2, disp: RVec2 },
}

/// Formal rational 1-chain on the fiber torus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain1 {
    terms: BTreeMap<Cell, Rational>,
}

fn is_negative_dir(v: &RVec2) -> bool {
    v[0].is_negative() || (v[0].is_zero() && v[1].is_negative())
}

impl Chain1 {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Cell, &Rational)> {
        self.terms.iter()
    }

    fn add_cell(&mut self, cell: Cell, coeff: Rational) {
        let entry = self.terms.entry(cell).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    /// Adds `coeff` times the straight segment `p → p + disp`.
    pub fn add_segment(&mut self, p: &RVec2, disp: &RVec2, coeff: &Rational) {
        if disp[0].is_zero() && disp[1].is_zero() {
            return;
        }
        if disp[0].is_integer() && disp[1].is_integer() {
            let v = [disp[0].to_integer(), disp[1].to_integer()];
            let k = rational::gcd(&v[0], &v[1]);
            let mut dir = [&v[0] / &k, &v[1] / &k];
            let mut c = coeff * Rational::from_integer(k);
            if is_negative_dir(&to_rvec(&dir)) {
                dir = [-&dir[0], -&dir[1]];
                c = -c;
            }
            let offset = fract(&rdet2(&to_rvec(&dir), p));
            self.add_cell(Cell::Closed { dir, offset }, c);
        } else {
            let (start, disp, c) = if is_negative_dir(disp) {
                let end = [&p[0] + &disp[0], &p[1] + &disp[1]];
                (end, [-&disp[0], -&disp[1]], -coeff)
            } else {
                (p.clone(), disp.clone(), coeff.clone())
            };
            let start = [fract(&start[0]), fract(&start[1])];
            self.add_cell(Cell::Open { start, disp }, c);
        }
    }

    fn add_polygon(&mut self, vs: &[RVec2], coeff: &Rational) {
        for i in 0..vs.len() {
            let p = &vs[i];
            let q = &vs[(i + 1) % vs.len()];
            let disp = [&q[0] - &p[0], &q[1] - &p[1]];
            self.add_segment(p, &disp, coeff);
        }
    }
}

/// Builds the cap bounding the circle of class `a` through `offset` in the
/// fiber `s = 0`.
pub fn build_cap(m: &SolManifold, a: &FiberClass, offset: &RVec2) -> CapChain {
    let zero = || [BigInt::zero(), BigInt::zero()];
    let weight = Rational::new(BigInt::one(), m.n_det.clone());
    if a.is_zero() {
        let o = [Rational::zero(), Rational::zero()];
        return CapChain {
            circle: zero(),
            base_offset: offset.clone(),
            parallelogram: vec![o.clone(), o.clone(), o.clone(), o],
            triangle: vec![zero(), zero(), zero()],
            monodromy_class: zero(),
            weight,
            fiber_correction: Rational::zero(),
            f_inverse_gamma: zero(),
        };
    }
    // γ₀ = N·g·a is integral: N·g is the adjugate of f⁻¹ - I.
    let ga = m.g.apply(&to_rvec(&a.0));
    let n = Rational::from_integer(m.n_det.clone());
    let gamma: Vec2 = [(&ga[0] * &n).to_integer(), (&ga[1] * &n).to_integer()];
    let f_inv = m.f.unimodular_inverse();
    let d = f_inv.apply(&gamma);

    let av = to_rvec(&a.0);
    let origin = [Rational::zero(), Rational::zero()];
    let o_plus_a = [&offset[0] + &av[0], &offset[1] + &av[1]];
    // ∂P = α - α₀ for vertex order (0, o, o + a, a)
    let parallelogram = vec![origin, offset.clone(), o_plus_a, av];

    let mut cap = CapChain {
        circle: a.0.clone(),
        base_offset: offset.clone(),
        parallelogram,
        triangle: vec![zero(), gamma.clone(), d.clone()],
        monodromy_class: gamma,
        weight,
        fiber_correction: Rational::zero(),
        f_inverse_gamma: d,
    };
    cap.fiber_correction = -(cap.parallelogram_area() + &cap.weight * cap.triangle_area());
    cap
}

/// Starting point of the test circle `b` in its fiber. Any point works; the
/// crossing count does not depend on it.
const PROBE_POINT: ([i128; 2], i128) = ([7, 3], 21);

/// Intersection number of the cap with the circle of class `b` in the fiber
/// `s_b`. Only the monodromy cylinder meets that fiber, in the closed
/// geodesic `γ₀`, so the result is `w` times the signed number of crossings
/// of `γ₀` and `b` on the torus.
pub fn cap_intersect(cap: &CapChain, m: &SolManifold, b: &FiberClass, s_b: &Rational) -> Result<Rational> {
    if !(s_b.is_positive() && s_b < &Rational::one()) {
        return Err(Error::input(format!("fiber parameter s_b = {s_b} must lie strictly between 0 and 1")));
    }
    if cap.weight != Rational::new(BigInt::one(), m.n_det.clone()) {
        return Err(Error::input("cap was built for a different gluing matrix"));
    }
    if cap.is_empty() || b.is_zero() {
        return Ok(Rational::zero());
    }
    let u = to_i128(&cap.monodromy_class)?;
    let v = to_i128(&b.0)?;
    let count = torus_crossings(u, v, PROBE_POINT)?;
    Ok(&cap.weight * Rational::from_integer(BigInt::from(count)))
}

fn to_i128(v: &Vec2) -> Result<[i128; 2]> {
    let c = |x: &BigInt| {
        x.to_i128()
            .filter(|y| y.unsigned_abs() < (1u128 << 40))
            .ok_or_else(|| Error::Overflow(format!("class entry {x} too large for crossing count")))
    };
    Ok([c(&v[0])?, c(&v[1])?])
}

/// Signed number of crossings of the closed geodesics `t ↦ t·u` and
/// `r ↦ p + r·v` on `R²/Z²`, both parametrised once over `[0, 1)`.
///
/// Enumerates the lattice translates `k` for which `t·u - r·v = p + k` has
/// a solution in `[0, 1)²`; each such pair is one crossing, with sign
/// `sign det(u, v)`. The point `p` is given as numerators over a common
/// denominator.
pub fn torus_crossings(u: [i128; 2], v: [i128; 2], p: ([i128; 2], i128)) -> Result<i128> {
    let d = u[0] * v[1] - u[1] * v[0];
    if d == 0 {
        return Ok(0);
    }
    let (pn, den) = p;
    if den <= 0 {
        return Err(Error::input("probe denominator must be positive"));
    }
    let e = den * d;
    // integer window for X with 0 <= X/e < 1
    let (lo, hi) = if e > 0 { (0, e - 1) } else { (e + 1, 0) };
    let span = u[0].abs() + v[0].abs() + 2;
    let mut count = 0i128;
    for k1 in -span..=span {
        let r1 = pn[0] + den * k1;
        // t-numerator: det(R, v) = r1·v2 - R2·v1, R2 = p2 + den·k2
        let c_t0 = r1 * v[1] - pn[1] * v[0];
        let c_t = v[0] * den;
        // r-numerator: -det(u, R) = u2·r1 - u1·R2
        let c_r0 = u[1] * r1 - u[0] * pn[1];
        let c_r = u[0] * den;
        let Some((a1, b1)) = k_range(c_t0, c_t, lo, hi) else { continue };
        let Some((a2, b2)) = k_range(c_r0, c_r, lo, hi) else { continue };
        // u₁ and v₁ are not both zero, so at least one window is finite
        let (l, h) = (a1.max(a2), b1.min(b2));
        if h >= l {
            count += h - l + 1;
        }
    }
    Ok(if d > 0 { count } else { -count })
}

/// Integers `k` with `lo <= c0 - c·k <= hi` as an inclusive range; the
/// whole line when `c = 0` and the condition holds.
fn k_range(c0: i128, c: i128, lo: i128, hi: i128) -> Option<(i128, i128)> {
    if c == 0 {
        return (lo..=hi).contains(&c0).then_some((i128::MIN, i128::MAX));
    }
    // c·k ∈ [c0 - hi, c0 - lo]
    let (a, b) = (c0 - hi, c0 - lo);
    let (kl, kh) = if c > 0 {
        (Integer::div_ceil(&a, &c), Integer::div_floor(&b, &c))
    } else {
        let c = -c;
        (Integer::div_ceil(&-b, &c), Integer::div_floor(&-a, &c))
    };
    (kh >= kl).then_some((kl, kh))
}

/// Integer vector `N·g·a` as a plain pair, for reporting.
pub fn monodromy_class(m: &SolManifold, a: &FiberClass) -> Vec2 {
    let ga = m.g.apply(&to_rvec(&a.0));
    let n = Rational::from_integer(m.n_det.clone());
    [(&ga[0] * &n).to_integer(), (&ga[1] * &n).to_integer()]
}

/// Checks `det(g·a, b)`-style integrality: `N·Lk ∈ Z`.
pub fn is_n_integral(m: &SolManifold, x: &Rational) -> bool {
    (x * Rational::from_integer(m.n_det.clone())).is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::make_field;
    use crate::rational::{frac, rat};

    fn arnold() -> SolManifold {
        make_sol(IntMat2::from_i64([[2, 1], [1, 1]])).unwrap()
    }

    #[test]
    fn make_sol_example() {
        let m = arnold();
        assert_eq!(m.n_det, BigInt::from(-1));
        assert_eq!(
            m.g,
            RatMat2([[rat(-1), rat(-1)], [rat(-1), rat(0)]])
        );
        assert!(make_sol(IntMat2::from_i64([[1, 1], [1, 2]])).is_ok());
    }

    #[test]
    fn make_sol_rejects() {
        assert!(matches!(make_sol(IntMat2::from_i64([[1, 1], [0, 1]])), Err(Error::InvalidInput(_))));
        assert!(matches!(make_sol(IntMat2::from_i64([[2, 1], [1, 2]])), Err(Error::InvalidInput(_))));
        assert!(matches!(make_sol(IntMat2::from_i64([[0, -1], [1, 0]])), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn negative_trace_is_hyperbolic() {
        let m = make_sol(IntMat2::from_i64([[-2, -1], [-1, -1]])).unwrap();
        // det(f⁻¹ - I) = 2 - tr f
        assert_eq!(m.n_det, BigInt::from(5));
    }

    #[test]
    fn glueing_for_d5() {
        let fd = make_field(5).unwrap();
        let m = glueing_from_unit(&fd).unwrap();
        assert_eq!(m.f, IntMat2::from_i64([[2, -1], [-1, 1]]));
        assert_eq!(m.f.trace(), BigInt::from(3));
    }

    #[test]
    fn glueing_trace_matches_unit_trace() {
        for d in [2, 3, 6, 7, 13, 17, 21] {
            let fd = make_field(d).unwrap();
            let m = glueing_from_unit(&fd).unwrap();
            assert!(m.f.det().is_one());
            assert_eq!(Rational::from_integer(m.f.trace()), fd.eps.trace());
        }
    }

    #[test]
    fn link_examples() {
        let m = arnold();
        assert_eq!(link_fiber(&m, &FiberClass::new(1, 0), &FiberClass::new(0, 1)), rat(-1));
        assert_eq!(link_fiber(&m, &FiberClass::new(1, 0), &FiberClass::new(1, 0)), rat(1));
        assert_eq!(link_fiber(&m, &FiberClass::new(0, 0), &FiberClass::new(3, 4)), rat(0));
    }

    #[test]
    fn cap_example() {
        let m = arnold();
        let origin = [rat(0), rat(0)];
        let cap = build_cap(&m, &FiberClass::new(1, 0), &origin);
        assert_eq!(cap.monodromy_class, [BigInt::from(1), BigInt::from(1)]);
        assert_eq!(cap.weight, rat(-1));
        assert_eq!(cap.area_period(), rat(0));
        assert_eq!(cap.boundary(), cap.target());
        let s = frac(1, 2);
        assert_eq!(cap_intersect(&cap, &m, &FiberClass::new(0, 1), &s).unwrap(), rat(-1));
        assert_eq!(cap_intersect(&cap, &m, &FiberClass::new(0, 0), &s).unwrap(), rat(0));
    }

    #[test]
    fn empty_cap() {
        let m = arnold();
        let cap = build_cap(&m, &FiberClass::new(0, 0), &[frac(1, 3), rat(0)]);
        assert!(cap.is_empty());
        assert!(cap.boundary().is_zero());
        assert!(cap.target().is_zero());
        assert_eq!(cap.area_period(), rat(0));
    }

    #[test]
    fn cap_with_offset_bounds_translated_circle() {
        let m = make_sol(IntMat2::from_i64([[3, 2], [1, 1]])).unwrap();
        let cap = build_cap(&m, &FiberClass::new(2, -3), &[frac(2, 5), frac(-1, 3)]);
        assert_eq!(cap.boundary(), cap.target());
        assert_eq!(cap.area_period(), rat(0));
        // the uncorrected chain has a nonzero period
        assert!(!cap.fiber_correction.is_zero());
    }

    #[test]
    fn cap_intersect_bilinear_in_b() {
        let m = arnold();
        let cap = build_cap(&m, &FiberClass::new(1, 0), &[rat(0), rat(0)]);
        let s = frac(1, 3);
        let x = cap_intersect(&cap, &m, &FiberClass::new(1, 0), &s).unwrap();
        let y = cap_intersect(&cap, &m, &FiberClass::new(0, 1), &s).unwrap();
        let xy = cap_intersect(&cap, &m, &FiberClass::new(2, 3), &s).unwrap();
        assert_eq!(xy, x * rat(2) + y * rat(3));
    }

    #[test]
    fn cap_intersect_rejects_fiber_parameter() {
        let m = arnold();
        let cap = build_cap(&m, &FiberClass::new(1, 0), &[rat(0), rat(0)]);
        for s in [rat(0), rat(1), frac(-1, 2), frac(3, 2)] {
            assert!(cap_intersect(&cap, &m, &FiberClass::new(0, 1), &s).is_err());
        }
    }

    #[test]
    fn crossing_counts() {
        let p = ([1, 1], 3);
        assert_eq!(torus_crossings([1, 0], [0, 1], p).unwrap(), 1);
        assert_eq!(torus_crossings([0, 1], [1, 0], p).unwrap(), -1);
        assert_eq!(torus_crossings([2, 1], [1, 3], p).unwrap(), 5);
        assert_eq!(torus_crossings([2, 0], [0, 3], p).unwrap(), 6);
        assert_eq!(torus_crossings([1, 1], [2, 2], p).unwrap(), 0);
        // probe on a grid point: half-open parameters still count each crossing once
        assert_eq!(torus_crossings([3, -1], [1, 4], ([0, 0], 1)).unwrap(), 13);
    }

    #[test]
    fn chain_cancels_lattice_translates() {
        let mut c = Chain1::default();
        c.add_segment(&[frac(1, 2), rat(0)], &[frac(1, 3), frac(1, 5)], &rat(1));
        c.add_segment(&[frac(11, 6), frac(6, 5)], &[frac(-1, 3), frac(-1, 5)], &rat(1));
        assert!(c.is_zero());
        c.add_segment(&[frac(1, 2), rat(0)], &[rat(2), rat(4)], &rat(1));
        c.add_segment(&[frac(1, 2), rat(7)], &[rat(-1), rat(-2)], &rat(2));
        assert!(c.is_zero());
    }
}
