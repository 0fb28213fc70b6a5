//! Exact arithmetic in real quadratic fields `Q(sqrt d)`.
//!
//! Elements are stored by rational coordinates in the integral basis
//! `(1, ω)` with `ω = (1 + sqrt d)/2` for `d ≡ 1 (mod 4)` and `ω = sqrt d`
//! otherwise, so integrality is coordinate integrality. The real embedding
//! fixed throughout takes `sqrt d > 0`; all comparisons are exact.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// The field `Q(sqrt d)` for a squarefree `d > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadField {
    d: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d <= 1 {
            return Err(Error::input(format!("d must be > 1, got {d}")));
        }
        if !is_squarefree(d) {
            return Err(Error::input(format!("d = {d} is not squarefree")));
        }
        Ok(QuadField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    fn one_mod_four(&self) -> bool {
        self.d % 4 == 1
    }

    pub fn disc(&self) -> i64 {
        if self.one_mod_four() {
            self.d
        } else {
            4 * self.d
        }
    }

    /// `Tr(ω)`.
    pub fn omega_trace(&self) -> i64 {
        if self.one_mod_four() {
            1
        } else {
            0
        }
    }

    /// `Norm(ω)`.
    pub fn omega_norm(&self) -> i64 {
        if self.one_mod_four() {
            (1 - self.d) / 4
        } else {
            -self.d
        }
    }

    pub fn omega_desc(&self) -> String {
        if self.one_mod_four() {
            format!("(1+sqrt({}))/2", self.d)
        } else {
            format!("sqrt({})", self.d)
        }
    }

    pub fn elem(&self, a: Rational, b: Rational) -> QuadElem {
        QuadElem { field: *self, a, b }
    }

    pub fn int_elem(&self, a: i64, b: i64) -> QuadElem {
        self.elem(rational::rat(a), rational::rat(b))
    }

    pub fn from_rational(&self, q: Rational) -> QuadElem {
        self.elem(q, Rational::zero())
    }

    pub fn one(&self) -> QuadElem {
        self.int_elem(1, 0)
    }

    pub fn zero(&self) -> QuadElem {
        self.int_elem(0, 0)
    }

    pub fn omega(&self) -> QuadElem {
        self.int_elem(0, 1)
    }

    /// `p + q·sqrt d`.
    pub fn from_sqrt_parts(&self, p: Rational, q: Rational) -> QuadElem {
        if self.one_mod_four() {
            // sqrt d = 2ω - 1
            let two_q = &q * rational::rat(2);
            self.elem(p - q, two_q)
        } else {
            self.elem(p, q)
        }
    }

    /// `sqrt(disc) = ω - ω'`.
    pub fn sqrt_disc(&self) -> QuadElem {
        self.int_elem(-self.omega_trace(), 2)
    }
}

pub fn is_squarefree(d: i64) -> bool {
    let mut n = d;
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

/// `a + b·ω` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub field: QuadField,
    pub a: Rational,
    pub b: Rational,
}

impl QuadElem {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn conj(&self) -> QuadElem {
        let tr = rational::rat(self.field.omega_trace());
        self.field.elem(&self.a + &self.b * tr, -&self.b)
    }

    pub fn norm(&self) -> Rational {
        let f = &self.field;
        &self.a * &self.a
            + &self.a * &self.b * rational::rat(f.omega_trace())
            + &self.b * &self.b * rational::rat(f.omega_norm())
    }

    pub fn trace(&self) -> Rational {
        &self.a * rational::rat(2) + &self.b * rational::rat(self.field.omega_trace())
    }

    /// Coordinates `(p, q)` with `self = p + q·sqrt d`.
    pub fn sqrt_parts(&self) -> (Rational, Rational) {
        if self.field.one_mod_four() {
            let half = rational::frac(1, 2);
            (&self.a + &self.b * &half, &self.b * half)
        } else {
            (self.a.clone(), self.b.clone())
        }
    }

    /// Exact sign under the embedding `sqrt d > 0`.
    pub fn signum(&self) -> Ordering {
        let (p, q) = self.sqrt_parts();
        let sp = p.cmp(&Rational::zero());
        let sq = q.cmp(&Rational::zero());
        match (sp, sq) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (s, t) if s == t => s,
            _ => {
                let p2 = &p * &p;
                let q2d = &q * &q * rational::rat(self.field.d);
                if p2 > q2d {
                    sp
                } else {
                    sq
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Both real embeddings positive.
    pub fn is_totally_positive(&self) -> bool {
        self.is_positive() && self.conj().is_positive()
    }

    pub fn inverse(&self) -> Option<QuadElem> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(self.field.elem(c.a / &n, c.b / n))
    }

    pub fn div(&self, other: &QuadElem) -> Option<QuadElem> {
        other.inverse().map(|inv| self * &inv)
    }

    pub fn pow(&self, k: i64) -> Option<QuadElem> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = self.field.one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    pub fn scale(&self, q: &Rational) -> QuadElem {
        self.field.elem(&self.a * q, &self.b * q)
    }

    /// Value under the real embedding `sqrt d > 0`.
    pub fn to_f64(&self) -> f64 {
        let (p, q) = self.sqrt_parts();
        rational::to_f64(&p) + rational::to_f64(&q) * (self.field.d as f64).sqrt()
    }

    /// Integer coordinates, if integral.
    pub fn int_coords(&self) -> Option<[BigInt; 2]> {
        if self.is_integral() {
            Some([self.a.to_integer(), self.b.to_integer()])
        } else {
            None
        }
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.sqrt_parts();
        match (p.is_zero(), q.is_zero()) {
            (_, true) => write!(f, "{p}"),
            (true, false) => write!(f, "{q}*sqrt({})", self.field.d),
            (false, false) => {
                let sign = if q.is_negative() { '-' } else { '+' };
                write!(f, "{p} {sign} {}*sqrt({})", q.abs(), self.field.d)
            }
        }
    }
}

impl PartialOrd for QuadElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

fn same_field(x: &QuadElem, y: &QuadElem) {
    assert_eq!(x.field, y.field, "mixing elements of different quadratic fields");
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        same_field(self, rhs);
        self.field.elem(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        same_field(self, rhs);
        self.field.elem(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        same_field(self, rhs);
        // ω² = Tr(ω)·ω - Norm(ω)
        let f = &self.field;
        let bb = &self.b * &rhs.b;
        let a = &self.a * &rhs.a - &bb * rational::rat(f.omega_norm());
        let b = &self.a * &rhs.b + &self.b * &rhs.a + &bb * rational::rat(f.omega_trace());
        f.elem(a, b)
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        self.field.elem(-&self.a, -&self.b)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadElem {
            type Output = QuadElem;
            fn $m(self, rhs: QuadElem) -> QuadElem {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $m(self, rhs: &QuadElem) -> QuadElem {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

/// A real quadratic field together with its unit data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldData {
    pub field: QuadField,
    /// Fundamental unit `ε₀ > 1`.
    pub eps0: QuadElem,
    pub eps0_norm: i32,
    /// Generator `ε > 1` of the totally positive units.
    pub eps: QuadElem,
}

impl FieldData {
    pub fn d(&self) -> i64 {
        self.field.d()
    }

    pub fn disc(&self) -> i64 {
        self.field.disc()
    }

    pub fn omega_desc(&self) -> String {
        self.field.omega_desc()
    }
}

pub fn make_field(d: i64) -> Result<FieldData> {
    let field = QuadField::new(d)?;
    let eps0 = fundamental_unit(&field)?;
    let n = eps0.norm();
    let eps0_norm = if n.is_one() { 1 } else { -1 };
    let eps = if eps0_norm == 1 { eps0.clone() } else { &eps0 * &eps0 };
    Ok(FieldData { field, eps0, eps0_norm, eps })
}

/// Smallest unit `> 1` of the ring of integers.
///
/// Runs the continued fraction of `ω` on states `(P, Q)` representing
/// `(P + sqrt d)/Q`; the product of the complete quotients over one period
/// is the fundamental unit.
pub fn fundamental_unit(field: &QuadField) -> Result<QuadElem> {
    let d = BigInt::from(field.d());
    let root = d.sqrt();
    let (mut p, mut q) = if field.one_mod_four() {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut states: Vec<(BigInt, BigInt)> = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
            let mut unit = field.one();
            for (pk, qk) in &states[start..] {
                let quotient = field.from_sqrt_parts(
                    Rational::new(pk.clone(), qk.clone()),
                    Rational::new(BigInt::one(), qk.clone()),
                );
                unit = &unit * &quotient;
            }
            let n = unit.norm();
            if !unit.is_integral() || n.abs() != Rational::one() || !unit.is_positive() {
                return Err(Error::inconsistent(format!(
                    "continued fraction produced non-unit {unit} for d = {}",
                    field.d()
                )));
            }
            return Ok(unit);
        }
        seen.insert((p.clone(), q.clone()), states.len());
        states.push((p.clone(), q.clone()));
        let a = (&p + &root).div_floor(&q);
        let p_next = &a * &q - &p;
        let q_next = (&d - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
    }
}

/// A `U₊`-orbit of totally positive integers of norm `n`, represented by
/// the unique member with `1 ≤ rep/rep' < ε²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormClass {
    pub rep: QuadElem,
    pub n: Rational,
}

/// `x/x'` for totally positive `x`, i.e. `x²/Norm(x)`.
pub fn embedding_ratio(x: &QuadElem) -> QuadElem {
    let n = x.norm();
    (x * x).scale(&n.recip())
}

fn is_reduced(fd: &FieldData, x: &QuadElem) -> bool {
    let r = embedding_ratio(x);
    let eps2 = &fd.eps * &fd.eps;
    r >= fd.field.one() && r < eps2
}

/// Moves a totally positive `x` into the fundamental domain
/// `1 ≤ x/x' < ε²` by multiplying with powers of `ε`.
pub fn reduce(fd: &FieldData, x: &QuadElem) -> Result<QuadElem> {
    if !x.is_totally_positive() {
        return Err(Error::input(format!("{x} is not totally positive")));
    }
    let one = fd.field.one();
    let eps2 = &fd.eps * &fd.eps;
    let eps_conj = fd.eps.conj();
    let mut y = x.clone();
    let mut r = embedding_ratio(&y);
    while r < one {
        y = &y * &fd.eps;
        r = &r * &eps2;
    }
    let eps2_inv = &eps_conj * &eps_conj;
    while r >= eps2 {
        y = &y * &eps_conj;
        r = &r * &eps2_inv;
    }
    Ok(y)
}

fn sort_key(x: &QuadElem) -> (Rational, Rational) {
    (x.a.clone(), x.b.clone())
}

/// All `U₊`-orbits of totally positive integers with norm `n`.
pub fn enumerate_norm_classes(fd: &FieldData, n: &Rational) -> Result<Vec<NormClass>> {
    if !n.is_positive() {
        return Err(Error::input(format!("norm must be positive, got {n}")));
    }
    if !n.is_integer() {
        return Ok(Vec::new());
    }
    let field = fd.field;
    let n_int = n.to_integer();
    let disc = BigInt::from(field.disc());
    let tr = BigInt::from(field.omega_trace());

    // Reduced reps satisfy sqrt n ≤ μ < ε sqrt n and μ' = n/μ, so
    // 0 ≤ b·sqrt(disc) = μ - μ' < sqrt n (ε - 1/ε).
    let eps_f = fd.eps.to_f64();
    let b_bound = (n_int.to_f64().unwrap_or(f64::INFINITY).sqrt() * (eps_f - 1.0 / eps_f)
        / (field.disc() as f64).sqrt())
    .floor();
    let b_max = if b_bound.is_finite() {
        BigInt::from(b_bound as i128) + 1
    } else {
        return Err(Error::Overflow("norm class search bound".into()));
    };

    let mut out = Vec::new();
    let mut b = BigInt::zero();
    while b <= b_max {
        // a² + a·b·tr + b²·N(ω) = n  ⇒  (2a + b·tr)² = b²·disc + 4n
        let rhs: BigInt = &b * &b * &disc + &n_int * 4;
        let s: BigInt = rhs.sqrt();
        if &s * &s == rhs {
            for root in [s.clone(), -s.clone()] {
                let num: BigInt = root - &b * &tr;
                if num.is_even() {
                    let a = num / 2;
                    let mu = field.elem(Rational::from_integer(a), Rational::from_integer(b.clone()));
                    if mu.is_totally_positive() && is_reduced(fd, &mu) && !out.contains(&mu) {
                        out.push(mu);
                    }
                }
            }
        }
        b += 1;
    }
    out.sort_by_key(sort_key);
    Ok(out.into_iter().map(|rep| NormClass { rep, n: n.clone() }).collect())
}

/// Every totally positive `a + bω` with `|a|, |b| ≤ bound` and norm `n`,
/// unreduced and sorted by coordinates.
pub fn brute_force_norm_solutions(fd: &FieldData, n: &Rational, bound: i64) -> Vec<QuadElem> {
    let field = fd.field;
    let mut out = Vec::new();
    if !n.is_integer() {
        return out;
    }
    let Some(target) = n.to_integer().to_i128() else { return out };
    let (tr, nw) = (field.omega_trace() as i128, field.omega_norm() as i128);
    for a in -bound..=bound {
        for b in -bound..=bound {
            let (ai, bi) = (a as i128, b as i128);
            if ai * ai + ai * bi * tr + bi * bi * nw != target {
                continue;
            }
            let x = field.int_elem(a, b);
            if x.is_totally_positive() {
                out.push(x);
            }
        }
    }
    out
}

/// Symplectic pairing `⟨λ, μ⟩ = (λμ' - λ'μ)/sqrt(disc)`, rational for
/// elements of the field.
pub fn symplectic(x: &QuadElem, y: &QuadElem) -> Rational {
    let top = x * &y.conj() - &x.conj() * y;
    // top = q·(ω - ω') = q·(2ω - Tr ω) with q rational
    debug_assert!((&top.a * rational::rat(2) + &top.b * rational::rat(x.field.omega_trace())).is_zero());
    top.b / rational::rat(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};

    #[test]
    fn basis_conventions() {
        let f5 = QuadField::new(5).unwrap();
        assert_eq!(f5.disc(), 5);
        assert_eq!(f5.omega_desc(), "(1+sqrt(5))/2");
        let f2 = QuadField::new(2).unwrap();
        assert_eq!(f2.disc(), 8);
        assert_eq!(f2.omega_desc(), "sqrt(2)");
        assert_eq!(QuadField::new(6).unwrap().disc(), 24);
    }

    #[test]
    fn rejects_bad_d() {
        assert!(matches!(QuadField::new(12), Err(Error::InvalidInput(_))));
        assert!(matches!(QuadField::new(1), Err(Error::InvalidInput(_))));
        assert!(matches!(QuadField::new(-3), Err(Error::InvalidInput(_))));
        assert!(matches!(make_field(18), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn omega_squared() {
        let f = QuadField::new(5).unwrap();
        let w = f.omega();
        assert_eq!(&w * &w, f.int_elem(1, 1));
        let f3 = QuadField::new(3).unwrap();
        assert_eq!(&f3.omega() * &f3.omega(), f3.int_elem(3, 0));
    }

    #[test]
    fn sqrt_disc_squares_to_disc() {
        for d in [2, 3, 5, 6, 13, 21] {
            let f = QuadField::new(d).unwrap();
            let s = f.sqrt_disc();
            assert_eq!(&s * &s, f.from_rational(rat(f.disc())));
            assert!(s.is_positive());
        }
    }

    #[test]
    fn field_five_units() {
        let fd = make_field(5).unwrap();
        assert_eq!(fd.eps0, fd.field.omega());
        assert_eq!(fd.eps0_norm, -1);
        // (3 + sqrt 5)/2 = 1 + ω
        assert_eq!(fd.eps, fd.field.int_elem(1, 1));
        assert_eq!(fd.eps.to_string(), "3/2 + 1/2*sqrt(5)");
    }

    #[test]
    fn fundamental_units_small_d() {
        let f2 = make_field(2).unwrap();
        assert_eq!(f2.eps0, f2.field.int_elem(1, 1));
        assert_eq!(f2.eps0_norm, -1);
        let f3 = make_field(3).unwrap();
        assert_eq!(f3.eps0, f3.field.int_elem(2, 1));
        assert_eq!(f3.eps0_norm, 1);
        assert_eq!(f3.eps, f3.eps0);
        // (3 + sqrt 13)/2 = 1 + ω
        let f13 = make_field(13).unwrap();
        assert_eq!(f13.eps0, f13.field.int_elem(1, 1));
        assert_eq!(f13.eps0_norm, -1);
    }

    #[test]
    fn sign_is_exact_near_zero() {
        let f = QuadField::new(2).unwrap();
        // 1393 - 985 sqrt 2 ≈ -3.6e-4
        assert!(!f.int_elem(1393, -985).is_positive());
        assert!(f.int_elem(-1393, 985).is_positive());
        assert!(f.int_elem(1393, -985).conj().is_positive());
        assert_eq!(f.zero().signum(), Ordering::Equal);
    }

    #[test]
    fn norm_classes_d5() {
        let fd = make_field(5).unwrap();
        let f = fd.field;
        let one = enumerate_norm_classes(&fd, &rat(1)).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].rep, f.one());
        assert!(enumerate_norm_classes(&fd, &rat(2)).unwrap().is_empty());
        let four = enumerate_norm_classes(&fd, &rat(4)).unwrap();
        assert_eq!(four.iter().map(|c| c.rep.clone()).collect::<Vec<_>>(), vec![f.int_elem(2, 0)]);
        let five = enumerate_norm_classes(&fd, &rat(5)).unwrap();
        // (5 + sqrt 5)/2 = 2 + ω
        assert_eq!(five.iter().map(|c| c.rep.clone()).collect::<Vec<_>>(), vec![f.int_elem(2, 1)]);
        assert!(enumerate_norm_classes(&fd, &frac(1, 2)).unwrap().is_empty());
        assert!(enumerate_norm_classes(&fd, &rat(0)).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let fd = make_field(5).unwrap();
        let f = fd.field;
        let four = brute_force_norm_solutions(&fd, &rat(4), 20);
        assert!(four.contains(&f.int_elem(2, 0)));
        // 3 + sqrt 5 = 2 + 2ω = 2ε
        assert!(four.contains(&f.int_elem(2, 2)));
        assert_eq!(reduce(&fd, &f.int_elem(2, 2)).unwrap(), f.int_elem(2, 0));
        let one = brute_force_norm_solutions(&fd, &rat(1), 20);
        for k in 0..3 {
            assert!(one.contains(&fd.eps.pow(k).unwrap()));
        }
        assert!(brute_force_norm_solutions(&fd, &rat(7), 20).is_empty());
    }

    #[test]
    fn symplectic_pairing_on_basis() {
        let f = QuadField::new(5).unwrap();
        assert_eq!(symplectic(&f.omega(), &f.one()), rat(1));
        assert_eq!(symplectic(&f.one(), &f.omega()), rat(-1));
        assert_eq!(symplectic(&f.int_elem(3, 7), &f.one()), rat(7));
        let f2 = QuadField::new(2).unwrap();
        assert_eq!(symplectic(&f2.omega(), &f2.one()), rat(1));
    }

    #[test]
    fn reduce_is_idempotent() {
        let fd = make_field(13).unwrap();
        for c in enumerate_norm_classes(&fd, &rat(12)).unwrap() {
            assert_eq!(reduce(&fd, &c.rep).unwrap(), c.rep);
        }
    }
}
