//! Small helpers around [`num_rational::BigRational`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Fractional part in `[0, 1)`.
pub fn fract(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn to_f64(x: &Rational) -> f64 {
    // Direct conversion loses everything once numerator or denominator exceed
    // f64 range, so scale both down first.
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
    let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Serializes as `"p/q"` in lowest terms, or `"p"` for integers.
pub fn to_string(x: &Rational) -> String {
    x.to_string()
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.abs().gcd(&b.abs())
}

/// Rational matrices and vectors used by the torus-bundle code.
pub type Vec2 = [BigInt; 2];
pub type RVec2 = [Rational; 2];

pub fn det2(x: &Vec2, y: &Vec2) -> BigInt {
    &x[0] * &y[1] - &x[1] * &y[0]
}

pub fn rdet2(x: &RVec2, y: &RVec2) -> Rational {
    &x[0] * &y[1] - &x[1] * &y[0]
}

pub fn to_rvec(v: &Vec2) -> RVec2 {
    [Rational::from_integer(v[0].clone()), Rational::from_integer(v[1].clone())]
}

pub mod serde_str {
    //! `serde` adapter writing rationals as strings.
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse("4/6"), Some(frac(2, 3)));
        assert_eq!(parse(" -3 "), Some(rat(-3)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
        assert_eq!(to_string(&frac(-6, 4)), "-3/2");
        assert_eq!(to_string(&rat(2)), "2");
    }

    #[test]
    fn fract_is_in_unit_interval() {
        assert_eq!(fract(&frac(-1, 3)), frac(2, 3));
        assert_eq!(fract(&rat(5)), rat(0));
    }

    #[test]
    fn huge_to_f64() {
        let big = Rational::new(BigInt::from(10).pow(400) * 3, BigInt::from(10).pow(400));
        assert!((to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
