//! Flag value parsers.

use num_complex::Complex64;
use sollink::rational::{self, Rational};
use sollink::sol::{FiberClass, IntMat2};

fn ints<const N: usize>(s: &str, what: &str) -> Result<[i64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated integers for {what}, got {s:?}"));
    }
    let mut out = [0i64; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("{p:?} is not an integer"))?;
    }
    Ok(out)
}

/// `a,b,c,d`, row-major.
pub fn matrix(s: &str) -> Result<IntMat2, String> {
    let [a, b, c, d] = ints::<4>(s, "a 2x2 matrix")?;
    Ok(IntMat2::from_i64([[a, b], [c, d]]))
}

pub fn class(s: &str) -> Result<FiberClass, String> {
    let [x, y] = ints::<2>(s, "a lattice class")?;
    Ok(FiberClass::new(x, y))
}

pub fn point(s: &str) -> Result<[Rational; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [x, y] => {
            let p = |t: &str| rational::parse(t).ok_or_else(|| format!("{t:?} is not a rational number"));
            Ok([p(x)?, p(y)?])
        }
        _ => Err(format!("expected two comma-separated rationals, got {s:?}")),
    }
}

pub fn rational_value(s: &str) -> Result<Rational, String> {
    rational::parse(s).ok_or_else(|| format!("{s:?} is not a rational number"))
}

/// `RE+IMi`, `RE-IMi`, `IMi` or `i`; the imaginary part must be positive.
pub fn tau(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let body = t.strip_suffix('i').ok_or_else(|| format!("tau {s:?} must end in 'i'"))?;
    let bytes = body.as_bytes();
    // last sign that is not leading and not part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let num = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| format!("cannot parse {x:?} in tau {s:?}")),
        }
    };
    let z = Complex64::new(num(re)?, num(im)?);
    if z.im.is_nan() || z.im <= 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(format!("tau {s:?} must have positive imaginary part"));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_forms() {
        assert_eq!(tau("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(tau("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(tau("2.5i").unwrap(), Complex64::new(0.0, 2.5));
        assert_eq!(tau("-0.5+0.25i").unwrap(), Complex64::new(-0.5, 0.25));
        assert_eq!(tau("1e-3+2E+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(tau("0.5-1i").is_err());
        assert!(tau("1+0i").is_err());
        assert!(tau("1+2").is_err());
        assert!(tau("x+1i").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(matrix("2,1,1,1").unwrap(), IntMat2::from_i64([[2, 1], [1, 1]]));
        assert!(matrix("2,1,1").is_err());
        assert_eq!(class("-1, 3").unwrap(), FiberClass::new(-1, 3));
        assert!(class("1,x").is_err());
        assert_eq!(point("1/2,-3").unwrap(), [rational::frac(1, 2), rational::rat(-3)]);
    }
}
