//! Exact rational helpers shared by every module.
//!
//! All arithmetic in the crate is done over `BigRational`. Rationals print
//! as `p/q` in lowest terms with a positive denominator (`p` alone when the
//! denominator is 1).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Rising factorial `(x)_m = x (x+1) ... (x+m-1)`.
pub fn pochhammer(x: &Q, m: u32) -> Q {
    let mut acc = Q::one();
    let mut t = x.clone();
    for _ in 0..m {
        acc *= &t;
        t += Q::one();
    }
    acc
}

pub fn factorial(n: u32) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * q(i as i64))
}

/// `C(x, m) = x (x-1) ... (x-m+1) / m!` for rational upper argument.
pub fn binomial(x: &Q, m: u32) -> Q {
    let mut acc = Q::one();
    let mut t = x.clone();
    for _ in 0..m {
        acc *= &t;
        t -= Q::one();
    }
    acc / factorial(m)
}

pub fn binomial_int(n: u32, m: u32) -> Q {
    if m > n {
        return Q::zero();
    }
    binomial(&q(n as i64), m)
}

/// `1/n!` with the convention `1/n! = 0` for negative integers `n`.
pub fn inv_factorial_signed(n: i64) -> Q {
    if n < 0 {
        Q::zero()
    } else {
        factorial(n as u32).recip()
    }
}

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse {
        line: 1,
        column: 1,
        message: format!("invalid rational `{s}`"),
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Returns `Some(n)` when `x` is an integer that fits in `i64`.
pub fn to_i64(x: &Q) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn denom_u64(x: &Q) -> Option<u64> {
    x.denom().abs().to_u64()
}

/// Best rational approximation of `x` with denominator at most `bound`.
pub fn rationalize(x: f64, bound: u64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    // continued fraction convergents
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    let mut best: Option<(i128, i128)> = None;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > bound as i128 {
            break;
        }
        best = Some((h2, k2));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    best.map(|(h, k)| Q::new(BigInt::from(h), BigInt::from(k)))
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_and_binomials() {
        assert_eq!(pochhammer(&q(4), 2), q(20));
        assert_eq!(pochhammer(&q(0), 0), q(1));
        assert_eq!(pochhammer(&q(0), 3), q(0));
        assert_eq!(pochhammer(&qf(1, 5), 2), qf(6, 25));
        assert_eq!(binomial(&q(5), 2), q(10));
        assert_eq!(binomial(&q(-1), 3), q(-1));
        assert_eq!(binomial(&qf(1, 2), 2), qf(-1, 8));
        assert_eq!(binomial_int(3, 5), q(0));
    }

    #[test]
    fn format_and_parse() {
        assert_eq!(format_q(&qf(-6, 4)), "-3/2");
        assert_eq!(format_q(&q(7)), "7");
        assert_eq!(parse_q("-1039/600").unwrap(), qf(-1039, 600));
        assert_eq!(parse_q(" 12 ").unwrap(), q(12));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn negative_factorials_vanish() {
        assert_eq!(inv_factorial_signed(-1), q(0));
        assert_eq!(inv_factorial_signed(3), qf(1, 6));
    }

    #[test]
    fn rationalize_small_denominators() {
        assert_eq!(rationalize(11.0 / 60.0, 120), Some(qf(11, 60)));
        assert_eq!(rationalize(-1.0 / 60.0, 120), Some(qf(-1, 60)));
        assert_eq!(rationalize(0.0, 120), Some(q(0)));
    }
}
