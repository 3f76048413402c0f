//! Arbitrary precision rationals and a few helpers used everywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn sign(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            // Scale down huge numerators and denominators together.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if r.is_positive() {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

/// Nearest dyadic-ish rational to an `f64` (exact binary expansion).
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

/// Parse `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Denominator as a machine integer. Exponent denominators stay tiny.
pub fn den_u64(r: &Rat) -> u64 {
    r.denom().to_u64().expect("denominator fits in u64")
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Largest integer `<= r`.
pub fn floor_i64(r: &Rat) -> i64 {
    r.floor().to_integer().to_i64().expect("floor fits in i64")
}

pub fn pow_rat(r: &Rat, e: u32) -> Rat {
    num_traits::pow(r.clone(), e as usize)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `2^-k` as a rational.
pub fn pow2_neg(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << k as usize)
}

/// A rational strictly inside `(a, b)` with a small denominator when possible.
pub fn simple_between(a: &Rat, b: &Rat) -> Rat {
    debug_assert!(a < b);
    let fa = a.floor();
    if &(fa.clone() + Rat::one()) < b {
        return fa + Rat::one();
    }
    let mut den = BigInt::from(2);
    loop {
        let d = Rat::from_integer(den.clone());
        let cand = (a * &d).floor() + Rat::one();
        let cand = cand / d;
        if &cand > a && &cand < b {
            return cand;
        }
        den *= 2;
    }
}

pub fn min_rat<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rat("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rat("-4"), Some(int(-4)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(fmt_rat(&rat(6, 4)), "3/2");
        assert_eq!(fmt_rat(&int(5)), "5");
    }

    #[test]
    fn between_is_strict() {
        let a = rat(1, 3);
        let b = rat(1, 2);
        let m = simple_between(&a, &b);
        assert!(m > a && m < b);
        assert_eq!(simple_between(&rat(1, 2), &rat(5, 2)), int(1));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(13, 0), BigInt::from(1));
    }
}
