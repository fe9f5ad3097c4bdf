//! Arbitrary-precision rational scalars.
//!
//! `Rat` is kept in reduced form with a positive denominator; zero is `0/1`.
//! The `num` crate maintains those invariants on every operation, so equality
//! is plain structural equality.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng;

pub type Rat = BigRational;

/// The integer `n` as a rational.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The fraction `n/d`; panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"-3"`, `"5/7"` and similar; rejects zero denominators.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
    }
}

/// Lossy conversion for numeric (advisory-only) work.
pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of approximations when the exact parts
        // overflow f64 individually.
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// max(|numerator|, denominator) as a height measure.
pub fn height(x: &Rat) -> BigInt {
    x.numer().abs().max(x.denom().clone())
}

/// Uniform sample with numerator in `[-h, h]` and denominator in `[1, h]`.
pub fn sample_rat<R: Rng>(rng: &mut R, h: u64) -> Rat {
    let h = h.max(1) as i64;
    let n = rng.gen_range(-h..=h);
    let d = rng.gen_range(1..=h);
    rat(n, d)
}

/// `n!` as a rational, for series denominators.
pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Canonical display: `"n"` for integers, `"n/d"` otherwise.
pub fn display(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// True when the sign is strictly negative.
pub fn is_negative(x: &Rat) -> bool {
    x.numer().sign() == Sign::Minus
}
