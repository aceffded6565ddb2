//! Exact scalars: arbitrary-precision rationals, always reduced, with a
//! positive denominator. Backed by `num::BigRational`, which maintains both
//! invariants on construction.

use num::bigint::Sign;
pub use num::BigInt;
pub use num::BigRational as Rational;
use num::{One, Zero};

use crate::Error;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Fraction `n/d` as a reduced rational. Panics if `d == 0`.
pub fn rat_of(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders `p/q`, omitting `/q` when the denominator is one.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q` with optional sign.
pub fn rat_parse(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {num:?}")))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {d:?}")))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Binomial coefficient `C(n, k)` as a big integer.
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

/// Scales a rational vector to a primitive integer vector (cleared
/// denominators, content one) whose first nonzero entry is positive.
/// Returns the input unchanged when it is all zeros.
pub fn primitive_normalize(v: &[Rational]) -> Vec<Rational> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num::integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for n in &ints {
        gcd = num::integer::gcd(gcd, n.clone());
    }
    if gcd.is_zero() {
        return v.to_vec();
    }
    let flip = ints
        .iter()
        .find(|n| !n.is_zero())
        .map(|n| n.sign() == Sign::Minus)
        .unwrap_or(false);
    ints.into_iter()
        .map(|n| {
            let mut q = n / &gcd;
            if flip {
                q = -q;
            }
            Rational::from_integer(q)
        })
        .collect()
}
