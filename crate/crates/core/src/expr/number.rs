//! Exact rational helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = num_rational::BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn floor(q: &Q) -> BigInt {
    q.floor().to_integer()
}

/// `q` modulo `m` in `[0, m)`.
pub fn modulo(q: &Q, m: i64) -> Q {
    let mq = qi(m);
    let k = (q / &mq).floor();
    q - k * mq
}

pub fn pow_int(q: &Q, n: &BigInt) -> Q {
    let e = n.abs().to_u32().expect("exponent too large");
    let mut r = Q::one();
    for _ in 0..e {
        r *= q;
    }
    if n.is_negative() {
        r.recip()
    } else {
        r
    }
}

/// Prime factorization of a positive integer by trial division.
pub fn factor(n: &BigInt) -> Option<Vec<(u64, u32)>> {
    let mut n = n.clone();
    let mut out = Vec::new();
    if n <= BigInt::one() {
        return Some(out);
    }
    let mut p: u64 = 2;
    while p < 1_000_000 {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut k = 0;
        while n.is_multiple_of(&bp) {
            n /= &bp;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let v = n.to_u64()?;
        if v >= 1_000_000u64 * 1_000_000u64 {
            return None;
        }
        out.push((v, 1));
    }
    Some(out)
}

/// Content of a list of rationals: positive gcd of numerators over lcm of
/// denominators.
pub fn content<'a>(qs: impl Iterator<Item = &'a Q>) -> Q {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for q in qs {
        g = g.gcd(q.numer());
        l = l.lcm(q.denom());
    }
    if g.is_zero() {
        Q::one()
    } else {
        Q::new(g, l)
    }
}
