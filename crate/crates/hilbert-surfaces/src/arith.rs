//! Elementary exact number theory.
//!
//! Totients, divisors, Kronecker symbols, counts of square roots modulo `d`,
//! class numbers of imaginary quadratic orders and fractional parts of exact
//! rationals. Nothing here uses floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, inconsistent, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

/// The rational `n / d`, reduced to lowest terms.
///
/// # Panics
///
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Converts an exact rational to `i64`, failing if it is not an integer.
///
/// `what` names the quantity in the error message.
pub fn to_integer(x: &Rational, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(inconsistent!("{what} = {x} is not an integer"));
    }
    x.to_integer()
        .to_i64()
        .ok_or_else(|| inconsistent!("{what} = {x} does not fit in 64 bits"))
}

/// Reduces `a` into `0..m`.
pub fn modulo(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

/// Greatest common divisor of two signed integers, always non-negative.
pub fn gcd(a: i64, b: i64) -> u64 {
    a.gcd(&b).unsigned_abs()
}

/// Prime factorisation of `n` by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The distinct primes dividing `n`, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// The exponent of the prime `p` in `n`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Splits `n = 2^k * m` with `m` odd and returns `(k, m)`.
pub fn split_two(n: u64) -> (u32, u64) {
    let k = n.trailing_zeros();
    (k, n >> k)
}

/// True when the prime power `q = p^e` divides `n` exactly, i.e. `q | n` and
/// `p` does not divide `n / q`.
pub fn divides_exactly(q: u64, n: u64) -> bool {
    let p = match factorize(q).as_slice() {
        [(p, _)] => *p,
        _ => return false,
    };
    n.is_multiple_of(q) && !(n / q).is_multiple_of(p)
}

/// Euler's totient `φ(n)`, with `φ(1) = 1`.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The units of `ℤ/nℤ` as representatives in `0..n`, ascending.
///
/// For `n = 1` the single residue class is reported as `0`.
pub fn units(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&x| gcd(x as i64, n as i64) == 1).collect()
}

/// The inverse of `a` modulo `m`, if `a` is a unit.
pub fn inverse_mod(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let ext = (a.rem_euclid(m as i64)).extended_gcd(&(m as i64));
    (ext.gcd == 1).then(|| modulo(ext.x, m))
}

/// The units `x` modulo `d` with `x² ≡ m (mod d)`, ascending.
pub fn unit_square_roots(d: u64, m: i64) -> Vec<u64> {
    if d == 1 {
        return vec![0];
    }
    let target = modulo(m, d);
    units(d)
        .into_iter()
        .filter(|&x| (x as u128 * x as u128 % d as u128) as u64 == target)
        .collect()
}

/// `ρ(d, m) = #{x ∈ (ℤ/dℤ)^× : x² ≡ m}`, with the convention `ρ(1, m) = 1`.
pub fn rho(d: u64, m: i64) -> u64 {
    unit_square_roots(d, m).len() as u64
}

/// Representatives of `Λ(N, r)`: one square root of `r` modulo `N` from each
/// `±`-class, namely the least positive member, ascending.
pub fn lambda_reps(n: u64, r: i64) -> Vec<u64> {
    if n == 1 {
        return vec![1];
    }
    let mut reps: Vec<u64> = unit_square_roots(n, r)
        .into_iter()
        .map(|x| x.min(n - x))
        .collect();
    reps.sort_unstable();
    reps.dedup();
    reps
}

/// True when `m` is the square of a unit modulo `n`.
pub fn is_unit_square(n: u64, m: i64) -> bool {
    rho(n, m) > 0
}

/// The Kronecker symbol `(a / n)`, extended to all integer pairs in the
/// standard way; `(a / 2)` depends on `a mod 8`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return i32::from(a == 1 || a == -1);
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r8 = a.rem_euclid(8);
        if v % 2 == 1 && (r8 == 3 || r8 == 5) {
            result = -result;
        }
    }
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r8 = n % 8;
            if r8 == 3 || r8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// A negative discriminant `D ≡ 0, 1 (mod 4)` of an imaginary quadratic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Discriminant(i64);

impl Discriminant {
    /// Validates `value` as a negative discriminant.
    pub fn new(value: i64) -> Result<Self> {
        if value >= 0 || !matches!(value.rem_euclid(4), 0 | 1) {
            return Err(domain!(
                "{value} is not a negative discriminant congruent to 0 or 1 mod 4"
            ));
        }
        Ok(Self(value))
    }

    /// The discriminant as an integer.
    pub fn value(self) -> i64 {
        self.0
    }
}

/// The class number `h(D)` of the imaginary quadratic order of discriminant
/// `D`: the number of primitive reduced positive definite forms `(a, b, c)`
/// with `b² − 4ac = D`, `|b| ≤ a ≤ c`, and `b ≥ 0` whenever `|b| = a` or `a = c`.
pub fn class_number(disc: Discriminant) -> u64 {
    let d = disc.value();
    let mut count = 0;
    let mut a: i64 = 1;
    while 3 * a * a <= -d {
        for b in (1 - a)..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            if gcd(gcd(a, b) as i64, c) != 1 {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    count
}

/// [`class_number`] for a raw integer, validating it first.
pub fn h(d: i64) -> Result<u64> {
    Ok(class_number(Discriminant::new(d)?))
}

/// `h(−4N²)`, the number of singular points of type `(2,1)` on `Z(N,r)`.
pub fn h_4n2(n: u64) -> u64 {
    class_number(Discriminant(-4 * (n * n) as i64))
}

/// `h(−3N²)`, the number of singular points above `j = 0` on `Z(N,r)`.
pub fn h_3n2(n: u64) -> u64 {
    class_number(Discriminant(-3 * (n * n) as i64))
}

/// The fractional part `⟨x⟩ = x − ⌊x⌋`, which lies in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// `⌊x⌋` as a rational.
pub fn floor(x: &Rational) -> Rational {
    x.floor()
}

/// The sign of a rational as `-1`, `0` or `1`.
pub fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// `1` as a rational.
pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totient_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(17), 16);
        assert_eq!(euler_phi(24), 8);
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(1, 7), 1);
        assert_eq!(rho(8, 1), 4);
        assert_eq!(rho(17, 3), 0);
        assert_eq!(rho(6, 3), 0);
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-1, 17), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-3, 3), 0);
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(-5, -1), -1);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(h(-4).unwrap(), 1);
        assert_eq!(h(-23).unwrap(), 3);
        assert_eq!(h(-92).unwrap(), 3);
        assert_eq!(h(-1156).unwrap(), 8);
        assert!(h(-5).is_err());
        assert!(h(8).is_err());
    }

    #[test]
    fn fractional_parts() {
        assert_eq!(frac(&rat(7, 3)), rat(1, 3));
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
        assert_eq!(frac(&int(5)), int(0));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(17), vec![1, 17]);
    }

    #[test]
    fn exact_divisibility() {
        assert!(divides_exactly(2, 6));
        assert!(!divides_exactly(2, 12));
        assert!(divides_exactly(4, 12));
        assert!(!divides_exactly(8, 12));
        assert!(divides_exactly(8, 24));
        assert!(!divides_exactly(3, 9));
    }

    #[test]
    fn lambda_representatives() {
        assert_eq!(lambda_reps(8, 1), vec![1, 3]);
        assert_eq!(lambda_reps(17, 1), vec![1]);
        assert_eq!(lambda_reps(15, 4), vec![2, 7]);
        assert!(lambda_reps(7, 3).is_empty());
    }
}
