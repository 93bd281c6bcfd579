//! Prime field arithmetic on canonical residues.
//!
//! A [`Field`] is a lightweight context object (just the modulus); elements
//! are plain `u64` values kept canonical in `0..p`. All products go through
//! `u128` so any prime that fits a 64-bit word works.

use crate::error::Error;

/// Default modulus used when the caller does not pick one: the Mersenne
/// prime 2^31 - 1, large enough that random-evaluation tests have
/// negligible false-zero probability at moderate degrees.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// A prime field `F_p`. Copyable context for element arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
}

impl Field {
    /// Creates the field, rejecting composite or trivial moduli.
    pub fn new(p: u64) -> Result<Field, Error> {
        if is_prime_u64(p) {
            Ok(Field { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Canonicalizes an arbitrary unsigned value.
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    /// Canonicalizes a signed value (useful for literals like -1).
    pub fn from_i64(&self, v: i64) -> u64 {
        let m = self.p as i64;
        (v.rem_euclid(m)) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        let s = a + b; // p < 2^63, no overflow
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.p);
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        debug_assert!(base < self.p);
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64, Error> {
        if a == 0 {
            Err(Error::ZeroInverse)
        } else {
            Ok(self.pow(a, self.p - 2))
        }
    }
}

/// Deterministic Miller-Rabin primality test, exact for all 64-bit inputs.
///
/// The fixed witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is
/// known to have no composite strong pseudoprime below 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    // n - 1 = d * 2^r with d odd
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(is_prime_u64(101));
        assert!(is_prime_u64(DEFAULT_PRIME));
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(4));
        assert!(!is_prime_u64(1_000_000_000));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn constructor_rejects_composites() {
        assert!(Field::new(101).is_ok());
        assert_eq!(Field::new(100), Err(Error::NotPrime(100)));
    }

    #[test]
    fn inverse_known_values() {
        let f101 = Field::new(101).unwrap();
        assert_eq!(f101.inv(2).unwrap(), 51);
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.inv(4).unwrap(), 4);
        assert_eq!(f5.inv(0), Err(Error::ZeroInverse));
    }

    #[test]
    fn signed_canonicalization() {
        let f = Field::new(101).unwrap();
        assert_eq!(f.from_i64(-1), 100);
        assert_eq!(f.from_i64(-102), 100);
        assert_eq!(f.from_i64(202), 0);
    }

    #[test]
    fn arithmetic_is_canonical_at_word_scale() {
        let f = Field::new(DEFAULT_PRIME).unwrap();
        let a = DEFAULT_PRIME - 1;
        let b = DEFAULT_PRIME - 2;
        assert!(f.add(a, b) < DEFAULT_PRIME);
        assert!(f.mul(a, b) < DEFAULT_PRIME);
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        assert_eq!(f.add(a, f.neg(a)), 0);
    }
}
