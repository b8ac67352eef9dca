//! Integer utilities: gcds, integer roots, prime sieves and discriminant
//! factorization.
//!
//! Factorization does trial division by the primes below 10⁶ and hands any
//! remaining cofactor to `num-prime`'s 128-bit factorizer. Enumeration code
//! that factors millions of discriminants below a known bound uses a
//! smallest-prime-factor table instead ([`Factorizer::with_table`]).

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid on signed 128-bit values: returns `(g, x, y)` with
/// `a·x + b·y = g ≥ 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Floor of the square root.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn isqrt_u64(n: u64) -> u64 {
    isqrt_u128(n as u128) as u64
}

pub fn is_square_i128(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt_u128(n as u128);
    r * r == n as u128
}

/// Floor of the fourth root.
pub fn iroot4_u128(n: u128) -> u128 {
    isqrt_u128(isqrt_u128(n))
}

/// Sieve of Eratosthenes: all primes `≤ n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const TRIAL_LIMIT: u64 = 1_000_000;

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo a prime `p` (`a ≢ 0`).
pub fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a % p, p - 2, p)
}

/// Reduce a signed value into `[0, m)`.
pub fn rem_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Prime factorization `n = ∏ pᵉ`, primes ascending.
pub fn factor_u128(n: u128) -> Result<Vec<(u128, u32)>> {
    if n == 0 {
        return Err(Error::Factorization("0".into()));
    }
    let mut out = Vec::new();
    let mut m = n;
    for &p in trial_primes() {
        let p = p as u128;
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if m > 1 {
        let bound = TRIAL_LIMIT as u128;
        if m < bound * bound {
            out.push((m, 1));
        } else {
            let rest = num_prime::nt_funcs::factorize128(m);
            let mut check = 1u128;
            for (&p, &e) in &rest {
                check = check.checked_mul(p.pow(e as u32)).ok_or_else(|| Error::Factorization(n.to_string()))?;
                out.push((p, e as u32));
            }
            if check != m {
                return Err(Error::Factorization(n.to_string()));
            }
            out.sort_unstable();
        }
    }
    Ok(out)
}

/// Factorizer with an optional smallest-prime-factor table for fast
/// factorization below a fixed limit.
#[derive(Debug, Clone, Default)]
pub struct Factorizer {
    spf: Vec<u32>,
}

impl Factorizer {
    /// No table: every call goes through [`factor_u128`].
    pub fn new() -> Self {
        Factorizer { spf: Vec::new() }
    }

    /// Table covering `0..=limit`.
    pub fn with_table(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Factorizer { spf }
    }

    pub fn limit(&self) -> u64 {
        self.spf.len().saturating_sub(1) as u64
    }

    pub fn factor(&self, n: u128) -> Result<Vec<(u128, u32)>> {
        if n > 0 && (n as usize) < self.spf.len() {
            let mut m = n as usize;
            let mut out: Vec<(u128, u32)> = Vec::new();
            while m > 1 {
                let p = self.spf[m] as usize;
                let mut e = 0;
                while m.is_multiple_of(p) {
                    m /= p;
                    e += 1;
                }
                out.push((p as u128, e));
            }
            Ok(out)
        } else {
            factor_u128(n)
        }
    }
}

pub fn is_squarefree(n: u64) -> bool {
    match factor_u128(n as u128) {
        Ok(f) => f.iter().all(|&(_, e)| e == 1),
        Err(_) => false,
    }
}

/// Möbius function on positive integers.
pub fn mobius(n: u64) -> i32 {
    let f = factor_u128(n as u128).expect("positive input");
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small_and_large() {
        assert_eq!(factor_u128(360).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        let big = 1_000_003u128 * 1_000_033u128 * 1_000_037u128;
        assert_eq!(factor_u128(big).unwrap(), vec![(1_000_003, 1), (1_000_033, 1), (1_000_037, 1)]);
        let sq = 4_294_967_311u128 * 4_294_967_311u128 * 7;
        assert_eq!(factor_u128(sq).unwrap(), vec![(7, 1), (4_294_967_311, 2)]);
    }

    #[test]
    fn table_agrees_with_trial_division() {
        let fz = Factorizer::with_table(20_000);
        for n in 1..20_000u128 {
            assert_eq!(fz.factor(n).unwrap(), factor_u128(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn roots_and_gcd() {
        assert_eq!(isqrt_u128(99), 9);
        assert_eq!(isqrt_u128(100), 10);
        assert_eq!(iroot4_u128(81), 3);
        assert_eq!(iroot4_u128(80), 2);
        let (g, x, y) = ext_gcd(240, 46);
        assert_eq!(g, 2);
        assert_eq!(240 * x + 46 * y, 2);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert!(is_squarefree(6) && !is_squarefree(18));
    }
}
