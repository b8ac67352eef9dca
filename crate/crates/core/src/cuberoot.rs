//! Exact arithmetic in ℚ(p^{1/3}) on the basis `1, t, t²` with `t = p^{-1/3}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `q₀ + q₁·p^{-1/3} + q₂·p^{-2/3}` for a fixed prime `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubeRootRational {
    p: u64,
    coeffs: [BigRational; 3],
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl CubeRootRational {
    pub fn zero(p: u64) -> Self {
        CubeRootRational { p, coeffs: [BigRational::zero(), BigRational::zero(), BigRational::zero()] }
    }

    pub fn from_rational(p: u64, q: BigRational) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = q;
        z
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::from_rational(p, rat(n, 1))
    }

    pub fn from_coeffs(p: u64, coeffs: [BigRational; 3]) -> Self {
        CubeRootRational { p, coeffs }
    }

    /// `p^{-k/3}` for any integer `k`.
    pub fn p_pow_third(p: u64, k: i64) -> Self {
        let whole = k.div_euclid(3);
        let rem = k.rem_euclid(3) as usize;
        // p^{-k/3} = p^{-whole} · t^{rem}
        let pb = BigInt::from(p);
        let scale = if whole >= 0 {
            BigRational::new(BigInt::one(), num_traits::pow(pb, whole as usize))
        } else {
            BigRational::from_integer(num_traits::pow(pb, (-whole) as usize))
        };
        let mut z = Self::zero(p);
        z.coeffs[rem] = scale;
        z
    }

    /// `t = p^{-1/3}`.
    pub fn t(p: u64) -> Self {
        Self::p_pow_third(p, 1)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational; 3] {
        &self.coeffs
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CubeRootRational { p: self.p, coeffs: [&self.coeffs[0] * q, &self.coeffs[1] * q, &self.coeffs[2] * q] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> f64 {
        let t = (self.p as f64).powf(-1.0 / 3.0);
        let c = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
        c(&self.coeffs[0]) + c(&self.coeffs[1]) * t + c(&self.coeffs[2]) * t * t
    }

    fn check_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing ℚ(p^(1/3)) for different primes");
    }
}

impl Add for &CubeRootRational {
    type Output = CubeRootRational;
    fn add(self, o: &CubeRootRational) -> CubeRootRational {
        self.check_prime(o);
        CubeRootRational {
            p: self.p,
            coeffs: [&self.coeffs[0] + &o.coeffs[0], &self.coeffs[1] + &o.coeffs[1], &self.coeffs[2] + &o.coeffs[2]],
        }
    }
}

impl Sub for &CubeRootRational {
    type Output = CubeRootRational;
    fn sub(self, o: &CubeRootRational) -> CubeRootRational {
        self + &(-o)
    }
}

impl Neg for &CubeRootRational {
    type Output = CubeRootRational;
    fn neg(self) -> CubeRootRational {
        CubeRootRational { p: self.p, coeffs: [-&self.coeffs[0], -&self.coeffs[1], -&self.coeffs[2]] }
    }
}

impl Mul for &CubeRootRational {
    type Output = CubeRootRational;
    fn mul(self, o: &CubeRootRational) -> CubeRootRational {
        self.check_prime(o);
        let inv_p = rat(1, self.p as i64);
        let x = &self.coeffs;
        let y = &o.coeffs;
        // t³ = 1/p
        let c0 = &x[0] * &y[0] + (&x[1] * &y[2] + &x[2] * &y[1]) * &inv_p;
        let c1 = &x[0] * &y[1] + &x[1] * &y[0] + &x[2] * &y[2] * &inv_p;
        let c2 = &x[0] * &y[2] + &x[1] * &y[1] + &x[2] * &y[0];
        CubeRootRational { p: self.p, coeffs: [c0, c1, c2] }
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl $tr for CubeRootRational {
            type Output = CubeRootRational;
            fn $m(self, o: CubeRootRational) -> CubeRootRational {
                (&self).$m(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl fmt::Display for CubeRootRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})*{p}^(-1/3) + ({})*{p}^(-2/3)", self.coeffs[0], self.coeffs[1], self.coeffs[2], p = self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_cubed_is_inverse_prime() {
        let t = CubeRootRational::t(5);
        let t3 = &(&t * &t) * &t;
        assert_eq!(t3, CubeRootRational::from_rational(5, rat(1, 5)));
        assert_eq!(CubeRootRational::p_pow_third(5, 3), t3);
        assert_eq!(CubeRootRational::p_pow_third(5, -3), CubeRootRational::from_int(5, 5));
    }

    #[test]
    fn negative_powers_invert() {
        for k in -7..7 {
            let x = CubeRootRational::p_pow_third(2, k);
            let y = CubeRootRational::p_pow_third(2, -k);
            assert_eq!(&x * &y, CubeRootRational::from_int(2, 1));
        }
    }

    #[test]
    fn numeric_value() {
        let x = CubeRootRational::p_pow_third(2, 10);
        assert!((x.to_f64() - 2f64.powf(-10.0 / 3.0)).abs() < 1e-15);
    }
}
