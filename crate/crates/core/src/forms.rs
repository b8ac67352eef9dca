//! Integral binary cubic forms `ax³ + bx²y + cxy² + dy³` and the twisted
//! action of GL₂(ℤ) on them.
//!
//! Coefficients are stored as `i64`; every derived quantity (discriminant,
//! Hessian, transformed coefficients) is computed in checked `i128`
//! arithmetic and reports [`Error::Overflow`] instead of wrapping.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::gcd_u64;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct BinaryCubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// 2×2 integer matrix `[[p, q], [r, s]]` with determinant ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    p: i64,
    q: i64,
    r: i64,
    s: i64,
}

/// Binary quadratic form `Px² + Qxy + Ry²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HessianForm {
    pub p: i128,
    pub q: i128,
    pub r: i128,
}

/// Real orbit of a nondegenerate form: three real roots or one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signature {
    PositiveDisc,
    NegativeDisc,
}

impl Signature {
    /// Size of the stabilizer in GL₂(ℝ): |Aut(ℝ³)| = 6, |Aut(ℝ ⊕ ℂ)| = 2.
    pub fn stabilizer_order(self) -> u32 {
        match self {
            Signature::PositiveDisc => 6,
            Signature::NegativeDisc => 2,
        }
    }

    pub fn of_disc(disc: i128) -> Option<Signature> {
        match disc.signum() {
            1 => Some(Signature::PositiveDisc),
            -1 => Some(Signature::NegativeDisc),
            _ => None,
        }
    }

    pub fn sign(self) -> i128 {
        match self {
            Signature::PositiveDisc => 1,
            Signature::NegativeDisc => -1,
        }
    }

    /// `0`/`1` index used by the constants `c₁⁽ⁱ⁾`, `c₂⁽ⁱ⁾`.
    pub fn index(self) -> usize {
        match self {
            Signature::PositiveDisc => 0,
            Signature::NegativeDisc => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Signature::PositiveDisc => "+",
            Signature::NegativeDisc => "-",
        }
    }
}

#[inline]
fn mul(x: i128, y: i128) -> Result<i128> {
    x.checked_mul(y).ok_or(Error::Overflow("i128 multiply"))
}

#[inline]
fn add(x: i128, y: i128) -> Result<i128> {
    x.checked_add(y).ok_or(Error::Overflow("i128 add"))
}

#[inline]
fn narrow(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow("coefficient exceeds i64"))
}

fn sum(terms: &[Result<i128>]) -> Result<i128> {
    let mut acc = 0i128;
    for t in terms {
        acc = add(acc, t.clone()?)?;
    }
    Ok(acc)
}

impl BinaryCubicForm {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        BinaryCubicForm { a, b, c, d }
    }

    pub fn from_i128(a: i128, b: i128, c: i128, d: i128) -> Result<Self> {
        Ok(BinaryCubicForm::new(narrow(a)?, narrow(b)?, narrow(c)?, narrow(d)?))
    }

    pub fn coeffs(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0 && self.d == 0
    }

    pub fn neg(&self) -> Self {
        BinaryCubicForm::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// `b²c² − 4ac³ − 4b³d − 27a²d² + 18abcd`, exactly.
    pub fn discriminant(&self) -> Result<i128> {
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let bc = mul(b, c)?;
        let ad = mul(a, d)?;
        sum(&[
            mul(bc, bc),
            mul(mul(-4, a)?, mul(mul(c, c)?, c)?),
            mul(mul(-4, d)?, mul(mul(b, b)?, b)?),
            mul(-27, mul(ad, ad)?),
            mul(18, mul(ad, bc)?),
        ])
    }

    /// The Hessian covariant `(b² − 3ac, bc − 9ad, c² − 3bd)`.
    pub fn hessian(&self) -> Result<HessianForm> {
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        Ok(HessianForm {
            p: add(mul(b, b)?, mul(-3, mul(a, c)?)?)?,
            q: add(mul(b, c)?, mul(-9, mul(a, d)?)?)?,
            r: add(mul(c, c)?, mul(-3, mul(b, d)?)?)?,
        })
    }

    /// The cubic covariant `G` with `4H³ = G² + 27·Disc·f²`.
    pub fn cubic_covariant(&self) -> Result<[i128; 4]> {
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let m3 = |x: i128, y: i128, z: i128| mul(mul(x, y)?, z);
        let g0 = sum(&[mul(2, m3(b, b, b)?), mul(-9, m3(a, b, c)?), mul(27, m3(a, a, d)?)])?;
        let g1 = sum(&[mul(3, m3(b, b, c)?), mul(-18, m3(a, c, c)?), mul(27, m3(a, b, d)?)])?;
        let g2 = sum(&[mul(-3, m3(b, c, c)?), mul(18, m3(b, b, d)?), mul(-27, m3(a, c, d)?)])?;
        let g3 = sum(&[mul(-2, m3(c, c, c)?), mul(9, m3(b, c, d)?), mul(-27, m3(a, d, d)?)])?;
        Ok([g0, g1, g2, g3])
    }

    /// Value at an integer point.
    pub fn eval(&self, x: i128, y: i128) -> Result<i128> {
        let x2 = mul(x, x)?;
        let y2 = mul(y, y)?;
        sum(&[
            mul(self.a as i128, mul(x2, x)?),
            mul(self.b as i128, mul(x2, y)?),
            mul(self.c as i128, mul(x, y2)?),
            mul(self.d as i128, mul(y2, y)?),
        ])
    }

    /// gcd of the coefficients; 0 for the zero form.
    pub fn content(&self) -> u64 {
        [self.a, self.b, self.c, self.d].iter().fold(0u64, |g, &x| gcd_u64(g, x.unsigned_abs()))
    }

    /// Substitution `f ∘ γ`: `f(px + ry, qx + sy)`, without the determinant
    /// twist.
    pub fn substitute(&self, g: &UnimodularMatrix) -> Result<BinaryCubicForm> {
        let (p, q, r, s) = (g.p as i128, g.q as i128, g.r as i128, g.s as i128);
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        // X = p x + r y, Y = q x + s y
        let x3 = [mul(mul(p, p)?, p)?, mul(3, mul(mul(p, p)?, r)?)?, mul(3, mul(mul(p, r)?, r)?)?, mul(mul(r, r)?, r)?];
        let x2y = [
            mul(mul(p, p)?, q)?,
            add(mul(mul(p, p)?, s)?, mul(2, mul(mul(p, q)?, r)?)?)?,
            add(mul(2, mul(mul(p, r)?, s)?)?, mul(mul(q, r)?, r)?)?,
            mul(mul(r, r)?, s)?,
        ];
        let xy2 = [
            mul(mul(p, q)?, q)?,
            add(mul(2, mul(mul(p, q)?, s)?)?, mul(mul(q, q)?, r)?)?,
            add(mul(mul(p, s)?, s)?, mul(2, mul(mul(q, r)?, s)?)?)?,
            mul(mul(r, s)?, s)?,
        ];
        let y3 = [mul(mul(q, q)?, q)?, mul(3, mul(mul(q, q)?, s)?)?, mul(3, mul(mul(q, s)?, s)?)?, mul(mul(s, s)?, s)?];
        let mut out = [0i128; 4];
        for i in 0..4 {
            out[i] = sum(&[mul(a, x3[i]), mul(b, x2y[i]), mul(c, xy2[i]), mul(d, y3[i])])?;
        }
        BinaryCubicForm::from_i128(out[0], out[1], out[2], out[3])
    }

    /// Twisted action `(γ·f)(x, y) = det(γ)⁻¹ · f((x, y)·γ)`.
    pub fn act(&self, g: &UnimodularMatrix) -> Result<BinaryCubicForm> {
        let h = self.substitute(g)?;
        Ok(if g.det() == 1 { h } else { h.neg() })
    }

    /// True iff `f` has no linear factor over ℚ. A linear factor `rx + sy`
    /// has `r | a` and `s | d`, and vanishes at `(−s, r)`.
    pub fn is_irreducible(&self) -> Result<bool> {
        if self.is_zero() {
            return domain("irreducibility of the zero form");
        }
        // y | f when a = 0, x | f when d = 0
        if self.a == 0 || self.d == 0 {
            return Ok(false);
        }
        let rs = divisors(self.a.unsigned_abs());
        let ss = divisors(self.d.unsigned_abs());
        for &r in &rs {
            for &s in &ss {
                if gcd_u64(r, s) != 1 {
                    continue;
                }
                let (r, s) = (r as i128, s as i128);
                if self.eval(-s, r)? == 0 || self.eval(s, r)? == 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Numerical real roots of `f(x, 1)` (finite roots only), ascending.
    pub fn real_roots(&self) -> Vec<f64> {
        real_roots_cubic(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }
}

impl fmt::Display for BinaryCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Real roots of `ax³ + bx² + cx + d` (with `a ≠ 0`), polished by Newton.
pub(crate) fn real_roots_cubic(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return if c == 0.0 { vec![] } else { vec![-d / c] };
        }
        let disc = c * c - 4.0 * b * d;
        if disc < 0.0 {
            return vec![];
        }
        let sq = disc.sqrt();
        let t = -0.5 * (c + c.signum() * sq);
        let mut r = vec![];
        if t != 0.0 {
            r.push(t / b);
            r.push(d / t);
        } else {
            r.push(0.0);
            r.push(0.0);
        }
        r.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return r;
    }
    let (bn, cn, dn) = (b / a, c / a, d / a);
    // depressed cubic t³ + pt + q with x = t − bn/3
    let shift = bn / 3.0;
    let p = cn - bn * bn / 3.0;
    let q = 2.0 * bn * bn * bn / 27.0 - bn * cn / 3.0 + dn;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    let mut roots = if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3).map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift).collect::<Vec<_>>()
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        vec![u + v - shift]
    };
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let fx = ((a * *r + b) * *r + c) * *r + d;
            let dfx = (3.0 * a * *r + 2.0 * b) * *r + c;
            if dfx == 0.0 || !fx.is_finite() {
                break;
            }
            let step = fx / dfx;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    roots
}

impl UnimodularMatrix {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self> {
        let det = p as i128 * s as i128 - q as i128 * r as i128;
        if det != 1 && det != -1 {
            return domain(format!("matrix [[{p},{q}],[{r},{s}]] has determinant {det}"));
        }
        Ok(UnimodularMatrix { p, q, r, s })
    }

    pub const fn identity() -> Self {
        UnimodularMatrix { p: 1, q: 0, r: 0, s: 1 }
    }

    /// `(x, y) ↦ (x + ky, y)`: translates roots by `−k`.
    pub const fn translation(k: i64) -> Self {
        UnimodularMatrix { p: 1, q: 0, r: k, s: 1 }
    }

    /// `(x, y) ↦ (−y, x)`: sends a root `τ` to `−1/τ`.
    pub const fn inversion() -> Self {
        UnimodularMatrix { p: 0, q: 1, r: -1, s: 0 }
    }

    /// `(x, y) ↦ (x, −y)`.
    pub const fn reflection() -> Self {
        UnimodularMatrix { p: 1, q: 0, r: 0, s: -1 }
    }

    pub const fn neg_identity() -> Self {
        UnimodularMatrix { p: -1, q: 0, r: 0, s: -1 }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.p, self.q, self.r, self.s]
    }

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, o: &UnimodularMatrix) -> Result<UnimodularMatrix> {
        let e = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|u| z.checked_mul(w).and_then(|v| u.checked_add(v)))
                .ok_or(Error::Overflow("matrix product"))
        };
        Ok(UnimodularMatrix {
            p: e(self.p, o.p, self.q, o.r)?,
            q: e(self.p, o.q, self.q, o.s)?,
            r: e(self.r, o.p, self.s, o.r)?,
            s: e(self.r, o.q, self.s, o.s)?,
        })
    }

    pub fn inverse(&self) -> UnimodularMatrix {
        let det = self.det();
        UnimodularMatrix { p: self.s * det, q: -self.q * det, r: -self.r * det, s: self.p * det }
    }
}

impl HessianForm {
    /// `Q² − 4PR`.
    pub fn discriminant(&self) -> Result<i128> {
        add(mul(self.q, self.q)?, mul(-4, mul(self.p, self.r)?)?)
    }

    /// Substitution `H((x, y)·γ)`.
    pub fn substitute(&self, g: &UnimodularMatrix) -> Result<HessianForm> {
        let (p, q, r, s) = (g.p as i128, g.q as i128, g.r as i128, g.s as i128);
        let (pp, qq, rr) = (self.p, self.q, self.r);
        Ok(HessianForm {
            p: sum(&[mul(pp, p * p), mul(qq, p * q), mul(rr, q * q)])?,
            q: sum(&[mul(pp, 2 * p * r), mul(qq, p * s + q * r), mul(rr, 2 * q * s)])?,
            r: sum(&[mul(pp, r * r), mul(qq, r * s), mul(rr, s * s)])?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_examples() {
        assert_eq!(BinaryCubicForm::new(1, 0, 1, 0).discriminant().unwrap(), -4);
        assert_eq!(BinaryCubicForm::new(0, 0, 0, 0).discriminant().unwrap(), 0);
        assert_eq!(BinaryCubicForm::new(1, 0, -1, -1).discriminant().unwrap(), -23);
        assert_eq!(BinaryCubicForm::new(1, -1, -2, 1).discriminant().unwrap(), 49);
    }

    #[test]
    fn discriminant_overflow_is_reported() {
        let f = BinaryCubicForm::new(i64::MAX, i64::MAX, i64::MAX, i64::MAX);
        assert!(matches!(f.discriminant(), Err(Error::Overflow(_))));
    }

    #[test]
    fn hessian_examples() {
        let h = BinaryCubicForm::new(1, 0, -3, 0).hessian().unwrap();
        assert_eq!((h.p, h.q, h.r), (9, 0, 9));
        let h = BinaryCubicForm::new(1, 0, 0, 0).hessian().unwrap();
        assert_eq!((h.p, h.q, h.r), (0, 0, 0));
        let h = BinaryCubicForm::new(1, 0, 1, 0).hessian().unwrap();
        assert_eq!((h.p, h.q, h.r), (-3, 0, 1));
        assert_eq!(h.discriminant().unwrap(), 12);
    }

    #[test]
    fn act_examples() {
        let f = BinaryCubicForm::new(2, -3, 5, 7);
        assert_eq!(f.act(&UnimodularMatrix::identity()).unwrap(), f);
        let swap = UnimodularMatrix::new(0, 1, 1, 0).unwrap();
        assert_eq!(f.act(&swap).unwrap(), BinaryCubicForm::new(-7, -5, 3, -2));
        assert!(UnimodularMatrix::new(2, 0, 0, 1).is_err());
    }

    #[test]
    fn irreducibility_examples() {
        assert!(!BinaryCubicForm::new(1, 1, 1, 1).is_irreducible().unwrap());
        assert!(!BinaryCubicForm::new(0, 1, 0, 0).is_irreducible().unwrap());
        assert!(BinaryCubicForm::new(1, 0, -1, -1).is_irreducible().unwrap());
        assert!(BinaryCubicForm::new(0, 0, 0, 0).is_irreducible().is_err());
        // (2x − 3y)(x² + y²)
        assert!(!BinaryCubicForm::new(2, -3, 2, -3).is_irreducible().unwrap());
    }

    #[test]
    fn content_examples() {
        assert_eq!(BinaryCubicForm::new(2, 2, 2, 2).content(), 2);
        assert_eq!(BinaryCubicForm::new(1, 0, 1, 0).content(), 1);
        assert_eq!(BinaryCubicForm::default().content(), 0);
    }

    #[test]
    fn syzygy_holds_pointwise() {
        let f = BinaryCubicForm::new(3, -7, 2, 11);
        let h = f.hessian().unwrap();
        let g = f.cubic_covariant().unwrap();
        let disc = f.discriminant().unwrap();
        for (x, y) in [(1i128, 0i128), (0, 1), (2, -3), (5, 7)] {
            let hv = h.p * x * x + h.q * x * y + h.r * y * y;
            let gv = g[0] * x * x * x + g[1] * x * x * y + g[2] * x * y * y + g[3] * y * y * y;
            let fv = f.eval(x, y).unwrap();
            assert_eq!(4 * hv * hv * hv, gv * gv + 27 * disc * fv * fv);
        }
    }

    #[test]
    fn real_roots_match_sign_of_discriminant() {
        assert_eq!(BinaryCubicForm::new(1, -1, -2, 1).real_roots().len(), 3);
        assert_eq!(BinaryCubicForm::new(1, 0, -1, -1).real_roots().len(), 1);
        let r = BinaryCubicForm::new(1, 0, -1, -1).real_roots()[0];
        assert!((r - 1.324_717_957_244_746).abs() < 1e-12);
    }
}
