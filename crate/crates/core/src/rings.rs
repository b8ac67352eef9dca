//! The cubic ring `R(f)` attached to a binary cubic form.
//!
//! On the basis `⟨1, ω, θ⟩`:
//!
//! ```text
//! ωθ = n,   ω² = m + bω − aθ,   θ² = ℓ + dω − cθ
//! ℓ = −bd,  m = −ac,  n = −ad
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::forms::BinaryCubicForm;
use crate::local::count_p1_roots;
use crate::reduce::automorphism_count_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubicRingTable {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
    pub l: i128,
    pub m: i128,
    pub n: i128,
}

/// `u₀ + u₁ω + u₂θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RingElement(pub [i128; 3]);

impl RingElement {
    pub const ONE: RingElement = RingElement([1, 0, 0]);
    pub const OMEGA: RingElement = RingElement([0, 1, 0]);
    pub const THETA: RingElement = RingElement([0, 0, 1]);
    pub const BASIS: [RingElement; 3] = [Self::ONE, Self::OMEGA, Self::THETA];
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow("ring arithmetic"))
}

pub fn ring_from_form(f: &BinaryCubicForm) -> CubicRingTable {
    let (a, b, c, d) = (f.a as i128, f.b as i128, f.c as i128, f.d as i128);
    CubicRingTable { a, b, c, d, l: -b * d, m: -a * c, n: -a * d }
}

impl CubicRingTable {
    /// Products of basis elements, `e_i · e_j` for `i, j ∈ {ω, θ}`.
    fn omega_sq(&self) -> [i128; 3] {
        [self.m, self.b, -self.a]
    }
    fn theta_sq(&self) -> [i128; 3] {
        [self.l, self.d, -self.c]
    }
    fn omega_theta(&self) -> [i128; 3] {
        [self.n, 0, 0]
    }

    pub fn multiply(&self, u: &RingElement, v: &RingElement) -> Result<RingElement> {
        let [u0, u1, u2] = u.0;
        let [v0, v1, v2] = v.0;
        let mut out = [0i128; 3];
        let mut acc = |coef: i128, e: [i128; 3]| -> Result<()> {
            for k in 0..3 {
                out[k] = ck(out[k].checked_add(ck(coef.checked_mul(e[k]))?))?;
            }
            Ok(())
        };
        let m = |x: i128, y: i128| ck(x.checked_mul(y));
        acc(m(u0, v0)?, [1, 0, 0])?;
        acc(ck(m(u0, v1)?.checked_add(m(u1, v0)?))?, [0, 1, 0])?;
        acc(ck(m(u0, v2)?.checked_add(m(u2, v0)?))?, [0, 0, 1])?;
        acc(m(u1, v1)?, self.omega_sq())?;
        acc(m(u2, v2)?, self.theta_sq())?;
        acc(ck(m(u1, v2)?.checked_add(m(u2, v1)?))?, self.omega_theta())?;
        Ok(RingElement(out))
    }

    /// Trace of multiplication by `x`.
    pub fn trace(&self, x: &RingElement) -> Result<i128> {
        let mut t = 0i128;
        for (k, e) in RingElement::BASIS.iter().enumerate() {
            t = ck(t.checked_add(self.multiply(x, e)?.0[k]))?;
        }
        Ok(t)
    }

    /// Determinant of the trace form `(Tr(eᵢeⱼ))`.
    pub fn discriminant(&self) -> Result<i128> {
        let mut g = [[0i128; 3]; 3];
        for (row, ei) in g.iter_mut().zip(RingElement::BASIS) {
            for (entry, ej) in row.iter_mut().zip(RingElement::BASIS) {
                *entry = self.trace(&self.multiply(&ei, &ej)?)?;
            }
        }
        let m = |x: i128, y: i128| ck(x.checked_mul(y));
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| -> Result<i128> {
            ck(m(g[r1][c1], g[r2][c2])?.checked_sub(m(g[r1][c2], g[r2][c1])?))
        };
        let t0 = m(g[0][0], minor(1, 2, 1, 2)?)?;
        let t1 = m(g[0][1], minor(1, 2, 0, 2)?)?;
        let t2 = m(g[0][2], minor(1, 2, 0, 1)?)?;
        ck(t0.checked_sub(t1).and_then(|x| x.checked_add(t2)))
    }
}

pub fn multiply(t: &CubicRingTable, u: &RingElement, v: &RingElement) -> Result<RingElement> {
    t.multiply(u, v)
}

pub fn ring_discriminant(t: &CubicRingTable) -> Result<i128> {
    t.discriminant()
}

/// `|Aut R(f)|` for irreducible `f`.
pub fn automorphism_count(f: &BinaryCubicForm) -> Result<u32> {
    let disc = f.discriminant()?;
    if disc == 0 || !f.is_irreducible()? {
        return domain(format!("{f} is not irreducible"));
    }
    automorphism_count_unchecked(f, disc)
}

/// Number of subrings of index `p` in `R(f)`: the roots of `f mod p` in
/// ℙ¹(𝔽_p).
pub fn index_p_subring_count(f: &BinaryCubicForm, p: u64) -> Result<usize> {
    if f.content().is_multiple_of(p) {
        return domain(format!("{p} divides the content of {f}"));
    }
    count_p1_roots(f, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64, b: i64, c: i64, d: i64) -> BinaryCubicForm {
        BinaryCubicForm::new(a, b, c, d)
    }

    #[test]
    fn table_examples() {
        let t = ring_from_form(&f(1, 0, 1, 0));
        assert_eq!((t.l, t.m, t.n), (0, -1, 0));
        let t = ring_from_form(&f(1, 0, -1, -1));
        assert_eq!((t.l, t.m, t.n), (0, 1, 1));
        let z = ring_from_form(&f(0, 0, 0, 0));
        assert_eq!((z.a, z.b, z.c, z.d, z.l, z.m, z.n), (0, 0, 0, 0, 0, 0, 0));
    }

    #[test]
    fn products() {
        let t = ring_from_form(&f(1, 0, 1, 0));
        let u = RingElement([3, -2, 5]);
        assert_eq!(t.multiply(&RingElement::ONE, &u).unwrap(), u);
        assert_eq!(t.multiply(&RingElement::OMEGA, &RingElement::THETA).unwrap(), RingElement([0, 0, 0]));
        assert_eq!(t.multiply(&RingElement::OMEGA, &RingElement::OMEGA).unwrap(), RingElement([-1, 0, -1]));
        assert_eq!(t.multiply(&RingElement::THETA, &RingElement::THETA).unwrap(), RingElement([0, 0, -1]));
    }

    #[test]
    fn trace_pairing_discriminant() {
        assert_eq!(ring_discriminant(&ring_from_form(&f(1, 0, 1, 0))).unwrap(), -4);
        assert_eq!(ring_discriminant(&ring_from_form(&f(2, 2, 2, 2))).unwrap(), -256);
        assert_eq!(ring_discriminant(&ring_from_form(&f(0, 0, 0, 0))).unwrap(), 0);
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(automorphism_count(&f(1, -1, -2, 1)).unwrap(), 3);
        assert_eq!(automorphism_count(&f(1, 0, -1, -1)).unwrap(), 1);
        assert!(automorphism_count(&f(1, 1, 1, 1)).is_err());
    }

    #[test]
    fn subring_examples() {
        assert_eq!(index_p_subring_count(&f(1, 0, 1, 0), 2).unwrap(), 2);
        assert_eq!(index_p_subring_count(&f(1, 0, 1, 1), 2).unwrap(), 0);
        assert!(index_p_subring_count(&f(2, 2, 2, 2), 2).is_err());
    }
}
