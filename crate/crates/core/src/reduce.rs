//! Canonical representatives of GL₂(ℤ)-classes of irreducible forms.
//!
//! Positive discriminant: the Hessian is positive definite. Gauss-reduce it
//! to `0 ≤ Q ≤ P ≤ R` and take the lexicographically least image of the form
//! under the (finite) stabilizer of the reduced Hessian.
//!
//! Negative discriminant: move the complex root `φ = u + iv` (`v > 0`) into
//! the open region `0 < u < 1/2`, `|φ| > 1`. For irreducible forms `φ` never
//! lies on the boundary, so the reduced form is unique once `a > 0`. All
//! decisions use the integer predicates
//!
//! ```text
//! u > 0        ⇔  ad − bc > 0
//! u < 1/2      ⇔  ad − bc < (a + b)² + ac
//! u > −1/2     ⇔  ad − bc > −(a − b)² − ac
//! |φ|² > 1     ⇔  d² − a² + ac − bd > 0
//! ```
//!
//! Floating point only proposes the first translation.

use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::forms::{BinaryCubicForm, HessianForm, UnimodularMatrix};

/// Unimodular matrices with entries in {−1, 0, 1}.
fn small_matrices() -> &'static [UnimodularMatrix] {
    static M: OnceLock<Vec<UnimodularMatrix>> = OnceLock::new();
    M.get_or_init(|| {
        let mut out = Vec::new();
        for p in -1..=1 {
            for q in -1..=1 {
                for r in -1..=1 {
                    for s in -1..=1 {
                        if let Ok(g) = UnimodularMatrix::new(p, q, r, s) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    })
}

/// Stabilizer of a reduced positive definite form in GL₂(ℤ).
pub fn hessian_stabilizer(h: &HessianForm) -> Vec<UnimodularMatrix> {
    small_matrices().iter().filter(|g| h.substitute(g).ok().as_ref() == Some(h)).copied().collect()
}

fn positive_a(f: BinaryCubicForm) -> BinaryCubicForm {
    if f.a < 0 || (f.a == 0 && f.coeffs().iter().find(|&&x| x != 0).is_some_and(|&x| x < 0)) {
        f.neg()
    } else {
        f
    }
}

/// Gauss reduction of the Hessian of a positive-discriminant form, carrying
/// the form along. Returns the transformed form (with `a > 0`) and its
/// Hessian, which satisfies `0 ≤ Q ≤ P ≤ R`.
pub fn reduce_positive(f: &BinaryCubicForm) -> Result<(BinaryCubicForm, HessianForm)> {
    let mut g = *f;
    let mut h = g.hessian()?;
    if h.p <= 0 || h.r <= 0 {
        return domain(format!("{f} does not have a positive definite Hessian"));
    }
    loop {
        if h.q.abs() > h.p {
            // Q' = Q + 2Pk lands in (−P, P]
            let k = (h.p - h.q).div_euclid(2 * h.p);
            let k = i64::try_from(k).map_err(|_| Error::Overflow("translation"))?;
            let t = UnimodularMatrix::translation(k);
            g = g.act(&t)?;
            h = h.substitute(&t)?;
            continue;
        }
        if h.p > h.r {
            let s = UnimodularMatrix::inversion();
            g = g.act(&s)?;
            h = h.substitute(&s)?;
            continue;
        }
        break;
    }
    if h.q < 0 {
        let m = UnimodularMatrix::reflection();
        g = g.act(&m)?;
        h = h.substitute(&m)?;
    }
    Ok((positive_a(g), h))
}

fn canonical_positive(f: &BinaryCubicForm) -> Result<BinaryCubicForm> {
    let (g, h) = reduce_positive(f)?;
    let mut best: Option<BinaryCubicForm> = None;
    for m in hessian_stabilizer(&h) {
        let c = g.act(&m)?;
        if c.a > 0 && best.is_none_or(|b| c < b) {
            best = Some(c);
        }
    }
    best.ok_or_else(|| Error::Domain(format!("{f} has no representative with a > 0")))
}

/// `(ad − bc, (a + b)² + ac, (a − b)² + ac, d² − a² + ac − bd)` exactly.
fn predicates(f: &BinaryCubicForm) -> Result<(i128, i128, i128, i128)> {
    let (a, b, c, d) = (f.a as i128, f.b as i128, f.c as i128, f.d as i128);
    let m = |x: i128, y: i128| x.checked_mul(y).ok_or(Error::Overflow("reduction predicate"));
    let ad_bc = m(a, d)? - m(b, c)?;
    let ac = m(a, c)?;
    let plus = m(a + b, a + b)? + ac;
    let minus = m(a - b, a - b)? + ac;
    let norm = m(d, d)? - m(a, a)? + ac - m(b, d)?;
    Ok((ad_bc, plus, minus, norm))
}

/// Real part of the complex root, estimated in floating point.
fn complex_root_real_part(f: &BinaryCubicForm) -> f64 {
    let roots = f.real_roots();
    match roots.first() {
        Some(&theta) if f.a != 0 => (-(f.b as f64) / f.a as f64 - theta) / 2.0,
        _ => 0.0,
    }
}

/// Reduction of a negative-discriminant form into the open fundamental
/// region; the result has `a > 0`.
pub fn reduce_negative(f: &BinaryCubicForm) -> Result<BinaryCubicForm> {
    let mut g = positive_a(*f);
    if g.a == 0 {
        return domain(format!("{f} has a rational root"));
    }
    for _ in 0..10_000 {
        let u = complex_root_real_part(&g);
        if u.is_finite() && u.abs() > 0.5 {
            let k = u.round();
            if k.abs() < 4.0e18 {
                g = positive_a(g.act(&UnimodularMatrix::translation(k as i64))?);
            }
        }
        loop {
            let (ad_bc, plus, minus, _) = predicates(&g)?;
            if ad_bc >= plus {
                g = positive_a(g.act(&UnimodularMatrix::translation(1))?);
            } else if ad_bc <= -minus {
                g = positive_a(g.act(&UnimodularMatrix::translation(-1))?);
            } else {
                break;
            }
        }
        let (ad_bc, _, _, norm) = predicates(&g)?;
        if norm < 0 {
            g = positive_a(g.act(&UnimodularMatrix::inversion())?);
            continue;
        }
        if norm == 0 || ad_bc == 0 {
            return domain(format!("{f} has a root on the boundary, so it is reducible"));
        }
        if ad_bc < 0 {
            g = positive_a(g.act(&UnimodularMatrix::reflection())?);
        }
        return Ok(g);
    }
    Err(Error::Resource(format!("reduction of {f} did not converge")))
}

/// True iff a negative-discriminant form with `a > 0` lies in the reduced
/// region.
pub fn is_reduced_negative(f: &BinaryCubicForm) -> Result<bool> {
    if f.a <= 0 {
        return Ok(false);
    }
    let (ad_bc, plus, _, norm) = predicates(f)?;
    Ok(ad_bc > 0 && ad_bc < plus && norm > 0)
}

/// Distinguished representative of the GL₂(ℤ)-class of an irreducible form.
pub fn canonical_form(f: &BinaryCubicForm) -> Result<BinaryCubicForm> {
    let disc = f.discriminant()?;
    if disc == 0 {
        return domain(format!("{f} has zero discriminant"));
    }
    if !f.is_irreducible()? {
        return domain(format!("{f} is reducible"));
    }
    canonical_unchecked(f, disc)
}

/// [`canonical_form`] for input already known to be irreducible.
pub(crate) fn canonical_unchecked(f: &BinaryCubicForm, disc: i128) -> Result<BinaryCubicForm> {
    if disc > 0 {
        canonical_positive(f)
    } else {
        reduce_negative(f)
    }
}

/// Order of the automorphism group of `R(f)` for irreducible `f`: 3 for
/// cyclic cubic rings, 1 otherwise.
pub fn automorphism_count_unchecked(f: &BinaryCubicForm, disc: i128) -> Result<u32> {
    if disc < 0 {
        return Ok(1);
    }
    let (g, h) = reduce_positive(f)?;
    if !(h.p == h.q && h.q == h.r) {
        return Ok(1);
    }
    let mut n = 0;
    for m in hessian_stabilizer(&h) {
        if g.act(&m)? == g {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64, b: i64, c: i64, d: i64) -> BinaryCubicForm {
        BinaryCubicForm::new(a, b, c, d)
    }

    #[test]
    fn negative_predicates_match_numeric_roots() {
        let mut checked = 0;
        for a in 1..5i64 {
            for b in -6..7i64 {
                for c in -6..7i64 {
                    for d in -6..7i64 {
                        let g = f(a, b, c, d);
                        if g.discriminant().unwrap() >= 0 || !g.is_irreducible().unwrap() {
                            continue;
                        }
                        let theta = g.real_roots()[0];
                        let u = (-(b as f64) / a as f64 - theta) / 2.0;
                        let n = -(d as f64) / (a as f64 * theta);
                        let (ad_bc, plus, minus, norm) = predicates(&g).unwrap();
                        assert_eq!(ad_bc > 0, u > 0.0, "{g}");
                        assert_eq!(ad_bc < plus, u < 0.5, "{g}");
                        assert_eq!(ad_bc > -minus, u > -0.5, "{g}");
                        assert_eq!(norm > 0, n > 1.0, "{g}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn stabilizers_of_reduced_hessians_have_small_entries() {
        // exhaustive search with entries in [−4, 4] finds nothing new
        for (p, q, r) in [(1, 0, 1), (1, 1, 1), (2, 1, 3), (3, 3, 5), (2, 0, 5), (4, 4, 4), (5, 2, 5), (7, 0, 7)] {
            let h = HessianForm { p, q, r };
            let mut wide = 0;
            for a in -4..=4 {
                for b in -4..=4 {
                    for c in -4..=4 {
                        for d in -4..=4 {
                            if let Ok(g) = UnimodularMatrix::new(a, b, c, d) {
                                if h.substitute(&g).unwrap() == h {
                                    wide += 1;
                                }
                            }
                        }
                    }
                }
            }
            assert_eq!(wide, hessian_stabilizer(&h).len(), "{p} {q} {r}");
        }
        assert_eq!(hessian_stabilizer(&HessianForm { p: 1, q: 1, r: 1 }).len(), 12);
        assert_eq!(hessian_stabilizer(&HessianForm { p: 1, q: 0, r: 1 }).len(), 8);
        assert_eq!(hessian_stabilizer(&HessianForm { p: 2, q: 1, r: 3 }).len(), 2);
    }

    #[test]
    fn small_examples() {
        assert_eq!(canonical_form(&f(1, 0, -1, -1)).unwrap(), canonical_form(&f(1, 0, -1, 1)).unwrap());
        let c = canonical_form(&f(1, -1, -2, 1)).unwrap();
        assert_eq!(canonical_form(&c).unwrap(), c);
        assert!(canonical_form(&f(1, 1, 1, 1)).is_err());
        assert!(canonical_form(&f(1, 0, 0, 0)).is_err());
    }

    #[test]
    fn cyclic_cubic_has_three_automorphisms() {
        let g = f(1, -1, -2, 1);
        assert_eq!(automorphism_count_unchecked(&g, 49).unwrap(), 3);
        assert_eq!(automorphism_count_unchecked(&f(1, 0, -1, -1), -23).unwrap(), 1);
        // x³ − 3xy² − y³ has discriminant 81
        assert_eq!(automorphism_count_unchecked(&f(1, 0, -3, -1), 81).unwrap(), 3);
    }
}
