//! Binary quadratic forms `Ax² + Bxy + Cy²` of fundamental discriminant,
//! their class groups and 3-torsion.
//!
//! Negative discriminants use reduced forms `|B| ≤ A ≤ C` (with `B ≥ 0` when
//! `|B| = A` or `A = C`). Positive discriminants use narrow classes: every
//! class is a cycle of reduced forms under the reduction step `ρ`, and the
//! forms with `A > 0` in a cycle form one orbit of `ρ²`.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, isqrt_u64};
use crate::enumerate::{count_abs, ClassFilter};
use crate::error::{domain, Error, Result};
use crate::forms::Signature;

pub const CLASS_GROUP_LIMIT: u64 = 10_000_000;
pub const L4EQ_LIMIT: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Principal form of discriminant `d`, reduced.
    pub fn identity(d: i64) -> Self {
        if d < 0 {
            let b = d.rem_euclid(2);
            QuadForm::new(1, b, (b * b - d) / 4)
        } else {
            let s = isqrt_u64(d as u64) as i64;
            let b = if (s - d).rem_euclid(2) == 0 { s } else { s - 1 };
            QuadForm::new(1, b, (b * b - d) / 4)
        }
    }

    pub fn inverse(&self) -> Self {
        QuadForm::new(self.a, -self.b, self.c)
    }

    /// Reduced for its discriminant sign.
    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        if d < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            a > 0 && b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
        } else {
            is_reduced_indefinite(self, d)
        }
    }

    /// A reduced form in the same proper class.
    pub fn reduce(&self) -> Self {
        let d = self.disc();
        if d < 0 {
            reduce_definite(*self)
        } else {
            reduce_indefinite(*self, d)
        }
    }
}

fn reduce_definite(f: QuadForm) -> QuadForm {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        if b > a || b <= -a {
            // b ← b − 2ak into (−a, a]
            let k = (b + a - 1).div_euclid(2 * a);
            let nb = b - 2 * a * k;
            c -= k * (b + nb) / 2;
            b = nb;
            continue;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return QuadForm::new(a as i64, b as i64, c as i64);
    }
}

fn is_reduced_indefinite(f: &QuadForm, d: i64) -> bool {
    let (a, b) = (f.a.abs() as i128, f.b as i128);
    let d = d as i128;
    // |√D − 2|A|| < B < √D
    b > 0 && b * b < d && d < (b + 2 * a) * (b + 2 * a) && (2 * a - b <= 0 || (2 * a - b) * (2 * a - b) < d)
}

/// One reduction step `(A, B, C) ↦ (C, B', (B'² − D)/4C)`.
fn rho(f: QuadForm, d: i64, s: i64) -> QuadForm {
    let c = f.c as i128;
    let cabs = c.abs();
    let m = 2 * cabs;
    let target = -(f.b as i128);
    let nb = if cabs as i64 > s {
        // (−|C|, |C|]
        let lo = -cabs + 1;
        lo + (target - lo).rem_euclid(m)
    } else {
        // (√D − 2|C|, √D)
        let lo = s as i128 - m + 1;
        lo + (target - lo).rem_euclid(m)
    };
    let nc = (nb * nb - d as i128) / (4 * c);
    QuadForm::new(c as i64, nb as i64, nc as i64)
}

fn reduce_indefinite(mut f: QuadForm, d: i64) -> QuadForm {
    let s = isqrt_u64(d as u64) as i64;
    while !is_reduced_indefinite(&f, d) {
        f = rho(f, d, s);
    }
    f
}

/// Normalized representative with `A > 0` in the cycle of a reduced
/// indefinite form.
fn positive_leading(f: QuadForm, d: i64, s: i64) -> QuadForm {
    if f.a > 0 {
        f
    } else {
        rho(f, d, s)
    }
}

/// Properly equivalent form with `A > 0`.
fn leading_positive(f: QuadForm) -> QuadForm {
    let d = f.disc();
    if f.a > 0 || d < 0 {
        return f;
    }
    let s = isqrt_u64(d as u64) as i64;
    positive_leading(reduce_indefinite(f, d), d, s)
}

/// Dirichlet composition of primitive forms of the same discriminant,
/// followed by reduction.
pub fn compose(f: &QuadForm, g: &QuadForm) -> QuadForm {
    let (f, g) = (&leading_positive(*f), &leading_positive(*g));
    let (f, g) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1, _c1) = (f.a as i128, f.b as i128, f.c as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (d, y1) = if a2 % a1 == 0 {
        (a1, 0)
    } else {
        let (d, u, _v) = ext_gcd(a2, a1);
        (d, u)
    };
    let (d1, x2, y2) = if s % d == 0 {
        (d, 0, -1)
    } else {
        let (d1, x2, y2) = ext_gcd(s, d);
        (d1, x2, -y2)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    let out = QuadForm::new(a3 as i64, b3 as i64, c3 as i64);
    out.reduce()
}

/// Fundamental discriminants: squarefree `D ≡ 1 (mod 4)`, or `4m` with
/// `m ≡ 2, 3 (mod 4)` squarefree.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return crate::arith::is_squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return (mr == 2 || mr == 3) && crate::arith::is_squarefree(m.unsigned_abs());
    }
    false
}

/// Squarefree indicator for `0..=n` by sieving with squares of primes.
fn squarefree_sieve(n: u64) -> Vec<bool> {
    let mut sf = vec![true; n as usize + 1];
    if n >= 1 {
        sf[0] = false;
    }
    let mut k = 2u64;
    while k * k <= n {
        let q = k * k;
        let mut j = q;
        while j <= n {
            sf[j as usize] = false;
            j += q;
        }
        k += 1;
    }
    sf
}

/// Indicator of `|D|` being a fundamental discriminant of the given sign,
/// for `|D| < x`.
fn fundamental_table(x: u64, sig: Signature) -> Vec<bool> {
    let n = x.saturating_sub(1);
    let sf = squarefree_sieve(n);
    let mut out = vec![false; n as usize + 1];
    let sign = sig.sign() as i64;
    for m in 2..=n {
        let d = sign * m as i64;
        let r = d.rem_euclid(4);
        out[m as usize] = if r == 1 {
            sf[m as usize]
        } else if r == 0 {
            let q = d / 4;
            let qr = q.rem_euclid(4);
            (qr == 2 || qr == 3) && sf[(m / 4) as usize]
        } else {
            false
        };
    }
    out
}

/// All fundamental `D` with `0 < ±D < x`, sorted by `|D|`.
pub fn fundamental_discriminants(x: u64, sig: Signature) -> Vec<i64> {
    let sign = sig.sign() as i64;
    fundamental_table(x, sig).iter().enumerate().filter(|(_, &f)| f).map(|(m, _)| sign * m as i64).collect()
}

/// The (narrow, for `D > 0`) form class group of a fundamental discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormClassGroup {
    pub disc: i64,
    /// One reduced form per class; index 0 is the principal class.
    pub reps: Vec<QuadForm>,
    /// Reduced forms (with `A > 0` when `D > 0`) to class index.
    lookup: HashMap<QuadForm, usize>,
    root: i64,
}

impl FormClassGroup {
    pub fn h(&self) -> u64 {
        self.reps.len() as u64
    }

    /// Class index of any primitive form of this discriminant.
    pub fn class_of(&self, f: &QuadForm) -> usize {
        let r = f.reduce();
        let r = if self.disc > 0 { positive_leading(r, self.disc, self.root) } else { r };
        self.lookup[&r]
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.class_of(&compose(&self.reps[i], &self.reps[j]))
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.class_of(&self.reps[i].inverse())
    }

    pub fn order(&self, i: usize) -> u64 {
        let mut k = 1;
        let mut x = i;
        while x != 0 {
            x = self.compose(x, i);
            k += 1;
        }
        k
    }

    /// Number of classes `g` with `g³ = 1`.
    pub fn h3_star(&self) -> u64 {
        (0..self.reps.len()).filter(|&i| self.compose(self.compose(i, i), i) == 0).count() as u64
    }
}

fn guard(d: i64) -> Result<()> {
    if d.unsigned_abs() > CLASS_GROUP_LIMIT {
        return Err(Error::Resource(format!("|D| = {} exceeds {CLASS_GROUP_LIMIT}", d.unsigned_abs())));
    }
    if !is_fundamental(d) {
        return domain(format!("{d} is not a fundamental discriminant"));
    }
    Ok(())
}

/// Reduced forms of discriminant `d < 0`.
fn reduced_definite_forms(d: i64) -> Vec<QuadForm> {
    let n = -d;
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b * b + n) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + n) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            out.push(QuadForm::new(a, b, c));
        }
        a += 1;
    }
    out
}

/// Reduced forms with `A > 0` of discriminant `d > 0`.
fn reduced_indefinite_forms(d: i64) -> Vec<QuadForm> {
    let s = isqrt_u64(d as u64) as i64;
    let mut out = Vec::new();
    for b in 1..=s {
        if (d - b * b) % 4 != 0 {
            continue;
        }
        let n = (d - b * b) / 4;
        // 2A ∈ (√D − B, √D + B)
        for a in 1..=((s + b) / 2 + 1) {
            if n % a != 0 {
                continue;
            }
            let f = QuadForm::new(a, b, -(n / a));
            if is_reduced_indefinite(&f, d) {
                out.push(f);
            }
        }
    }
    out
}

/// Group ρ²-orbits of reduced forms with `A > 0` into classes. The principal
/// class gets index 0.
fn cycles(d: i64, forms: &[QuadForm]) -> (Vec<QuadForm>, HashMap<QuadForm, usize>) {
    let s = isqrt_u64(d as u64) as i64;
    let mut lookup: HashMap<QuadForm, usize> = HashMap::with_capacity(forms.len());
    let mut reps = Vec::new();
    let id = QuadForm::identity(d);
    let order = std::iter::once(id).chain(forms.iter().copied());
    for f in order {
        if lookup.contains_key(&f) {
            continue;
        }
        let k = reps.len();
        reps.push(f);
        let mut g = f;
        loop {
            lookup.insert(g, k);
            g = rho(rho(g, d, s), d, s);
            if g == f {
                break;
            }
        }
    }
    (reps, lookup)
}

pub fn class_group(d: i64) -> Result<FormClassGroup> {
    guard(d)?;
    if d < 0 {
        let mut reps = reduced_definite_forms(d);
        let id = QuadForm::identity(d);
        let pos = reps.iter().position(|f| *f == id).expect("principal form is reduced");
        reps.swap(0, pos);
        let lookup = reps.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        Ok(FormClassGroup { disc: d, reps, lookup, root: 0 })
    } else {
        let forms = reduced_indefinite_forms(d);
        let (reps, lookup) = cycles(d, &forms);
        Ok(FormClassGroup { disc: d, reps, lookup, root: isqrt_u64(d as u64) as i64 })
    }
}

pub fn h3_star(d: i64) -> Result<u64> {
    Ok(class_group(d)?.h3_star())
}

/// `h3*` from the class number and a cube test on representatives. When
/// `3 ∤ h` there is no 3-torsion; when `3 ‖ h` the 3-part is cyclic of order 3.
fn h3_from_group(h: u64, cube_is_trivial: impl Fn() -> u64) -> u64 {
    if !h.is_multiple_of(3) {
        1
    } else if !h.is_multiple_of(9) {
        3
    } else {
        cube_is_trivial()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNumberRow {
    pub disc: i64,
    pub h: u64,
    pub h3_star: u64,
}

const BLOCK: u64 = 1 << 13;

fn negative_block(lo: u64, hi: u64, fund: &[bool]) -> Vec<ClassNumberRow> {
    // reduced forms with lo ≤ 4ac − b² < hi
    let width = (hi - lo) as usize;
    let mut forms: Vec<Vec<QuadForm>> = vec![Vec::new(); width];
    let mut a = 1i64;
    while 3 * (a as u64) * (a as u64) < hi {
        for b in -a + 1..=a {
            let bb = b * b;
            let c_lo = ((lo as i64 + bb) + 4 * a - 1).div_euclid(4 * a).max(a);
            let c_hi = (hi as i64 - 1 + bb).div_euclid(4 * a);
            for c in c_lo..=c_hi {
                if c == a && b < 0 {
                    continue;
                }
                let n = (4 * a * c - bb) as u64;
                if fund[n as usize] {
                    forms[(n - lo) as usize].push(QuadForm::new(a, b, c));
                }
            }
        }
        a += 1;
    }
    let mut rows = Vec::new();
    for (i, fs) in forms.into_iter().enumerate() {
        let n = lo + i as u64;
        if !fund[n as usize] {
            continue;
        }
        let h = fs.len() as u64;
        let h3 = h3_from_group(h, || {
            let id = QuadForm::identity(-(n as i64));
            fs.iter().filter(|f| compose(&compose(f, f), f) == id).count() as u64
        });
        rows.push(ClassNumberRow { disc: -(n as i64), h, h3_star: h3 });
    }
    rows
}

fn positive_block(lo: u64, hi: u64, fund: &[bool]) -> Vec<ClassNumberRow> {
    let width = (hi - lo) as usize;
    let mut forms: Vec<Vec<QuadForm>> = vec![Vec::new(); width];
    let root_hi = isqrt_u64(hi) as i64 + 1;
    // D = b² + 4a|c|, reduced: b < √D, |2a − b| < √D < 2a + b
    for b in 1..root_hi {
        let bb = b * b;
        for a in 1..root_hi {
            let c_lo = ((lo as i64 - bb) + 4 * a - 1).div_euclid(4 * a).max(1);
            let c_hi = (hi as i64 - 1 - bb).div_euclid(4 * a);
            if c_lo > c_hi {
                continue;
            }
            // D < (2a + b)² caps |c|
            let c_cap = ((2 * a + b) * (2 * a + b) - 1 - bb).div_euclid(4 * a);
            for c in c_lo..=c_hi.min(c_cap) {
                let n = bb + 4 * a * c;
                if !fund[n as usize] {
                    continue;
                }
                let f = QuadForm::new(a, b, -c);
                if is_reduced_indefinite(&f, n) {
                    forms[(n as u64 - lo) as usize].push(f);
                }
            }
        }
    }
    let mut rows = Vec::new();
    for (i, fs) in forms.into_iter().enumerate() {
        let n = lo + i as u64;
        if !fund[n as usize] {
            continue;
        }
        let d = n as i64;
        let (reps, lookup) = cycles(d, &fs);
        let h = reps.len() as u64;
        let s = isqrt_u64(n) as i64;
        let h3 = h3_from_group(h, || {
            reps.iter()
                .filter(|f| {
                    let cube = compose(&compose(f, f), f);
                    lookup[&positive_leading(cube, d, s)] == 0
                })
                .count() as u64
        });
        rows.push(ClassNumberRow { disc: d, h, h3_star: h3 });
    }
    rows
}

/// `(D, h, h3*)` for every fundamental `D` with `0 < ±D < x`, sorted by `|D|`.
pub fn class_number_table(x: u64, sig: Signature) -> Result<Vec<ClassNumberRow>> {
    if x > CLASS_GROUP_LIMIT + 1 {
        return Err(Error::Resource(format!("class number table to {x} exceeds {CLASS_GROUP_LIMIT}")));
    }
    if x <= 2 {
        return Ok(Vec::new());
    }
    let fund = fundamental_table(x, sig);
    let blocks: Vec<(u64, u64)> = (0..x.div_ceil(BLOCK)).map(|k| (k * BLOCK, ((k + 1) * BLOCK).min(x))).collect();
    let parts: Vec<Vec<ClassNumberRow>> = blocks
        .par_iter()
        .map(|&(lo, hi)| match sig {
            Signature::NegativeDisc => negative_block(lo.max(1), hi, &fund),
            Signature::PositiveDisc => positive_block(lo.max(1), hi, &fund),
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

pub fn write_class_number_csv<W: Write>(rows: &[ClassNumberRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "D,h,h3star")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.disc, r.h, r.h3_star)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct L4eqReport {
    pub x: u64,
    pub signature: Signature,
    /// `Σ (h3*(D) − 1)/2` over fundamental `D`.
    pub quadratic_side: u64,
    /// Nowhere totally ramified cubic classes.
    pub cubic_side: u64,
    pub residual: i64,
}

/// Compare the 3-torsion sum with the cubic count over `0 < ±D < x`.
pub fn verify_l4eq(x: u64, sig: Signature) -> Result<L4eqReport> {
    if x > L4EQ_LIMIT {
        return Err(Error::Resource(format!("identity check at X = {x} exceeds {L4EQ_LIMIT}")));
    }
    let quadratic_side: u64 =
        fundamental_discriminants(x, sig).into_iter().map(|d| h3_star(d).map(|h| (h - 1) / 2)).sum::<Result<u64>>()?;
    let cubic_side = cubic_ntr_count(x, sig)?;
    Ok(L4eqReport {
        x,
        signature: sig,
        quadratic_side,
        cubic_side,
        residual: quadratic_side as i64 - cubic_side as i64,
    })
}

fn cubic_ntr_count(x: u64, sig: Signature) -> Result<u64> {
    if x <= 1 {
        return Ok(0);
    }
    let fz = crate::arith::Factorizer::with_table(x);
    Ok(count_abs(sig, 1, x - 1, &ClassFilter::nowhere_tot_ram(), &fz)?.0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionAverage {
    pub x: u64,
    pub signature: Signature,
    pub discriminants: u64,
    /// `Σ h3*(D) / #D` from class groups.
    pub direct: BigRational,
    /// `1 + 2·N(𝒱)/#D` from the cubic count.
    pub via_cubic: BigRational,
}

impl TorsionAverage {
    pub fn agree(&self) -> bool {
        self.direct == self.via_cubic
    }

    pub fn direct_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.direct.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn three_torsion_average(x: u64, sig: Signature) -> Result<TorsionAverage> {
    if x < 10 {
        return domain(format!("X = {x} is below 10"));
    }
    let rows = class_number_table(x, sig)?;
    let n = rows.len() as u64;
    let total: u64 = rows.iter().map(|r| r.h3_star).sum();
    let cubic = cubic_ntr_count(x, sig)?;
    let den = BigInt::from(n);
    Ok(TorsionAverage {
        x,
        signature: sig,
        discriminants: n,
        direct: BigRational::new(BigInt::from(total), den.clone()),
        via_cubic: BigRational::new(BigInt::from(n + 2 * cubic), den),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_examples() {
        assert!(is_fundamental(5));
        assert!(is_fundamental(12));
        assert!(is_fundamental(-4));
        assert!(is_fundamental(-23));
        assert!(!is_fundamental(9));
        assert!(!is_fundamental(1));
        assert!(!is_fundamental(-16));
        let neg = fundamental_discriminants(100, Signature::NegativeDisc);
        assert_eq!(&neg[..5], &[-3, -4, -7, -8, -11]);
        for d in (-2000..2000).filter(|&d| d != 0) {
            let sig = if d > 0 { Signature::PositiveDisc } else { Signature::NegativeDisc };
            let listed = fundamental_discriminants(2000, sig).contains(&d);
            assert_eq!(listed, is_fundamental(d), "{d}");
        }
    }

    #[test]
    fn small_class_groups() {
        assert_eq!(class_group(-23).unwrap().h(), 3);
        assert_eq!(class_group(-4).unwrap().h(), 1);
        assert_eq!(h3_star(-23).unwrap(), 3);
        assert_eq!(h3_star(-4).unwrap(), 1);
        assert_eq!(class_group(-3299).unwrap().h(), 27);
        assert_eq!(h3_star(-3299).unwrap(), 9);
        assert_eq!(h3_star(229).unwrap(), 3);
        assert_eq!(class_group(5).unwrap().h(), 1);
        // ℚ(√3) has narrow class number 2
        assert_eq!(class_group(12).unwrap().h(), 2);
        assert!(class_group(9).is_err());
    }

    #[test]
    fn group_axioms() {
        for d in [-23i64, -104, -3299, -3896, 229, 1957, 3137, 316, 62501] {
            let g = class_group(d).unwrap();
            let h = g.h() as usize;
            for i in 0..h {
                assert_eq!(g.compose(i, 0), i);
                assert_eq!(g.compose(i, g.inverse(i)), 0);
                assert_eq!(g.h() % g.order(i), 0);
                for j in 0..h {
                    assert_eq!(g.compose(i, j), g.compose(j, i));
                    for k in 0..h.min(6) {
                        assert_eq!(g.compose(g.compose(i, j), k), g.compose(i, g.compose(j, k)));
                    }
                }
            }
        }
    }

    #[test]
    fn bulk_table_matches_single_groups() {
        for sig in [Signature::NegativeDisc, Signature::PositiveDisc] {
            let rows = class_number_table(3000, sig).unwrap();
            assert_eq!(rows.len(), fundamental_discriminants(3000, sig).len());
            for r in rows {
                let g = class_group(r.disc).unwrap();
                assert_eq!(r.h, g.h(), "{}", r.disc);
                assert_eq!(r.h3_star, g.h3_star(), "{}", r.disc);
            }
        }
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_class_number_csv(&[ClassNumberRow { disc: -23, h: 3, h3_star: 3 }], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "D,h,h3star\n-23,3,3\n");
    }
}
