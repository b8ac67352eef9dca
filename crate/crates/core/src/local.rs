//! Local data at a prime: splitting symbols, maximality, p-adic densities of
//! the standard congruence sets, and second-order densities in ℚ(p^{1/3}).

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inv, Factorizer};
use crate::cuberoot::CubeRootRational;
use crate::error::{domain, Error, Result};
use crate::forms::BinaryCubicForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SplittingSymbol {
    S111,
    S12,
    S3,
    S1sq1,
    S1cube,
    /// `f ≡ 0 (mod p)`.
    Degenerate,
}

impl SplittingSymbol {
    pub const NONDEGENERATE: [SplittingSymbol; 5] = [
        SplittingSymbol::S111,
        SplittingSymbol::S12,
        SplittingSymbol::S3,
        SplittingSymbol::S1sq1,
        SplittingSymbol::S1cube,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SplittingSymbol::S111 => "111",
            SplittingSymbol::S12 => "12",
            SplittingSymbol::S3 => "3",
            SplittingSymbol::S1sq1 => "1^21",
            SplittingSymbol::S1cube => "1^3",
            SplittingSymbol::Degenerate => "0",
        }
    }

    pub fn is_ramified(self) -> bool {
        matches!(self, SplittingSymbol::S1sq1 | SplittingSymbol::S1cube)
    }
}

impl fmt::Display for SplittingSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

impl FromStr for SplittingSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        Ok(match t {
            "111" => SplittingSymbol::S111,
            "12" => SplittingSymbol::S12,
            "3" => SplittingSymbol::S3,
            "1^21" | "1121" | "1sq1" | "112" => SplittingSymbol::S1sq1,
            "1^3" | "13" | "1cube" => SplittingSymbol::S1cube,
            "0" | "degenerate" => SplittingSymbol::Degenerate,
            _ => return Err(Error::Parse(format!("unknown splitting symbol {s:?}"))),
        })
    }
}

/// Local condition at a single prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalMode {
    AnyRing,
    MaximalAny,
    MaximalNotTotRam,
    SplittingIn(Vec<SplittingSymbol>),
    /// Residue classes of `(a, b, c, d)` modulo `modulus`.
    ExplicitResidues {
        modulus: u64,
        residues: Vec<[u64; 4]>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCondition {
    pub p: u64,
    pub mode: LocalMode,
}

impl LocalCondition {
    pub fn new(p: u64, mode: LocalMode) -> Self {
        LocalCondition { p, mode }
    }

    pub fn accepts(&self, f: &BinaryCubicForm) -> bool {
        let p = self.p;
        match &self.mode {
            LocalMode::AnyRing => true,
            LocalMode::MaximalAny => maximal_at_raw(f, p),
            LocalMode::MaximalNotTotRam => maximal_at_raw(f, p) && splitting_symbol(f, p) != SplittingSymbol::S1cube,
            LocalMode::SplittingIn(set) => maximal_at_raw(f, p) && set.contains(&splitting_symbol(f, p)),
            LocalMode::ExplicitResidues { modulus, residues } => {
                let m = *modulus as i128;
                let r = f.coeffs().map(|x| (x as i128).rem_euclid(m) as u64);
                residues.contains(&r)
            }
        }
    }
}

/// A point of ℙ¹(𝔽_p): `[r : 1]` or `[1 : 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Finite(u64),
    Infinity,
}

#[inline]
fn mm(x: u64, y: u64, p: u64) -> u64 {
    ((x as u128 * y as u128) % p as u128) as u64
}

#[inline]
fn red(x: i64, p: u64) -> u64 {
    (x as i128).rem_euclid(p as i128) as u64
}

fn reduce_mod(f: &BinaryCubicForm, p: u64) -> [u64; 4] {
    f.coeffs().map(|x| red(x, p))
}

/// Discriminant modulo `p`, safe for any coefficient size.
pub fn disc_mod(f: &BinaryCubicForm, p: u64) -> u64 {
    let [a, b, c, d] = reduce_mod(f, p);
    let neg = |x: u64| if x == 0 { 0 } else { p - x };
    let k = |n: u64| n % p;
    let bc = mm(b, c, p);
    let ad = mm(a, d, p);
    let t1 = mm(bc, bc, p);
    let t2 = neg(mm(k(4), mm(a, mm(mm(c, c, p), c, p), p), p));
    let t3 = neg(mm(k(4), mm(d, mm(mm(b, b, p), b, p), p), p));
    let t4 = neg(mm(k(27), mm(ad, ad, p), p));
    let t5 = mm(k(18), mm(ad, bc, p), p);
    [t2, t3, t4, t5].iter().fold(t1, |acc, &t| (acc + t) % p)
}

// Dense polynomials over 𝔽_p, lowest degree first, no trailing zeros.
type Poly = Vec<u64>;

fn trim(mut v: Poly) -> Poly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_rem(mut num: Poly, den: &Poly, p: u64) -> Poly {
    let dd = den.len() - 1;
    let inv = mod_inv(den[dd], p);
    while num.len() > dd {
        let top = num.len() - 1;
        let q = mm(num[top], inv, p);
        if q != 0 {
            for (i, &di) in den.iter().enumerate().take(dd + 1) {
                let t = mm(q, di, p);
                let idx = top - dd + i;
                num[idx] = (num[idx] + p - t) % p;
            }
        }
        num.pop();
        num = trim(num);
        if num.is_empty() {
            break;
        }
    }
    trim(num)
}

fn poly_mulmod(x: &Poly, y: &Poly, m: &Poly, p: u64) -> Poly {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; x.len() + y.len() - 1];
    for (i, &u) in x.iter().enumerate() {
        for (j, &v) in y.iter().enumerate() {
            out[i + j] = (out[i + j] + mm(u, v, p)) % p;
        }
    }
    poly_rem(trim(out), m, p)
}

fn poly_gcd(mut x: Poly, mut y: Poly, p: u64) -> Poly {
    while !y.is_empty() {
        let r = poly_rem(x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Number of distinct roots in 𝔽_p of a nonzero polynomial.
fn count_distinct_roots(g: &Poly, p: u64) -> usize {
    if g.len() <= 1 {
        return 0;
    }
    if p <= 64 {
        return (0..p).filter(|&x| g.iter().rev().fold(0u64, |acc, &c| (mm(acc, x, p) + c) % p) == 0).count();
    }
    // gcd(x^p − x, g)
    let mut acc: Poly = vec![1];
    let mut base: Poly = poly_rem(vec![0, 1], g, p);
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, g, p);
        }
        base = poly_mulmod(&base, &base, g, p);
        e >>= 1;
    }
    let mut h = acc;
    h.resize(h.len().max(2), 0);
    h[1] = (h[1] + p - 1) % p;
    let h = trim(h);
    poly_gcd(g.clone(), h, p).len() - 1
}

/// Number of distinct roots of `f mod p` in ℙ¹(𝔽_p). `f` must not vanish
/// identically mod `p`.
pub fn count_p1_roots(f: &BinaryCubicForm, p: u64) -> Result<usize> {
    let [a, b, c, d] = reduce_mod(f, p);
    if a == 0 && b == 0 && c == 0 && d == 0 {
        return domain(format!("{f} vanishes mod {p}"));
    }
    let inf = usize::from(a == 0);
    let g = trim(vec![d, c, b, a]);
    Ok(inf + count_distinct_roots(&g, p))
}

/// Multiplicity of each point of ℙ¹(𝔽_p) as a root of `f mod p`, by
/// exhaustive evaluation. Intended for small `p`.
fn multiplicities_small(f: &BinaryCubicForm, p: u64) -> Vec<(ProjPoint, u32)> {
    let [a, b, c, d] = reduce_mod(f, p);
    let mut out = Vec::new();
    let lead = if a != 0 {
        0
    } else if b != 0 {
        1
    } else if c != 0 {
        2
    } else {
        3
    };
    if lead > 0 {
        out.push((ProjPoint::Infinity, lead));
    }
    for r in 0..p {
        // f(x + r y, y): trailing coefficients f(r,1), ∂ₓf(r,1), ½∂ₓ²f(r,1)
        let r2 = mm(r, r, p);
        let d0 = (mm(a, mm(r2, r, p), p) + mm(b, r2, p) + mm(c, r, p) + d) % p;
        let c0 = (mm(3 % p, mm(a, r2, p), p) + mm(2 % p, mm(b, r, p), p) + c) % p;
        let b0 = (mm(3 % p, mm(a, r, p), p) + b) % p;
        let m = if d0 != 0 {
            0
        } else if c0 != 0 {
            1
        } else if b0 != 0 {
            2
        } else {
            3
        };
        if m > 0 {
            out.push((ProjPoint::Finite(r), m));
        }
    }
    out
}

/// The multiple root of `f mod p` and its multiplicity, if any.
pub fn multiple_root(f: &BinaryCubicForm, p: u64) -> Option<(ProjPoint, u32)> {
    let [a, b, c, d] = reduce_mod(f, p);
    if (a | b | c | d) == 0 || disc_mod(f, p) != 0 {
        return None;
    }
    if p <= 3 {
        return multiplicities_small(f, p).into_iter().find(|&(_, m)| m >= 2);
    }
    let hp = (mm(b, b, p) + p - mm(3, mm(a, c, p), p)) % p;
    let hq = (mm(b, c, p) + p - mm(9, mm(a, d, p), p)) % p;
    let hr = (mm(c, c, p) + p - mm(3, mm(b, d, p), p)) % p;
    if hp == 0 && hq == 0 && hr == 0 {
        // f = λ(x − ry)³ with r = −b/(3a)
        if a == 0 {
            return Some((ProjPoint::Infinity, 3));
        }
        let r = mm(p - b % p, mod_inv(mm(3, a, p), p), p) % p;
        return Some((ProjPoint::Finite(r), 3));
    }
    // H = P·(x − ry)² with r = −Q/(2P)
    if hp == 0 {
        return Some((ProjPoint::Infinity, 2));
    }
    let r = mm((p - hq) % p, mod_inv(mm(2, hp, p), p), p);
    Some((ProjPoint::Finite(r), 2))
}

/// The splitting symbol of `f` at `p`.
pub fn splitting_symbol(f: &BinaryCubicForm, p: u64) -> SplittingSymbol {
    if f.content().is_multiple_of(p) {
        return SplittingSymbol::Degenerate;
    }
    if disc_mod(f, p) != 0 {
        return match count_p1_roots(f, p).expect("nonzero mod p") {
            3 => SplittingSymbol::S111,
            1 => SplittingSymbol::S12,
            _ => SplittingSymbol::S3,
        };
    }
    match multiple_root(f, p) {
        Some((_, 3)) => SplittingSymbol::S1cube,
        _ => SplittingSymbol::S1sq1,
    }
}

/// Maximality at `p` without the nondegeneracy precondition; depends only on
/// `f mod p²`.
pub(crate) fn maximal_at_raw(f: &BinaryCubicForm, p: u64) -> bool {
    if f.content().is_multiple_of(p) {
        return false;
    }
    let Some((root, _)) = multiple_root(f, p) else {
        return true;
    };
    let p2 = (p as i128) * (p as i128);
    let value = match root {
        ProjPoint::Infinity => (f.a as i128).rem_euclid(p2),
        ProjPoint::Finite(r) => {
            let r = r as i128;
            let m = |x: i128, y: i128| (x * y).rem_euclid(p2);
            let fa = (f.a as i128).rem_euclid(p2);
            let fb = (f.b as i128).rem_euclid(p2);
            let fc = (f.c as i128).rem_euclid(p2);
            let fd = (f.d as i128).rem_euclid(p2);
            (m(m(m(fa, r), r), r) + m(m(fb, r), r) + m(fc, r) + fd).rem_euclid(p2)
        }
    };
    value != 0
}

/// Whether `R(f)` is maximal at `p`.
pub fn is_maximal_at(f: &BinaryCubicForm, p: u64) -> Result<bool> {
    if f.discriminant()? == 0 {
        return domain(format!("{f} has zero discriminant"));
    }
    Ok(maximal_at_raw(f, p))
}

/// Maximality and the nowhere-totally-ramified flag of `R(f)`.
pub fn local_flags(f: &BinaryCubicForm, disc: i128, fz: &Factorizer) -> Result<(bool, bool)> {
    if disc == 0 {
        return domain(format!("{f} has zero discriminant"));
    }
    let mut ntr = true;
    for (p, e) in fz.factor(disc.unsigned_abs())? {
        let p = u64::try_from(p).map_err(|_| Error::Overflow("prime exceeds u64"))?;
        if e >= 2 && !maximal_at_raw(f, p) {
            return Ok((false, false));
        }
        if ntr && splitting_symbol(f, p) == SplittingSymbol::S1cube {
            ntr = false;
        }
    }
    Ok((true, ntr))
}

pub fn is_maximal(f: &BinaryCubicForm) -> Result<bool> {
    Ok(local_flags(f, f.discriminant()?, &Factorizer::new())?.0)
}

pub fn is_nowhere_totally_ramified(f: &BinaryCubicForm) -> Result<bool> {
    Ok(local_flags(f, f.discriminant()?, &Factorizer::new())?.1)
}

/// Congruence sets whose densities are tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensitySet {
    /// Forms with the given symbol.
    T(SplittingSymbol),
    /// Forms maximal at `p` with the given symbol.
    U(SplittingSymbol),
    /// Maximal at `p`.
    Maximal,
    /// Maximal and not totally ramified.
    MaximalNotTotRam,
    /// Not maximal at `p`.
    NonMaximal,
}

impl DensitySet {
    pub fn all() -> Vec<DensitySet> {
        let mut v: Vec<DensitySet> = SplittingSymbol::NONDEGENERATE.iter().map(|&s| DensitySet::T(s)).collect();
        v.extend(SplittingSymbol::NONDEGENERATE.iter().map(|&s| DensitySet::U(s)));
        v.extend([DensitySet::Maximal, DensitySet::MaximalNotTotRam, DensitySet::NonMaximal]);
        v
    }

    /// Smallest level `k` such that membership depends only on `f mod pᵏ`.
    pub fn level(self) -> u32 {
        match self {
            DensitySet::T(_) => 1,
            _ => 2,
        }
    }

    fn contains(self, f: &BinaryCubicForm, p: u64) -> bool {
        match self {
            DensitySet::T(s) => splitting_symbol(f, p) == s,
            DensitySet::U(s) => splitting_symbol(f, p) == s && maximal_at_raw(f, p),
            DensitySet::Maximal => maximal_at_raw(f, p),
            DensitySet::MaximalNotTotRam => maximal_at_raw(f, p) && splitting_symbol(f, p) != SplittingSymbol::S1cube,
            DensitySet::NonMaximal => !maximal_at_raw(f, p),
        }
    }
}

impl fmt::Display for DensitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensitySet::T(s) => write!(f, "T{s}"),
            DensitySet::U(s) => write!(f, "U{s}"),
            DensitySet::Maximal => write!(f, "U"),
            DensitySet::MaximalNotTotRam => write!(f, "V"),
            DensitySet::NonMaximal => write!(f, "W"),
        }
    }
}

impl FromStr for DensitySet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "U" => return Ok(DensitySet::Maximal),
            "V" => return Ok(DensitySet::MaximalNotTotRam),
            "W" => return Ok(DensitySet::NonMaximal),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('T') {
            return Ok(DensitySet::T(rest.parse()?));
        }
        if let Some(rest) = s.strip_prefix('U') {
            return Ok(DensitySet::U(rest.parse()?));
        }
        Err(Error::Parse(format!("unknown density set {s:?}")))
    }
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn bi(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Exact density of `set` by exhaustive enumeration of `(ℤ/pᵏℤ)⁴`.
pub fn density_bruteforce(p: u64, level: u32, set: DensitySet) -> Result<BigRational> {
    if level < set.level() {
        return Err(Error::Capability(format!("{set} is not determined modulo p^{level}")));
    }
    let feasible = match level {
        1 => p <= 13,
        2 => p <= 5,
        _ => false,
    };
    if !feasible {
        return Err(Error::Resource(format!("(Z/{p}^{level})^4 is too large to enumerate")));
    }
    let q = p.pow(level);
    let mut hits = 0u64;
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let f = BinaryCubicForm::new(a as i64, b as i64, c as i64, d as i64);
                    if set.contains(&f, p) {
                        hits += 1;
                    }
                }
            }
        }
    }
    Ok(ratio(hits, q.pow(4)))
}

/// Closed-form density of `set` at `p`.
pub fn density_closed_form(set: DensitySet, p: u64) -> BigRational {
    let pb = bi(p);
    let p4 = BigRational::from_integer(num_traits::pow(pb.clone(), 4));
    let p5 = BigRational::from_integer(num_traits::pow(pb.clone(), 5));
    let pm1 = &pb - 1;
    let pp1 = &pb + 1;
    let common = BigRational::from_integer(&pm1 * &pm1 * &pb * &pp1);
    let sym_t = |s: SplittingSymbol| -> BigRational {
        match s {
            SplittingSymbol::S111 => &common / BigRational::from_integer(bi(6)) / &p4,
            SplittingSymbol::S12 => &common / BigRational::from_integer(bi(2)) / &p4,
            SplittingSymbol::S3 => &common / BigRational::from_integer(bi(3)) / &p4,
            SplittingSymbol::S1sq1 => BigRational::from_integer(&pm1 * &pb * &pp1) / &p4,
            SplittingSymbol::S1cube => BigRational::from_integer(&pm1 * &pp1) / &p4,
            SplittingSymbol::Degenerate => BigRational::one() / &p4,
        }
    };
    let sym_u = |s: SplittingSymbol| -> BigRational {
        match s {
            SplittingSymbol::S1sq1 => BigRational::from_integer(&pm1 * &pm1 * &pp1) / &p4,
            SplittingSymbol::S1cube => BigRational::from_integer(&pm1 * &pm1 * &pp1) / &p5,
            SplittingSymbol::Degenerate => BigRational::zero(),
            other => sym_t(other),
        }
    };
    let p2m1 = num_traits::pow(pb.clone(), 2) - 1;
    let p3m1 = num_traits::pow(pb.clone(), 3) - 1;
    match set {
        DensitySet::T(s) => sym_t(s),
        DensitySet::U(s) => sym_u(s),
        DensitySet::Maximal => BigRational::from_integer(&p3m1 * &p2m1) / &p5,
        DensitySet::MaximalNotTotRam => BigRational::from_integer(&p2m1 * &p2m1) / &p4,
        DensitySet::NonMaximal => BigRational::one() - BigRational::from_integer(&p3m1 * &p2m1) / &p5,
    }
}

/// First-order density `μ₁(σ, p)` of maximal forms with symbol `σ`.
pub fn mu1_sigma(s: SplittingSymbol, p: u64) -> CubeRootRational {
    CubeRootRational::from_rational(p, density_closed_form(DensitySet::U(s), p))
}

/// Second-order density `μ₂(σ, p)` of maximal forms with symbol `σ`.
pub fn mu2_sigma(s: SplittingSymbol, p: u64) -> CubeRootRational {
    let int = |n: BigInt| CubeRootRational::from_rational(p, BigRational::from_integer(n));
    let pb = bi(p);
    let one = CubeRootRational::from_int(p, 1);
    let t = CubeRootRational::t(p);
    let one_minus_t = &one - &t;
    let one_minus_inv_p = CubeRootRational::from_rational(p, BigRational::one() - ratio(1, p));
    let pm1: BigInt = &pb - 1;
    let choose2 = &pb * &pm1 / 2;
    let choose3 = &pb * &pm1 * (&pb - 2) / 6;
    let inner = match s {
        SplittingSymbol::S111 => &(&int(choose3) * &one_minus_t) + &(&int(&choose2 * &pm1) * &t),
        SplittingSymbol::S12 => {
            let half = (&pb * &pb - &pb) / 2;
            &(&int(&pb * &half) * &one_minus_t) + &(&int(&half * &pm1) * &t)
        }
        SplittingSymbol::S3 => &int((&pb * &pb * &pb - &pb) / 3) * &one_minus_t,
        SplittingSymbol::S1sq1 => {
            let pp: BigInt = &pb * &pm1;
            &(&int(pp.clone()) * &one_minus_inv_p) + &(&(&int(pp) * &one_minus_t) * &t)
        }
        SplittingSymbol::S1cube => {
            &(&(&int(pb.clone()) * &one_minus_t) * &one_minus_inv_p) + &(&(&int(pm1.clone()) * &one_minus_t) * &t)
        }
        SplittingSymbol::Degenerate => CubeRootRational::zero(p),
    };
    &inner * &CubeRootRational::p_pow_third(p, 9)
}

pub fn mu1_total(p: u64) -> CubeRootRational {
    SplittingSymbol::NONDEGENERATE.iter().fold(CubeRootRational::zero(p), |acc, &s| &acc + &mu1_sigma(s, p))
}

pub fn mu2_total(p: u64) -> CubeRootRational {
    SplittingSymbol::NONDEGENERATE.iter().fold(CubeRootRational::zero(p), |acc, &s| &acc + &mu2_sigma(s, p))
}

/// `(1 − p⁻²)(1 − p⁻³)`.
pub fn mu1_expected(p: u64) -> CubeRootRational {
    let one = CubeRootRational::from_int(p, 1);
    &(&one - &CubeRootRational::p_pow_third(p, 6)) * &(&one - &CubeRootRational::p_pow_third(p, 9))
}

/// `(1 − p⁻²)(1 − p^{-5/3})`.
pub fn mu2_expected(p: u64) -> CubeRootRational {
    let one = CubeRootRational::from_int(p, 1);
    &(&one - &CubeRootRational::p_pow_third(p, 6)) * &(&one - &CubeRootRational::p_pow_third(p, 5))
}

/// `#GL₂(𝔽_p) = (p² − 1)(p² − p)`.
pub fn gl2_order(p: u64) -> BigInt {
    let pb = bi(p);
    (&pb * &pb - 1) * (&pb * &pb - &pb)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassCheck {
    pub p: u64,
    /// `p⁴ / #GL₂(𝔽_p)`.
    pub order_mass: BigRational,
    /// `μ(𝒰_p) · p⁴ / #GL₂(𝔽_p)`.
    pub field_mass: BigRational,
    /// Whether `μ(𝒰_p)` came from exhaustive enumeration.
    pub brute_force: bool,
}

impl MassCheck {
    pub fn order_mass_expected(&self) -> BigRational {
        let x = ratio(self.p - 1, self.p) * ratio(self.p * self.p - 1, self.p * self.p);
        x.recip()
    }

    pub fn field_mass_expected(&self) -> BigRational {
        BigRational::one() + ratio(1, self.p) + ratio(1, self.p * self.p)
    }

    pub fn holds(&self) -> bool {
        self.order_mass == self.order_mass_expected() && self.field_mass == self.field_mass_expected()
    }
}

pub fn mass_check(p: u64) -> MassCheck {
    let (mu_u, brute_force) = match density_bruteforce(p, 2, DensitySet::Maximal) {
        Ok(x) => (x, true),
        Err(_) => (density_closed_form(DensitySet::Maximal, p), false),
    };
    let order_mass = BigRational::new(num_traits::pow(bi(p), 4), gl2_order(p));
    MassCheck { p, field_mass: &mu_u * &order_mass, order_mass, brute_force }
}

type Residue = [u64; 4];

fn act_mod(f: &Residue, g: [u64; 4], q: u64) -> Residue {
    // f((x, y)·g) / det(g), coefficients mod q
    let [a, b, c, d] = f.map(|x| x as i128);
    let [p_, q_, r_, s_] = g.map(|x| x as i128);
    let m = q as i128;
    let x3 = [p_ * p_ * p_, 3 * p_ * p_ * r_, 3 * p_ * r_ * r_, r_ * r_ * r_];
    let x2y = [p_ * p_ * q_, p_ * p_ * s_ + 2 * p_ * q_ * r_, 2 * p_ * r_ * s_ + q_ * r_ * r_, r_ * r_ * s_];
    let xy2 = [p_ * q_ * q_, 2 * p_ * q_ * s_ + q_ * q_ * r_, p_ * s_ * s_ + 2 * q_ * r_ * s_, r_ * s_ * s_];
    let y3 = [q_ * q_ * q_, 3 * q_ * q_ * s_, 3 * q_ * s_ * s_, s_ * s_ * s_];
    let det = (p_ * s_ - q_ * r_).rem_euclid(m);
    let det_inv = inverse_mod(det as u64, q) as i128;
    let mut out = [0u64; 4];
    for i in 0..4 {
        let v = (a * x3[i] + b * x2y[i] + c * xy2[i] + d * y3[i]).rem_euclid(m);
        out[i] = (v * det_inv).rem_euclid(m) as u64;
    }
    out
}

fn inverse_mod(x: u64, m: u64) -> u64 {
    let (g, s, _) = crate::arith::ext_gcd(x as i128, m as i128);
    debug_assert_eq!(g, 1);
    s.rem_euclid(m as i128) as u64
}

/// The GL₂(ℤ/qℤ)-orbit of a residue form, by breadth-first search over
/// transvections, diagonal unit twists and the swap.
pub fn orbit_mod(f: &BinaryCubicForm, q: u64) -> Vec<Residue> {
    let mut gens: Vec<[u64; 4]> = vec![[1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 0]];
    for u in 2..q {
        if crate::arith::gcd_u64(u, q) == 1 {
            gens.push([u, 0, 0, 1]);
        }
    }
    let start = f.coeffs().map(|x| (x as i128).rem_euclid(q as i128) as u64);
    let mut seen: HashSet<Residue> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(g) = queue.pop_front() {
        for &m in &gens {
            let h = act_mod(&g, m, q);
            if seen.insert(h) {
                queue.push_back(h);
            }
        }
    }
    let mut out: Vec<Residue> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// `(1 − p^{-1/3})·p^{-3m}·Σ w(f)` over a set of residue forms mod `p^m`,
/// with `w(f) = p^{1−m}|a|_p^{-2/3}/(p − 1)` for `a ≢ 0` and
/// `p^{-m/3}/(1 − p^{-1/3})` for `a ≡ 0`.
pub fn mu2_of_residues(residues: &[Residue], p: u64, m: u32) -> CubeRootRational {
    let q = p.pow(m);
    let mut zero_a = 0u64;
    // count by valuation of a
    let mut by_val = vec![0u64; m as usize];
    for r in residues {
        let a = r[0] % q;
        if a == 0 {
            zero_a += 1;
        } else {
            let mut v = 0;
            let mut x = a;
            while x.is_multiple_of(p) {
                x /= p;
                v += 1;
            }
            by_val[v] += 1;
        }
    }
    let one = CubeRootRational::from_int(p, 1);
    let t = CubeRootRational::t(p);
    // Σ_{a≢0} p^{1−m} p^{2v/3} / (p − 1)
    let mut nonzero = CubeRootRational::zero(p);
    for (v, &n) in by_val.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let w = CubeRootRational::p_pow_third(p, 3 * (m as i64 - 1) - 2 * v as i64);
        nonzero = &nonzero + &w.scale(&ratio(n, p - 1));
    }
    let zero_part = CubeRootRational::p_pow_third(p, m as i64).scale(&ratio(zero_a, 1));
    let inner = &(&(&one - &t) * &nonzero) + &zero_part;
    &inner * &CubeRootRational::p_pow_third(p, 9 * m as i64)
}

const MU2_ORBIT_LIMIT: u64 = 32;

/// Second-order local density of the ring `R(f) ⊗ ℤ_p`, computed from the
/// GL₂(ℤ/p^mℤ)-orbit of `f`.
pub fn mu2_local(f: &BinaryCubicForm, p: u64, m: u32) -> Result<CubeRootRational> {
    if m == 0 {
        return domain("m must be positive");
    }
    let disc = f.discriminant()?;
    if disc == 0 {
        return domain(format!("{f} has zero discriminant"));
    }
    let q = p
        .checked_pow(m)
        .filter(|&q| q <= MU2_ORBIT_LIMIT)
        .ok_or_else(|| Error::Resource(format!("orbit enumeration mod {p}^{m} exceeds {MU2_ORBIT_LIMIT}")))?;
    let mut disc_p = 1u128;
    let mut rest = disc.unsigned_abs();
    while rest % p as u128 == 0 {
        rest /= p as u128;
        disc_p *= p as u128;
    }
    if q as u128 <= disc_p {
        return domain(format!("{p}^{m} does not exceed the {p}-part {disc_p} of the discriminant"));
    }
    Ok(mu2_of_residues(&orbit_mod(f, q), p, m))
}
