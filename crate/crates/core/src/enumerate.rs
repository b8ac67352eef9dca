//! Complete enumeration of irreducible classes by discriminant.
//!
//! The loops walk exactly the canonical representatives produced by
//! [`crate::reduce`]: for `Disc > 0` forms with Gauss-reduced Hessian that are
//! lexicographically least in their stabilizer orbit, for `Disc < 0` forms
//! whose complex root lies in the open reduced region. Bounds come from the
//! syzygy `4H³ = G² + 27·Disc·f²` evaluated at `(1, 0)` and from
//! `|Disc| = 4a⁴v²((θ − u)² + v²)²` on the negative side.
//!
//! Internally ranges are inclusive on `|Disc|`; the public entry points use
//! strict bounds `0 < ±Disc < X`.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{isqrt_u64, Factorizer};
use crate::error::{domain, Error, Result};
use crate::forms::{BinaryCubicForm, HessianForm, Signature};
use crate::local::{count_p1_roots, local_flags, maximal_at_raw, LocalCondition, LocalMode};
use crate::reduce::hessian_stabilizer;

/// A canonical class representative produced by the enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub form: BinaryCubicForm,
    pub disc: i128,
    pub aut: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassRecord {
    pub form: BinaryCubicForm,
    pub disc: i128,
    pub signature: Signature,
    pub content: u64,
    pub aut: u32,
    pub maximal: bool,
    pub ntr: bool,
}

impl ClassRecord {
    pub(crate) fn sort_key(&self) -> (u128, [i64; 4]) {
        (self.disc.unsigned_abs(), self.form.coeffs())
    }
}

/// Which classes to keep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFilter {
    /// Maximal orders only.
    pub maximal: bool,
    /// Maximal and nowhere totally ramified.
    pub ntr: bool,
    pub local: Vec<LocalCondition>,
}

impl ClassFilter {
    pub fn orders() -> Self {
        ClassFilter::default()
    }

    pub fn fields() -> Self {
        ClassFilter { maximal: true, ..Default::default() }
    }

    pub fn nowhere_tot_ram() -> Self {
        ClassFilter { maximal: true, ntr: true, ..Default::default() }
    }

    pub fn with_local(mut self, c: LocalCondition) -> Self {
        self.local.push(c);
        self
    }

    fn needs_flags(&self) -> bool {
        self.maximal || self.ntr
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.ntr {
            parts.push("nowhere_tot_ram".to_string());
        } else if self.maximal {
            parts.push("maximal".to_string());
        }
        for c in &self.local {
            let mode = match &c.mode {
                LocalMode::AnyRing => "any".to_string(),
                LocalMode::MaximalAny => "maximal".to_string(),
                LocalMode::MaximalNotTotRam => "ntr".to_string(),
                LocalMode::SplittingIn(s) => {
                    let labels: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                    format!("split[{}]", labels.join("|"))
                }
                LocalMode::ExplicitResidues { modulus, residues } => {
                    format!("residues[mod {modulus}, {} classes]", residues.len())
                }
            };
            parts.push(format!("p{}:{mode}", c.p));
        }
        if parts.is_empty() {
            "all".to_string()
        } else {
            parts.join(",")
        }
    }

    /// Parse a comma-separated list such as `maximal`, `ntr`,
    /// `p3:maximal`, `p2:split=111|12`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut f = ClassFilter::default();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "all" | "orders" | "forms" => {}
                "maximal" | "fields" => f.maximal = true,
                "ntr" | "nowhere_tot_ram" => {
                    f.maximal = true;
                    f.ntr = true;
                }
                _ => {
                    let (p, mode) = tok
                        .strip_prefix('p')
                        .and_then(|r| r.split_once(':'))
                        .ok_or_else(|| Error::Parse(format!("bad filter token {tok:?}")))?;
                    let p: u64 = p.parse().map_err(|_| Error::Parse(format!("bad prime in {tok:?}")))?;
                    if !crate::arith::is_prime(p) {
                        return Err(Error::Parse(format!("{p} is not prime")));
                    }
                    let mode = match mode {
                        "any" => LocalMode::AnyRing,
                        "maximal" => LocalMode::MaximalAny,
                        "ntr" => LocalMode::MaximalNotTotRam,
                        m => {
                            let list = m
                                .strip_prefix("split=")
                                .ok_or_else(|| Error::Parse(format!("bad local mode {m:?}")))?;
                            LocalMode::SplittingIn(list.split('|').map(|x| x.parse()).collect::<Result<Vec<_>>>()?)
                        }
                    };
                    f.local.push(LocalCondition::new(p, mode));
                }
            }
        }
        Ok(f)
    }

    pub fn accepts(&self, c: &Candidate, fz: &Factorizer) -> Result<Option<ClassRecord>> {
        let record = classify(c, fz, self.needs_flags())?;
        if self.maximal && !record.maximal {
            return Ok(None);
        }
        if self.ntr && !record.ntr {
            return Ok(None);
        }
        if !self.local.iter().all(|l| l.accepts(&c.form)) {
            return Ok(None);
        }
        Ok(Some(record))
    }
}

/// Attach invariants to a candidate. Without `flags` the maximal/ntr fields
/// are left false.
pub fn classify(c: &Candidate, fz: &Factorizer, flags: bool) -> Result<ClassRecord> {
    let (maximal, ntr) = if flags { local_flags(&c.form, c.disc, fz)? } else { (false, false) };
    Ok(ClassRecord {
        form: c.form,
        disc: c.disc,
        signature: Signature::of_disc(c.disc).expect("nonzero discriminant"),
        content: c.form.content(),
        aut: c.aut,
        maximal,
        ntr,
    })
}

/// Largest `|Disc|` with `|Disc| < x`.
pub fn strict_max(x: f64) -> u64 {
    if x <= 1.0 || !x.is_finite() {
        return 0;
    }
    (x.ceil() as u64) - 1
}

/// Largest `|Disc|` with `|Disc|·den < x`, for integers `x ≥ 0`, `den ≥ 1`.
pub fn strict_max_ratio(x: u64, den: u64) -> u64 {
    if x == 0 {
        0
    } else {
        (x - 1) / den
    }
}

/// True iff `f` (with `a ≠ 0`) has a rational root. Uses numerical roots and
/// checks exact candidates `x/y` with `y | a`.
pub fn has_rational_root(f: &BinaryCubicForm, divisors_of_a: &[i64]) -> Result<bool> {
    if f.d == 0 || f.a == 0 {
        return Ok(true);
    }
    let roots = f.real_roots();
    if roots.iter().any(|r| !r.is_finite()) || roots.is_empty() {
        return Ok(!f.is_irreducible()?);
    }
    for &theta in &roots {
        for &y in divisors_of_a {
            let x0 = (theta * y as f64).round();
            if !x0.is_finite() || x0.abs() > 1e30 {
                continue;
            }
            let x0 = x0 as i128;
            for x in [x0 - 1, x0, x0 + 1] {
                if f.eval(x, y as i128)? == 0 {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

fn divisors_i64(n: i64) -> Vec<i64> {
    (1..=n).filter(|k| n % k == 0).collect()
}

/// Leading-coefficient bound: `729a⁴ ≤ 16M` (positive) or `27a⁴ ≤ 16M`.
pub fn max_leading(sig: Signature, max_abs: u64) -> i64 {
    let k: u128 = match sig {
        Signature::PositiveDisc => 729,
        Signature::NegativeDisc => 27,
    };
    let mut a = 0i64;
    while k * ((a + 1) as u128).pow(4) <= 16 * max_abs as u128 {
        a += 1;
    }
    a
}

/// Work units `(a, b)` covering all canonical forms with `|Disc| ≤ max_abs`.
pub fn partitions(sig: Signature, max_abs: u64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in 1..=max_leading(sig, max_abs) {
        let (lo, hi) = b_range(sig, a, max_abs);
        for b in lo..=hi {
            out.push((a, b));
        }
    }
    out
}

fn b_range(sig: Signature, a: i64, max_abs: u64) -> (i64, i64) {
    match sig {
        Signature::PositiveDisc => {
            // |b − 3aQ/(2P)| ≤ √P with 0 ≤ Q ≤ P ≤ √M
            let root_p = (isqrt_u64(max_abs) as f64).sqrt();
            (-(root_p.ceil() as i64) - 1, (root_p + 1.5 * a as f64).ceil() as i64 + 1)
        }
        Signature::NegativeDisc => {
            // b = −a(θ + 2u), |θ − u| ≤ (M/3)^{1/4}/a, 0 < u < 1/2
            let t = (max_abs as f64 / 3.0).powf(0.25);
            (-((t + 1.5 * a as f64).ceil() as i64) - 1, t.ceil() as i64 + 1)
        }
    }
}

fn visit_positive_ab(
    a: i64,
    b: i64,
    min_abs: u64,
    max_abs: u64,
    divs: &[i64],
    visit: &mut dyn FnMut(Candidate) -> Result<()>,
) -> Result<()> {
    let sqrt_m = isqrt_u64(max_abs) as i128;
    let (a1, b1) = (a as i128, b as i128);
    // P ≥ 27a²/4
    let p_min = (27 * a1 * a1 + 3) / 4;
    if p_min > sqrt_m {
        return Ok(());
    }
    let bb = b1 * b1;
    // P = b² − 3ac ∈ [p_min, √M]
    let c_lo = (bb - sqrt_m).div_euclid(3 * a1) - 1;
    let c_hi = (bb - p_min).div_euclid(3 * a1) + 1;
    for c in c_lo..=c_hi {
        let p = bb - 3 * a1 * c;
        if p < p_min || p > sqrt_m {
            continue;
        }
        // |2bP − 3aQ| ≤ 2P^{3/2} forces b ≤ √P + 3a/2 and b ≥ −√P
        let bound = (p as f64).sqrt() + 1e-9;
        if (b as f64) < -bound - 1.0 || (b as f64) > bound + 1.5 * a as f64 + 1.0 {
            continue;
        }
        let bc = b1 * c;
        // Q = bc − 9ad ∈ [0, P]
        let d_lo = (bc - p).div_euclid(9 * a1) - 1;
        let d_hi = bc.div_euclid(9 * a1) + 1;
        for d in d_lo..=d_hi {
            let q = bc - 9 * a1 * d;
            if q < 0 || q > p {
                continue;
            }
            let r = c * c - 3 * b1 * d;
            if r < p {
                continue;
            }
            let three_disc = 4 * p * r - q * q;
            let disc = three_disc / 3;
            if disc < min_abs as i128 || disc > max_abs as i128 {
                continue;
            }
            let form = BinaryCubicForm::new(a, b, c as i64, d as i64);
            let h = HessianForm { p, q, r };
            let boundary = q == 0 || q == p || p == r;
            let mut aut = 1;
            if boundary {
                let stab = hessian_stabilizer(&h);
                let mut canonical = true;
                let mut fixed = 0;
                for g in &stab {
                    let img = form.act(g)?;
                    if img == form {
                        fixed += 1;
                    } else if img.a > 0 && img < form {
                        canonical = false;
                        break;
                    }
                }
                if !canonical {
                    continue;
                }
                aut = fixed;
            }
            if has_rational_root(&form, divs)? {
                continue;
            }
            debug_assert_eq!(form.discriminant()?, disc);
            visit(Candidate { form, disc, aut })?;
        }
    }
    Ok(())
}

/// Real roots of `αd² + βd + γ = target`, ascending.
fn quad_roots(alpha: f64, beta: f64, gamma: f64) -> Option<(f64, f64)> {
    let disc = beta * beta - 4.0 * alpha * gamma;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let r1 = (-beta - s) / (2.0 * alpha);
    let r2 = (-beta + s) / (2.0 * alpha);
    Some((r1.min(r2), r1.max(r2)))
}

fn visit_negative_ab(
    a: i64,
    b: i64,
    min_abs: u64,
    max_abs: u64,
    divs: &[i64],
    visit: &mut dyn FnMut(Candidate) -> Result<()>,
) -> Result<()> {
    let (a1, b1) = (a as i128, b as i128);
    let af = a as f64;
    let m = max_abs as f64;
    // v⁶ ≤ M/(4a⁴); c/a = −2ub/a − 3u² + v² with 0 < u < 1/2, v² > 3/4
    let v2 = (m / (4.0 * af.powi(4))).powf(1.0 / 3.0);
    let c_lo = (-(b.unsigned_abs() as f64)).floor() as i64 - 1;
    let c_hi = (b.unsigned_abs() as f64 + af * v2).ceil() as i64 + 1;
    for c in c_lo..=c_hi {
        let c1 = c as i128;
        let bc = b1 * c1;
        // 0 < u < 1/2: bc < ad < bc + (a+b)² + ac
        let upper = bc + (a1 + b1) * (a1 + b1) + a1 * c1;
        if upper <= bc {
            continue;
        }
        let d_min = bc.div_euclid(a1) + 1;
        let d_max = (upper - 1).div_euclid(a1);
        if d_min > d_max {
            continue;
        }
        // Disc(d) = −27a²d² + (18abc − 4b³)d + (b²c² − 4ac³) ∈ [−M, −min]
        let alpha = -27.0 * af * af;
        let beta = (18 * a1 * b1 * c1 - 4 * b1 * b1 * b1) as f64;
        let gamma = (b1 * b1 * c1 * c1 - 4 * a1 * c1 * c1 * c1) as f64;
        let Some((s1, s2)) = quad_roots(alpha, beta, gamma + m) else {
            continue;
        };
        let inner = quad_roots(alpha, beta, gamma + min_abs as f64);
        let mut ranges: Vec<(i128, i128)> = Vec::with_capacity(2);
        let clamp = |lo: f64, hi: f64| -> (i128, i128) {
            let lo = (lo.floor() as i128 - 1).max(d_min);
            let hi = (hi.ceil() as i128 + 1).min(d_max);
            (lo, hi)
        };
        match inner {
            Some((r1, r2)) => {
                ranges.push(clamp(s1, r1));
                let second = clamp(r2, s2);
                if second.0 > ranges[0].1 {
                    ranges.push(second);
                } else {
                    ranges[0].1 = ranges[0].1.max(second.1);
                }
            }
            None => ranges.push(clamp(s1, s2)),
        }
        for (lo, hi) in ranges {
            for d in lo..=hi {
                let disc = -27 * a1 * a1 * d * d + (18 * a1 * b1 * c1 - 4 * b1 * b1 * b1) * d + b1 * b1 * c1 * c1
                    - 4 * a1 * c1 * c1 * c1;
                let abs = -disc;
                if abs < min_abs as i128 || abs > max_abs as i128 {
                    continue;
                }
                // |φ|² > 1
                if d * d - a1 * a1 + a1 * c1 - b1 * d <= 0 {
                    continue;
                }
                let form = BinaryCubicForm::new(a, b, c, d as i64);
                if has_rational_root(&form, divs)? {
                    continue;
                }
                visit(Candidate { form, disc, aut: 1 })?;
            }
        }
    }
    Ok(())
}

/// Visit every canonical irreducible form of the given signature in one
/// `(a, b)` work unit with `min_abs ≤ |Disc| ≤ max_abs`.
pub fn visit_partition(
    sig: Signature,
    (a, b): (i64, i64),
    min_abs: u64,
    max_abs: u64,
    visit: &mut dyn FnMut(Candidate) -> Result<()>,
) -> Result<()> {
    let divs = divisors_i64(a);
    let min_abs = min_abs.max(1);
    if min_abs > max_abs {
        return Ok(());
    }
    match sig {
        Signature::PositiveDisc => visit_positive_ab(a, b, min_abs, max_abs, &divs, visit),
        Signature::NegativeDisc => visit_negative_ab(a, b, min_abs, max_abs, &divs, visit),
    }
}

/// Serial visit over all work units.
pub fn visit_all(
    sig: Signature,
    min_abs: u64,
    max_abs: u64,
    visit: &mut dyn FnMut(Candidate) -> Result<()>,
) -> Result<()> {
    for unit in partitions(sig, max_abs) {
        visit_partition(sig, unit, min_abs, max_abs, visit)?;
    }
    Ok(())
}

/// Parallel fold over work units with an associative merge. The result does
/// not depend on how rayon splits the work.
pub fn fold_classes<T, F, M>(sig: Signature, min_abs: u64, max_abs: u64, init: T, step: F, merge: M) -> Result<T>
where
    T: Clone + Send + Sync,
    F: Fn(&mut T, Candidate) -> Result<()> + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let units = partitions(sig, max_abs);
    let parts: Result<Vec<T>> = units
        .par_iter()
        .map(|&unit| {
            let mut acc = init.clone();
            visit_partition(sig, unit, min_abs, max_abs, &mut |c| step(&mut acc, c))?;
            Ok(acc)
        })
        .collect();
    Ok(parts?.into_iter().fold(init, merge))
}

/// Sorted, duplicate-free inventory of classes in a discriminant range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassInventory {
    /// Exclusive lower bound on `Disc`.
    pub disc_lo: i128,
    /// Exclusive upper bound on `Disc`.
    pub disc_hi: i128,
    pub filter: String,
    pub records: Vec<ClassRecord>,
}

impl ClassInventory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// `|Disc|` ranges `[min, max]` for each signature inside `lo < Disc < hi`.
pub fn abs_ranges(disc_lo: i128, disc_hi: i128) -> Vec<(Signature, u64, u64)> {
    let mut out = Vec::new();
    let to_u64 = |x: i128| u64::try_from(x.max(0)).unwrap_or(u64::MAX);
    // negative part: lo < D < min(hi, 0)
    let neg_hi = disc_hi.min(0);
    if disc_lo < neg_hi - 1 {
        out.push((Signature::NegativeDisc, to_u64(-neg_hi + 1).max(1), to_u64(-disc_lo - 1)));
    }
    let pos_lo = disc_lo.max(0);
    if pos_lo + 1 < disc_hi {
        out.push((Signature::PositiveDisc, to_u64(pos_lo + 1).max(1), to_u64(disc_hi - 1)));
    }
    out
}

const DISC_WIDTH_LIMIT: u64 = 1 << 40;

pub fn classes(disc_lo: i128, disc_hi: i128, filter: &ClassFilter) -> Result<ClassInventory> {
    classes_with(disc_lo, disc_hi, filter, None)
}

/// [`classes`] with an optional shared factorizer.
pub fn classes_with(
    disc_lo: i128,
    disc_hi: i128,
    filter: &ClassFilter,
    fz: Option<&Factorizer>,
) -> Result<ClassInventory> {
    let ranges = abs_ranges(disc_lo, disc_hi);
    let widest = ranges.iter().map(|r| r.2).max().unwrap_or(0);
    if widest > DISC_WIDTH_LIMIT {
        return Err(Error::Overflow("discriminant range exceeds enumeration width"));
    }
    let owned;
    let fz = match fz {
        Some(f) => f,
        None => {
            owned = Factorizer::with_table(widest.min(1 << 26));
            &owned
        }
    };
    let mut records = Vec::new();
    for (sig, lo, hi) in ranges {
        let part = fold_classes(
            sig,
            lo,
            hi,
            Vec::new(),
            |acc: &mut Vec<ClassRecord>, c| {
                let rec = classify(&c, fz, true)?;
                if (filter.maximal && !rec.maximal)
                    || (filter.ntr && !rec.ntr)
                    || !filter.local.iter().all(|l| l.accepts(&c.form))
                {
                    return Ok(());
                }
                acc.push(rec);
                Ok(())
            },
            |mut x, y| {
                x.extend(y);
                x
            },
        )?;
        records.extend(part);
    }
    records.sort_by_key(|r| r.sort_key());
    Ok(ClassInventory { disc_lo, disc_hi, filter: filter.describe(), records })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountMode {
    Orders,
    Fields,
    NowhereTotRam,
}

impl CountMode {
    pub fn filter(self) -> ClassFilter {
        match self {
            CountMode::Orders => ClassFilter::orders(),
            CountMode::Fields => ClassFilter::fields(),
            CountMode::NowhereTotRam => ClassFilter::nowhere_tot_ram(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub x: String,
    pub signature: Signature,
    pub filter: String,
    /// Number of classes.
    pub raw: u64,
    /// Classes with three automorphisms.
    pub c3: u64,
    /// Classes weighted by `1/|Aut|`.
    pub weighted: Rational64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    raw: u64,
    c3: u64,
}

fn tally_merge(x: Tally, y: Tally) -> Tally {
    Tally { raw: x.raw + y.raw, c3: x.c3 + y.c3 }
}

/// Counts of classes with `min_abs ≤ |Disc| ≤ max_abs`.
pub fn count_abs(
    sig: Signature,
    min_abs: u64,
    max_abs: u64,
    filter: &ClassFilter,
    fz: &Factorizer,
) -> Result<(u64, u64)> {
    let t = fold_classes(
        sig,
        min_abs,
        max_abs,
        Tally::default(),
        |acc: &mut Tally, c| {
            if (filter.needs_flags() || !filter.local.is_empty()) && filter.accepts(&c, fz)?.is_none() {
                return Ok(());
            }
            acc.raw += 1;
            if c.aut == 3 {
                acc.c3 += 1;
            }
            Ok(())
        },
        tally_merge,
    )?;
    Ok((t.raw, t.c3))
}

fn report(x: String, sig: Signature, filter: &ClassFilter, raw: u64, c3: u64) -> CountReport {
    let weighted = Rational64::new((3 * raw - 2 * c3) as i64, 3);
    CountReport { x, signature: sig, filter: filter.describe(), raw, c3, weighted }
}

/// Classes with `0 < ±Disc < x`.
pub fn count(x: f64, sig: Signature, mode: CountMode) -> Result<CountReport> {
    let filter = mode.filter();
    count_filtered(x, sig, &filter, None)
}

pub fn count_filtered(x: f64, sig: Signature, filter: &ClassFilter, fz: Option<&Factorizer>) -> Result<CountReport> {
    if x.is_nan() || x < 0.0 {
        return domain(format!("bound {x} must be nonnegative"));
    }
    let max_abs = strict_max(x);
    if max_abs > DISC_WIDTH_LIMIT {
        return Err(Error::Overflow("discriminant bound exceeds enumeration width"));
    }
    let owned;
    let fz = match fz {
        Some(f) => f,
        None => {
            owned = if filter.needs_flags() { Factorizer::with_table(max_abs.min(1 << 26)) } else { Factorizer::new() };
            &owned
        }
    };
    let (raw, c3) = if max_abs == 0 { (0, 0) } else { count_abs(sig, 1, max_abs, filter, fz)? };
    Ok(report(format!("{x}"), sig, filter, raw, c3))
}

/// `w_n(f)`: the number of roots of `f` in ℙ¹(ℤ/nℤ) for squarefree `n`.
pub fn root_count_w(f: &BinaryCubicForm, n: u64) -> Result<u64> {
    if n < 2 {
        return domain("n must exceed 1");
    }
    let mut w = 1u64;
    for (p, e) in crate::arith::factor_u128(n as u128)? {
        if e > 1 {
            return domain(format!("{n} is not squarefree"));
        }
        let p = p as u64;
        if f.content().is_multiple_of(p) {
            return domain(format!("{f} vanishes mod {p}"));
        }
        w *= count_p1_roots(f, p)? as u64;
    }
    Ok(w)
}

/// `w_p` extended to forms vanishing mod `p`, where every point of ℙ¹(𝔽_p)
/// is a root.
fn w_p_total(f: &BinaryCubicForm, p: u64) -> u64 {
    if f.content().is_multiple_of(p) {
        p + 1
    } else {
        count_p1_roots(f, p).expect("nonzero mod p") as u64
    }
}

fn w_n_total(f: &BinaryCubicForm, primes: &[u64]) -> u64 {
    primes.iter().map(|&p| w_p_total(f, p)).product()
}

/// Root-weighted class count `Σ w_n(f)` and its automorphism-weighted
/// version `Σ w_n(f)/|Aut f|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedCount {
    pub raw: u64,
    pub mass: Rational64,
}

fn squarefree_primes(n: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return domain("n must exceed 1");
    }
    let f = crate::arith::factor_u128(n as u128)?;
    if f.iter().any(|&(_, e)| e > 1) {
        return domain(format!("{n} is not squarefree"));
    }
    Ok(f.into_iter().map(|(p, _)| p as u64).collect())
}

fn weighted_abs(sig: Signature, primes: &[u64], max_abs: u64) -> Result<WeightedCount> {
    if max_abs == 0 {
        return Ok(WeightedCount { raw: 0, mass: Rational64::from_integer(0) });
    }
    let (raw, w3) = fold_classes(
        sig,
        1,
        max_abs,
        (0u64, 0u64),
        |acc: &mut (u64, u64), c| {
            let w = w_n_total(&c.form, primes);
            acc.0 += w;
            if c.aut == 3 {
                acc.1 += w;
            }
            Ok(())
        },
        |x, y| (x.0 + y.0, x.1 + y.1),
    )?;
    Ok(WeightedCount { raw, mass: Rational64::new((3 * raw - 2 * w3) as i64, 3) })
}

/// `S_n(X) = Σ w_n(f)` over irreducible classes with `0 < ±Disc < X`.
/// Forms vanishing mod `p | n` get weight `p + 1` at `p`.
pub fn weighted_count_s(n: u64, x: u64, sig: Signature) -> Result<WeightedCount> {
    let primes = squarefree_primes(n)?;
    weighted_abs(sig, &primes, strict_max_ratio(x, 1))
}

/// [`weighted_count_s`] over `0 < ±Disc ≤ X`.
pub fn weighted_count_s_inclusive(n: u64, x: u64, sig: Signature) -> Result<WeightedCount> {
    let primes = squarefree_primes(n)?;
    weighted_abs(sig, &primes, x)
}

/// Terms of the switching identity at one prime and signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchingReport {
    pub p: u64,
    pub x: u64,
    pub signature: Signature,
    /// `N(𝒲_p; X)`.
    pub non_maximal: u64,
    /// `S_p(X/p²)`.
    pub s_p2: u64,
    /// `S_p(X/p⁴)`.
    pub s_p4: u64,
    /// `N(V; X/p⁴)`.
    pub all_p4: u64,
    /// Residual with every class counted once.
    pub residual_raw: i64,
    /// Residual with every class weighted by `1/|Aut|`.
    pub residual_mass: Rational64,
}

/// Non-maximal-at-`p` class count and its `1/|Aut|` mass with
/// `min_abs ≤ |Disc| ≤ max_abs`.
pub fn non_maximal_abs(sig: Signature, p: u64, max_abs: u64) -> Result<(u64, u64)> {
    if max_abs == 0 {
        return Ok((0, 0));
    }
    let t = fold_classes(
        sig,
        1,
        max_abs,
        Tally::default(),
        |acc: &mut Tally, c| {
            if !maximal_at_raw(&c.form, p) {
                acc.raw += 1;
                if c.aut == 3 {
                    acc.c3 += 1;
                }
            }
            Ok(())
        },
        tally_merge,
    )?;
    Ok((t.raw, t.c3))
}

pub const SWITCHING_LIMIT: u64 = 1_000_000;

/// `N(𝒲_p; X) − [S_p(X/p²) − S_p(X/p⁴) + N(V; X/p⁴)]`, every term computed by
/// enumeration with strict bounds.
pub fn verify_switching(p: u64, x: u64, sig: Signature) -> Result<SwitchingReport> {
    if !crate::arith::is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if x > SWITCHING_LIMIT {
        return Err(Error::Resource(format!("switching check at X = {x} exceeds {SWITCHING_LIMIT}")));
    }
    let p2 = p * p;
    let p4 = p2 * p2;
    let (w_raw, w_c3) = non_maximal_abs(sig, p, strict_max_ratio(x, 1))?;
    let s2 = weighted_abs(sig, &[p], strict_max_ratio(x, p2))?;
    let s4 = weighted_abs(sig, &[p], strict_max_ratio(x, p4))?;
    let (v_raw, v_c3) = if strict_max_ratio(x, p4) == 0 {
        (0, 0)
    } else {
        count_abs(sig, 1, strict_max_ratio(x, p4), &ClassFilter::orders(), &Factorizer::new())?
    };
    let residual_raw = w_raw as i64 - (s2.raw as i64 - s4.raw as i64 + v_raw as i64);
    let mass = |raw: u64, c3: u64| Rational64::new((3 * raw - 2 * c3) as i64, 3);
    let residual_mass = mass(w_raw, w_c3) - (s2.mass - s4.mass + mass(v_raw, v_c3));
    Ok(SwitchingReport {
        p,
        x,
        signature: sig,
        non_maximal: w_raw,
        s_p2: s2.raw,
        s_p4: s4.raw,
        all_p4: v_raw,
        residual_raw,
        residual_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_fields() {
        let r = count(23.5, Signature::NegativeDisc, CountMode::Fields).unwrap();
        assert_eq!(r.raw, 1);
        let r = count(23.0, Signature::NegativeDisc, CountMode::Fields).unwrap();
        assert_eq!(r.raw, 0);
        let r = count(100.0, Signature::PositiveDisc, CountMode::Fields).unwrap();
        assert_eq!(r.raw, 2);
        assert_eq!(r.c3, 2);
        assert_eq!(r.weighted, Rational64::new(2, 3));
    }

    #[test]
    fn inventory_examples() {
        let inv = classes(-24, 0, &ClassFilter::fields()).unwrap();
        assert_eq!(inv.records.len(), 1);
        assert_eq!(inv.records[0].disc, -23);
        assert_eq!(crate::reduce::canonical_form(&BinaryCubicForm::new(1, 0, -1, -1)).unwrap(), inv.records[0].form);
        let inv = classes(0, 50, &ClassFilter::fields()).unwrap();
        assert_eq!(inv.records.len(), 1);
        assert_eq!(inv.records[0].disc, 49);
        assert_eq!(inv.records[0].aut, 3);
    }

    #[test]
    fn canonical_forms_are_fixed_points() {
        for sig in [Signature::PositiveDisc, Signature::NegativeDisc] {
            visit_all(sig, 1, 2000, &mut |c| {
                assert_eq!(crate::reduce::canonical_form(&c.form).unwrap(), c.form);
                assert_eq!(c.form.discriminant().unwrap(), c.disc);
                assert_eq!(crate::rings::automorphism_count(&c.form).unwrap(), c.aut);
                Ok(())
            })
            .unwrap();
        }
    }

    #[test]
    fn w_examples() {
        let f = BinaryCubicForm::new(1, 0, 1, 0);
        assert_eq!(root_count_w(&f, 2).unwrap(), 2);
        assert_eq!(root_count_w(&BinaryCubicForm::new(1, 0, 1, 1), 2).unwrap(), 0);
        assert_eq!(root_count_w(&f, 6).unwrap(), root_count_w(&f, 2).unwrap() * root_count_w(&f, 3).unwrap());
        assert!(root_count_w(&f, 4).is_err());
        assert!(root_count_w(&BinaryCubicForm::new(2, 2, 2, 2), 2).is_err());
    }

    #[test]
    fn range_splitting() {
        assert_eq!(abs_ranges(-24, 0), vec![(Signature::NegativeDisc, 1, 23)]);
        assert_eq!(abs_ranges(0, 50), vec![(Signature::PositiveDisc, 1, 49)]);
        assert_eq!(abs_ranges(-10, 10), vec![(Signature::NegativeDisc, 1, 9), (Signature::PositiveDisc, 1, 9)]);
        assert_eq!(abs_ranges(-100, -50), vec![(Signature::NegativeDisc, 51, 99)]);
    }

    #[test]
    fn filter_parsing() {
        let f = ClassFilter::parse("maximal,p2:split=111|12").unwrap();
        assert!(f.maximal && !f.ntr);
        assert_eq!(f.local.len(), 1);
        assert!(ClassFilter::parse("p4:maximal").is_err());
        assert!(ClassFilter::parse("bogus").is_err());
    }
}
