//! Brute-force class counts for small discriminant bounds, independent of
//! the reduction theory: every irreducible form in a generous coefficient box
//! is generated, and classes are found by flood-filling orbits under the
//! generators `x ↦ x ± y`, `(x, y) ↦ (y, −x)`, `y ↦ −y`.
//!
//! The flood fill may leave the box by a bounded excursion so that box
//! members connected only through larger forms are still merged.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::forms::{BinaryCubicForm, Signature, UnimodularMatrix};

pub const ORACLE_LIMIT: u64 = 5000;

/// Coefficient box `0 < a ≤ A`, `|b| ≤ B`, `|c| ≤ C`, all `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientBox {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl CoefficientBox {
    /// Box containing every reduced representative with `|Disc| ≤ max_abs`,
    /// widened by half again.
    pub fn for_bound(max_abs: u64) -> Self {
        let m = max_abs as f64;
        let a = (16.0 * m / 27.0).powf(0.25).floor() + 1.0;
        let b = m.powf(0.25) + 1.5 * a + 2.0;
        let c = (b + (m / 4.0).powf(1.0 / 3.0)).max(m.sqrt() / 3.0).max(b * b / 3.0) + 2.0;
        let widen = |x: f64| (1.5 * x).ceil() as i64;
        CoefficientBox { a: a as i64 + 1, b: widen(b), c: widen(c) }
    }

    fn contains(&self, f: &BinaryCubicForm) -> bool {
        f.a > 0 && f.a <= self.a && f.b.abs() <= self.b && f.c.abs() <= self.c
    }

    fn scaled(&self, k: i64) -> Self {
        CoefficientBox { a: self.a * k, b: self.b * k, c: self.c * k }
    }
}

fn sign_normal(f: BinaryCubicForm) -> BinaryCubicForm {
    if f.a < 0 {
        f.neg()
    } else {
        f
    }
}

/// All `d` with `1 ≤ |Disc(a,b,c,d)| ≤ max_abs`.
fn d_values(a: i64, b: i64, c: i64, max_abs: u64) -> Vec<i64> {
    let (a1, b1, c1) = (a as f64, b as f64, c as f64);
    // Disc = αd² + βd + γ with α = −27a² < 0
    let alpha = -27.0 * a1 * a1;
    let beta = 18.0 * a1 * b1 * c1 - 4.0 * b1 * b1 * b1;
    let gamma = b1 * b1 * c1 * c1 - 4.0 * a1 * c1 * c1 * c1;
    let m = max_abs as f64;
    // |Disc| ≤ M forces Disc ≥ −M
    let disc = beta * beta - 4.0 * alpha * (gamma + m);
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let lo = ((-beta + s) / (2.0 * alpha)).min((-beta - s) / (2.0 * alpha));
    let hi = ((-beta + s) / (2.0 * alpha)).max((-beta - s) / (2.0 * alpha));
    let mut out = Vec::new();
    for d in (lo.floor() as i64 - 2)..=(hi.ceil() as i64 + 2) {
        let f = BinaryCubicForm::new(a, b, c, d);
        if let Ok(disc) = f.discriminant() {
            if disc != 0 && disc.unsigned_abs() <= max_abs as u128 {
                out.push(d);
            }
        }
    }
    out
}

fn generators() -> [UnimodularMatrix; 4] {
    [
        UnimodularMatrix::translation(1),
        UnimodularMatrix::translation(-1),
        UnimodularMatrix::inversion(),
        UnimodularMatrix::reflection(),
    ]
}

/// Per-signature class counts and the least box member of each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub positive: u64,
    pub negative: u64,
    pub representatives: Vec<BinaryCubicForm>,
}

impl OracleResult {
    pub fn count(&self, sig: Signature) -> u64 {
        match sig {
            Signature::PositiveDisc => self.positive,
            Signature::NegativeDisc => self.negative,
        }
    }
}

/// Brute-force classes of irreducible forms with `0 < |Disc| < x`.
pub fn brute_force_classes(x: u64) -> Result<OracleResult> {
    if x > ORACLE_LIMIT {
        return Err(Error::Resource(format!("oracle bound {x} exceeds {ORACLE_LIMIT}")));
    }
    brute_force_inclusive(x.saturating_sub(1))
}

/// [`brute_force_classes`] with the inclusive bound `|Disc| ≤ max_abs`.
pub fn brute_force_inclusive(max_abs: u64) -> Result<OracleResult> {
    if max_abs >= ORACLE_LIMIT {
        return Err(Error::Resource(format!("oracle bound {max_abs} exceeds {ORACLE_LIMIT}")));
    }
    if max_abs == 0 {
        return Ok(OracleResult { positive: 0, negative: 0, representatives: Vec::new() });
    }
    let bx = CoefficientBox::for_bound(max_abs);
    let outer = bx.scaled(3);
    let mut members: Vec<BinaryCubicForm> = Vec::new();
    for a in 1..=bx.a {
        for b in -bx.b..=bx.b {
            for c in -bx.c..=bx.c {
                for d in d_values(a, b, c, max_abs) {
                    let f = BinaryCubicForm::new(a, b, c, d);
                    if f.is_irreducible()? {
                        members.push(f);
                    }
                }
            }
        }
    }
    members.sort();
    let index: HashMap<BinaryCubicForm, usize> = members.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut claimed = vec![false; members.len()];
    let gens = generators();
    let (mut positive, mut negative) = (0, 0);
    let mut representatives = Vec::new();
    for start in 0..members.len() {
        if claimed[start] {
            continue;
        }
        let root = members[start];
        representatives.push(root);
        if root.discriminant()? > 0 {
            positive += 1;
        } else {
            negative += 1;
        }
        let mut seen: HashSet<BinaryCubicForm> = HashSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            if let Some(&i) = index.get(&f) {
                claimed[i] = true;
            }
            for g in &gens {
                let h = sign_normal(f.act(g)?);
                if h.a == 0 || !outer.contains(&h) || seen.contains(&h) {
                    continue;
                }
                seen.insert(h);
                queue.push_back(h);
            }
        }
    }
    Ok(OracleResult { positive, negative, representatives })
}
