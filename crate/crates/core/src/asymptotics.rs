//! Asymptotic constants, Euler-product predictions and residual reports.

use std::f64::consts::PI;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cuberoot::CubeRootRational;
use crate::enumerate::{count_filtered, ClassFilter, CountMode};
use crate::error::{domain, Error, Result};
use crate::forms::Signature;
use crate::local::{mu1_sigma, mu2_of_residues, mu2_sigma, LocalCondition, LocalMode, SplittingSymbol};
use crate::special::{gamma, zeta, zeta_euler_maclaurin, zeta_reflection};

/// Largest bound accepted by [`residual_report`].
pub const REPORT_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    pub expression: String,
    pub value: f64,
}

fn constant(name: &str, expression: &str, value: f64) -> Constant {
    Constant { name: name.into(), expression: expression.into(), value }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantSet {
    /// Leading coefficient for forms, indexed by [`Signature::index`].
    pub forms_c1: [Constant; 2],
    pub forms_c2: [Constant; 2],
    pub r: Constant,
    /// Second coefficient for fields as stated in the field-count theorem.
    pub fields_c2_theorem: [Constant; 2],
    /// Forms coefficient pushed through the maximality sieve.
    pub fields_c2_composed: [Constant; 2],
    pub fields_c1: [Constant; 2],
}

fn sig_idx(sig: Signature) -> usize {
    sig.index()
}

pub fn constants() -> ConstantSet {
    let g13 = gamma(1.0 / 3.0).expect("finite");
    let g23 = gamma(2.0 / 3.0).expect("finite");
    let z23 = zeta(2.0 / 3.0).expect("finite");
    let z13 = zeta(1.0 / 3.0).expect("finite");
    let z53 = zeta(5.0 / 3.0).expect("finite");
    let z2 = zeta(2.0).expect("finite");
    let z3 = zeta(3.0).expect("finite");
    let r = z23 * g13 * (2.0 * PI).powf(1.0 / 3.0) / g23;
    let sqrt3 = 3f64.sqrt();
    let c2 = [sqrt3 * r / 15.0, r / 5.0];
    let printed = 4.0 * z13 / (5.0 * g23.powi(3) * z53);
    ConstantSet {
        forms_c1: [constant("c1_pos", "π²/72", PI * PI / 72.0), constant("c1_neg", "π²/24", PI * PI / 24.0)],
        forms_c2: [constant("c2_pos", "√3·r/15", c2[0]), constant("c2_neg", "r/5", c2[1])],
        r: constant("r", "ζ(2/3)Γ(1/3)(2π)^{1/3}/Γ(2/3)", r),
        fields_c2_theorem: [
            constant("C2_pos_theorem", "4ζ(1/3)/(5Γ(2/3)³ζ(5/3))", printed),
            constant("C2_neg_theorem", "√3·4ζ(1/3)/(5Γ(2/3)³ζ(5/3))", sqrt3 * printed),
        ],
        fields_c2_composed: [
            constant("C2_pos_composed", "c2_pos/(ζ(2)ζ(5/3))", c2[0] / (z2 * z53)),
            constant("C2_neg_composed", "c2_neg/(ζ(2)ζ(5/3))", c2[1] / (z2 * z53)),
        ],
        fields_c1: [
            constant("C1_pos", "1/(12ζ(3))", 1.0 / (12.0 * z3)),
            constant("C1_neg", "1/(4ζ(3))", 1.0 / (4.0 * z3)),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / |rhs|`.
    pub relative: f64,
}

impl IdentityResidual {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        IdentityResidual { name: name.into(), lhs, rhs, relative: ((lhs - rhs) / rhs).abs() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub residuals: Vec<IdentityResidual>,
    /// Composed over theorem second coefficient for fields, per signature.
    pub composed_over_theorem: [f64; 2],
}

impl IdentityReport {
    pub fn max_relative(&self) -> f64 {
        self.residuals.iter().map(|r| r.relative).fold(0.0, f64::max)
    }
}

pub fn verify_identities() -> Result<IdentityReport> {
    let g16 = gamma(1.0 / 6.0)?;
    let g13 = gamma(1.0 / 3.0)?;
    let g23 = gamma(2.0 / 3.0)?;
    let z23 = zeta(2.0 / 3.0)?;
    let sqrt3 = 3f64.sqrt();
    let residuals = vec![
        IdentityResidual::new("Γ(1/2) = √π", gamma(0.5)?, PI.sqrt()),
        IdentityResidual::new("ζ(2) = π²/6", zeta(2.0)?, PI * PI / 6.0),
        IdentityResidual::new(
            "Γ(1/6) = 2^{5/3}3^{-1/2}π^{3/2}/Γ(2/3)²",
            g16,
            2f64.powf(5.0 / 3.0) / sqrt3 * PI.powf(1.5) / (g23 * g23),
        ),
        IdentityResidual::new("Γ(2/3) = 3^{-1/2}2π/Γ(1/3)", g23, 2.0 * PI / (sqrt3 * g13)),
        IdentityResidual::new(
            "ζ(1/3) = (2π)^{-2/3}Γ(2/3)ζ(2/3), Euler–Maclaurin",
            zeta_euler_maclaurin(1.0 / 3.0)?,
            (2.0 * PI).powf(-2.0 / 3.0) * g23 * z23,
        ),
        IdentityResidual::new(
            "ζ(1/3) = (2π)^{-2/3}Γ(2/3)ζ(2/3), reflection",
            zeta_reflection(1.0 / 3.0)?,
            (2.0 * PI).powf(-2.0 / 3.0) * g23 * z23,
        ),
        IdentityResidual::new("ζ(2/3), two routes", zeta_reflection(2.0 / 3.0)?, z23),
    ];
    let k = constants();
    let ratio = |i: usize| k.fields_c2_composed[i].value / k.fields_c2_theorem[i].value;
    Ok(IdentityReport { residuals, composed_over_theorem: [ratio(0), ratio(1)] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountKind {
    Forms,
    Fields,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalization {
    /// Coefficients as stated in the counting theorems.
    Theorem,
    /// Forms coefficients pushed through the sieve to maximal orders.
    Composed,
}

impl Normalization {
    pub const BOTH: [Normalization; 2] = [Normalization::Theorem, Normalization::Composed];

    pub fn label(self) -> &'static str {
        match self {
            Normalization::Theorem => "theorem",
            Normalization::Composed => "composed",
        }
    }
}

/// `(C₁, C₂)` for a count. For forms both normalizations give the same pair.
pub fn coefficients(kind: CountKind, sig: Signature, norm: Normalization) -> (f64, f64) {
    let k = constants();
    let i = sig_idx(sig);
    match kind {
        CountKind::Forms => (k.forms_c1[i].value, k.forms_c2[i].value),
        CountKind::Fields => {
            let c2 = match norm {
                Normalization::Theorem => &k.fields_c2_theorem[i],
                Normalization::Composed => &k.fields_c2_composed[i],
            };
            (k.fields_c1[i].value, c2.value)
        }
    }
}

/// `C₁X` or `C₁X + C₂X^{5/6}`.
pub fn predict(x: f64, kind: CountKind, sig: Signature, terms: u8, norm: Normalization) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return domain(format!("X = {x} must be nonnegative"));
    }
    let (c1, c2) = coefficients(kind, sig, norm);
    match terms {
        1 => Ok(c1 * x),
        2 => Ok(c1 * x + c2 * x.powf(5.0 / 6.0)),
        _ => domain(format!("terms must be 1 or 2, got {terms}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorOrder {
    First,
    Second,
}

fn rational(p: u64, q: BigRational) -> CubeRootRational {
    CubeRootRational::from_rational(p, q)
}

fn one_minus_inv_p2(p: u64) -> BigRational {
    BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(p) * BigInt::from(p))
}

fn symbols_for(mode: &LocalMode) -> Option<Vec<SplittingSymbol>> {
    match mode {
        LocalMode::MaximalAny => Some(SplittingSymbol::NONDEGENERATE.to_vec()),
        LocalMode::MaximalNotTotRam => {
            Some(SplittingSymbol::NONDEGENERATE.iter().copied().filter(|&s| s != SplittingSymbol::S1cube).collect())
        }
        LocalMode::SplittingIn(s) => Some(s.clone()),
        _ => None,
    }
}

/// Exponent `m` with `modulus = p^m`.
fn prime_power_exponent(modulus: u64, p: u64) -> Option<u32> {
    let mut m = 0;
    let mut q = 1u64;
    while q < modulus {
        q = q.checked_mul(p)?;
        m += 1;
    }
    (q == modulus && m > 0).then_some(m)
}

/// First-order density `μ₁` and second-order density `μ₂` of the set of
/// `ℤ_p`-forms described by a local condition. Splitting-type modes describe
/// maximal forms.
pub fn local_density(cond: &LocalCondition, order: FactorOrder) -> Result<CubeRootRational> {
    let p = cond.p;
    if !crate::arith::is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    match (&cond.mode, order) {
        (LocalMode::AnyRing, _) => Ok(CubeRootRational::from_int(p, 1)),
        (LocalMode::ExplicitResidues { modulus, residues }, ord) => {
            let m = prime_power_exponent(*modulus, p)
                .ok_or_else(|| Error::Capability(format!("residue modulus {modulus} is not a power of {p}")))?;
            match ord {
                FactorOrder::First => {
                    let q4 = BigInt::from(*modulus).pow(4);
                    Ok(rational(p, BigRational::new(BigInt::from(residues.len()), q4)))
                }
                FactorOrder::Second => Ok(mu2_of_residues(residues, p, m)),
            }
        }
        (mode, ord) => {
            let symbols = symbols_for(mode).ok_or_else(|| Error::Capability("unsupported local mode".into()))?;
            let per = |s: SplittingSymbol| match ord {
                FactorOrder::First => mu1_sigma(s, p),
                FactorOrder::Second => mu2_sigma(s, p),
            };
            Ok(symbols.into_iter().fold(CubeRootRational::zero(p), |acc, s| &acc + &per(s)))
        }
    }
}

/// Per-prime factor of the Euler product: `μ₁/(1 − p⁻²)` at first order
/// (the automorphism-weighted ring mass times `(p − 1)/p`), `μ₂` at second.
pub fn euler_local_factor(cond: &LocalCondition, order: FactorOrder) -> Result<CubeRootRational> {
    let mu = local_density(cond, order)?;
    match order {
        FactorOrder::First => {
            let inv = one_minus_inv_p2(cond.p);
            Ok(mu.scale(&(BigRational::one() / inv)))
        }
        FactorOrder::Second => Ok(mu),
    }
}

/// Prediction for fields (or forms) with finitely many local conditions,
/// replacing the generic factor at each listed prime by the local one.
pub fn predict_local(
    x: f64,
    kind: CountKind,
    sig: Signature,
    conditions: &[LocalCondition],
    terms: u8,
    norm: Normalization,
) -> Result<f64> {
    let base1 = predict(x, kind, sig, 1, norm)?;
    let base2 = if terms == 2 { predict(x, kind, sig, 2, norm)? - base1 } else { 0.0 };
    let (mut f1, mut f2) = (1.0, 1.0);
    for c in conditions {
        let pf = c.p as f64;
        match kind {
            CountKind::Fields => {
                if symbols_for(&c.mode).is_none() {
                    return Err(Error::Capability(format!("field prediction needs a maximal local mode at {}", c.p)));
                }
                f1 *= euler_local_factor(c, FactorOrder::First)?.to_f64() / (1.0 - pf.powi(-3));
                f2 *= euler_local_factor(c, FactorOrder::Second)?.to_f64()
                    / ((1.0 - pf.powi(-2)) * (1.0 - pf.powf(-5.0 / 3.0)));
            }
            CountKind::Forms => {
                f1 *= local_density(c, FactorOrder::First)?.to_f64();
                f2 *= local_density(c, FactorOrder::Second)?.to_f64();
            }
        }
    }
    Ok(base1 * f1 + base2 * f2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub x: f64,
    pub count: u64,
    pub weighted: f64,
    pub pred1: f64,
    pub pred2_theorem: f64,
    pub pred2_composed: f64,
    pub res1: f64,
    pub res2_theorem: f64,
    pub res2_composed: f64,
    /// Residuals over `X^{5/6}`: one term, theorem, composed.
    pub scaled_5_6: [f64; 3],
    /// Residuals over `X^{3/4}`: one term, theorem, composed.
    pub scaled_3_4: [f64; 3],
}

impl ResidualRow {
    fn from_count(x: f64, count: u64, weighted: f64, kind: CountKind, sig: Signature) -> Result<Self> {
        let pred1 = predict(x, kind, sig, 1, Normalization::Theorem)?;
        let pred2_theorem = predict(x, kind, sig, 2, Normalization::Theorem)?;
        let pred2_composed = predict(x, kind, sig, 2, Normalization::Composed)?;
        let n = count as f64;
        let res = [n - pred1, n - pred2_theorem, n - pred2_composed];
        let scale = |e: f64| if x > 0.0 { res.map(|r| r / x.powf(e)) } else { [0.0; 3] };
        Ok(ResidualRow {
            x,
            count,
            weighted,
            pred1,
            pred2_theorem,
            pred2_composed,
            res1: res[0],
            res2_theorem: res[1],
            res2_composed: res[2],
            scaled_5_6: scale(5.0 / 6.0),
            scaled_3_4: scale(0.75),
        })
    }

    pub fn residual(&self, norm: Normalization) -> f64 {
        match norm {
            Normalization::Theorem => self.res2_theorem,
            Normalization::Composed => self.res2_composed,
        }
    }

    pub fn prediction(&self, norm: Normalization) -> f64 {
        match norm {
            Normalization::Theorem => self.pred2_theorem,
            Normalization::Composed => self.pred2_composed,
        }
    }

    /// The unique normalization whose two-term residual is at most a fifth
    /// of the one-term residual, if exactly one qualifies.
    pub fn select_normalization(&self) -> Option<Normalization> {
        let wins: Vec<Normalization> =
            Normalization::BOTH.into_iter().filter(|&n| 5.0 * self.residual(n).abs() <= self.res1.abs()).collect();
        (wins.len() == 1).then(|| wins[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub kind: CountKind,
    pub signature: Signature,
    pub rows: Vec<ResidualRow>,
}

pub fn residual_report(xs: &[f64], kind: CountKind, sig: Signature) -> Result<ResidualReport> {
    let mode = match kind {
        CountKind::Forms => CountMode::Orders,
        CountKind::Fields => CountMode::Fields,
    };
    let filter: ClassFilter = mode.filter();
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        if !(0.0..=REPORT_LIMIT).contains(&x) {
            return Err(Error::Resource(format!("X = {x} is outside the enumeration budget")));
        }
        let c = count_filtered(x, sig, &filter, None)?;
        let weighted = *c.weighted.numer() as f64 / *c.weighted.denom() as f64;
        rows.push(ResidualRow::from_count(x, c.raw, weighted, kind, sig)?);
    }
    Ok(ResidualReport { kind, signature: sig, rows })
}

pub fn write_residual_csv<W: Write>(report: &ResidualReport, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "X,count,weighted,pred1,pred2_theorem,pred2_composed,res1,res2_theorem,res2_composed")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.x,
            r.count,
            r.weighted,
            r.pred1,
            r.pred2_theorem,
            r.pred2_composed,
            r.res1,
            r.res2_theorem,
            r.res2_composed
        )?;
    }
    Ok(())
}

/// `Π_{p ≤ bound} (1 − p^{−s})`.
pub fn truncated_euler_product(s: f64, bound: u64) -> f64 {
    crate::arith::primes_up_to(bound).into_iter().map(|p| 1.0 - (p as f64).powf(-s)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_constant_values() {
        let k = constants();
        assert!((k.forms_c2[0].value - -1.031_745_559_6).abs() < 1e-9);
        assert!((k.forms_c2[1].value - -1.787_035_729_8).abs() < 1e-9);
        assert!((k.fields_c2_theorem[0].value - -0.147_685_261_0).abs() < 1e-9);
        assert!((k.fields_c2_theorem[1].value - -0.255_798_375_6).abs() < 1e-9);
        assert!((k.fields_c1[0].value - 0.069_325_614_4).abs() < 1e-9);
        assert!((k.fields_c1[1].value - 0.207_976_843_1).abs() < 1e-9);
    }

    #[test]
    fn identities_hold() {
        let rep = verify_identities().unwrap();
        assert!(rep.max_relative() < 1e-12, "{rep:?}");
        for r in rep.composed_over_theorem {
            assert!((r - 2.0).abs() < 1e-10, "{r}");
        }
    }

    #[test]
    fn predictions() {
        let x = 1e6;
        let p = predict(x, CountKind::Forms, Signature::PositiveDisc, 1, Normalization::Theorem).unwrap();
        assert!((p - PI * PI / 72.0 * x).abs() < 1e-6);
        for sig in [Signature::PositiveDisc, Signature::NegativeDisc] {
            let one = predict(1.0, CountKind::Forms, sig, 1, Normalization::Theorem).unwrap();
            let n = sig.stabilizer_order() as f64;
            assert!((one - PI * PI / (12.0 * n)).abs() < 1e-15);
            assert_eq!(predict(0.0, CountKind::Fields, sig, 2, Normalization::Composed).unwrap(), 0.0);
        }
        let f = predict(x, CountKind::Fields, Signature::NegativeDisc, 1, Normalization::Theorem).unwrap();
        assert!((f - x / (4.0 * 1.202_056_903_159_594)).abs() < 1e-6);
        assert!(predict(x, CountKind::Fields, Signature::NegativeDisc, 3, Normalization::Theorem).is_err());
    }

    #[test]
    fn local_factors() {
        for p in [2u64, 3, 5, 7] {
            let pb = p as f64;
            let max = LocalCondition::new(p, LocalMode::MaximalAny);
            let any = LocalCondition::new(p, LocalMode::AnyRing);
            let f1 = euler_local_factor(&max, FactorOrder::First).unwrap();
            assert_eq!(f1, CubeRootRational::from_int(p, 1) - CubeRootRational::p_pow_third(p, 9));
            let a1 = euler_local_factor(&any, FactorOrder::First).unwrap().to_f64();
            assert!((a1 - 1.0 / (1.0 - pb.powi(-2))).abs() < 1e-14);
            let f2 = euler_local_factor(&max, FactorOrder::Second).unwrap();
            assert_eq!(f2, crate::local::mu2_expected(p));
        }
        let bad = LocalCondition::new(3, LocalMode::ExplicitResidues { modulus: 4, residues: vec![] });
        assert!(matches!(euler_local_factor(&bad, FactorOrder::First), Err(Error::Capability(_))));
    }

    #[test]
    fn explicit_residues_match_closed_forms() {
        let p = 2;
        let residues: Vec<[u64; 4]> = (0..16u64)
            .map(|i| [i & 1, (i >> 1) & 1, (i >> 2) & 1, (i >> 3) & 1])
            .filter(|r| {
                let f = crate::forms::BinaryCubicForm::new(r[0] as i64, r[1] as i64, r[2] as i64, r[3] as i64);
                crate::local::splitting_symbol(&f, p) == SplittingSymbol::S3
            })
            .collect();
        let cond = LocalCondition::new(p, LocalMode::ExplicitResidues { modulus: 2, residues });
        let d = local_density(&cond, FactorOrder::First).unwrap();
        assert_eq!(d, mu1_sigma(SplittingSymbol::S3, p));
        let d2 = local_density(&cond, FactorOrder::Second).unwrap();
        assert_eq!(d2, mu2_sigma(SplittingSymbol::S3, p));
    }

    #[test]
    fn euler_products_converge() {
        let z3 = zeta(3.0).unwrap();
        let z2 = zeta(2.0).unwrap();
        assert!((truncated_euler_product(3.0, 10_000) - 1.0 / z3).abs() < 1e-4);
        assert!((1.0 / truncated_euler_product(2.0, 10_000) - z2).abs() < 1e-4);
    }

    #[test]
    fn zero_row() {
        let rep = residual_report(&[0.0], CountKind::Fields, Signature::NegativeDisc).unwrap();
        let r = &rep.rows[0];
        assert_eq!((r.count, r.pred1, r.res1, r.res2_theorem), (0, 0.0, 0.0, 0.0));
        assert_eq!(r.scaled_5_6, [0.0; 3]);
    }
}
