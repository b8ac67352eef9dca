//! Subcommand implementations. Each returns a table plus any identity
//! violations found while producing it.

use std::path::PathBuf;

use num_rational::Rational64;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cubic_census::asymptotics::{
    constants, residual_report, verify_identities, CountKind, Normalization, REPORT_LIMIT,
};
use cubic_census::cache::{parse_range, resume, INVENTORY_HEADER};
use cubic_census::enumerate::{classes, count_filtered, verify_switching, ClassFilter, CountMode};
use cubic_census::local::{
    density_bruteforce, density_closed_form, mass_check, mu1_expected, mu1_total, mu2_expected, mu2_total, DensitySet,
};
use cubic_census::quadratic::{class_number_table, three_torsion_average, verify_l4eq};
use cubic_census::{CubeRootRational, Error, Signature};

use crate::config::{RunConfig, SigChoice, CACHE_ENV};
use crate::output::Table;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) | Error::Capability(_) => Failure::Usage(e.to_string()),
            Error::Overflow(_) | Error::Resource(_) | Error::Factorization(_) | Error::Io(_) => {
                Failure::Resource(e.to_string())
            }
        }
    }
}

pub struct Outcome {
    pub table: Table,
    pub range: String,
    pub violations: Vec<String>,
    /// Column delimiter for CSV rendering.
    pub delimiter: u8,
}

impl Outcome {
    fn new(table: Table, range: String) -> Self {
        Outcome { table, range, violations: Vec::new(), delimiter: b',' }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn sig_label(sig: Signature) -> &'static str {
    match sig {
        Signature::PositiveDisc => "positive",
        Signature::NegativeDisc => "negative",
    }
}

/// Integral bounds print without a fractional part.
fn bound(x: f64) -> Value {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        json!(x as i64)
    } else {
        json!(x)
    }
}

fn rational64(q: Rational64) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `a|b|c` for `a + b·p^{-1/3} + c·p^{-2/3}`.
fn compact(x: &CubeRootRational) -> String {
    x.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|")
}

fn required_x(flag: Option<f64>, cfg: &RunConfig) -> Result<f64, Failure> {
    flag.or(cfg.max_disc).ok_or_else(|| Failure::Usage("no bound given: pass --x or set max_disc".into()))
}

fn filter_from(flag: Option<&str>, cfg: &RunConfig) -> Result<ClassFilter, Failure> {
    Ok(ClassFilter::parse(flag.unwrap_or(&cfg.filter))?)
}

fn default_range(cfg: &RunConfig) -> Result<(i128, i128), Failure> {
    let x = cfg.max_disc.ok_or_else(|| Failure::Usage("no range given: pass --disc or set max_disc".into()))?;
    let x = x.ceil() as i128;
    Ok(match cfg.signature {
        SigChoice::Positive => (0, x),
        SigChoice::Negative => (-x, 0),
        SigChoice::Both => (-x, x),
    })
}

fn cache_dir(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    cfg.cache_dir
        .clone()
        .ok_or_else(|| Failure::Usage(format!("--resume needs a cache directory (cache_dir or ${CACHE_ENV})")))
}

pub fn enumerate(disc: Option<&str>, filter: Option<&str>, resumable: bool, cfg: &RunConfig) -> CmdResult {
    let (lo, hi) = match disc {
        Some(r) => parse_range(r)?,
        None => default_range(cfg)?,
    };
    let filter = filter_from(filter, cfg)?;
    let inv = if resumable {
        let dir = cache_dir(cfg)?;
        std::fs::create_dir_all(&dir).map_err(|e| Failure::Resource(e.to_string()))?;
        let key: String =
            Sha256::digest(filter.describe().as_bytes()).iter().take(6).map(|b| format!("{b:02x}")).collect();
        resume(&dir.join(format!("inventory-{key}.csv")), lo, hi, &filter)?.0
    } else {
        classes(lo, hi, &filter)?
    };
    let cols: Vec<&str> = INVENTORY_HEADER.split(',').collect();
    let mut t = Table::new(&cols);
    for r in &inv.records {
        let [a, b, c, d] = r.form.coeffs();
        t.push(vec![
            json!(a),
            json!(b),
            json!(c),
            json!(d),
            json!(r.disc as i64),
            json!(r.signature.label()),
            json!(r.content),
            json!(r.aut),
            json!(r.maximal as u8),
            json!(r.ntr as u8),
        ]);
    }
    Ok(Outcome::new(t, format!("{lo}..{hi} filter={}", inv.filter)))
}

pub fn count(x: Option<f64>, mode: Option<CountMode>, filter: Option<&str>, cfg: &RunConfig) -> CmdResult {
    let x = required_x(x, cfg)?;
    if x > REPORT_LIMIT {
        return Err(Failure::Resource(format!("X = {x} exceeds the enumeration budget {REPORT_LIMIT}")));
    }
    let filter = match mode {
        Some(m) => m.filter(),
        None => filter_from(filter, cfg)?,
    };
    let mut t = Table::new(&["X", "sig", "filter", "raw", "c3", "weighted"]);
    for sig in cfg.signature.signatures() {
        let r = count_filtered(x, sig, &filter, None)?;
        t.push(vec![
            bound(x),
            json!(sig_label(sig)),
            json!(r.filter),
            json!(r.raw),
            json!(r.c3),
            json!(rational64(r.weighted)),
        ]);
    }
    Ok(Outcome::new(t, format!("0<|Disc|<{x} filter={}", filter.describe())))
}

pub fn report(xs: &[f64], kind: CountKind, cfg: &RunConfig) -> CmdResult {
    let xs: Vec<f64> = if xs.is_empty() { vec![required_x(None, cfg)?] } else { xs.to_vec() };
    let mut t = Table::new(&[
        "X",
        "count",
        "weighted",
        "pred1",
        "pred2_theorem",
        "pred2_composed",
        "res1",
        "res2_theorem",
        "res2_composed",
        "sig",
        "res1_over_x56",
        "res2_theorem_over_x56",
        "res2_composed_over_x56",
        "res1_over_x34",
        "res2_theorem_over_x34",
        "res2_composed_over_x34",
        "selected",
    ]);
    for sig in cfg.signature.signatures() {
        let rep = residual_report(&xs, kind, sig)?;
        for r in &rep.rows {
            let selected = match kind {
                CountKind::Fields => r.select_normalization().map(Normalization::label).unwrap_or("none"),
                CountKind::Forms => "",
            };
            let mut row = vec![
                bound(r.x),
                json!(r.count),
                json!(r.weighted),
                json!(r.pred1),
                json!(r.pred2_theorem),
                json!(r.pred2_composed),
                json!(r.res1),
                json!(r.res2_theorem),
                json!(r.res2_composed),
                json!(sig_label(sig)),
            ];
            row.extend(r.scaled_5_6.iter().map(|v| json!(v)));
            row.extend(r.scaled_3_4.iter().map(|v| json!(v)));
            row.push(json!(selected));
            t.push(row);
        }
    }
    let kind_label = match kind {
        CountKind::Forms => "forms",
        CountKind::Fields => "fields",
    };
    let xs_label: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    Ok(Outcome::new(t, format!("{kind_label} X={}", xs_label.join(";"))))
}

pub fn densities(p: u64, brute_force: bool, level: Option<u32>) -> CmdResult {
    if !cubic_census::arith::is_prime(p) {
        return Err(Failure::Usage(format!("{p} is not prime")));
    }
    let mut t = Table::new(&["set", "density", "source"]);
    let mut violations = Vec::new();
    for set in DensitySet::all() {
        let closed = density_closed_form(set, p);
        if brute_force {
            let lvl = level.unwrap_or(0).max(set.level());
            let brute = density_bruteforce(p, lvl, set)?;
            if brute != closed {
                violations.push(format!("{set} at p={p}: brute force {brute} but closed form {closed}"));
            }
            t.push(vec![json!(set.to_string()), json!(brute.to_string()), json!(format!("enumerated_mod_p^{lvl}"))]);
        } else {
            t.push(vec![json!(set.to_string()), json!(closed.to_string()), json!("closed_form")]);
        }
    }
    let (m1, m2) = (mu1_total(p), mu2_total(p));
    if m1 != mu1_expected(p) {
        violations.push(format!("first-order symbol densities at p={p} do not sum to (1-p^-2)(1-p^-3)"));
    }
    if m2 != mu2_expected(p) {
        violations.push(format!("second-order symbol densities at p={p} do not sum to (1-p^-2)(1-p^-5/3)"));
    }
    t.push(vec![json!("sum_mu1"), json!(compact(&m1)), json!("cube_root_basis")]);
    t.push(vec![json!("sum_mu2"), json!(compact(&m2)), json!("cube_root_basis")]);
    let mass = mass_check(p);
    if !mass.holds() {
        violations.push(format!("mass formulas fail at p={p}"));
    }
    t.push(vec![json!("order_mass"), json!(mass.order_mass.to_string()), json!("p^4/#GL2")]);
    t.push(vec![json!("field_mass"), json!(mass.field_mass.to_string()), json!("mu(U)*p^4/#GL2")]);
    let mut out = Outcome::new(t, format!("p={p}"));
    out.violations = violations;
    out.delimiter = b' ';
    Ok(out)
}

/// Residual budget for `constants --check`.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

pub fn constants_cmd(check: bool) -> CmdResult {
    let k = constants();
    let mut t = Table::new(&["kind", "name", "expression", "value", "relative_residual"]);
    let all = k
        .forms_c1
        .iter()
        .chain(&k.forms_c2)
        .chain(std::iter::once(&k.r))
        .chain(&k.fields_c1)
        .chain(&k.fields_c2_theorem)
        .chain(&k.fields_c2_composed);
    for c in all {
        t.push(vec![json!("constant"), json!(c.name), json!(c.expression), json!(c.value), Value::Null]);
    }
    let rep = verify_identities()?;
    let mut violations = Vec::new();
    for r in &rep.residuals {
        t.push(vec![json!("identity"), json!(r.name), json!(r.rhs), json!(r.lhs), json!(r.relative)]);
        if check && (r.relative.is_nan() || r.relative >= IDENTITY_TOLERANCE) {
            violations.push(format!("identity {} has relative residual {:e}", r.name, r.relative));
        }
    }
    for (sig, ratio) in [Signature::PositiveDisc, Signature::NegativeDisc].iter().zip(rep.composed_over_theorem) {
        t.push(vec![
            json!("ratio"),
            json!(format!("composed_over_theorem_{}", sig_label(*sig))),
            json!("C2_composed/C2_theorem"),
            json!(ratio),
            Value::Null,
        ]);
    }
    let mut out = Outcome::new(t, "constants".into());
    out.violations = violations;
    Ok(out)
}

pub fn classgroup(x: Option<u64>, check_identity: bool, table: bool, cfg: &RunConfig) -> CmdResult {
    let x = match x {
        Some(x) => x,
        None => required_x(None, cfg)?.ceil() as u64,
    };
    let sigs = cfg.signature.signatures();
    if table {
        let mut t = Table::new(&["D", "h", "h3star"]);
        for sig in sigs {
            for r in class_number_table(x, sig)? {
                t.push(vec![json!(r.disc), json!(r.h), json!(r.h3_star)]);
            }
        }
        return Ok(Outcome::new(t, format!("0<|D|<{x}")));
    }
    let mut t = Table::new(&[
        "X",
        "sig",
        "discriminants",
        "avg_h3star",
        "avg_via_cubic",
        "limit",
        "quadratic_side",
        "cubic_side",
        "residual",
    ]);
    let mut violations = Vec::new();
    for sig in sigs {
        let avg = three_torsion_average(x, sig)?;
        if !avg.agree() {
            violations.push(format!("{} average from class groups and cubic count differ", sig_label(sig)));
        }
        let via: f64 = num_traits::ToPrimitive::to_f64(&avg.via_cubic).unwrap_or(f64::NAN);
        let limit = match sig {
            Signature::PositiveDisc => 4.0 / 3.0,
            Signature::NegativeDisc => 2.0,
        };
        let mut row = vec![
            json!(x),
            json!(sig_label(sig)),
            json!(avg.discriminants),
            json!(avg.direct_f64()),
            json!(via),
            json!(limit),
        ];
        if check_identity {
            let l = verify_l4eq(x, sig)?;
            if l.residual != 0 {
                violations.push(format!("{} 3-torsion identity residual {}", sig_label(sig), l.residual));
            }
            row.extend([json!(l.quadratic_side), json!(l.cubic_side), json!(l.residual)]);
        } else {
            row.extend([Value::Null, Value::Null, Value::Null]);
        }
        t.push(row);
    }
    let mut out = Outcome::new(t, format!("0<|D|<{x}"));
    out.violations = violations;
    Ok(out)
}

/// Identity suite: symbol-density sums, mass formulas, brute-force densities,
/// special-function identities, switching and the 3-torsion identity.
pub fn verify(full: bool) -> CmdResult {
    let mut t = Table::new(&["check", "detail", "value", "status"]);
    let mut violations = Vec::new();
    let mut record = |t: &mut Table, check: &str, detail: String, value: Value, ok: bool| {
        if !ok {
            violations.push(format!("{check} {detail}: {value}"));
        }
        t.push(vec![json!(check), json!(detail), value, json!(if ok { "pass" } else { "fail" })]);
    };
    for p in cubic_census::arith::primes_up_to(101) {
        let ok = mu1_total(p) == mu1_expected(p) && mu2_total(p) == mu2_expected(p);
        record(&mut t, "symbol_sums", format!("p={p}"), json!(ok), ok);
    }
    for p in [2u64, 3, 5, 7] {
        let m = mass_check(p);
        record(&mut t, "mass", format!("p={p}"), json!(m.field_mass.to_string()), m.holds());
    }
    let density_primes: &[u64] = if full { &[2, 3, 5] } else { &[2, 3] };
    for &p in density_primes {
        let ok = DensitySet::all()
            .into_iter()
            .map(|s| density_bruteforce(p, s.level().max(2), s).map(|b| b == density_closed_form(s, p)))
            .collect::<Result<Vec<bool>, Error>>()?
            .into_iter()
            .all(|b| b);
        record(&mut t, "densities", format!("p={p}"), json!(ok), ok);
    }
    let ids = verify_identities()?;
    for r in &ids.residuals {
        record(&mut t, "identity", r.name.clone(), json!(r.relative), r.relative < IDENTITY_TOLERANCE);
    }
    let switch_x: &[u64] = if full { &[10_000, 100_000] } else { &[10_000] };
    for &x in switch_x {
        for p in [2u64, 3] {
            for sig in [Signature::PositiveDisc, Signature::NegativeDisc] {
                let s = verify_switching(p, x, sig)?;
                let ok = *s.residual_mass.numer() == 0;
                let detail = format!("p={p} X={x} {} raw_residual={}", sig_label(sig), s.residual_raw);
                record(&mut t, "switching_mass", detail, json!(rational64(s.residual_mass)), ok);
            }
        }
    }
    let l4_x = if full { 50_000 } else { 10_000 };
    for sig in [Signature::PositiveDisc, Signature::NegativeDisc] {
        let l = verify_l4eq(l4_x, sig)?;
        let detail = format!("X={l4_x} {}", sig_label(sig));
        record(&mut t, "three_torsion", detail, json!(l.residual), l.residual == 0);
    }
    let mut out = Outcome::new(t, if full { "full".into() } else { "quick".into() });
    out.violations = violations;
    Ok(out)
}

pub fn count_mode(s: &str) -> Option<CountMode> {
    match s {
        "orders" | "forms" => Some(CountMode::Orders),
        "fields" => Some(CountMode::Fields),
        "ntr" | "nowhere_tot_ram" => Some(CountMode::NowhereTotRam),
        _ => None,
    }
}

pub fn count_kind(s: &str) -> Option<CountKind> {
    match s {
        "forms" | "orders" => Some(CountKind::Forms),
        "fields" => Some(CountKind::Fields),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_at_two() {
        let out = densities(2, true, None).unwrap();
        assert!(out.violations.is_empty());
        let u = out.table.rows.iter().find(|r| r[0] == json!("U")).unwrap();
        assert_eq!(u[1], json!("21/32"));
    }

    #[test]
    fn error_classes() {
        assert!(matches!(Failure::from(Error::Resource("x".into())), Failure::Resource(_)));
        assert!(matches!(Failure::from(Error::Parse("x".into())), Failure::Usage(_)));
        assert!(matches!(densities(4, false, None), Err(Failure::Usage(_))));
        assert!(matches!(densities(7, true, None), Err(Failure::Resource(_))));
    }

    #[test]
    fn constants_pass() {
        let out = constants_cmd(true).unwrap();
        assert!(out.violations.is_empty());
    }
}
