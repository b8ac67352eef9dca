//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cubic_census::asymptotics::{predict, truncated_euler_product, verify_identities, CountKind, Normalization};
use cubic_census::enumerate::{classes, count, non_maximal_abs, strict_max, verify_switching, ClassFilter, CountMode};
use cubic_census::local::{density_bruteforce, density_closed_form, mu1_sigma, mu2_sigma, DensitySet};
use cubic_census::oracle::brute_force_classes;
use cubic_census::quadratic::{three_torsion_average, verify_l4eq};
use cubic_census::reduce::canonical_form;
use cubic_census::special::{gamma, zeta};
use cubic_census::{BinaryCubicForm, CubeRootRational, Signature, SplittingSymbol, UnimodularMatrix};

const SIGS: [Signature; 2] = [Signature::PositiveDisc, Signature::NegativeDisc];

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn p_pow(p: u64, k: u32) -> i64 {
    (p as i64).pow(k)
}

fn within(t: Duration, limit_s: u64) -> bool {
    t.as_secs() < limit_s
}

/// Brute-force densities against the closed forms and the two totals.
fn density_oracle() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for p in [2u64, 3, 5] {
        for s in SplittingSymbol::NONDEGENERATE {
            for set in [DensitySet::T(s), DensitySet::U(s)] {
                let brute = density_bruteforce(p, set.level(), set).unwrap();
                if brute != density_closed_form(set, p) {
                    bad.push(format!("{set}@{p}"));
                }
            }
        }
        let u = density_bruteforce(p, 2, DensitySet::Maximal).unwrap();
        let v = density_bruteforce(p, 2, DensitySet::MaximalNotTotRam).unwrap();
        let pi = p as i64;
        if u != q((pi.pow(3) - 1) * (pi * pi - 1), pi.pow(5)) {
            bad.push(format!("U@{p}"));
        }
        if v != q((pi * pi - 1).pow(2), pi.pow(4)) {
            bad.push(format!("V@{p}"));
        }
    }
    let t = start.elapsed();
    Verdict { pass: bad.is_empty() && within(t, 60), detail: format!("mismatches {:?}, {:.1}s", bad, t.as_secs_f64()) }
}

fn symbol_density_sums() -> Verdict {
    let mut bad = Vec::new();
    let primes: Vec<u64> = (2..=101u64).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
    for &p in &primes {
        let one = CubeRootRational::from_int(p, 1);
        let inv_p2 = CubeRootRational::from_rational(p, q(1, p_pow(p, 2)));
        let inv_p3 = CubeRootRational::from_rational(p, q(1, p_pow(p, 3)));
        // p^{-5/3} = p^{-1} · p^{-2/3}
        let inv_p53 = CubeRootRational::from_coeffs(p, [q(0, 1), q(0, 1), q(1, p_pow(p, 1))]);
        let first = &(&one - &inv_p2) * &(&one - &inv_p3);
        let second = &(&one - &inv_p2) * &(&one - &inv_p53);
        let s1 = SplittingSymbol::NONDEGENERATE.iter().fold(CubeRootRational::zero(p), |a, &s| &a + &mu1_sigma(s, p));
        let s2 = SplittingSymbol::NONDEGENERATE.iter().fold(CubeRootRational::zero(p), |a, &s| &a + &mu2_sigma(s, p));
        if s1 != first || s2 != second {
            bad.push(p);
        }
    }
    Verdict { pass: bad.is_empty(), detail: format!("{} primes, failures {:?}", primes.len(), bad) }
}

fn mass_formulas() -> Verdict {
    let mut bad = Vec::new();
    for p in [2u64, 3, 5, 7] {
        let pi = p as i64;
        let gl2 = (pi * pi - 1) * (pi * pi - pi);
        let order_mass = q(pi.pow(4), gl2);
        let expected_order = (q(pi - 1, pi) * q(pi * pi - 1, pi * pi)).recip();
        let (mu_u, source) = if p <= 5 {
            (density_bruteforce(p, 2, DensitySet::Maximal).unwrap(), "enumerated")
        } else {
            (density_closed_form(DensitySet::Maximal, p), "closed form")
        };
        let field_mass = &mu_u * &order_mass;
        let expected_field = q(1, 1) + q(1, pi) + q(1, pi * pi);
        if order_mass != expected_order || field_mass != expected_field {
            bad.push(format!("p={p} ({source})"));
        }
    }
    Verdict { pass: bad.is_empty(), detail: format!("failures {bad:?}") }
}

fn random_word(rng: &mut ChaCha8Rng) -> UnimodularMatrix {
    let len = rng.gen_range(0..=12);
    (0..len).fold(UnimodularMatrix::identity(), |acc, _| {
        let g = match rng.gen_range(0..4) {
            0 => UnimodularMatrix::translation(1),
            1 => UnimodularMatrix::translation(-1),
            2 => UnimodularMatrix::inversion(),
            _ => UnimodularMatrix::reflection(),
        };
        acc.mul(&g).unwrap()
    })
}

fn canonicalization() -> Verdict {
    let start = Instant::now();
    let oracle = brute_force_classes(3000).unwrap();
    let inv = classes(-3000, 3000, &ClassFilter::orders()).unwrap();
    let pos = inv.records.iter().filter(|r| r.signature == Signature::PositiveDisc).count() as u64;
    let neg = inv.records.len() as u64 - pos;
    let counts_ok = pos == oracle.positive && neg == oracle.negative;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut pairs, mut failures) = (0u32, 0u32);
    while pairs < 100_000 {
        let c: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-30..=30));
        let f = BinaryCubicForm::new(c[0], c[1], c[2], c[3]);
        if f.discriminant().unwrap() == 0 || !f.is_irreducible().unwrap() {
            continue;
        }
        let moved = f.act(&random_word(&mut rng)).unwrap();
        pairs += 1;
        if canonical_form(&moved).unwrap() != canonical_form(&f).unwrap() {
            failures += 1;
        }
    }
    let t = start.elapsed();
    Verdict {
        pass: counts_ok && failures == 0 && within(t, 300),
        detail: format!(
            "classes +{pos}/-{neg} vs oracle +{}/-{}, {pairs} random pairs with {failures} failures, {:.1}s",
            oracle.positive,
            oracle.negative,
            t.as_secs_f64()
        ),
    }
}

fn switching() -> Verdict {
    let mut all_zero = true;
    let mut parts = Vec::new();
    for p in [2u64, 3] {
        for x in [10_000u64, 100_000] {
            for sig in SIGS {
                let r = verify_switching(p, x, sig).unwrap();
                all_zero &= *r.residual_mass.numer() == 0;
                parts.push(format!("p={p} X={x} {}: raw {} mass {}", sig.label(), r.residual_raw, r.residual_mass));
            }
        }
    }
    Verdict { pass: all_zero, detail: parts.join("; ") }
}

/// `(count − c₁X)/X^{5/6}` and `(count − c₁X − c₂X^{5/6})/X^{5/6}`.
fn forms_residuals(x: f64, sig: Signature) -> (u64, f64, f64) {
    let n = count(x, sig, CountMode::Orders).unwrap().raw as f64;
    let s = x.powf(5.0 / 6.0);
    let one = predict(x, CountKind::Forms, sig, 1, Normalization::Theorem).unwrap();
    let two = predict(x, CountKind::Forms, sig, 2, Normalization::Theorem).unwrap();
    (n as u64, (n - one).abs() / s, (n - two).abs() / s)
}

fn second_term_shape() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for sig in SIGS {
        let rows: Vec<(f64, u64, f64, f64)> = [1e4, 1e5, 1e6]
            .into_iter()
            .map(|x| {
                let (n, r1, r2) = forms_residuals(x, sig);
                (x, n, r1, r2)
            })
            .collect();
        for &(x, n, r1, r2) in &rows {
            pass &= r2 < r1;
            parts.push(format!("{} X={x:e} N={n} one-term {r1:.3} two-term {r2:.3}", sig.label()));
        }
        pass &= rows[2].3 < rows[0].3;
    }
    let t = start.elapsed();
    pass &= within(t, 600);
    Verdict { pass, detail: format!("{}; {:.1}s", parts.join("; "), t.as_secs_f64()) }
}

fn normalization_arbitration() -> Verdict {
    let start = Instant::now();
    let x = 1e7;
    let sig = Signature::NegativeDisc;
    let n = count(x, sig, CountMode::Fields).unwrap().raw as f64;
    let one = predict(x, CountKind::Fields, sig, 1, Normalization::Theorem).unwrap();
    let res1 = (n - one).abs();
    let mut winners = Vec::new();
    let mut parts = vec![format!("N={n} one-term residual {res1:.0}")];
    for norm in Normalization::BOTH {
        let pred = predict(x, CountKind::Fields, sig, 2, norm).unwrap();
        let res = (n - pred).abs();
        parts.push(format!("{} residual {res:.0}", norm.label()));
        if 5.0 * res <= res1 {
            winners.push((norm, pred));
        }
    }
    let pass = match winners.as_slice() {
        [(norm, pred)] => {
            let rel = (n - pred).abs() / pred;
            parts.push(format!("selected {} with relative error {rel:.2e}", norm.label()));
            rel <= 0.02
        }
        _ => false,
    };
    parts.push(format!("{:.1}s", start.elapsed().as_secs_f64()));
    Verdict { pass, detail: parts.join(", ") }
}

fn class_group_identity() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for sig in SIGS {
        let r = verify_l4eq(50_000, sig).unwrap();
        pass &= r.residual == 0;
        parts.push(format!("{}: {} = {}", sig.label(), r.quadratic_side, r.cubic_side));
    }
    let t = start.elapsed();
    pass &= within(t, 300);
    Verdict { pass, detail: format!("{}, {:.1}s", parts.join("; "), t.as_secs_f64()) }
}

fn torsion_trend() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (sig, limit) in [(Signature::PositiveDisc, 4.0 / 3.0), (Signature::NegativeDisc, 2.0)] {
        let small = three_torsion_average(10_000, sig).unwrap();
        let large = three_torsion_average(1_000_000, sig).unwrap();
        let (a, b) = (small.direct_f64(), large.direct_f64());
        pass &= (b - limit).abs() < (a - limit).abs() && small.agree() && large.agree();
        parts.push(format!("{}: {a:.4} -> {b:.4} (limit {limit:.4})", sig.label()));
    }
    Verdict { pass, detail: parts.join("; ") }
}

fn constants_check() -> Verdict {
    const APERY: f64 = 1.202_056_903_159_594_3;
    let z2 = (zeta(2.0).unwrap() - PI * PI / 6.0).abs() / (PI * PI / 6.0);
    let g = (gamma(0.5).unwrap() - PI.sqrt()).abs() / PI.sqrt();
    let ids = verify_identities().unwrap();
    let worst = ids.max_relative();
    let e3 = (truncated_euler_product(3.0, 10_000) - 1.0 / APERY).abs();
    let e2 = (1.0 / truncated_euler_product(2.0, 10_000) - PI * PI / 6.0).abs();
    Verdict {
        pass: z2 < 1e-12 && g < 1e-12 && worst < 1e-10 && e3 < 1e-4 && e2 < 1e-4,
        detail: format!("ζ(2) {z2:.1e}, Γ(1/2) {g:.1e}, identities {worst:.1e}, products {e3:.1e} / {e2:.1e}"),
    }
}

/// `N(𝒲_p; X)·p²/X` should not grow with `p`.
fn non_maximal_trend() -> Verdict {
    let x = 1e5;
    let max_abs = strict_max(x);
    let scaled: Vec<(u64, f64)> = [2u64, 3, 5, 7, 11]
        .into_iter()
        .map(|p| {
            let n: u64 = SIGS.iter().map(|&s| non_maximal_abs(s, p, max_abs).unwrap().0).sum();
            (p, n as f64 * (p * p) as f64 / x)
        })
        .collect();
    let kappa = scaled.iter().map(|s| s.1).fold(0.0, f64::max);
    let first = scaled[0].1;
    // bounded uniformly: no value exceeds the p = 2 value by more than half again
    let pass = scaled.iter().all(|&(_, v)| v > 0.0 && v <= 1.5 * first);
    let list: Vec<String> = scaled.iter().map(|(p, v)| format!("p={p}: {v:.4}")).collect();
    Verdict { pass, detail: format!("{}; κ = {kappa:.4}", list.join(", ")) }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("density oracle", density_oracle),
        ("symbol density sums", symbol_density_sums),
        ("mass formulas", mass_formulas),
        ("canonicalization", canonicalization),
        ("switching identity", switching),
        ("second-term shape for forms", second_term_shape),
        ("second-term normalization for fields", normalization_arbitration),
        ("class-group identity", class_group_identity),
        ("3-torsion averages trend", torsion_trend),
        ("constants", constants_check),
        ("non-maximal count trend", non_maximal_trend),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name}: {}", i + 1, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
