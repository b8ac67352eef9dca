//! Real Γ and ζ in double precision.
//!
//! Γ uses the Lanczos approximation (g = 7, nine terms) with the reflection
//! formula below 1/2. ζ uses Euler–Maclaurin summation with `N = 30` and ten
//! Bernoulli corrections, valid for every real `s ≠ 1` above −15; for
//! `0 < s < 1` the functional equation gives an independent second route.
//! Both are accurate to a few ulps over the arguments used here, well inside
//! the 1e-12 budget.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Relative accuracy promised by [`gamma`] and [`zeta`].
pub const RELATIVE_PRECISION: f64 = 1e-13;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || (x <= 0.0 && x == x.floor()) {
        return domain(format!("Γ has a pole at {x}"));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// `B₂, B₄, …, B₂₀`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const EM_TERMS: usize = 30;

/// ζ(s) by Euler–Maclaurin summation.
pub fn zeta_euler_maclaurin(s: f64) -> Result<f64> {
    if s == 1.0 || !s.is_finite() {
        return domain(format!("ζ has a pole at {s}"));
    }
    if s < -15.0 {
        return domain(format!("ζ({s}) is outside the supported range"));
    }
    let n = EM_TERMS as f64;
    // sum small terms first
    let mut head = 0.0;
    for k in (1..EM_TERMS).rev() {
        head += (k as f64).powf(-s);
    }
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // (s)_{2k−1} N^{−s−2k+1} B_{2k}/(2k)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = k + 1;
        tail += b / fact * rising * power;
        let m = 2 * k as u32;
        rising *= (s + m as f64 - 1.0) * (s + m as f64);
        fact *= (m + 1) as f64 * (m + 2) as f64;
        power /= n * n;
    }
    Ok(head + tail)
}

/// ζ(s) for `0 < s < 1` through `ζ(s) = 2ˢπˢ⁻¹ sin(πs/2) Γ(1 − s) ζ(1 − s)`.
pub fn zeta_reflection(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("reflection route needs 0 < s < 1, got {s}"));
    }
    let partner = zeta_euler_maclaurin(1.0 - s)?;
    Ok(2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma_unchecked(1.0 - s) * partner)
}

pub fn zeta(s: f64) -> Result<f64> {
    zeta_euler_maclaurin(s)
}
