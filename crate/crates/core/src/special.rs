//! Macdonald functions K₀ and K₁ on the positive half-line.
//!
//! Two regimes: the ascending series (with the logarithmic term) for
//! `x <= 2`, and Chebyshev expansions of `sqrt(x)·e^x·K_ν(x)` in the
//! variable `t = 4/x − 1` for `x > 2`. The coefficients come from
//! `tools/gen_bessel_cheb.py`. Both regimes reach close to machine precision.

// coefficients are kept at the precision they were generated with
#![allow(clippy::excessive_precision)]

use serde::Serialize;
use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("argument {0} is outside the domain (0, inf)")]
pub struct DomainError(pub f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Series,
    Chebyshev,
}

/// A single evaluation together with the regime that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecFunEval {
    pub argument: f64,
    pub value: f64,
    pub method: EvalMethod,
}

fn check(x: f64) -> Result<(), DomainError> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(DomainError(x))
    }
}

pub fn k0(x: f64) -> Result<f64, DomainError> {
    check(x)?;
    Ok(k0_unchecked(x))
}

pub fn k1(x: f64) -> Result<f64, DomainError> {
    check(x)?;
    Ok(k1_unchecked(x))
}

/// K₀ with the regime reported alongside the value.
pub fn eval_k0(x: f64) -> Result<SpecFunEval, DomainError> {
    check(x)?;
    Ok(SpecFunEval {
        argument: x,
        value: k0_unchecked(x),
        method: method_for(x),
    })
}

pub fn eval_k1(x: f64) -> Result<SpecFunEval, DomainError> {
    check(x)?;
    Ok(SpecFunEval {
        argument: x,
        value: k1_unchecked(x),
        method: method_for(x),
    })
}

fn method_for(x: f64) -> EvalMethod {
    if x <= SERIES_LIMIT {
        EvalMethod::Series
    } else {
        EvalMethod::Chebyshev
    }
}

/// K₀ for `x > 0`; the caller guarantees the domain.
#[inline]
pub fn k0_unchecked(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= SERIES_LIMIT {
        k0_series(x)
    } else {
        k0_large(x)
    }
}

#[inline]
pub fn k1_unchecked(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= SERIES_LIMIT {
        k1_series(x)
    } else {
        large_argument(x).1
    }
}

/// Both functions at once; cheaper than two calls in the large-x regime.
pub fn k0_k1(x: f64) -> Result<(f64, f64), DomainError> {
    check(x)?;
    if x <= SERIES_LIMIT {
        Ok((k0_series(x), k1_series(x)))
    } else {
        Ok(large_argument(x))
    }
}

// Power-series coefficients in t = x²/4, truncated where they fall below
// 1e-20 for t ≤ 1:
//   I₀ = Σ t^k/(k!)²,  Σ H_k t^k/(k!)²,
//   I₁/(x/2) = Σ t^k/(k!(k+1)!),  Σ (H_k + H_{k+1}) t^k/(k!(k+1)!).
const I0_SERIES: [f64; 14] = [
    1.0,
    1.0,
    0.25,
    0.027777777777777776,
    0.001736111111111111,
    6.944444444444444e-05,
    1.9290123456790124e-06,
    3.936759889140842e-08,
    6.151187326782565e-10,
    7.594058428126624e-12,
    7.594058428126623e-14,
    6.276081345559193e-16,
    4.358389823304995e-18,
    2.5789288895295828e-20,
];
const HARMONIC_SERIES: [f64; 14] = [
    0.0,
    1.0,
    0.375,
    0.05092592592592592,
    0.003616898148148148,
    0.0001585648148148148,
    4.72608024691358e-06,
    1.0207455998272325e-07,
    1.6718048413148328e-09,
    2.1483350211950277e-11,
    2.224275605476294e-13,
    1.895299587006153e-15,
    1.3525001839484812e-17,
    8.201338813682637e-20,
];
const I1_SERIES: [f64; 14] = [
    1.0,
    0.5,
    0.08333333333333333,
    0.006944444444444444,
    0.00034722222222222224,
    1.1574074074074073e-05,
    2.755731922398589e-07,
    4.920949861426052e-09,
    6.834652585313961e-11,
    7.594058428126623e-13,
    6.903689480115112e-15,
    5.230067787965994e-17,
    3.352607556388458e-19,
    1.842092063949702e-21,
];
const HARMONIC_PAIR_SERIES: [f64; 14] = [
    1.0,
    1.25,
    0.2777777777777778,
    0.027199074074074073,
    0.0015162037037037036,
    5.4783950617283953e-05,
    1.3896762408667172e-06,
    2.613375872835907e-08,
    3.791062453869784e-10,
    4.3726106266713215e-12,
    4.106898277957945e-14,
    3.202416543243305e-16,
    2.1065588026621898e-18,
    1.1847776309828747e-20,
];

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

/// `K₀(x) + ln(x/2) + γ`, the part of K₀ left after removing its
/// logarithmic singularity. Continuous at 0 with value 0.
pub fn k0_regular_part(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x <= SERIES_LIMIT {
        // −(ln(x/2)+γ)(I₀−1) + Σ H_k t^k/(k!)², no cancellation against the log
        let t = 0.25 * x * x;
        let lg = (0.5 * x).ln() + EULER_GAMMA;
        -lg * t * horner(&I0_SERIES[1..], t) + horner(&HARMONIC_SERIES, t)
    } else {
        k0_large(x) + (0.5 * x).ln() + EULER_GAMMA
    }
}

fn k0_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    -lg * horner(&I0_SERIES, t) + horner(&HARMONIC_SERIES, t)
}

fn k1_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let i1_sum = horner(&I1_SERIES, t);
    // Σ (ψ(k+1) + ψ(k+2)) t^k/(k!(k+1)!)
    let psi_sum = horner(&HARMONIC_PAIR_SERIES, t) - 2.0 * EULER_GAMMA * i1_sum;
    1.0 / x + (0.5 * x).ln() * 0.5 * x * i1_sum - 0.25 * x * psi_sum
}

// sqrt(x) e^x K₀(x) for x ≥ 2
const K0_LARGE: [f64; 26] = [
    1.2201515410329777273,
    -0.031448101311964500543,
    0.0015698838857300533749,
    -0.00012849549581627802638,
    0.000013949813718876499364,
    -0.0000018317555227191194848,
    0.00000027668136394450150761,
    -0.000000046604898976879476656,
    0.0000000085740340174142260858,
    -0.0000000016975345093890615156,
    0.00000000035773972814003284472,
    -0.000000000079574892444773970377,
    0.00000000001855949114954926555,
    -0.0000000000045145978833745191751,
    0.0000000000011403405882073442347,
    -0.00000000000029800969231481783548,
    0.000000000000080328907750683743694,
    -0.000000000000022275133267462963604,
    0.0000000000000063400764762766459661,
    -0.0000000000000018485933779209071694,
    0.00000000000000055120559994043333649,
    -0.00000000000000016782311257549006383,
    0.000000000000000052103917776435541125,
    -0.000000000000000016475805939842632815,
    0.000000000000000005300433771177335771,
    -0.0000000000000000017331712005821000278,
];

// sqrt(x) e^x K₁(x) for x ≥ 2
const K1_LARGE: [f64; 26] = [
    1.3603130952422213347,
    0.10392373657681723844,
    -0.0028578168596227793868,
    0.00019521551847135163111,
    -0.0000193619797416608296,
    0.0000024064849478372171171,
    -0.00000035019606030878125421,
    0.000000057410841254500492923,
    -0.000000010345762465678097027,
    0.0000000020150497551970346161,
    -0.00000000041903547593419255842,
    0.000000000092183151876053141258,
    -0.000000000021299678384277910216,
    0.0000000000051396396734823435404,
    -0.0000000000012891739609498229352,
    0.00000000000033484196660522431201,
    -0.000000000000089767051820101460692,
    0.000000000000024771544242195986813,
    -0.0000000000000070198370892147688513,
    0.0000000000000020387031662398608799,
    -0.00000000000000060570472706430178228,
    0.00000000000000018380935752430454256,
    -0.000000000000000056894628491936483743,
    0.000000000000000017940510478863572914,
    -0.0000000000000000057567444820733024503,
    0.0000000000000000018778651901623267401,
];

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c[1..].iter().rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

fn k0_large(x: f64) -> f64 {
    (-x).exp() / x.sqrt() * clenshaw(&K0_LARGE, 4.0 / x - 1.0)
}

/// (K₀, K₁) for x > 2.
fn large_argument(x: f64) -> (f64, f64) {
    let t = 4.0 / x - 1.0;
    let scale = (-x).exp() / x.sqrt();
    (scale * clenshaw(&K0_LARGE, t), scale * clenshaw(&K1_LARGE, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAX_TERMS: usize = 500;

    fn k0_series_loop(x: f64) -> f64 {
        let t = 0.25 * x * x;
        let lg = (0.5 * x).ln() + EULER_GAMMA;
        let mut term = 1.0;
        let mut harmonic = 0.0;
        let mut i0 = 1.0;
        let mut tail = 0.0;
        for k in 1..MAX_TERMS {
            let kf = k as f64;
            term *= t / (kf * kf);
            harmonic += 1.0 / kf;
            i0 += term;
            tail += harmonic * term;
            if term * (1.0 + harmonic) < 1e-17 * i0 {
                break;
            }
        }
        -lg * i0 + tail
    }

    fn k1_series_loop(x: f64) -> f64 {
        let t = 0.25 * x * x;
        // term_k = t^k / (k! (k+1)!)
        let mut term = 1.0;
        let mut psi_k1 = -EULER_GAMMA; // ψ(k+1)
        let mut psi_k2 = 1.0 - EULER_GAMMA; // ψ(k+2)
        let mut i1_sum = 1.0;
        let mut psi_sum = psi_k1 + psi_k2;
        for k in 1..MAX_TERMS {
            let kf = k as f64;
            term *= t / (kf * (kf + 1.0));
            psi_k1 += 1.0 / kf;
            psi_k2 += 1.0 / (kf + 1.0);
            i1_sum += term;
            psi_sum += (psi_k1 + psi_k2) * term;
            if term * (1.0 + psi_k2.abs()) < 1e-17 * i1_sum {
                break;
            }
        }
        let i1 = 0.5 * x * i1_sum;
        1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * psi_sum
    }

    /// Steed's method (CF2) with Temme's normalisation, order zero. Returns (K₀, K₁).
    fn steed(x: f64) -> (f64, f64) {
        const EPS: f64 = 1e-17;
        let a1 = 0.25;
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_TERMS {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        let k1 = k0 * (x + 0.5 - h) / x;
        (k0, k1)
    }

    #[test]
    fn reference_values_at_one() {
        assert!((k0(1.0).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((k1(1.0).unwrap() - 0.601_907_230_197_234_6).abs() < 1e-15);
    }

    #[test]
    fn small_argument_expansions() {
        let x = 1e-6;
        let r = k0(x).unwrap() + (x / 2.0).ln() + EULER_GAMMA;
        assert!(r.abs() <= 1e-11, "{r}");
        assert!((x * k1(x).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(k0(0.0).is_err());
        assert!(k1(-1.0).is_err());
        assert!(k0(f64::NAN).is_err());
    }

    #[test]
    fn regimes_agree_at_crossover() {
        let x = SERIES_LIMIT;
        let (a0, a1) = (k0_series(x), k1_series(x));
        let (b0, b1) = steed(x);
        assert!(((a0 - b0) / b0).abs() < 1e-13);
        assert!(((a1 - b1) / b1).abs() < 1e-13);
    }

    #[test]
    fn tabulated_series_agree_with_term_recursion() {
        for k in 0..=200 {
            let x = 2.0 * k as f64 / 200.0 + 1e-9;
            let (a, b) = (k0_series(x), k0_series_loop(x));
            assert!(((a - b) / b).abs() < 2e-14, "K0({x})");
            let (a, b) = (k1_series(x), k1_series_loop(x));
            assert!(((a - b) / b).abs() < 2e-14, "K1({x})");
        }
    }

    #[test]
    fn expansion_agrees_with_continued_fraction() {
        for k in 0..400 {
            let x = 2.0 * 1.02f64.powi(k);
            let (a0, a1) = large_argument(x);
            let (b0, b1) = steed(x);
            if b0 < 1e-300 {
                break;
            }
            assert!(((a0 - b0) / b0).abs() < 2e-15, "K0({x})");
            assert!(((a1 - b1) / b1).abs() < 2e-15, "K1({x})");
        }
    }

    #[test]
    fn regular_part_vanishes_at_origin() {
        assert_eq!(k0_regular_part(0.0), 0.0);
        for &x in &[1e-8, 1e-4, 0.1, 1.0, 1.9, 2.5, 10.0] {
            let direct = k0(x).unwrap() + (0.5 * x).ln() + EULER_GAMMA;
            assert!((k0_regular_part(x) - direct).abs() < 1e-14 * (1.0 + direct.abs() + (0.5 * x).ln().abs()));
        }
        assert!(k0_regular_part(1e-3).abs() < 1e-5);
    }

    #[test]
    fn large_argument_underflows_gracefully() {
        assert!(k0(800.0).unwrap() >= 0.0);
        assert!(k0(600.0).unwrap() > 0.0);
        assert_eq!(eval_k0(3.0).unwrap().method, EvalMethod::Chebyshev);
        assert_eq!(eval_k1(0.5).unwrap().method, EvalMethod::Series);
    }
}
