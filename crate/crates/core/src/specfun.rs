//! Special functions and physical constants.
//!
//! Only what the rest of the crate needs: `K0`, `K1` on the positive axis,
//! the Gamma function on the positive axis and the Tricomi confluent
//! hypergeometric function `Psi(a, c, x)` for `a > 0`, `x > 0`.

use core::f64::consts::{LN_2, PI};
#[allow(unused_imports)] // inherent methods shadow these when std is linked
use num_traits::Float;

use crate::error::domain;
use crate::quad::{self, Tolerance};
use crate::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Glaisher-Kinkelin constant `A`.
pub const GLAISHER: f64 = 1.282_427_129_100_622_636_9;

/// Largest argument for which `K0`, `K1` are returned unscaled.
pub const BESSEL_K_MAX_ARG: f64 = 700.0;

/// Dimensionful inputs: mass `m`, boundary field `h`, distance `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalInputs {
    pub m: f64,
    pub h: f64,
    pub y: f64,
}

/// Dimensionless distance `t = 2 m y` and boundary coupling `lambda = 4 pi h^2 / m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessPoint {
    pub t: f64,
    pub lambda: f64,
}

impl DimensionlessPoint {
    pub fn new(t: f64, lambda: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain("DimensionlessPoint", "t must be positive and finite"));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(domain("DimensionlessPoint", "lambda must be non-negative and finite"));
        }
        Ok(Self { t, lambda })
    }
}

pub fn to_dimensionless(inputs: PhysicalInputs) -> Result<DimensionlessPoint> {
    let PhysicalInputs { m, h, y } = inputs;
    if !(m > 0.0) || !m.is_finite() {
        return Err(domain("to_dimensionless", "mass must be positive"));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(domain("to_dimensionless", "distance must be positive"));
    }
    if !h.is_finite() {
        return Err(domain("to_dimensionless", "boundary field must be finite"));
    }
    DimensionlessPoint::new(2.0 * m * y, 4.0 * PI * h * h / m)
}

/// Bulk spontaneous magnetization `2^(1/12) e^(-1/8) A^(3/2) m^(1/8)`.
pub fn sigma0(m: f64) -> Result<f64> {
    sigma0_with_glaisher(m, GLAISHER)
}

/// [`sigma0`] with a caller-supplied value of Glaisher's constant.
pub fn sigma0_with_glaisher(m: f64, glaisher: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(domain("sigma0", "mass must be positive"));
    }
    if !(glaisher > 0.0) {
        return Err(domain("sigma0", "Glaisher constant must be positive"));
    }
    let unit = (LN_2 / 12.0 - 0.125).exp() * glaisher.powf(1.5);
    Ok(unit * m.powf(0.125))
}

/// Order of a modified Bessel function of the second kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

/// Modified Bessel function `K0(x)` or `K1(x)` for `0 < x <= 700`.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(domain("bessel_k", "argument must be positive"));
    }
    if x > BESSEL_K_MAX_ARG {
        return Err(Error::Unrepresentable { routine: "bessel_k", arg: x });
    }
    let (k0, k1) = bessel_k01(x);
    Ok(match order {
        BesselOrder::Zero => k0,
        BesselOrder::One => k1,
    })
}

pub fn bessel_k0(x: f64) -> Result<f64> {
    bessel_k(BesselOrder::Zero, x)
}

pub fn bessel_k1(x: f64) -> Result<f64> {
    bessel_k(BesselOrder::One, x)
}

/// Exponentially scaled `(e^x K0(x), e^x K1(x))`, valid for every `x > 0`.
pub fn bessel_k01_scaled(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k01_scaled", "argument must be positive and finite"));
    }
    if x <= SERIES_SWITCH {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        Ok((k0 * e, k1 * e))
    } else {
        k01_steed_scaled(x)
    }
}

pub(crate) const SERIES_SWITCH: f64 = 2.0;

/// `(K0(x), K1(x))` without domain checks; `x` in `(0, 700]`.
pub(crate) fn bessel_k01(x: f64) -> (f64, f64) {
    if x <= SERIES_SWITCH {
        k01_series(x)
    } else {
        let (a, b) = k01_steed_scaled(x).unwrap_or((f64::NAN, f64::NAN));
        let e = (-x).exp();
        (a * e, b * e)
    }
}

/// Ascending series around the origin.
pub(crate) fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    // k-th terms: q^k/(k!)^2 and q^k/(k!(k+1)!)
    let mut a = 1.0;
    let mut b = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 0.0;
    let mut i1_half = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            a *= q / (kf * kf);
            b *= q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let h_next = harmonic + 1.0 / (kf + 1.0);
        i0 += a;
        i1_half += b;
        s0 += a * harmonic;
        s1 += b * (harmonic + h_next);
        if a < 1e-18 * i0 && k > 2 {
            break;
        }
    }
    let i1 = 0.5 * x * i1_half;
    let k0 = -log_term * i0 + s0;
    // K1 = 1/x + ln(x/2) I1 - (x/4) sum (H_k + H_{k+1} - 2 gamma) q^k/(k!(k+1)!)
    let k1 = 1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * (s1 - 2.0 * EULER_GAMMA * i1_half);
    (k0, k1)
}

/// Steed's continued fraction for `K_v`, `K_{v+1}` at `v = 0`, scaled by `e^x`.
pub(crate) fn k01_steed_scaled(x: f64) -> Result<(f64, f64)> {
    let v = 0.0f64;
    let mut a = v * v - 0.25;
    let mut b = 2.0 * (x + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut q = -a;
    let mut c = -a;
    let mut s = 1.0 + q * delta;
    for k in 2..1000 {
        let kf = k as f64;
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = 1.0 / (b + a * d);
        delta *= b * d - 1.0;
        f += delta;
        let t = (prev - (b - 2.0) * cur) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        s += q * delta;
        if (q * delta).abs() < s.abs() * f64::EPSILON * 0.5 {
            let kv = (PI / (2.0 * x)).sqrt() / s;
            let kv1 = kv * (0.5 + v + x + (v * v - 0.25) * f) / x;
            return Ok((kv, kv1));
        }
    }
    Err(Error::Quadrature { estimate: f64::NAN, error: f64::NAN })
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler Gamma function on the positive real axis.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(domain("gamma_fn", "argument must be positive"));
    }
    if x > 171.6 {
        return Err(Error::Unrepresentable { routine: "gamma_fn", arg: x });
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        return gamma_positive(x + 1.0) / x;
    }
    // Integers are exact factorials.
    if x == x.floor() && x <= 30.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * series
}

/// Tricomi confluent hypergeometric function
/// `Psi(a, c, x) = 1/Gamma(a) int_0^inf e^{-x t} t^{a-1} (1+t)^{c-a-1} dt`.
pub fn tricomi_psi(a: f64, c: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("tricomi_psi", "a must be positive"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("tricomi_psi", "x must be positive"));
    }
    if !c.is_finite() {
        return Err(domain("tricomi_psi", "c must be finite"));
    }
    let expo = c - a - 1.0;
    let tol = Tolerance { abs: 0.0, rel: 1e-13, max_intervals: 4000 };
    // Scale out x^{-a}: t = y / x for a >= 1, t = (y^{1/a}) / x for a < 1, the
    // latter removing the endpoint singularity of t^{a-1}.
    let integral = if a < 1.0 {
        let p = 1.0 / a;
        let q = quad::adaptive_to_infinity(
            |y| {
                let w = y.powf(p);
                (-w).exp() * (w / x).ln_1p().mul_add(expo, 0.0).exp()
            },
            0.0,
            tol,
        )?;
        q.value / gamma_positive(a + 1.0)
    } else {
        let q = quad::adaptive_to_infinity(
            |y| (-y).exp() * y.powf(a - 1.0) * ((y / x).ln_1p() * expo).exp(),
            0.0,
            tol,
        )?;
        q.value / gamma_positive(a)
    };
    Ok(integral * x.powf(-a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn dimensionless_examples() {
        let p = to_dimensionless(PhysicalInputs { m: 1.0, h: 0.0, y: 0.5 }).unwrap();
        assert_eq!(p, DimensionlessPoint { t: 1.0, lambda: 0.0 });
        let h = (4.0 * PI).powf(-0.5);
        let p = to_dimensionless(PhysicalInputs { m: 1.0, h, y: 1.0 }).unwrap();
        assert_eq!(p.t, 2.0);
        assert!((p.lambda - 1.0).abs() < 1e-15);
        let p = to_dimensionless(PhysicalInputs { m: 2.0, h: 1.0, y: 0.25 }).unwrap();
        assert_eq!(p.t, 1.0);
        assert!((p.lambda - 2.0 * PI).abs() < 1e-15);
        assert!(to_dimensionless(PhysicalInputs { m: 0.0, h: 1.0, y: 1.0 }).is_err());
        assert!(to_dimensionless(PhysicalInputs { m: -1.0, h: 1.0, y: 1.0 }).is_err());
        assert!(to_dimensionless(PhysicalInputs { m: 1.0, h: 1.0, y: 0.0 }).is_err());
    }

    #[test]
    fn sigma0_values() {
        let s = sigma0(1.0).unwrap();
        let truncated = sigma0_with_glaisher(1.0, 1.28243).unwrap();
        // closed form with the six-digit constant
        let by_hand = 2f64.powf(1.0 / 12.0) * (-0.125f64).exp() * 1.28243f64.powf(1.5);
        assert!((truncated - by_hand).abs() < 1e-15);
        assert!((s - 1.35784).abs() < 1e-5, "{s}");
        assert!(rel(truncated, s) < 5e-6);
        assert!(rel(sigma0(256.0).unwrap(), 2.0 * s) < 2e-16);
        assert!(sigma0(0.0).is_err());
    }

    #[test]
    fn k0_large_argument_asymptotic() {
        let x = 20.0;
        let k0 = bessel_k0(x).unwrap();
        let ratio = k0 / ((PI / (2.0 * x)).sqrt() * (-x).exp());
        assert!((ratio - 1.0).abs() < 1.1 / (8.0 * x), "{ratio}");
        // second-order asymptotic sharpens the agreement
        let two_term = 1.0 - 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x);
        assert!((ratio - two_term).abs() < 1e-4);
    }

    #[test]
    fn k0_small_argument_log() {
        let x = 1e-4;
        let r = bessel_k0(x).unwrap() + (x / 2.0).ln() + EULER_GAMMA;
        assert!(r.abs() < 1e-7, "{r}");
        assert!((bessel_k1(1e-6).unwrap() * 1e-6 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn k_derivative_identity() {
        for x in [0.5, 1.0, 5.0] {
            let h = 1e-5;
            let d = (bessel_k0(x + h).unwrap() - bessel_k0(x - h).unwrap()) / (2.0 * h);
            let k1 = bessel_k1(x).unwrap();
            assert!(rel(-d, k1) < 1e-8, "x={x} {d} {k1}");
        }
    }

    #[test]
    fn k_reference_values() {
        // Abramowitz & Stegun table 9.8
        let table = [
            (0.1, 2.427_069_024_702_017, 9.853_844_780_870_606),
            (1.0, 0.421_024_438_240_708_3, 0.601_907_230_197_234_6),
            (2.0, 0.113_893_872_749_533_4, 0.139_865_881_816_522_4),
            (5.0, 3.691_098_334_042_594e-3, 4.044_613_445_452_164e-3),
            (10.0, 1.778_006_231_616_917e-5, 1.864_877_345_382_558e-5),
        ];
        for (x, k0, k1) in table {
            assert!(rel(bessel_k0(x).unwrap(), k0) < 1e-13, "K0({x})");
            assert!(rel(bessel_k1(x).unwrap(), k1) < 1e-13, "K1({x})");
        }
    }

    #[test]
    fn series_and_continued_fraction_overlap() {
        let mut x = 1.5;
        while x <= 2.5 {
            let (s0, s1) = k01_series(x);
            let (c0, c1) = k01_steed_scaled(x).unwrap();
            let e = (-x).exp();
            assert!(rel(s0, c0 * e) < 1e-12, "K0 overlap at {x}");
            assert!(rel(s1, c1 * e) < 1e-12, "K1 overlap at {x}");
            x += 0.05;
        }
    }

    #[test]
    fn k_domain_and_overflow() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-1.0).is_err());
        assert!(matches!(bessel_k1(750.0), Err(Error::Unrepresentable { .. })));
        assert!(bessel_k0(700.0).unwrap() > 0.0);
        let (a, b) = bessel_k01_scaled(750.0).unwrap();
        assert!((a - (PI / 1500.0).sqrt()).abs() < 1e-4 && b > a);
    }

    #[test]
    fn k_positive_and_decreasing() {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        let mut x = 1e-6;
        while x < 700.0 {
            let (k0, k1) = (bessel_k0(x).unwrap(), bessel_k1(x).unwrap());
            assert!(k0 > 0.0 && k1 > 0.0);
            assert!(k0 < prev.0 && k1 < prev.1, "x={x}");
            prev = (k0, k1);
            x *= 1.07;
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(2.5).unwrap(), 0.75 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(10.3).unwrap(), 10.3f64.ln_gamma_ref()) < 1e-13);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-0.5).is_err());
    }

    trait LnGammaRef {
        fn ln_gamma_ref(self) -> f64;
    }
    impl LnGammaRef for f64 {
        // Gamma(10.3) via recurrence from Gamma(0.3) tabulated value.
        fn ln_gamma_ref(self) -> f64 {
            let mut g = 2.991_568_987_687_590_9; // Gamma(0.3)
            let mut z = 0.3;
            while z < self - 0.5 {
                g *= z;
                z += 1.0;
            }
            g
        }
    }

    #[test]
    fn tricomi_weight_one_case() {
        let v = tricomi_psi(0.5, 1.5, 4.0).unwrap();
        assert!((v - 0.5).abs() < 1e-13, "{v}");
        let v = tricomi_psi(2.0, 3.0, 0.7).unwrap();
        assert!(rel(v, 0.7f64.powi(-2)) < 1e-12);
    }

    #[test]
    fn tricomi_large_x_leading_term() {
        let x = 100.0;
        let v = tricomi_psi(0.5, 1.0, x).unwrap() * x.sqrt();
        assert!((v - 1.0).abs() < 1e-2);
    }

    #[test]
    fn tricomi_solves_kummer_equation() {
        let (a, c) = (0.5, 1.0);
        for x in [0.5, 1.0, 5.0] {
            let h = 1e-2 * x;
            let f = |z: f64| tricomi_psi(a, c, z).unwrap();
            let (fm2, fm1, f0, fp1, fp2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
            let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
            let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
            let residual = x * d2 + (c - x) * d1 - a * f0;
            assert!(residual.abs() < 1e-7, "x={x}: {residual}");
        }
    }

    #[test]
    fn tricomi_positive_decreasing() {
        let mut prev = f64::INFINITY;
        let mut x = 1e-3;
        while x <= 100.0 {
            let v = tricomi_psi(0.5, 1.0, x).unwrap();
            assert!(v > 0.0 && v < prev, "x={x}");
            prev = v;
            x *= 1.25;
        }
        assert!(tricomi_psi(0.0, 1.0, 1.0).is_err());
        assert!(tricomi_psi(0.5, 1.0, 0.0).is_err());
    }
}
