use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use boundary_ising_core::correlators::*;
use boundary_ising_core::painleve::{eval_phi, solve_phi, PainleveTable, SolverConfig};
use boundary_ising_core::quad::{adaptive, adaptive_to_infinity, Tolerance};
use boundary_ising_core::specfun::{bessel_k0, bessel_k01_scaled};
use proptest::prelude::*;

fn table() -> &'static PainleveTable {
    static T: OnceLock<PainleveTable> = OnceLock::new();
    T.get_or_init(|| solve_phi(SolverConfig::default()).unwrap())
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Least-squares slope of `ln f` against `ln t`.
fn log_slope(ts: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = ts.iter().map(|&t| f(t).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn tail_at_matching_radius() {
    let t = table();
    let r_max = t.r_max();
    let q = adaptive_to_infinity(
        |r| {
            let (k0, k1) = bessel_k01_scaled(r).unwrap();
            r * 4.0 / (PI * PI) * (k0 * k0 - k1 * k1) * (-2.0 * r).exp()
        },
        r_max,
        Tolerance::new(1e-30, 1e-13),
    )
    .unwrap();
    let j = tail_j(t, r_max).unwrap();
    assert!((j - q.value).abs() < 1e-12);
    assert!((j / q.value - 1.0).abs() < 1e-10, "{j} {}", q.value);
}

#[test]
fn tail_rises_toward_zero() {
    let t = table();
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=100 {
        let x = 4.0 + 0.1 * i as f64;
        let j = tail_j(t, x).unwrap();
        assert!(j < 0.0 && j > prev);
        prev = j;
    }
}

#[test]
fn tail_is_additive() {
    let t = table();
    for a in [0.01, 0.5, 3.0, 6.0] {
        let direct = adaptive(
            |r| {
                let (phi, dphi, _) = eval_phi(t, r).unwrap();
                let sh = phi.sinh();
                r * (sh * sh - dphi * dphi)
            },
            a,
            2.0 * a,
            Tolerance::new(1e-14, 1e-13),
        )
        .unwrap()
        .value;
        let diff = tail_j(t, a).unwrap() - tail_j(t, 2.0 * a).unwrap();
        assert!((diff - direct).abs() < 1e-10, "{a}: {diff} vs {direct}");
    }
}

#[test]
fn hyperbolic_identity_and_ordering() {
    let t = table();
    for x in grid(1e-3, 14.0, 200) {
        let b = pair_correlators(t, x).unwrap();
        assert!(b.g > b.g_tilde && b.g_tilde > 0.0);
        let lhs = b.g * b.g - b.g_tilde * b.g_tilde;
        let rhs = b.sigma0 * b.sigma0 * (0.5 * b.j).exp();
        assert!((lhs / rhs - 1.0).abs() < 1e-9, "{x}");
    }
}

#[test]
fn mirror_correlator_decays_like_bessel() {
    let b = pair_correlators(table(), 12.0).unwrap();
    assert!((b.g_tilde / b.sigma0 - bessel_k0(12.0).unwrap() / PI).abs() < 1e-8);
    assert!((b.g / b.sigma0 - 1.0).abs() < 1e-5);
}

#[test]
fn analytic_derivatives_match_differences() {
    let t = table();
    let g = |x: f64| pair_correlators(t, x).unwrap();
    for x in [1.0, 2.0, 5.0] {
        // five-point stencil; truncation ~ h^4, roundoff ~ 1e-16 / h
        let h = 5e-3;
        let stencil = |f: &dyn Fn(f64) -> f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
        let b = g(x);
        let dg = stencil(&|y| g(y).g);
        let dgt = stencil(&|y| g(y).g_tilde);
        let d2g = stencil(&|y| g(y).dg);
        let d2gt = stencil(&|y| g(y).dg_tilde);
        assert!((dg / b.dg - 1.0).abs() < 1e-7, "{x} {dg} {}", b.dg);
        assert!((dgt / b.dg_tilde - 1.0).abs() < 1e-7, "{x}");
        assert!((d2g / b.d2g - 1.0).abs() < 1e-6, "{x}");
        assert!((d2gt / b.d2g_tilde - 1.0).abs() < 1e-6, "{x}");
    }
}

#[test]
fn free_tends_to_bulk_value() {
    let t = table();
    let s0 = t.config().sigma0();
    assert!((sigma_free(t, 12.0).unwrap() / s0 - 1.0).abs() < 1e-4);
    assert!((sigma_fixed(t, 12.0).unwrap() / s0 - 1.0).abs() < 1e-4);
}

#[test]
fn short_distance_exponents() {
    let t = table();
    let ts = grid(1e-3, 1e-2, 40);
    let free = log_slope(&ts, |x| sigma_free(t, x).unwrap());
    let fixed = log_slope(&ts, |x| sigma_fixed(t, x).unwrap());
    assert!((free - 0.375).abs() < 0.01, "{free}");
    assert!((fixed + 0.125).abs() < 0.01, "{fixed}");
}

#[test]
fn fixed_amplitude_at_short_distance() {
    let t = table();
    let a = 1e-3f64.powf(0.125) * sigma_fixed(t, 1e-3).unwrap();
    assert!((a / 2f64.powf(0.25) - 1.0).abs() < 0.02, "{a}");
}

#[test]
fn first_order_equations_hold() {
    let t = table();
    let s0 = t.config().sigma0();
    for x in grid(0.1, 10.0, 60) {
        let b = pair_correlators(t, x).unwrap();
        let free = free_equation_residual(&b, &sigma_free_jet(t, x).unwrap());
        let fixed = fixed_equation_residual(&b, &sigma_fixed_jet(t, x).unwrap());
        assert!(free.abs() < 1e-8 * s0 * s0, "{x} {free}");
        assert!(fixed.abs() < 1e-8 * s0 * s0, "{x} {fixed}");
    }
}

#[test]
fn log_derivative_consistency() {
    let t = table();
    for x in grid(0.1, 10.0, 40) {
        let b = pair_correlators(t, x).unwrap();
        let s = sigma_free_jet(t, x).unwrap();
        let from_eq = (b.dg - b.dg_tilde + b.g_tilde) / (2.0 * (b.g - b.g_tilde));
        assert!((s.d1 / s.value / from_eq - 1.0).abs() < 1e-7, "{x}");
    }
}

#[test]
fn monotone_on_grid() {
    let t = table();
    let ts = grid(1e-3, 14.0, 400);
    for w in ts.windows(2) {
        assert!(sigma_free(t, w[1]).unwrap() > sigma_free(t, w[0]).unwrap());
        assert!(sigma_fixed(t, w[1]).unwrap() < sigma_fixed(t, w[0]).unwrap());
    }
}

#[test]
fn log_ratio_matches_value() {
    let t = table();
    let s0 = t.config().sigma0();
    for x in [1e-3, 0.2, 3.0, 14.0] {
        assert!((ln_sigma_free_ratio(t, x).unwrap().exp() * s0 / sigma_free(t, x).unwrap() - 1.0).abs() < 1e-14);
        assert!((ln_sigma_fixed_ratio(t, x).unwrap().exp() * s0 / sigma_fixed(t, x).unwrap() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn ln2_identity_holds() {
    let v = ln2_identity(table()).unwrap();
    assert!((v - LN_2).abs() < 1e-4, "{v}");
}

#[test]
fn ln2_integrand_in_unit_interval() {
    let t = table();
    for x in grid(1e-3, 14.0, 500) {
        let (phi, _, _) = eval_phi(t, x).unwrap();
        let v = 1.0 - (-phi).exp();
        assert!(v > 0.0 && v < 1.0);
    }
}

#[test]
fn ln2_head_segment_is_about_its_length() {
    let t = table();
    let full = ln2_identity(t).unwrap();
    let body = full - {
        // integral over (0, t_min) from the short-distance form, integrand -> 1
        let a = t.t_min();
        let omega = |r: f64| 0.577_215_664_901_532_9 + (r / 8.0).ln();
        a + 0.5 * (0.5 * a * a * omega(a) - 0.25 * a * a)
    };
    assert!(((full - body) - 1e-3).abs() < 1e-5);
}

#[test]
fn conformal_normalization() {
    let a = conformal_amplitude(table()).unwrap();
    assert!((a - 1.0).abs() < 1e-9, "{a}");
}

#[test]
fn glaisher_tamper_is_visible() {
    let cfg = SolverConfig { glaisher: 1.282_427_129_100_622_6 + 1e-3, ..SolverConfig::default() };
    let a = conformal_amplitude(&solve_phi(cfg).unwrap()).unwrap();
    assert!((a - 1.0).abs() > 1e-3, "{a}");
}

proptest! {
    #[test]
    fn jet_product_is_bilinear(
        a in prop::array::uniform3(-5.0f64..5.0),
        b in prop::array::uniform3(-5.0f64..5.0),
        c in -3.0f64..3.0,
    ) {
        let x = Jet { value: a[0], d1: a[1], d2: a[2] };
        let y = Jet { value: b[0], d1: b[1], d2: b[2] };
        let l = x.scale(c) * y;
        let r = (x * y).scale(c);
        prop_assert!((l.value - r.value).abs() <= 1e-12 * (1.0 + r.value.abs()));
        prop_assert!((l.d1 - r.d1).abs() <= 1e-12 * (1.0 + r.d1.abs()));
        prop_assert!((l.d2 - r.d2).abs() <= 1e-12 * (1.0 + r.d2.abs()));
        let s = y * x;
        prop_assert!((s.d2 - (x * y).d2).abs() <= 1e-12 * (1.0 + s.d2.abs()));
    }

    #[test]
    fn bundle_identity_anywhere(x in 1e-3f64..14.0) {
        let b = pair_correlators(table(), x).unwrap();
        let lhs = b.g * b.g - b.g_tilde * b.g_tilde;
        prop_assert!((lhs / (b.sigma0 * b.sigma0 * (0.5 * b.j).exp()) - 1.0).abs() < 1e-9);
    }
}
