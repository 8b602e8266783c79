//! Boundary magnetization `sigma(t, lambda) = u(t, lambda) sigma_free(t)`, where
//!
//! ```text
//! u'' - (phi' - ch phi + lambda) u' + (lambda/2)(phi' - ch phi + 1) u = 0,
//! u = 1 + O(t^(-1/2) e^(-t))  as t -> inf.
//! ```
//!
//! The equation is integrated backward in `s = ln t` with state `(u, t u')`
//! from a seed at `t0`. The stable branch is seeded from the form-factor
//! expansion, which suppresses the backward-growing mode `e^((lambda-1) t)`
//! for `lambda <= 1`. The metastable branch (`0 < lambda < 1`, `sigma -> -sigma0`)
//! is seeded from its large-distance asymptotics.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent methods shadow these when std is linked
use num_traits::Float;

use crate::correlators::{self, pair_correlators, sigma_free_jet, CorrelatorBundle, Jet};
use crate::error::domain;
use crate::formfactor;
use crate::ode::{self, DenseTrajectory, Options};
use crate::painleve::PainleveTable;
use crate::quad::{self, Tolerance};
use crate::specfun;
use crate::{Error, Result};

/// Which solution of the magnetization equation is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `sigma -> +sigma0` at large `t`.
    Stable,
    /// `sigma -> -sigma0` at large `t`, only for `0 < lambda < 1`.
    Metastable,
    /// Fixed boundary condition above the critical temperature.
    HighTFixed,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Stable => "stable",
            Branch::Metastable => "metastable",
            Branch::HighTFixed => "highT",
        }
    }
}

/// How the backward integration was started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub t0: f64,
    pub u: f64,
    pub du: f64,
    pub method: SeedMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedMethod {
    /// Ratio of the form-factor expansion of the given order to `sigma_free`.
    FormFactor { order: usize },
    /// Three-term large-distance asymptotics of the metastable state.
    MetastableAsymptotic,
}

impl SeedMethod {
    pub fn describe(self) -> &'static str {
        match self {
            SeedMethod::FormFactor { .. } => "form-factor ratio",
            SeedMethod::MetastableAsymptotic => "metastable asymptotic (three terms)",
        }
    }
}

/// Dense solution `u(t)` on `[t_min, t0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySolution {
    pub lambda: f64,
    pub branch: Branch,
    pub seed: Seed,
    traj: DenseTrajectory<2>,
    t_lo: f64,
    t_hi: f64,
}

/// Magnetization tabulated on a grid, with its dense solution.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationProfile {
    pub lambda: f64,
    pub branch: Branch,
    pub ts: Vec<f64>,
    pub u: Vec<f64>,
    /// `sigma / sigma0`.
    pub sigma_ratio: Vec<f64>,
    /// `sigma` in conformal normalization at unit mass.
    pub sigma_abs: Vec<f64>,
    pub solution: BoundarySolution,
}

/// Coefficients `(phi' - ch phi)` at `t`.
fn drift(table: &PainleveTable, t: f64) -> f64 {
    let y = table.state(t);
    y[1] / t - y[0].cosh()
}

fn u_rhs(table: &PainleveTable, lambda: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |s, y| {
        let t = s.exp();
        let a = t * drift(table, t);
        let (u, w) = (y[0], y[1]);
        [w, w + (a + lambda * t) * w - 0.5 * lambda * t * (a + t) * u]
    }
}

fn integrate_back(table: &PainleveTable, lambda: f64, branch: Branch, seed: Seed) -> Result<BoundarySolution> {
    let cfg = table.config();
    let t_lo = cfg.t_min;
    let opts = Options::new(cfg.rel_tol, cfg.abs_tol);
    let y0 = [seed.u, seed.t0 * seed.du];
    let cap = cfg.max_log_step;
    let traj = ode::integrate(u_rhs(table, lambda), seed.t0.ln(), y0, t_lo.ln(), &opts, |_| cap)?;
    Ok(BoundarySolution { lambda, branch, seed, traj, t_lo, t_hi: seed.t0 })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain("solve_u", "lambda must be non-negative and finite"));
    }
    Ok(())
}

/// Stable-branch seed `u = sigma_FF / sigma_free` and its derivative at `t0`.
pub fn form_factor_seed(table: &PainleveTable, lambda: f64) -> Result<Seed> {
    check_lambda(lambda)?;
    let cfg = table.config();
    let t0 = cfg.seed_point();
    let order = cfg.seed_order;
    let ff = formfactor::ff_magnetization(t0, lambda, order, cfg.ff_nodes)?;
    let free_ln = correlators::ln_sigma_free_ratio(table, t0)?;
    let free = sigma_free_jet(table, t0)?;
    let u = (ff.value.ln() - free_ln).exp();
    let du = u * (ff.log_derivative - free.d1 / free.value);
    Ok(Seed { t0, u, du, method: SeedMethod::FormFactor { order } })
}

/// Solves for `u` on `[t_min, t0]` on the stable branch.
pub fn solve_u(table: &PainleveTable, lambda: f64) -> Result<BoundarySolution> {
    let seed = form_factor_seed(table, lambda)?;
    integrate_back(table, lambda, Branch::Stable, seed)
}

/// Large-distance form of the metastable magnetization over `sigma0`:
/// `-1 + B e^{-(1-lambda) t} + c3 t^{-3/2} e^{-t}` with its derivative.
pub fn metastable_asymptotic(lambda: f64, t: f64) -> (f64, f64) {
    let b = metastable_amplitude(lambda);
    let c3 = metastable_third_coefficient(lambda);
    let e1 = (-(1.0 - lambda) * t).exp();
    let e2 = t.powf(-1.5) * (-t).exp();
    let value = -1.0 + b * e1 + c3 * e2;
    let d = -(1.0 - lambda) * b * e1 - c3 * e2 * (1.0 + 1.5 / t);
    (value, d)
}

/// `(lambda / (2 - lambda))^(1/2)`.
pub fn metastable_amplitude(lambda: f64) -> f64 {
    (lambda / (2.0 - lambda)).sqrt()
}

/// `(2/lambda - 1) / (4 sqrt(2 pi))`.
pub fn metastable_third_coefficient(lambda: f64) -> f64 {
    (2.0 / lambda - 1.0) / (4.0 * (2.0 * PI).sqrt())
}

/// Metastable branch for `0 < lambda < 1`.
pub fn solve_metastable(table: &PainleveTable, lambda: f64) -> Result<BoundarySolution> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain("solve_metastable", "the metastable state exists only for 0 < lambda < 1"));
    }
    let t0 = table.config().seed_point();
    let (m, dm) = metastable_asymptotic(lambda, t0);
    let free = sigma_free_jet(table, t0)?;
    let f = free.value / table.config().sigma0();
    let l1 = free.d1 / free.value;
    let seed = Seed { t0, u: m / f, du: (dm - m * l1) / f, method: SeedMethod::MetastableAsymptotic };
    integrate_back(table, lambda, Branch::Metastable, seed)
}

impl BoundarySolution {
    pub fn t_range(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    pub fn trajectory(&self) -> &DenseTrajectory<2> {
        &self.traj
    }

    fn check(&self, t: f64) -> Result<()> {
        if t >= self.t_lo && t <= self.t_hi {
            Ok(())
        } else {
            Err(Error::OutOfRange { what: "t", value: t, lo: self.t_lo, hi: self.t_hi })
        }
    }

    /// `(u, u', u'')` with `u''` taken from the equation.
    pub fn u_jet(&self, table: &PainleveTable, t: f64) -> Result<Jet> {
        self.check(t)?;
        let s = t.ln().clamp(self.traj.lo(), self.traj.hi());
        let (y, _) = self.traj.eval(s).ok_or(Error::OutOfRange { what: "t", value: t, lo: self.t_lo, hi: self.t_hi })?;
        let (u, du) = (y[0], y[1] / t);
        let (phi, dphi, _) = table.eval(t)?;
        let a = dphi - phi.cosh();
        let d2u = (a + self.lambda) * du - 0.5 * self.lambda * (a + 1.0) * u;
        Ok(Jet { value: u, d1: du, d2: d2u })
    }

    pub fn u(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let s = t.ln().clamp(self.traj.lo(), self.traj.hi());
        Ok(self.traj.eval(s).map(|(y, _)| y[0]).unwrap_or(f64::NAN))
    }

    /// `sigma = u sigma_free` with derivatives, absolute units at unit mass.
    pub fn sigma_jet(&self, table: &PainleveTable, t: f64) -> Result<Jet> {
        Ok(self.u_jet(table, t)? * sigma_free_jet(table, t)?)
    }

    /// `(sigma / sigma0, sigma)` at `t`.
    pub fn magnetization(&self, table: &PainleveTable, t: f64) -> Result<(f64, f64)> {
        let u = self.u(t)?;
        let s0 = table.config().sigma0();
        let ratio = u * correlators::ln_sigma_free_ratio(table, t)?.exp();
        Ok((ratio, ratio * s0))
    }

    /// Tabulates the solution on `ts`.
    pub fn profile(&self, table: &PainleveTable, ts: &[f64]) -> Result<MagnetizationProfile> {
        let s0 = table.config().sigma0();
        let mut u = Vec::with_capacity(ts.len());
        let mut ratio = Vec::with_capacity(ts.len());
        let mut abs = Vec::with_capacity(ts.len());
        for &t in ts {
            let ut = self.u(t)?;
            let r = ut * correlators::ln_sigma_free_ratio(table, t)?.exp();
            u.push(ut);
            ratio.push(r);
            abs.push(r * s0);
        }
        Ok(MagnetizationProfile {
            lambda: self.lambda,
            branch: self.branch,
            ts: ts.to_vec(),
            u,
            sigma_ratio: ratio,
            sigma_abs: abs,
            solution: self.clone(),
        })
    }
}

/// `(sigma / sigma0, sigma)` from a profile's dense solution.
pub fn magnetization(profile: &MagnetizationProfile, table: &PainleveTable, t: f64) -> Result<(f64, f64)> {
    let (lo, hi) = match (profile.ts.first(), profile.ts.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Config("empty profile")),
    };
    if !(t >= lo && t <= hi) {
        return Err(Error::OutOfRange { what: "t", value: t, lo, hi });
    }
    match profile.branch {
        Branch::HighTFixed => {
            let v = sigma_fixed_high_t(table, t)?;
            let s0 = table.config().sigma0();
            Ok((v / s0, v))
        }
        _ => profile.solution.magnetization(table, t),
    }
}

/// Residual of the second-order equation for `sigma` written with `G`, `G~`:
///
/// ```text
/// (G + G~) s'' - [G' + G~' - G + lambda (G + G~)] s'
///   + 1/4 [G'' + G~'' - (G' + G~')/t - 2 G' - G~ + 2 lambda (G' + G~' + G~)] s
/// ```
pub fn full_ode_residual(b: &CorrelatorBundle, sigma: &Jet, lambda: f64) -> f64 {
    let gp = b.g + b.g_tilde;
    let dgp = b.dg + b.dg_tilde;
    let d2gp = b.d2g + b.d2g_tilde;
    gp * sigma.d2 - (dgp - b.g + lambda * gp) * sigma.d1
        + 0.25 * (d2gp - dgp / b.t - 2.0 * b.dg - b.g_tilde + 2.0 * lambda * (dgp + b.g_tilde)) * sigma.value
}

/// Fixed-condition magnetization above the critical temperature,
/// `e^(-t/2) sigma_fixed(t)`.
pub fn sigma_fixed_high_t(table: &PainleveTable, t: f64) -> Result<f64> {
    Ok((-0.5 * t).exp() * correlators::sigma_fixed(table, t)?)
}

/// Free-condition magnetization above the critical temperature: the only
/// non-growing solution is zero.
pub fn sigma_free_high_t(_table: &PainleveTable, _t: f64) -> Result<f64> {
    Ok(0.0)
}

/// Integrates `2(G + G~) s' = (G' + G~' - G) s` inward from infinity, where
/// `s e^(t/2) -> sigma0`. Independent of the closed form for `sigma_fixed`:
/// only `G`, `G~` and, beyond `r_max`, the Bessel asymptotics enter.
pub fn sigma_fixed_high_t_from_equation(table: &PainleveTable, t: f64) -> Result<f64> {
    let r_max = table.r_max();
    let mut failure = None;
    let body = table.integrate_between(t, r_max, |r, _, _| match pair_correlators(table, r) {
        Ok(b) => (b.dg + b.dg_tilde - b.g) / (2.0 * (b.g + b.g_tilde)) + 0.5,
        Err(e) => {
            failure = Some(e);
            0.0
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    // Beyond r_max the bracket is d/dr [K0/(2 pi) - 1/(2 pi) int_r^inf K0].
    let k0 = specfun::bessel_k0(r_max)?;
    let int_k0 = quad::adaptive_to_infinity(|r| specfun::bessel_k01(r).0, r_max, Tolerance::new(1e-30, 1e-13))?.value;
    let tail = -(k0 - int_k0) / (2.0 * PI);
    let s0 = table.config().sigma0();
    Ok(s0 * (-0.5 * t - body - tail).exp())
}

/// Critical-bulk magnetization `2^(1/4) lambda^(1/2) t^(3/8) Psi(1/2, 1, lambda t)`
/// in conformal normalization.
pub fn massless_reference(lambda: f64, t: f64) -> Result<f64> {
    if !(lambda > 0.0) || !(t > 0.0) {
        return Err(domain("massless_reference", "lambda and t must be positive"));
    }
    let psi = specfun::tricomi_psi(0.5, 1.0, lambda * t)?;
    Ok(2f64.powf(0.25) * lambda.sqrt() * t.powf(0.375) * psi)
}

/// Location of the interior maximum of `sigma` on `[a, b]`, if any: a sign
/// change of `sigma'` from `+` to `-`, refined by bisection.
pub fn find_peak(solution: &BoundarySolution, table: &PainleveTable, a: f64, b: f64) -> Result<Option<f64>> {
    let n = 400;
    let slope = |t: f64| solution.sigma_jet(table, t).map(|j| j.d1);
    let ratio = (b / a).powf(1.0 / n as f64);
    let mut t_prev = a;
    let mut d_prev = slope(a)?;
    for i in 1..=n {
        let t = if i == n { b } else { a * ratio.powi(i) };
        let d = slope(t)?;
        if d_prev > 0.0 && d <= 0.0 {
            let (mut lo, mut hi) = (t_prev, t);
            for _ in 0..80 {
                let mid = (lo * hi).sqrt();
                if slope(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some((lo * hi).sqrt()));
        }
        t_prev = t;
        d_prev = d;
    }
    Ok(None)
}

/// `n` logarithmically spaced points from `a` to `b` inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    grid(a, b, n, true)
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    grid(a, b, n, false)
}

fn grid(a: f64, b: f64, n: usize, log: bool) -> Vec<f64> {
    if n < 2 {
        return alloc::vec![a];
    }
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            if log {
                (a.ln() + x * (b.ln() - a.ln())).exp()
            } else {
                a + x * (b - a)
            }
        })
        .collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

