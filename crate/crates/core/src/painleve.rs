//! The Painleve III transcendent as a solution of the radial sinh-Gordon
//! equation `phi'' + phi'/r = sinh(2 phi) / 2`, selected by the decay
//! `phi ~ (2/pi) K0(r)` at large `r`.
//!
//! The equation is integrated inward in `s = ln r` with state
//! `(phi, p = r phi')`, for which it reads `phi_s = p`, `p_s = r^2 sinh(2 phi) / 2`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_2_PI;
#[allow(unused_imports)] // inherent methods shadow these when std is linked
use num_traits::Float;

use crate::error::domain;
use crate::ode::{self, DenseTrajectory, Options};
use crate::quad::{self, GaussLegendre, Tolerance};
use crate::specfun::{self, EULER_GAMMA, GLAISHER};
use crate::{Error, Result};

/// Numerical policy shared by every solver in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Radius where the Bessel asymptotics seed the inward integration.
    pub r_max: f64,
    /// Smallest supported argument.
    pub t_min: f64,
    pub rel_tol: f64,
    /// Absolute tolerance, measured in units of the seed magnitude at `r_max`.
    pub abs_tol: f64,
    /// Seeding point of the magnetization ODE.
    pub t0: f64,
    /// Largest knot spacing in `ln r`; dominates below `r = 1`.
    pub max_log_step: f64,
    /// Largest knot spacing in `r`; dominates above `r = 1`.
    pub max_linear_step: f64,
    /// Gauss-Legendre order per dimension of the form-factor oracle.
    pub ff_nodes: usize,
    /// Truncation order of the form-factor seed for the magnetization ODE.
    pub seed_order: usize,
    /// Glaisher's constant entering `sigma0`.
    pub glaisher: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r_max: 14.0,
            t_min: 1e-3,
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            t0: 12.0,
            max_log_step: 0.05,
            max_linear_step: 0.1,
            ff_nodes: 64,
            seed_order: 2,
            glaisher: GLAISHER,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.r_max,
            self.t_min,
            self.rel_tol,
            self.abs_tol,
            self.t0,
            self.max_log_step,
            self.max_linear_step,
            self.glaisher,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Config("all numerical settings must be finite"));
        }
        if self.r_max < 8.0 || self.r_max > 600.0 {
            return Err(Error::Config("r_max must lie in [8, 600]"));
        }
        if !(self.t_min > 0.0 && self.t_min < 1.0) {
            return Err(Error::Config("t_min must lie in (0, 1)"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive"));
        }
        if self.rel_tol < 1e-15 {
            return Err(Error::Config("rel_tol below 1e-15 is not attainable in double precision"));
        }
        if !(self.t0 > 1.0) {
            return Err(Error::Config("t0 must exceed 1"));
        }
        if !(self.max_log_step > 0.0 && self.max_linear_step > 0.0) {
            return Err(Error::Config("knot spacings must be positive"));
        }
        if self.ff_nodes < 4 || self.ff_nodes > 512 {
            return Err(Error::Config("ff_nodes must lie in [4, 512]"));
        }
        if self.seed_order == 0 || self.seed_order > crate::formfactor::MAX_ORDER {
            return Err(Error::Config("seed_order must lie in [1, 4]"));
        }
        if !(self.glaisher > 0.0) {
            return Err(Error::Config("Glaisher constant must be positive"));
        }
        Ok(())
    }

    /// Seeding point actually used: `min(r_max, t0)`.
    pub fn seed_point(&self) -> f64 {
        self.t0.min(self.r_max)
    }

    /// `sigma0` at unit mass with this configuration's Glaisher constant.
    pub fn sigma0(&self) -> f64 {
        specfun::sigma0_with_glaisher(1.0, self.glaisher).unwrap_or(f64::NAN)
    }
}

/// Integrals from a knot to infinity, kept for the correlators.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct KnotTails {
    /// `int r (sinh^2 phi - phi'^2) dr`
    pub j: f64,
    /// `int (1 - e^phi) dr`
    pub a_plus: f64,
    /// `int (e^-phi - 1) dr`
    pub a_minus: f64,
}

/// Dense representation of `phi` on `[t_min, r_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PainleveTable {
    config: SolverConfig,
    traj: DenseTrajectory<2>,
    radii: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    tails: Vec<KnotTails>,
    rule: GaussLegendre,
}

const TAIL_RULE: usize = 16;

fn rhs(s: f64, y: &[f64; 2]) -> [f64; 2] {
    let r2 = (2.0 * s).exp();
    [y[1], 0.5 * r2 * (2.0 * y[0]).sinh()]
}

/// Solves for the transcendent and tabulates it.
pub fn solve_phi(config: SolverConfig) -> Result<PainleveTable> {
    config.validate()?;
    let r_max = config.r_max;
    let (k0, k1) = specfun::bessel_k01(r_max);
    let y0 = [FRAC_2_PI * k0, -FRAC_2_PI * r_max * k1];
    let mut opts = Options::new(config.rel_tol, config.abs_tol);
    opts.abs_tol = [config.abs_tol * y0[0].abs(), config.abs_tol * y0[1].abs()];
    let s_hi = r_max.ln();
    let s_lo = config.t_min.ln();
    let (log_cap, lin_cap) = (config.max_log_step, config.max_linear_step);
    let traj = ode::integrate(rhs, s_hi, y0, s_lo, &opts, |s| log_cap.min(lin_cap * (-s).exp()))?;

    let n = traj.knots().len();
    let mut radii: Vec<f64> = traj.knots().iter().map(|s| s.exp()).collect();
    radii[0] = config.t_min;
    radii[n - 1] = r_max;
    let phi: Vec<f64> = traj.states().iter().map(|y| y[0]).collect();
    let dphi: Vec<f64> = traj.states().iter().zip(&radii).map(|(y, r)| y[1] / r).collect();
    for i in 0..n {
        if !(phi[i] > 0.0) {
            return Err(Error::Invariant { at: radii[i], reason: "phi must be positive" });
        }
        if !(dphi[i] < 0.0) {
            return Err(Error::Invariant { at: radii[i], reason: "phi' must be negative" });
        }
    }

    let mut table = PainleveTable {
        config,
        traj,
        radii,
        phi,
        dphi,
        tails: Vec::new(),
        rule: GaussLegendre::new(TAIL_RULE),
    };
    table.tails = table.accumulate_tails()?;
    Ok(table)
}

/// Integrand triple `(J, A+, A-)` in the variable `s = ln r`.
fn tail_integrands(s: f64, y: &[f64; 2]) -> [f64; 3] {
    let r = s.exp();
    let (phi, p) = (y[0], y[1]);
    let sh = phi.sinh();
    [
        (r * sh - p) * (r * sh + p),
        -r * phi.exp_m1(),
        r * (-phi).exp_m1(),
    ]
}

impl PainleveTable {
    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Knot radii, strictly increasing from `t_min` to `r_max`.
    pub fn knots(&self) -> &[f64] {
        &self.radii
    }

    /// `phi` at the knots.
    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    /// `phi'` at the knots.
    pub fn derivs(&self) -> &[f64] {
        &self.dphi
    }

    pub fn t_min(&self) -> f64 {
        self.config.t_min
    }

    pub fn r_max(&self) -> f64 {
        self.config.r_max
    }

    /// Underlying trajectory in `s = ln r` with state `(phi, r phi')`.
    pub fn trajectory(&self) -> &DenseTrajectory<2> {
        &self.traj
    }

    pub(crate) fn check_range(&self, what: &'static str, r: f64) -> Result<()> {
        if r >= self.config.t_min && r <= self.config.r_max {
            Ok(())
        } else {
            Err(Error::OutOfRange { what, value: r, lo: self.config.t_min, hi: self.config.r_max })
        }
    }

    fn knot_index(&self, r: f64) -> core::result::Result<usize, usize> {
        self.radii.binary_search_by(|k| k.partial_cmp(&r).unwrap_or(core::cmp::Ordering::Less))
    }

    fn s_of(&self, r: f64) -> f64 {
        r.ln().clamp(self.traj.lo(), self.traj.hi())
    }

    /// State `(phi, r phi')` at radius `r` (range-checked by the caller).
    pub(crate) fn state(&self, r: f64) -> [f64; 2] {
        match self.knot_index(r) {
            Ok(i) => self.traj.states()[i],
            Err(_) => self.traj.eval(self.s_of(r)).map(|(y, _)| y).unwrap_or([f64::NAN; 2]),
        }
    }

    /// `(phi, phi', phi'')` at `r`, with `phi''` taken from the equation.
    pub fn eval(&self, r: f64) -> Result<(f64, f64, f64)> {
        self.check_range("r", r)?;
        let (phi, dphi) = match self.knot_index(r) {
            Ok(i) => (self.phi[i], self.dphi[i]),
            Err(_) => {
                let y = self.state(r);
                (y[0], y[1] / r)
            }
        };
        Ok((phi, dphi, 0.5 * (2.0 * phi).sinh() - dphi / r))
    }

    /// Relative residual of the interpolant itself: the interpolated
    /// `d(r phi')/d ln r` against `r^2 sinh(2 phi)/2`.
    pub fn interpolant_residual(&self, r: f64) -> Result<f64> {
        self.check_range("r", r)?;
        let s = self.s_of(r);
        let (y, dy) = self.traj.eval(s).ok_or(Error::OutOfRange {
            what: "r",
            value: r,
            lo: self.config.t_min,
            hi: self.config.r_max,
        })?;
        let f = rhs(s, &y);
        let scale = f[1].abs().max(dy[1].abs()).max(y[1].abs());
        Ok(((dy[1] - f[1]).abs() + (dy[0] - f[0]).abs()) / scale)
    }

    fn segment_integrals(&self, i: usize, s_a: f64, s_b: f64) -> [f64; 3] {
        let seg = &self.traj.segments()[i];
        let mut acc = [0.0; 3];
        for (s, w) in self.rule.mapped(s_a, s_b) {
            let (y, _) = seg.eval(s);
            let v = tail_integrands(s, &y);
            for k in 0..3 {
                acc[k] += w * v[k];
            }
        }
        acc
    }

    fn accumulate_tails(&self) -> Result<Vec<KnotTails>> {
        let n = self.radii.len();
        let far = far_tails(self.config.r_max)?;
        let mut tails = alloc::vec![far; n];
        let xs = self.traj.knots();
        for i in (0..n - 1).rev() {
            let d = self.segment_integrals(i, xs[i], xs[i + 1]);
            let next = tails[i + 1];
            tails[i] = KnotTails { j: next.j + d[0], a_plus: next.a_plus + d[1], a_minus: next.a_minus + d[2] };
        }
        Ok(tails)
    }

    /// Tail integrals from `r` to infinity.
    pub(crate) fn tails(&self, r: f64) -> Result<KnotTails> {
        self.check_range("t", r)?;
        match self.knot_index(r) {
            Ok(i) => Ok(self.tails[i]),
            Err(j) => {
                let i = j - 1;
                let next = self.tails[i + 1];
                let d = self.segment_integrals(i, self.s_of(r), self.traj.knots()[i + 1]);
                Ok(KnotTails { j: next.j + d[0], a_plus: next.a_plus + d[1], a_minus: next.a_minus + d[2] })
            }
        }
    }

    /// Gauss-Legendre integral of `g(r, phi, phi')` over `[a, b]`, split at knots.
    pub fn integrate_between<F: FnMut(f64, f64, f64) -> f64>(&self, a: f64, b: f64, mut g: F) -> Result<f64> {
        self.check_range("a", a)?;
        self.check_range("b", b)?;
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let (s_lo, s_hi) = (self.s_of(lo), self.s_of(hi));
        let xs = self.traj.knots();
        let first = self.traj.locate(s_lo).unwrap_or(0);
        let mut pieces = Vec::new();
        let mut i = first;
        while i < xs.len() - 1 && xs[i] < s_hi {
            let a_i = xs[i].max(s_lo);
            let b_i = xs[i + 1].min(s_hi);
            if b_i > a_i {
                let seg = &self.traj.segments()[i];
                for (s, w) in self.rule.mapped(a_i, b_i) {
                    let (y, _) = seg.eval(s);
                    let r = s.exp();
                    pieces.push(w * r * g(r, y[0], y[1] / r));
                }
            }
            i += 1;
        }
        Ok(sign * quad::pairwise_sum(&pieces))
    }
}

/// Closed-form and quadrature tails beyond `r_max`, where `phi = (2/pi) K0`.
fn far_tails(r_max: f64) -> Result<KnotTails> {
    let (k0, k1) = specfun::bessel_k01(r_max);
    // int_R^inf r (K0^2 - K1^2) dr = R^2 (K1^2 - K0^2) - R K0 K1
    let j = FRAC_2_PI * FRAC_2_PI * (r_max * r_max * (k1 * k1 - k0 * k0) - r_max * k0 * k1);
    let tol = Tolerance::new(1e-30, 1e-13);
    let phi_far = |r: f64| FRAC_2_PI * specfun::bessel_k01(r).0;
    let a_plus = quad::adaptive_to_infinity(|r| -phi_far(r).exp_m1(), r_max, tol)?.value;
    let a_minus = quad::adaptive_to_infinity(|r| (-phi_far(r)).exp_m1(), r_max, tol)?.value;
    Ok(KnotTails { j, a_plus, a_minus })
}

/// Short-distance asymptotic `-ln(-r Omega / 2)`, `Omega = ln(e^gamma r / 8)`.
pub fn small_r_reference(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 0.1) {
        return Err(domain("small_r_reference", "valid only for 0 < r < 0.1"));
    }
    Ok(-(-0.5 * r * omega(r)).ln())
}

/// `Omega(r) = ln(e^gamma r / 8)`.
pub fn omega(r: f64) -> f64 {
    EULER_GAMMA + (r / 8.0).ln()
}

/// `(phi, phi', phi'')` at `r`.
pub fn eval_phi(table: &PainleveTable, r: f64) -> Result<(f64, f64, f64)> {
    table.eval(r)
}

/// Painleve III function `eta(x) = exp(-phi(2x))`.
pub fn eta(table: &PainleveTable, x: f64) -> Result<f64> {
    let (phi, _, _) = table.eval(2.0 * x)?;
    Ok((-phi).exp())
}

/// Asymptotic `(2/pi) K0(r)`.
pub fn large_r_reference(r: f64) -> Result<f64> {
    Ok(FRAC_2_PI * specfun::bessel_k0(r)?)
}
