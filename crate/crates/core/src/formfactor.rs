//! Truncated form-factor expansion of the boundary magnetization,
//! `sigma(t) / sigma0 = exp(sum_k f_k / k)`, used as an independent oracle at
//! moderate and large `t`.
//!
//! With `c = ch u` and `R(c) = (c + 1 - lambda) / (c - 1 + lambda)`,
//!
//! ```text
//! f_k = -(1/pi^k) int_0^inf du_1 .. du_k  prod_l (c_l - 1) R(c_l) e^{-t c_l} / (c_l + c_{l+1})
//! ```
//!
//! with the cyclic closure `u_{k+1} = u_1`. The `k`-fold tensor-product
//! Gauss-Legendre sum of this cyclic integrand equals `Tr(A^k)` for the
//! `n x n` matrix `A_ij = w_i (c_i - 1) R(c_i) e^{-t c_i} / (c_i + c_j)`, which is
//! how it is evaluated: identical sum, `O(k n^3)` work instead of `O(n^k)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent methods shadow these when std is linked
use num_traits::Float;

use crate::error::domain;
use crate::quad::{pairwise_sum, GaussLegendre};
use crate::{Error, Result};

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 4;

/// Default quadrature order per dimension.
pub const DEFAULT_NODES: usize = 64;

/// Below this distance the expansion is flagged as unreliable.
pub const MIN_RELIABLE_T: f64 = 0.5;

/// Truncation bounds above this value raise the warning flag.
pub const WARN_BOUND: f64 = 1e-3;

/// Oracle value of `sigma(t, lambda) / sigma0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFactorEstimate {
    pub t: f64,
    pub lambda: f64,
    /// Highest `k` included.
    pub order: usize,
    /// `exp(sum f_k / k)`.
    pub value: f64,
    /// `d/dt` of `ln value`.
    pub log_derivative: f64,
    /// `f_1 .. f_K`.
    pub terms: Vec<f64>,
    /// Estimate of `|sum_{k > K} f_k / k|`.
    pub trunc_bound: f64,
    pub nodes: usize,
    /// Set when `t < 0.5` or the bound exceeds `1e-3`.
    pub warning: bool,
}

/// Cutoff `U` with `e^{-t ch U} = e^{-t - 40}`.
pub fn u_cut(t: f64) -> f64 {
    (1.0 + 40.0 / t).acosh()
}

/// `(c - 1) R(c)` with the `lambda = 0` cancellation done analytically.
/// `cm1 = c - 1` is passed separately to keep precision near `u = 0`.
fn weight_factor(cm1: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        cm1 + 2.0
    } else {
        cm1 * (cm1 + 2.0 - lambda) / (cm1 + lambda)
    }
}

/// Kernel matrix and the node values `c_i`.
struct Kernel {
    n: usize,
    a: Vec<f64>,
    c: Vec<f64>,
}

impl Kernel {
    fn new(t: f64, lambda: f64, nodes: usize) -> Self {
        let rule = GaussLegendre::new(nodes);
        let mut c = Vec::with_capacity(nodes);
        let mut d = Vec::with_capacity(nodes);
        for (u, w) in rule.mapped(0.0, u_cut(t)) {
            let sh = (0.5 * u).sinh();
            let cm1 = 2.0 * sh * sh;
            let ci = 1.0 + cm1;
            c.push(ci);
            d.push(w * weight_factor(cm1, lambda) * (-t * ci).exp() / PI);
        }
        let mut a = alloc::vec![0.0; nodes * nodes];
        for i in 0..nodes {
            for j in 0..nodes {
                a[i * nodes + j] = d[i] / (c[i] + c[j]);
            }
        }
        Self { n: nodes, a, c }
    }

    fn matmul(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = alloc::vec![0.0; n * n];
        let mut row = alloc::vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    row[k] = x[i * n + k] * y[k * n + j];
                }
                out[i * n + j] = pairwise_sum(&row);
            }
        }
        out
    }

    fn trace(&self, x: &[f64]) -> f64 {
        let diag: Vec<f64> = (0..self.n).map(|i| x[i * self.n + i]).collect();
        pairwise_sum(&diag)
    }

    /// `Tr(X diag(c))`.
    fn trace_weighted(&self, x: &[f64]) -> f64 {
        let diag: Vec<f64> = (0..self.n).map(|i| x[i * self.n + i] * self.c[i]).collect();
        pairwise_sum(&diag)
    }

    /// `(f_k, f_k')` for `k = 1..=order`.
    fn terms(&self, order: usize) -> (Vec<f64>, Vec<f64>) {
        let mut f = Vec::with_capacity(order);
        let mut df = Vec::with_capacity(order);
        let mut power = self.a.clone();
        for k in 1..=order {
            if k > 1 {
                power = self.matmul(&power, &self.a);
            }
            // d/dt Tr(A^k) = -k Tr(A^k diag(c)) since dA/dt = -diag(c) A.
            f.push(-self.trace(&power));
            df.push(k as f64 * self.trace_weighted(&power));
        }
        (f, df)
    }
}

fn check_args(k: usize, t: f64, lambda: f64, nodes: usize) -> Result<()> {
    if k == 0 || k > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: k, max: MAX_ORDER });
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("ff_term", "t must be positive and finite"));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain("ff_term", "lambda must be non-negative and finite"));
    }
    if nodes < 2 {
        return Err(domain("ff_term", "at least two quadrature nodes are needed"));
    }
    Ok(())
}

/// The `k`-th term `f_k(t, lambda)`.
pub fn ff_term(k: usize, t: f64, lambda: f64, nodes: usize) -> Result<f64> {
    check_args(k, t, lambda, nodes)?;
    Ok(Kernel::new(t, lambda, nodes).terms(k).0[k - 1])
}

/// `(f_k, d f_k / dt)` for `k = 1..=order`.
pub fn ff_terms_with_derivatives(order: usize, t: f64, lambda: f64, nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_args(order, t, lambda, nodes)?;
    Ok(Kernel::new(t, lambda, nodes).terms(order))
}

/// Truncated expansion `exp(sum_{k <= K} f_k / k)` with its truncation bound.
pub fn ff_magnetization(t: f64, lambda: f64, order: usize, nodes: usize) -> Result<FormFactorEstimate> {
    let (terms, dterms) = ff_terms_with_derivatives(order, t, lambda, nodes)?;
    let log_value: f64 = terms.iter().enumerate().map(|(i, f)| f / (i + 1) as f64).sum();
    let log_derivative: f64 = dterms.iter().enumerate().map(|(i, f)| f / (i + 1) as f64).sum();
    let last = terms[order - 1].abs();
    let rho = if order >= 2 {
        last / terms[order - 2].abs()
    } else {
        (-t).exp()
    };
    let trunc_bound = if rho < 1.0 && rho.is_finite() {
        (last / order as f64 * rho / (1.0 - rho)).max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    };
    let warning = t < MIN_RELIABLE_T || trunc_bound > WARN_BOUND;
    Ok(FormFactorEstimate {
        t,
        lambda,
        order,
        value: log_value.exp(),
        log_derivative,
        terms,
        trunc_bound,
        nodes,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive, Tolerance};

    #[test]
    fn first_term_at_unit_lambda() {
        let t = 1.3;
        let q = adaptive(
            |u| {
                let c = u.cosh();
                (c - 1.0) / (2.0 * c) * (-t * c).exp()
            },
            0.0,
            u_cut(t),
            Tolerance::new(1e-16, 1e-13),
        )
        .unwrap();
        let f1 = ff_term(1, t, 1.0, DEFAULT_NODES).unwrap();
        assert!((f1 + q.value / PI).abs() < 1e-10, "{f1} {}", q.value);
    }

    #[test]
    fn brute_force_tensor_sum_matches_trace() {
        let (t, lambda, n) = (0.8, 2.5, 12);
        let rule = GaussLegendre::new(n);
        let pts: Vec<(f64, f64)> = rule.mapped(0.0, u_cut(t)).collect();
        let g = |u: f64, w: f64| {
            let c = u.cosh();
            w * (c - 1.0) * (c + 1.0 - lambda) / (c - 1.0 + lambda) * (-t * c).exp() / PI
        };
        let mut sum3 = 0.0;
        for &(u1, w1) in &pts {
            for &(u2, w2) in &pts {
                for &(u3, w3) in &pts {
                    let (c1, c2, c3) = (u1.cosh(), u2.cosh(), u3.cosh());
                    sum3 += g(u1, w1) * g(u2, w2) * g(u3, w3) / ((c1 + c2) * (c2 + c3) * (c3 + c1));
                }
            }
        }
        let f3 = ff_term(3, t, lambda, n).unwrap();
        assert!((f3 + sum3).abs() < 1e-14 * sum3.abs().max(1e-300) * 1e3, "{f3} {sum3}");
    }

    #[test]
    fn order_limits() {
        assert!(matches!(ff_term(5, 1.0, 1.0, 8), Err(Error::UnsupportedOrder { .. })));
        assert!(ff_term(0, 1.0, 1.0, 8).is_err());
        assert!(ff_term(1, 0.0, 1.0, 8).is_err());
        assert!(ff_term(1, 1.0, -1.0, 8).is_err());
    }

    #[test]
    fn lambda_zero_is_finite() {
        let f = ff_term(2, 1.0, 0.0, 33).unwrap();
        assert!(f.is_finite() && f < 0.0);
    }
}
