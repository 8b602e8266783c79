use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error in {routine}: {detail}")]
    Domain {
        routine: &'static str,
        detail: &'static str,
    },
    /// A point lies outside the range covered by a tabulated object.
    #[error("{what} = {value} outside the tabulated range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    /// The result would underflow or overflow double precision.
    #[error("{routine}: result not representable for argument {arg}")]
    Unrepresentable { routine: &'static str, arg: f64 },
    /// An adaptive integrator failed; `at` is the abscissa where it stopped.
    #[error("ODE solver failure at x = {at}: {reason}")]
    Solver { at: f64, reason: &'static str },
    /// An invariant of a computed object was violated.
    #[error("invariant violated at x = {at}: {reason}")]
    Invariant { at: f64, reason: &'static str },
    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate} with error {error}")]
    Quadrature { estimate: f64, error: f64 },
    /// Requested order is not supported.
    #[error("unsupported order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },
    /// Configuration rejected by validation.
    #[error("invalid configuration: {0}")]
    Config(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(routine: &'static str, detail: &'static str) -> Error {
    Error::Domain { routine, detail }
}
