//! Local magnetization of the massive boundary Ising model.
//!
//! The one-point function of the spin field on the half-plane with a boundary
//! magnetic field is obtained as `sigma(t, lambda) = u(t, lambda) * sigma_free(t)`,
//! where `u` solves a second-order linear ODE whose coefficients are built from
//! the Painleve III transcendent `phi`, the solution of the radial sinh-Gordon
//! equation `phi'' + phi'/r = sinh(2 phi) / 2` decaying like `(2/pi) K0(r)`.
//!
//! Everything here is computed at unit mass (`m = 1`); dimensionful inputs are
//! mapped through [`specfun::to_dimensionless`] and [`specfun::sigma0`].
//!
//! Layout:
//!
//! * [`specfun`]: Bessel `K0`/`K1`, Gamma, Tricomi `Psi`, physical constants.
//! * [`painleve`]: the transcendent `phi` as a dense [`painleve::PainleveTable`].
//! * [`correlators`]: tail integrals, bulk mirror two-point functions, free and
//!   fixed closed forms.
//! * [`boundary`]: the magnetization ODE and its branches.
//! * [`formfactor`]: the truncated form-factor expansion, used as an oracle.
//! * [`ode`], [`quad`]: numerical machinery shared by the above.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]
// Tableau and rule coefficients are kept as published.
#![allow(clippy::excessive_precision)]
// `!(x > 0.0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod correlators;
mod error;
pub mod formfactor;
pub mod ode;
pub mod painleve;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
