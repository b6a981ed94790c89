//! Discrete orthogonal polynomials on the lattice `k/N` with varying weight `e^{-N V(x)}`.
//!
//! The crate is `no_std` (it needs `alloc`). It contains
//!
//! * [`exact`]: lattice truncation, Stieltjes orthogonalization, evaluation and zero counting;
//! * [`equilibrium`]: the constrained log-energy problem (grid QP and analytic edge refinement);
//! * [`gfunction`]: the complex log-potential, phases, periods and edge maps;
//! * [`theta`]: the hyperelliptic surface, theta function, Abel map and model functions;
//! * [`airy`] and [`asymptotics`]: every large-N formula for recurrence data and `P_N`.
#![no_std]

extern crate alloc;

pub mod airy;
pub mod asymptotics;
pub mod equilibrium;
mod dd;
mod error;
pub mod exact;
pub mod gfunction;
pub mod linalg;
mod num;
pub mod potential;
pub mod quad;
pub mod theta;

pub use error::{Error, Result};
pub use num::{Kahan, Side, C64};
pub use potential::Potential;

pub(crate) mod prelude {
    pub use crate::num::{Side, C64};
    pub use num_traits::Float;
}
