//! Spectral analysis of Sturm-Liouville problems whose weight is the
//! distributional derivative of a self-similar function.
//!
//! The crate is organized around four subsystems:
//!
//! - [`selfsim`]: self-similar functions in L2\[0,1\] described by iterated
//!   function system parameters, with exact moment evaluation, spectral
//!   order, and arithmetic self-similarity detection.
//! - [`renewal`]: discrete and continuous renewal equations (scalar and
//!   coupled), solved by forward recursion, with the omega/J limit.
//! - [`pencil`]: Galerkin discretization of the operator pencil on
//!   IFS-aligned grids, inertia-index counting via Sturm pivots, and
//!   eigenvalue localization by bisection.
//! - [`asymptotics`]: eigenvalue-count asymptotics: averaged index profiles,
//!   rigorous pointwise bounds for the periodic amplitude functions s+/s-,
//!   renewal-based estimates, and growth-exponent fits.

pub mod asymptotics;
pub mod pencil;
pub mod renewal;
pub mod selfsim;
