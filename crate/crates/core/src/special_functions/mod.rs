//! Gamma/Beta evaluation and quadrature for the fractional weight `(1−t)^{β−1}`.

#[allow(clippy::excessive_precision)]
mod gamma;
mod quadrature;

pub use gamma::{beta_fn, fractional_moment, log_gamma};
pub use quadrature::{
    fractional_integral, gauss_jacobi_rule, QuadratureRule, DEFAULT_QUAD_NODES, MAX_QUAD_NODES,
};

pub(crate) use gamma::{check_beta, fractional_moment_unchecked, ln_gamma_unchecked};
