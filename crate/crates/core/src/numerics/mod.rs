//! Special functions and quadrature rules.

mod bessel;
mod gamma;
mod hypergeometric;
mod quadrature;

pub use bessel::{bessel_i, bessel_i_scaled, BesselOrder};
pub use gamma::{
    digamma, gamma_fn, ln_factorial, ln_gamma, lower_incomplete_gamma, regularized_lower_gamma,
    regularized_upper_gamma, GAMMA_MAX_ARG,
};
pub use hypergeometric::{divergent_2f1_constant, gauss_2f1, kummer_1f1, DEFAULT_2F1_DELTA};
pub use quadrature::{
    chebyshev_nodes, fejer_rule, laguerre_rule, QuadKind, QuadRule, MAX_CHEBYSHEV_ORDER, MAX_LAGUERRE_ORDER,
    NEGLIGIBLE_LOG_WEIGHT,
};
