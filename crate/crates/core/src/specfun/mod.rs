//! Scalar special functions shared by the distribution modules.

mod beta;
mod gamma;
mod hypergeometric;
mod sampling;

pub use beta::{log_beta, reg_inc_beta};
pub use gamma::{ln_gamma, ln_gamma_signed, ln_recip_gamma_signed, log_gamma, ComplexValue};
pub use hypergeometric::gauss_2f1;
pub use sampling::sample_gamma;
