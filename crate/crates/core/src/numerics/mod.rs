//! Log-domain scalars, special functions and log-determinants.

mod incgamma;
mod linalg;
mod logvalue;
mod quadrature;
mod special;
mod summation;

pub use incgamma::{regularized_gamma, IncompleteGamma, MAX_ARGUMENT};
pub use linalg::{
    check_hermitian, hermitian_logdet, hermitian_logdet_with, lu_determinant, ComplexMatrix, LogDetOptions,
    PivotedCholesky,
};
pub use logvalue::{wrap_phase, LogValue, PhaseValue, Sign};
pub use quadrature::{gauss_legendre, integrate_composite};
pub use special::{
    log_factorial, log_factorial_ratio, log_gamma, sum_log_factorials, zeta_prime_minus_one, GLAISHER_KINKELIN,
};
pub use summation::{compensated_sum, CompensatedSum, ComplexCompensatedSum};
