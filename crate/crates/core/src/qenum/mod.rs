//! q-enumeration of depth-2 triangles by ψ, and the analyses built on it.

pub mod analysis;
pub mod hankel;
pub mod t2;
pub mod transfer;

pub use analysis::{
    a1_check, check_law, fit_coefficient_polynomial, leading_coefficient_check, log_concavity_check,
    moments_to_cumulants, normalized_moments, palindrome_check,
};
pub use hankel::{hankel_determinant, hankel_report, smallest_positive_root, HankelReport};
pub use t2::{h_sigma_polynomial, p_polynomial, t2_q_polynomial, t2_q_polynomial_exhaustive};
pub use transfer::{low_coefficients, t2_q_polynomial_transfer, LowCoefficients};
