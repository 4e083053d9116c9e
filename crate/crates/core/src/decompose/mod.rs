//! Polynomial decompositions used by the integrators: powers of linear forms
//! and Handelman certificates.

mod handelman;
mod linear_forms;

pub use handelman::{
    certificate_pow, find_certificate, handelman_lp, handelman_lp_weighted, verify_certificate, HandelmanCertificate,
    HandelmanLp, HandelmanMonomial, Objective,
};
pub use linear_forms::{
    direction_table, linear_forms_to_polynomial, monomial_to_linear_forms, poly_to_linear_forms, DirectionTable,
    LinearFormPower,
};
