//! Closed-form solitons, explicit stationary states from secular equations,
//! and the threshold constants the numerics are checked against.

pub mod quad;
mod secular;
mod soliton;
mod thresholds;

use thiserror::Error;

pub use secular::{delta_prime_branches, delta_shift, Branch, SecularSolution, Tail};
pub use soliton::{soliton_energy, soliton_energy_at_mass, soliton_mass, soliton_omega_at_mass, Soliton};
pub use thresholds::{
    linear_threshold, mu_star_doubly_critical, omega_min_delta, omega_min_delta_prime, omega_min_ft,
    omega_star_delta_prime, thresholds, thresholds_csv, ThresholdEntry, CRITICAL_MASS_P6, CRITICAL_MASS_Q4,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no solution: {0}")]
    NoSolution(String),
}
