//! Ground states by preconditioned gradient descent: energy at fixed mass on
//! the mass sphere, and action at fixed frequency on the Nehari manifold.

mod descent;
mod mass;
mod nehari;
mod precond;
mod report;
mod seeds;
mod unbounded;

use thiserror::Error;

use crate::discretization::{DiscretizationError, GraphFunction};
use crate::oracle::OracleError;

pub use mass::minimize_energy_mass;
pub use nehari::{minimize_action_nehari, nehari_rescale};
pub use precond::Preconditioner;
pub use report::{parse_key_value, BranchOutcome, GroundStateReport, ProblemKind, Status};
pub use seeds::{seed_profiles, Seed};
pub use unbounded::{detect_unboundedness, Unboundedness, DIVERGENCE_FLOOR};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no stationary state expected: omega={omega} is not above the threshold {threshold}")]
    BelowThreshold { omega: f64, threshold: f64 },
    #[error("degenerate quadratic form: Q(u) <= 0 for the initial profile")]
    DegenerateQuadraticForm,
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Line soliton shifted by one unit on every edge; for a delta-prime
    /// vertex an odd seed and an asymmetric seed (left amplitude twice the right).
    Soliton,
    /// Gaussian bumps with random amplitude, centre and width per edge.
    RandomBump,
    Profile(GraphFunction),
}

impl InitialGuess {
    pub fn label(&self) -> &'static str {
        match self {
            InitialGuess::Soliton => "soliton",
            InitialGuess::RandomBump => "random-bump",
            InitialGuess::Profile(_) => "profile",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Convergence is declared when the stationary residual drops below this.
    pub tolerance: f64,
    /// First trial step of the backtracking line search.
    pub initial_step: f64,
    pub armijo: f64,
    /// Line search gives up below this step.
    pub min_step: f64,
    pub initial_guess: InitialGuess,
    pub seed: u64,
    /// Restrict iterates to edge-permutation symmetric functions on a star graph.
    pub symmetrize: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 20_000,
            tolerance: 1e-8,
            initial_step: 0.5,
            armijo: 1e-4,
            min_step: 1e-12,
            initial_guess: InitialGuess::Soliton,
            seed: 0,
            symmetrize: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidOptions(m));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad(format!("initial_step must be positive, got {}", self.initial_step));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad(format!("armijo constant must lie in (0,1), got {}", self.armijo));
        }
        if !(self.min_step > 0.0 && self.min_step < self.initial_step) {
            return bad(format!("min_step must lie in (0, initial_step), got {}", self.min_step));
        }
        Ok(())
    }
}
