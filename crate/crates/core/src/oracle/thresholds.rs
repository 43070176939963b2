use std::f64::consts::PI;
use std::fmt::Write as _;

use super::OracleError;
use crate::graph::{ProblemSpec, VertexCondition};

/// `(sqrt(3)/2) pi`: mass of every quintic line soliton.
pub const CRITICAL_MASS_P6: f64 = 0.5 * 1.732_050_807_568_877_2 * PI;

/// Mass threshold of the quartic pointwise nonlinearity on the line.
pub const CRITICAL_MASS_Q4: f64 = 2.0;

fn invalid(msg: String) -> OracleError {
    OracleError::InvalidArgument(msg)
}

/// Bottom of the linear spectrum at a delta vertex of degree `degree`:
/// `alpha^2 / degree^2` when attractive, 0 otherwise.
pub fn omega_min_delta(alpha: f64, degree: usize) -> Result<f64, OracleError> {
    if !alpha.is_finite() || degree == 0 {
        return Err(invalid(format!("need finite alpha and degree>=1, got alpha={alpha}, degree={degree}")));
    }
    Ok(if alpha > 0.0 { (alpha / degree as f64).powi(2) } else { 0.0 })
}

/// `4 / beta^2`: existence threshold of the odd delta-prime state.
pub fn omega_min_delta_prime(beta: f64) -> Result<f64, OracleError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    Ok(4.0 / (beta * beta))
}

/// `(4/beta^2) p/(p-2)`: onset of the asymmetric delta-prime pair.
pub fn omega_star_delta_prime(beta: f64, p: f64) -> Result<f64, OracleError> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(invalid(format!("p>2 required, got p={p}")));
    }
    Ok(omega_min_delta_prime(beta)? * p / (p - 2.0))
}

/// `v^2 / (tau^2 + 1)^2`.
pub fn omega_min_ft(tau: f64, v: f64) -> Result<f64, OracleError> {
    if !tau.is_finite() || tau == 0.0 || tau == 1.0 {
        return Err(invalid(format!("tau must be real and not 0 or 1, got {tau}")));
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("v must be positive, got {v}")));
    }
    Ok((v / (tau * tau + 1.0)).powi(2))
}

/// `sqrt(3) (pi/2 - arcsin(sqrt(3/7)))`: the only mass with ground states
/// for `p = 6, q = 4` on the line.
pub fn mu_star_doubly_critical() -> f64 {
    3f64.sqrt() * (0.5 * PI - (3.0f64 / 7.0).sqrt().asin())
}

/// Frequency below which no stationary state is expected, for problems on
/// a star graph (a single vertex). `None` when the graph has more vertices.
pub fn linear_threshold(problem: &ProblemSpec) -> Result<Option<f64>, OracleError> {
    if problem.graph.vertex_count() != 1 || !problem.graph.is_star() {
        return Ok(None);
    }
    let v = problem.graph.vertex_ids().next().expect("one vertex");
    let degree = problem.graph.degree(v);
    let omega = match *problem.condition(v) {
        VertexCondition::Kirchhoff | VertexCondition::Dipole { .. } | VertexCondition::NonlinearDelta { .. } => 0.0,
        VertexCondition::Delta { alpha } => omega_min_delta(alpha, degree)?,
        VertexCondition::DeltaPrime { beta } => omega_min_delta_prime(beta)?,
        VertexCondition::FulopTsutsui { tau, v } => omega_min_ft(tau, v)?,
    };
    Ok(Some(omega))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEntry {
    pub name: &'static str,
    pub parameters: String,
    pub value: f64,
}

/// The constant table at the standard parameter set
/// (alpha=1, beta=1, p=4, tau=2, v=1).
pub fn thresholds() -> Vec<ThresholdEntry> {
    let entry = |name, parameters: &str, value: Result<f64, OracleError>| ThresholdEntry {
        name,
        parameters: parameters.to_string(),
        value: value.expect("standard parameters are in range"),
    };
    vec![
        entry("omega_min_delta", "alpha=1 degree=2", omega_min_delta(1.0, 2)),
        entry("omega_min_delta_prime", "beta=1", omega_min_delta_prime(1.0)),
        entry("omega_star_delta_prime", "beta=1 p=4", omega_star_delta_prime(1.0, 4.0)),
        entry("omega_min_ft", "tau=2 v=1", omega_min_ft(2.0, 1.0)),
        entry("critical_mass_p6", "", Ok(CRITICAL_MASS_P6)),
        entry("critical_mass_q4", "", Ok(CRITICAL_MASS_Q4)),
        entry("mu_star_doubly_critical", "", Ok(mu_star_doubly_critical())),
    ]
}

pub fn thresholds_csv(entries: &[ThresholdEntry]) -> String {
    let mut out = String::from("name,parameters,value\n");
    for e in entries {
        let _ = writeln!(out, "{},{},{}", e.name, e.parameters, e.value);
    }
    out
}
