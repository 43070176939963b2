use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::Unboundedness;
use crate::discretization::{GraphFunction, StationaryResidual};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    FixedMass { mu: f64 },
    FixedFrequency { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    NotConverged,
    UnboundedSuspected,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::NotConverged => "not-converged",
            Status::UnboundedSuspected => "unbounded-suspected",
        })
    }
}

/// Summary of one seeded descent.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub seed: String,
    pub status: Status,
    pub value: f64,
    pub asymmetry: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateReport {
    pub kind: ProblemKind,
    pub status: Status,
    /// Energy for the fixed-mass problem, action for the fixed-frequency one.
    pub value: f64,
    pub energy: f64,
    pub action: f64,
    pub mass: f64,
    /// Given frequency, or the recovered Lagrange multiplier.
    pub omega: f64,
    pub residual: StationaryResidual,
    /// `|I_omega(u)|`.
    pub nehari_residual: f64,
    /// `|S_omega(u) - (p-2)/(2p) int |u|^p - pointwise part|`.
    pub self_consistency_gap: f64,
    /// Largest difference of `|u|` between edge 0 and any other edge.
    pub asymmetry: f64,
    pub iterations: usize,
    pub seed: u64,
    pub initial_guess: String,
    /// Every accepted step lowered the objective (up to rounding).
    pub monotone: bool,
    pub tolerance: f64,
    /// Equal-value minima reached from different seeds with different profiles.
    pub tie: bool,
    pub alternatives: Vec<BranchOutcome>,
    pub witness: Option<Unboundedness>,
    pub notes: Vec<String>,
    pub profile: GraphFunction,
}

impl GroundStateReport {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Flat `key = value` record.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        match self.kind {
            ProblemKind::FixedMass { mu } => {
                put("problem", "fixed-mass".into());
                put("target_mass", mu.to_string());
            }
            ProblemKind::FixedFrequency { omega } => {
                put("problem", "fixed-frequency".into());
                put("target_omega", omega.to_string());
            }
        }
        put("status", self.status.to_string());
        put("value", self.value.to_string());
        put("energy", self.energy.to_string());
        put("action", self.action.to_string());
        put("mass", self.mass.to_string());
        put("omega", self.omega.to_string());
        put("residual", self.residual.total.to_string());
        put("residual_interior", self.residual.interior.to_string());
        for (v, r) in self.residual.vertices.iter().enumerate() {
            put(&format!("residual_vertex.{v}"), r.to_string());
        }
        put("nehari_residual", self.nehari_residual.to_string());
        put("self_consistency_gap", self.self_consistency_gap.to_string());
        put("asymmetry", self.asymmetry.to_string());
        put("iterations", self.iterations.to_string());
        put("seed", self.seed.to_string());
        put("initial_guess", self.initial_guess.clone());
        put("monotone", self.monotone.to_string());
        put("tolerance", self.tolerance.to_string());
        put("tie", self.tie.to_string());
        for (i, alt) in self.alternatives.iter().enumerate() {
            put(&format!("alternative.{i}.seed"), alt.seed.clone());
            put(&format!("alternative.{i}.status"), alt.status.to_string());
            put(&format!("alternative.{i}.value"), alt.value.to_string());
            put(&format!("alternative.{i}.asymmetry"), alt.asymmetry.to_string());
            put(&format!("alternative.{i}.iterations"), alt.iterations.to_string());
        }
        if let Some(Unboundedness::Witness { lambda, energy, candidate }) = &self.witness {
            put("witness_lambda", lambda.to_string());
            put("witness_energy", energy.to_string());
            put("witness_candidate", candidate.clone());
        }
        for (i, n) in self.notes.iter().enumerate() {
            put(&format!("note.{i}"), n.clone());
        }
        out
    }
}

/// Reads a `key = value` record; later keys override earlier ones.
pub fn parse_key_value(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
