//! Runs behind the command-line tool: presets, single solves, parameter
//! scans, mass-threshold brackets and stability curves.

mod bracket;
mod manifest;
mod presets;
mod scan;

use std::fmt::Write as _;

use thiserror::Error;

pub use bracket::{
    bracket_mass_threshold, existence_predicate, soliton_level, BracketOutcome, Orientation, PredicatePoint,
};
pub use manifest::RunManifest;
pub use presets::{preset, presets, Preset, PRESET_NAMES};
pub use scan::{scan, scan_csv, with_parameter, ParamGrid, RowData, ScanParam, ScanRow};

use crate::config::ConfigError;
use crate::discretization::{Discretization, DiscretizationError, GridParams};
use crate::graph::{ProblemSpec, VertexCondition};
use crate::oracle::{soliton_omega_at_mass, OracleError};
use crate::solver::{minimize_action_nehari, minimize_energy_mass, GroundStateReport, SolverError, SolverOptions};
use crate::stability::{
    action_curve, classify, curve_csv, derivative_identity, mass_curve_slope, slope_sign_changes, BranchCurve,
    BranchSelector, Classification, CurveOptions, IdentityCheck, MassSlope, StabilityError, Verdict,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

/// Relative asymmetry above which a state counts as asymmetric.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-4;

/// Either constraint of the ground-state problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Mass(f64),
    Omega(f64),
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Mass(mu) => write!(f, "mass={mu}"),
            Target::Omega(omega) => write!(f, "omega={omega}"),
        }
    }
}

/// How the grid is chosen for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPolicy {
    Fixed(GridParams),
    /// Spacing `h_ref / sqrt(omega)` and halflines of `24 / sqrt(omega)` at the
    /// target frequency; for a mass target the frequency of the line soliton
    /// of that mass stands in, with halflines twice as long.
    Adapted { h_ref: f64 },
}

impl GridPolicy {
    pub const DEFAULT_H_REF: f64 = 0.02;

    pub fn params(&self, problem: &ProblemSpec, target: Target) -> Result<GridParams, ExperimentError> {
        let h_ref = match self {
            GridPolicy::Fixed(g) => return Ok(*g),
            GridPolicy::Adapted { h_ref } => *h_ref,
        };
        let (omega, length_omega) = match target {
            Target::Omega(omega) => (omega, omega),
            Target::Mass(mu) => {
                let omega = if problem.p < 6.0 {
                    soliton_omega_at_mass(problem.p, mu)?
                } else {
                    1.0
                };
                (omega, 0.25 * omega)
            }
        };
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(ExperimentError::Usage(format!("cannot adapt a grid to omega={omega}")));
        }
        let h = h_ref / omega.sqrt();
        Ok(GridParams::for_frequency(h, length_omega)?)
    }

    pub fn describe(&self) -> String {
        match self {
            GridPolicy::Fixed(g) => format!("h={} L={}", g.h(), g.halfline_length()),
            GridPolicy::Adapted { h_ref } => format!("adapted h_ref={h_ref}"),
        }
    }
}

/// One ground-state solve on the grid chosen by `policy`.
pub fn solve(
    problem: &ProblemSpec,
    policy: &GridPolicy,
    target: Target,
    opts: &SolverOptions,
) -> Result<(Discretization, GroundStateReport), ExperimentError> {
    let disc = Discretization::new(problem.clone(), policy.params(problem, target)?)?;
    let report = match target {
        Target::Mass(mu) => minimize_energy_mass(&disc, mu, opts)?,
        Target::Omega(omega) => minimize_action_nehari(&disc, omega, opts)?,
    };
    Ok((disc, report))
}

/// Branch label of a computed state: `asymmetric` when the edge profiles
/// differ, otherwise `odd` at a delta-prime vertex, `even` on the line,
/// `n-tail` on larger stars and `ground` elsewhere.
pub fn branch_label(problem: &ProblemSpec, report: &GroundStateReport) -> &'static str {
    let graph = &problem.graph;
    if !graph.is_star() {
        return "ground";
    }
    if report.asymmetry > ASYMMETRY_TOLERANCE * report.profile.sup_norm() {
        return "asymmetric";
    }
    match problem.conditions[0] {
        VertexCondition::DeltaPrime { .. } => "odd",
        c if !c.is_continuous() => "ground",
        _ if graph.edge_count() == 2 => "even",
        _ => "n-tail",
    }
}

/// Action curve of one branch with every diagnostic derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRun {
    pub curve: BranchCurve,
    pub classification: Option<Classification>,
    pub slopes: Vec<MassSlope>,
    pub slope_changes: Vec<f64>,
    pub identity: Vec<IdentityCheck>,
    /// Mass-slope sign changes are only conjectured to mark a stability change.
    pub conjecture: bool,
}

pub fn run_stability(
    problem: &ProblemSpec,
    policy: &GridPolicy,
    selector: BranchSelector,
    grid: &ParamGrid,
    opts: &SolverOptions,
) -> Result<StabilityRun, ExperimentError> {
    let h = match policy {
        GridPolicy::Fixed(g) => g.h(),
        GridPolicy::Adapted { h_ref } => *h_ref,
    };
    let curve_opts = CurveOptions {
        h,
        solver: opts.clone(),
    };
    let curve = action_curve(problem, selector, (grid.lo, grid.hi), grid.count, &curve_opts)?;
    let classification = classify(&curve).ok();
    let slopes = mass_curve_slope(&curve).unwrap_or_default();
    let slope_changes = slope_sign_changes(&slopes);
    let identity = derivative_identity(&curve);
    let conjecture = problem.p > 6.0
        && problem
            .conditions
            .iter()
            .any(|c| matches!(c, VertexCondition::FulopTsutsui { .. }));
    Ok(StabilityRun {
        curve,
        classification,
        slopes,
        slope_changes,
        identity,
        conjecture,
    })
}

impl StabilityRun {
    pub fn csv(&self) -> String {
        curve_csv(&self.curve, self.classification.as_ref())
    }

    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("branch", self.curve.selector.to_string());
        put("source", if self.curve.analytic { "explicit" } else { "numerical" }.into());
        put("samples", self.curve.samples.len().to_string());
        put("verdict_kind", "GSS-surrogate".into());
        match &self.classification {
            Some(c) => {
                put("tolerance", c.tolerance.to_string());
                for v in [Verdict::Stable, Verdict::Unstable, Verdict::Undecided] {
                    let n = c.verdicts.iter().filter(|l| l.verdict == v).count();
                    put(&format!("count.{v}"), n.to_string());
                }
                for (i, t) in c.transitions.iter().enumerate() {
                    put(&format!("transition.{i}.omega_estimate"), t.omega.to_string());
                    put(&format!("transition.{i}.kind"), format!("{}->{}", t.from, t.to));
                }
            }
            None => put("classification", "too few samples".into()),
        }
        let label = if self.conjecture { "CONJECTURE" } else { "estimate" };
        for (i, w) in self.slope_changes.iter().enumerate() {
            put(&format!("mass_slope_change.{i}.omega"), w.to_string());
            put(&format!("mass_slope_change.{i}.label"), label.into());
        }
        let worst = self.identity.iter().map(|c| c.relative_error).fold(0.0, f64::max);
        put("derivative_identity_max_error", worst.to_string());
        for (i, n) in self.curve.notes.iter().enumerate() {
            put(&format!("note.{i}"), n.clone());
        }
        out
    }
}
