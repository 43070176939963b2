use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{solve, ExperimentError, GridPolicy, Target};
use crate::discretization::{Discretization, GridParams};
use crate::graph::{line_graph, ProblemSpec, VertexCondition};
use crate::solver::{minimize_energy_mass, GroundStateReport, SolverError, SolverOptions, Status};

/// Mass-threshold probes spread log-uniformly over the range before bisecting.
const PROBES: usize = 5;

/// Margin, relative to the soliton level, a state must clear to count as a
/// ground state.
const MARGIN: f64 = 1e-6;

/// Energy of the discrete soliton of mass `mu`: the Kirchhoff-line minimizer
/// on the same grid, so that the comparison is free of discretization bias.
pub fn soliton_level(p: f64, mu: f64, grid: GridParams, opts: &SolverOptions) -> Result<f64, ExperimentError> {
    let disc = Discretization::new(ProblemSpec::uniform(line_graph(), VertexCondition::Kirchhoff, p), grid)?;
    let report = minimize_energy_mass(&disc, mu, opts)?;
    if !report.converged() {
        return Err(SolverError::InvalidArgument(format!(
            "soliton reference at mass {mu} ended {}",
            report.status
        ))
        .into());
    }
    Ok(report.energy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredicatePoint {
    pub mu: f64,
    pub holds: bool,
    pub status: Status,
    pub energy: f64,
    pub reference: f64,
}

/// Whether the computed minimizer at mass `mu` converged and beats the
/// soliton level by the margin, together with the underlying report.
pub fn existence_predicate(
    problem: &ProblemSpec,
    policy: &GridPolicy,
    mu: f64,
    opts: &SolverOptions,
) -> Result<(PredicatePoint, GroundStateReport), ExperimentError> {
    let target = Target::Mass(mu);
    let (disc, report) = solve(problem, policy, target, opts)?;
    let reference = soliton_level(problem.p, mu, *disc.grid().params(), opts)?;
    let holds = report.converged() && report.energy < reference - MARGIN * reference.abs();
    let point = PredicatePoint {
        mu,
        holds,
        status: report.status,
        energy: report.energy,
        reference,
    };
    Ok((point, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Ground states for masses below the threshold.
    ExistsBelow,
    /// Ground states for masses above the threshold.
    ExistsAbove,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum BracketOutcome {
    Threshold {
        lo: f64,
        hi: f64,
        orientation: Orientation,
        points: Vec<PredicatePoint>,
        notes: Vec<String>,
    },
    /// The predicate took the value `holds` at every probe.
    NoThreshold { holds: bool, points: Vec<PredicatePoint> },
}

impl BracketOutcome {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let points = match self {
            BracketOutcome::Threshold {
                lo,
                hi,
                orientation,
                points,
                notes,
            } => {
                let _ = writeln!(out, "result = threshold");
                let _ = writeln!(out, "mu_lo = {lo}");
                let _ = writeln!(out, "mu_hi = {hi}");
                let orientation = match orientation {
                    Orientation::ExistsBelow => "exists-below",
                    Orientation::ExistsAbove => "exists-above",
                };
                let _ = writeln!(out, "orientation = {orientation}");
                for (i, n) in notes.iter().enumerate() {
                    let _ = writeln!(out, "note.{i} = {n}");
                }
                points
            }
            BracketOutcome::NoThreshold { holds, points } => {
                let _ = writeln!(out, "result = no threshold in range");
                let _ = writeln!(out, "predicate = {holds}");
                points
            }
        };
        for (i, p) in points.iter().enumerate() {
            let _ = writeln!(
                out,
                "point.{i} = mu={} holds={} status={} energy={} reference={}",
                p.mu, p.holds, p.status, p.energy, p.reference
            );
        }
        out
    }
}

/// Brackets the mass where the existence predicate flips: probes the range,
/// then bisects the first interval whose ends disagree `steps` times, so the
/// returned interval is at most `(hi - lo) / 2^steps` wide.
pub fn bracket_mass_threshold(
    problem: &ProblemSpec,
    policy: &GridPolicy,
    range: (f64, f64),
    steps: usize,
    opts: &SolverOptions,
) -> Result<BracketOutcome, ExperimentError> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(ExperimentError::Usage(format!("mass range must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if steps == 0 {
        return Err(ExperimentError::Usage("bisection needs at least one step".into()));
    }
    let ratio = hi / lo;
    let masses: Vec<f64> = (0..PROBES)
        .map(|i| match i {
            0 => lo,
            i if i == PROBES - 1 => hi,
            i => lo * ratio.powf(i as f64 / (PROBES - 1) as f64),
        })
        .collect();
    let probes: Vec<PredicatePoint> = masses
        .par_iter()
        .map(|&mu| existence_predicate(problem, policy, mu, opts).map(|(p, _)| p))
        .collect::<Result<_, _>>()?;
    let flips: Vec<usize> = (1..probes.len()).filter(|&i| probes[i].holds != probes[i - 1].holds).collect();
    let Some(&first) = flips.first() else {
        return Ok(BracketOutcome::NoThreshold {
            holds: probes[0].holds,
            points: probes,
        });
    };
    let mut notes = Vec::new();
    if flips.len() > 1 {
        notes.push(format!("predicate flips {} times across the probes; first flip bisected", flips.len()));
    }
    let below = probes[first - 1].holds;
    let orientation = if below {
        Orientation::ExistsBelow
    } else {
        Orientation::ExistsAbove
    };
    let (mut a, mut b) = (probes[first - 1].mu, probes[first].mu);
    let mut points = probes;
    while b - a > (hi - lo) / 2f64.powi(steps as i32) {
        let mid = 0.5 * (a + b);
        let (point, _) = existence_predicate(problem, policy, mid, opts)?;
        if point.holds == below {
            a = mid;
        } else {
            b = mid;
        }
        points.push(point);
    }
    Ok(BracketOutcome::Threshold {
        lo: a,
        hi: b,
        orientation,
        points,
        notes,
    })
}
