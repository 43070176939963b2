//! Stability surrogates from the action curve `d(omega)` and the mass curve.
//!
//! Verdicts come from the sign of `d''(omega)` only; no linearized spectrum is
//! computed, so every verdict is a GSS-surrogate.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discretization::{Discretization, DiscretizationError, GridParams};
use crate::graph::{ProblemSpec, VertexCondition};
use crate::oracle::{delta_prime_branches, delta_shift, linear_threshold, Branch, OracleError, SecularSolution};
use crate::solver::{minimize_action_nehari, SolverError, SolverOptions};

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Which family of stationary states to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchSelector {
    /// The action minimizer on the Nehari manifold.
    Ground,
    Branch(Branch),
}

impl fmt::Display for BranchSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchSelector::Ground => f.write_str("ground"),
            BranchSelector::Branch(b) => b.fmt(f),
        }
    }
}

impl std::str::FromStr for BranchSelector {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ground" => Ok(BranchSelector::Ground),
            other => other.parse().map(BranchSelector::Branch),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub omega: f64,
    /// `d(omega)`, the action of the state.
    pub action: f64,
    pub mass: f64,
    pub nehari_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCurve {
    pub selector: BranchSelector,
    /// `true` when every sample came from an explicit formula.
    pub analytic: bool,
    pub samples: Vec<CurveSample>,
    pub notes: Vec<String>,
}

impl BranchCurve {
    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.omega)
    }
}

/// Discretization used where no explicit state is known.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOptions {
    pub h: f64,
    pub solver: SolverOptions,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            h: 0.02,
            solver: SolverOptions::default(),
        }
    }
}

enum Source {
    DeltaStar { alpha: f64, n: usize },
    DeltaPrimeLine { beta: f64 },
    Numerical,
}

fn source(problem: &ProblemSpec) -> Source {
    let graph = &problem.graph;
    if !graph.is_star() || graph.vertex_count() != 1 {
        return Source::Numerical;
    }
    match problem.conditions[0] {
        VertexCondition::Kirchhoff => Source::DeltaStar { alpha: 0.0, n: graph.edge_count() },
        VertexCondition::Delta { alpha } => Source::DeltaStar { alpha, n: graph.edge_count() },
        VertexCondition::DeltaPrime { beta } if graph.edge_count() == 2 => Source::DeltaPrimeLine { beta },
        _ => Source::Numerical,
    }
}

/// `I_omega` of an explicit state: `2E + omega M - (1 - 2/p) P`.
fn analytic_nehari(state: &SecularSolution) -> f64 {
    let p = state.soliton.p();
    2.0 * state.energy() + state.omega() * state.mass() - (1.0 - 2.0 / p) * state.power_integral(p)
}

fn analytic_sample(state: &SecularSolution) -> CurveSample {
    CurveSample {
        omega: state.omega(),
        action: state.action(),
        mass: state.mass(),
        nehari_residual: analytic_nehari(state).abs(),
    }
}

/// Explicit state on `selector` at `omega`, `None` if the branch does not exist there.
fn analytic_state(
    source: &Source,
    selector: BranchSelector,
    p: f64,
    omega: f64,
) -> Result<Option<SecularSolution>, StabilityError> {
    let states = match *source {
        Source::DeltaStar { alpha, n } => vec![delta_shift(alpha, n, p, omega)?],
        Source::DeltaPrimeLine { beta } => delta_prime_branches(beta, p, omega)?,
        Source::Numerical => unreachable!("numerical source has no explicit states"),
    };
    let mut states = states.into_iter().filter(|s| s.exists);
    Ok(match selector {
        BranchSelector::Ground => states.min_by(|a, b| a.action().total_cmp(&b.action())),
        BranchSelector::Branch(b) => states.find(|s| s.branch == b),
    })
}

/// Samples `d(omega)` and the mass on `samples` equally spaced frequencies in
/// `[lo, hi]`, in parallel. Explicit states are used on stars with a delta
/// (or Kirchhoff) vertex and on the delta-prime line; elsewhere each point is
/// a Nehari minimization on one grid with halflines long enough for `lo`.
///
/// Points where the branch does not exist, or the solve fails, are dropped
/// and recorded in `notes`.
pub fn action_curve(
    problem: &ProblemSpec,
    selector: BranchSelector,
    range: (f64, f64),
    samples: usize,
    opts: &CurveOptions,
) -> Result<BranchCurve, StabilityError> {
    let (lo, hi) = range;
    if samples < 5 {
        return Err(StabilityError::TooFewSamples { needed: 5, got: samples });
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(StabilityError::InvalidArgument(format!("empty frequency range [{lo}, {hi}]")));
    }
    let threshold = linear_threshold(problem)?.unwrap_or(0.0);
    if lo <= threshold {
        return Err(StabilityError::InvalidArgument(format!(
            "range starts at {lo}, not above the threshold {threshold}"
        )));
    }
    let omegas: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let source = source(problem);
    let analytic = !matches!(source, Source::Numerical);

    let results: Vec<Result<CurveSample, String>> = match source {
        Source::Numerical => {
            if selector != BranchSelector::Ground {
                return Err(StabilityError::InvalidArgument(format!(
                    "branch `{selector}` needs an explicit family; only `ground` is computed numerically"
                )));
            }
            let disc = Discretization::new(problem.clone(), GridParams::for_frequency(opts.h, lo)?)?;
            omegas
                .par_iter()
                .map(|&omega| numerical_sample(&disc, omega, &opts.solver))
                .collect()
        }
        _ => omegas
            .par_iter()
            .map(|&omega| match analytic_state(&source, selector, problem.p, omega) {
                Ok(Some(state)) => Ok(analytic_sample(&state)),
                Ok(None) => Err(format!("branch `{selector}` does not exist at omega={omega}")),
                Err(e) => Err(format!("omega={omega}: {e}")),
            })
            .collect(),
    };

    let mut curve = BranchCurve {
        selector,
        analytic,
        samples: Vec::with_capacity(samples),
        notes: Vec::new(),
    };
    for r in results {
        match r {
            Ok(s) => curve.samples.push(s),
            Err(note) => curve.notes.push(note),
        }
    }
    Ok(curve)
}

fn numerical_sample(disc: &Discretization, omega: f64, opts: &SolverOptions) -> Result<CurveSample, String> {
    let report = minimize_action_nehari(disc, omega, opts).map_err(|e: SolverError| format!("omega={omega}: {e}"))?;
    if !report.converged() {
        return Err(format!("omega={omega}: solver ended {}", report.status));
    }
    Ok(CurveSample {
        omega,
        action: report.action,
        mass: report.mass,
        nehari_residual: report.nehari_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Unstable,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Undecided => "undecided",
        })
    }
}

/// Verdict at one interior sample, from the second difference around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalVerdict {
    pub omega: f64,
    pub second_difference: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub omega: f64,
    pub from: Verdict,
    pub to: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub tolerance: f64,
    pub verdicts: Vec<LocalVerdict>,
    pub transitions: Vec<Transition>,
}

impl Classification {
    pub fn all(&self, verdict: Verdict) -> bool {
        self.verdicts.iter().all(|v| v.verdict == verdict)
    }
}

/// Three-point second derivative on a possibly uneven stencil.
fn second_difference(x: [f64; 3], y: [f64; 3]) -> f64 {
    let left = (y[1] - y[0]) / (x[1] - x[0]);
    let right = (y[2] - y[1]) / (x[2] - x[1]);
    2.0 * (right - left) / (x[2] - x[0])
}

/// Sign of `d''` at each interior sample with tolerance `1e-6 max|d|`, and
/// the zero crossings of `d''` between consecutive decided samples of
/// opposite sign.
pub fn classify(curve: &BranchCurve) -> Result<Classification, StabilityError> {
    let s = &curve.samples;
    if s.len() < 5 {
        return Err(StabilityError::TooFewSamples { needed: 5, got: s.len() });
    }
    let tolerance = 1e-6 * s.iter().map(|c| c.action.abs()).fold(0.0, f64::max);
    let verdicts: Vec<LocalVerdict> = s
        .windows(3)
        .map(|w| {
            let d2 = second_difference([w[0].omega, w[1].omega, w[2].omega], [w[0].action, w[1].action, w[2].action]);
            let verdict = if d2 > tolerance {
                Verdict::Stable
            } else if d2 < -tolerance {
                Verdict::Unstable
            } else {
                Verdict::Undecided
            };
            LocalVerdict {
                omega: w[1].omega,
                second_difference: d2,
                verdict,
            }
        })
        .collect();
    let decided: Vec<&LocalVerdict> = verdicts.iter().filter(|v| v.verdict != Verdict::Undecided).collect();
    let transitions = decided
        .windows(2)
        .filter(|w| w[0].verdict != w[1].verdict)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let t = a.second_difference / (a.second_difference - b.second_difference);
            Transition {
                omega: a.omega + t * (b.omega - a.omega),
                from: a.verdict,
                to: b.verdict,
            }
        })
        .collect();
    Ok(Classification {
        tolerance,
        verdicts,
        transitions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeSign {
    Increasing,
    Decreasing,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassSlope {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub slope: f64,
    pub sign: SlopeSign,
}

/// Sign of `d mass / d omega` on each interval between samples; changes
/// below `1e-6 max mass` count as flat.
pub fn mass_curve_slope(curve: &BranchCurve) -> Result<Vec<MassSlope>, StabilityError> {
    let s = &curve.samples;
    if s.len() < 3 {
        return Err(StabilityError::TooFewSamples { needed: 3, got: s.len() });
    }
    let tolerance = 1e-6 * s.iter().map(|c| c.mass.abs()).fold(0.0, f64::max);
    Ok(s.windows(2)
        .map(|w| {
            let change = w[1].mass - w[0].mass;
            let sign = if change > tolerance {
                SlopeSign::Increasing
            } else if change < -tolerance {
                SlopeSign::Decreasing
            } else {
                SlopeSign::Flat
            };
            MassSlope {
                omega_lo: w[0].omega,
                omega_hi: w[1].omega,
                slope: change / (w[1].omega - w[0].omega),
                sign,
            }
        })
        .collect())
}

/// Frequencies where the mass slope changes sign, interpolated between the
/// midpoints of the adjacent intervals.
pub fn slope_sign_changes(slopes: &[MassSlope]) -> Vec<f64> {
    let decided: Vec<&MassSlope> = slopes.iter().filter(|m| m.sign != SlopeSign::Flat).collect();
    decided
        .windows(2)
        .filter(|w| w[0].sign != w[1].sign)
        .map(|w| {
            let mid = |m: &MassSlope| 0.5 * (m.omega_lo + m.omega_hi);
            let t = w[0].slope / (w[0].slope - w[1].slope);
            mid(w[0]) + t * (mid(w[1]) - mid(w[0]))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub omega: f64,
    pub derivative: f64,
    pub half_mass: f64,
    pub relative_error: f64,
}

/// Central-difference `d'(omega)` against `mass(omega)/2` at interior samples.
pub fn derivative_identity(curve: &BranchCurve) -> Vec<IdentityCheck> {
    curve
        .samples
        .windows(3)
        .map(|w| {
            let derivative = (w[2].action - w[0].action) / (w[2].omega - w[0].omega);
            let half_mass = 0.5 * w[1].mass;
            IdentityCheck {
                omega: w[1].omega,
                derivative,
                half_mass,
                relative_error: (derivative - half_mass).abs() / half_mass.abs(),
            }
        })
        .collect()
}

/// CSV with one row per sample; endpoints have no second difference.
pub fn curve_csv(curve: &BranchCurve, classification: Option<&Classification>) -> String {
    let mut out = String::from("omega,d,mass,d2,gss_surrogate_verdict\n");
    for (i, s) in curve.samples.iter().enumerate() {
        let local = classification.and_then(|c| i.checked_sub(1).and_then(|j| c.verdicts.get(j)));
        let (d2, verdict) = match local {
            Some(v) => (format!("{:e}", v.second_difference), v.verdict.to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(out, "{:e},{:e},{:e},{d2},{verdict}", s.omega, s.action, s.mass);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{line_graph, star_graph};

    fn curve(points: &[(f64, f64, f64)]) -> BranchCurve {
        BranchCurve {
            selector: BranchSelector::Ground,
            analytic: true,
            samples: points
                .iter()
                .map(|&(omega, action, mass)| CurveSample {
                    omega,
                    action,
                    mass,
                    nehari_residual: 0.0,
                })
                .collect(),
            notes: Vec::new(),
        }
    }

    #[test]
    fn constant_curve_is_undecided() {
        let c = curve(&[(1.0, 3.0, 1.0), (2.0, 3.0, 1.0), (3.0, 3.0, 1.0), (4.0, 3.0, 1.0), (5.0, 3.0, 1.0)]);
        let k = classify(&c).unwrap();
        assert!(k.all(Verdict::Undecided));
        assert!(k.transitions.is_empty());
    }

    #[test]
    fn cubic_curve_has_one_transition() {
        // d'' = 6 (2 - w) changes sign at 2.
        let pts: Vec<_> = (0..9)
            .map(|i| {
                let w = 0.5 * i as f64;
                (w, -(w - 2.0).powi(3), 1.0)
            })
            .collect();
        let k = classify(&curve(&pts)).unwrap();
        assert_eq!(k.transitions.len(), 1);
        assert_eq!(k.transitions[0].from, Verdict::Stable);
        assert_eq!(k.transitions[0].to, Verdict::Unstable);
        assert!((k.transitions[0].omega - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let c = curve(&[(1.0, 1.0, 1.0), (2.0, 2.0, 2.0)]);
        assert!(classify(&c).is_err());
        assert!(mass_curve_slope(&c).is_err());
    }

    #[test]
    fn empty_range_is_rejected() {
        let problem = ProblemSpec::uniform(line_graph(), VertexCondition::Delta { alpha: 1.0 }, 4.0);
        let opts = CurveOptions::default();
        assert!(action_curve(&problem, BranchSelector::Ground, (2.0, 2.0), 10, &opts).is_err());
        assert!(action_curve(&problem, BranchSelector::Ground, (0.2, 2.0), 10, &opts).is_err());
    }

    #[test]
    fn kirchhoff_mass_slopes() {
        let opts = CurveOptions::default();
        let line = |p| ProblemSpec::uniform(line_graph(), VertexCondition::Kirchhoff, p);
        let c4 = action_curve(&line(4.0), BranchSelector::Ground, (0.5, 3.0), 6, &opts).unwrap();
        assert!(mass_curve_slope(&c4).unwrap().iter().all(|m| m.sign == SlopeSign::Increasing));
        let c6 = action_curve(&line(6.0), BranchSelector::Ground, (0.5, 3.0), 6, &opts).unwrap();
        assert!(mass_curve_slope(&c6).unwrap().iter().all(|m| m.sign == SlopeSign::Flat));
    }

    #[test]
    fn asymmetric_branch_is_truncated_below_onset() {
        let problem = ProblemSpec::uniform(line_graph(), VertexCondition::DeltaPrime { beta: 1.0 }, 4.0);
        let opts = CurveOptions::default();
        let odd = action_curve(&problem, BranchSelector::Branch(Branch::Odd), (4.5, 12.0), 16, &opts).unwrap();
        assert_eq!(odd.samples.len(), 16);
        let asym = action_curve(&problem, BranchSelector::Branch(Branch::Asymmetric), (4.5, 12.0), 16, &opts).unwrap();
        assert!(asym.samples.iter().all(|s| s.omega >= 8.0));
        assert!(!asym.notes.is_empty());
    }

    #[test]
    fn star_delta_uses_the_n_tail_family() {
        let problem = ProblemSpec::uniform(star_graph(3).unwrap(), VertexCondition::Delta { alpha: 1.0 }, 4.0);
        let c = action_curve(&problem, BranchSelector::Branch(Branch::NTail), (0.2, 2.0), 5, &CurveOptions::default())
            .unwrap();
        assert!(c.analytic);
        assert!(c.samples.iter().all(|s| s.nehari_residual < 1e-8));
        let csv = curve_csv(&c, Some(&classify(&c).unwrap()));
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,"));
    }
}
