use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use super::bracket::existence_predicate;
use super::{branch_label, solve, ExperimentError, GridPolicy, Target};
use crate::graph::{star_graph, ProblemSpec, VertexCondition};
use crate::solver::{SolverOptions, Status};

/// Quantity varied by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParam {
    Omega,
    Mass,
    Alpha,
    Beta,
    Tau,
    V,
    /// Number of halflines of a star graph.
    N,
}

impl FromStr for ScanParam {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "omega" => ScanParam::Omega,
            "mu" | "mass" => ScanParam::Mass,
            "alpha" => ScanParam::Alpha,
            "beta" => ScanParam::Beta,
            "tau" => ScanParam::Tau,
            "v" => ScanParam::V,
            "N" | "n" => ScanParam::N,
            other => {
                return Err(ExperimentError::Usage(format!(
                    "unknown scan parameter `{other}` (omega, mu, alpha, beta, tau, v, N)"
                )))
            }
        })
    }
}

impl fmt::Display for ScanParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanParam::Omega => "omega",
            ScanParam::Mass => "mu",
            ScanParam::Alpha => "alpha",
            ScanParam::Beta => "beta",
            ScanParam::Tau => "tau",
            ScanParam::V => "v",
            ScanParam::N => "N",
        })
    }
}

/// `count` equally spaced values from `lo` to `hi`, written `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl ParamGrid {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

impl FromStr for ParamGrid {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExperimentError::Usage(format!("grid must look like a:b:n, got `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(bad());
        };
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let count: usize = count.parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite()) || (count > 1 && hi < lo) {
            return Err(bad());
        }
        Ok(ParamGrid { lo, hi, count })
    }
}

impl fmt::Display for ParamGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

/// Outcome of a completed solve at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct RowData {
    pub status: Status,
    pub value: f64,
    pub mass: f64,
    pub omega: f64,
    pub residual: f64,
    pub nehari_residual: f64,
    pub asymmetry: f64,
    pub branch: &'static str,
    /// Converged, and for a mass target also below the soliton level.
    pub exists: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub parameter: f64,
    /// `Err` carries the reason no solve completed.
    pub outcome: Result<RowData, String>,
}

/// `problem` with `param` set to `value` at every vertex that carries it.
pub fn with_parameter(problem: &ProblemSpec, param: ScanParam, value: f64) -> Result<ProblemSpec, ExperimentError> {
    let mut out = problem.clone();
    if param == ScanParam::N {
        if !problem.graph.is_star() {
            return Err(ExperimentError::Usage("an N scan needs a star graph".into()));
        }
        if value.fract() != 0.0 || value < 2.0 {
            return Err(ExperimentError::Usage(format!("N must be an integer >= 2, got {value}")));
        }
        let graph = star_graph(value as usize).map_err(|e| ExperimentError::Usage(e.to_string()))?;
        return Ok(ProblemSpec::uniform(graph, problem.conditions[0], problem.p));
    }
    let mut touched = false;
    for c in &mut out.conditions {
        let slot = match (param, c) {
            (ScanParam::Alpha, VertexCondition::Delta { alpha }) => alpha,
            (ScanParam::Beta, VertexCondition::DeltaPrime { beta }) => beta,
            (ScanParam::Tau, VertexCondition::Dipole { tau } | VertexCondition::FulopTsutsui { tau, .. }) => tau,
            (ScanParam::V, VertexCondition::FulopTsutsui { v, .. }) => v,
            _ => continue,
        };
        *slot = value;
        touched = true;
    }
    if !touched {
        return Err(ExperimentError::Usage(format!("no vertex condition has parameter `{param}`")));
    }
    Ok(out)
}

fn target_for(param: ScanParam, value: f64, base: Option<Target>) -> Result<Target, ExperimentError> {
    match param {
        ScanParam::Omega => Ok(Target::Omega(value)),
        ScanParam::Mass => Ok(Target::Mass(value)),
        _ => base.ok_or_else(|| ExperimentError::Usage(format!("a `{param}` scan needs a mass or frequency"))),
    }
}

fn run_point(
    problem: &ProblemSpec,
    policy: &GridPolicy,
    param: ScanParam,
    value: f64,
    base: Option<Target>,
    opts: &SolverOptions,
) -> Result<RowData, ExperimentError> {
    let problem = match param {
        ScanParam::Omega | ScanParam::Mass => problem.clone(),
        _ => with_parameter(problem, param, value)?,
    };
    let target = target_for(param, value, base)?;
    let (report, exists) = match target {
        Target::Mass(mu) if problem.p < 6.0 => {
            let (point, report) = existence_predicate(&problem, policy, mu, opts)?;
            (report, point.holds)
        }
        _ => {
            let (_, report) = solve(&problem, policy, target, opts)?;
            let exists = report.converged();
            (report, exists)
        }
    };
    Ok(RowData {
        status: report.status,
        value: report.value,
        mass: report.mass,
        omega: report.omega,
        residual: report.residual.total,
        nehari_residual: report.nehari_residual,
        asymmetry: report.asymmetry,
        branch: branch_label(&problem, &report),
        exists,
    })
}

/// Solves at every grid value in parallel; rows come back in grid order.
/// A point that fails keeps its row with the error instead of numbers.
pub fn scan(
    problem: &ProblemSpec,
    policy: &GridPolicy,
    param: ScanParam,
    grid: &ParamGrid,
    base: Option<Target>,
    opts: &SolverOptions,
) -> Result<Vec<ScanRow>, ExperimentError> {
    target_for(param, 0.0, base)?;
    if !matches!(param, ScanParam::Omega | ScanParam::Mass) {
        // Parameter applicability does not depend on the value.
        let probe = if param == ScanParam::N { 3.0 } else { 1.5 };
        with_parameter(problem, param, probe)?;
    }
    Ok(grid
        .values()
        .into_par_iter()
        .map(|value| ScanRow {
            parameter: value,
            outcome: run_point(problem, policy, param, value, base, opts).map_err(|e| e.to_string()),
        })
        .collect())
}

pub fn scan_csv(param: ScanParam, rows: &[ScanRow]) -> String {
    let mut out =
        format!("{param},status,value,mass,omega,residual,nehari_residual,asymmetry,branch,exists,error\n");
    for row in rows {
        match &row.outcome {
            Ok(d) => {
                let _ = writeln!(
                    out,
                    "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{},{},",
                    row.parameter,
                    d.status,
                    d.value,
                    d.mass,
                    d.omega,
                    d.residual,
                    d.nehari_residual,
                    d.asymmetry,
                    d.branch,
                    d.exists
                );
            }
            Err(e) => {
                let clean: String = e.chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
                let _ = writeln!(out, "{},failed,,,,,,,,,{clean}", row.parameter);
            }
        }
    }
    out
}
