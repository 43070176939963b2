use super::{SolverError, SolverOptions, Status, DIVERGENCE_FLOOR};
use crate::discretization::{Discretization, GraphFunction};
use crate::graph::VertexCondition;

pub(super) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One constrained minimization problem in dof coordinates.
pub(super) trait Objective {
    fn value(&self, x: &[f64]) -> f64;
    /// Euclidean gradient of [`Objective::value`] with respect to the dofs.
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Stationary residual at `x`, given its gradient.
    fn residual(&self, x: &[f64], gradient: &[f64]) -> f64;
    /// Preconditioned descent direction, tangent to the constraint, and the
    /// directional derivative of the objective along it.
    fn direction(&mut self, x: &[f64], gradient: &[f64]) -> (Vec<f64>, f64);
    /// Maps a trial point back onto the constraint; `None` if impossible.
    fn retract(&self, y: Vec<f64>) -> Option<Vec<f64>>;
    /// Magnitude of the terms summed in [`Objective::value`], for rounding bounds.
    fn scale(&self, x: &[f64]) -> f64;
}

pub(super) struct Run {
    pub status: Status,
    pub x: Vec<f64>,
    pub iterations: usize,
    pub monotone: bool,
    pub note: Option<String>,
}

/// Edge-permutation averaging on a star graph with one continuous vertex.
#[derive(Debug, Clone)]
pub(super) struct Symmetrizer {
    ranges: Vec<std::ops::Range<usize>>,
}

impl Symmetrizer {
    pub fn new(disc: &Discretization) -> Result<Self, SolverError> {
        let graph = &disc.problem().graph;
        let continuous = disc.problem().conditions.iter().all(VertexCondition::is_continuous);
        let ranges: Vec<_> = (0..graph.edge_count()).map(|e| disc.grid().interior_dofs(e)).collect();
        let same = ranges.windows(2).all(|w| w[0].len() == w[1].len());
        if !graph.is_star() || !continuous || !same {
            return Err(SolverError::InvalidOptions(
                "symmetrize needs a star graph with a continuous vertex condition".into(),
            ));
        }
        Ok(Symmetrizer { ranges })
    }

    pub fn apply(&self, x: &mut [f64]) {
        let n = self.ranges.len() as f64;
        for i in 0..self.ranges[0].len() {
            let mean = self.ranges.iter().map(|r| x[r.start + i]).sum::<f64>() / n;
            for r in &self.ranges {
                x[r.start + i] = mean;
            }
        }
    }
}

pub(super) fn descend(
    objective: &mut impl Objective,
    x0: Vec<f64>,
    opts: &SolverOptions,
    symmetrizer: Option<&Symmetrizer>,
) -> Run {
    let mut x = x0;
    let mut f = objective.value(&x);
    let mut monotone = true;
    for it in 0..opts.max_iterations {
        let mut g = objective.gradient(&x);
        if objective.residual(&x, &g) <= opts.tolerance {
            return Run { status: Status::Converged, x, iterations: it, monotone, note: None };
        }
        if f < DIVERGENCE_FLOOR {
            return Run {
                status: Status::UnboundedSuspected,
                x,
                iterations: it,
                monotone,
                note: Some(format!("objective fell below {DIVERGENCE_FLOOR:e}")),
            };
        }
        if let Some(s) = symmetrizer {
            s.apply(&mut g);
        }
        let (mut d, slope) = objective.direction(&x, &g);
        if let Some(s) = symmetrizer {
            s.apply(&mut d);
        }
        if !(slope > 0.0) {
            return Run {
                status: Status::NotConverged,
                x,
                iterations: it,
                monotone,
                note: Some("no descent direction".into()),
            };
        }
        let rounding = 64.0 * f64::EPSILON * objective.scale(&x);
        let mut t = opts.initial_step;
        let mut accepted = None;
        while t >= opts.min_step {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - t * b).collect();
            if let Some(y) = objective.retract(trial) {
                let fy = objective.value(&y);
                if fy <= f - opts.armijo * t * slope + rounding {
                    accepted = Some((y, fy));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((y, fy)) = accepted else {
            return Run {
                status: Status::NotConverged,
                x,
                iterations: it,
                monotone,
                note: Some("line search stalled".into()),
            };
        };
        if fy > f + rounding {
            monotone = false;
        }
        debug_assert!(fy <= f + rounding, "objective increased: {f} -> {fy}");
        x = y;
        f = fy;
    }
    let g = objective.gradient(&x);
    let status = if objective.residual(&x, &g) <= opts.tolerance {
        Status::Converged
    } else {
        Status::NotConverged
    };
    Run {
        status,
        x,
        iterations: opts.max_iterations,
        monotone,
        note: (status == Status::NotConverged).then(|| "iteration budget exhausted".into()),
    }
}

/// Largest node-wise gap between `|u|` on edge 0 and on any other edge of
/// a star graph; 0 elsewhere.
pub(super) fn asymmetry(disc: &Discretization, u: &GraphFunction) -> f64 {
    if !disc.problem().graph.is_star() {
        return 0.0;
    }
    let first = u.edge(0);
    u.edges()[1..]
        .iter()
        .filter(|e| e.len() == first.len())
        .flat_map(|e| e.iter().zip(first).map(|(a, b)| (a.abs() - b.abs()).abs()))
        .fold(0.0, f64::max)
}

/// Index of the lowest converged value (lowest overall if none converged),
/// and whether another run reached the same value with a different profile.
pub(super) fn pick_best(values: &[(Status, f64)], profiles: &[GraphFunction]) -> (usize, bool) {
    let converged: Vec<usize> = (0..values.len()).filter(|&i| values[i].0 == Status::Converged).collect();
    let pool: Vec<usize> = if converged.is_empty() { (0..values.len()).collect() } else { converged };
    let best = pool
        .iter()
        .copied()
        .min_by(|&a, &b| values[a].1.total_cmp(&values[b].1))
        .expect("at least one run");
    let v = values[best].1;
    let tie = pool.iter().any(|&i| {
        i != best
            && (values[i].1 - v).abs() <= 1e-9 * v.abs().max(1.0)
            && profiles[i].sup_distance(&profiles[best]) > 1e-6 * profiles[best].sup_norm().max(1e-300)
    });
    (best, tie)
}
