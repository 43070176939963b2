use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::graph::{ProblemSpec, Regime, VertexCondition};
use crate::oracle::quad::integrate_to_infinity;

/// Energies below this count as divergence to `-inf`.
pub const DIVERGENCE_FLOOR: f64 = -1e6;

const LADDER: i32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unboundedness {
    /// `E(u_lambda) < DIVERGENCE_FLOOR` at this `lambda`.
    Witness { lambda: f64, energy: f64, candidate: String },
    /// Every candidate family is increasing at the top of the ladder.
    Bounded,
    /// Some family still decreases at the top of the ladder without crossing the floor.
    Inconclusive { candidate: String, energy: f64 },
}

type Profile = Box<dyn Fn(f64) -> (f64, f64)>;

/// A unit-amplitude bump: `(value, derivative)` per edge.
struct Candidate {
    name: &'static str,
    edges: Vec<Profile>,
}

fn p6_shape(x: f64) -> (f64, f64) {
    let s = (1.0 / (2.0 * x).cosh()).sqrt();
    (s, -(2.0 * x).tanh() * s)
}

fn candidates(n: usize, continuous: bool) -> Vec<Candidate> {
    const CENTER: f64 = 15.0;
    // Quintic soliton profile far out on edge 0, pinned to 0 at the vertex.
    let mut edge_soliton: Vec<Profile> = vec![Box::new(|x| {
        let (s, ds) = p6_shape(x - CENTER);
        let t = x.tanh();
        let dt = 1.0 - t * t;
        (s * t * t, ds * t * t + 2.0 * s * t * dt)
    })];
    edge_soliton.extend((1..n).map(|_| Box::new(|_| (0.0, 0.0)) as Profile));
    let mut out = vec![Candidate {
        name: "edge-soliton",
        edges: edge_soliton,
    }];
    if continuous {
        let theta = (3f64.sqrt() / n as f64).asinh();
        out.push(Candidate {
            name: "vertex-soliton",
            edges: (0..n).map(|_| Box::new(p6_shape) as Profile).collect(),
        });
        out.push(Candidate {
            name: "exp-tails",
            edges: (0..n)
                .map(|_| {
                    Box::new(|x: f64| {
                        let e = (-x).exp();
                        (e, -e)
                    }) as Profile
                })
                .collect(),
        });
        out.push(Candidate {
            name: "shifted-soliton",
            edges: (0..n)
                .map(|_| Box::new(move |x: f64| p6_shape(x + 0.5 * theta)) as Profile)
                .collect(),
        });
    }
    out
}

struct Moments {
    kinetic: f64,
    power: f64,
    mass: f64,
    traces: Vec<f64>,
}

fn moments(c: &Candidate, p: f64) -> Moments {
    let each = |h: &dyn Fn((f64, f64)) -> f64| -> f64 {
        c.edges
            .iter()
            .map(|f| integrate_to_infinity(&|x| h(f(x)), 0.0, 1.0, 1e-13))
            .sum()
    };
    Moments {
        kinetic: each(&|(_, d)| d * d),
        power: each(&|(v, _)| v.abs().powf(p)),
        mass: each(&|(v, _)| v * v),
        traces: c.edges.iter().map(|f| f(0.0).0).collect(),
    }
}

/// Energy of `b sqrt(lambda) f(lambda x)` from the moments of `f`.
fn scaled_energy(problem: &ProblemSpec, m: &Moments, amplitude: f64, lambda: f64) -> f64 {
    let p = problem.p;
    let b2 = amplitude * amplitude;
    let mut e = 0.5 * lambda * lambda * b2 * m.kinetic - lambda.powf(0.5 * (p - 2.0)) * amplitude.powf(p) * m.power / p;
    let t = &m.traces;
    for v in problem.graph.vertex_ids() {
        e += match *problem.condition(v) {
            VertexCondition::Kirchhoff | VertexCondition::Dipole { .. } => 0.0,
            VertexCondition::Delta { alpha } => -0.5 * alpha * lambda * b2 * t[0] * t[0],
            VertexCondition::DeltaPrime { beta } => -lambda * b2 * (t[1] - t[0]).powi(2) / (2.0 * beta),
            VertexCondition::FulopTsutsui { v, .. } => -0.5 * v * lambda * b2 * t[0] * t[0],
            VertexCondition::NonlinearDelta { q } => -(lambda.sqrt() * amplitude * t[0].abs()).powf(q) / q,
        };
    }
    e
}

/// Looks for a divergence witness along the mass-preserving scaling
/// `u_lambda(x) = sqrt(lambda) u_0(lambda x)`, `lambda = 2^k, k = 0..=20`, of
/// several mass-`mu` bumps on a star graph.
pub fn detect_unboundedness(problem: &ProblemSpec, mu: f64) -> Result<Unboundedness, SolverError> {
    if problem.regime() == Regime::Subcritical {
        return Err(SolverError::InvalidRegime(format!(
            "p={} with pointwise power {:?} is subcritical",
            problem.p,
            problem.pointwise_power()
        )));
    }
    if !problem.graph.is_star() {
        return Err(SolverError::InvalidArgument("unboundedness test needs a star graph".into()));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(SolverError::InvalidArgument(format!("mass must be positive, got {mu}")));
    }
    let continuous = problem.conditions.iter().all(VertexCondition::is_continuous);
    let mut witness: Option<(i32, f64, &'static str)> = None;
    let mut undecided: Option<(&'static str, f64)> = None;
    for c in candidates(problem.graph.edge_count(), continuous) {
        let m = moments(&c, problem.p);
        let amplitude = (mu / m.mass).sqrt();
        let energy = |k: i32| scaled_energy(problem, &m, amplitude, 2f64.powi(k));
        if let Some(k) = (0..=LADDER).find(|&k| energy(k) < DIVERGENCE_FLOOR) {
            if witness.is_none_or(|(best, _, _)| k < best) {
                witness = Some((k, energy(k), c.name));
            }
        } else if energy(LADDER) <= energy(LADDER - 1) && undecided.is_none() {
            undecided = Some((c.name, energy(LADDER)));
        }
    }
    Ok(match (witness, undecided) {
        (Some((k, energy, name)), _) => Unboundedness::Witness {
            lambda: 2f64.powi(k),
            energy,
            candidate: name.to_string(),
        },
        (None, Some((name, energy))) => Unboundedness::Inconclusive {
            candidate: name.to_string(),
            energy,
        },
        (None, None) => Unboundedness::Bounded,
    })
}
