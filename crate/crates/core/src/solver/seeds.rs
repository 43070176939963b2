use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{InitialGuess, SolverError};
use crate::discretization::{Discretization, GraphFunction};
use crate::graph::{EdgeSide, VertexCondition};
use crate::oracle::Soliton;

/// A labelled starting profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub label: String,
    pub profile: GraphFunction,
}

/// Per-edge factor making a seed compatible with the vertex at the edge's
/// start: `tau` on the `0+` side of dipole and Fulop-Tsutsui vertices, and
/// the sign pattern `(-, +)` at delta-prime vertices.
fn edge_factors(disc: &Discretization, left_scale: f64) -> Vec<f64> {
    let graph = &disc.problem().graph;
    let mut factors = vec![1.0; graph.edge_count()];
    for v in graph.vertex_ids() {
        let incidences = graph.incidences(v);
        let second = incidences.get(1).filter(|i| i.side == EdgeSide::Start);
        let first = incidences.first().filter(|i| i.side == EdgeSide::Start);
        match *disc.problem().condition(v) {
            VertexCondition::Dipole { tau } | VertexCondition::FulopTsutsui { tau, .. } => {
                if let Some(i) = second {
                    factors[i.edge.0] *= tau;
                }
            }
            VertexCondition::DeltaPrime { .. } => {
                if let Some(i) = first {
                    factors[i.edge.0] *= -left_scale;
                }
            }
            _ => {}
        }
    }
    factors
}

fn has_delta_prime(disc: &Discretization) -> bool {
    disc.problem()
        .conditions
        .iter()
        .any(|c| matches!(c, VertexCondition::DeltaPrime { .. }))
}

/// Starting profiles for `guess`, before any mass or Nehari normalization.
/// `omega` sets the soliton width.
pub fn seed_profiles(
    disc: &Discretization,
    guess: &InitialGuess,
    omega: f64,
    seed: u64,
) -> Result<Vec<Seed>, SolverError> {
    match guess {
        InitialGuess::Soliton => {
            let soliton = Soliton::new(disc.p(), omega)?;
            let make = |label: &str, left_scale: f64| {
                let factors = edge_factors(disc, left_scale);
                Seed {
                    label: label.to_string(),
                    profile: disc.sample(|e, x| factors[e.0] * soliton.value(x + 1.0)),
                }
            };
            if has_delta_prime(disc) {
                Ok(vec![make("soliton-odd", 1.0), make("soliton-asymmetric", 2.0)])
            } else {
                Ok(vec![make("soliton", 1.0)])
            }
        }
        InitialGuess::RandomBump => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let factors = edge_factors(disc, 1.0);
            let bumps: Vec<(f64, f64, f64)> = (0..disc.problem().graph.edge_count())
                .map(|_| (rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0), rng.gen_range(0.5..2.0)))
                .collect();
            let scale = omega.sqrt();
            let profile = disc.sample(|e, x| {
                let (a, c, w) = bumps[e.0];
                factors[e.0] * a * (-((scale * x - c) / w).powi(2)).exp()
            });
            Ok(vec![Seed {
                label: format!("random-bump-{seed}"),
                profile,
            }])
        }
        InitialGuess::Profile(u) => {
            disc.check(u)?;
            Ok(vec![Seed {
                label: "profile".into(),
                profile: u.clone(),
            }])
        }
    }
}
