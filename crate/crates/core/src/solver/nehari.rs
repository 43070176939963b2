use super::descent::{asymmetry, descend, dot, pick_best, Objective, Run, Symmetrizer};
use super::mass::outcomes;
use super::report::{GroundStateReport, ProblemKind, Status};
use super::{seed_profiles, Preconditioner, SolverError, SolverOptions};
use crate::discretization::{Discretization, Functional, GraphFunction};
use crate::graph::VertexCondition;
use crate::oracle::linear_threshold;

/// Factor `s > 0` with `I_omega(s u) = 0`, or `None` when the quadratic part
/// of `I_omega(u)` is not positive.
fn nehari_factor(disc: &Discretization, u: &GraphFunction, omega: f64) -> Option<f64> {
    let parts = disc.nehari_parts(u, omega);
    let p = disc.p();
    if !(parts.quadratic > 0.0) || !(parts.power + parts.pointwise > 0.0) {
        return None;
    }
    if parts.pointwise == 0.0 {
        return Some((parts.quadratic / parts.power).powf(1.0 / (p - 2.0)));
    }
    let pointwise: Vec<(f64, f64)> = disc
        .problem()
        .graph
        .vertex_ids()
        .filter_map(|v| match *disc.problem().condition(v) {
            VertexCondition::NonlinearDelta { q } => Some((q, disc.vertex_traces(u, v)[0].abs().powf(q))),
            _ => None,
        })
        .collect();
    // Q = P s^{p-2} + sum R_v s^{q_v-2}; the right side increases in s.
    let rhs = |s: f64| parts.power * s.powf(p - 2.0) + pointwise.iter().map(|&(q, r)| r * s.powf(q - 2.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.5, 1.0);
    while rhs(hi) < parts.quadratic {
        (lo, hi) = (hi, 2.0 * hi);
    }
    while rhs(lo) >= parts.quadratic {
        (lo, hi) = (0.5 * lo, lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rhs(mid) < parts.quadratic {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Radial projection onto the Nehari manifold `I_omega = 0`.
pub fn nehari_rescale(disc: &Discretization, u: &GraphFunction, omega: f64) -> Option<GraphFunction> {
    nehari_factor(disc, u, omega).map(|s| u.scaled(s))
}

struct NehariObjective<'a> {
    disc: &'a Discretization,
    omega: f64,
    pre: Preconditioner,
}

impl Objective for NehariObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        self.disc.action(&self.disc.from_dofs(x), self.omega)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.disc
            .dof_gradient(&self.disc.from_dofs(x), Functional::Action { omega: self.omega })
    }

    fn residual(&self, x: &[f64], _gradient: &[f64]) -> f64 {
        self.disc.stationary_residual(&self.disc.from_dofs(x), self.omega).total
    }

    fn direction(&mut self, _x: &[f64], gradient: &[f64]) -> (Vec<f64>, f64) {
        let d = self.pre.solve(gradient);
        let slope = dot(gradient, &d);
        (d, slope)
    }

    fn retract(&self, y: Vec<f64>) -> Option<Vec<f64>> {
        let u = self.disc.from_dofs(&y);
        let s = nehari_factor(self.disc, &u, self.omega)?;
        Some(y.into_iter().map(|a| a * s).collect())
    }

    fn scale(&self, x: &[f64]) -> f64 {
        let u = self.disc.from_dofs(x);
        let e = self.disc.energy(&u);
        e.kinetic.abs() + e.lp_term.abs() + e.vertex_term.abs() + 0.5 * self.omega * self.disc.mass(&u)
    }
}

/// Minimizes the action `S_omega` over the Nehari manifold: preconditioned
/// gradient steps, each trial point rescaled onto `I_omega = 0`.
pub fn minimize_action_nehari(
    disc: &Discretization,
    omega: f64,
    opts: &SolverOptions,
) -> Result<GroundStateReport, SolverError> {
    opts.validate()?;
    if !omega.is_finite() {
        return Err(SolverError::InvalidArgument(format!("omega must be finite, got {omega}")));
    }
    let threshold = linear_threshold(disc.problem())?.unwrap_or(0.0);
    if omega <= threshold {
        return Err(SolverError::BelowThreshold { omega, threshold });
    }
    let symmetrizer = opts.symmetrize.then(|| Symmetrizer::new(disc)).transpose()?;
    let seeds = seed_profiles(disc, &opts.initial_guess, omega, opts.seed)?;
    let pre = Preconditioner::new(disc.grid(), omega);

    let mut runs: Vec<(String, Run)> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let mut x0 = disc.to_dofs(&seed.profile);
        if let Some(s) = &symmetrizer {
            s.apply(&mut x0);
        }
        let mut objective = NehariObjective {
            disc,
            omega,
            pre: pre.clone(),
        };
        let x0 = objective.retract(x0).ok_or(SolverError::DegenerateQuadraticForm)?;
        let run = descend(&mut objective, x0, opts, symmetrizer.as_ref());
        runs.push((seed.label, run));
    }

    let profiles: Vec<GraphFunction> = runs.iter().map(|(_, r)| disc.from_dofs(&r.x)).collect();
    let values: Vec<(Status, f64)> = runs
        .iter()
        .zip(&profiles)
        .map(|((_, r), u)| (r.status, disc.action(u, omega)))
        .collect();
    let (best, tie) = pick_best(&values, &profiles);
    let alternatives = outcomes(disc, &runs, &profiles, &values);
    let (label, run) = &runs[best];
    let profile = profiles[best].clone();

    let energy = disc.energy(&profile).total;
    let mass = disc.mass(&profile);
    let action = energy + 0.5 * omega * mass;
    let parts = disc.nehari_parts(&profile, omega);
    let p = disc.p();
    let mut notes: Vec<String> = run.note.iter().cloned().collect();
    let bound = disc.grid().params().decay_bound(omega);
    if bound > 1e-10 {
        notes.push(format!(
            "halfline truncation L={} leaves exp(-sqrt(omega) L)={bound:e}",
            disc.grid().params().halfline_length()
        ));
    }
    Ok(GroundStateReport {
        kind: ProblemKind::FixedFrequency { omega },
        status: run.status,
        value: action,
        energy,
        action,
        mass,
        omega,
        residual: disc.stationary_residual(&profile, omega),
        nehari_residual: parts.value().abs(),
        self_consistency_gap: (action - (p - 2.0) / (2.0 * p) * parts.power - parts.pointwise_action).abs(),
        asymmetry: asymmetry(disc, &profile),
        iterations: run.iterations,
        seed: opts.seed,
        initial_guess: label.clone(),
        monotone: run.monotone,
        tolerance: opts.tolerance,
        tie,
        alternatives,
        witness: None,
        notes,
        profile,
    })
}
