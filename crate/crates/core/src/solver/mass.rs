use super::descent::{asymmetry, descend, dot, pick_best, Objective, Run, Symmetrizer};
use super::report::{BranchOutcome, GroundStateReport, ProblemKind, Status};
use super::{detect_unboundedness, seed_profiles, Preconditioner, SolverError, SolverOptions, Unboundedness};
use crate::discretization::{Discretization, Functional, GraphFunction};
use crate::graph::Regime;
use crate::oracle::soliton_omega_at_mass;

struct MassObjective<'a> {
    disc: &'a Discretization,
    mu: f64,
    weights: Vec<f64>,
    pre: Preconditioner,
}

impl MassObjective<'_> {
    fn function(&self, x: &[f64]) -> GraphFunction {
        self.disc.from_dofs(x)
    }

    fn multiplier(&self, x: &[f64], gradient: &[f64]) -> f64 {
        -dot(gradient, x) / self.mu
    }

    fn weighted(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.weights).map(|(a, w)| a * w).collect()
    }
}

impl Objective for MassObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        self.disc.energy(&self.function(x)).total
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.disc.dof_gradient(&self.function(x), Functional::Energy)
    }

    fn residual(&self, x: &[f64], gradient: &[f64]) -> f64 {
        let omega = self.multiplier(x, gradient);
        self.disc.stationary_residual(&self.function(x), omega).total
    }

    fn direction(&mut self, x: &[f64], gradient: &[f64]) -> (Vec<f64>, f64) {
        let omega = self.multiplier(x, gradient);
        let shift = self.pre.shift();
        if omega > 0.0 && (omega - shift).abs() > 0.1 * shift {
            self.pre = Preconditioner::new(self.disc.grid(), omega);
        }
        let wx = self.weighted(x);
        // Tangential part first: G + omega W x is orthogonal to x.
        let tangent: Vec<f64> = gradient.iter().zip(&wx).map(|(g, w)| g + omega * w).collect();
        let mut d = self.pre.solve(&tangent);
        let z = self.pre.solve(&wx);
        let beta = dot(&wx, &d) / dot(&wx, &z);
        for (di, zi) in d.iter_mut().zip(&z) {
            *di -= beta * zi;
        }
        let slope = dot(&tangent, &d);
        (d, slope)
    }

    fn retract(&self, y: Vec<f64>) -> Option<Vec<f64>> {
        let m: f64 = y.iter().zip(&self.weights).map(|(a, w)| w * a * a).sum();
        if !(m > 0.0 && m.is_finite()) {
            return None;
        }
        let s = (self.mu / m).sqrt();
        Some(y.into_iter().map(|a| a * s).collect())
    }

    fn scale(&self, x: &[f64]) -> f64 {
        let e = self.disc.energy(&self.function(x));
        e.kinetic.abs() + e.lp_term.abs() + e.vertex_term.abs()
    }
}

/// Mass of `u` scaled to `mu`.
pub(super) fn scale_to_mass(disc: &Discretization, u: &GraphFunction, mu: f64) -> Option<GraphFunction> {
    let m = disc.mass(u);
    (m > 0.0).then(|| u.scaled((mu / m).sqrt()))
}

/// Minimizes the energy on `{ int |u|^2 = mu }` by projected, Sobolev-preconditioned
/// gradient descent; the frequency is recovered as the Lagrange multiplier.
pub fn minimize_energy_mass(
    disc: &Discretization,
    mu: f64,
    opts: &SolverOptions,
) -> Result<GroundStateReport, SolverError> {
    opts.validate()?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(SolverError::InvalidArgument(format!("mass must be positive, got {mu}")));
    }
    let problem = disc.problem();
    let p = problem.p;
    let symmetrizer = opts.symmetrize.then(|| Symmetrizer::new(disc)).transpose()?;
    let omega_guess = if p < 6.0 {
        soliton_omega_at_mass(p, mu)?.clamp(1e-4, 1e4)
    } else {
        1.0
    };
    let seeds = seed_profiles(disc, &opts.initial_guess, omega_guess, opts.seed)?;

    let mut notes = Vec::new();
    let witness = if problem.regime() != Regime::Subcritical && problem.graph.is_star() {
        let verdict = detect_unboundedness(problem, mu)?;
        if let Unboundedness::Witness { .. } = verdict {
            let profile = scale_to_mass(disc, &seeds[0].profile, mu).unwrap_or_else(|| disc.zeros());
            return Ok(build_report(
                disc,
                mu,
                opts,
                &seeds[0].label,
                Status::UnboundedSuspected,
                profile,
                0,
                true,
                Vec::new(),
                false,
                Some(verdict),
                vec!["scaling family crosses the divergence floor; descent skipped".into()],
            ));
        }
        Some(verdict)
    } else {
        None
    };

    let mut runs: Vec<(String, Run)> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let Some(start) = scale_to_mass(disc, &seed.profile, mu) else {
            return Err(SolverError::InvalidArgument(format!("seed `{}` has zero mass", seed.label)));
        };
        let mut x0 = disc.to_dofs(&start);
        if let Some(s) = &symmetrizer {
            s.apply(&mut x0);
        }
        let mut objective = MassObjective {
            disc,
            mu,
            weights: disc.dof_weights(),
            pre: Preconditioner::new(disc.grid(), omega_guess),
        };
        let x0 = objective.retract(x0).expect("seed has positive mass");
        let g = objective.gradient(&x0);
        let omega0 = objective.multiplier(&x0, &g);
        if omega0 > 0.0 {
            objective.pre = Preconditioner::new(disc.grid(), omega0);
        }
        let run = descend(&mut objective, x0, opts, symmetrizer.as_ref());
        runs.push((seed.label, run));
    }

    let profiles: Vec<GraphFunction> = runs.iter().map(|(_, r)| disc.from_dofs(&r.x)).collect();
    let values: Vec<(Status, f64)> = runs
        .iter()
        .zip(&profiles)
        .map(|((_, r), u)| (r.status, disc.energy(u).total))
        .collect();
    let (best, tie) = pick_best(&values, &profiles);
    let alternatives = outcomes(disc, &runs, &profiles, &values);
    let (label, run) = &runs[best];
    if let Some(n) = &run.note {
        notes.push(n.clone());
    }
    Ok(build_report(
        disc,
        mu,
        opts,
        label,
        run.status,
        profiles[best].clone(),
        run.iterations,
        run.monotone,
        alternatives,
        tie,
        witness,
        notes,
    ))
}

pub(super) fn outcomes(
    disc: &Discretization,
    runs: &[(String, Run)],
    profiles: &[GraphFunction],
    values: &[(Status, f64)],
) -> Vec<BranchOutcome> {
    runs.iter()
        .zip(profiles)
        .zip(values)
        .map(|(((label, run), u), &(status, value))| BranchOutcome {
            seed: label.clone(),
            status,
            value,
            asymmetry: asymmetry(disc, u),
            iterations: run.iterations,
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    disc: &Discretization,
    mu: f64,
    opts: &SolverOptions,
    label: &str,
    status: Status,
    profile: GraphFunction,
    iterations: usize,
    monotone: bool,
    alternatives: Vec<BranchOutcome>,
    tie: bool,
    witness: Option<Unboundedness>,
    mut notes: Vec<String>,
) -> GroundStateReport {
    let grad = disc.dof_gradient(&profile, Functional::Energy);
    let x = disc.to_dofs(&profile);
    let mass = disc.mass(&profile);
    let omega = -dot(&grad, &x) / mass.max(f64::MIN_POSITIVE);
    let energy = disc.energy(&profile).total;
    let action = energy + 0.5 * omega * mass;
    let parts = disc.nehari_parts(&profile, omega);
    let p = disc.p();
    let gap = (action - (p - 2.0) / (2.0 * p) * parts.power - parts.pointwise_action).abs();
    let bound = disc.grid().params().decay_bound(omega.max(0.0));
    if status == Status::Converged && bound > 1e-10 {
        notes.push(format!(
            "halfline truncation L={} leaves exp(-sqrt(omega) L)={bound:e} at omega={omega}",
            disc.grid().params().halfline_length()
        ));
    }
    GroundStateReport {
        kind: ProblemKind::FixedMass { mu },
        status,
        value: energy,
        energy,
        action,
        mass,
        omega,
        residual: disc.stationary_residual(&profile, omega),
        nehari_residual: parts.value().abs(),
        self_consistency_gap: gap,
        asymmetry: asymmetry(disc, &profile),
        iterations,
        seed: opts.seed,
        initial_guess: label.to_string(),
        monotone,
        tolerance: opts.tolerance,
        tie,
        alternatives,
        witness,
        notes,
        profile,
    }
}
