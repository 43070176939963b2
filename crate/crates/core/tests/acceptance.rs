//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::thread;

use graphnls::discretization::{write_profile_csv, Discretization, Functional, GraphFunction, GridParams};
use graphnls::experiment::{
    bracket_mass_threshold, preset, scan, scan_csv, solve, BracketOutcome, Orientation, ParamGrid,
    ScanParam, ScanRow, Target,
};
use graphnls::graph::{line_graph, star_graph, ProblemSpec, VertexCondition, VertexId};
use graphnls::oracle::{mu_star_doubly_critical, omega_min_ft, soliton_energy, Soliton};
use graphnls::solver::{
    detect_unboundedness, minimize_action_nehari, minimize_energy_mass, nehari_rescale, InitialGuess,
    SolverError, SolverOptions, Unboundedness,
};
use graphnls::stability::{
    action_curve, classify, derivative_identity, BranchSelector, CurveOptions, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: pass flag and a one-line summary.
type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn line(c: VertexCondition, p: f64) -> ProblemSpec {
    ProblemSpec::uniform(line_graph(), c, p)
}

fn c01_soliton_residual() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    for p in [3.0, 4.0, 6.0] {
        for omega in [0.5, 1.0, 2.0] {
            let s = Soliton::new(p, omega).unwrap();
            for i in 0..1000 {
                let x = -10.0 + 20.0 * i as f64 / 999.0;
                let phi = s.value(x);
                worst = worst.max((-s.second_derivative(x) - phi.powf(p - 1.0) + omega * phi).abs());
                // Fourth-order difference as an independent check of phi''.
                let k = 1e-3;
                let fd = (-s.value(x + 2.0 * k) + 16.0 * s.value(x + k) - 30.0 * phi + 16.0 * s.value(x - k)
                    - s.value(x - 2.0 * k))
                    / (12.0 * k * k);
                worst_fd = worst_fd.max((fd - s.second_derivative(x)).abs());
            }
        }
    }
    (
        worst <= 1e-10 && worst_fd <= 1e-6,
        format!("max residual {worst:.2e} (<= 1e-10), phi'' vs differences {worst_fd:.2e}"),
    )
}

fn c02_kirchhoff_line() -> Outcome {
    let disc = Discretization::new(line(VertexCondition::Kirchhoff, 4.0), GridParams::new(0.01, 24.0).unwrap()).unwrap();
    let r = minimize_energy_mass(&disc, 4.0, &SolverOptions::default()).unwrap();
    let exact = soliton_energy(4.0, 1.0).unwrap();
    // E = omega M (p - 6) / (2 (p + 2)) with M = 4 at omega = 1.
    let closed = -2.0 / 3.0;
    let rel = (r.energy - exact).abs() / exact.abs();
    let pass = r.converged() && rel <= 1e-3 && (exact - closed).abs() < 1e-12 && (r.omega - 1.0).abs() <= 0.01;
    (
        pass,
        format!("E={:.7} vs {exact:.7} (rel {rel:.1e}), omega={:.5}, {}", r.energy, r.omega, r.status),
    )
}

fn c03_delta_attractive() -> Outcome {
    let disc = Discretization::new(
        line(VertexCondition::Delta { alpha: 1.0 }, 4.0),
        GridParams::new(0.01, 24.0).unwrap(),
    )
    .unwrap();
    let opts = SolverOptions::default();
    let r = minimize_action_nehari(&disc, 1.0, &opts).unwrap();
    let a = 0.5 * 3f64.ln();
    let expected = disc.sample(|_, x| 2f64.sqrt() / (x + a).cosh());
    let err = r.profile.sup_distance(&expected);
    let refused = [0.25, 0.2]
        .iter()
        .all(|&w| matches!(minimize_action_nehari(&disc, w, &opts), Err(SolverError::BelowThreshold { .. })));
    (
        r.converged() && err <= 1e-3 && refused && (a - 0.549306).abs() < 1e-6,
        format!("shift {a:.6}, sup error {err:.2e} (<= 1e-3), refuses omega<=0.25: {refused}"),
    )
}

fn asymmetric(row: &ScanRow) -> bool {
    matches!(&row.outcome, Ok(d) if d.branch == "asymmetric")
}

fn c04_delta_prime_onset() -> Outcome {
    let p = preset("delta-prime-line").unwrap();
    let opts = SolverOptions::default();
    let coarse = scan(&p.problem, &p.grid, ScanParam::Omega, &"5:12:29".parse().unwrap(), None, &opts).unwrap();
    let all_ok = coarse.iter().all(|r| r.outcome.as_ref().is_ok_and(|d| d.exists));
    let Some(i) = coarse.iter().position(asymmetric).filter(|&i| i > 0) else {
        return (false, "no symmetric-to-asymmetric change in the coarse scan".into());
    };
    let grid = ParamGrid {
        lo: coarse[i - 1].parameter,
        hi: coarse[i].parameter,
        count: 29,
    };
    let fine = scan(&p.problem, &p.grid, ScanParam::Omega, &grid, None, &opts).unwrap();
    let Some(j) = fine.iter().position(asymmetric) else {
        return (false, "refinement lost the asymmetric state".into());
    };
    let onset = fine[j].parameter;
    let monotone = fine[j..].iter().all(asymmetric) && coarse[i..].iter().all(asymmetric);
    let rel = (onset - 8.0).abs() / 8.0;
    (
        all_ok && monotone && rel <= 0.05,
        format!("onset {onset:.4} (target 8, {:.2}% off, allowed 5%)", 100.0 * rel),
    )
}

fn c05_fulop_tsutsui() -> Outcome {
    let disc = Discretization::new(
        line(VertexCondition::FulopTsutsui { tau: 2.0, v: 1.0 }, 4.0),
        GridParams::new(0.01, 24.0).unwrap(),
    )
    .unwrap();
    let threshold = omega_min_ft(2.0, 1.0).unwrap();
    let r = minimize_action_nehari(&disc, 1.0, &SolverOptions::default()).unwrap();
    let t = disc.vertex_traces(&r.profile, VertexId(0));
    let exact_jump = t[1] == 2.0 * t[0];
    let p = 4.0;
    let gap = (r.action - (p - 2.0) / (2.0 * p) * disc.lp_integral(&r.profile, p)).abs();
    (
        r.converged() && (threshold - 0.04).abs() < 1e-12 && exact_jump && gap <= 1e-8,
        format!("threshold {threshold:.4}, u(0+)=2u(0-) exact: {exact_jump}, |S - (p-2)/(2p)|u|_p^p| = {gap:.1e}"),
    )
}

fn c06_star_symmetry() -> Outcome {
    let p = preset("delta-star3").unwrap();
    let (_, r) = solve(&p.problem, &p.grid, Target::Mass(0.5), &SolverOptions::default()).unwrap();
    let asym = r.profile.permutation_asymmetry();
    let decreasing = r
        .profile
        .edges()
        .iter()
        .all(|e| e.windows(2).all(|w| w[1].abs() <= w[0].abs() + 1e-14));
    (
        r.converged() && asym <= 1e-6 && decreasing,
        format!("mass 0.5: permutation asymmetry {asym:.1e}, decreasing on every halfline: {decreasing}"),
    )
}

fn verdict(problem: &ProblemSpec, mu: f64) -> &'static str {
    match detect_unboundedness(problem, mu).unwrap() {
        Unboundedness::Witness { .. } => "witness",
        Unboundedness::Bounded => "bounded",
        Unboundedness::Inconclusive { .. } => "inconclusive",
    }
}

fn c07_critical_masses() -> Outcome {
    let mu_p6 = 0.5 * 3f64.sqrt() * PI;
    let mu_star = 3f64.sqrt() * (0.5 * PI - (3.0f64 / 7.0).sqrt().asin());
    let cases = [
        (line(VertexCondition::Kirchhoff, 6.0), mu_p6),
        (line(VertexCondition::NonlinearDelta { q: 4.0 }, 4.0), 2.0),
        (line(VertexCondition::NonlinearDelta { q: 4.0 }, 6.0), mu_star),
    ];
    let mut pass = (mu_star - 1.48449).abs() < 1e-5 && (mu_star_doubly_critical() - mu_star).abs() < 1e-14;
    let mut parts = Vec::new();
    for (problem, mu) in &cases {
        let below = verdict(problem, 0.9 * mu);
        let above = verdict(problem, 1.1 * mu);
        pass &= below == "bounded" && above == "witness";
        parts.push(format!("{below}/{above}"));
    }
    (pass, format!("p=6, q=4, doubly critical (mu*={mu_star:.5}): {}", parts.join(", ")))
}

fn c08_gss_consistency() -> Outcome {
    let problem = line(VertexCondition::Delta { alpha: 1.0 }, 4.0);
    let curve = action_curve(&problem, BranchSelector::Ground, (0.3, 5.0), 20, &CurveOptions::default()).unwrap();
    let k = classify(&curve).unwrap();
    let worst = derivative_identity(&curve).iter().map(|c| c.relative_error).fold(0.0, f64::max);
    let positive = k.verdicts.iter().all(|v| v.second_difference > 0.0);
    (
        curve.samples.len() == 20 && k.all(Verdict::Stable) && positive && worst <= 0.03,
        format!("{} interior samples stable, max |d' - mass/2|/(mass/2) = {:.2}%", k.verdicts.len(), 100.0 * worst),
    )
}

fn c09_transition() -> Outcome {
    let problem = line(VertexCondition::Delta { alpha: 1.0 }, 7.0);
    let curve = action_curve(&problem, BranchSelector::Ground, (0.3, 10.0), 40, &CurveOptions::default()).unwrap();
    let k = classify(&curve).unwrap();
    let t = &k.transitions;
    let pass = t.len() == 1 && t[0].from == Verdict::Stable && t[0].to == Verdict::Unstable && t[0].omega > 0.25;
    let at = t.first().map(|t| format!("{:.3}", t.omega)).unwrap_or_else(|| "none".into());
    (pass, format!("{} transition(s), omega_1 estimate {at} (no reference value)", t.len()))
}

fn orientation(name: &str, range: (f64, f64)) -> BracketOutcome {
    let p = preset(name).unwrap();
    bracket_mass_threshold(&p.problem, &p.grid, range, 8, &SolverOptions::default()).unwrap()
}

fn describe(b: &BracketOutcome) -> String {
    match b {
        BracketOutcome::Threshold { lo, hi, orientation, .. } => format!("{orientation:?} in [{lo:.3}, {hi:.3}]"),
        BracketOutcome::NoThreshold { holds, .. } => format!("no threshold (predicate {holds})"),
    }
}

fn c10_trichotomy() -> Outcome {
    let low = orientation("nldelta-star3-q2.5", (1.0, 16.0));
    let high = orientation("nldelta-star3-q3.5", (0.5, 8.0));
    let balanced = orientation("nldelta-star3-q3", (0.5, 5.0));
    let pass = matches!(low, BracketOutcome::Threshold { orientation: Orientation::ExistsBelow, .. })
        && matches!(high, BracketOutcome::Threshold { orientation: Orientation::ExistsAbove, .. })
        && matches!(balanced, BracketOutcome::NoThreshold { .. });
    (
        pass,
        format!("q=2.5: {}; q=3.5: {}; q=3 over [0.5,5]: {}", describe(&low), describe(&high), describe(&balanced)),
    )
}

fn random_problem(rng: &mut ChaCha8Rng) -> ProblemSpec {
    let p = rng.gen_range(2.5..7.0);
    let c = match rng.gen_range(0..6) {
        0 => VertexCondition::Kirchhoff,
        1 => VertexCondition::Delta { alpha: rng.gen_range(-2.0..2.0) },
        2 => VertexCondition::DeltaPrime { beta: rng.gen_range(0.3..3.0) },
        3 => VertexCondition::Dipole { tau: rng.gen_range(1.2..3.0) },
        4 => VertexCondition::FulopTsutsui { tau: rng.gen_range(1.2..3.0), v: rng.gen_range(0.2..2.0) },
        _ => VertexCondition::NonlinearDelta { q: rng.gen_range(2.2..4.0) },
    };
    if c.is_continuous() {
        ProblemSpec::uniform(star_graph(rng.gen_range(2..5)).unwrap(), c, p)
    } else {
        line(c, p)
    }
}

fn random_function(disc: &Discretization, rng: &mut ChaCha8Rng) -> GraphFunction {
    let (a, c, w) = (rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0), rng.gen_range(0.5..2.0));
    let x: Vec<f64> = disc
        .to_dofs(&disc.sample(|e, x| (1.0 + 0.3 * e.0 as f64) * a * (-((x - c) / w).powi(2)).exp()))
        .into_iter()
        .map(|v| v + rng.gen_range(-0.05..0.05))
        .collect();
    disc.from_dofs(&x)
}

fn c11_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = GridParams::new(0.05, 6.0).unwrap();
    let mut grad_worst: f64 = 0.0;
    let mut mass_worst: f64 = 0.0;
    let mut nehari_worst: f64 = 0.0;
    for case in 0..20 {
        let problem = random_problem(&mut rng);
        let disc = Discretization::new(problem.clone(), grid).unwrap();
        let u = random_function(&disc, &mut rng);
        let d = random_function(&disc, &mut rng);
        let (x, dx) = (disc.to_dofs(&u), disc.to_dofs(&d));
        let g = disc.dof_gradient(&u, Functional::Energy);
        let analytic: f64 = g.iter().zip(&dx).map(|(a, b)| a * b).sum();
        let eps = 1e-5;
        let at = |s: f64| {
            let y: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + s * b).collect();
            disc.energy(&disc.from_dofs(&y)).total
        };
        let numeric = (at(eps) - at(-eps)) / (2.0 * eps);
        grad_worst = grad_worst.max((analytic - numeric).abs() / analytic.abs().max(1e-3));

        if problem.p < 6.0 {
            let mu = rng.gen_range(0.3..3.0);
            let opts = SolverOptions {
                max_iterations: 5,
                initial_guess: InitialGuess::RandomBump,
                seed: case,
                ..SolverOptions::default()
            };
            let r = minimize_energy_mass(&disc, mu, &opts).unwrap();
            mass_worst = mass_worst.max((r.mass - mu).abs() / mu);
        }

        let omega = rng.gen_range(0.5..3.0);
        if let Some(v) = nehari_rescale(&disc, &u, omega) {
            nehari_worst = nehari_worst.max(disc.nehari(&v, omega).abs());
        }
    }

    let p = preset("ft-line").unwrap();
    let opts = SolverOptions {
        initial_guess: InitialGuess::RandomBump,
        seed: 7,
        ..SolverOptions::default()
    };
    let run = || {
        let (disc, r) = solve(&p.problem, &p.grid, Target::Omega(1.0), &opts).unwrap();
        r.to_key_value() + &write_profile_csv(&disc, &r.profile)
    };
    let d = preset("dipole-line").unwrap();
    let scan_run = || {
        let rows = scan(&d.problem, &d.grid, ScanParam::Omega, &"0.5:2:4".parse().unwrap(), None, &opts).unwrap();
        scan_csv(ScanParam::Omega, &rows)
    };
    let identical = run() == run() && scan_run() == scan_run();
    (
        grad_worst <= 1e-5 && mass_worst <= 1e-12 && nehari_worst <= 1e-10 && identical,
        format!(
            "gradient {grad_worst:.1e} (<= 1e-5), mass {mass_worst:.1e} (<= 1e-12), \
             Nehari {nehari_worst:.1e} (<= 1e-10), byte-identical reruns: {identical}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("soliton oracle residual", c01_soliton_residual),
        ("Kirchhoff line recovery", c02_kirchhoff_line),
        ("attractive delta shift and refusal", c03_delta_attractive),
        ("delta-prime bifurcation onset", c04_delta_prime_onset),
        ("Fulop-Tsutsui existence and equivalence", c05_fulop_tsutsui),
        ("N-tail symmetry", c06_star_symmetry),
        ("critical masses", c07_critical_masses),
        ("GSS surrogate consistency", c08_gss_consistency),
        ("transition detection", c09_transition),
        ("star-graph trichotomy orientation", c10_trichotomy),
        ("property suite", c11_properties),
    ];
    panic::set_hook(Box::new(|_| {}));
    let results: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| s.spawn(move || panic::catch_unwind(AssertUnwindSafe(f))))
            .collect();
        handles
            .into_iter()
            .map(|h| match h.join().expect("criterion thread") {
                Ok(outcome) => outcome,
                Err(e) => {
                    let msg = e
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default();
                    (false, format!("panicked: {msg}"))
                }
            })
            .collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (pass, detail))) in criteria.iter().zip(&results).enumerate() {
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if *pass { "PASS" } else { "FAIL" });
        failed += usize::from(!pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
