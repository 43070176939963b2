use super::{GridPolicy, Target};
use crate::discretization::GridParams;
use crate::graph::{line_graph, star_graph, ProblemSpec, VertexCondition};
use crate::oracle::{mu_star_doubly_critical, CRITICAL_MASS_P6, CRITICAL_MASS_Q4};

/// A named problem with its default target and grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub problem: ProblemSpec,
    pub grid: GridPolicy,
    pub target: Target,
}

pub const PRESET_NAMES: &[&str] = &[
    "kirchhoff-line",
    "delta-line-attractive",
    "delta-line-repulsive",
    "delta-line-p7",
    "delta-prime-line",
    "dipole-line",
    "ft-line",
    "ft-line-p7",
    "delta-star3",
    "nldelta-star3-q2.5",
    "nldelta-star3-q3",
    "nldelta-star3-q3.5",
    "critical-p6-line",
    "critical-q4-line",
    "doubly-critical-line",
];

fn fixed(h: f64, length: f64) -> GridPolicy {
    GridPolicy::Fixed(GridParams::new(h, length).expect("preset grid is valid"))
}

fn adapted() -> GridPolicy {
    GridPolicy::Adapted {
        h_ref: GridPolicy::DEFAULT_H_REF,
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    let line = |c: VertexCondition, p: f64| ProblemSpec::uniform(line_graph(), c, p);
    let star3 = |c: VertexCondition, p: f64| ProblemSpec::uniform(star_graph(3).expect("3 halflines"), c, p);
    let nl = |q: f64| VertexCondition::NonlinearDelta { q };
    let (summary, problem, grid, target) = match name {
        "kirchhoff-line" => (
            "free soliton on the line, p=4",
            line(VertexCondition::Kirchhoff, 4.0),
            fixed(0.01, 24.0),
            Target::Mass(4.0),
        ),
        "delta-line-attractive" => (
            "attractive delta on the line, alpha=1, p=4",
            line(VertexCondition::Delta { alpha: 1.0 }, 4.0),
            fixed(0.01, 24.0),
            Target::Omega(1.0),
        ),
        "delta-line-repulsive" => (
            "repulsive delta on the line, alpha=-1, p=4",
            line(VertexCondition::Delta { alpha: -1.0 }, 4.0),
            fixed(0.01, 24.0),
            Target::Omega(1.0),
        ),
        "delta-line-p7" => (
            "attractive delta on the line, alpha=1, p=7",
            line(VertexCondition::Delta { alpha: 1.0 }, 7.0),
            fixed(0.01, 24.0),
            Target::Omega(1.0),
        ),
        "delta-prime-line" => (
            "delta-prime on the line, beta=1, p=4",
            line(VertexCondition::DeltaPrime { beta: 1.0 }, 4.0),
            fixed(0.02, 12.0),
            Target::Omega(9.0),
        ),
        "dipole-line" => (
            "dipole on the line, tau=2, p=4",
            line(VertexCondition::Dipole { tau: 2.0 }, 4.0),
            fixed(0.01, 24.0),
            Target::Omega(1.0),
        ),
        "ft-line" => (
            "Fulop-Tsutsui on the line, tau=2, v=1, p=4",
            line(VertexCondition::FulopTsutsui { tau: 2.0, v: 1.0 }, 4.0),
            fixed(0.01, 24.0),
            Target::Omega(1.0),
        ),
        "ft-line-p7" => (
            "Fulop-Tsutsui on the line, tau=2, v=1, p=7",
            line(VertexCondition::FulopTsutsui { tau: 2.0, v: 1.0 }, 7.0),
            fixed(0.02, 100.0),
            Target::Omega(1.0),
        ),
        "delta-star3" => (
            "attractive delta on the 3-star, alpha=1, p=4",
            star3(VertexCondition::Delta { alpha: 1.0 }, 4.0),
            adapted(),
            Target::Mass(1.0),
        ),
        "nldelta-star3-q2.5" => (
            "nonlinear delta on the 3-star, p=4, q=2.5",
            star3(nl(2.5), 4.0),
            adapted(),
            Target::Mass(1.0),
        ),
        "nldelta-star3-q3" => (
            "nonlinear delta on the 3-star, p=4, q=3 (balanced)",
            star3(nl(3.0), 4.0),
            adapted(),
            Target::Mass(1.0),
        ),
        "nldelta-star3-q3.5" => (
            "nonlinear delta on the 3-star, p=4, q=3.5",
            star3(nl(3.5), 4.0),
            adapted(),
            Target::Mass(1.0),
        ),
        "critical-p6-line" => (
            "quintic nonlinearity on the line above the critical mass",
            line(VertexCondition::Kirchhoff, 6.0),
            fixed(0.02, 24.0),
            Target::Mass(1.1 * CRITICAL_MASS_P6),
        ),
        "critical-q4-line" => (
            "quartic pointwise nonlinearity on the line above the critical mass",
            line(nl(4.0), 4.0),
            fixed(0.02, 24.0),
            Target::Mass(1.1 * CRITICAL_MASS_Q4),
        ),
        "doubly-critical-line" => (
            "p=6 and q=4 on the line above the doubly critical mass",
            line(nl(4.0), 6.0),
            fixed(0.02, 24.0),
            Target::Mass(1.1 * mu_star_doubly_critical()),
        ),
        _ => return None,
    };
    Some(Preset {
        name: PRESET_NAMES.iter().copied().find(|n| *n == name)?,
        summary,
        problem,
        grid,
        target,
    })
}

pub fn presets() -> Vec<Preset> {
    PRESET_NAMES.iter().filter_map(|n| preset(n)).collect()
}
