//! P1 finite-element discretization of functions on a metric graph.
//!
//! Every edge carries uniform nodes; halflines are truncated at `L` with a
//! homogeneous Dirichlet value. Integrals use the trapezoid rule and the
//! derivative is the forward difference on each cell, so the discrete
//! kinetic term is exactly the P1 stiffness energy. Vertex constraints are
//! built into the unknowns (see [`Grid`]) and vertex conditions appear as the
//! natural boundary conditions of the discrete functionals.

mod csv;
mod function;
mod grid;

use thiserror::Error;

pub use self::csv::{read_profile_csv, write_profile_csv};
pub use function::GraphFunction;
pub use grid::{Dof, DofKind, EdgeGrid, Grid, GridParams, VertexTraces, DECAY_EXPONENT};

use crate::graph::{EdgeId, ProblemSpec, VertexCondition, VertexId, Violation};
use grid::NodeDof;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DiscretizationError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid problem: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidProblem(Vec<Violation>),
    #[error("function does not match the grid: {0}")]
    Shape(String),
    #[error("vertex constraint violated at vertex {vertex}: defect {defect:e}")]
    Constraint { vertex: usize, defect: f64 },
    #[error("profile csv: {0}")]
    Csv(String),
}

/// Components of the energy `E = kinetic - lp_term + vertex_term`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    /// `1/2 int |u'|^2`.
    pub kinetic: f64,
    /// `1/p int |u|^p`.
    pub lp_term: f64,
    /// Sum of the vertex energies.
    pub vertex_term: f64,
    pub total: f64,
}

/// Pieces of the Nehari functional `I = quadratic - power - pointwise`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NehariParts {
    /// `int |u'|^2 + omega int |u|^2 + 2 * (quadratic vertex energies)`.
    pub quadratic: f64,
    /// `int |u|^p`.
    pub power: f64,
    /// `sum_v |u(v)|^q` over nonlinear-delta vertices.
    pub pointwise: f64,
    /// `sum_v (q_v - 2) / (2 q_v) |u(v)|^q_v`, used in the Nehari-level action.
    pub pointwise_action: f64,
}

impl NehariParts {
    pub fn value(&self) -> f64 {
        self.quadratic - self.power - self.pointwise
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    Energy,
    Action { omega: f64 },
}

impl Functional {
    fn omega(&self) -> f64 {
        match *self {
            Functional::Energy => 0.0,
            Functional::Action { omega } => omega,
        }
    }
}

/// Defects of the discrete stationary equation.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryResidual {
    /// `max |D2 u + |u|^{p-2} u - omega u|` over interior nodes.
    pub interior: f64,
    /// Per-vertex matching-condition defect.
    pub vertices: Vec<f64>,
    /// `interior + max(vertices)`.
    pub total: f64,
}

/// A validated problem together with its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    problem: ProblemSpec,
    grid: Grid,
}

fn power_term(u: f64, p: f64) -> f64 {
    u.abs().powf(p)
}

/// `|u|^{p-2} u`.
fn power_force(u: f64, p: f64) -> f64 {
    u.abs().powf(p - 2.0) * u
}

impl Discretization {
    pub fn new(problem: ProblemSpec, params: GridParams) -> Result<Self, DiscretizationError> {
        problem
            .ensure_valid()
            .map_err(DiscretizationError::InvalidProblem)?;
        let grid = Grid::new(&problem, params)?;
        Ok(Discretization { problem, grid })
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn p(&self) -> f64 {
        self.problem.p
    }

    pub fn zeros(&self) -> GraphFunction {
        GraphFunction::from_values(self.grid.edges().iter().map(|g| vec![0.0; g.nodes()]).collect())
    }

    pub fn from_dofs(&self, x: &[f64]) -> GraphFunction {
        assert_eq!(x.len(), self.grid.dof_count(), "dof vector length");
        let values = self
            .grid
            .edges()
            .iter()
            .enumerate()
            .map(|(e, g)| {
                (0..g.nodes())
                    .map(|i| match self.grid.node_dof(e, i) {
                        NodeDof::Free { dof, coef } => coef * x[dof],
                        NodeDof::Dirichlet => 0.0,
                    })
                    .collect()
            })
            .collect();
        GraphFunction::from_values(values)
    }

    /// Reads each unknown from the first node it controls.
    pub fn to_dofs(&self, u: &GraphFunction) -> Vec<f64> {
        self.grid
            .dofs()
            .iter()
            .map(|d| {
                let (e, node, coef) = d.nodes[0];
                u.edge(e)[node] / coef
            })
            .collect()
    }

    /// Samples `f(edge, x)` at the nodes and projects onto the constrained
    /// space: shared traces take the first incident edge's value, derived
    /// traces are recomputed, Dirichlet ends are zeroed.
    pub fn sample(&self, f: impl Fn(EdgeId, f64) -> f64) -> GraphFunction {
        let raw = GraphFunction::from_values(
            self.grid
                .edges()
                .iter()
                .enumerate()
                .map(|(e, g)| (0..g.nodes()).map(|i| f(EdgeId(e), g.x(i))).collect())
                .collect(),
        );
        self.from_dofs(&self.to_dofs(&raw))
    }

    /// Shape and constraint check; constraint defects above `1e-12` relative fail.
    pub fn check(&self, u: &GraphFunction) -> Result<(), DiscretizationError> {
        if u.edge_count() != self.grid.edges().len() {
            return Err(DiscretizationError::Shape(format!(
                "{} edges, grid has {}",
                u.edge_count(),
                self.grid.edges().len()
            )));
        }
        for (e, g) in self.grid.edges().iter().enumerate() {
            if u.edge(e).len() != g.nodes() {
                return Err(DiscretizationError::Shape(format!(
                    "edge {e} has {} samples, grid has {}",
                    u.edge(e).len(),
                    g.nodes()
                )));
            }
        }
        let projected = self.from_dofs(&self.to_dofs(u));
        let scale = u.sup_norm().max(1.0);
        for v in self.problem.graph.vertex_ids() {
            let defect = self
                .grid
                .vertex(v)
                .endpoints
                .iter()
                .map(|&(e, n)| (u.edge(e)[n] - projected.edge(e)[n]).abs())
                .fold(0.0, f64::max);
            if defect > 1e-12 * scale {
                return Err(DiscretizationError::Constraint { vertex: v.0, defect });
            }
        }
        for (e, g) in self.grid.edges().iter().enumerate() {
            if g.halfline && u.edge(e)[g.cells] != 0.0 {
                return Err(DiscretizationError::Constraint {
                    vertex: usize::MAX,
                    defect: u.edge(e)[g.cells].abs(),
                });
            }
        }
        Ok(())
    }

    /// Trapezoid `int a b`.
    pub fn inner(&self, a: &GraphFunction, b: &GraphFunction) -> f64 {
        self.grid
            .edges()
            .iter()
            .enumerate()
            .map(|(e, g)| {
                a.edge(e)
                    .iter()
                    .zip(b.edge(e))
                    .enumerate()
                    .map(|(i, (x, y))| g.weight(i) * x * y)
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn mass(&self, u: &GraphFunction) -> f64 {
        self.inner(u, u)
    }

    /// Trapezoid `int |u|^r`.
    pub fn lp_integral(&self, u: &GraphFunction, r: f64) -> f64 {
        self.grid
            .edges()
            .iter()
            .enumerate()
            .map(|(e, g)| {
                u.edge(e)
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| g.weight(i) * power_term(x, r))
                    .sum::<f64>()
            })
            .sum()
    }

    /// `int |u'|^2` with cellwise forward differences.
    pub fn kinetic_integral(&self, u: &GraphFunction) -> f64 {
        self.grid
            .edges()
            .iter()
            .enumerate()
            .map(|(e, g)| {
                u.edge(e)
                    .windows(2)
                    .map(|w| (w[1] - w[0]).powi(2))
                    .sum::<f64>()
                    / g.h
            })
            .sum()
    }

    /// Traces of `u` at vertex `v`, in incidence order.
    pub fn vertex_traces(&self, u: &GraphFunction, v: VertexId) -> Vec<f64> {
        self.grid
            .vertex(v)
            .endpoints
            .iter()
            .map(|&(e, n)| u.edge(e)[n])
            .collect()
    }

    /// `(sum of quadratic vertex energies, sum |u|^q/q, sum |u|^q, sum (q-2)/(2q)|u|^q)`.
    fn vertex_terms(&self, u: &GraphFunction) -> (f64, f64, f64, f64) {
        let mut quadratic = 0.0;
        let mut pointwise_energy = 0.0;
        let mut pointwise = 0.0;
        let mut pointwise_action = 0.0;
        for v in self.problem.graph.vertex_ids() {
            let traces = self.vertex_traces(u, v);
            match *self.problem.condition(v) {
                VertexCondition::Kirchhoff | VertexCondition::Dipole { .. } => {}
                VertexCondition::Delta { alpha } => quadratic -= 0.5 * alpha * traces[0] * traces[0],
                VertexCondition::DeltaPrime { beta } => {
                    let jump = traces[1] - traces[0];
                    quadratic -= jump * jump / (2.0 * beta);
                }
                VertexCondition::FulopTsutsui { v: strength, .. } => {
                    quadratic -= 0.5 * strength * traces[0] * traces[0]
                }
                VertexCondition::NonlinearDelta { q } => {
                    let r = power_term(traces[0], q);
                    pointwise += r;
                    pointwise_energy += r / q;
                    pointwise_action += (q - 2.0) / (2.0 * q) * r;
                }
            }
        }
        (quadratic, pointwise_energy, pointwise, pointwise_action)
    }

    pub fn energy(&self, u: &GraphFunction) -> FunctionalValue {
        let p = self.p();
        let kinetic = 0.5 * self.kinetic_integral(u);
        let lp_term = self.lp_integral(u, p) / p;
        let (quadratic, pointwise_energy, _, _) = self.vertex_terms(u);
        let vertex_term = quadratic - pointwise_energy;
        FunctionalValue {
            kinetic,
            lp_term,
            vertex_term,
            total: kinetic - lp_term + vertex_term,
        }
    }

    /// `S_omega(u) = E(u) + omega/2 int |u|^2`.
    pub fn action(&self, u: &GraphFunction, omega: f64) -> f64 {
        self.energy(u).total + 0.5 * omega * self.mass(u)
    }

    pub fn functional(&self, u: &GraphFunction, functional: Functional) -> f64 {
        match functional {
            Functional::Energy => self.energy(u).total,
            Functional::Action { omega } => self.action(u, omega),
        }
    }

    pub fn nehari_parts(&self, u: &GraphFunction, omega: f64) -> NehariParts {
        let (quadratic_vertex, _, pointwise, pointwise_action) = self.vertex_terms(u);
        NehariParts {
            quadratic: self.kinetic_integral(u) + omega * self.mass(u) + 2.0 * quadratic_vertex,
            power: self.lp_integral(u, self.p()),
            pointwise,
            pointwise_action,
        }
    }

    /// `I_omega(u) = <S'_omega(u), u>`.
    pub fn nehari(&self, u: &GraphFunction, omega: f64) -> f64 {
        self.nehari_parts(u, omega).value()
    }

    /// Partial derivatives of the functional with respect to the unknowns.
    pub fn dof_gradient(&self, u: &GraphFunction, functional: Functional) -> Vec<f64> {
        let p = self.p();
        let omega = functional.omega();
        let mut grad = vec![0.0; self.grid.dof_count()];
        for (e, g) in self.grid.edges().iter().enumerate() {
            let values = u.edge(e);
            let n = g.cells;
            for i in 0..=n {
                let NodeDof::Free { dof, coef } = self.grid.node_dof(e, i) else {
                    continue;
                };
                let x = values[i];
                let mut d = 0.0;
                if i > 0 {
                    d += (x - values[i - 1]) / g.h;
                }
                if i < n {
                    d += (x - values[i + 1]) / g.h;
                }
                d += g.weight(i) * (omega * x - power_force(x, p));
                grad[dof] += coef * d;
            }
        }
        for v in self.problem.graph.vertex_ids() {
            let traces = self.vertex_traces(u, v);
            let dofs = &self.grid.vertex(v).dofs;
            match *self.problem.condition(v) {
                VertexCondition::Kirchhoff | VertexCondition::Dipole { .. } => {}
                VertexCondition::Delta { alpha } => grad[dofs[0]] -= alpha * traces[0],
                VertexCondition::DeltaPrime { beta } => {
                    let jump = traces[1] - traces[0];
                    grad[dofs[0]] += jump / beta;
                    grad[dofs[1]] -= jump / beta;
                }
                VertexCondition::FulopTsutsui { v: strength, .. } => grad[dofs[0]] -= strength * traces[0],
                VertexCondition::NonlinearDelta { q } => grad[dofs[0]] -= power_force(traces[0], q),
            }
        }
        grad
    }

    /// Discrete L2 gradient: `<gradient(u), d> = dF(u)[d]` for every
    /// admissible direction `d`, with `<.,.>` the trapezoid inner product.
    pub fn gradient(&self, u: &GraphFunction, functional: Functional) -> GraphFunction {
        let g: Vec<f64> = self
            .dof_gradient(u, functional)
            .into_iter()
            .zip(self.grid.dofs())
            .map(|(g, d)| g / d.weight)
            .collect();
        self.from_dofs(&g)
    }

    /// Corrected one-sided inward derivative at an endpoint:
    /// `(u_0 - u_1)/h + h/2 (omega u_0 - |u_0|^{p-2} u_0)`.
    fn inward_derivative(&self, u: &GraphFunction, e: usize, node: usize, omega: f64) -> f64 {
        let g = self.grid.edge(e);
        let values = u.edge(e);
        let neighbour = if node == 0 { values[1] } else { values[node - 1] };
        let x = values[node];
        (x - neighbour) / g.h + 0.5 * g.h * (omega * x - power_force(x, self.p()))
    }

    /// Defects of the stationary equation `-u'' - |u|^{p-2}u + omega u = 0`
    /// and of each vertex condition, expressed with inward derivatives.
    pub fn stationary_residual(&self, u: &GraphFunction, omega: f64) -> StationaryResidual {
        let p = self.p();
        let mut interior: f64 = 0.0;
        for (e, g) in self.grid.edges().iter().enumerate() {
            let values = u.edge(e);
            let h2 = g.h * g.h;
            for i in 1..g.cells {
                let x = values[i];
                let r = (values[i + 1] - 2.0 * x + values[i - 1]) / h2 + power_force(x, p) - omega * x;
                interior = interior.max(r.abs());
            }
        }
        let mut vertices = Vec::with_capacity(self.problem.graph.vertex_count());
        for v in self.problem.graph.vertex_ids() {
            let traces = self.grid.vertex(v);
            let values = self.vertex_traces(u, v);
            let inward: Vec<f64> = traces
                .endpoints
                .iter()
                .map(|&(e, n)| self.inward_derivative(u, e, n, omega))
                .collect();
            let sum: f64 = inward.iter().sum();
            let spread = |vals: &[f64]| {
                vals.iter()
                    .map(|x| (x - vals[0]).abs())
                    .fold(0.0, f64::max)
            };
            let defect = match *self.problem.condition(v) {
                VertexCondition::Kirchhoff => sum.abs().max(spread(&values)),
                VertexCondition::Delta { alpha } => (sum - alpha * values[0]).abs().max(spread(&values)),
                VertexCondition::NonlinearDelta { q } => {
                    (sum - power_force(values[0], q)).abs().max(spread(&values))
                }
                VertexCondition::DeltaPrime { beta } => {
                    let jump = values[1] - values[0];
                    (inward[0] + jump / beta)
                        .abs()
                        .max((inward[1] - jump / beta).abs())
                }
                VertexCondition::Dipole { tau } => (inward[0] + tau * inward[1])
                    .abs()
                    .max((values[1] - tau * values[0]).abs()),
                VertexCondition::FulopTsutsui { tau, v: strength } => {
                    (inward[0] + tau * inward[1] - strength * values[0])
                        .abs()
                        .max((values[1] - tau * values[0]).abs())
                }
            };
            vertices.push(defect);
        }
        let worst = vertices.iter().copied().fold(0.0, f64::max);
        StationaryResidual {
            interior,
            total: interior + worst,
            vertices,
        }
    }

    /// Lumped mass of every unknown.
    pub fn dof_weights(&self) -> Vec<f64> {
        self.grid.dofs().iter().map(|d| d.weight).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{line_graph, star_graph, Edge, MetricGraph};

    fn line(condition: VertexCondition, p: f64, h: f64, l: f64) -> Discretization {
        Discretization::new(
            ProblemSpec::uniform(line_graph(), condition, p),
            GridParams::new(h, l).unwrap(),
        )
        .unwrap()
    }

    fn bump(e: EdgeId, x: f64) -> f64 {
        (1.0 + 0.3 * e.0 as f64) * (-(x + 0.4).powi(2)).exp() * (1.0 + 0.2 * (3.0 * x).sin())
    }

    #[test]
    fn grid_param_checks() {
        assert!(GridParams::new(0.01, 24.0).is_ok());
        assert!(GridParams::new(0.01, 0.05).is_err());
        assert!(GridParams::new(0.03, 1.0).is_err());
        assert!(GridParams::new(-0.1, 1.0).is_err());
        let g = GridParams::for_frequency(0.01, 1.0).unwrap();
        assert!(g.halfline_length() >= 24.0);
        assert!(g.decay_bound(1.0) <= 1e-10);
    }

    #[test]
    fn zero_function_has_zero_functionals() {
        let d = line(VertexCondition::Delta { alpha: 1.0 }, 4.0, 0.1, 5.0);
        let z = d.zeros();
        assert_eq!(d.mass(&z), 0.0);
        assert_eq!(d.energy(&z).total, 0.0);
        assert_eq!(d.action(&z, 1.3), 0.0);
        assert_eq!(d.nehari(&z, 1.3), 0.0);
        assert_eq!(d.gradient(&z, Functional::Energy).sup_norm(), 0.0);
        assert_eq!(d.stationary_residual(&z, 1.0).total, 0.0);
    }

    #[test]
    fn kirchhoff_matches_zero_delta_exactly() {
        let k = line(VertexCondition::Kirchhoff, 4.0, 0.05, 8.0);
        let d = line(VertexCondition::Delta { alpha: 0.0 }, 4.0, 0.05, 8.0);
        let u = k.sample(bump);
        assert_eq!(k.energy(&u), d.energy(&u));
        assert_eq!(k.dof_gradient(&u, Functional::Energy), d.dof_gradient(&u, Functional::Energy));
    }

    #[test]
    fn kirchhoff_line_equals_single_interval() {
        // Same profile on one interval [-L, L] with one Dirichlet end on each side.
        let d = line(VertexCondition::Kirchhoff, 4.0, 0.05, 4.0);
        let f = |x: f64| (-(x - 0.3).powi(2)).exp();
        let u = d.sample(|e, x| if e.0 == 0 { f(-x) } else { f(x) });
        let n = 80;
        let xs: Vec<f64> = (0..=2 * n).map(|i| -4.0 + 0.05 * i as f64).collect();
        let mut vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        vals[0] = 0.0;
        vals[2 * n] = 0.0;
        let kin: f64 = vals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / 0.05;
        let w = |i: usize| if i == 0 || i == 2 * n { 0.025 } else { 0.05 };
        let lp: f64 = vals.iter().enumerate().map(|(i, v)| w(i) * v.powi(4)).sum();
        let single = 0.5 * kin - lp / 4.0;
        assert!((d.energy(&u).total - single).abs() < 1e-13);
    }

    #[test]
    fn delta_lowers_energy_by_half_alpha_trace_squared() {
        let k = line(VertexCondition::Kirchhoff, 4.0, 0.05, 8.0);
        let d = line(VertexCondition::Delta { alpha: 1.0 }, 4.0, 0.05, 8.0);
        let u = k.sample(|_, x| 2f64.sqrt() / x.cosh());
        let diff = k.energy(&u).total - d.energy(&u).total;
        assert!((diff - 1.0).abs() < 1e-12, "{diff}");
    }

    #[test]
    fn dipole_elimination_holds_exactly() {
        let d = line(VertexCondition::Dipole { tau: 2.0 }, 4.0, 0.1, 5.0);
        let u = d.sample(bump);
        let t = d.vertex_traces(&u, VertexId(0));
        assert_eq!(t[1], 2.0 * t[0]);
        assert!(d.check(&u).is_ok());
        let g = d.gradient(&u, Functional::Energy);
        let gt = d.vertex_traces(&g, VertexId(0));
        assert_eq!(gt[1], 2.0 * gt[0]);
    }

    #[test]
    fn check_catches_broken_continuity() {
        let d = line(VertexCondition::Kirchhoff, 4.0, 0.1, 5.0);
        let mut values = d.sample(bump).edges().to_vec();
        values[1][0] += 0.1;
        assert!(matches!(
            d.check(&GraphFunction::from_values(values)),
            Err(DiscretizationError::Constraint { .. })
        ));
        let short = GraphFunction::from_values(vec![vec![0.0; 3]]);
        assert!(matches!(d.check(&short), Err(DiscretizationError::Shape(_))));
    }

    #[test]
    fn nehari_homogeneity() {
        for cond in [
            VertexCondition::Delta { alpha: 0.7 },
            VertexCondition::DeltaPrime { beta: 1.0 },
            VertexCondition::FulopTsutsui { tau: 2.0, v: 1.0 },
        ] {
            let d = line(cond, 4.5, 0.05, 6.0);
            let u = d.sample(bump);
            let parts = d.nehari_parts(&u, 1.2);
            for t in [0.5, 2.0] {
                let direct = d.nehari(&u.scaled(t), 1.2);
                let law = t * t * parts.quadratic - t.powf(4.5) * parts.power;
                assert!((direct - law).abs() <= 1e-12 * law.abs().max(1.0), "{cond}: {direct} {law}");
            }
        }
    }

    #[test]
    fn nehari_is_derivative_pairing() {
        let d = line(VertexCondition::NonlinearDelta { q: 3.0 }, 4.0, 0.05, 6.0);
        let u = d.sample(bump);
        let g = d.gradient(&u, Functional::Action { omega: 0.8 });
        assert!((d.inner(&g, &u) - d.nehari(&u, 0.8)).abs() < 1e-11);
    }

    #[test]
    fn gradient_matches_finite_difference_on_star_with_finite_edge() {
        let graph = MetricGraph::new(
            vec!["a".into(), "b".into()],
            vec![
                Edge::finite("ab", VertexId(0), VertexId(1), 2.0),
                Edge::halfline("ta", VertexId(0)),
                Edge::halfline("tb", VertexId(1)),
                Edge::halfline("tb2", VertexId(1)),
            ],
        )
        .unwrap();
        let problem = ProblemSpec::new(
            graph,
            vec![VertexCondition::NonlinearDelta { q: 3.0 }, VertexCondition::Delta { alpha: -0.4 }],
            4.0,
        );
        let d = Discretization::new(problem, GridParams::new(0.1, 4.0).unwrap()).unwrap();
        let u = d.sample(bump);
        let dir = d.sample(|e, x| (x * (1.0 + e.0 as f64)).cos() * (-x).exp());
        let f = Functional::Action { omega: 0.9 };
        let g = d.gradient(&u, f);
        let s = 1e-6;
        let fd = (d.functional(&u.axpy(s, &dir), f) - d.functional(&u.axpy(-s, &dir), f)) / (2.0 * s);
        let exact = d.inner(&g, &dir);
        assert!((fd - exact).abs() <= 1e-7 * exact.abs().max(1.0), "{fd} {exact}");
    }

    #[test]
    fn star_functionals_are_permutation_invariant() {
        let d = Discretization::new(
            ProblemSpec::uniform(star_graph(3).unwrap(), VertexCondition::Delta { alpha: 1.0 }, 4.0),
            GridParams::new(0.1, 5.0).unwrap(),
        )
        .unwrap();
        let u = d.sample(|e, x| (1.0 + e.0 as f64 * 0.1) * (-x * x).exp());
        let mut values = u.edges().to_vec();
        values.rotate_left(1);
        let rotated = GraphFunction::from_values(values);
        assert!((d.energy(&u).total - d.energy(&rotated).total).abs() < 1e-14);
        assert!((d.mass(&u) - d.mass(&rotated)).abs() < 1e-14);
        assert_eq!(d.mass(&u), d.mass(&u.scaled(-1.0)));
    }
}
