use nalgebra::{DMatrix, DVector};

use crate::discretization::{DofKind, Grid};

/// Exact solver for `A = K + shift * W` in the unknowns of a [`Grid`], where
/// `K` is the P1 stiffness matrix and `W` the lumped mass.
///
/// Interior unknowns of each edge form a tridiagonal block; the vertex
/// unknowns are eliminated through a dense Schur complement.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    shift: f64,
    edges: Vec<EdgeBlock>,
    vertex_count: usize,
    schur: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

#[derive(Debug, Clone)]
struct EdgeBlock {
    first: usize,
    len: usize,
    diag: f64,
    off: f64,
    /// Forward-sweep multipliers of the Thomas algorithm.
    sweep: Vec<f64>,
    pivots: Vec<f64>,
    /// `(vertex dof, coefficient / h)` at each end; `None` at a Dirichlet end.
    start: Option<(usize, f64)>,
    end: Option<(usize, f64)>,
    /// `A_II^{-1} e_first` and `A_II^{-1} e_last`.
    first_col: Vec<f64>,
    last_col: Vec<f64>,
}

impl EdgeBlock {
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.len;
        let mut y = vec![0.0; n];
        y[0] = rhs[0] / self.pivots[0];
        for i in 1..n {
            y[i] = (rhs[i] - self.off * y[i - 1]) / self.pivots[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= self.sweep[i] * y[i + 1];
        }
        y
    }
}

impl Preconditioner {
    pub fn new(grid: &Grid, shift: f64) -> Self {
        assert!(shift > 0.0, "preconditioner shift must be positive");
        let vertex_count = grid.vertex_dof_count();
        let mut schur = DMatrix::<f64>::zeros(vertex_count, vertex_count);
        for (k, dof) in grid.dofs().iter().enumerate().take(vertex_count) {
            debug_assert!(matches!(dof.kind, DofKind::Vertex { .. }));
            schur[(k, k)] += shift * dof.weight;
        }
        let mut edges = Vec::with_capacity(grid.edges().len());
        for (e, g) in grid.edges().iter().enumerate() {
            let range = grid.interior_dofs(e);
            let len = range.len();
            let diag = 2.0 / g.h + shift * g.h;
            let off = -1.0 / g.h;
            let mut sweep = vec![0.0; len];
            let mut pivots = vec![0.0; len];
            pivots[0] = diag;
            for i in 1..len {
                sweep[i - 1] = off / pivots[i - 1];
                pivots[i] = diag - off * sweep[i - 1];
            }
            let coupling = |node: usize| -> Option<(usize, f64)> {
                grid.dofs()[..vertex_count].iter().enumerate().find_map(|(k, d)| {
                    d.nodes
                        .iter()
                        .find(|&&(de, dn, _)| de == e && dn == node)
                        .map(|&(_, _, coef)| (k, coef / g.h))
                })
            };
            let start = coupling(0);
            let end = coupling(g.cells);
            let mut block = EdgeBlock {
                first: range.start,
                len,
                diag,
                off,
                sweep,
                pivots,
                start,
                end,
                first_col: Vec::new(),
                last_col: Vec::new(),
            };
            let mut unit = vec![0.0; len];
            unit[0] = 1.0;
            block.first_col = block.solve(&unit);
            unit[0] = 0.0;
            unit[len - 1] = 1.0;
            block.last_col = block.solve(&unit);

            // Vertex-vertex stiffness of the end cells, then the Schur correction.
            for (k, c) in [start, end].into_iter().flatten() {
                schur[(k, k)] += c * c * g.h;
            }
            let ends = [(start, &block.first_col, 0usize), (end, &block.last_col, len - 1)];
            for &(a, col_a, _) in &ends {
                let Some((ka, ca)) = a else { continue };
                for &(b, _, idx_b) in &ends {
                    let Some((kb, cb)) = b else { continue };
                    schur[(kb, ka)] -= ca * cb * col_a[idx_b];
                }
            }
            edges.push(block);
        }
        Preconditioner {
            shift,
            edges,
            vertex_count,
            schur: schur.lu(),
        }
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Returns `A^{-1} rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let nv = self.vertex_count;
        let mut x = vec![0.0; rhs.len()];
        let interior: Vec<Vec<f64>> = self
            .edges
            .iter()
            .map(|b| b.solve(&rhs[b.first..b.first + b.len]))
            .collect();
        let mut reduced = DVector::from_column_slice(&rhs[..nv]);
        for (b, y) in self.edges.iter().zip(&interior) {
            if let Some((k, c)) = b.start {
                reduced[k] += c * y[0];
            }
            if let Some((k, c)) = b.end {
                reduced[k] += c * y[b.len - 1];
            }
        }
        let vertex = if nv > 0 {
            self.schur.solve(&reduced).expect("Schur complement is positive definite")
        } else {
            reduced
        };
        x[..nv].copy_from_slice(vertex.as_slice());
        for (b, y) in self.edges.iter().zip(interior) {
            let from_start = b.start.map_or(0.0, |(k, c)| c * vertex[k]);
            let from_end = b.end.map_or(0.0, |(k, c)| c * vertex[k]);
            for i in 0..b.len {
                x[b.first + i] = y[i] + from_start * b.first_col[i] + from_end * b.last_col[i];
            }
        }
        x
    }

    /// `A x`.
    pub fn apply(&self, grid: &Grid, x: &[f64]) -> Vec<f64> {
        let nv = self.vertex_count;
        let mut out = vec![0.0; x.len()];
        for (k, d) in grid.dofs().iter().enumerate().take(nv) {
            out[k] = self.shift * d.weight * x[k];
        }
        for b in &self.edges {
            let v = &x[b.first..b.first + b.len];
            let h = -1.0 / b.off;
            for i in 0..b.len {
                let mut s = b.diag * v[i];
                if i > 0 {
                    s += b.off * v[i - 1];
                }
                if i + 1 < b.len {
                    s += b.off * v[i + 1];
                }
                out[b.first + i] = s;
            }
            for (end, idx) in [(b.start, 0), (b.end, b.len - 1)] {
                if let Some((k, c)) = end {
                    out[k] += c * c * h * x[k] - c * v[idx];
                    out[b.first + idx] -= c * x[k];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::GridParams;
    use crate::graph::{star_graph, Edge, MetricGraph, ProblemSpec, VertexCondition, VertexId};

    fn check(problem: ProblemSpec) {
        let grid = Grid::new(&problem, GridParams::new(0.1, 2.0).unwrap()).unwrap();
        let pre = Preconditioner::new(&grid, 1.7);
        let x: Vec<f64> = (0..grid.dof_count()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let back = pre.solve(&pre.apply(&grid, &x));
        let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn inverts_on_star() {
        check(ProblemSpec::uniform(star_graph(3).unwrap(), VertexCondition::Kirchhoff, 4.0));
    }

    #[test]
    fn inverts_with_jumps_and_finite_edges() {
        let graph = MetricGraph::new(
            vec!["a".into(), "b".into()],
            vec![
                Edge::halfline("l", VertexId(0)),
                Edge::finite("m", VertexId(0), VertexId(1), 1.5),
                Edge::halfline("r", VertexId(1)),
            ],
        )
        .unwrap();
        check(ProblemSpec::new(
            graph.clone(),
            vec![VertexCondition::DeltaPrime { beta: 1.0 }, VertexCondition::FulopTsutsui { tau: -2.0, v: 1.0 }],
            4.0,
        ));
        check(ProblemSpec::new(
            graph,
            vec![VertexCondition::Dipole { tau: 3.0 }, VertexCondition::Delta { alpha: 1.0 }],
            4.0,
        ));
    }

    #[test]
    fn stiffness_matches_kinetic_form() {
        let problem = ProblemSpec::uniform(star_graph(3).unwrap(), VertexCondition::Kirchhoff, 4.0);
        let disc = crate::discretization::Discretization::new(problem, GridParams::new(0.1, 2.0).unwrap()).unwrap();
        let u = disc.sample(|e, x| (1.0 + e.0 as f64) * (-x).exp() * (1.0 + x));
        let x = disc.to_dofs(&u);
        let pre = Preconditioner::new(disc.grid(), 0.5);
        let quad: f64 = pre.apply(disc.grid(), &x).iter().zip(&x).map(|(a, b)| a * b).sum();
        let expected = disc.kinetic_integral(&u) + 0.5 * disc.mass(&u);
        assert!((quad - expected).abs() < 1e-10 * expected);
    }
}
