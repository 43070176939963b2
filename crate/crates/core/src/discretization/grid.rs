use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::DiscretizationError;
use crate::graph::{EdgeKind, EdgeSide, ProblemSpec, VertexCondition, VertexId};

/// Exponent budget for halfline truncation: `exp(-sqrt(omega) L) <= exp(-24)`.
pub const DECAY_EXPONENT: f64 = 24.0;

const MIN_CELLS: usize = 8;

/// Node spacing and halfline truncation shared by every edge of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    h: f64,
    halfline_cells: usize,
}

impl GridParams {
    /// `halfline_length / h` must be an integer of at least 8.
    pub fn new(h: f64, halfline_length: f64) -> Result<Self, DiscretizationError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(DiscretizationError::InvalidGrid(format!("h must be positive, got {h}")));
        }
        let ratio = halfline_length / h;
        let cells = ratio.round();
        if !ratio.is_finite() || (ratio - cells).abs() > 1e-6 * cells.max(1.0) {
            return Err(DiscretizationError::InvalidGrid(format!(
                "L/h must be an integer, got L={halfline_length}, h={h}"
            )));
        }
        Self::from_cells(h, cells as usize)
    }

    pub fn from_cells(h: f64, halfline_cells: usize) -> Result<Self, DiscretizationError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(DiscretizationError::InvalidGrid(format!("h must be positive, got {h}")));
        }
        if halfline_cells < MIN_CELLS {
            return Err(DiscretizationError::InvalidGrid(format!(
                "halflines need at least {MIN_CELLS} cells, got {halfline_cells}"
            )));
        }
        Ok(GridParams { h, halfline_cells })
    }

    /// Spacing `h` and the smallest multiple of `h` above `24 / sqrt(omega_min)`.
    pub fn for_frequency(h: f64, omega_min: f64) -> Result<Self, DiscretizationError> {
        if !(omega_min > 0.0) {
            return Err(DiscretizationError::InvalidGrid(format!(
                "truncation needs a positive frequency, got {omega_min}"
            )));
        }
        let length = DECAY_EXPONENT / omega_min.sqrt();
        Self::from_cells(h, (length / h - 1e-9).ceil().max(MIN_CELLS as f64) as usize)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn halfline_cells(&self) -> usize {
        self.halfline_cells
    }

    pub fn halfline_length(&self) -> f64 {
        self.h * self.halfline_cells as f64
    }

    /// `exp(-sqrt(omega) L)`, the amplitude left at the truncation point.
    pub fn decay_bound(&self, omega: f64) -> f64 {
        (-omega.sqrt() * self.halfline_length()).exp()
    }
}

/// Uniform nodes `x_i = i h`, `i = 0..=cells`, on one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGrid {
    pub h: f64,
    pub cells: usize,
    /// Truncated halfline: the last node carries a homogeneous Dirichlet value.
    pub halfline: bool,
}

impl EdgeGrid {
    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn length(&self) -> f64 {
        self.cells as f64 * self.h
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.cells {
            0.5 * self.h
        } else {
            self.h
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum NodeDof {
    Free { dof: usize, coef: f64 },
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofKind {
    /// Trace unknown at a vertex; `slot` is 0 except for the `0+` trace of a
    /// delta-prime vertex.
    Vertex { vertex: VertexId, slot: usize },
    Interior { edge: usize, node: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dof {
    pub kind: DofKind,
    /// `(edge, node, coefficient)`: node value = coefficient * dof value.
    pub nodes: Vec<(usize, usize, f64)>,
    /// Lumped mass `sum coef^2 w_node`.
    pub weight: f64,
}

/// Traces of one vertex, in incidence order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexTraces {
    /// `(edge, node)` of each incident endpoint.
    pub endpoints: Vec<(usize, usize)>,
    pub dofs: Vec<usize>,
}

/// Nodes on every edge plus the map from free unknowns (dofs) to nodes.
///
/// Vertex unknowns come first, then the interior nodes of each edge as one
/// contiguous block. Continuous vertices own one unknown shared by every
/// incident endpoint; a delta-prime vertex owns one per side; dipole and
/// Fulop-Tsutsui vertices own the `0-` trace and derive `u(0+) = tau u(0-)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    params: GridParams,
    edges: Vec<EdgeGrid>,
    node_map: Vec<Vec<NodeDof>>,
    dofs: Vec<Dof>,
    vertices: Vec<VertexTraces>,
    interior: Vec<Range<usize>>,
}

impl Grid {
    pub fn new(problem: &ProblemSpec, params: GridParams) -> Result<Self, DiscretizationError> {
        let graph = &problem.graph;
        let mut edges = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            edges.push(match e.kind {
                EdgeKind::Halfline => EdgeGrid {
                    h: params.h(),
                    cells: params.halfline_cells(),
                    halfline: true,
                },
                EdgeKind::Finite { length, .. } => {
                    let cells = (length / params.h()).round() as usize;
                    if cells < MIN_CELLS {
                        return Err(DiscretizationError::InvalidGrid(format!(
                            "edge `{}` of length {length} gets {cells} cells, need at least {MIN_CELLS}",
                            e.name
                        )));
                    }
                    EdgeGrid {
                        h: length / cells as f64,
                        cells,
                        halfline: false,
                    }
                }
            });
        }

        let mut node_map: Vec<Vec<NodeDof>> = edges
            .iter()
            .map(|g| vec![NodeDof::Dirichlet; g.nodes()])
            .collect();
        let mut dofs: Vec<Dof> = Vec::new();
        let mut vertices = Vec::with_capacity(graph.vertex_count());

        for v in graph.vertex_ids() {
            let endpoints: Vec<(usize, usize)> = graph
                .incidences(v)
                .iter()
                .map(|inc| {
                    let e = inc.edge.0;
                    let node = match inc.side {
                        EdgeSide::Start => 0,
                        EdgeSide::End => edges[e].cells,
                    };
                    (e, node)
                })
                .collect();
            // (slot, [(endpoint index, coefficient)])
            let groups: Vec<Vec<(usize, f64)>> = match problem.condition(v) {
                VertexCondition::DeltaPrime { .. } => (0..endpoints.len()).map(|i| vec![(i, 1.0)]).collect(),
                c @ (VertexCondition::Dipole { .. } | VertexCondition::FulopTsutsui { .. }) => {
                    let tau = c.jump_ratio().unwrap_or(1.0);
                    vec![endpoints
                        .iter()
                        .enumerate()
                        .map(|(i, _)| (i, if i == 0 { 1.0 } else { tau }))
                        .collect()]
                }
                _ => vec![endpoints.iter().enumerate().map(|(i, _)| (i, 1.0)).collect()],
            };
            let mut vertex_dofs = Vec::with_capacity(groups.len());
            for (slot, group) in groups.into_iter().enumerate() {
                let id = dofs.len();
                let mut nodes = Vec::with_capacity(group.len());
                let mut weight = 0.0;
                for (i, coef) in group {
                    let (e, node) = endpoints[i];
                    node_map[e][node] = NodeDof::Free { dof: id, coef };
                    nodes.push((e, node, coef));
                    weight += coef * coef * edges[e].weight(node);
                }
                dofs.push(Dof {
                    kind: DofKind::Vertex { vertex: v, slot },
                    nodes,
                    weight,
                });
                vertex_dofs.push(id);
            }
            vertices.push(VertexTraces {
                endpoints,
                dofs: vertex_dofs,
            });
        }

        let mut interior = Vec::with_capacity(edges.len());
        for (e, g) in edges.iter().enumerate() {
            let first = dofs.len();
            for node in 1..g.cells {
                node_map[e][node] = NodeDof::Free {
                    dof: dofs.len(),
                    coef: 1.0,
                };
                dofs.push(Dof {
                    kind: DofKind::Interior { edge: e, node },
                    nodes: vec![(e, node, 1.0)],
                    weight: g.weight(node),
                });
            }
            interior.push(first..dofs.len());
        }

        Ok(Grid {
            params,
            edges,
            node_map,
            dofs,
            vertices,
            interior,
        })
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn edges(&self) -> &[EdgeGrid] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &EdgeGrid {
        &self.edges[e]
    }

    pub fn dofs(&self) -> &[Dof] {
        &self.dofs
    }

    pub fn dof_count(&self) -> usize {
        self.dofs.len()
    }

    pub fn vertex(&self, v: VertexId) -> &VertexTraces {
        &self.vertices[v.0]
    }

    pub fn vertex_dof_count(&self) -> usize {
        self.vertices.iter().map(|v| v.dofs.len()).sum()
    }

    /// Contiguous dof range of the interior nodes `1..cells` of edge `e`.
    pub fn interior_dofs(&self, e: usize) -> Range<usize> {
        self.interior[e].clone()
    }

    pub(crate) fn node_dof(&self, e: usize, node: usize) -> NodeDof {
        self.node_map[e][node]
    }
}
