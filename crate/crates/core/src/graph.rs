//! Metric graphs, vertex conditions and problem descriptions.
//!
//! A metric graph is a set of vertices joined by edges that are either
//! bounded intervals `[0, l]` or halflines `[0, +inf)`. Every edge carries a
//! coordinate that increases away from its start vertex; a halfline has only
//! a start vertex.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeKind {
    /// Bounded edge `[0, length]` from `start` to `end`.
    Finite { end: VertexId, length: f64 },
    /// Halfline attached to `start`; the far end is open.
    Halfline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub name: String,
    pub start: VertexId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn halfline(name: impl Into<String>, start: VertexId) -> Self {
        Edge {
            name: name.into(),
            start,
            kind: EdgeKind::Halfline,
        }
    }

    pub fn finite(name: impl Into<String>, start: VertexId, end: VertexId, length: f64) -> Self {
        Edge {
            name: name.into(),
            start,
            kind: EdgeKind::Finite { end, length },
        }
    }

    pub fn is_halfline(&self) -> bool {
        matches!(self.kind, EdgeKind::Halfline)
    }

    /// Edge length, `f64::INFINITY` for halflines.
    pub fn length(&self) -> f64 {
        match self.kind {
            EdgeKind::Finite { length, .. } => length,
            EdgeKind::Halfline => f64::INFINITY,
        }
    }

    pub fn end(&self) -> Option<VertexId> {
        match self.kind {
            EdgeKind::Finite { end, .. } => Some(end),
            EdgeKind::Halfline => None,
        }
    }
}

/// Which end of an edge touches a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSide {
    /// `x_e = 0`.
    Start,
    /// `x_e = l_e`.
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: EdgeId,
    pub side: EdgeSide,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GraphError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("edge `{edge}` has non-positive length {length}")]
    NonPositiveLength { edge: String, length: f64 },
    #[error("edge `{edge}` references unknown vertex index {vertex}")]
    UnknownVertex { edge: String, vertex: usize },
    #[error("vertex `{0}` has no incident edge")]
    IsolatedVertex(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    incidences: Vec<Vec<Incidence>>,
}

impl MetricGraph {
    /// Builds a graph and checks the structural invariants: positive finite
    /// lengths, known endpoints, no isolated vertex, connectedness.
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::InvalidArgument("graph has no vertex".into()));
        }
        for (i, name) in vertices.iter().enumerate() {
            if vertices[..i].contains(name) {
                return Err(GraphError::DuplicateName(name.clone()));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if edges[..i].iter().any(|o| o.name == e.name) {
                return Err(GraphError::DuplicateName(e.name.clone()));
            }
        }
        let mut incidences = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            let check = |v: VertexId| {
                if v.0 >= vertices.len() {
                    Err(GraphError::UnknownVertex {
                        edge: e.name.clone(),
                        vertex: v.0,
                    })
                } else {
                    Ok(())
                }
            };
            check(e.start)?;
            incidences[e.start.0].push(Incidence {
                edge: EdgeId(i),
                side: EdgeSide::Start,
            });
            if let EdgeKind::Finite { end, length } = e.kind {
                check(end)?;
                if !(length > 0.0) || !length.is_finite() {
                    return Err(GraphError::NonPositiveLength {
                        edge: e.name.clone(),
                        length,
                    });
                }
                incidences[end.0].push(Incidence {
                    edge: EdgeId(i),
                    side: EdgeSide::End,
                });
            }
        }
        if let Some(v) = incidences.iter().position(|inc| inc.is_empty()) {
            return Err(GraphError::IsolatedVertex(vertices[v].clone()));
        }
        let graph = MetricGraph {
            vertices,
            edges,
            incidences,
        };
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn vertex_name(&self, id: VertexId) -> &str {
        &self.vertices[id.0]
    }

    pub fn find_vertex(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v == name).map(VertexId)
    }

    /// Incidences of `v` in edge order; a loop contributes two entries.
    pub fn incidences(&self, v: VertexId) -> &[Incidence] {
        &self.incidences[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidences[v.0].len()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for inc in &self.incidences[v] {
                let e = &self.edges[inc.edge.0];
                for w in std::iter::once(e.start).chain(e.end()) {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        queue.push_back(w.0);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Single vertex with only halflines attached (the line and star graphs).
    pub fn is_star(&self) -> bool {
        self.vertices.len() == 1 && self.edges.iter().all(Edge::is_halfline)
    }
}

/// The real line as a degree-2 vertex joining two halflines. Edge `left`
/// carries the coordinate `-x`, edge `right` the coordinate `x`.
pub fn line_graph() -> MetricGraph {
    MetricGraph::new(
        vec!["o".into()],
        vec![
            Edge::halfline("left", VertexId(0)),
            Edge::halfline("right", VertexId(0)),
        ],
    )
    .expect("line graph is well formed")
}

/// Star graph with `n` halflines glued at one vertex.
pub fn star_graph(n: usize) -> Result<MetricGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidArgument(format!(
            "star graph needs at least 2 halflines, got {n}"
        )));
    }
    let edges = (0..n)
        .map(|i| Edge::halfline(format!("e{i}"), VertexId(0)))
        .collect();
    MetricGraph::new(vec!["o".into()], edges)
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{0}")]
pub struct ConditionError(pub String);

/// Matching condition imposed at a vertex.
///
/// The discontinuous conditions (`DeltaPrime`, `Dipole`, `FulopTsutsui`) are
/// only defined at degree-2 vertices. The first incidence of such a vertex is
/// the `0-` side, the second the `0+` side.
#[derive(Debug, Clone, Copy)]
pub enum VertexCondition {
    Kirchhoff,
    Delta { alpha: f64 },
    DeltaPrime { beta: f64 },
    Dipole { tau: f64 },
    FulopTsutsui { tau: f64, v: f64 },
    NonlinearDelta { q: f64 },
}

impl VertexCondition {
    pub fn delta(alpha: f64) -> Result<Self, ConditionError> {
        Self::Delta { alpha }.checked()
    }

    pub fn delta_prime(beta: f64) -> Result<Self, ConditionError> {
        Self::DeltaPrime { beta }.checked()
    }

    pub fn dipole(tau: f64) -> Result<Self, ConditionError> {
        Self::Dipole { tau }.checked()
    }

    pub fn fulop_tsutsui(tau: f64, v: f64) -> Result<Self, ConditionError> {
        Self::FulopTsutsui { tau, v }.checked()
    }

    pub fn nonlinear_delta(q: f64) -> Result<Self, ConditionError> {
        Self::NonlinearDelta { q }.checked()
    }

    fn checked(self) -> Result<Self, ConditionError> {
        self.check_parameters().map(|_| self)
    }

    /// Parameter-domain check, independent of the graph.
    pub fn check_parameters(&self) -> Result<(), ConditionError> {
        let fail = |m: String| Err(ConditionError(m));
        match *self {
            Self::Kirchhoff => Ok(()),
            Self::Delta { alpha } if !alpha.is_finite() => fail(format!("Delta alpha must be finite, got {alpha}")),
            Self::Delta { .. } => Ok(()),
            Self::DeltaPrime { beta } if !(beta > 0.0 && beta.is_finite()) => {
                fail(format!("DeltaPrime requires beta > 0, got {beta}"))
            }
            Self::DeltaPrime { .. } => Ok(()),
            Self::Dipole { tau } | Self::FulopTsutsui { tau, .. }
                if !tau.is_finite() || tau == 0.0 || tau == 1.0 =>
            {
                fail(format!("{} requires tau not in {{0, 1}}, got {tau}", self.tag()))
            }
            Self::FulopTsutsui { v, .. } if !(v > 0.0 && v.is_finite()) => {
                fail(format!("FulopTsutsui requires v > 0, got {v}"))
            }
            Self::Dipole { .. } | Self::FulopTsutsui { .. } => Ok(()),
            Self::NonlinearDelta { q } if !(q > 2.0 && q.is_finite()) => {
                fail(format!("NonlinearDelta requires q > 2, got {q}"))
            }
            Self::NonlinearDelta { .. } => Ok(()),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Kirchhoff => "Kirchhoff",
            Self::Delta { .. } => "Delta",
            Self::DeltaPrime { .. } => "DeltaPrime",
            Self::Dipole { .. } => "Dipole",
            Self::FulopTsutsui { .. } => "FulopTsutsui",
            Self::NonlinearDelta { .. } => "NonlinearDelta",
        }
    }

    pub fn requires_degree_two(&self) -> bool {
        matches!(
            self,
            Self::DeltaPrime { .. } | Self::Dipole { .. } | Self::FulopTsutsui { .. }
        )
    }

    /// True when all incident traces share one value.
    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            Self::Kirchhoff | Self::Delta { .. } | Self::NonlinearDelta { .. }
        )
    }

    /// `tau` in `u(0+) = tau u(0-)` for the weighted-continuity conditions.
    pub fn jump_ratio(&self) -> Option<f64> {
        match *self {
            Self::Dipole { tau } | Self::FulopTsutsui { tau, .. } => Some(tau),
            _ => None,
        }
    }

    /// Energy terms of this condition are quadratic (or absent).
    pub fn is_linear(&self) -> bool {
        !matches!(self, Self::NonlinearDelta { .. })
    }

    fn normalized(&self) -> Self {
        match *self {
            Self::Kirchhoff => Self::Delta { alpha: 0.0 },
            other => other,
        }
    }
}

impl PartialEq for VertexCondition {
    fn eq(&self, other: &Self) -> bool {
        use VertexCondition::*;
        match (self.normalized(), other.normalized()) {
            (Delta { alpha: a }, Delta { alpha: b }) => a == b,
            (DeltaPrime { beta: a }, DeltaPrime { beta: b }) => a == b,
            (Dipole { tau: a }, Dipole { tau: b }) => a == b,
            (FulopTsutsui { tau: a, v: x }, FulopTsutsui { tau: b, v: y }) => a == b && x == y,
            (NonlinearDelta { q: a }, NonlinearDelta { q: b }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for VertexCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Kirchhoff => write!(f, "kirchhoff"),
            Self::Delta { alpha } => write!(f, "delta alpha={alpha}"),
            Self::DeltaPrime { beta } => write!(f, "delta-prime beta={beta}"),
            Self::Dipole { tau } => write!(f, "dipole tau={tau}"),
            Self::FulopTsutsui { tau, v } => write!(f, "fulop-tsutsui tau={tau} v={v}"),
            Self::NonlinearDelta { q } => write!(f, "nonlinear-delta q={q}"),
        }
    }
}

/// Criticality of the power nonlinearities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `p < 6` and every pointwise power `q < 4`.
    Subcritical,
    /// Exactly one of `p = 6`, `q = 4`, the other subcritical.
    SingleCritical,
    /// `p = 6` and `q = 4`.
    DoublyCritical,
    /// Some power above its critical value.
    Supercritical,
}

/// A graph, one condition per vertex and the standard power `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub graph: MetricGraph,
    pub conditions: Vec<VertexCondition>,
    pub p: f64,
}

/// One violated invariant of a [`ProblemSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub vertex: Option<VertexId>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.vertex {
            Some(v) => write!(f, "vertex {}: {}", v.0, self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl ProblemSpec {
    pub fn new(graph: MetricGraph, conditions: Vec<VertexCondition>, p: f64) -> Self {
        ProblemSpec {
            graph,
            conditions,
            p,
        }
    }

    /// Same condition at every vertex.
    pub fn uniform(graph: MetricGraph, condition: VertexCondition, p: f64) -> Self {
        let conditions = vec![condition; graph.vertex_count()];
        ProblemSpec::new(graph, conditions, p)
    }

    pub fn condition(&self, v: VertexId) -> &VertexCondition {
        &self.conditions[v.0]
    }

    /// Largest pointwise power over the nonlinear-delta vertices.
    pub fn pointwise_power(&self) -> Option<f64> {
        self.conditions
            .iter()
            .filter_map(|c| match c {
                VertexCondition::NonlinearDelta { q } => Some(*q),
                _ => None,
            })
            .reduce(f64::max)
    }

    pub fn is_linear(&self) -> bool {
        self.conditions.iter().all(VertexCondition::is_linear)
    }

    pub fn regime(&self) -> Regime {
        let p_state = classify_power(self.p, 6.0);
        let q_state = self
            .pointwise_power()
            .map(|q| classify_power(q, 4.0))
            .unwrap_or(std::cmp::Ordering::Less);
        use std::cmp::Ordering::*;
        match (p_state, q_state) {
            (Greater, _) | (_, Greater) => Regime::Supercritical,
            (Equal, Equal) => Regime::DoublyCritical,
            (Equal, Less) | (Less, Equal) => Regime::SingleCritical,
            (Less, Less) => Regime::Subcritical,
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    pub fn ensure_valid(&self) -> Result<(), Vec<Violation>> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

fn classify_power(value: f64, critical: f64) -> std::cmp::Ordering {
    if (value - critical).abs() <= 1e-12 {
        std::cmp::Ordering::Equal
    } else if value < critical {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

/// Every invariant violation of `problem`; empty iff the problem is well posed.
pub fn validate(problem: &ProblemSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(problem.p > 2.0 && problem.p.is_finite()) {
        out.push(Violation {
            vertex: None,
            message: format!("p>2 required, got p={}", problem.p),
        });
    }
    let n = problem.graph.vertex_count();
    if problem.conditions.len() != n {
        out.push(Violation {
            vertex: None,
            message: format!(
                "expected one condition per vertex ({n}), got {}",
                problem.conditions.len()
            ),
        });
    }
    for (i, c) in problem.conditions.iter().enumerate().take(n) {
        let v = VertexId(i);
        if let Err(e) = c.check_parameters() {
            out.push(Violation {
                vertex: Some(v),
                message: e.0,
            });
        }
        let degree = problem.graph.degree(v);
        if c.requires_degree_two() && degree != 2 {
            out.push(Violation {
                vertex: Some(v),
                message: format!("{} requires degree 2, vertex has degree {degree}", c.tag()),
            });
        }
    }
    out
}
