/// Real samples at the grid nodes of every edge.
///
/// Built through [`Discretization`](super::Discretization), which keeps the
/// vertex constraints (shared traces, `u(0+) = tau u(0-)`, Dirichlet ends)
/// satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    values: Vec<Vec<f64>>,
}

impl GraphFunction {
    pub(crate) fn from_values(values: Vec<Vec<f64>>) -> Self {
        GraphFunction { values }
    }

    pub fn edge(&self, e: usize) -> &[f64] {
        &self.values[e]
    }

    pub fn edges(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn edge_count(&self) -> usize {
        self.values.len()
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.map(|x| t * x)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GraphFunction {
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(|&x| f(x)).collect())
                .collect(),
        }
    }

    /// `self + t * other`, node by node.
    pub fn axpy(&self, t: f64, other: &GraphFunction) -> Self {
        GraphFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + t * y).collect())
                .collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    pub fn sup_distance(&self, other: &GraphFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest node-wise difference between any edge and edge 0, for
    /// functions on star graphs (all edges share one grid).
    pub fn permutation_asymmetry(&self) -> f64 {
        let first = &self.values[0];
        self.values[1..]
            .iter()
            .flat_map(|v| v.iter().zip(first).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}
