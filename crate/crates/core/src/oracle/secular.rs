use std::fmt;

use serde::{Deserialize, Serialize};

use super::{quad, OracleError, Soliton};
use crate::discretization::{Discretization, GraphFunction};
use crate::graph::VertexCondition;

/// Branch label of a stationary state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Even,
    Odd,
    Asymmetric,
    NTail,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Even => "even",
            Branch::Odd => "odd",
            Branch::Asymmetric => "asymmetric",
            Branch::NTail => "n-tail",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Branch::Even),
            "odd" => Ok(Branch::Odd),
            "asymmetric" => Ok(Branch::Asymmetric),
            "n-tail" => Ok(Branch::NTail),
            other => Err(OracleError::InvalidArgument(format!("unknown branch `{other}`"))),
        }
    }
}

/// One halfline of a shifted-soliton state: `u(x) = sign * phi(x + shift)`,
/// with `x` the distance from the vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail {
    pub sign: f64,
    pub shift: f64,
}

/// Explicit stationary state on a star graph built from soliton pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularSolution {
    pub condition: VertexCondition,
    pub soliton: Soliton,
    pub branch: Branch,
    /// One entry per halfline in incidence order; empty when `exists` is false.
    pub tails: Vec<Tail>,
    pub exists: bool,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    if flo == 0.0 {
        return Some(lo);
    }
    if flo * f(hi) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * mid.abs().max(1.0) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Some(0.5 * (lo + hi))
}

impl SecularSolution {
    fn absent(condition: VertexCondition, soliton: Soliton, branch: Branch) -> Self {
        SecularSolution {
            condition,
            soliton,
            branch,
            tails: Vec::new(),
            exists: false,
        }
    }

    pub fn omega(&self) -> f64 {
        self.soliton.omega()
    }

    pub fn value(&self, tail: usize, x: f64) -> f64 {
        let t = self.tails[tail];
        t.sign * self.soliton.value(x + t.shift)
    }

    /// Derivative along the halfline coordinate.
    pub fn derivative(&self, tail: usize, x: f64) -> f64 {
        let t = self.tails[tail];
        t.sign * self.soliton.derivative(x + t.shift)
    }

    /// `|r - s|` between the two shifts of a two-tail state.
    pub fn asymmetry(&self) -> f64 {
        match self.tails.as_slice() {
            [a, b] => (a.shift - b.shift).abs(),
            _ => 0.0,
        }
    }

    fn tail_integral(&self, f: impl Fn(f64) -> f64) -> f64 {
        let rate = self.omega().sqrt();
        self.tails
            .iter()
            .map(|t| quad::integrate_to_infinity(&|x| f(x + t.shift), 0.0, rate, 1e-13))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.tail_integral(|y| self.soliton.value(y).powi(2))
    }

    pub fn power_integral(&self, r: f64) -> f64 {
        self.tail_integral(|y| self.soliton.value(y).abs().powf(r))
    }

    pub fn kinetic_integral(&self) -> f64 {
        self.tail_integral(|y| self.soliton.derivative(y).powi(2))
    }

    fn vertex_energy(&self) -> f64 {
        let trace = |i: usize| self.value(i, 0.0);
        match self.condition {
            VertexCondition::Delta { alpha } => -0.5 * alpha * trace(0).powi(2),
            VertexCondition::DeltaPrime { beta } => -(trace(1) - trace(0)).powi(2) / (2.0 * beta),
            VertexCondition::FulopTsutsui { v, .. } => -0.5 * v * trace(0).powi(2),
            VertexCondition::NonlinearDelta { q } => -trace(0).abs().powf(q) / q,
            VertexCondition::Kirchhoff | VertexCondition::Dipole { .. } => 0.0,
        }
    }

    pub fn energy(&self) -> f64 {
        let p = self.soliton.p();
        0.5 * self.kinetic_integral() - self.power_integral(p) / p + self.vertex_energy()
    }

    pub fn action(&self) -> f64 {
        self.energy() + 0.5 * self.omega() * self.mass()
    }

    /// Samples the state on a discretized star graph; tail `i` goes to edge `i`.
    pub fn sample(&self, disc: &Discretization) -> Result<GraphFunction, OracleError> {
        let graph = &disc.problem().graph;
        if !self.exists {
            return Err(OracleError::NoSolution("state does not exist".into()));
        }
        if !graph.is_star() || graph.edge_count() != self.tails.len() {
            return Err(OracleError::InvalidArgument(format!(
                "state has {} tails, graph is not a star with that many halflines",
                self.tails.len()
            )));
        }
        Ok(disc.sample(|e, x| self.value(e.0, x)))
    }
}

/// Symmetric state `phi(x + a)` on each of `n` halflines around a delta vertex:
/// the matching condition `n sqrt(omega) tanh(c a) = alpha` is solved by bisection.
pub fn delta_shift(alpha: f64, n: usize, p: f64, omega: f64) -> Result<SecularSolution, OracleError> {
    if n < 2 {
        return Err(OracleError::InvalidArgument(format!("need at least 2 halflines, got {n}")));
    }
    if !alpha.is_finite() {
        return Err(OracleError::InvalidArgument(format!("alpha must be finite, got {alpha}")));
    }
    let soliton = Soliton::new(p, omega)?;
    let condition = VertexCondition::Delta { alpha };
    let branch = if n == 2 { Branch::Even } else { Branch::NTail };
    let c = soliton.inverse_width();
    let bound = 40.0 / omega.sqrt();
    let secular = |a: f64| n as f64 * omega.sqrt() * (c * a).tanh() - alpha;
    // tanh saturates to +-1 in floating point, so a root exists only strictly inside.
    if alpha.abs() >= n as f64 * omega.sqrt() {
        return Ok(SecularSolution::absent(condition, soliton, branch));
    }
    match bisect(secular, -bound, bound) {
        Some(shift) => Ok(SecularSolution {
            condition,
            soliton,
            branch,
            tails: vec![Tail { sign: 1.0, shift }; n],
            exists: true,
        }),
        None => Ok(SecularSolution::absent(condition, soliton, branch)),
    }
}

/// Stationary states on the line with a delta-prime vertex, built from
/// `-phi(x + r)` on the left halfline and `phi(x + s)` on the right one.
///
/// Derivative continuity forces `phi'(r) = phi'(s)`; the jump condition
/// `u(0+) - u(0-) = -beta u'(0)` becomes `phi(r)/phi(s) + 1 = beta sqrt(omega) tanh(c s)`.
/// The odd branch (`r = s`) exists for `omega > 4/beta^2`; the asymmetric
/// pair (`r != s`, mirror images) appears beyond `(4/beta^2) p/(p-2)`.
pub fn delta_prime_branches(beta: f64, p: f64, omega: f64) -> Result<Vec<SecularSolution>, OracleError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(OracleError::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let soliton = Soliton::new(p, omega)?;
    let condition = VertexCondition::DeltaPrime { beta };
    let mut branches = Vec::new();
    let target = 2.0 / (beta * omega.sqrt());
    if target >= 1.0 {
        return Ok(branches);
    }
    let c = soliton.inverse_width();
    let bound = 40.0 / omega.sqrt();
    if let Some(s) = bisect(|s| (c * s).tanh() - target, 0.0, bound) {
        branches.push(SecularSolution {
            condition,
            soliton,
            branch: Branch::Odd,
            tails: vec![Tail { sign: -1.0, shift: s }, Tail { sign: 1.0, shift: s }],
            exists: true,
        });
    }

    let inflection = soliton.inflection();
    let slope = |x: f64| soliton.derivative(x);
    // phi' increases from its minimum at the inflection point back to 0.
    let partner = |s: f64| bisect(|r| slope(r) - slope(s), inflection, inflection + bound);
    let secular = |s: f64| match partner(s) {
        Some(r) => soliton.value(r) / soliton.value(s) + 1.0 - beta * omega.sqrt() * (c * s).tanh(),
        None => 1.0 - beta * omega.sqrt() * (c * s).tanh(),
    };
    let samples = 2000;
    let grid: Vec<f64> = (1..=samples)
        .map(|i| inflection * i as f64 / samples as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&s| secular(s)).collect();
    for i in 1..samples {
        if values[i - 1] > 0.0 && values[i] <= 0.0 {
            let Some(s) = bisect(secular, grid[i - 1], grid[i]) else {
                continue;
            };
            let Some(r) = partner(s) else {
                continue;
            };
            if (r - s).abs() < 1e-9 {
                continue;
            }
            for (left, right) in [(r, s), (s, r)] {
                branches.push(SecularSolution {
                    condition,
                    soliton,
                    branch: Branch::Asymmetric,
                    tails: vec![
                        Tail { sign: -1.0, shift: left },
                        Tail { sign: 1.0, shift: right },
                    ],
                    exists: true,
                });
            }
        }
    }
    Ok(branches)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_shift_matches_artanh() {
        let sol = delta_shift(1.0, 2, 4.0, 1.0).unwrap();
        assert!(sol.exists);
        assert!((sol.tails[0].shift - 0.5f64.atanh()).abs() < 1e-12);
        assert_eq!(sol.branch, Branch::Even);
        assert!(!delta_shift(1.0, 2, 4.0, 0.25).unwrap().exists);
        assert!(delta_shift(1e-9, 2, 4.0, 1.0).unwrap().tails[0].shift.abs() < 1e-8);
        assert!(delta_shift(-1.0, 3, 4.0, 1.0).unwrap().tails[0].shift < 0.0);
        assert!(delta_shift(1.0, 1, 4.0, 1.0).is_err());
    }

    #[test]
    fn delta_shift_meets_the_vertex_condition() {
        let sol = delta_shift(0.8, 3, 5.0, 0.7).unwrap();
        let outward: f64 = (0..3).map(|i| -sol.derivative(i, 0.0)).sum();
        assert!((outward - 0.8 * sol.value(0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn delta_prime_counts() {
        assert!(delta_prime_branches(1.0, 4.0, 3.9).unwrap().is_empty());
        let below = delta_prime_branches(1.0, 4.0, 7.0).unwrap();
        assert_eq!(below.len(), 1);
        assert_eq!(below[0].branch, Branch::Odd);
        let above = delta_prime_branches(1.0, 4.0, 9.0).unwrap();
        assert_eq!(above.len(), 3);
        assert!((above[1].action() - above[2].action()).abs() < 1e-10);
        assert!(above[1].action() < above[0].action());
    }

    #[test]
    fn asymmetric_states_meet_both_conditions() {
        let branches = delta_prime_branches(1.0, 4.0, 10.0).unwrap();
        for sol in &branches {
            let left = sol.value(0, 0.0);
            let right = sol.value(1, 0.0);
            // Left-halfline coordinate runs toward -inf, so u'(0-) = -d/dx of that tail.
            let du_left = -sol.derivative(0, 0.0);
            let du_right = sol.derivative(1, 0.0);
            assert!((du_left - du_right).abs() < 1e-10, "{:?}", sol.branch);
            assert!((right - left + du_right).abs() < 1e-10, "{:?}", sol.branch);
        }
    }

    #[test]
    fn pitchfork_asymmetry_shrinks() {
        let asym = |eps: f64| {
            delta_prime_branches(1.0, 4.0, 8.0 * (1.0 + eps)).unwrap()[1].asymmetry()
        };
        let (a, b, c) = (asym(1e-1), asym(1e-2), asym(1e-4));
        assert!(a > b && b > c && c < 0.05, "{a} {b} {c}");
    }
}
