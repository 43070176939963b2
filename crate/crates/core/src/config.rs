//! Line-oriented problem description.
//!
//! ```text
//! # star graph with a nonlinear delta at its center
//! vertex o nonlinear-delta
//! edge e0 o open inf
//! edge e1 o open inf
//! edge e2 o open inf
//! problem p=4 q=2.5
//! grid h=0.02 L=24
//! ```
//!
//! Records, one per line, fields separated by whitespace:
//!
//! * `vertex <id> <tag> [key=value]...` with tags `kirchhoff`,
//!   `delta alpha=`, `delta-prime beta=`, `dipole tau=`,
//!   `fulop-tsutsui tau= v=`, `nonlinear-delta [q=]`.
//! * `edge <id> <start> <end> <length>`; a halfline is written with end
//!   `open` and length `inf`. The coordinate grows away from `start`.
//! * `problem p=<real> [q=<real>]`; `q` is the default pointwise power of
//!   `nonlinear-delta` vertices that do not set their own.
//! * `grid h=<real> L=<real>` (optional): node spacing and halfline
//!   truncation length.
//!
//! At a degree-2 vertex with a discontinuous condition the first edge listed
//! is the `0-` side. `#` starts a comment.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::discretization::GridParams;
use crate::graph::{Edge, MetricGraph, ProblemSpec, VertexCondition, VertexId};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line number, 0 for whole-file errors.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub problem: ProblemSpec,
    pub grid: Option<GridParams>,
}

pub fn read_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config(&text)
}

struct VertexRecord {
    line: usize,
    name: String,
    tag: String,
    params: HashMap<String, f64>,
}

struct EdgeRecord {
    line: usize,
    name: String,
    start: String,
    end: Option<String>,
    length: f64,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        message: message.into(),
    })
}

fn parse_params(line: usize, fields: &[&str]) -> Result<HashMap<String, f64>, ConfigError> {
    let mut out = HashMap::new();
    for f in fields {
        let Some((k, v)) = f.split_once('=') else {
            return err(line, format!("expected key=value, got `{f}`"));
        };
        let value: f64 = v
            .parse()
            .map_err(|_| ConfigError {
                line,
                message: format!("`{k}` is not a number: `{v}`"),
            })?;
        if out.insert(k.to_string(), value).is_some() {
            return err(line, format!("duplicate key `{k}`"));
        }
    }
    Ok(out)
}

fn take(line: usize, params: &mut HashMap<String, f64>, key: &str) -> Result<f64, ConfigError> {
    params.remove(key).ok_or_else(|| ConfigError {
        line,
        message: format!("missing parameter `{key}`"),
    })
}

fn no_leftovers(line: usize, params: &HashMap<String, f64>) -> Result<(), ConfigError> {
    match params.keys().next() {
        Some(k) => err(line, format!("unexpected parameter `{k}`")),
        None => Ok(()),
    }
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut vertices: Vec<VertexRecord> = Vec::new();
    let mut edges: Vec<EdgeRecord> = Vec::new();
    let mut problem: Option<(usize, HashMap<String, f64>)> = None;
    let mut grid: Option<GridParams> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "vertex" => {
                if fields.len() < 3 {
                    return err(line, "vertex record needs `vertex <id> <tag>`");
                }
                if vertices.iter().any(|v| v.name == fields[1]) {
                    return err(line, format!("vertex `{}` declared twice", fields[1]));
                }
                vertices.push(VertexRecord {
                    line,
                    name: fields[1].to_string(),
                    tag: fields[2].to_string(),
                    params: parse_params(line, &fields[3..])?,
                });
            }
            "edge" => {
                if fields.len() != 5 {
                    return err(line, "edge record needs `edge <id> <start> <end|open> <length|inf>`");
                }
                if edges.iter().any(|e| e.name == fields[1]) {
                    return err(line, format!("edge `{}` declared twice", fields[1]));
                }
                let end = match fields[3] {
                    "open" => None,
                    v => Some(v.to_string()),
                };
                let length = match fields[4] {
                    "inf" => f64::INFINITY,
                    v => v.parse::<f64>().map_err(|_| ConfigError {
                        line,
                        message: format!("edge length is not a number: `{v}`"),
                    })?,
                };
                match (&end, length.is_infinite()) {
                    (None, false) => return err(line, "an open edge must have length `inf`"),
                    (Some(_), true) => return err(line, "a finite edge needs a finite length"),
                    _ => {}
                }
                if !(length > 0.0) {
                    return err(line, format!("edge length must be positive, got {length}"));
                }
                edges.push(EdgeRecord {
                    line,
                    name: fields[1].to_string(),
                    start: fields[2].to_string(),
                    end,
                    length,
                });
            }
            "problem" => {
                if problem.is_some() {
                    return err(line, "duplicate problem record");
                }
                problem = Some((line, parse_params(line, &fields[1..])?));
            }
            "grid" => {
                if grid.is_some() {
                    return err(line, "duplicate grid record");
                }
                let mut params = parse_params(line, &fields[1..])?;
                let h = take(line, &mut params, "h")?;
                let l = take(line, &mut params, "L")?;
                no_leftovers(line, &params)?;
                grid = Some(GridParams::new(h, l).map_err(|e| ConfigError {
                    line,
                    message: e.to_string(),
                })?);
            }
            other => return err(line, format!("unknown record `{other}`")),
        }
    }

    let Some((problem_line, mut problem_params)) = problem else {
        return err(0, "missing `problem` record");
    };
    let p = take(problem_line, &mut problem_params, "p")?;
    let default_q = problem_params.remove("q");
    no_leftovers(problem_line, &problem_params)?;

    if vertices.is_empty() {
        return err(0, "no vertex records");
    }
    let index: HashMap<String, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.clone(), i))
        .collect();

    let mut conditions = Vec::with_capacity(vertices.len());
    for v in &mut vertices {
        let line = v.line;
        let params = &mut v.params;
        let cond = match v.tag.as_str() {
            "kirchhoff" => VertexCondition::Kirchhoff,
            "delta" => VertexCondition::Delta {
                alpha: take(line, params, "alpha")?,
            },
            "delta-prime" => VertexCondition::DeltaPrime {
                beta: take(line, params, "beta")?,
            },
            "dipole" => VertexCondition::Dipole {
                tau: take(line, params, "tau")?,
            },
            "fulop-tsutsui" => VertexCondition::FulopTsutsui {
                tau: take(line, params, "tau")?,
                v: take(line, params, "v")?,
            },
            "nonlinear-delta" => {
                let q = match params.remove("q").or(default_q) {
                    Some(q) => q,
                    None => return err(line, "nonlinear-delta needs `q` here or in the problem record"),
                };
                VertexCondition::NonlinearDelta { q }
            }
            other => return err(line, format!("unknown vertex condition `{other}`")),
        };
        no_leftovers(line, params)?;
        cond.check_parameters().map_err(|e| ConfigError {
            line,
            message: e.0,
        })?;
        conditions.push(cond);
    }

    let mut graph_edges = Vec::with_capacity(edges.len());
    for e in &edges {
        let lookup = |name: &str| {
            index.get(name).copied().map(VertexId).ok_or_else(|| ConfigError {
                line: e.line,
                message: format!("unknown vertex `{name}`"),
            })
        };
        let start = lookup(&e.start)?;
        graph_edges.push(match &e.end {
            None => Edge::halfline(e.name.clone(), start),
            Some(end) => Edge::finite(e.name.clone(), start, lookup(end)?, e.length),
        });
    }

    let names = vertices.iter().map(|v| v.name.clone()).collect();
    let graph = MetricGraph::new(names, graph_edges).map_err(|e| ConfigError {
        line: 0,
        message: e.to_string(),
    })?;
    let problem = ProblemSpec::new(graph, conditions, p);
    let violations = problem.validate();
    if !violations.is_empty() {
        let msg = violations
            .iter()
            .map(|v| match v.vertex {
                Some(id) => format!("vertex `{}`: {}", problem.graph.vertex_name(id), v.message),
                None => v.message.clone(),
            })
            .collect::<Vec<_>>()
            .join("; ");
        let line = violations
            .iter()
            .find_map(|v| v.vertex.map(|id| vertices[id.0].line))
            .unwrap_or(problem_line);
        return err(line, msg);
    }
    Ok(Config { problem, grid })
}

/// Renders a problem back into the config grammar.
pub fn write_config(problem: &ProblemSpec, grid: Option<&GridParams>) -> String {
    let g = &problem.graph;
    let mut out = String::new();
    for v in g.vertex_ids() {
        out.push_str(&format!("vertex {} {}\n", g.vertex_name(v), problem.condition(v)));
    }
    for e in g.edges() {
        match e.end() {
            None => out.push_str(&format!("edge {} {} open inf\n", e.name, g.vertex_name(e.start))),
            Some(end) => out.push_str(&format!(
                "edge {} {} {} {}\n",
                e.name,
                g.vertex_name(e.start),
                g.vertex_name(end),
                e.length()
            )),
        }
    }
    out.push_str(&format!("problem p={}\n", problem.p));
    if let Some(grid) = grid {
        out.push_str(&format!("grid h={} L={}\n", grid.h(), grid.halfline_length()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Regime;

    const STAR: &str = "\
# three halflines
vertex o nonlinear-delta
edge e0 o open inf
edge e1 o open inf   # trailing comment
edge e2 o open inf
problem p=4 q=2.5
grid h=0.02 L=24
";

    #[test]
    fn parses_star_with_default_q() {
        let cfg = parse_config(STAR).unwrap();
        assert_eq!(cfg.problem.graph.degree(VertexId(0)), 3);
        assert_eq!(cfg.problem.conditions[0], VertexCondition::NonlinearDelta { q: 2.5 });
        assert_eq!(cfg.problem.regime(), Regime::Subcritical);
        let grid = cfg.grid.unwrap();
        assert_eq!(grid.halfline_cells(), 1200);
    }

    #[test]
    fn roundtrips_through_writer() {
        let text = "vertex a fulop-tsutsui tau=2 v=1\nedge l a open inf\nedge r a open inf\nproblem p=4\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&write_config(&cfg.problem, None)).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn finite_edges() {
        let text = "vertex a delta alpha=1\nvertex b kirchhoff\nedge ab a b 3.5\nedge t b open inf\nproblem p=4\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.problem.graph.edges()[0].length(), 3.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("vertex a kirchhoff\nedge e a open 3\nproblem p=4\n", 2),
            ("vertex a kirchhoff\nedge e b open inf\nproblem p=4\n", 2),
            ("vertex a warp\nedge e a open inf\nproblem p=4\n", 1),
            ("vertex a dipole tau=1\nedge e a open inf\nedge f a open inf\nproblem p=4\n", 1),
            ("vertex a delta\nedge e a open inf\nproblem p=4\n", 1),
            ("vertex a kirchhoff\nedge e a open inf\nproblem p=four\n", 3),
            ("vertex a kirchhoff\n\n\nbogus\n", 4),
            ("vertex a delta-prime beta=1\nedge e a open inf\nedge f a open inf\nedge g a open inf\nproblem p=4\n", 1),
            ("vertex a nonlinear-delta\nedge e a open inf\nproblem p=4\n", 1),
            ("vertex a kirchhoff\nedge e a open inf\nproblem p=4\ngrid h=0.03 L=1\n", 4),
        ];
        for (text, line) in cases {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?} -> {e}");
        }
    }

    #[test]
    fn missing_problem_is_file_level() {
        let e = parse_config("vertex a kirchhoff\nedge e a open inf\n").unwrap_err();
        assert_eq!(e.line, 0);
    }

    #[test]
    fn p_two_is_rejected() {
        let e = parse_config("vertex a kirchhoff\nedge e a open inf\nproblem p=2\n").unwrap_err();
        assert!(e.message.contains("p>2"));
    }
}
