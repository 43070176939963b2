use std::fmt::Write as _;

use super::{Discretization, DiscretizationError, GraphFunction};

/// Renders `u` as `edge,x,value` rows. Comment lines before the header
/// record the grid: `# grid h=.. L=..` then `# edge <id> h=.. length=..`.
pub fn write_profile_csv(disc: &Discretization, u: &GraphFunction) -> String {
    let params = disc.grid().params();
    let mut out = format!("# grid h={} L={}\n", params.h(), params.halfline_length());
    for (e, edge) in disc.problem().graph.edges().iter().enumerate() {
        let g = disc.grid().edge(e);
        let _ = writeln!(out, "# edge {} h={} length={}", edge.name, g.h, g.length());
    }
    out.push_str("edge,x,value\n");
    for (e, edge) in disc.problem().graph.edges().iter().enumerate() {
        let g = disc.grid().edge(e);
        for (i, value) in u.edge(e).iter().enumerate() {
            let _ = writeln!(out, "{},{},{:e}", edge.name, g.x(i), value);
        }
    }
    out
}

/// Parses a profile written by [`write_profile_csv`] for the same grid.
/// Every node of every edge must appear exactly once.
pub fn read_profile_csv(disc: &Discretization, text: &str) -> Result<GraphFunction, DiscretizationError> {
    let err = |line: usize, msg: String| DiscretizationError::Csv(format!("line {line}: {msg}"));
    let graph = &disc.problem().graph;
    let mut values: Vec<Vec<Option<f64>>> = disc.grid().edges().iter().map(|g| vec![None; g.nodes()]).collect();
    let mut header_seen = false;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != "edge,x,value" {
                return Err(err(n + 1, format!("expected header `edge,x,value`, got `{line}`")));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [name, x, value] = fields[..] else {
            return Err(err(n + 1, format!("expected 3 fields, got {}", fields.len())));
        };
        let e = graph
            .edges()
            .iter()
            .position(|edge| edge.name == name)
            .ok_or_else(|| err(n + 1, format!("unknown edge `{name}`")))?;
        let x: f64 = x.parse().map_err(|_| err(n + 1, format!("bad coordinate `{x}`")))?;
        let value: f64 = value.parse().map_err(|_| err(n + 1, format!("bad value `{value}`")))?;
        let g = disc.grid().edge(e);
        let i = (x / g.h).round();
        if i < 0.0 || i as usize >= g.nodes() || (x - g.x(i as usize)).abs() > 1e-9 * g.length().max(1.0) {
            return Err(err(n + 1, format!("x={x} is not a node of edge `{name}`")));
        }
        let slot = &mut values[e][i as usize];
        if slot.is_some() {
            return Err(err(n + 1, format!("duplicate node x={x} on edge `{name}`")));
        }
        *slot = Some(value);
    }
    let mut filled = Vec::with_capacity(values.len());
    for (e, column) in values.into_iter().enumerate() {
        let missing = column.iter().filter(|v| v.is_none()).count();
        if missing > 0 {
            return Err(DiscretizationError::Csv(format!(
                "edge `{}` is missing {missing} nodes",
                graph.edges()[e].name
            )));
        }
        filled.push(column.into_iter().flatten().collect());
    }
    let u = GraphFunction::from_values(filled);
    disc.check(&u)?;
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::GridParams;
    use crate::graph::{line_graph, ProblemSpec, VertexCondition};

    fn disc() -> Discretization {
        Discretization::new(
            ProblemSpec::uniform(line_graph(), VertexCondition::DeltaPrime { beta: 1.0 }, 4.0),
            GridParams::new(0.25, 3.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_is_exact() {
        let d = disc();
        let u = d.sample(|e, x| if e.0 == 0 { -(-x).exp() } else { 2.0 / x.cosh() });
        let text = write_profile_csv(&d, &u);
        assert!(text.starts_with("# grid h=0.25 L=3\n# edge left h=0.25 length=3\n"));
        assert_eq!(read_profile_csv(&d, &text).unwrap(), u);
    }

    #[test]
    fn rejects_malformed_rows() {
        let d = disc();
        let good = write_profile_csv(&d, &d.zeros());
        let cases = [
            good.replace("edge,x,value", "a,b,c"),
            good.replace("left,", "middle,"),
            good.replacen("left,0.25,", "left,0.3,", 1),
            good.replacen("left,0.25,0e0\n", "", 1),
            good.replacen("left,0.25,0e0\n", "left,0.25,0e0\nleft,0.25,0e0\n", 1),
        ];
        for text in cases {
            assert!(read_profile_csv(&d, &text).is_err(), "{text}");
        }
    }
}
