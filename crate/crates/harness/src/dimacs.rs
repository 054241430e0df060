//! DIMACS minimum-cost-flow text format.
//!
//! Lines are `c` comments, one `p min NODES ARCS` problem line, `n NODE
//! FLOW` supply lines (positive at sources, negative at sinks; omitted
//! nodes default to zero), and `a FROM TO LOW CAP COST` arc lines. Node
//! ids are 1-based in the file and 0-based in memory. Nonzero arc lower
//! bounds are rejected: the library's flow embedding works on the
//! `0 <= x <= cap` form.

use lp_core::network::{McfArc, McfProblem};

use crate::Error;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<f64, Error> {
    tok.parse::<f64>().map_err(|_| perr(line, format!("'{}' is not a number", tok)))
}

fn parse_node(tok: &str, nodes: usize, line: usize) -> Result<usize, Error> {
    let id: usize =
        tok.parse().map_err(|_| perr(line, format!("'{}' is not a node id", tok)))?;
    if id == 0 || id > nodes {
        return Err(perr(line, format!("node id {} is outside 1..={}", id, nodes)));
    }
    Ok(id - 1)
}

/// Parse DIMACS minimum-cost-flow text into a validated problem.
pub fn parse_dimacs_min(text: &str) -> Result<McfProblem, Error> {
    let mut nodes: Option<usize> = None;
    let mut declared_arcs = 0usize;
    let mut supplies: Vec<f64> = Vec::new();
    let mut arcs: Vec<McfArc> = Vec::new();
    let mut last = 1;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        last = line;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if nodes.is_some() {
                    return Err(perr(line, "a second problem line"));
                }
                if toks.len() != 4 || toks[1] != "min" {
                    return Err(perr(line, "expected 'p min NODES ARCS'"));
                }
                let n: usize =
                    toks[2].parse().map_err(|_| perr(line, "node count is not an integer"))?;
                declared_arcs =
                    toks[3].parse().map_err(|_| perr(line, "arc count is not an integer"))?;
                supplies = vec![0.0; n];
                nodes = Some(n);
            }
            Some("n") => {
                let n = nodes.ok_or_else(|| perr(line, "supply line before the problem line"))?;
                if toks.len() != 3 {
                    return Err(perr(line, "expected 'n NODE FLOW'"));
                }
                let v = parse_node(toks[1], n, line)?;
                supplies[v] += parse_num(toks[2], line)?;
            }
            Some("a") => {
                let n = nodes.ok_or_else(|| perr(line, "arc line before the problem line"))?;
                if toks.len() != 6 {
                    return Err(perr(line, "expected 'a FROM TO LOW CAP COST'"));
                }
                let from = parse_node(toks[1], n, line)?;
                let to = parse_node(toks[2], n, line)?;
                let low = parse_num(toks[3], line)?;
                if low != 0.0 {
                    return Err(perr(line, "nonzero arc lower bounds are not supported"));
                }
                let cap = parse_num(toks[4], line)?;
                let cost = parse_num(toks[5], line)?;
                arcs.push(McfArc::new(from, to, cost, cap));
            }
            Some(other) => return Err(perr(line, format!("unknown line type '{}'", other))),
        }
    }

    let nodes = nodes.ok_or_else(|| perr(last, "missing 'p min' problem line"))?;
    if arcs.len() != declared_arcs {
        return Err(perr(
            last,
            format!("problem line declared {} arcs but {} were given", declared_arcs, arcs.len()),
        ));
    }
    Ok(McfProblem::new(nodes, arcs, supplies)?)
}

/// Render a flow problem in DIMACS minimum-cost-flow form.
pub fn write_dimacs_min(p: &McfProblem) -> String {
    let mut out = String::new();
    out.push_str(&format!("p min {} {}\n", p.nodes, p.arcs.len()));
    for (v, &s) in p.supplies.iter().enumerate() {
        if s != 0.0 {
            out.push_str(&format!("n {} {}\n", v + 1, s));
        }
    }
    for a in &p.arcs {
        out.push_str(&format!("a {} {} 0 {} {}\n", a.from + 1, a.to + 1, a.capacity, a.cost));
    }
    out
}
