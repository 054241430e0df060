//! Dense text format for transport problems.
//!
//! Layout, with `#` comments and blank lines ignored:
//!
//! ```text
//! # suppliers consumers
//! 2 3
//! 4 2          <- supplies, one line
//! 1 2 3        <- demands, one line
//! 1 5 9        <- cost rows, suppliers lines of consumers entries
//! 2 4 8
//! ```

use lp_core::network::OtProblem;
use lp_core::Mat;

use crate::Error;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_row(raw: &str, want: usize, what: &str, line: usize) -> Result<Vec<f64>, Error> {
    let vals: Result<Vec<f64>, Error> = raw
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| perr(line, format!("'{}' is not a number", t))))
        .collect();
    let vals = vals?;
    if vals.len() != want {
        return Err(perr(line, format!("expected {} {} entries, found {}", want, what, vals.len())));
    }
    Ok(vals)
}

/// Parse the dense transport format into a validated problem.
pub fn parse_ot(text: &str) -> Result<OtProblem, Error> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (line, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(perr(line, "expected 'suppliers consumers' on the first data line"));
    }
    let ns: usize = head[0].parse().map_err(|_| perr(line, "supplier count is not an integer"))?;
    let nc: usize = head[1].parse().map_err(|_| perr(line, "consumer count is not an integer"))?;

    let (line, raw) = lines.next().ok_or_else(|| perr(line, "missing supplies line"))?;
    let supplies = parse_row(raw, ns, "supply", line)?;
    let (line, raw) = lines.next().ok_or_else(|| perr(line, "missing demands line"))?;
    let demands = parse_row(raw, nc, "demand", line)?;

    let mut costs = Mat::zeros(ns, nc);
    let mut last = line;
    for i in 0..ns {
        let (line, raw) = lines.next().ok_or_else(|| perr(last, format!("missing cost row {}", i + 1)))?;
        last = line;
        let row = parse_row(raw, nc, "cost", line)?;
        for (j, v) in row.into_iter().enumerate() {
            costs.set(i, j, v);
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(perr(line, "unexpected content after the cost rows"));
    }
    Ok(OtProblem::new(supplies, demands, costs)?)
}

/// Render a transport problem in the dense text format.
pub fn write_ot(p: &OtProblem) -> String {
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", p.suppliers(), p.consumers()));
    out.push_str(&format!("{}\n", join(&p.supplies)));
    out.push_str(&format!("{}\n", join(&p.demands)));
    for i in 0..p.suppliers() {
        let row: Vec<f64> = (0..p.consumers()).map(|j| p.costs.get(i, j)).collect();
        out.push_str(&format!("{}\n", join(&row)));
    }
    out
}
