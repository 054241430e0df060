//! Benchmark runner: every requested strategy against every instance,
//! with CSV and JSON reports.
//!
//! A run never aborts on an individual failure; a strategy that errors on
//! an instance contributes an `InitFailed` row and the sweep continues.
//! Rows are emitted instance-major in the order given, strategies in
//! their deduplicated request order, so two runs over the same inputs
//! produce identical reports apart from the timing columns.

use lp_core::engine::{IterationRecord, PivotRule};
use lp_core::model::GeneralLp;
use lp_core::Settings;
use serde::Serialize;

use crate::registry::{run_strategy, StrategyOutput};
use crate::Error;

/// One instance of a benchmark suite.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub name: String,
    /// Instance family label carried into the report (for example
    /// "feasible" or "ot").
    pub kind: String,
    pub problem: GeneralLp,
}

/// One report row: the fixed columns of the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub kind: String,
    pub m: usize,
    pub n: usize,
    pub strategy: String,
    pub status: String,
    /// Strategy time in milliseconds.
    pub init_ms: f64,
    /// Total pivot count: strategy work plus follow-up engine pivots.
    pub iterations: usize,
    /// End-to-end time in milliseconds.
    pub total_ms: f64,
    /// Basis sparsity in [0, 1]; NaN when no basis was produced.
    pub sparsity: f64,
    /// Basis triangularity in [0, 1]; NaN when no basis was produced.
    pub triangularity: f64,
    pub feasible_init: bool,
}

/// Everything a benchmark run produced.
#[derive(Debug)]
pub struct BenchReport {
    pub rows: Vec<(BenchRecord, StrategyOutput)>,
    pub warnings: Vec<String>,
}

fn record_of(instance: &BenchInstance, out: &StrategyOutput) -> BenchRecord {
    let (sparsity, triangularity) = match &out.quality {
        Some(q) => (q.sparsity, q.triangularity),
        None => (f64::NAN, f64::NAN),
    };
    BenchRecord {
        instance: instance.name.clone(),
        kind: instance.kind.clone(),
        m: instance.problem.m(),
        n: instance.problem.n(),
        strategy: out.strategy.to_string(),
        status: out.status.name().to_string(),
        init_ms: out.init_time.as_secs_f64() * 1e3,
        iterations: out.init_work + out.solve_iterations,
        total_ms: out.total_time.as_secs_f64() * 1e3,
        sparsity,
        triangularity,
        feasible_init: out.feasible_init,
    }
}

/// Run `strategies` over `instances`.
///
/// Duplicate strategy names are dropped with a warning. An unknown
/// strategy name is the only hard error; per-run failures become
/// `InitFailed` rows.
pub fn run_bench(
    instances: &[BenchInstance],
    strategies: &[String],
    rule: PivotRule,
    settings: &Settings,
) -> Result<BenchReport, Error> {
    let mut warnings = Vec::new();
    let mut unique: Vec<&str> = Vec::new();
    for s in strategies {
        if unique.contains(&s.as_str()) {
            warnings.push(format!("duplicate strategy '{}' ignored", s));
        } else {
            unique.push(s.as_str());
        }
    }
    let mut rows = Vec::with_capacity(instances.len() * unique.len());
    for inst in instances {
        for &name in &unique {
            let out = run_strategy(name, &inst.problem, rule, settings)?;
            rows.push((record_of(inst, &out), out));
        }
    }
    Ok(BenchReport { rows, warnings })
}

/// Render the report as CSV. `note` lines, when given, are prefixed with
/// `#` ahead of the header.
pub fn write_csv(report: &BenchReport, note: Option<&str>) -> Result<String, Error> {
    let mut text = String::new();
    if let Some(note) = note {
        for line in note.lines() {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance",
        "kind",
        "m",
        "n",
        "strategy",
        "status",
        "init_ms",
        "iterations",
        "total_ms",
        "sparsity",
        "triangularity",
        "feasible_init",
    ])
    .map_err(|e| Error::BadSpec(e.to_string()))?;
    for (r, _) in &report.rows {
        w.write_record([
            r.instance.as_str(),
            r.kind.as_str(),
            &r.m.to_string(),
            &r.n.to_string(),
            r.strategy.as_str(),
            r.status.as_str(),
            &format!("{:.3}", r.init_ms),
            &r.iterations.to_string(),
            &format!("{:.3}", r.total_ms),
            &format!("{:.4}", r.sparsity),
            &format!("{:.4}", r.triangularity),
            &r.feasible_init.to_string(),
        ])
        .map_err(|e| Error::BadSpec(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::BadSpec(e.to_string()))?;
    text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(text)
}

#[derive(Serialize)]
struct JsonIteration {
    entering: usize,
    leaving: usize,
    step: f64,
    primal_objective: f64,
    dual_objective: f64,
    primal_feasible: bool,
    dual_feasible: bool,
}

fn json_log(log: &[IterationRecord]) -> Vec<JsonIteration> {
    log.iter()
        .map(|r| JsonIteration {
            entering: r.entering,
            leaving: r.leaving,
            step: r.step,
            primal_objective: r.primal_objective,
            dual_objective: r.dual_objective,
            primal_feasible: r.primal_feasible,
            dual_feasible: r.dual_feasible,
        })
        .collect()
}

#[derive(Serialize)]
struct JsonRow<'a> {
    #[serde(flatten)]
    record: &'a BenchRecord,
    objective: Option<f64>,
    flags: &'a [String],
    failure: &'a Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    logs: Option<Vec<Vec<JsonIteration>>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
    warnings: &'a [String],
    rows: Vec<JsonRow<'a>>,
}

/// Render the report as JSON, mirroring the CSV columns. With `verbose`,
/// per-iteration engine logs are attached to every row.
pub fn write_json(report: &BenchReport, note: Option<&str>, verbose: bool) -> Result<String, Error> {
    let rows = report
        .rows
        .iter()
        .map(|(r, out)| JsonRow {
            record: r,
            objective: out.objective,
            flags: &out.flags,
            failure: &out.failure,
            logs: if verbose {
                Some(out.logs.iter().map(|l| json_log(l)).collect())
            } else {
                None
            },
        })
        .collect();
    let doc = JsonReport { note, warnings: &report.warnings, rows };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::BadSpec(e.to_string()))
}
