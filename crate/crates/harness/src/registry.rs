//! The strategy registry: one uniform entry point per initialization
//! strategy, plus the routing that carries a strategy's outcome to a
//! final verdict.
//!
//! Every strategy is exposed as a name taking a general-form program. The
//! adapter standardizes (or lets the strategy standardize, for the ones
//! that read bounds and senses themselves), runs the strategy, and routes
//! the outcome: primal-feasible bases go to the primal engine,
//! dual-feasible ones to the dual engine, structural bases to whichever
//! engine their measured feasibility admits (with a cost-modification
//! completion when neither does), and points through purification to the
//! primal engine. Strategies that settle the instance during
//! initialization short-circuit. Engine and strategy errors never
//! propagate: they are recorded as an `InitFailed` result so a suite run
//! survives individual failures.

use std::time::{Duration, Instant};

use lp_core::engine::{dual_simplex, primal_simplex, IterationRecord, PivotRule};
use lp_core::engine::SolveResult;
use lp_core::init::artificial::{
    big_m, cost_modification, rhs_modification, solve_with_artificial_bounds, two_phase,
    two_phase_quick,
};
use lp_core::init::point::{eps_opt_search, hybrid_lp, idiot_start, purify_to_vertex, GeLp};
use lp_core::init::rules::{
    algebraic_init, infeasibility_sum_dual, infeasibility_sum_primal, moa_column_rule,
    moa_row_rule, nfb,
};
use lp_core::init::structural::{
    basis_quality, cosine_criterion, cplex_basis, crash_triangular, fill_reducing_basis,
    logical_start, tearing, BasisQuality, Orientation,
};
use lp_core::init::{InitFlag, InitOutcome, InitVerdict};
use lp_core::linalg::IndependenceTester;
use lp_core::mat::{dot, norm2};
use lp_core::model::{Basis, Certificate, GeneralLp, Relation, Sense, StandardLp, StandardMap};
use lp_core::{Error as CoreError, Settings};

use crate::Error;

/// Registered strategy names with one-line summaries, in registry order.
pub const STRATEGIES: &[(&str, &str)] = &[
    ("logical", "identity basis over slack and appended logical columns, residual cleared by a small auxiliary run"),
    ("algebraic", "slacks first, then decision columns admitted by linear independence"),
    ("cplex", "slack-first greedy admission with penalty-ordered decision variables"),
    ("crash_lower", "count-driven crash aiming for a lower triangular basis"),
    ("crash_upper", "count-driven crash aiming for an upper triangular basis"),
    ("fill_reducing", "singleton diagonal plus minimum-degree cover of the remaining rows"),
    ("cosine", "columns ranked by the angle between the column and the right-hand side"),
    ("tearing", "stage-by-stage feasibility over the block lower triangular form"),
    ("two_phase", "artificial residual minimized from the all-artificial start"),
    ("two_phase_quick", "phase one opened with multi-candidate pivot rounds"),
    ("big_m", "one-shot penalty on artificial columns, escalated when the evidence is ambiguous"),
    ("cost_mod", "raise negatively priced costs, dual-solve, return to the true costs"),
    ("rhs_mod", "lift negative basic values, primal-solve, return to the true right-hand side"),
    ("artificial_bounds", "cap nonbasic columns with bound rows and dual-solve the capped problem"),
    ("nfb", "repair walk entering by best reduced cost per unit of violation relief"),
    ("moa_column", "repair walk entering against the steepest descent of the most violated row"),
    ("moa_row", "dual repair walk leaving on the largest component of the entering direction"),
    ("infeas_sum_primal", "per-round auxiliary objective rewarding the currently violated set"),
    ("infeas_sum_dual", "dual mirror of the infeasibility-sum repair"),
    ("idiot", "penalty crash to an approximate point, purified to a vertex"),
    ("eps_opt", "penalty point refined by a boundary walk before purification"),
    ("hybrid", "edge-blending step from a feasible basis, landing purified to a vertex"),
];

/// The registered names, in registry order.
pub fn strategy_names() -> Vec<&'static str> {
    STRATEGIES.iter().map(|&(n, _)| n).collect()
}

/// Final classification of one strategy run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Optimal,
    PrimalInfeasible,
    PrimalUnbounded,
    IterationLimit,
    /// The strategy (or the engine it handed to) failed outright; the
    /// message is preserved on the output.
    InitFailed,
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Optimal => "Optimal",
            RunStatus::PrimalInfeasible => "PrimalInfeasible",
            RunStatus::PrimalUnbounded => "PrimalUnbounded",
            RunStatus::IterationLimit => "IterationLimit",
            RunStatus::InitFailed => "InitFailed",
        }
    }
}

/// Measured evidence behind a feasibility claim a strategy made for a
/// basis it handed over.
#[derive(Debug, Clone)]
pub struct ClaimCheck {
    /// "primal", "dual", or "structural".
    pub claim: &'static str,
    /// Smallest pivot of the basis LU factorization.
    pub smallest_pivot: f64,
    /// Least basic value, measured when the claim includes primal
    /// feasibility.
    pub min_basic_value: Option<f64>,
    /// Least nonbasic reduced cost, measured when the claim includes dual
    /// feasibility.
    pub min_reduced_cost: Option<f64>,
}

/// Everything observed while running one strategy on one instance.
#[derive(Debug, Clone)]
pub struct StrategyOutput {
    pub strategy: &'static str,
    pub status: RunStatus,
    /// Objective in the original sense, present at `Optimal`.
    pub objective: Option<f64>,
    /// Original-variable solution, present at `Optimal`.
    pub x: Option<Vec<f64>>,
    /// Improving ray in solver coordinates, present at `PrimalUnbounded`
    /// when one was produced.
    pub ray: Option<Vec<f64>>,
    /// Pivots and sweeps spent by the strategy itself.
    pub init_work: usize,
    /// Pivots spent by the follow-up engine runs.
    pub solve_iterations: usize,
    pub init_time: Duration,
    pub total_time: Duration,
    /// Shape measurements of the handed-over basis.
    pub quality: Option<BasisQuality>,
    /// Measured primal feasibility of the handed-over basis.
    pub feasible_init: bool,
    pub flags: Vec<String>,
    pub claims: Vec<ClaimCheck>,
    /// Per-iteration records of every engine run the router launched (or
    /// the strategy's own final run when it settled the instance).
    pub logs: Vec<Vec<IterationRecord>>,
    /// Objective at the raw starting point, for point strategies.
    pub point_objective: Option<f64>,
    /// Objective after purification, for point strategies.
    pub purified_objective: Option<f64>,
    /// |c'x - b'y| on the frame actually solved, present at `Optimal`.
    pub final_gap: Option<f64>,
    pub failure: Option<String>,
}

impl StrategyOutput {
    fn empty(strategy: &'static str) -> StrategyOutput {
        StrategyOutput {
            strategy,
            status: RunStatus::InitFailed,
            objective: None,
            x: None,
            ray: None,
            init_work: 0,
            solve_iterations: 0,
            init_time: Duration::ZERO,
            total_time: Duration::ZERO,
            quality: None,
            feasible_init: false,
            flags: Vec::new(),
            claims: Vec::new(),
            logs: Vec::new(),
            point_objective: None,
            purified_objective: None,
            final_gap: None,
            failure: None,
        }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.status = RunStatus::InitFailed;
        self.failure = Some(msg.into());
    }
}

struct Staged {
    outcome: InitOutcome,
    lp: StandardLp,
    map: StandardMap,
}

/// Run the named strategy on `p` and route its outcome to a verdict.
///
/// `Err` is reserved for an unknown name; everything that can go wrong
/// while actually solving lands in the output as `InitFailed`.
pub fn run_strategy(
    name: &str,
    p: &GeneralLp,
    rule: PivotRule,
    settings: &Settings,
) -> Result<StrategyOutput, Error> {
    let key = STRATEGIES
        .iter()
        .map(|&(n, _)| n)
        .find(|&n| n == name)
        .ok_or_else(|| Error::UnknownName(format!("strategy '{}'", name)))?;
    let t0 = Instant::now();
    let mut out = StrategyOutput::empty(key);
    let staged = match stage(key, p, settings) {
        Ok(s) => s,
        Err(e) => {
            out.fail(e.to_string());
            out.init_time = t0.elapsed();
            out.total_time = out.init_time;
            return Ok(out);
        }
    };
    out.init_time = t0.elapsed();
    out.init_work = staged.outcome.work;
    out.flags = staged.outcome.flags.iter().map(|f| format!("{:?}", f)).collect();
    // A solved outcome carries the final basis of whatever frame the
    // strategy worked on, not a start handed to an engine, so only
    // handed-over bases are measured here.
    match &staged.outcome.verdict {
        InitVerdict::PrimalFeasible(b)
        | InitVerdict::DualFeasible(b)
        | InitVerdict::Structural(b) => {
            out.quality = Some(basis_quality(&staged.lp, b, out.init_time, settings));
            out.feasible_init = b.feasibility(&staged.lp, settings).primal;
        }
        _ => {}
    }
    route(&mut out, staged, rule, settings);
    out.total_time = t0.elapsed();
    Ok(out)
}

fn stage(name: &str, p: &GeneralLp, settings: &Settings) -> Result<Staged, CoreError> {
    match name {
        "logical" => {
            let ls = logical_start(p, settings)?;
            Ok(Staged { outcome: ls.outcome, lp: ls.lp, map: ls.map })
        }
        "cplex" => {
            let cb = cplex_basis(p, settings)?;
            if cb.artificial.is_empty() {
                let mut outcome = InitOutcome::new(InitVerdict::Structural(cb.basis.clone()));
                if cb.outside_rule > 0 {
                    outcome = outcome.flag(InitFlag::CompletedOutsideRule(cb.outside_rule));
                }
                Ok(Staged { outcome, lp: cb.lp, map: cb.map })
            } else {
                // Appended placeholder columns relax their rows, so the
                // extended frame must not be solved. Keep the admitted
                // real columns and complete the set on the plain frame.
                restage_without_appended(p, cb.basis.basic(), cb.outside_rule, settings)
            }
        }
        "algebraic" => {
            let ai = algebraic_init(p, settings)?;
            if ai.pivoting_cols.is_empty() {
                let mut outcome = InitOutcome::new(InitVerdict::Structural(ai.basis.clone()));
                if !ai.redundant_rows.is_empty() {
                    outcome =
                        outcome.flag(InitFlag::RedundantRows(ai.redundant_rows.clone()));
                }
                Ok(Staged { outcome, lp: ai.lp, map: ai.map })
            } else {
                restage_without_appended(p, ai.basis.basic(), ai.pivoting_cols.len(), settings)
            }
        }
        "eps_opt" => {
            let (lp, map) = p.to_standard_form(settings)?;
            let outcome = eps_opt_stage(p, &lp, &map, settings);
            Ok(Staged { outcome, lp, map })
        }
        _ => {
            let (lp, map) = p.to_standard_form(settings)?;
            let outcome = stage_standard(name, &lp, settings)?;
            Ok(Staged { outcome, lp, map })
        }
    }
}

fn reference_start(lp: &StandardLp, settings: &Settings) -> Result<Basis, CoreError> {
    let crash = crash_triangular(lp, Orientation::Lower, true, settings)?;
    Ok(crash.basis().expect("the triangular crash always carries a basis").clone())
}

/// Rebuild a start whose basis used appended placeholder columns: keep the
/// admitted real columns and fill the rest with the first independent
/// columns of the plain standardized frame.
fn restage_without_appended(
    p: &GeneralLp,
    basic: &[usize],
    outside_before: usize,
    settings: &Settings,
) -> Result<Staged, CoreError> {
    let (lp, map) = p.to_standard_form(settings)?;
    let m = lp.m();
    let mut tester = IndependenceTester::new(m);
    let mut picked: Vec<usize> = Vec::with_capacity(m);
    for &j in basic.iter().filter(|&&j| j < lp.n()) {
        if tester.try_add(lp.a.col(j), settings.pivot_tol) {
            picked.push(j);
        }
    }
    let seeded = picked.len();
    for j in 0..lp.n() {
        if picked.len() == m {
            break;
        }
        if !picked.contains(&j) && tester.try_add(lp.a.col(j), settings.pivot_tol) {
            picked.push(j);
        }
    }
    if picked.len() < m {
        return Err(CoreError::InvalidProblem(
            "the start basis could not be completed on the plain frame".into(),
        ));
    }
    let basis = Basis::new(&lp, picked, settings)?;
    let outcome = InitOutcome::new(InitVerdict::Structural(basis))
        .flag(InitFlag::CompletedOutsideRule(outside_before + (m - seeded)));
    Ok(Staged { outcome, lp, map })
}

fn stage_standard(
    name: &str,
    lp: &StandardLp,
    settings: &Settings,
) -> Result<InitOutcome, CoreError> {
    Ok(match name {
        "two_phase" => two_phase(lp, settings)?,
        "two_phase_quick" => two_phase_quick(lp, (lp.m() / 2).max(2), settings)?,
        "big_m" => big_m(lp, None, settings)?,
        "cost_mod" => cost_modification(lp, &reference_start(lp, settings)?, None, settings)?,
        "rhs_mod" => rhs_modification(lp, &reference_start(lp, settings)?, None, settings)?,
        "artificial_bounds" => {
            solve_with_artificial_bounds(lp, &reference_start(lp, settings)?, None, settings)?
        }
        "nfb" => nfb(lp, &reference_start(lp, settings)?, settings)?,
        "moa_column" => moa_column_rule(lp, &reference_start(lp, settings)?, settings)?,
        "moa_row" => moa_row_rule(lp, &reference_start(lp, settings)?, settings)?,
        "infeas_sum_primal" => {
            infeasibility_sum_primal(lp, &reference_start(lp, settings)?, settings)?
        }
        "infeas_sum_dual" => {
            infeasibility_sum_dual(lp, &reference_start(lp, settings)?, settings)?
        }
        "cosine" => cosine_criterion(lp, settings)?,
        "crash_lower" => crash_triangular(lp, Orientation::Lower, true, settings)?,
        "crash_upper" => crash_triangular(lp, Orientation::Upper, true, settings)?,
        "fill_reducing" => fill_reducing_basis(lp, settings)?,
        "tearing" => tearing(lp, lp.m(), settings)?.outcome,
        "idiot" => idiot_start(lp, settings),
        "hybrid" => {
            let tp = two_phase(lp, settings)?;
            match tp.verdict {
                InitVerdict::PrimalFeasible(b) => {
                    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
                    let h = hybrid_lp(lp, b, 0.5, &grid, settings)?;
                    let mut outcome = h.outcome;
                    outcome.work += tp.work;
                    outcome
                }
                other => InitOutcome { verdict: other, flags: tp.flags, work: tp.work },
            }
        }
        _ => unreachable!("name was validated against the registry"),
    })
}

/// Point strategy with a boundary-walk refinement.
///
/// The walk applies when the original program is all-`>=` rows over plain
/// nonnegative variables (the form the search operates on); anything else
/// falls back to the unrefined point, flagged as a no-op. The refined
/// point is carried back to solver coordinates by recomputing the surplus
/// values.
fn eps_opt_stage(
    p: &GeneralLp,
    lp: &StandardLp,
    map: &StandardMap,
    settings: &Settings,
) -> InitOutcome {
    let base = idiot_start(lp, settings);
    let refinable = p.rel.iter().all(|r| *r == Relation::Ge)
        && p.lower.iter().all(|&l| l == 0.0)
        && p.upper.iter().all(|&u| u == f64::INFINITY);
    if !refinable {
        return base.flag(InitFlag::NoOp);
    }
    let x_std = match &base.verdict {
        InitVerdict::Point { x, .. } => x.clone(),
        _ => return base,
    };
    let n = p.n();
    let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let c: Vec<f64> = p.c.iter().map(|&v| sign * v).collect();
    let ge = match GeLp::new(c, p.a.clone(), p.b.clone()).and_then(|g| g.normalized()) {
        Ok(g) => g,
        Err(_) => return base.flag(InitFlag::NoOp),
    };
    let trace = match eps_opt_search(&ge, &x_std[..n], settings) {
        Ok(t) => t,
        Err(_) => return base.flag(InitFlag::NoOp),
    };
    let steps = trace.objectives.len().saturating_sub(1);
    let mut x_new = vec![0.0; lp.n()];
    x_new[..n].copy_from_slice(&trace.point.x);
    for (i, slack) in map.slack_cols.iter().enumerate() {
        if let Some(col) = *slack {
            let surplus = dot(&p.a.row(i), &trace.point.x) - p.b[i];
            x_new[col] = surplus.max(0.0);
        }
    }
    let residual = norm2(&lp.residual(&x_new));
    InitOutcome {
        verdict: InitVerdict::Point { x: x_new, residual },
        flags: base.flags,
        work: base.work + steps,
    }
}

fn claim(lp: &StandardLp, basis: &Basis, kind: &'static str, settings: &Settings) -> ClaimCheck {
    let min_basic_value = if kind == "primal" {
        Some(basis.basic_values(lp).into_iter().fold(f64::INFINITY, f64::min))
    } else {
        None
    };
    let min_reduced_cost = if kind == "dual" {
        let s = basis.dual_solution(lp).s;
        Some(basis.nonbasic().iter().map(|&j| s[j]).fold(f64::INFINITY, f64::min))
    } else {
        None
    };
    let _ = settings;
    ClaimCheck {
        claim: kind,
        smallest_pivot: basis.lu().smallest_pivot(),
        min_basic_value,
        min_reduced_cost,
    }
}

fn route(out: &mut StrategyOutput, staged: Staged, rule: PivotRule, settings: &Settings) {
    let Staged { outcome, lp, map } = staged;
    match outcome.verdict {
        InitVerdict::PrimalFeasible(b) => {
            out.claims.push(claim(&lp, &b, "primal", settings));
            run_primal(out, &lp, &map, b, rule, settings);
        }
        InitVerdict::DualFeasible(b) => {
            out.claims.push(claim(&lp, &b, "dual", settings));
            run_dual(out, &lp, &map, b, rule, settings);
        }
        InitVerdict::Structural(b) => {
            out.claims.push(claim(&lp, &b, "structural", settings));
            let flags = b.feasibility(&lp, settings);
            if flags.primal {
                run_primal(out, &lp, &map, b, rule, settings);
            } else if flags.dual {
                run_dual(out, &lp, &map, b, rule, settings);
            } else {
                // Neither engine admits the basis as is; make it primal
                // feasible through the cost-raising completion.
                match cost_modification(&lp, &b, None, settings) {
                    Ok(fix) => {
                        out.init_work += fix.work;
                        out.flags.extend(fix.flags.iter().map(|f| format!("{:?}", f)));
                        match fix.verdict {
                            InitVerdict::PrimalFeasible(b2) => {
                                out.claims.push(claim(&lp, &b2, "primal", settings));
                                run_primal(out, &lp, &map, b2, rule, settings);
                            }
                            InitVerdict::Infeasible(_) => out.status = RunStatus::PrimalInfeasible,
                            InitVerdict::Stalled => out.status = RunStatus::IterationLimit,
                            other => out.fail(format!(
                                "structural completion returned an unexpected verdict: {:?}",
                                std::mem::discriminant(&other)
                            )),
                        }
                    }
                    Err(e) => out.fail(e.to_string()),
                }
            }
        }
        InitVerdict::Point { x, .. } => {
            out.point_objective = Some(lp.objective(&x));
            match purify_to_vertex(&lp, &x, settings) {
                Ok(pr) => {
                    out.init_work += pr.steps;
                    out.purified_objective = Some(pr.objective);
                    out.quality = Some(basis_quality(&lp, &pr.basis, out.init_time, settings));
                    out.feasible_init = pr.basis.feasibility(&lp, settings).primal;
                    out.claims.push(claim(&lp, &pr.basis, "primal", settings));
                    run_primal(out, &lp, &map, pr.basis, rule, settings);
                }
                Err(CoreError::UnboundedDirection) => out.status = RunStatus::PrimalUnbounded,
                Err(e) => out.fail(e.to_string()),
            }
        }
        InitVerdict::Solved(r) => settle(out, &map, *r),
        InitVerdict::Infeasible(_) => out.status = RunStatus::PrimalInfeasible,
        InitVerdict::Unbounded(ray) => {
            out.status = RunStatus::PrimalUnbounded;
            out.ray = Some(ray);
        }
        InitVerdict::Stalled => out.status = RunStatus::IterationLimit,
    }
}

fn run_primal(
    out: &mut StrategyOutput,
    lp: &StandardLp,
    map: &StandardMap,
    basis: Basis,
    rule: PivotRule,
    settings: &Settings,
) {
    match primal_simplex(lp, basis, rule, None, settings) {
        Ok(r) => {
            out.solve_iterations += r.iterations;
            settle(out, map, r);
        }
        Err(e) => out.fail(e.to_string()),
    }
}

fn run_dual(
    out: &mut StrategyOutput,
    lp: &StandardLp,
    map: &StandardMap,
    basis: Basis,
    rule: PivotRule,
    settings: &Settings,
) {
    match dual_simplex(lp, basis, rule, settings) {
        Ok(r) => {
            out.solve_iterations += r.iterations;
            settle(out, map, r);
        }
        Err(e) => out.fail(e.to_string()),
    }
}

fn settle(out: &mut StrategyOutput, map: &StandardMap, r: SolveResult) {
    out.logs.push(r.log);
    match r.certificate {
        Certificate::Optimal => {
            out.status = RunStatus::Optimal;
            out.objective = Some(map.restore_objective(r.primal.objective));
            out.x = Some(map.restore_x(&r.primal.x[..map.n_std]));
            // Both objectives are reported in the frame the solve ran on,
            // so the gap stays meaningful even for results produced on an
            // extended frame during initialization.
            out.final_gap = Some((r.primal.objective - r.dual.objective).abs());
        }
        Certificate::PrimalInfeasible(_) => out.status = RunStatus::PrimalInfeasible,
        Certificate::PrimalUnbounded { ray } => {
            out.status = RunStatus::PrimalUnbounded;
            out.ray = Some(ray);
        }
        Certificate::IterationLimit => out.status = RunStatus::IterationLimit,
    }
}
