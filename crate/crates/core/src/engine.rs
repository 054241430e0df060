//! Primal and dual simplex engines.
//!
//! Both engines refactorize the basis on every pivot (desk scale makes this
//! affordable and removes update-error drift), log each iteration, break
//! ties by lowest variable index, and switch to Bland's rule on their own
//! once too many consecutive near-zero steps look like cycling.
//!
//! The primal engine accepts an optional *restricted* index set: listed
//! variables are exempt from the nonnegativity guard while basic, except
//! that a negative one rising toward zero still blocks the step at zero.
//! This is exactly the modified ratio test needed by the infeasibility-sum
//! starting strategies, whose auxiliary problems relax nonnegativity on the
//! currently infeasible basic variables.

use crate::error::Error;
use crate::mat::dot;
use crate::model::{
    Basis, BasicSolution, Certificate, DualBasicSolution, InfeasibleWitness, StandardLp,
};
use crate::settings::Settings;

/// Entering/leaving selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Most negative reduced cost (primal) / most negative basic value
    /// (dual); ties by lowest index.
    Dantzig,
    /// Lowest eligible index; finite termination guarantee.
    Bland,
}

/// State snapshot taken after each pivot.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub entering: usize,
    pub leaving: usize,
    /// Primal step `t` or dual step `r`.
    pub step: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_feasible: bool,
    pub dual_feasible: bool,
}

/// Terminal state of an engine run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub certificate: Certificate,
    pub basis: Basis,
    pub primal: BasicSolution,
    pub dual: DualBasicSolution,
    pub iterations: usize,
    pub log: Vec<IterationRecord>,
    /// True when the anti-cycling watchdog forced Bland's rule mid-run.
    pub bland_engaged: bool,
}

impl SolveResult {
    fn finish(
        lp: &StandardLp,
        basis: Basis,
        certificate: Certificate,
        log: Vec<IterationRecord>,
        bland_engaged: bool,
    ) -> SolveResult {
        let primal = basis.primal_solution(lp);
        let dual = basis.dual_solution(lp);
        SolveResult {
            certificate,
            basis,
            primal,
            dual,
            iterations: log.len(),
            log,
            bland_engaged,
        }
    }
}

/// Outcome of a primal ratio test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum RatioOutcome {
    Blocked { position: usize, step: f64 },
    Unblocked,
}

/// Primal ratio test over basic values `xb` and direction `delta`
/// (`delta = A_B^{-1} A_q`; the step moves `x_B` by `-t * delta`).
///
/// Standard rows block when their direction component is positive, with
/// near-zero basic values clamped to the feasibility tolerance so that
/// degenerate rows force (numerically) zero-length steps. Restricted rows
/// instead block only when rising through zero from below. Ties go to the
/// lowest basic variable index.
pub(crate) fn primal_ratio_test(
    xb: &[f64],
    delta: &[f64],
    basic: &[usize],
    restricted: Option<&[bool]>,
    settings: &Settings,
) -> RatioOutcome {
    let mut best: Option<(f64, usize)> = None; // (ratio, position)
    for (pos, (&x, &d)) in xb.iter().zip(delta).enumerate() {
        let exempt = restricted.map_or(false, |mask| mask[basic[pos]]) && x < -settings.feas_tol;
        let ratio = if exempt {
            // Rising through zero: blocks at t = x/d, i.e. ratio d/x > 0.
            if d < -settings.pivot_tol {
                d / x
            } else {
                continue;
            }
        } else {
            if d > settings.pivot_tol {
                d / x.max(settings.feas_tol)
            } else {
                continue;
            }
        };
        let better = match best {
            None => true,
            Some((r, p)) => {
                ratio > r * (1.0 + 1e-12) + 1e-15
                    || ((ratio - r).abs() <= 1e-12 * r.abs().max(1.0) && basic[pos] < basic[p])
            }
        };
        if better {
            best = Some((ratio, pos));
        }
    }
    match best {
        Some((ratio, pos)) => RatioOutcome::Blocked { position: pos, step: 1.0 / ratio },
        None => RatioOutcome::Unblocked,
    }
}

/// Pick the entering variable for the primal engine; `None` means optimal.
pub(crate) fn select_entering(
    s: &[f64],
    nonbasic: &[usize],
    rule: PivotRule,
    settings: &Settings,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &j in nonbasic {
        if s[j] >= -settings.feas_tol {
            continue;
        }
        match rule {
            PivotRule::Bland => return Some(j),
            PivotRule::Dantzig => {
                // Nonbasic indices are ascending, so strict improvement
                // keeps the lowest index on ties.
                if best.map_or(true, |b| s[j] < s[b]) {
                    best = Some(j);
                }
            }
        }
    }
    best
}

/// `A_B^{-1} A_q`, aligned with the basic order.
pub(crate) fn entering_direction(lp: &StandardLp, basis: &Basis, q: usize) -> Vec<f64> {
    basis.lu().solve(lp.a.col(q), false).expect("basis factorization is nonsingular")
}

/// Row `pos` of `A_B^{-1}` (as `rho` with `rho' = e_pos' A_B^{-1}`).
pub(crate) fn inverse_row(basis: &Basis, pos: usize) -> Vec<f64> {
    let m = basis.basic().len();
    let mut e = vec![0.0; m];
    e[pos] = 1.0;
    basis.lu().solve(&e, true).expect("basis factorization is nonsingular")
}

/// Unbounded-ray assembly for an entering column with no blocking row.
fn unbounded_ray(lp: &StandardLp, basis: &Basis, q: usize, delta: &[f64]) -> Vec<f64> {
    let mut ray = vec![0.0; lp.n()];
    ray[q] = 1.0;
    for (pos, &j) in basis.basic().iter().enumerate() {
        ray[j] = -delta[pos];
    }
    ray
}

fn record(
    lp: &StandardLp,
    basis: &Basis,
    entering: usize,
    leaving: usize,
    step: f64,
    settings: &Settings,
) -> IterationRecord {
    let p = basis.primal_solution(lp);
    let d = basis.dual_solution(lp);
    let flags = basis.feasibility(lp, settings);
    IterationRecord {
        entering,
        leaving,
        step,
        primal_objective: p.objective,
        dual_objective: d.objective,
        primal_feasible: flags.primal,
        dual_feasible: flags.dual,
    }
}

/// Primal simplex from a primal-feasible basis.
///
/// `restricted` names variables exempt from the nonnegativity guard (see
/// module docs); the starting basis must satisfy `x_B >= -feas_tol` on all
/// non-exempt coordinates.
pub fn primal_simplex(
    lp: &StandardLp,
    start: Basis,
    rule: PivotRule,
    restricted: Option<&[usize]>,
    settings: &Settings,
) -> Result<SolveResult, Error> {
    let mask = restricted.map(|idx| {
        let mut m = vec![false; lp.n()];
        for &j in idx {
            m[j] = true;
        }
        m
    });
    {
        let xb = start.basic_values(lp);
        for (pos, &v) in xb.iter().enumerate() {
            let exempt = mask.as_ref().map_or(false, |m| m[start.basic()[pos]]);
            if !exempt && v < -settings.feas_tol {
                return Err(Error::BadStart(format!(
                    "x[{}] = {} is negative at the start",
                    start.basic()[pos],
                    v
                )));
            }
        }
    }

    let limit = settings.iter_limit(lp.m(), lp.n());
    let stall_limit = settings.anti_cycle_factor * lp.m();
    let mut basis = start;
    let mut rule = rule;
    let mut bland_engaged = false;
    let mut stalls = 0usize;
    let mut log: Vec<IterationRecord> = Vec::new();

    loop {
        let dual = basis.dual_solution(lp);
        let entering = match select_entering(&dual.s, basis.nonbasic(), rule, settings) {
            None => {
                return Ok(SolveResult::finish(lp, basis, Certificate::Optimal, log, bland_engaged))
            }
            Some(q) => q,
        };
        if log.len() >= limit {
            return Ok(SolveResult::finish(
                lp,
                basis,
                Certificate::IterationLimit,
                log,
                bland_engaged,
            ));
        }
        let xb = basis.basic_values(lp);
        let delta = entering_direction(lp, &basis, entering);
        let (position, step) =
            match primal_ratio_test(&xb, &delta, basis.basic(), mask.as_deref(), settings) {
                RatioOutcome::Unblocked => {
                    let ray = unbounded_ray(lp, &basis, entering, &delta);
                    return Ok(SolveResult::finish(
                        lp,
                        basis,
                        Certificate::PrimalUnbounded { ray },
                        log,
                        bland_engaged,
                    ));
                }
                RatioOutcome::Blocked { position, step } => (position, step),
            };
        let leaving = basis.basic()[position];
        basis = basis.pivot(lp, entering, leaving, settings)?;
        log.push(record(lp, &basis, entering, leaving, step, settings));

        if step.abs() <= 10.0 * settings.feas_tol {
            stalls += 1;
            if stalls > stall_limit && rule == PivotRule::Dantzig {
                rule = PivotRule::Bland;
                bland_engaged = true;
            }
        } else {
            stalls = 0;
        }
    }
}

/// Dual simplex from a dual-feasible basis.
pub fn dual_simplex(
    lp: &StandardLp,
    start: Basis,
    rule: PivotRule,
    settings: &Settings,
) -> Result<SolveResult, Error> {
    {
        let dual = start.dual_solution(lp);
        for &j in start.nonbasic() {
            if dual.s[j] < -settings.feas_tol {
                return Err(Error::BadStart(format!(
                    "reduced cost s[{}] = {} is negative at the start",
                    j, dual.s[j]
                )));
            }
        }
    }

    let limit = settings.iter_limit(lp.m(), lp.n());
    let stall_limit = settings.anti_cycle_factor * lp.m();
    let mut basis = start;
    let mut rule = rule;
    let mut bland_engaged = false;
    let mut stalls = 0usize;
    let mut log: Vec<IterationRecord> = Vec::new();

    loop {
        let xb = basis.basic_values(lp);
        // Leaving selection: a basic variable with negative value.
        let mut leaving_pos: Option<usize> = None;
        for (pos, &v) in xb.iter().enumerate() {
            if v >= -settings.feas_tol {
                continue;
            }
            match rule {
                PivotRule::Bland => {
                    if leaving_pos.map_or(true, |p| basis.basic()[pos] < basis.basic()[p]) {
                        leaving_pos = Some(pos);
                    }
                }
                PivotRule::Dantzig => {
                    if leaving_pos.map_or(true, |p| v < xb[p]) {
                        leaving_pos = Some(pos);
                    }
                }
            }
        }
        let position = match leaving_pos {
            None => {
                return Ok(SolveResult::finish(lp, basis, Certificate::Optimal, log, bland_engaged))
            }
            Some(p) => p,
        };
        if log.len() >= limit {
            return Ok(SolveResult::finish(
                lp,
                basis,
                Certificate::IterationLimit,
                log,
                bland_engaged,
            ));
        }

        let rho = inverse_row(&basis, position);
        let dual = basis.dual_solution(lp);
        // Entering selection: most binding ratio -delta_s[j] / s[j] over
        // nonbasic j with negative direction component.
        let mut best: Option<(f64, usize)> = None;
        for &j in basis.nonbasic() {
            let ds = dot(lp.a.col(j), &rho);
            if ds >= -settings.pivot_tol {
                continue;
            }
            let ratio = -ds / dual.s[j].max(settings.feas_tol);
            let better = match best {
                None => true,
                Some((r, jb)) => {
                    ratio > r * (1.0 + 1e-12) + 1e-15
                        || ((ratio - r).abs() <= 1e-12 * r.abs().max(1.0) && j < jb)
                }
            };
            if better {
                best = Some((ratio, j));
            }
        }
        let (entering, step) = match best {
            None => {
                // Row `position` certifies infeasibility: its inverse row
                // negated has sigma'A <= 0 and sigma'b = -x_p > 0.
                let sigma: Vec<f64> = rho.iter().map(|&v| -v).collect();
                return Ok(SolveResult::finish(
                    lp,
                    basis,
                    Certificate::PrimalInfeasible(InfeasibleWitness::DualRay(sigma)),
                    log,
                    bland_engaged,
                ));
            }
            Some((ratio, j)) => (j, 1.0 / ratio),
        };
        let leaving = basis.basic()[position];
        basis = basis.pivot(lp, entering, leaving, settings)?;
        log.push(record(lp, &basis, entering, leaving, step, settings));

        if step.abs() <= 10.0 * settings.feas_tol {
            stalls += 1;
            if stalls > stall_limit && rule == PivotRule::Dantzig {
                rule = PivotRule::Bland;
                bland_engaged = true;
            }
        } else {
            stalls = 0;
        }
    }
}

/// Result of the capped multi-pivot Phase-I pass.
#[derive(Debug, Clone)]
pub struct QuickPhase1Result {
    /// Final basis over the auxiliary problem.
    pub basis: Basis,
    /// Auxiliary objective (sum of artificial values) at the final basis.
    pub phase1_objective: f64,
    /// True when no artificial variable remains basic.
    pub artificial_free: bool,
    /// True when the pass stopped because no candidate pivot applied.
    pub stalled: bool,
    pub iterations: usize,
    pub log: Vec<IterationRecord>,
}

/// Phase-I acceleration: each round takes up to `n_p` entering candidates
/// by most negative reduced cost and applies their pivots sequentially,
/// re-validating each one against the current basis and skipping candidates
/// whose blocking row was already pivoted this round.
///
/// `aux` must be a feasibility problem (artificials listed in
/// `artificials`, starting basis primal feasible). Stops as soon as the
/// basis is artificial-free, the auxiliary is optimal, or a round makes no
/// progress.
pub fn quick_phase1(
    aux: &StandardLp,
    start: Basis,
    artificials: &[usize],
    n_p: usize,
    settings: &Settings,
) -> Result<QuickPhase1Result, Error> {
    if n_p == 0 {
        return Err(Error::InvalidIndex("n_p must be at least 1".into()));
    }
    let mut is_artificial = vec![false; aux.n()];
    for &j in artificials {
        if j >= aux.n() {
            return Err(Error::InvalidIndex(format!("artificial column {} out of range", j)));
        }
        is_artificial[j] = true;
    }
    {
        let xb = start.basic_values(aux);
        if xb.iter().any(|&v| v < -settings.feas_tol) {
            return Err(Error::BadStart("quick phase 1 needs a feasible start".into()));
        }
    }

    let limit = settings.iter_limit(aux.m(), aux.n());
    let mut basis = start;
    let mut log: Vec<IterationRecord> = Vec::new();
    let mut stalled = false;

    'outer: loop {
        let artificial_basic = basis.basic().iter().any(|&j| is_artificial[j]);
        if !artificial_basic {
            break;
        }
        let dual = basis.dual_solution(aux);
        let mut candidates: Vec<usize> = basis
            .nonbasic()
            .iter()
            .copied()
            .filter(|&j| dual.s[j] < -settings.feas_tol)
            .collect();
        if candidates.is_empty() {
            break; // Phase-I optimal (possibly infeasible).
        }
        candidates.sort_by(|&a, &b| dual.s[a].partial_cmp(&dual.s[b]).unwrap().then(a.cmp(&b)));
        candidates.truncate(n_p);

        let mut used_rows: Vec<bool> = vec![false; aux.m()];
        let mut progressed = false;
        for q in candidates {
            if basis.is_basic(q) {
                continue;
            }
            // Re-validate against the basis as it stands now.
            let dual_now = basis.dual_solution(aux);
            if dual_now.s[q] >= -settings.feas_tol {
                continue;
            }
            let xb = basis.basic_values(aux);
            let delta = entering_direction(aux, &basis, q);
            let (position, step) =
                match primal_ratio_test(&xb, &delta, basis.basic(), None, settings) {
                    RatioOutcome::Unblocked => continue, // cannot happen with costed artificials
                    RatioOutcome::Blocked { position, step } => (position, step),
                };
            if used_rows[position] {
                continue;
            }
            used_rows[position] = true;
            let leaving = basis.basic()[position];
            basis = basis.pivot(aux, q, leaving, settings)?;
            log.push(record(aux, &basis, q, leaving, step, settings));
            progressed = true;
            if log.len() >= limit {
                stalled = true;
                break 'outer;
            }
        }
        if !progressed {
            stalled = true;
            break;
        }
    }

    let phase1_objective = basis.primal_solution(aux).objective;
    let artificial_free = !basis.basic().iter().any(|&j| is_artificial[j]);
    Ok(QuickPhase1Result {
        phase1_objective,
        artificial_free,
        stalled,
        iterations: log.len(),
        log,
        basis,
    })
}
