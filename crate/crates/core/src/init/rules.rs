//! Starts built by modified pivot sequences that walk an arbitrary basis
//! toward feasibility without artificial columns.
//!
//! * [`nfb`] — repairs the most violated row directly: enter the cheapest
//!   column that relieves it, leave the infeasible row it tightens most;
//! * [`algebraic_init`] — no pivoting at all: slack columns, then
//!   independent decision columns, then zero-cost unit "pivoting" columns
//!   for whatever rows remain uncovered;
//! * [`moa_column_rule`] / [`moa_row_rule`] — enter (or leave) along the
//!   direction making the widest angle with the objective's uphill
//!   direction, one exchange per round;
//! * [`infeasibility_sum_primal`] / [`infeasibility_sum_dual`] — drive the
//!   total violation down with engine iterations whose guard exempts the
//!   violated set, re-deriving that set every round.
//!
//! All walks carry a revisit guard; a detected cycle (or an exhausted
//! budget) reroutes to the prescribed fallback strategy and flags it.

use std::collections::HashSet;

use crate::engine::{self, PivotRule, RatioOutcome};
use crate::error::Error;
use crate::init::{artificial, InitFlag, InitOutcome, InitVerdict};
use crate::linalg::IndependenceTester;
use crate::mat::{axpy, dot};
use crate::model::{Basis, GeneralLp, InfeasibleWitness, StandardLp, StandardMap};
use crate::settings::Settings;

/// Revisit detector over basis index sets: remembers every basis seen and
/// reports a revisit or an exhausted budget (twice the number of distinct
/// bases, capped at 10,000).
struct BasisGuard {
    seen: HashSet<Vec<usize>>,
    cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum GuardState {
    Fresh,
    Revisit,
    Exhausted,
}

impl BasisGuard {
    fn new(m: usize, n: usize) -> BasisGuard {
        let mut comb: f64 = 1.0;
        for k in 0..m.min(n - m) {
            comb *= (n - k) as f64 / (k + 1) as f64;
            if comb > 1e7 {
                break;
            }
        }
        let cap = (2.0 * comb).min(10_000.0) as usize;
        BasisGuard { seen: HashSet::new(), cap }
    }

    fn check(&mut self, basic: &[usize]) -> GuardState {
        let mut key = basic.to_vec();
        key.sort_unstable();
        if !self.seen.insert(key) {
            GuardState::Revisit
        } else if self.seen.len() > self.cap {
            GuardState::Exhausted
        } else {
            GuardState::Fresh
        }
    }
}

/// Reroute to the phase-one pipeline, tagging why.
fn fallback_two_phase(
    lp: &StandardLp,
    flag: InitFlag,
    work: usize,
    settings: &Settings,
) -> Result<InitOutcome, Error> {
    let mut out = artificial::two_phase(lp, settings)?;
    out.flags.push(flag);
    out.work += work;
    Ok(out)
}

/// Reroute to the capped-bound dual pipeline, tagging why.
fn fallback_bounds(
    lp: &StandardLp,
    start: &Basis,
    flag: InitFlag,
    work: usize,
    settings: &Settings,
) -> Result<InitOutcome, Error> {
    let mut out = artificial::solve_with_artificial_bounds(lp, start, None, settings)?;
    out.flags.push(flag);
    out.work += work;
    Ok(out)
}

/// Most negative entry, ties to the lowest basic variable index.
fn most_negative_position(values: &[f64], basic: &[usize], threshold: f64) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (pos, &v) in values.iter().enumerate() {
        if v >= threshold {
            continue;
        }
        let better = match best {
            None => true,
            Some(p) => {
                v < values[p] - 1e-12 * values[p].abs().max(1.0)
                    || ((v - values[p]).abs() <= 1e-12 * values[p].abs().max(1.0)
                        && basic[pos] < basic[p])
            }
        };
        if better {
            best = Some(pos);
        }
    }
    best
}

/// Feasibility repair by direct row relief: pick the most violated row,
/// enter the best column that relieves it, and let the violated row that
/// tightens first leave. The chosen row's new occupant is nonnegative after
/// every exchange, so violations never spread to the repaired row.
pub fn nfb(lp: &StandardLp, start: &Basis, settings: &Settings) -> Result<InitOutcome, Error> {
    let mut basis = start.clone();
    let mut guard = BasisGuard::new(lp.m(), lp.n());
    let mut work = 0usize;
    loop {
        match guard.check(basis.basic()) {
            GuardState::Fresh => {}
            GuardState::Revisit => {
                return fallback_two_phase(lp, InitFlag::CycleFallback("two_phase"), work, settings)
            }
            GuardState::Exhausted => {
                return fallback_two_phase(lp, InitFlag::LimitFallback("two_phase"), work, settings)
            }
        }
        let xb = basis.basic_values(lp);
        let k = match most_negative_position(&xb, basis.basic(), -settings.feas_tol) {
            None => {
                return Ok(InitOutcome::with_work(InitVerdict::PrimalFeasible(basis), work))
            }
            Some(k) => k,
        };
        let rho = engine::inverse_row(&basis, k);
        let dual = basis.dual_solution(lp);
        // Entering: among columns that relieve row k (negative component in
        // the row), the smallest reduced cost per unit of relief.
        let mut entering: Option<(f64, usize)> = None;
        for &j in basis.nonbasic() {
            let beta = dot(&rho, lp.a.col(j));
            if beta >= -settings.pivot_tol {
                continue;
            }
            let score = -dual.s[j] / beta;
            let better = match entering {
                None => true,
                Some((sc, jb)) => {
                    score < sc - 1e-12 * sc.abs().max(1.0)
                        || ((score - sc).abs() <= 1e-12 * sc.abs().max(1.0) && j < jb)
                }
            };
            if better {
                entering = Some((score, j));
            }
        }
        let q = match entering {
            None => {
                // No column can relieve the row: its inverse row certifies
                // infeasibility (sigma'A <= 0, sigma'b = -x_k > 0).
                let sigma: Vec<f64> = rho.iter().map(|&v| -v).collect();
                return Ok(InitOutcome::with_work(
                    InitVerdict::Infeasible(InfeasibleWitness::DualRay(sigma)),
                    work,
                ));
            }
            Some((_, q)) => q,
        };
        // Leaving: the violated row that reaches zero first along the
        // entering direction (largest ratio); row k always qualifies.
        let delta = engine::entering_direction(lp, &basis, q);
        let mut leave: Option<(f64, usize)> = None;
        for (pos, &v) in xb.iter().enumerate() {
            if v >= -settings.feas_tol || delta[pos] >= -settings.pivot_tol {
                continue;
            }
            let ratio = v / delta[pos];
            let better = match leave {
                None => true,
                Some((r, pb)) => {
                    ratio > r + 1e-12 * r.abs().max(1.0)
                        || ((ratio - r).abs() <= 1e-12 * r.abs().max(1.0)
                            && basis.basic()[pos] < basis.basic()[pb])
                }
            };
            if better {
                leave = Some((ratio, pos));
            }
        }
        let p = match leave {
            Some((_, p)) => p,
            None => {
                return fallback_two_phase(lp, InitFlag::LimitFallback("two_phase"), work, settings)
            }
        };
        let leaving = basis.basic()[p];
        basis = basis.pivot(lp, q, leaving, settings)?;
        work += 1;
        debug_assert!(
            basis.basic_values(lp)[p] >= -10.0 * settings.feas_tol,
            "repaired row {} stayed negative",
            p
        );
    }
}

/// Output of [`algebraic_init`]: a nonsingular basis over the standardized
/// (and possibly extended) problem.
#[derive(Debug, Clone)]
pub struct AlgebraicInit {
    /// Standardized problem, with one appended zero-cost unit column per
    /// row the scan could not cover.
    pub lp: StandardLp,
    /// Mapping from the general form onto the standardized columns.
    pub map: StandardMap,
    pub basis: Basis,
    /// The appended unit columns; they carry no cost and appear in no
    /// original constraint semantics, only in the basis.
    pub pivoting_cols: Vec<usize>,
    /// Standardized rows that are linear combinations of earlier rows.
    pub redundant_rows: Vec<usize>,
}

/// Basis construction by plain linear algebra: every slack and bound-slack
/// column enters first, then decision columns are scanned in ascending
/// order and admitted when linearly independent of the picks so far, and
/// any residual deficiency (dependent rows included) is covered by
/// appended unit columns.
pub fn algebraic_init(p: &GeneralLp, settings: &Settings) -> Result<AlgebraicInit, Error> {
    let (mut c, mut a, mut b, map) = p.standard_parts();
    let m = a.rows();
    // Engine convention: nonnegative right-hand side.
    for i in 0..m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for j in 0..a.cols() {
                let v = a.get(i, j);
                if v != 0.0 {
                    a.set(i, j, -v);
                }
            }
        }
    }

    let redundant_rows = {
        let probe = StandardLp::raw(c.clone(), a.clone(), b.clone());
        probe.dependent_rows(settings.pivot_tol)
    };

    let mut tester = IndependenceTester::new(m);
    let mut basic: Vec<usize> = Vec::new();
    let mut is_slack = vec![false; map.n_std];
    for col in map.slack_cols.iter().flatten() {
        is_slack[*col] = true;
    }
    // Bound rows' slacks are the trailing columns, one per bound row.
    for k in 0..map.upper_rows.len() {
        is_slack[map.n_std - map.upper_rows.len() + k] = true;
    }
    for j in 0..map.n_std {
        if is_slack[j] {
            let added = tester.try_add(a.col(j), settings.pivot_tol);
            debug_assert!(added, "slack column {} dependent", j);
            basic.push(j);
        }
    }
    for j in 0..map.n_std {
        if basic.len() == m {
            break;
        }
        if !is_slack[j] && tester.try_add(a.col(j), settings.pivot_tol) {
            basic.push(j);
        }
    }
    let mut pivoting_cols = Vec::new();
    for r in 0..m {
        if basic.len() == m {
            break;
        }
        let mut unit = vec![0.0; m];
        unit[r] = 1.0;
        if tester.try_add(&unit, settings.pivot_tol) {
            let idx = a.push_col(&unit);
            c.push(0.0);
            basic.push(idx);
            pivoting_cols.push(idx);
        }
    }

    let lp = StandardLp::new(c, a, b, settings)?;
    let basis = Basis::new(&lp, basic, settings)?;
    Ok(AlgebraicInit { lp, map, basis, pivoting_cols, redundant_rows })
}

/// Repair walk entering against the steepest descent of the violated row:
/// pick the most negative basic value, price its inverse row over the
/// nonbasic columns, and enter the most negative price. All prices
/// nonnegative certifies infeasibility.
pub fn moa_column_rule(
    lp: &StandardLp,
    start: &Basis,
    settings: &Settings,
) -> Result<InitOutcome, Error> {
    let mut basis = start.clone();
    let mut guard = BasisGuard::new(lp.m(), lp.n());
    let mut work = 0usize;
    loop {
        match guard.check(basis.basic()) {
            GuardState::Fresh => {}
            GuardState::Revisit => {
                return fallback_two_phase(lp, InitFlag::CycleFallback("two_phase"), work, settings)
            }
            GuardState::Exhausted => {
                return fallback_two_phase(lp, InitFlag::LimitFallback("two_phase"), work, settings)
            }
        }
        let xb = basis.basic_values(lp);
        let p = match most_negative_position(&xb, basis.basic(), -settings.feas_tol) {
            None => {
                return Ok(InitOutcome::with_work(InitVerdict::PrimalFeasible(basis), work))
            }
            Some(p) => p,
        };
        let rho = engine::inverse_row(&basis, p);
        let mut best: Option<(f64, usize)> = None;
        for &j in basis.nonbasic() {
            let price = dot(&rho, lp.a.col(j));
            if price >= -settings.pivot_tol {
                continue;
            }
            let better = match best {
                None => true,
                Some((bp, jb)) => {
                    price < bp - 1e-12 * bp.abs().max(1.0)
                        || ((price - bp).abs() <= 1e-12 * bp.abs().max(1.0) && j < jb)
                }
            };
            if better {
                best = Some((price, j));
            }
        }
        match best {
            None => {
                let sigma: Vec<f64> = rho.iter().map(|&v| -v).collect();
                return Ok(InitOutcome::with_work(
                    InitVerdict::Infeasible(InfeasibleWitness::DualRay(sigma)),
                    work,
                ));
            }
            Some((_, q)) => {
                let leaving = basis.basic()[p];
                basis = basis.pivot(lp, q, leaving, settings)?;
                work += 1;
            }
        }
    }
}

/// Dual mirror of [`moa_column_rule`]: pick the most negative reduced
/// cost, and leave on the largest component of its basis direction. A
/// direction with no positive component is an improving recession ray.
pub fn moa_row_rule(
    lp: &StandardLp,
    start: &Basis,
    settings: &Settings,
) -> Result<InitOutcome, Error> {
    let mut basis = start.clone();
    let mut guard = BasisGuard::new(lp.m(), lp.n());
    let mut work = 0usize;
    loop {
        match guard.check(basis.basic()) {
            GuardState::Fresh => {}
            GuardState::Revisit => {
                return fallback_bounds(
                    lp,
                    start,
                    InitFlag::CycleFallback("artificial_bounds"),
                    work,
                    settings,
                )
            }
            GuardState::Exhausted => {
                return fallback_bounds(
                    lp,
                    start,
                    InitFlag::LimitFallback("artificial_bounds"),
                    work,
                    settings,
                )
            }
        }
        let dual = basis.dual_solution(lp);
        let mut entering: Option<usize> = None;
        for &j in basis.nonbasic() {
            if dual.s[j] >= -settings.feas_tol {
                continue;
            }
            let better = match entering {
                None => true,
                Some(jb) => {
                    dual.s[j] < dual.s[jb] - 1e-12 * dual.s[jb].abs().max(1.0)
                        || ((dual.s[j] - dual.s[jb]).abs()
                            <= 1e-12 * dual.s[jb].abs().max(1.0)
                            && j < jb)
                }
            };
            if better {
                entering = Some(j);
            }
        }
        let q = match entering {
            None => {
                return Ok(InitOutcome::with_work(InitVerdict::DualFeasible(basis), work))
            }
            Some(q) => q,
        };
        let delta = engine::entering_direction(lp, &basis, q);
        let mut leave: Option<usize> = None;
        for (pos, &d) in delta.iter().enumerate() {
            if d <= settings.pivot_tol {
                continue;
            }
            let better = match leave {
                None => true,
                Some(pb) => {
                    d > delta[pb] + 1e-12 * delta[pb].abs().max(1.0)
                        || ((d - delta[pb]).abs() <= 1e-12 * delta[pb].abs().max(1.0)
                            && basis.basic()[pos] < basis.basic()[pb])
                }
            };
            if better {
                leave = Some(pos);
            }
        }
        match leave {
            None => {
                let mut ray = vec![0.0; lp.n()];
                ray[q] = 1.0;
                for (pos, &jb) in basis.basic().iter().enumerate() {
                    ray[jb] = -delta[pos];
                }
                return Ok(InitOutcome::with_work(InitVerdict::Unbounded(ray), work));
            }
            Some(p) => {
                let leaving = basis.basic()[p];
                basis = basis.pivot(lp, q, leaving, settings)?;
                work += 1;
            }
        }
    }
}

/// Violation repair through a per-round auxiliary objective: reward raising
/// exactly the currently negative basic variables, take one engine
/// iteration whose nonnegativity guard exempts them (they block only when
/// rising through zero), and re-derive the violated set. Auxiliary prices
/// all nonnegative certifies infeasibility with the outstanding violation
/// total as evidence.
pub fn infeasibility_sum_primal(
    lp: &StandardLp,
    start: &Basis,
    settings: &Settings,
) -> Result<InitOutcome, Error> {
    let mut basis = start.clone();
    let mut work = 0usize;
    let limit = settings.iter_limit(lp.m(), lp.n());
    loop {
        let xb = basis.basic_values(lp);
        let violated: Vec<usize> = xb
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v < -settings.feas_tol)
            .map(|(pos, _)| basis.basic()[pos])
            .collect();
        if violated.is_empty() {
            return Ok(InitOutcome::with_work(InitVerdict::PrimalFeasible(basis), work));
        }
        if work >= limit {
            return fallback_two_phase(lp, InitFlag::LimitFallback("two_phase"), work, settings);
        }
        let mut c_aux = vec![0.0; lp.n()];
        for &j in &violated {
            c_aux[j] = -1.0;
        }
        let aux = StandardLp::raw(c_aux, lp.a.clone(), lp.b.clone());
        let s_bar = basis.dual_solution(&aux).s;
        let q = match engine::select_entering(&s_bar, basis.nonbasic(), PivotRule::Dantzig, settings)
        {
            None => {
                let total: f64 = xb.iter().filter(|&&v| v < -settings.feas_tol).map(|&v| -v).sum();
                return Ok(InitOutcome::with_work(
                    InitVerdict::Infeasible(InfeasibleWitness::InfeasibilitySum(total)),
                    work,
                ));
            }
            Some(q) => q,
        };
        let delta = engine::entering_direction(lp, &basis, q);
        let mut mask = vec![false; lp.n()];
        for &j in &violated {
            mask[j] = true;
        }
        match engine::primal_ratio_test(&xb, &delta, basis.basic(), Some(&mask), settings) {
            RatioOutcome::Blocked { position, .. } => {
                let leaving = basis.basic()[position];
                basis = basis.pivot(lp, q, leaving, settings)?;
                work += 1;
            }
            RatioOutcome::Unblocked => {
                // A violated variable rising through zero always blocks, so
                // an unblocked improving direction cannot arise from exact
                // data; treat it as numerical breakdown.
                return fallback_two_phase(
                    lp,
                    InitFlag::LimitFallback("two_phase"),
                    work,
                    settings,
                );
            }
        }
    }
}

/// Dual mirror of [`infeasibility_sum_primal`]: the auxiliary right-hand
/// side is the negated column sum of the dual-violated set, one modified
/// dual iteration per round. Clean prices on that auxiliary certify an
/// improving recession ray (ones on the violated set, the auxiliary values
/// on the basis).
pub fn infeasibility_sum_dual(
    lp: &StandardLp,
    start: &Basis,
    settings: &Settings,
) -> Result<InitOutcome, Error> {
    let mut basis = start.clone();
    let mut work = 0usize;
    let limit = settings.iter_limit(lp.m(), lp.n());
    loop {
        let dual = basis.dual_solution(lp);
        let violated: Vec<usize> = basis
            .nonbasic()
            .iter()
            .copied()
            .filter(|&j| dual.s[j] < -settings.feas_tol)
            .collect();
        if violated.is_empty() {
            return Ok(InitOutcome::with_work(InitVerdict::DualFeasible(basis), work));
        }
        if work >= limit {
            return fallback_bounds(
                lp,
                start,
                InitFlag::LimitFallback("artificial_bounds"),
                work,
                settings,
            );
        }
        let mut sum_col = vec![0.0; lp.m()];
        for &j in &violated {
            axpy(&mut sum_col, 1.0, lp.a.col(j));
        }
        let mut x_bar = basis
            .lu()
            .solve(&sum_col, false)
            .expect("basis factorization is nonsingular");
        for v in &mut x_bar {
            *v = -*v;
        }
        if x_bar.iter().all(|&v| v >= -settings.feas_tol) {
            let mut ray = vec![0.0; lp.n()];
            for &j in &violated {
                ray[j] = 1.0;
            }
            for (pos, &jb) in basis.basic().iter().enumerate() {
                ray[jb] = x_bar[pos];
            }
            return Ok(InitOutcome::with_work(InitVerdict::Unbounded(ray), work));
        }
        let p = most_negative_position(&x_bar, basis.basic(), -settings.feas_tol)
            .expect("some auxiliary value is negative");
        let rho = engine::inverse_row(&basis, p);
        let mut in_violated = vec![false; lp.n()];
        for &j in &violated {
            in_violated[j] = true;
        }
        // Stride limits: clean columns must keep their price nonnegative;
        // violated columns whose price is rising block at their zero
        // crossing (the leaving row guarantees at least one such riser).
        let mut best: Option<(f64, usize)> = None;
        for &j in basis.nonbasic() {
            let ds = dot(lp.a.col(j), &rho);
            let t = if in_violated[j] {
                if ds > settings.pivot_tol {
                    -dual.s[j] / ds
                } else {
                    continue;
                }
            } else if ds < -settings.pivot_tol {
                dual.s[j].max(settings.feas_tol) / -ds
            } else {
                continue;
            };
            let better = match best {
                None => true,
                Some((tb, jb)) => {
                    t < tb - 1e-12 * tb.abs().max(1.0)
                        || ((t - tb).abs() <= 1e-12 * tb.abs().max(1.0) && j < jb)
                }
            };
            if better {
                best = Some((t, j));
            }
        }
        match best {
            None => {
                return fallback_bounds(
                    lp,
                    start,
                    InitFlag::LimitFallback("artificial_bounds"),
                    work,
                    settings,
                )
            }
            Some((_, q)) => {
                let leaving = basis.basic()[p];
                basis = basis.pivot(lp, q, leaving, settings)?;
                work += 1;
            }
        }
    }
}
