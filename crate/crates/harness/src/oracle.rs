//! Exhaustive verification oracle.
//!
//! The oracle enumerates every candidate basis of a standard-form problem
//! and classifies the instance from first principles, with no shared code
//! path with the simplex engines. It is deliberately brute force: the
//! point is an independent ground truth for desk-scale instances, not a
//! solver.

use lp_core::linalg::lu_factor;
use lp_core::model::{GeneralLp, StandardLp};
use lp_core::{Error as CoreError, Settings};

use crate::Error;

/// Default limit on the number of bases the oracle will enumerate.
pub const DEFAULT_ENUM_CAP: usize = 200_000;

/// What the enumeration concluded.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleVerdict {
    /// Minimum objective over all feasible vertices, with the
    /// lexicographically first basis attaining it (0-based columns).
    Optimal { value: f64, basis: Vec<usize> },
    /// No basis produces a feasible vertex.
    Infeasible,
    /// Some feasible basis prices an entering column whose basis direction
    /// never blocks.
    Unbounded,
}

impl OracleVerdict {
    pub fn is_optimal(&self) -> bool {
        matches!(self, OracleVerdict::Optimal { .. })
    }
}

/// `C(n, m)` with saturation: anything above `limit` reports as `limit+1`.
fn binomial_capped(n: usize, m: usize, limit: u128) -> u128 {
    if m > n {
        return 0;
    }
    let k = m.min(n - m) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
        if acc > limit {
            return limit + 1;
        }
    }
    acc
}

/// Advance `subset` to the next m-combination of `{0,..,n-1}` in
/// lexicographic order; false when the last combination was reached.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let m = subset.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if subset[i] < n - m + i {
            subset[i] += 1;
            for k in i + 1..m {
                subset[k] = subset[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Classify `lp` by enumerating every m-subset of its columns.
///
/// A nonsingular subset with `x_B >= -feas_tol` is a feasible vertex; with
/// none the problem is infeasible. At any feasible vertex, a nonbasic
/// column priced below `-feas_tol` whose basis direction has no component
/// above `feas_tol` is an unblockable improving edge and certifies
/// unboundedness. Otherwise the optimum is the least vertex objective.
/// Refuses (rather than grinding) when `C(n, m)` exceeds `cap`.
pub fn oracle(lp: &StandardLp, cap: usize, settings: &Settings) -> Result<OracleVerdict, Error> {
    let m = lp.m();
    let n = lp.n();
    let combos = binomial_capped(n, m, cap as u128);
    if combos > cap as u128 {
        return Err(Error::TooLarge(format!(
            "enumerating {} columns choose {} exceeds the cap of {}",
            n, m, cap
        )));
    }

    let mut subset: Vec<usize> = (0..m).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut any_feasible = false;
    loop {
        let ab = lp.a.select_cols(&subset);
        let lu = lu_factor(&ab, settings.pivot_tol);
        if !lu.is_singular() {
            let xb = lu.solve(&lp.b, false).expect("nonsingular basis solves");
            if xb.iter().all(|&v| v >= -settings.feas_tol) {
                any_feasible = true;
                let cb: Vec<f64> = subset.iter().map(|&j| lp.c[j]).collect();
                let y = lu.solve(&cb, true).expect("nonsingular basis solves");
                for q in 0..n {
                    if subset.contains(&q) {
                        continue;
                    }
                    let col = lp.a.col(q);
                    let price: f64 = (0..m).map(|i| col[i] * y[i]).sum();
                    if lp.c[q] - price < -settings.feas_tol {
                        let dir = lu.solve(col, false).expect("nonsingular basis solves");
                        if dir.iter().all(|&v| v <= settings.feas_tol) {
                            return Ok(OracleVerdict::Unbounded);
                        }
                    }
                }
                let value: f64 = subset.iter().zip(&xb).map(|(&j, &v)| lp.c[j] * v).sum();
                let better = match &best {
                    None => true,
                    Some((bv, _)) => value < *bv,
                };
                if better {
                    best = Some((value, subset.clone()));
                }
            }
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }

    if !any_feasible {
        return Ok(OracleVerdict::Infeasible);
    }
    let (value, basis) = best.expect("a feasible vertex was recorded");
    Ok(OracleVerdict::Optimal { value, basis })
}

/// Oracle over a general-form problem: standardize, enumerate, and map the
/// optimum back to the original sense. The reported basis lives in
/// standard-form columns.
pub fn oracle_general(
    p: &GeneralLp,
    cap: usize,
    settings: &Settings,
) -> Result<OracleVerdict, Error> {
    let (lp, map) = p.to_standard_form(settings)?;
    match oracle(&lp, cap, settings)? {
        OracleVerdict::Optimal { value, basis } => {
            Ok(OracleVerdict::Optimal { value: map.restore_objective(value), basis })
        }
        other => Ok(other),
    }
}

/// Convenience wrapper: treat engine-level rank failures as hard errors
/// but keep the oracle's own refusal distinct.
pub fn oracle_or_core(lp: &StandardLp, cap: usize, settings: &Settings) -> Result<OracleVerdict, CoreError> {
    match oracle(lp, cap, settings) {
        Ok(v) => Ok(v),
        Err(Error::Core(e)) => Err(e),
        Err(e) => Err(CoreError::InvalidProblem(e.to_string())),
    }
}
