//! Starts read off the nonzero structure and the raw data of the problem:
//!
//! * [`logical_basis`] / [`logical_start`] — the identity basis over one
//!   unit ("logical") column per row, appending zero-cost units where no
//!   natural slack exists, and the phase-one continuation that turns it
//!   into a start for the original problem;
//! * [`crash_triangular`] — the count-driven scan that assembles a basis
//!   permutable to a triangle with a zero-free diagonal;
//! * [`cplex_basis`] — slacks first, then decision columns in a
//!   bound-and-cost penalty order, admitted greedily under independence
//!   and new-row coverage;
//! * [`tearing`] — permute to block lower triangular form, chase
//!   feasibility stage by stage with local residual columns, and merge
//!   stages when a later block exposes a bad earlier choice;
//! * [`cosine_criterion`] — admit columns by decreasing alignment with the
//!   right-hand side;
//! * [`fill_reducing_basis`] — singleton columns pin a diagonal block and
//!   a minimum-degree order of the column intersection graph completes it;
//! * [`basis_quality`] — sparsity / triangularity / feasibility metrics of
//!   any constructed basis.

use std::time::Duration;

use crate::engine::{self, primal_simplex, PivotRule};
use crate::error::Error;
use crate::init::artificial::{drive_out_artificials, residual_tol, AuxProblem};
use crate::init::{InitFlag, InitOutcome, InitVerdict};
use crate::linalg::{block_lower_triangularize, IndependenceTester};
use crate::mat::{dot, norm2, norm_inf, Mat};
use crate::model::{
    Basis, Certificate, FeasibilityFlags, GeneralLp, InfeasibleWitness, StandardLp, StandardMap,
};
use crate::settings::Settings;

/// Flip rows with a negative right-hand side in place (engine convention).
fn flip_negative_rows(a: &mut Mat, b: &mut [f64]) {
    for i in 0..a.rows() {
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
}

/// Shape and feasibility summary of a basis matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisQuality {
    /// Fraction of exactly-zero entries in `A_B`.
    pub sparsity: f64,
    /// Imbalance between the strictly-upper and strictly-lower nonzero
    /// counts of `A_B` in its given column order: `|z_U - z_L| /
    /// max(z_U, z_L)`, defined as `0` when both triangles are empty.
    pub triangularity: f64,
    pub feasible: FeasibilityFlags,
    pub creation_time: Duration,
}

/// Measure `basis` on `lp`; `creation_time` is carried through untouched.
pub fn basis_quality(
    lp: &StandardLp,
    basis: &Basis,
    creation_time: Duration,
    settings: &Settings,
) -> BasisQuality {
    let ab = lp.a.select_cols(basis.basic());
    let m = ab.rows();
    let sparsity = ab.zero_count() as f64 / (m * m) as f64;
    let mut z_upper = 0usize;
    let mut z_lower = 0usize;
    for i in 0..m {
        for j in 0..m {
            if ab.get(i, j) != 0.0 {
                if j > i {
                    z_upper += 1;
                } else if j < i {
                    z_lower += 1;
                }
            }
        }
    }
    let triangularity = if z_upper == 0 && z_lower == 0 {
        0.0
    } else {
        (z_upper as f64 - z_lower as f64).abs() / (z_upper.max(z_lower) as f64)
    };
    debug_assert!((0.0..=1.0).contains(&sparsity));
    debug_assert!((0.0..=1.0).contains(&triangularity));
    BasisQuality {
        sparsity,
        triangularity,
        feasible: basis.feasibility(lp, settings),
        creation_time,
    }
}

/// Live nonzero counts over the active part of a sparsity pattern.
///
/// Rows and columns deactivate as a crash scan consumes them; the stored
/// counts always equal a recount of the active submatrix (checked by
/// [`CountState::consistent`], asserted after every mutation in debug
/// builds).
#[derive(Debug, Clone)]
pub struct CountState {
    /// Structurally nonzero column positions, per row.
    row_pattern: Vec<Vec<usize>>,
    /// Structurally nonzero rows, per column position.
    col_pattern: Vec<Vec<usize>>,
    row_count: Vec<usize>,
    col_count: Vec<usize>,
    row_active: Vec<bool>,
    col_active: Vec<bool>,
}

impl CountState {
    /// Counts over the pattern of `a` restricted to `cols`; entries of
    /// magnitude at most `zero_tol` are structural zeros. Column
    /// identifiers used by the other methods are positions into `cols`.
    pub fn new(a: &Mat, cols: &[usize], zero_tol: f64) -> CountState {
        let m = a.rows();
        let mut row_pattern: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut col_pattern: Vec<Vec<usize>> = vec![Vec::new(); cols.len()];
        for (k, &j) in cols.iter().enumerate() {
            for i in 0..m {
                if a.get(i, j).abs() > zero_tol {
                    row_pattern[i].push(k);
                    col_pattern[k].push(i);
                }
            }
        }
        let row_count = row_pattern.iter().map(Vec::len).collect();
        let col_count = col_pattern.iter().map(Vec::len).collect();
        CountState {
            row_pattern,
            col_pattern,
            row_count,
            col_count,
            row_active: vec![true; m],
            col_active: vec![true; cols.len()],
        }
    }

    pub fn row_counts(&self) -> &[usize] {
        &self.row_count
    }

    pub fn col_counts(&self) -> &[usize] {
        &self.col_count
    }

    pub fn is_row_active(&self, row: usize) -> bool {
        self.row_active[row]
    }

    pub fn is_col_active(&self, col: usize) -> bool {
        self.col_active[col]
    }

    /// Active row with the fewest active nonzeros, skipping empty rows;
    /// ties go to the lowest row.
    pub fn min_count_row(&self) -> Option<usize> {
        (0..self.row_count.len())
            .filter(|&i| self.row_active[i] && self.row_count[i] > 0)
            .min_by_key(|&i| (self.row_count[i], i))
    }

    /// Among active columns with a nonzero in `row` that satisfy `keep`,
    /// the one with the fewest active nonzeros; ties go to the lowest
    /// column position.
    pub fn min_count_col_in_row(&self, row: usize, keep: &dyn Fn(usize) -> bool) -> Option<usize> {
        self.row_pattern[row]
            .iter()
            .copied()
            .filter(|&k| self.col_active[k] && keep(k))
            .min_by_key(|&k| (self.col_count[k], k))
    }

    /// Active column positions with a nonzero in `row`.
    pub fn active_cols_in_row(&self, row: usize) -> Vec<usize> {
        self.row_pattern[row].iter().copied().filter(|&k| self.col_active[k]).collect()
    }

    /// Deactivate `row`, decrementing the counts of its active columns.
    pub fn remove_row(&mut self, row: usize) {
        if !self.row_active[row] {
            return;
        }
        self.row_active[row] = false;
        for &k in &self.row_pattern[row] {
            if self.col_active[k] {
                self.col_count[k] -= 1;
            }
        }
    }

    /// Deactivate column `col`, decrementing the counts of its active rows.
    pub fn remove_col(&mut self, col: usize) {
        if !self.col_active[col] {
            return;
        }
        self.col_active[col] = false;
        for &i in &self.col_pattern[col] {
            if self.row_active[i] {
                self.row_count[i] -= 1;
            }
        }
    }

    /// True when the stored counts equal a recount of the active submatrix.
    pub fn consistent(&self) -> bool {
        let rows_ok = (0..self.row_count.len()).all(|i| {
            !self.row_active[i]
                || self.row_pattern[i].iter().filter(|&&k| self.col_active[k]).count()
                    == self.row_count[i]
        });
        let cols_ok = (0..self.col_count.len()).all(|k| {
            !self.col_active[k]
                || self.col_pattern[k].iter().filter(|&&i| self.row_active[i]).count()
                    == self.col_count[k]
        });
        rows_ok && cols_ok
    }
}

/// A standardized problem in which every row owns a `+1` unit ("logical")
/// column, plus the identity basis over those columns.
#[derive(Debug, Clone)]
pub struct LogicalBasis {
    /// Standardized problem, extended with one appended zero-cost unit
    /// column per row that had no natural `+1` slack.
    pub lp: StandardLp,
    pub map: StandardMap,
    /// Basis over the logical columns in row order; `A_B` is exactly the
    /// identity, so its starting values are `b` itself.
    pub basis: Basis,
    /// Per row, its logical column.
    pub logicals: Vec<usize>,
    /// The appended subset of `logicals` (rows whose relation or sign flip
    /// left no `+1` slack); these columns are not part of the original
    /// problem and carry its constraint residual.
    pub artificial: Vec<usize>,
}

impl LogicalBasis {
    /// True when the identity start is feasible for the embedded original
    /// problem: every appended column carries a (tolerance-level) zero.
    pub fn feasible_for_original(&self, settings: &Settings) -> bool {
        let tol = residual_tol(&self.lp, settings);
        (0..self.lp.m()).all(|row| self.logicals[row] < self.map.n_std || self.lp.b[row] <= tol)
    }
}

/// Identity start: standardize, flip negative right-hand sides, take each
/// row's `+1` slack where one exists, and append a zero-cost unit column
/// for every other row.
pub fn logical_basis(p: &GeneralLp, settings: &Settings) -> Result<LogicalBasis, Error> {
    let (mut c, mut a, mut b, map) = p.standard_parts();
    let m = a.rows();
    flip_negative_rows(&mut a, &mut b);

    // Natural logicals: slack columns whose post-flip coefficient is +1.
    let mut natural: Vec<Option<usize>> = vec![None; m];
    for (row, col) in map.slack_cols.iter().enumerate() {
        if let Some(col) = *col {
            if a.get(row, col) == 1.0 {
                natural[row] = Some(col);
            }
        }
    }
    // Bound rows always carry a +1 slack: their right-hand side (the bound
    // width) is nonnegative, so the row is never flipped.
    for (k, &(_, row)) in map.upper_rows.iter().enumerate() {
        let col = map.n_std - map.upper_rows.len() + k;
        debug_assert_eq!(a.get(row, col), 1.0);
        natural[row] = Some(col);
    }

    let mut artificial = Vec::new();
    let logicals: Vec<usize> = (0..m)
        .map(|row| {
            natural[row].unwrap_or_else(|| {
                let mut unit = vec![0.0; m];
                unit[row] = 1.0;
                let idx = a.push_col(&unit);
                c.push(0.0);
                artificial.push(idx);
                idx
            })
        })
        .collect();

    let lp = StandardLp::new(c, a, b, settings)?;
    let basis = Basis::new(&lp, logicals.clone(), settings)?;
    Ok(LogicalBasis { lp, map, basis, logicals, artificial })
}

/// A logical start resolved against the original problem.
#[derive(Debug, Clone)]
pub struct LogicalStart {
    /// The problem the outcome's basis belongs to: the standardized
    /// original, with any redundant rows dropped.
    pub lp: StandardLp,
    pub map: StandardMap,
    pub outcome: InitOutcome,
}

/// Carry the identity start to the original problem: when appended columns
/// hold residual, minimize their total from the identity basis, then drive
/// them out; rows whose appended column cannot leave the basis are
/// redundant and are dropped.
pub fn logical_start(p: &GeneralLp, settings: &Settings) -> Result<LogicalStart, Error> {
    let built = logical_basis(p, settings)?;
    let original_n = built.map.n_std;
    if built.artificial.is_empty() {
        // Nothing was appended: the identity basis is feasible outright.
        let outcome = InitOutcome::new(InitVerdict::PrimalFeasible(built.basis));
        return Ok(LogicalStart { lp: built.lp, map: built.map, outcome });
    }

    // The embedded original problem (same rows, appended columns cut).
    let keep: Vec<usize> = (0..original_n).collect();
    let embedded = StandardLp::raw(
        built.lp.c[..original_n].to_vec(),
        built.lp.a.select_cols(&keep),
        built.lp.b.clone(),
    );

    // Phase one: minimize the total appended mass from the identity start.
    let mut aux_c = vec![0.0; built.lp.n()];
    for &j in &built.artificial {
        aux_c[j] = 1.0;
    }
    let aux = AuxProblem {
        lp: StandardLp::raw(aux_c, built.lp.a.clone(), built.lp.b.clone()),
        artificials: built.artificial.clone(),
        original_n,
    };
    let result = primal_simplex(&aux.lp, built.basis, PivotRule::Dantzig, None, settings)?;
    let mut work = result.iterations;
    match result.certificate {
        Certificate::Optimal => {}
        Certificate::IterationLimit => {
            let outcome = InitOutcome::with_work(InitVerdict::Stalled, work);
            return Ok(LogicalStart { lp: embedded, map: built.map, outcome });
        }
        _ => {
            return Err(Error::InvalidProblem(
                "feasibility auxiliary reported an impossible certificate".into(),
            ))
        }
    }
    let phase1 = result.primal.objective;
    if phase1 > residual_tol(&embedded, settings) {
        let outcome = InitOutcome::with_work(
            InitVerdict::Infeasible(InfeasibleWitness::PhaseOneOptimum(phase1)),
            work,
        );
        return Ok(LogicalStart { lp: embedded, map: built.map, outcome });
    }

    let (drained, redundant, pivots) = drive_out_artificials(&aux, result.basis, settings)?;
    work += pivots;
    if redundant.is_empty() {
        let basis = Basis::new(&embedded, drained.basic().to_vec(), settings)?;
        let outcome = InitOutcome::with_work(InitVerdict::PrimalFeasible(basis), work);
        return Ok(LogicalStart { lp: embedded, map: built.map, outcome });
    }

    // A stuck appended column certifies that its row is a combination of
    // the others; with the phase-one residual at zero those rows are
    // implied by the rest, so drop them along with their columns.
    let mut dropped_rows: Vec<usize> = redundant
        .iter()
        .map(|&pos| {
            let col = drained.basic()[pos];
            debug_assert!(col >= original_n);
            built.logicals.iter().position(|&l| l == col).expect("appended column covers one row")
        })
        .collect();
    dropped_rows.sort_unstable();
    let keep_rows: Vec<usize> =
        (0..built.lp.m()).filter(|r| !dropped_rows.contains(r)).collect();
    let reduced = StandardLp::new(
        embedded.c.clone(),
        embedded.a.select_rows(&keep_rows),
        keep_rows.iter().map(|&r| embedded.b[r]).collect(),
        settings,
    )?;
    // Bound rows own a unique slack, so they can never be dependent; only
    // original rows shift positions.
    let mut map = built.map;
    for entry in &mut map.upper_rows {
        debug_assert!(!dropped_rows.contains(&entry.1));
        entry.1 -= dropped_rows.iter().filter(|&&r| r < entry.1).count();
    }
    let basic: Vec<usize> =
        drained.basic().iter().copied().filter(|&j| j < original_n).collect();
    let basis = Basis::new(&reduced, basic, settings)?;
    let outcome = InitOutcome::with_work(InitVerdict::PrimalFeasible(basis), work)
        .flag(InitFlag::RedundantRows(dropped_rows));
    Ok(LogicalStart { lp: reduced, map, outcome })
}

/// Which triangle a crash scan aims for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Pivot rows are chosen first (minimum row count); columns touching
    /// an earlier pivot row are excluded, so later columns avoid earlier
    /// rows and the picks form a lower triangle.
    Lower,
    /// The transposed scan: pivot columns are chosen first and rows
    /// touching an earlier pivot column are excluded, giving an upper
    /// triangle.
    Upper,
}

/// Count-driven triangular crash.
///
/// Per row, one unit column (preferring `+1` coefficients, then the
/// rightmost — slacks and appended logicals live at the end) is set aside
/// as the row's logical; the scan runs over everything else, repeatedly
/// picking the minimum-count row, then the minimum-count eligible column
/// in it, and excluding every column that touches the pivot row. Rows the
/// scan never reaches are covered by their logical, and rows with no unit
/// column at all by the first remaining independent columns (reported via
/// [`InitFlag::CompletedOutsideRule`]).
///
/// With `prefer_feasible` set, positive pivot entries are preferred at the
/// column choice: with a nonnegative right-hand side they pull the
/// triangular solve toward nonnegative basic values (a heuristic, not a
/// guarantee).
pub fn crash_triangular(
    lp: &StandardLp,
    orientation: Orientation,
    prefer_feasible: bool,
    settings: &Settings,
) -> Result<InitOutcome, Error> {
    let m = lp.m();
    let n = lp.n();
    let tol = settings.pivot_tol;

    // Designate one unit column per row as its logical.
    let mut designated: Vec<Option<(usize, bool)>> = vec![None; m]; // (col, is_plus_one)
    for j in 0..n {
        let col = lp.a.col(j);
        let nz: Vec<usize> = (0..m).filter(|&i| col[i].abs() > tol).collect();
        if let [row] = nz[..] {
            let plus = col[row] == 1.0;
            let better = match designated[row] {
                None => true,
                Some((cur, cur_plus)) => {
                    (plus && !cur_plus) || (plus == cur_plus && j > cur)
                }
            };
            if better {
                designated[row] = Some((j, plus));
            }
        }
    }
    let mut is_logical = vec![false; n];
    for d in designated.iter().flatten() {
        is_logical[d.0] = true;
    }
    let pool: Vec<usize> = (0..n).filter(|&j| !is_logical[j]).collect();

    // The scan, in lower-orientation vocabulary; for the upper orientation
    // the roles of rows and columns swap.
    let mut picks: Vec<(usize, usize)> = Vec::new(); // (row, col), real coordinates
    match orientation {
        Orientation::Lower => {
            let mut state = CountState::new(&lp.a, &pool, tol);
            while let Some(pr) = state.min_count_row() {
                let keep_sign = |k: usize| lp.a.get(pr, pool[k]) > tol;
                let pc = if prefer_feasible {
                    state
                        .min_count_col_in_row(pr, &keep_sign)
                        .or_else(|| state.min_count_col_in_row(pr, &|_| true))
                } else {
                    state.min_count_col_in_row(pr, &|_| true)
                }
                .expect("a minimum-count row has an eligible column");
                picks.push((pr, pool[pc]));
                for k in state.active_cols_in_row(pr) {
                    state.remove_col(k);
                }
                state.remove_row(pr);
                debug_assert!(state.consistent());
            }
            // Later picks avoid earlier pivot rows.
            for (s, &(r, _)) in picks.iter().enumerate() {
                for &(_, c) in picks.iter().skip(s + 1) {
                    debug_assert!(lp.a.get(r, c).abs() <= tol);
                }
            }
        }
        Orientation::Upper => {
            let transposed = lp.a.transpose().select_rows(&pool);
            let all_rows: Vec<usize> = (0..m).collect();
            let mut state = CountState::new(&transposed, &all_rows, tol);
            while let Some(sc) = state.min_count_row() {
                let keep_sign = |k: usize| lp.a.get(k, pool[sc]) > tol;
                let sr = if prefer_feasible {
                    state
                        .min_count_col_in_row(sc, &keep_sign)
                        .or_else(|| state.min_count_col_in_row(sc, &|_| true))
                } else {
                    state.min_count_col_in_row(sc, &|_| true)
                }
                .expect("a minimum-count column has an eligible row");
                picks.push((sr, pool[sc]));
                for k in state.active_cols_in_row(sc) {
                    state.remove_col(k);
                }
                state.remove_row(sc);
                debug_assert!(state.consistent());
            }
            // Earlier picks' columns avoid later pivot rows.
            for (s, &(_, c)) in picks.iter().enumerate() {
                for &(r, _) in picks.iter().skip(s + 1) {
                    debug_assert!(lp.a.get(r, c).abs() <= tol);
                }
            }
        }
    }

    // Assemble: picked columns in scan order, logicals for unreached rows,
    // then independent leftovers for rows with no logical either.
    let mut tester = IndependenceTester::new(m);
    let mut basic: Vec<usize> = Vec::new();
    let mut row_taken = vec![false; m];
    for &(r, c) in &picks {
        let added = tester.try_add(lp.a.col(c), tol);
        debug_assert!(added, "scan pick {} lost independence", c);
        basic.push(c);
        row_taken[r] = true;
    }
    for row in 0..m {
        if !row_taken[row] {
            if let Some((col, _)) = designated[row] {
                let added = tester.try_add(lp.a.col(col), tol);
                debug_assert!(added, "logical column {} lost independence", col);
                basic.push(col);
                row_taken[row] = true;
            }
        }
    }
    let mut outside = 0usize;
    for j in 0..n {
        if basic.len() == m {
            break;
        }
        if !basic.contains(&j) && tester.try_add(lp.a.col(j), tol) {
            basic.push(j);
            outside += 1;
        }
    }

    let basis = Basis::new(lp, basic, settings)?;
    let mut outcome = InitOutcome::new(InitVerdict::Structural(basis));
    if outside > 0 {
        outcome = outcome.flag(InitFlag::CompletedOutsideRule(outside));
    }
    Ok(outcome)
}

/// Preference-ordered greedy basis over the standardized problem.
#[derive(Debug, Clone)]
pub struct CplexBasis {
    /// Standardized problem, extended with one appended zero-cost unit
    /// column per row no admissible column covered.
    pub lp: StandardLp,
    pub map: StandardMap,
    pub basis: Basis,
    /// The appended unit columns.
    pub artificial: Vec<usize>,
    /// Decision variables in preference order (original indices): free
    /// variables first, then single-bounded, then double-bounded, each
    /// class ascending by penalty.
    pub order: Vec<usize>,
    /// Penalty per original variable (bound term plus scaled cost).
    pub penalty: Vec<f64>,
    /// Admissions outside the preference rule: appended units plus any
    /// final completion sweeps.
    pub outside_rule: usize,
}

/// Bound class of a decision variable, in preference order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum BoundClass {
    Free,
    Single,
    Double,
}

fn bound_class(l: f64, u: f64) -> BoundClass {
    match (l.is_finite(), u.is_finite()) {
        (false, false) => BoundClass::Free,
        (true, true) => BoundClass::Double,
        _ => BoundClass::Single,
    }
}

/// Slack-first greedy basis with a penalty-ordered decision pass.
///
/// Slack columns (including bound-row slacks) are admitted first. Decision
/// variables follow, ordered free < single-bounded < double-bounded and
/// within each class ascending by `q_j = q̄_j + c_j / c_max`, where `q̄_j`
/// is `0` for free variables, `l_j` (or `-u_j`) for single bounds,
/// `l_j - u_j` for double bounds, and `c_max` is `1000 * max|c|` (or `1`
/// when all costs vanish). A column is admitted when it is independent of
/// the picks so far and covers a not-yet-covered row (its largest-entry
/// uncovered row becomes covered). Rows left over get appended zero-cost
/// unit columns, counted in `outside_rule` together with any completion
/// sweeps.
pub fn cplex_basis(p: &GeneralLp, settings: &Settings) -> Result<CplexBasis, Error> {
    let n = p.n();
    let sign = match p.sense {
        crate::model::Sense::Minimize => 1.0,
        crate::model::Sense::Maximize => -1.0,
    };

    // Penalties on the original variables, in the minimized orientation.
    let c_abs_max = p.c.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let c_max = if c_abs_max != 0.0 { 1000.0 * c_abs_max } else { 1.0 };
    let mut penalty = vec![0.0; n];
    let mut class = vec![BoundClass::Free; n];
    for j in 0..n {
        let (l, u) = (p.lower[j], p.upper[j]);
        class[j] = bound_class(l, u);
        let q_bar = match class[j] {
            BoundClass::Free => 0.0,
            BoundClass::Single => {
                if u.is_finite() {
                    -u
                } else {
                    l
                }
            }
            BoundClass::Double => l - u,
        };
        penalty[j] = q_bar + sign * p.c[j] / c_max;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        class[x]
            .cmp(&class[y])
            .then(penalty[x].partial_cmp(&penalty[y]).unwrap())
            .then(x.cmp(&y))
    });

    let (mut c, mut a, mut b, map) = p.standard_parts();
    flip_negative_rows(&mut a, &mut b);
    let m = a.rows();
    let tol = settings.pivot_tol;

    let mut tester = IndependenceTester::new(m);
    let mut covered = vec![false; m];
    let mut basic: Vec<usize> = Vec::new();
    let admit = |col: usize,
                     a: &Mat,
                     tester: &mut IndependenceTester,
                     covered: &mut Vec<bool>,
                     basic: &mut Vec<usize>|
     -> bool {
        let column = a.col(col);
        let pivot = (0..m)
            .filter(|&i| !covered[i] && column[i].abs() > tol)
            .max_by(|&x, &y| column[x].abs().partial_cmp(&column[y].abs()).unwrap());
        let pivot = match pivot {
            Some(i) => i,
            None => return false,
        };
        if !tester.try_add(column, tol) {
            return false;
        }
        covered[pivot] = true;
        basic.push(col);
        true
    };

    // Slacks first: inequality-row slacks, then bound-row slacks.
    let mut slack_sequence: Vec<usize> = map.slack_cols.iter().flatten().copied().collect();
    for k in 0..map.upper_rows.len() {
        slack_sequence.push(map.n_std - map.upper_rows.len() + k);
    }
    for &col in &slack_sequence {
        if basic.len() == m {
            break;
        }
        admit(col, &a, &mut tester, &mut covered, &mut basic);
    }
    // Decision variables in preference order.
    for &var in &order {
        if basic.len() == m {
            break;
        }
        let col = match map.vars[var] {
            crate::model::VarMap::Shift { col, .. } => col,
            crate::model::VarMap::Mirror { col, .. } => col,
            crate::model::VarMap::Split { pos, .. } => pos,
        };
        if admit(col, &a, &mut tester, &mut covered, &mut basic) {
            // No admissible earlier-class candidate may remain: coverage
            // and independence only shrink as the basis grows.
            #[cfg(debug_assertions)]
            for &earlier in order.iter().take_while(|&&e| e != var) {
                let ecol = match map.vars[earlier] {
                    crate::model::VarMap::Shift { col, .. } => col,
                    crate::model::VarMap::Mirror { col, .. } => col,
                    crate::model::VarMap::Split { pos, .. } => pos,
                };
                if basic.contains(&ecol) {
                    continue;
                }
                let column = a.col(ecol);
                let covers = (0..m).any(|i| !covered[i] && column[i].abs() > tol);
                debug_assert!(
                    !(covers && tester.residual_norm(column) > tol),
                    "column {} of an earlier class is still admissible",
                    ecol
                );
            }
        }
    }

    // Uncovered rows get appended zero-cost units.
    let mut artificial = Vec::new();
    for row in 0..m {
        if basic.len() == m {
            break;
        }
        if covered[row] {
            continue;
        }
        let mut unit = vec![0.0; m];
        unit[row] = 1.0;
        if tester.try_add(&unit, tol) {
            let idx = a.push_col(&unit);
            c.push(0.0);
            covered[row] = true;
            basic.push(idx);
            artificial.push(idx);
        }
    }
    // Units can be rejected when the earlier picks already span their row
    // coordinate; finish with a plain completion sweep.
    let mut sweeps = 0usize;
    for j in 0..a.cols() {
        if basic.len() == m {
            break;
        }
        if !basic.contains(&j) && tester.try_add(a.col(j), tol) {
            basic.push(j);
            sweeps += 1;
        }
    }
    let outside_rule = artificial.len() + sweeps;

    let lp = StandardLp::new(c, a, b, settings)?;
    let basis = Basis::new(&lp, basic, settings)?;
    Ok(CplexBasis { lp, map, basis, artificial, order, penalty, outside_rule })
}

/// Bookkeeping of a staged feasibility construction.
#[derive(Debug, Clone)]
pub struct TearingOutcome {
    /// The basis (on the *original* problem) and its verdict: feasible
    /// when every stage cleared its residual, structural otherwise.
    pub outcome: InitOutcome,
    /// Total residual mass left across all stages at assembly time.
    pub residual: f64,
    /// Diagonal stages processed (after merges).
    pub stages: usize,
    /// Backtracking merges executed.
    pub merges: usize,
}

struct StageSolution {
    /// Values of the stage's decision columns (real ids).
    x: Vec<(usize, f64)>,
    /// Basic columns in master terms.
    basic: Vec<MasterCol>,
    residual: f64,
    /// Scale of the stage right-hand side, for the residual tolerance.
    rhs_scale: f64,
    iterations: usize,
}

#[derive(Debug, Clone, Copy)]
enum MasterCol {
    Orig(usize),
    Unit { row: usize, sign: f64 },
}

struct StageResult {
    rows: Vec<usize>,
    x: Vec<(usize, f64)>,
    basic: Vec<MasterCol>,
    residual: f64,
}

/// Minimize the residual of one stage given the values fixed so far.
fn solve_stage(
    lp: &StandardLp,
    rows: &[usize],
    cols: &[usize],
    xhat: &[f64],
    settings: &Settings,
) -> Result<StageSolution, Error> {
    let mk = rows.len();
    let nk = cols.len();
    let rhs: Vec<f64> = rows.iter().map(|&r| lp.b[r] - dot(&lp.a.row(r), xhat)).collect();
    let mut a_sub = Mat::zeros(mk, nk + 2 * mk);
    for (kc, &c) in cols.iter().enumerate() {
        for (kr, &r) in rows.iter().enumerate() {
            a_sub.set(kr, kc, lp.a.get(r, c));
        }
    }
    for i in 0..mk {
        a_sub.set(i, nk + i, 1.0);
        a_sub.set(i, nk + mk + i, -1.0);
    }
    let mut c_sub = vec![0.0; nk];
    c_sub.extend(std::iter::repeat(1.0).take(2 * mk));
    let rhs_scale = norm_inf(&rhs);
    // The constructor flips negative rows, turning the -1 residual column
    // into the row's +1 unit; the start picks whichever is +1 after that.
    let sub = StandardLp::new(c_sub, a_sub, rhs.clone(), settings)?;
    let basic0: Vec<usize> =
        (0..mk).map(|i| if rhs[i] >= 0.0 { nk + i } else { nk + mk + i }).collect();
    let start = Basis::new(&sub, basic0, settings)?;
    let result = primal_simplex(&sub, start, PivotRule::Dantzig, None, settings)?;
    match result.certificate {
        Certificate::Optimal | Certificate::IterationLimit => {}
        _ => {
            return Err(Error::InvalidProblem(
                "stage residual problem reported an impossible certificate".into(),
            ))
        }
    }
    let xs = &result.primal.x;
    let residual: f64 = xs[nk..].iter().sum();
    let x = (0..nk).map(|kc| (cols[kc], xs[kc])).collect();
    let basic = result
        .basis
        .basic()
        .iter()
        .map(|&sj| {
            if sj < nk {
                MasterCol::Orig(cols[sj])
            } else if sj < nk + mk {
                MasterCol::Unit { row: rows[sj - nk], sign: 1.0 }
            } else {
                MasterCol::Unit { row: rows[sj - nk - mk], sign: -1.0 }
            }
        })
        .collect();
    Ok(StageSolution { x, basic, residual, rhs_scale, iterations: result.iterations })
}

/// Staged feasibility construction over the block lower triangular form.
///
/// Each diagonal block is solved as a small residual-minimization problem
/// given the values fixed by earlier stages. When a stage keeps residual,
/// the longest tail of finished stages whose combined row count stays
/// within `t` is merged with it and re-solved. Residual columns still
/// basic at the end are pivoted out: degenerate swaps for zero-level ones,
/// and point-moving swaps (counted in [`InitFlag::CompletedOutsideRule`])
/// for the rest. The verdict claims feasibility only when the total
/// residual cleared and the final basis checks out.
pub fn tearing(lp: &StandardLp, t: usize, settings: &Settings) -> Result<TearingOutcome, Error> {
    let m = lp.m();
    let n = lp.n();
    let bs = block_lower_triangularize(&lp.a, settings.pivot_tol);

    let mut pending: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for k in 0..bs.block_count() {
        let rows: Vec<usize> = bs.row_range(k).map(|i| bs.row_perm[i]).collect();
        let cols: Vec<usize> = bs.col_range(k).map(|i| bs.col_perm[i]).collect();
        if !rows.is_empty() {
            pending.push((rows, cols));
        }
    }
    let trailing_rows: Vec<usize> =
        bs.row_range(bs.block_count()).map(|i| bs.row_perm[i]).collect();

    let mut done: Vec<StageResult> = Vec::new();
    let mut xhat = vec![0.0; n];
    let mut merges = 0usize;
    let mut work = 0usize;
    for (mut rows, mut cols) in pending {
        let mut sol = solve_stage(lp, &rows, &cols, &xhat, settings)?;
        work += sol.iterations;
        let stage_tol = settings.feas_tol * (1.0 + sol.rhs_scale);
        if sol.residual > stage_tol && !done.is_empty() {
            // Merge the longest tail of finished stages that fits in `t`.
            let mut take = 0usize;
            let mut total = rows.len();
            while take < done.len() && total + done[done.len() - 1 - take].rows.len() <= t {
                total += done[done.len() - 1 - take].rows.len();
                take += 1;
            }
            if take > 0 {
                merges += 1;
                let mut merged_rows = Vec::new();
                let mut merged_cols = Vec::new();
                for popped in done.drain(done.len() - take..) {
                    for &(c, _) in &popped.x {
                        xhat[c] = 0.0;
                        merged_cols.push(c);
                    }
                    merged_rows.extend(popped.rows);
                }
                merged_rows.extend(rows);
                merged_cols.extend(cols);
                rows = merged_rows;
                cols = merged_cols;
                sol = solve_stage(lp, &rows, &cols, &xhat, settings)?;
                work += sol.iterations;
            }
        }
        for &(c, v) in &sol.x {
            xhat[c] = v;
        }
        done.push(StageResult { rows, x: sol.x, basic: sol.basic, residual: sol.residual });
    }

    // Rows outside every diagonal block carry whatever residual is left.
    let mut trailing_residual = 0.0;
    let mut master: Vec<MasterCol> = done.iter().flat_map(|s| s.basic.iter().copied()).collect();
    for &r in &trailing_rows {
        let leftover = lp.b[r] - dot(&lp.a.row(r), &xhat);
        trailing_residual += leftover.abs();
        master.push(MasterCol::Unit { row: r, sign: if leftover >= 0.0 { 1.0 } else { -1.0 } });
    }
    debug_assert_eq!(master.len(), m);
    let residual: f64 = done.iter().map(|s| s.residual).sum::<f64>() + trailing_residual;

    // Assemble the extended problem and pivot the residual units out.
    let mut ext_a = lp.a.clone();
    let mut ext_c = lp.c.clone();
    let mut basic_ids = Vec::with_capacity(m);
    for mc in &master {
        match *mc {
            MasterCol::Orig(j) => basic_ids.push(j),
            MasterCol::Unit { row, sign } => {
                let mut unit = vec![0.0; m];
                unit[row] = sign;
                let idx = ext_a.push_col(&unit);
                ext_c.push(0.0);
                basic_ids.push(idx);
            }
        }
    }
    let ext = StandardLp::raw(ext_c, ext_a, lp.b.clone());
    let mut basis = Basis::new(&ext, basic_ids, settings)?;
    let mut outside = 0usize;
    loop {
        let target = basis.basic().iter().position(|&j| j >= n);
        let pos = match target {
            Some(pos) => pos,
            None => break,
        };
        let leaving = basis.basic()[pos];
        let level = basis.basic_values(&ext)[pos].abs();
        let rho = engine::inverse_row(&basis, pos);
        let entering = (0..n)
            .filter(|&j| !basis.is_basic(j))
            .find(|&j| dot(&rho, lp.a.col(j)).abs() > settings.pivot_tol);
        match entering {
            Some(j) => {
                basis = basis.pivot(&ext, j, leaving, settings)?;
                work += 1;
                if level > settings.feas_tol {
                    outside += 1;
                }
            }
            None => {
                let rows =
                    (0..m).filter(|&i| rho[i].abs() > settings.pivot_tol).collect();
                return Err(Error::RankDeficient { dependent_rows: rows });
            }
        }
    }
    let final_basis = Basis::new(lp, basis.basic().to_vec(), settings)?;

    let verdict = if residual <= residual_tol(lp, settings)
        && outside == 0
        && final_basis.feasibility(lp, settings).primal
    {
        InitVerdict::PrimalFeasible(final_basis)
    } else {
        InitVerdict::Structural(final_basis)
    };
    let mut outcome = InitOutcome::with_work(verdict, work);
    if outside > 0 {
        outcome = outcome.flag(InitFlag::CompletedOutsideRule(outside));
    }
    Ok(TearingOutcome { outcome, residual, stages: done.len(), merges })
}

/// Angle-driven basis: admit columns by decreasing alignment of `A_j`
/// with `b`, subject to incremental independence.
///
/// The score `(A_j'b) / ||A_j||` is proportional to the cosine of the
/// angle between the column (a constraint of the dual) and the right-hand
/// side (the dual objective); the admitted vertex tends to sit near the
/// optimal one. No feasibility claim is made.
pub fn cosine_criterion(lp: &StandardLp, settings: &Settings) -> Result<InitOutcome, Error> {
    if norm_inf(&lp.b) == 0.0 {
        return Err(Error::InvalidProblem(
            "the angle criterion needs a nonzero right-hand side".into(),
        ));
    }
    let m = lp.m();
    let mut scored: Vec<(f64, usize)> = (0..lp.n())
        .filter_map(|j| {
            let col = lp.a.col(j);
            let norm = norm2(col);
            if norm <= settings.pivot_tol {
                None
            } else {
                Some((dot(col, &lp.b) / norm, j))
            }
        })
        .collect();
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));

    let mut tester = IndependenceTester::new(m);
    let mut basic = Vec::with_capacity(m);
    for &(_, j) in &scored {
        if basic.len() == m {
            break;
        }
        if tester.try_add(lp.a.col(j), settings.pivot_tol) {
            basic.push(j);
        }
    }
    if basic.len() < m {
        return Err(Error::InvalidProblem(
            "columns span fewer dimensions than there are rows".into(),
        ));
    }
    let basis = Basis::new(lp, basic, settings)?;
    Ok(InitOutcome::new(InitVerdict::Structural(basis)))
}

/// Minimum-degree elimination order of an undirected graph given by
/// adjacency sets; eliminating a vertex joins its neighbors into a clique.
/// Ties go to the lowest vertex.
fn minimum_degree_order(mut adj: Vec<std::collections::BTreeSet<usize>>) -> Vec<usize> {
    let k = adj.len();
    let mut alive = vec![true; k];
    let mut order = Vec::with_capacity(k);
    for _ in 0..k {
        let v = (0..k)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (adj[v].len(), v))
            .expect("an alive vertex remains");
        order.push(v);
        alive[v] = false;
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for &x in &nbrs {
            adj[x].remove(&v);
        }
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in nbrs.iter().skip(i + 1) {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
    }
    order
}

/// Sparsity-first basis: singleton columns pin a diagonal block, and the
/// remaining rows are covered in a minimum-degree order of the column
/// intersection graph restricted to them.
pub fn fill_reducing_basis(lp: &StandardLp, settings: &Settings) -> Result<InitOutcome, Error> {
    let m = lp.m();
    let n = lp.n();
    let tol = settings.pivot_tol;

    // Per row, the singleton column with the largest pivot entry.
    let mut diag: Vec<Option<usize>> = vec![None; m];
    for j in 0..n {
        let col = lp.a.col(j);
        let nz: Vec<usize> = (0..m).filter(|&i| col[i].abs() > tol).collect();
        if let [row] = nz[..] {
            let better = match diag[row] {
                None => true,
                Some(cur) => lp.a.get(row, cur).abs() < col[row].abs(),
            };
            if better {
                diag[row] = Some(j);
            }
        }
    }
    let mut tester = IndependenceTester::new(m);
    let mut basic: Vec<usize> = Vec::new();
    let mut covered = vec![false; m];
    for row in 0..m {
        if let Some(j) = diag[row] {
            let added = tester.try_add(lp.a.col(j), tol);
            debug_assert!(added, "singleton columns on distinct rows are independent");
            basic.push(j);
            covered[row] = true;
        }
    }

    if basic.len() < m {
        // Remaining columns with support in the uncovered rows, ordered by
        // minimum degree of their intersection graph there.
        let in_diag: Vec<bool> = {
            let mut v = vec![false; n];
            for &j in &basic {
                v[j] = true;
            }
            v
        };
        let remaining: Vec<usize> = (0..n)
            .filter(|&j| {
                !in_diag[j] && (0..m).any(|i| !covered[i] && lp.a.get(i, j).abs() > tol)
            })
            .collect();
        let mut adj = vec![std::collections::BTreeSet::new(); remaining.len()];
        for i in 0..m {
            if covered[i] {
                continue;
            }
            let touching: Vec<usize> = remaining
                .iter()
                .enumerate()
                .filter(|&(_, &j)| lp.a.get(i, j).abs() > tol)
                .map(|(k, _)| k)
                .collect();
            for (s, &x) in touching.iter().enumerate() {
                for &y in touching.iter().skip(s + 1) {
                    adj[x].insert(y);
                    adj[y].insert(x);
                }
            }
        }
        for k in minimum_degree_order(adj) {
            if basic.len() == m {
                break;
            }
            let j = remaining[k];
            if tester.try_add(lp.a.col(j), tol) {
                basic.push(j);
            }
        }
    }
    if basic.len() < m {
        return Err(Error::InvalidProblem(
            "columns span fewer dimensions than there are rows".into(),
        ));
    }
    let basis = Basis::new(lp, basic, settings)?;
    Ok(InitOutcome::new(InitVerdict::Structural(basis)))
}
