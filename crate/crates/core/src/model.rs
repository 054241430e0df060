//! Problem representations and basis algebra.
//!
//! The central type is [`StandardLp`]: `min c'x  s.t.  Ax = b, x >= 0` with
//! `A` of full row rank and `b >= 0` (rows are sign-flipped on construction).
//! [`GeneralLp`] carries senses, row relations, and variable bounds and
//! converts to standard form with an invertible column mapping. [`IneqLp`]
//! is the all-inequality form `min c'x  s.t.  Ax >= b, x >= 0` used by the
//! geometric starting-point search.

use crate::error::Error;
use crate::linalg::{lu_factor, IndependenceTester, LuFactors};
use crate::mat::{dot, norm2, Mat};
use crate::settings::Settings;

/// Linear program in standard form.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub c: Vec<f64>,
    pub a: Mat,
    pub b: Vec<f64>,
}

impl StandardLp {
    /// Validating constructor: checks shapes, flips rows with negative `b`,
    /// and verifies that `A` has full row rank.
    pub fn new(c: Vec<f64>, a: Mat, b: Vec<f64>, settings: &Settings) -> Result<StandardLp, Error> {
        if a.rows() != b.len() || a.cols() != c.len() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, b has {}, c has {}",
                a.rows(),
                a.cols(),
                b.len(),
                c.len()
            )));
        }
        if a.rows() > a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "more rows ({}) than columns ({})",
                a.rows(),
                a.cols()
            )));
        }
        let mut lp = StandardLp { c, a, b };
        for i in 0..lp.m() {
            if lp.b[i] < 0.0 {
                lp.b[i] = -lp.b[i];
                for j in 0..lp.n() {
                    let v = lp.a.get(i, j);
                    lp.a.set(i, j, -v);
                }
            }
        }
        let dependent = lp.dependent_rows(settings.pivot_tol);
        if !dependent.is_empty() {
            return Err(Error::RankDeficient { dependent_rows: dependent });
        }
        Ok(lp)
    }

    /// Internal constructor for auxiliary problems whose shape is correct by
    /// construction; skips sign normalization and the rank check.
    pub(crate) fn raw(c: Vec<f64>, a: Mat, b: Vec<f64>) -> StandardLp {
        debug_assert_eq!(a.rows(), b.len());
        debug_assert_eq!(a.cols(), c.len());
        StandardLp { c, a, b }
    }

    /// Rows that are linear combinations of earlier rows.
    pub fn dependent_rows(&self, pivot_tol: f64) -> Vec<usize> {
        let mut tester = IndependenceTester::new(self.n());
        let mut dependent = Vec::new();
        for i in 0..self.m() {
            if !tester.try_add(&self.a.row(i), pivot_tol) {
                dependent.push(i);
            }
        }
        dependent
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }

    /// Constraint residual `Ax - b`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.a.mul_vec(x);
        ax.iter().zip(&self.b).map(|(l, r)| l - r).collect()
    }
}

/// Ordered basis of a standard-form program, with its factorization.
///
/// The basic index order is preserved as given (several strategies attach
/// meaning to it); the nonbasic complement is kept ascending.
#[derive(Debug, Clone)]
pub struct Basis {
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    lu: LuFactors,
}

impl Basis {
    pub fn new(lp: &StandardLp, basic: Vec<usize>, settings: &Settings) -> Result<Basis, Error> {
        if basic.len() != lp.m() {
            return Err(Error::InvalidIndex(format!(
                "basis has {} indices, problem has {} rows",
                basic.len(),
                lp.m()
            )));
        }
        let mut seen = vec![false; lp.n()];
        for &j in &basic {
            if j >= lp.n() {
                return Err(Error::InvalidIndex(format!("column {} out of range", j)));
            }
            if seen[j] {
                return Err(Error::InvalidIndex(format!("column {} repeated", j)));
            }
            seen[j] = true;
        }
        let lu = lu_factor(&lp.a.select_cols(&basic), settings.pivot_tol);
        if lu.is_singular() {
            return Err(Error::SingularBasis { smallest_pivot: lu.smallest_pivot() });
        }
        let nonbasic = (0..lp.n()).filter(|&j| !seen[j]).collect();
        Ok(Basis { basic, nonbasic, lu })
    }

    pub fn basic(&self) -> &[usize] {
        &self.basic
    }

    pub fn nonbasic(&self) -> &[usize] {
        &self.nonbasic
    }

    pub fn lu(&self) -> &LuFactors {
        &self.lu
    }

    /// Position of `var` in the basic order, if basic.
    pub fn position_of(&self, var: usize) -> Option<usize> {
        self.basic.iter().position(|&j| j == var)
    }

    pub fn is_basic(&self, var: usize) -> bool {
        self.position_of(var).is_some()
    }

    /// Exchange `entering` (nonbasic) for `leaving` (basic), refactorizing
    /// from scratch. The entering column takes the leaving column's slot, so
    /// row/position bookkeeping stays aligned across the pivot.
    pub fn pivot(
        &self,
        lp: &StandardLp,
        entering: usize,
        leaving: usize,
        settings: &Settings,
    ) -> Result<Basis, Error> {
        let pos = self
            .position_of(leaving)
            .ok_or_else(|| Error::InvalidIndex(format!("leaving column {} is not basic", leaving)))?;
        if self.is_basic(entering) {
            return Err(Error::InvalidIndex(format!("entering column {} is already basic", entering)));
        }
        if entering >= lp.n() {
            return Err(Error::InvalidIndex(format!("entering column {} out of range", entering)));
        }
        let mut basic = self.basic.clone();
        basic[pos] = entering;
        Basis::new(lp, basic, settings)
    }

    /// Basic components `x_B = A_B^{-1} b`, aligned with `basic()`.
    pub fn basic_values(&self, lp: &StandardLp) -> Vec<f64> {
        self.lu.solve(&lp.b, false).expect("basis factorization is nonsingular")
    }

    /// Full primal basic solution (nonbasic entries identically zero).
    pub fn primal_solution(&self, lp: &StandardLp) -> BasicSolution {
        let xb = self.basic_values(lp);
        let mut x = vec![0.0; lp.n()];
        for (pos, &j) in self.basic.iter().enumerate() {
            x[j] = xb[pos];
        }
        let objective = lp.objective(&x);
        BasicSolution { x, objective }
    }

    /// Dual basic solution: `y = A_B^{-T} c_B`, `s = c - A'y` with `s_B`
    /// forced to exact zero.
    pub fn dual_solution(&self, lp: &StandardLp) -> DualBasicSolution {
        let cb: Vec<f64> = self.basic.iter().map(|&j| lp.c[j]).collect();
        let y = self.lu.solve(&cb, true).expect("basis factorization is nonsingular");
        let mut s = vec![0.0; lp.n()];
        for &j in &self.nonbasic {
            s[j] = lp.c[j] - dot(lp.a.col(j), &y);
        }
        let objective = dot(&lp.b, &y);
        DualBasicSolution { y, s, objective }
    }

    /// Feasibility classification of this basis under the given tolerances.
    pub fn feasibility(&self, lp: &StandardLp, settings: &Settings) -> FeasibilityFlags {
        let xb = self.basic_values(lp);
        let primal = xb.iter().all(|&v| v >= -settings.feas_tol);
        let degenerate = xb.iter().any(|&v| v.abs() <= settings.feas_tol);
        let dual_sol = self.dual_solution(lp);
        let dual = self.nonbasic.iter().all(|&j| dual_sol.s[j] >= -settings.feas_tol);
        FeasibilityFlags { primal, dual, optimal: primal && dual, degenerate }
    }
}

/// Primal basic solution attached to some basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicSolution {
    /// Full-length vector; nonbasic coordinates are exactly zero.
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Dual basic solution attached to some basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBasicSolution {
    pub y: Vec<f64>,
    /// Full-length reduced costs; basic coordinates are exactly zero.
    pub s: Vec<f64>,
    /// Dual objective `b'y`.
    pub objective: f64,
}

/// Feasibility summary of a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibilityFlags {
    pub primal: bool,
    pub dual: bool,
    pub optimal: bool,
    pub degenerate: bool,
}

/// Evidence attached to an infeasibility verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum InfeasibleWitness {
    /// `sigma` with `sigma'A <= 0` componentwise and `sigma'b > 0`.
    DualRay(Vec<f64>),
    /// Positive optimum of an artificial-variable feasibility problem.
    PhaseOneOptimum(f64),
    /// Positive infeasibility sum certified by a dual-feasible auxiliary.
    InfeasibilitySum(f64),
}

/// Terminal verdict of a solve.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Optimal,
    PrimalInfeasible(InfeasibleWitness),
    /// `ray` satisfies `A ray = 0`, `ray >= 0`, `c'ray < 0`.
    PrimalUnbounded { ray: Vec<f64> },
    IterationLimit,
}

impl Certificate {
    pub fn is_optimal(&self) -> bool {
        matches!(self, Certificate::Optimal)
    }
}

/// Objective sense of a general-form program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Row relation of a general-form program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Linear program with senses, relations, and variable bounds.
///
/// Bounds use `f64::NEG_INFINITY` / `f64::INFINITY` for "absent".
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralLp {
    pub sense: Sense,
    pub c: Vec<f64>,
    pub a: Mat,
    pub rel: Vec<Relation>,
    pub b: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub name: String,
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
}

impl GeneralLp {
    /// Construct with default names and the usual shape checks.
    pub fn new(
        sense: Sense,
        c: Vec<f64>,
        a: Mat,
        rel: Vec<Relation>,
        b: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<GeneralLp, Error> {
        let (m, n) = (a.rows(), a.cols());
        if b.len() != m || rel.len() != m || c.len() != n || lower.len() != n || upper.len() != n {
            return Err(Error::DimensionMismatch("general LP arrays disagree on shape".into()));
        }
        for j in 0..n {
            if lower[j] > upper[j] {
                return Err(Error::InvalidProblem(format!(
                    "variable {} has lower bound above upper bound",
                    j
                )));
            }
            if lower[j] == f64::INFINITY || upper[j] == f64::NEG_INFINITY {
                return Err(Error::InvalidProblem(format!("variable {} has an empty range", j)));
            }
        }
        let row_names = (0..m).map(|i| format!("R{}", i + 1)).collect();
        let col_names = (0..n).map(|j| format!("X{}", j + 1)).collect();
        Ok(GeneralLp { sense, c, a, rel, b, lower, upper, name: "LP".into(), row_names, col_names })
    }

    /// All-default bounds (`x >= 0`) variant.
    pub fn with_default_bounds(
        sense: Sense,
        c: Vec<f64>,
        a: Mat,
        rel: Vec<Relation>,
        b: Vec<f64>,
    ) -> Result<GeneralLp, Error> {
        let n = a.cols();
        GeneralLp::new(sense, c, a, rel, b, vec![0.0; n], vec![f64::INFINITY; n])
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Convert to standard form.
    ///
    /// Maximization negates the objective; finite lower bounds shift,
    /// upper-only bounds mirror, free variables split into differences of
    /// nonnegative pairs, double bounds add an explicit row, and every
    /// inequality row gets a slack or surplus column.
    pub fn to_standard_form(&self, settings: &Settings) -> Result<(StandardLp, StandardMap), Error> {
        let (c, a, b, map) = self.standard_parts();
        let lp = StandardLp::new(c, a, b, settings)?;
        Ok((lp, map))
    }

    /// The standard-form pieces before validation: callers that extend the
    /// matrix themselves (and can therefore tolerate rank deficiency) build
    /// on these directly. No sign normalization is applied to `b`.
    pub(crate) fn standard_parts(&self) -> (Vec<f64>, Mat, Vec<f64>, StandardMap) {
        let n = self.n();
        let m = self.m();
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };

        let mut cols: Vec<Vec<f64>> = Vec::new();
        let mut c_std: Vec<f64> = Vec::new();
        let mut vars: Vec<VarMap> = Vec::new();
        let mut obj_constant = 0.0;
        // Rows of the eventual standard matrix: the m originals followed by
        // one row per double-bounded variable. Original-row coefficients are
        // built column by column; bound rows are filled in afterwards.
        let mut bound_rows: Vec<(usize, f64)> = Vec::new(); // (std column, range width)
        let mut b_std: Vec<f64> = self.b.clone();

        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            let a_col = self.a.col(j).to_vec();
            let cj = sign * self.c[j];
            if l.is_finite() {
                // x = l + x', x' >= 0
                let col = cols.len();
                if l != 0.0 {
                    for i in 0..m {
                        b_std[i] -= a_col[i] * l;
                    }
                    obj_constant += cj * l;
                }
                cols.push(a_col);
                c_std.push(cj);
                vars.push(VarMap::Shift { col, offset: l });
                if u.is_finite() {
                    bound_rows.push((col, u - l));
                }
            } else if u.is_finite() {
                // x = u - x', x' >= 0
                let col = cols.len();
                for i in 0..m {
                    b_std[i] -= a_col[i] * u;
                }
                obj_constant += cj * u;
                cols.push(a_col.iter().map(|&v| -v).collect());
                c_std.push(-cj);
                vars.push(VarMap::Mirror { col, offset: u });
            } else {
                // Free: x = x+ - x-
                let pos = cols.len();
                cols.push(a_col.clone());
                c_std.push(cj);
                cols.push(a_col.iter().map(|&v| -v).collect());
                c_std.push(-cj);
                vars.push(VarMap::Split { pos, neg: pos + 1 });
            }
        }

        // Slack / surplus columns for the original rows.
        let total_rows = m + bound_rows.len();
        let mut slack_cols: Vec<Option<usize>> = vec![None; m];
        for i in 0..m {
            let coeff = match self.rel[i] {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => continue,
            };
            let mut col = vec![0.0; total_rows];
            col[i] = coeff;
            slack_cols[i] = Some(cols.len());
            cols.push(col);
            c_std.push(0.0);
        }

        // Pad original-variable columns with their bound-row coefficients.
        let mut a_std = Mat::zeros(total_rows, cols.len() + bound_rows.len());
        for (jc, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                a_std.set(i, jc, v);
            }
        }
        let mut upper_rows = Vec::new();
        for (k, &(var_col, width)) in bound_rows.iter().enumerate() {
            let row = m + k;
            let slack = cols.len() + k;
            a_std.set(row, var_col, 1.0);
            a_std.set(row, slack, 1.0);
            b_std.push(width);
            upper_rows.push((var_col, row));
        }
        let mut c_full = c_std;
        c_full.resize(a_std.cols(), 0.0);

        let n_std = a_std.cols();
        let map = StandardMap {
            vars,
            obj_constant,
            sense: self.sense,
            slack_cols,
            upper_rows,
            n_std,
        };
        (c_full, a_std, b_std, map)
    }
}

/// How a general-form variable appears in the standard form.
#[derive(Debug, Clone, PartialEq)]
pub enum VarMap {
    /// `x = offset + x'[col]`
    Shift { col: usize, offset: f64 },
    /// `x = offset - x'[col]`
    Mirror { col: usize, offset: f64 },
    /// `x = x'[pos] - x'[neg]`
    Split { pos: usize, neg: usize },
}

/// Invertible bookkeeping for a standard-form conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardMap {
    pub vars: Vec<VarMap>,
    /// Constant added to the standard objective by bound shifts (in the
    /// minimized orientation).
    pub obj_constant: f64,
    pub sense: Sense,
    /// Per original row, the slack/surplus column if the row was inequality.
    pub slack_cols: Vec<Option<usize>>,
    /// `(standard column, standard row)` of each added upper-bound row.
    pub upper_rows: Vec<(usize, usize)>,
    pub n_std: usize,
}

impl StandardMap {
    /// Map a standard-form point back to original variable values.
    pub fn restore_x(&self, x_std: &[f64]) -> Vec<f64> {
        assert_eq!(x_std.len(), self.n_std, "restore_x length");
        self.vars
            .iter()
            .map(|vm| match *vm {
                VarMap::Shift { col, offset } => offset + x_std[col],
                VarMap::Mirror { col, offset } => offset - x_std[col],
                VarMap::Split { pos, neg } => x_std[pos] - x_std[neg],
            })
            .collect()
    }

    /// Map a standard-form objective value back to the original sense.
    pub fn restore_objective(&self, std_obj: f64) -> f64 {
        let v = std_obj + self.obj_constant;
        match self.sense {
            Sense::Minimize => v,
            Sense::Maximize => -v,
        }
    }
}

/// All-inequality form `min c'x  s.t.  Ax >= b, x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IneqLp {
    pub c: Vec<f64>,
    pub a: Mat,
    pub b: Vec<f64>,
}

impl IneqLp {
    pub fn new(c: Vec<f64>, a: Mat, b: Vec<f64>) -> Result<IneqLp, Error> {
        if a.rows() != b.len() || a.cols() != c.len() {
            return Err(Error::DimensionMismatch("inequality LP arrays disagree on shape".into()));
        }
        Ok(IneqLp { c, a, b })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Row residuals `Ax - b` (nonnegative means satisfied).
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.a.mul_vec(x);
        ax.iter().zip(&self.b).map(|(l, r)| l - r).collect()
    }

    /// Scale the objective and every row to unit Euclidean norm.
    ///
    /// Errors if the objective or any row is identically zero: the scaled
    /// problem would not define the search geometry.
    pub fn normalize(&self) -> Result<IneqLp, Error> {
        let cn = norm2(&self.c);
        if cn == 0.0 {
            return Err(Error::InvalidProblem("cannot normalize a zero objective".into()));
        }
        let c: Vec<f64> = self.c.iter().map(|&v| v / cn).collect();
        let mut a = Mat::zeros(self.m(), self.n());
        let mut b = vec![0.0; self.m()];
        for i in 0..self.m() {
            let row = self.a.row(i);
            let rn = norm2(&row);
            if rn == 0.0 {
                return Err(Error::InvalidProblem(format!("cannot normalize zero row {}", i)));
            }
            for j in 0..self.n() {
                a.set(i, j, row[j] / rn);
            }
            b[i] = self.b[i] / rn;
        }
        Ok(IneqLp { c, a, b })
    }

    /// View as a general-form program (all `>=` rows, `x >= 0`).
    pub fn to_general(&self) -> GeneralLp {
        GeneralLp::with_default_bounds(
            Sense::Minimize,
            self.c.clone(),
            self.a.clone(),
            vec![Relation::Ge; self.m()],
            self.b.clone(),
        )
        .expect("shapes were checked at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn settings() -> Settings {
        Settings::default()
    }

    /// min -x1 - 2x2 s.t. x1 + x2 + x3 = 4, x1 + 3x2 + x4 = 6, x >= 0.
    fn lp_a() -> StandardLp {
        StandardLp::new(
            vec![-1.0, -2.0, 0.0, 0.0],
            Mat::from_rows(&[&[1.0, 1.0, 1.0, 0.0], &[1.0, 3.0, 0.0, 1.0]]),
            vec![4.0, 6.0],
            &settings(),
        )
        .unwrap()
    }

    #[test]
    fn negative_rhs_rows_flip() {
        let lp = StandardLp::new(
            vec![1.0, 1.0],
            Mat::from_rows(&[&[1.0, -1.0]]),
            vec![-2.0],
            &settings(),
        )
        .unwrap();
        assert_eq!(lp.b, vec![2.0]);
        assert_eq!(lp.a.row(0), vec![-1.0, 1.0]);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let err = StandardLp::new(
            vec![1.0, 1.0, 1.0],
            Mat::from_rows(&[&[1.0, 1.0, 0.0], &[2.0, 2.0, 0.0]]),
            vec![1.0, 2.0],
            &settings(),
        )
        .unwrap_err();
        assert_eq!(err, Error::RankDeficient { dependent_rows: vec![1] });
    }

    #[test]
    fn slack_basis_solutions_on_small_fixture() {
        let lp = lp_a();
        let basis = Basis::new(&lp, vec![2, 3], &settings()).unwrap();
        let p = basis.primal_solution(&lp);
        assert_eq!(p.x, vec![0.0, 0.0, 4.0, 6.0]);
        assert_eq!(p.objective, 0.0);
        let d = basis.dual_solution(&lp);
        assert_eq!(d.y, vec![0.0, 0.0]);
        assert_eq!(d.s, vec![-1.0, -2.0, 0.0, 0.0]);
        let flags = basis.feasibility(&lp, &settings());
        assert!(flags.primal && !flags.dual && !flags.optimal && !flags.degenerate);
    }

    #[test]
    fn optimal_basis_on_small_fixture() {
        let lp = lp_a();
        let basis = Basis::new(&lp, vec![0, 1], &settings()).unwrap();
        let p = basis.primal_solution(&lp);
        assert!((p.x[0] - 3.0).abs() < 1e-12);
        assert!((p.x[1] - 1.0).abs() < 1e-12);
        assert!((p.objective + 5.0).abs() < 1e-12);
        let d = basis.dual_solution(&lp);
        assert!((d.y[0] + 0.5).abs() < 1e-12);
        assert!((d.y[1] + 0.5).abs() < 1e-12);
        assert!((d.s[2] - 0.5).abs() < 1e-12);
        assert!((d.s[3] - 0.5).abs() < 1e-12);
        let flags = basis.feasibility(&lp, &settings());
        assert!(flags.primal && flags.dual && flags.optimal);
        // Same-basis primal and dual objectives coincide exactly in theory.
        assert!((p.objective - d.objective).abs() < 1e-12);
    }

    #[test]
    fn degenerate_basis_flagged() {
        // x1 + x2 = 1, x1 - x2 = 1 has the degenerate vertex (1, 0).
        let lp = StandardLp::new(
            vec![1.0, 1.0],
            Mat::from_rows(&[&[1.0, 1.0], &[1.0, -1.0]]),
            vec![1.0, 1.0],
            &settings(),
        )
        .unwrap();
        let basis = Basis::new(&lp, vec![0, 1], &settings()).unwrap();
        let flags = basis.feasibility(&lp, &settings());
        assert!(flags.primal && flags.degenerate);
    }

    #[test]
    fn singular_basis_rejected() {
        let lp = StandardLp::new(
            vec![0.0, 0.0, 0.0],
            Mat::from_rows(&[&[1.0, 2.0, 0.0], &[2.0, 4.0, 1.0]]),
            vec![1.0, 1.0],
            &settings(),
        )
        .unwrap();
        match Basis::new(&lp, vec![0, 1], &settings()) {
            Err(Error::SingularBasis { smallest_pivot }) => assert!(smallest_pivot <= 1e-9),
            other => panic!("expected singular basis, got {:?}", other),
        }
    }

    #[test]
    fn pivot_swaps_in_place() {
        let lp = lp_a();
        let basis = Basis::new(&lp, vec![2, 3], &settings()).unwrap();
        let next = basis.pivot(&lp, 1, 3, &settings()).unwrap();
        assert_eq!(next.basic(), &[2, 1]);
        assert_eq!(next.nonbasic(), &[0, 3]);
        assert!(basis.pivot(&lp, 2, 3, &settings()).is_err());
        assert!(basis.pivot(&lp, 0, 1, &settings()).is_err());
    }

    #[test]
    fn weak_duality_and_complementarity_across_random_bases() {
        // For any primal-feasible x (from basis B1) and dual solution (y, s)
        // (from basis B2): c'x - b'y = s'x exactly, hence c'x >= b'y when
        // both sides are feasible.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = settings();
        let mut checked = 0;
        for _ in 0..400 {
            let m = rng.gen_range(2..4);
            let n = rng.gen_range(m + 1..m + 4);
            let mut a = Mat::zeros(m, n);
            for j in 0..n {
                for i in 0..m {
                    a.set(i, j, rng.gen_range(-3.0..3.0));
                }
            }
            let x_feas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let b = a.mul_vec(&x_feas);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let lp = match StandardLp::new(c, a, b, &s) {
                Ok(lp) => lp,
                Err(_) => continue,
            };
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let b1 = match Basis::new(&lp, idx[..m].to_vec(), &s) {
                Ok(b) => b,
                Err(_) => continue,
            };
            idx.shuffle(&mut rng);
            let b2 = match Basis::new(&lp, idx[..m].to_vec(), &s) {
                Ok(b) => b,
                Err(_) => continue,
            };
            let p = b1.primal_solution(&lp);
            let d = b2.dual_solution(&lp);
            let gap = p.objective - d.objective;
            let sx = dot(&d.s, &p.x);
            let scale = 1.0 + p.objective.abs() + d.objective.abs();
            assert!((gap - sx).abs() <= 1e-8 * scale, "complementarity identity violated");
            if b1.feasibility(&lp, &s).primal && b2.feasibility(&lp, &s).dual {
                assert!(gap >= -1e-6 * scale, "weak duality violated: gap {}", gap);
            }
            checked += 1;
        }
        assert!(checked > 100, "too few usable random cases: {}", checked);
    }

    #[test]
    fn standard_form_maps_feasible_points_faithfully() {
        // Build random general problems, pick a random point inside the
        // bounds, make it feasible by construction, and check the standard
        // form reproduces constraints and objective through the mapping.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let s = settings();
        let mut checked = 0;
        for _ in 0..300 {
            let m = rng.gen_range(1..4);
            let n = rng.gen_range(2..5);
            let mut a = Mat::zeros(m, n);
            for j in 0..n {
                for i in 0..m {
                    a.set(i, j, rng.gen_range(-3.0..3.0));
                }
            }
            let mut lower = vec![0.0; n];
            let mut upper = vec![f64::INFINITY; n];
            let mut x = vec![0.0; n];
            for j in 0..n {
                match rng.gen_range(0..4) {
                    0 => {
                        lower[j] = rng.gen_range(-2.0..1.0);
                        x[j] = lower[j] + rng.gen_range(0.0..2.0);
                    }
                    1 => {
                        lower[j] = f64::NEG_INFINITY;
                        upper[j] = rng.gen_range(-1.0..2.0);
                        x[j] = upper[j] - rng.gen_range(0.0..2.0);
                    }
                    2 => {
                        lower[j] = f64::NEG_INFINITY;
                        x[j] = rng.gen_range(-2.0..2.0);
                    }
                    _ => {
                        lower[j] = rng.gen_range(-1.0..0.5);
                        upper[j] = lower[j] + rng.gen_range(0.5..2.0);
                        x[j] = rng.gen_range(lower[j]..upper[j]);
                    }
                }
            }
            let ax = a.mul_vec(&x);
            let mut rel = Vec::new();
            let mut b = Vec::new();
            let mut slack_margin = Vec::new();
            for i in 0..m {
                match rng.gen_range(0..3) {
                    0 => {
                        let margin = rng.gen_range(0.0..1.5);
                        rel.push(Relation::Le);
                        b.push(ax[i] + margin);
                        slack_margin.push(margin);
                    }
                    1 => {
                        let margin = rng.gen_range(0.0..1.5);
                        rel.push(Relation::Ge);
                        b.push(ax[i] - margin);
                        slack_margin.push(margin);
                    }
                    _ => {
                        rel.push(Relation::Eq);
                        b.push(ax[i]);
                        slack_margin.push(0.0);
                    }
                }
            }
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let sense = if rng.gen_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
            let gen = GeneralLp::new(sense, c, a, rel, b, lower, upper).unwrap();
            let (std_lp, map) = match gen.to_standard_form(&s) {
                Ok(v) => v,
                // Random draws can produce rank-deficient systems or (with
                // many equality rows and few columns) tall standard forms;
                // both are honest construction errors, not mapping bugs.
                Err(Error::RankDeficient { .. }) | Err(Error::DimensionMismatch(_)) => continue,
                Err(e) => panic!("unexpected conversion error: {}", e),
            };

            // Assemble the standard-form image of x.
            let mut x_std = vec![0.0; std_lp.n()];
            for (j, vm) in map.vars.iter().enumerate() {
                match *vm {
                    VarMap::Shift { col, offset } => x_std[col] = x[j] - offset,
                    VarMap::Mirror { col, offset } => x_std[col] = offset - x[j],
                    VarMap::Split { pos, neg } => {
                        x_std[pos] = x[j].max(0.0);
                        x_std[neg] = (-x[j]).max(0.0);
                    }
                }
            }
            for i in 0..m {
                if let Some(col) = map.slack_cols[i] {
                    x_std[col] = slack_margin[i];
                }
            }
            for &(var_col, row) in &map.upper_rows {
                let width = std_lp.b[row];
                let slack = width - x_std[var_col];
                // The bound row touches exactly the variable and its slack.
                for jc in 0..std_lp.n() {
                    if jc != var_col && std_lp.a.get(row, jc) != 0.0 {
                        x_std[jc] = slack;
                    }
                }
            }

            let resid = std_lp.residual(&x_std);
            for (i, &r) in resid.iter().enumerate() {
                assert!(r.abs() < 1e-8, "standard residual {} at row {}", r, i);
            }
            assert!(x_std.iter().all(|&v| v >= -1e-9), "standard image must be nonnegative");
            let back = map.restore_x(&x_std);
            for j in 0..n {
                assert!((back[j] - x[j]).abs() < 1e-9, "restore mismatch at {}", j);
            }
            let orig_obj: f64 = dot(&gen.c, &x);
            let via_std = map.restore_objective(std_lp.objective(&x_std));
            assert!((orig_obj - via_std).abs() < 1e-8, "objective mismatch through mapping");
            checked += 1;
        }
        assert!(checked > 100, "too few usable random cases: {}", checked);
    }

    #[test]
    fn normalize_scales_to_unit_norms() {
        let p = IneqLp::new(
            vec![3.0, 4.0],
            Mat::from_rows(&[&[3.0, 0.0], &[0.0, 2.0]]),
            vec![6.0, 2.0],
        )
        .unwrap();
        let q = p.normalize().unwrap();
        assert!((q.c[0] - 0.6).abs() < 1e-12);
        assert!((q.c[1] - 0.8).abs() < 1e-12);
        assert_eq!(q.a.row(0), vec![1.0, 0.0]);
        assert_eq!(q.b, vec![2.0, 1.0]);
        // Normalizing is idempotent up to rounding.
        let r = q.normalize().unwrap();
        for j in 0..2 {
            assert!((r.c[j] - q.c[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_zero_data() {
        let zero_c =
            IneqLp::new(vec![0.0, 0.0], Mat::from_rows(&[&[1.0, 1.0]]), vec![1.0]).unwrap();
        assert!(zero_c.normalize().is_err());
        let zero_row =
            IneqLp::new(vec![1.0, 1.0], Mat::from_rows(&[&[0.0, 0.0]]), vec![1.0]).unwrap();
        assert!(zero_row.normalize().is_err());
    }
}
