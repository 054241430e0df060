//! Warm starts that produce (or improve) a *point* rather than a basis:
//!
//! * [`idiot_crash`] — replace `Ax = b` by a Lagrangian term and a
//!   quadratic penalty, minimize over `x >= 0` by exact coordinate
//!   descent, and tighten the penalty weight on a fixed schedule; the
//!   wrapper [`idiot_start`] then snaps the near-feasible point onto the
//!   equalities by an active-set least-squares pass;
//! * [`eps_opt_search`] — walk along the boundary of the inequality form,
//!   blending the pull of the active constraint normals against the cost
//!   vector, accepting only strictly improving steps;
//! * [`hybrid_lp`] — from a feasible basis, blend the simplex edge
//!   directions of several promising nonbasic columns into one long step,
//!   then purify the landing point back to a vertex;
//! * [`purify_to_vertex`] — drive a feasible point to a basic feasible
//!   solution by walking along null directions of its positive support,
//!   never letting the objective grow.

use crate::engine;
use crate::error::Error;
use crate::init::{InitFlag, InitOutcome, InitVerdict};
use crate::linalg::{lu_factor, IndependenceTester};
use crate::mat::{dot, norm2, norm_inf, Mat};
use crate::model::{Basis, StandardLp};
use crate::settings::Settings;

/// Inequality-form problem `min c'x  s.t.  Ax >= b, x >= 0`.
///
/// The boundary search expects the *normalized* version: every row of `A`
/// and (when nonzero) the cost vector scaled to unit Euclidean length, so
/// that constraint normals and the cost are comparable directions. Scaling
/// rows together with their right-hand sides does not move the optimum.
#[derive(Debug, Clone)]
pub struct GeLp {
    pub c: Vec<f64>,
    pub a: Mat,
    pub b: Vec<f64>,
}

impl GeLp {
    pub fn new(c: Vec<f64>, a: Mat, b: Vec<f64>) -> Result<GeLp, Error> {
        if c.len() != a.cols() || b.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but the cost has {} entries and the right-hand side {}",
                a.rows(),
                a.cols(),
                c.len(),
                b.len()
            )));
        }
        Ok(GeLp { c, a, b })
    }

    /// Scale every row (with its right-hand side) and the cost vector to
    /// unit length. A zero row cannot be scaled; a zero cost is left as is.
    pub fn normalized(&self) -> Result<GeLp, Error> {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        for i in 0..a.rows() {
            let row = a.row(i);
            let norm = norm2(&row);
            if norm == 0.0 {
                return Err(Error::InvalidProblem(format!(
                    "row {} is identically zero and cannot be normalized",
                    i
                )));
            }
            for j in 0..a.cols() {
                let v = a.get(i, j);
                if v != 0.0 {
                    a.set(i, j, v / norm);
                }
            }
            b[i] /= norm;
        }
        let cn = norm2(&self.c);
        let c = if cn == 0.0 {
            self.c.clone()
        } else {
            self.c.iter().map(|&v| v / cn).collect()
        };
        Ok(GeLp { c, a, b })
    }

    /// `Ax >= b - feas_tol` and `x >= -feas_tol`, elementwise.
    pub fn is_feasible(&self, x: &[f64], settings: &Settings) -> bool {
        x.iter().all(|&v| v >= -settings.feas_tol)
            && (0..self.a.rows()).all(|i| dot(&self.a.row(i), x) >= self.b[i] - settings.feas_tol)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }
}

/// A feasible point of the inequality form together with its active sets.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub x: Vec<f64>,
    /// Rows satisfied with equality (within the activity tolerance).
    pub active_rows: Vec<usize>,
    /// Coordinates sitting at their zero bound.
    pub active_bounds: Vec<usize>,
}

impl BoundaryPoint {
    /// Classify `x` against `lp`: feasibility is enforced, activity is
    /// measured with `settings.active_tol`.
    pub fn classify(lp: &GeLp, x: Vec<f64>, settings: &Settings) -> Result<BoundaryPoint, Error> {
        if !lp.is_feasible(&x, settings) {
            return Err(Error::BadPoint(
                "the point violates the inequality form it should lie in".into(),
            ));
        }
        let active_rows = (0..lp.a.rows())
            .filter(|&i| (dot(&lp.a.row(i), &x) - lp.b[i]).abs() <= settings.active_tol)
            .collect();
        let active_bounds =
            (0..x.len()).filter(|&j| x[j].abs() <= settings.active_tol).collect();
        Ok(BoundaryPoint { x, active_rows, active_bounds })
    }

    /// True when at least one constraint (row or bound) is active.
    pub fn is_boundary(&self) -> bool {
        !self.active_rows.is_empty() || !self.active_bounds.is_empty()
    }
}

/// Unit-normalized sum of the active constraint normals at `point` (rows
/// of `A` plus coordinate units for active bounds), or the zero vector
/// when the normals cancel exactly.
pub fn active_normal_pull(lp: &GeLp, point: &BoundaryPoint) -> Vec<f64> {
    let n = lp.a.cols();
    let mut s = vec![0.0; n];
    for &i in &point.active_rows {
        for (j, v) in lp.a.row(i).iter().enumerate() {
            s[j] += v;
        }
    }
    for &j in &point.active_bounds {
        s[j] += 1.0;
    }
    let norm = norm2(&s);
    if norm <= 1e-12 {
        vec![0.0; n]
    } else {
        s.iter().map(|&v| v / norm).collect()
    }
}

/// Project `v` into the cone of directions that keep every active
/// constraint satisfied to first order (`n'd >= 0` for each active normal
/// `n`).
///
/// The direction starts as the projection of `v` onto the orthogonal
/// complement of the span of all active normals (which satisfies every
/// condition with equality) and normals are then dropped one at a time, in
/// index order, whenever re-projecting without them leaves no cone
/// condition violated; each successful drop lets the direction recover
/// more of `v`.
fn project_to_cone(v: &[f64], normals: &[Vec<f64>]) -> Vec<f64> {
    fn complement_projection(v: &[f64], normals: &[Vec<f64>], keep: &[bool]) -> Vec<f64> {
        // Gram-Schmidt over the kept normals, then subtract components.
        let mut q: Vec<Vec<f64>> = Vec::new();
        for (k, n) in normals.iter().enumerate() {
            if !keep[k] {
                continue;
            }
            let mut w = n.clone();
            for base in &q {
                let t = dot(base, &w);
                for (wi, bi) in w.iter_mut().zip(base) {
                    *wi -= t * bi;
                }
            }
            let norm = norm2(&w);
            if norm > 1e-10 {
                for wi in &mut w {
                    *wi /= norm;
                }
                q.push(w);
            }
        }
        let mut d = v.to_vec();
        for base in &q {
            let t = dot(base, &d);
            for (di, bi) in d.iter_mut().zip(base) {
                *di -= t * bi;
            }
        }
        d
    }

    let in_cone =
        |d: &[f64]| normals.iter().all(|n| dot(n, d) >= -1e-9);
    let mut keep = vec![true; normals.len()];
    let mut d = complement_projection(v, normals, &keep);
    loop {
        let mut dropped = false;
        for k in 0..normals.len() {
            if !keep[k] {
                continue;
            }
            keep[k] = false;
            let cand = complement_projection(v, normals, &keep);
            if in_cone(&cand) {
                d = cand;
                dropped = true;
            } else {
                keep[k] = true;
            }
        }
        if !dropped {
            break;
        }
    }
    d
}

/// Trace of a boundary search: the visited point and the objective after
/// `x0` and after each accepted step.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub point: BoundaryPoint,
    /// `objectives[0]` is the start objective; one more entry per accepted
    /// step, each strictly below its predecessor.
    pub objectives: Vec<f64>,
}

/// Boundary search over the normalized inequality form.
///
/// Each iteration forms the pull `h` of the active normals
/// ([`active_normal_pull`]), stops when `h` matches the cost vector, and
/// otherwise moves along the cone projection of `(h - c)` normalized. The
/// step is the largest one keeping the point feasible; when it falls below
/// `settings.eta_min` the direction is replaced by the cone projection of
/// `-c`, and that fallback must also clear `eta_min`. Only strictly
/// improving steps are accepted; the walk stops at the first rejection,
/// when a direction meets no blocking constraint at all, or when the next
/// landing cannot be classified within tolerance (which happens once the
/// iterates grow so large that one ulp of a coordinate exceeds the
/// feasibility window).
pub fn eps_opt_search(
    lp: &GeLp,
    x0: &[f64],
    settings: &Settings,
) -> Result<BoundaryTrace, Error> {
    let n = lp.a.cols();
    let m = lp.a.rows();
    #[cfg(debug_assertions)]
    {
        for i in 0..m {
            debug_assert!((norm2(&lp.a.row(i)) - 1.0).abs() < 1e-6, "row {} not normalized", i);
        }
        let cn = norm2(&lp.c);
        debug_assert!(cn == 0.0 || (cn - 1.0).abs() < 1e-6, "cost not normalized");
    }

    let mut point = BoundaryPoint::classify(lp, x0.to_vec(), settings)?;
    let mut objectives = vec![lp.objective(&point.x)];
    let cap = 100 * (n + m).max(10);

    for _ in 0..cap {
        let h = active_normal_pull(lp, &point);
        let mut v: Vec<f64> = h.iter().zip(&lp.c).map(|(&hi, &ci)| hi - ci).collect();
        let vn = norm2(&v);
        if vn <= 1e-9 {
            break; // the pull already matches the cost: optimal corner
        }
        for vi in &mut v {
            *vi /= vn;
        }

        let normals: Vec<Vec<f64>> = point
            .active_rows
            .iter()
            .map(|&i| lp.a.row(i))
            .chain(point.active_bounds.iter().map(|&j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            }))
            .collect();
        let unit = |d: Vec<f64>| {
            let norm = norm2(&d);
            if norm <= 1e-10 {
                None
            } else {
                Some(d.iter().map(|&v| v / norm).collect::<Vec<f64>>())
            }
        };
        // Largest feasible step and the blocking bound, if that is what stops it.
        let max_step = |g: &[f64]| {
            let mut eta = f64::INFINITY;
            let mut bound = None;
            for i in 0..m {
                let slope = dot(&lp.a.row(i), g);
                if slope < -1e-12 {
                    let room = (dot(&lp.a.row(i), &point.x) - lp.b[i]).max(0.0);
                    eta = eta.min(room / -slope);
                }
            }
            for j in 0..n {
                if g[j] < -1e-12 {
                    let t = point.x[j].max(0.0) / -g[j];
                    if t < eta {
                        eta = t;
                        bound = Some(j);
                    }
                }
            }
            (eta, bound)
        };

        let mut chosen = None;
        if let Some(g) = unit(project_to_cone(&v, &normals)) {
            let (eta, bound) = max_step(&g);
            if eta >= settings.eta_min && eta.is_finite() {
                chosen = Some((g, eta, bound));
            }
        }
        if chosen.is_none() {
            // Close to the corner: fall back to the projected cost descent.
            let negc: Vec<f64> = lp.c.iter().map(|&v| -v).collect();
            if let Some(g) = unit(project_to_cone(&negc, &normals)) {
                let (eta, bound) = max_step(&g);
                if eta >= settings.eta_min && eta.is_finite() {
                    chosen = Some((g, eta, bound));
                }
            }
        }
        let (g, eta, bound) = match chosen {
            Some(t) => t,
            None => break,
        };
        let drop = eta * dot(&lp.c, &g);
        if drop >= -1e-9 {
            break; // no strictly improving step exists
        }
        let mut x: Vec<f64> =
            point.x.iter().zip(&g).map(|(&xi, &gi)| (xi + eta * gi).max(0.0)).collect();
        if let Some(j) = bound {
            x[j] = 0.0;
        }
        // At large coordinate scales the landing cannot always be resolved
        // within the absolute feasibility window (one ulp of the coordinates
        // may exceed it); stop at the last well-classified point then.
        point = match BoundaryPoint::classify(lp, x, settings) {
            Ok(p) => p,
            Err(_) => break,
        };
        objectives.push(lp.objective(&point.x));
    }
    Ok(BoundaryTrace { point, objectives })
}

/// State of the penalty relaxation after the crash.
#[derive(Debug, Clone)]
pub struct PenaltyState {
    /// Current point, nonnegative elementwise.
    pub x: Vec<f64>,
    /// Multiplier estimate for the relaxed equality constraints.
    pub lambda: Vec<f64>,
    /// Penalty weight of the last inner minimization (weights shrink
    /// strictly across outer iterations).
    pub mu: f64,
    /// `||Ax - b||_2` at the returned point.
    pub residual: f64,
    /// Outer iterations it took to reach the returned point.
    pub outer_iterations: usize,
}

/// Outer/inner schedule of the penalty crash.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySchedule {
    /// Starting penalty weight.
    pub mu0: f64,
    /// Multiplicative weight decay per outer iteration (in `(0, 1)`).
    pub shrink: f64,
    /// Outer iterations (multiplier/weight updates).
    pub outer: usize,
    /// Full coordinate sweeps per inner minimization.
    pub sweeps: usize,
}

impl PenaltySchedule {
    /// Default schedule: `mu0 = 10 * max(1, ||c||_inf)`, decay `1/10`,
    /// up to 40 outer iterations of at most 20 sweeps each.
    pub fn for_problem(lp: &StandardLp) -> PenaltySchedule {
        PenaltySchedule { mu0: 10.0 * norm_inf(&lp.c).max(1.0), shrink: 0.1, outer: 40, sweeps: 20 }
    }
}

/// Penalty crash: minimize `c'x + lambda'(Ax-b) + ||Ax-b||^2 / (2 mu)`
/// over `x >= 0` by cyclic exact coordinate minimization (the 1-D
/// subproblem is a clamped quadratic), then update `lambda += (Ax-b)/mu`
/// and shrink `mu`, repeating per the schedule. Stops early once the
/// residual falls to `settings.crossover_tol`. Best-effort: always returns
/// a state, with the achieved residual reported; [`idiot_start`] follows
/// up with an active-set snap onto the equalities.
pub fn idiot_crash(lp: &StandardLp, schedule: &PenaltySchedule, settings: &Settings) -> PenaltyState {
    let m = lp.m();
    let n = lp.n();
    let mut x = vec![0.0; n];
    let mut lambda = vec![0.0; m];
    let mut mu = schedule.mu0;
    let col_norm2: Vec<f64> = (0..n).map(|j| dot(lp.a.col(j), lp.a.col(j))).collect();

    let mut r: Vec<f64> = lp.b.iter().map(|&bi| -bi).collect(); // A*0 - b
    let mut residual = norm2(&r);
    // On inconsistent systems the multiplier iteration can oscillate, so
    // the best iterate seen (starting with x = 0) is what gets returned.
    let mut best =
        PenaltyState { x: x.clone(), lambda: lambda.clone(), mu, residual, outer_iterations: 0 };
    for k in 0..schedule.outer {
        if k > 0 {
            for (li, &ri) in lambda.iter_mut().zip(&r) {
                *li += ri / mu;
            }
            mu *= schedule.shrink;
        }
        let lam_a: Vec<f64> = (0..n).map(|j| dot(&lambda, lp.a.col(j))).collect();
        for _ in 0..schedule.sweeps {
            let mut moved = 0.0f64;
            for j in 0..n {
                let col = lp.a.col(j);
                if col_norm2[j] <= 1e-30 {
                    // A zero column only sees its linear terms: clamp to the
                    // bound when they push up, otherwise leave it alone.
                    if lp.c[j] + lam_a[j] > 0.0 {
                        x[j] = 0.0;
                    }
                    continue;
                }
                let t = x[j] - (mu * (lp.c[j] + lam_a[j]) + dot(col, &r)) / col_norm2[j];
                let new = t.max(0.0);
                let delta = new - x[j];
                if delta != 0.0 {
                    for (ri, &ai) in r.iter_mut().zip(col) {
                        *ri += delta * ai;
                    }
                    x[j] = new;
                    moved = moved.max(delta.abs());
                }
            }
            if moved <= 1e-12 * (1.0 + norm_inf(&x)) {
                break;
            }
        }
        // Refresh the residual from scratch to shed incremental drift.
        for i in 0..m {
            r[i] = dot(&lp.a.row(i), &x) - lp.b[i];
        }
        residual = norm2(&r);
        if residual < best.residual {
            best = PenaltyState {
                x: x.clone(),
                lambda: lambda.clone(),
                mu,
                residual,
                outer_iterations: k + 1,
            };
        }
        if residual <= settings.crossover_tol {
            break;
        }
    }
    best
}

/// Nonnegative least-squares snap: minimize `||Ax - b||` over `x >= 0` by
/// the classic active-set method, with the passive set seeded from the
/// support of the best penalty iterate so the snapped point stays close to
/// it. Each round solves the free least-squares problem on the passive
/// columns (normal equations with a vanishing ridge so dependent supports
/// cannot break the factorization), clamps along the segment toward that
/// solution, and retires coordinates driven to zero; once the passive
/// solution is wholly positive, the most improving retired coordinate is
/// readmitted or the method stops. Whenever `Ax = b, x >= 0` is solvable
/// the minimum is zero, so feasible systems come out with a vanishing
/// residual; inconsistent ones stop at the least-residual nonnegative
/// point, which is reported as-is.
fn polish_by_active_set(lp: &StandardLp, best: &mut PenaltyState, settings: &Settings) {
    let m = lp.m();
    let n = lp.n();
    let tiny = 1e-11;
    let mut passive: Vec<bool> = best.x.iter().map(|&v| v > 1e-9).collect();
    let mut x: Vec<f64> = best
        .x
        .iter()
        .zip(&passive)
        .map(|(&v, &keep)| if keep { v } else { 0.0 })
        .collect();

    let solve_on = |p: &[usize]| -> Option<Vec<f64>> {
        let k = p.len();
        let mut g = Mat::zeros(k, k);
        let mut ridged = Mat::zeros(k, k);
        let mut rhs = vec![0.0; k];
        for (a_idx, &ja) in p.iter().enumerate() {
            let col_a = lp.a.col(ja);
            rhs[a_idx] = dot(col_a, &lp.b);
            for (b_idx, &jb) in p.iter().enumerate().skip(a_idx) {
                let v = dot(col_a, lp.a.col(jb));
                g.set(a_idx, b_idx, v);
                g.set(b_idx, a_idx, v);
                let r = v + if a_idx == b_idx { 1e-12 * (1.0 + v.abs()) } else { 0.0 };
                ridged.set(a_idx, b_idx, r);
                ridged.set(b_idx, a_idx, r);
            }
        }
        let lu = lu_factor(&ridged, settings.pivot_tol);
        let mut z = lu.solve(&rhs, false)?;
        // Refine against the unridged system: the normal equations are
        // consistent, so a couple of corrections shed the ridge bias even
        // on ill-conditioned supports.
        for _ in 0..2 {
            let gz = g.mul_vec(&z);
            let gap: Vec<f64> = rhs.iter().zip(&gz).map(|(want, got)| want - got).collect();
            let dz = lu.solve(&gap, false)?;
            for (zi, di) in z.iter_mut().zip(&dz) {
                *zi += di;
            }
        }
        Some(z)
    };

    for _ in 0..3 * n + 10 {
        // Inner clamp loop: make `x` the nonnegative least-squares point of
        // the current passive set, retiring coordinates that hit zero.
        loop {
            let p: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            if p.is_empty() {
                for v in x.iter_mut() {
                    *v = 0.0;
                }
                break;
            }
            let z = match solve_on(&p) {
                Some(z) => z,
                None => return,
            };
            if z.iter().all(|&v| v > tiny) {
                for v in x.iter_mut() {
                    *v = 0.0;
                }
                for (k, &j) in p.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (k, &j) in p.iter().enumerate() {
                if z[k] <= tiny && x[j] - z[k] > 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z[k]));
                }
            }
            for (k, &j) in p.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
            }
            for (k, &j) in p.iter().enumerate() {
                if z[k] <= tiny && x[j] <= tiny {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }

        let r: Vec<f64> = (0..m).map(|i| dot(&lp.a.row(i), &x) - lp.b[i]).collect();
        let residual = norm2(&r);
        if residual < best.residual {
            best.x = x.clone();
            best.residual = residual;
        }
        if residual <= settings.crossover_tol * 1e-2 {
            return;
        }
        // Gradient of the residual over the retired coordinates; a
        // nonpositive maximum certifies the nonnegative minimum is reached.
        let mut pick = None;
        let mut w_max = 1e-10 * (1.0 + norm2(&lp.b));
        for j in 0..n {
            if !passive[j] {
                let w = -dot(lp.a.col(j), &r);
                if w > w_max {
                    w_max = w;
                    pick = Some(j);
                }
            }
        }
        match pick {
            Some(j) => passive[j] = true,
            None => return,
        }
    }
}

/// Run the penalty crash with its default schedule, snap the best iterate
/// onto the equalities by nonnegative least squares, and wrap the point
/// for strategy routing. On inconsistent systems the snap stops at the
/// least-residual nonnegative point, and the reported residual exposes the
/// failure to downstream purification.
pub fn idiot_start(lp: &StandardLp, settings: &Settings) -> InitOutcome {
    let mut state = idiot_crash(lp, &PenaltySchedule::for_problem(lp), settings);
    if state.residual > settings.crossover_tol * 1e-2 {
        polish_by_active_set(lp, &mut state, settings);
    }
    InitOutcome::with_work(
        InitVerdict::Point { x: state.x, residual: state.residual },
        state.outer_iterations,
    )
}

/// A feasible point reduced to a vertex.
#[derive(Debug, Clone)]
pub struct PurifyResult {
    pub basis: Basis,
    /// Vertex coordinates as solved from the basis.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Null-direction steps taken to clear the dependent support.
    pub steps: usize,
}

/// Reduce a feasible point to a basic feasible solution without letting
/// the objective grow.
///
/// While the columns carrying positive weight are linearly dependent, a
/// null direction of that support (from its last dependent column, making
/// the choice deterministic) is oriented so the objective cannot increase
/// and followed until some coordinate hits zero. Once the support is
/// independent it is completed to a basis by the first independent
/// remaining columns. A null ray that strictly improves the objective but
/// never meets a bound certifies an unbounded problem and is reported as
/// an error.
pub fn purify_to_vertex(
    lp: &StandardLp,
    x: &[f64],
    settings: &Settings,
) -> Result<PurifyResult, Error> {
    let m = lp.m();
    let n = lp.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates but the problem has {} columns",
            x.len(),
            n
        )));
    }
    if x.iter().any(|&v| v < -settings.feas_tol) {
        return Err(Error::BadPoint("the point has negative coordinates".into()));
    }
    let residual: Vec<f64> = (0..m).map(|i| dot(&lp.a.row(i), x) - lp.b[i]).collect();
    if norm_inf(&residual) > settings.crossover_tol {
        return Err(Error::BadPoint(format!(
            "constraint residual {:.3e} exceeds the crossover tolerance",
            norm_inf(&residual)
        )));
    }

    let mut x: Vec<f64> =
        x.iter().map(|&v| if v <= settings.active_tol { 0.0 } else { v }).collect();
    let mut steps = 0;
    loop {
        let support: Vec<usize> = (0..n).filter(|&j| x[j] > 0.0).collect();
        let mut tester = IndependenceTester::new(m);
        let mut independent: Vec<usize> = Vec::new();
        let mut last_dependent = None;
        for &j in &support {
            if tester.try_add(lp.a.col(j), settings.pivot_tol) {
                independent.push(j);
            } else {
                last_dependent = Some(j);
            }
        }
        let dep = match last_dependent {
            Some(j) => j,
            None => break,
        };

        // Express the dependent column over the independent ones (normal
        // equations of the small full-column-rank system).
        let r = independent.len();
        let mut gram = Mat::zeros(r, r);
        let mut rhs = vec![0.0; r];
        for (s, &js) in independent.iter().enumerate() {
            for (t, &jt) in independent.iter().enumerate() {
                gram.set(s, t, dot(lp.a.col(js), lp.a.col(jt)));
            }
            rhs[s] = dot(lp.a.col(js), lp.a.col(dep));
        }
        let w = if r == 0 {
            Vec::new()
        } else {
            lu_factor(&gram, settings.pivot_tol).solve(&rhs, false).ok_or_else(|| {
                Error::BadPoint("support columns are too ill-conditioned to reduce".into())
            })?
        };
        let mut d = vec![0.0; n];
        d[dep] = 1.0;
        for (s, &js) in independent.iter().enumerate() {
            d[js] = -w[s];
        }
        let slope = dot(&lp.c, &d);
        if slope > 0.0 {
            for di in &mut d {
                *di = -*di;
            }
        }
        let has_decrease = d.iter().any(|&v| v < -1e-12);
        if !has_decrease {
            if slope.abs() <= 1e-12 {
                // Cost-neutral ray: either orientation works, pick the one
                // that meets a bound.
                for di in &mut d {
                    *di = -*di;
                }
            } else {
                return Err(Error::UnboundedDirection);
            }
        }
        let theta = (0..n)
            .filter(|&j| d[j] < -1e-12)
            .map(|j| (j, x[j] / -d[j]))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("a decreasing coordinate exists");
        for j in 0..n {
            x[j] = (x[j] + theta.1 * d[j]).max(0.0);
        }
        x[theta.0] = 0.0;
        steps += 1;
    }

    let support: Vec<usize> = (0..n).filter(|&j| x[j] > 0.0).collect();
    let mut tester = IndependenceTester::new(m);
    let mut basic = Vec::with_capacity(m);
    for &j in &support {
        let added = tester.try_add(lp.a.col(j), settings.pivot_tol);
        debug_assert!(added, "reduced support stays independent");
        basic.push(j);
    }
    for j in 0..n {
        if basic.len() == m {
            break;
        }
        if x[j] == 0.0 && tester.try_add(lp.a.col(j), settings.pivot_tol) {
            basic.push(j);
        }
    }
    let basis = Basis::new(lp, basic, settings)?;
    let solution = basis.primal_solution(lp);
    Ok(PurifyResult { basis, x: solution.x, objective: solution.objective, steps })
}

/// Number of nonbasic columns the edge-blending start works with:
/// `floor(alpha * min(m, n - m))`.
pub fn hybrid_selection_size(m: usize, n: usize, alpha: f64) -> usize {
    (alpha * m.min(n - m) as f64).floor() as usize
}

/// Result of the edge-blending start.
#[derive(Debug, Clone)]
pub struct HybridOutcome {
    /// Vertex handoff (primal feasible), the unchanged start (flagged as a
    /// no-op), or an unbounded ray met along the way.
    pub outcome: InitOutcome,
    /// The improved point before purification (the basic solution of the
    /// start when nothing improved).
    pub point: Vec<f64>,
    /// Chosen blend weight, when a step was taken.
    pub zeta: Option<f64>,
    /// Step length actually taken.
    pub step: f64,
}

/// Edge-blending warm start from a primal feasible basis.
///
/// The `k = floor(alpha * min(m, n-m))` nonbasic columns with the smallest
/// reduced costs are split by the sign of that cost: increasing a column
/// of the "decrease" bundle improves the objective, the "increase" bundle
/// worsens it. Their unit-scaled simplex edge directions are summed per
/// bundle and blended as `zeta * increase + (1 - zeta) * decrease` for
/// each grid value; the blend with the best achievable objective drop
/// (largest feasible step times slope) wins. The landing point is purified
/// back to a vertex. With no improving blend the start is returned
/// unchanged and flagged; a blend with negative slope and no blocking
/// coordinate certifies unboundedness.
pub fn hybrid_lp(
    lp: &StandardLp,
    basis0: Basis,
    alpha: f64,
    zeta_grid: &[f64],
    settings: &Settings,
) -> Result<HybridOutcome, Error> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidProblem("the selection fraction must lie in [0, 1]".into()));
    }
    if zeta_grid.is_empty() {
        return Err(Error::InvalidProblem("an empty blend grid leaves no direction to try".into()));
    }
    let m = lp.m();
    let n = lp.n();
    if !basis0.feasibility(lp, settings).primal {
        return Err(Error::BadStart("the edge-blending start needs a primal feasible basis".into()));
    }
    let x0 = basis0.primal_solution(lp);
    let no_op = |basis: Basis, x: Vec<f64>| HybridOutcome {
        outcome: InitOutcome::new(InitVerdict::PrimalFeasible(basis)).flag(InitFlag::NoOp),
        point: x,
        zeta: None,
        step: 0.0,
    };

    let k = hybrid_selection_size(m, n, alpha);
    if k == 0 {
        return Ok(no_op(basis0, x0.x));
    }
    let s = basis0.dual_solution(lp).s;
    let mut candidates: Vec<usize> = basis0.nonbasic().to_vec();
    candidates.sort_by(|&a, &b| s[a].partial_cmp(&s[b]).unwrap().then(a.cmp(&b)));
    candidates.truncate(k);

    // Unit-scaled edge direction of one nonbasic column.
    let edge = |j: usize| {
        let dir = engine::entering_direction(lp, &basis0, j);
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        for (pos, &bi) in basis0.basic().iter().enumerate() {
            e[bi] = -dir[pos];
        }
        let norm = norm2(&e);
        for v in &mut e {
            *v /= norm;
        }
        e
    };
    let mut d_increase = vec![0.0; n];
    let mut d_decrease = vec![0.0; n];
    let mut any = false;
    for &j in &candidates {
        if s[j].abs() <= settings.feas_tol {
            continue; // a flat edge moves the objective nowhere
        }
        let target = if s[j] > 0.0 { &mut d_increase } else { &mut d_decrease };
        for (ti, ei) in target.iter_mut().zip(edge(j)) {
            *ti += ei;
        }
        any = true;
    }
    if !any {
        return Ok(no_op(basis0, x0.x));
    }

    let mut best: Option<(f64, Vec<f64>, f64, f64)> = None; // (improvement, d, theta, zeta)
    for &zeta in zeta_grid {
        let d: Vec<f64> = d_increase
            .iter()
            .zip(&d_decrease)
            .map(|(&di, &dd)| zeta * di + (1.0 - zeta) * dd)
            .collect();
        let slope = dot(&lp.c, &d);
        let theta = (0..n)
            .filter(|&j| d[j] < -1e-12)
            .map(|j| x0.x[j].max(0.0) / -d[j])
            .fold(f64::INFINITY, f64::min);
        let improvement = if theta.is_finite() {
            theta * slope
        } else if slope < -1e-12 {
            f64::NEG_INFINITY // unbounded improving ray
        } else {
            0.0
        };
        if improvement < best.as_ref().map_or(-1e-12, |b| b.0) {
            best = Some((improvement, d, theta, zeta));
        }
    }
    let (improvement, d, theta, zeta) = match best {
        Some(b) => b,
        None => return Ok(no_op(basis0, x0.x)),
    };
    if improvement == f64::NEG_INFINITY {
        let ray: Vec<f64> = d.iter().map(|&v| v.max(0.0)).collect();
        return Ok(HybridOutcome {
            outcome: InitOutcome::new(InitVerdict::Unbounded(ray)),
            point: x0.x,
            zeta: Some(zeta),
            step: f64::INFINITY,
        });
    }
    let x: Vec<f64> =
        x0.x.iter().zip(&d).map(|(&xi, &di)| (xi + theta * di).max(0.0)).collect();
    let purified = purify_to_vertex(lp, &x, settings)?;
    Ok(HybridOutcome {
        outcome: InitOutcome::with_work(
            InitVerdict::PrimalFeasible(purified.basis),
            purified.steps,
        ),
        point: x,
        zeta: Some(zeta),
        step: theta,
    })
}
