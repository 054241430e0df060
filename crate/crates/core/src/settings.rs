/// Numeric tolerances and iteration limits shared by every solver component.
///
/// A single record is threaded through the engines, the initialization
/// strategies, and the verification oracle so that all of them agree on what
/// "zero" means.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Feasibility tolerance: `x >= -feas_tol` counts as nonnegative and
    /// `s >= -feas_tol` counts as dual feasible.
    pub feas_tol: f64,
    /// Allowed residual when checking linear identities such as `Ax = b`.
    pub residual_tol: f64,
    /// Smallest pivot magnitude accepted during factorization and
    /// independence tests.
    pub pivot_tol: f64,
    /// Allowed gap when comparing primal and dual objectives.
    pub duality_tol: f64,
    /// Hard cap on simplex iterations, expressed per-problem as
    /// `iter_factor * (m + n)`.
    pub iter_factor: usize,
    /// Consecutive non-improving pivots tolerated (per row) before the
    /// engine switches to Bland's rule; the actual count is
    /// `anti_cycle_factor * m`.
    pub anti_cycle_factor: usize,
    /// Activity tolerance used when classifying constraints as active at a
    /// point.
    pub active_tol: f64,
    /// Largest constraint residual a point may carry and still be handed to
    /// the purification / crossover routines.
    pub crossover_tol: f64,
    /// Smallest useful line-search step in the boundary search; below this
    /// the search changes direction or stops.
    pub eta_min: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            feas_tol: 1e-7,
            residual_tol: 1e-8,
            pivot_tol: 1e-9,
            duality_tol: 1e-6,
            iter_factor: 50,
            anti_cycle_factor: 5,
            active_tol: 1e-7,
            crossover_tol: 1e-6,
            eta_min: 1e-6,
        }
    }
}

impl Settings {
    /// Iteration cap for a problem with `m` rows and `n` columns.
    pub fn iter_limit(&self, m: usize, n: usize) -> usize {
        self.iter_factor * (m + n)
    }
}
