//! Starting-basis and starting-point construction strategies.
//!
//! Four families, mirroring how much of the problem each one looks at:
//!
//! * [`artificial`] — strategies that extend the problem with artificial
//!   variables or rows (two-phase, big-M, cost/right-hand-side
//!   modification, artificial bounds);
//! * [`rules`] — special pivoting rules that iterate toward feasibility
//!   without artificials;
//! * [`structural`] — crash procedures reading only the nonzero structure
//!   and the data (triangular crashes, penalty-ordered greedy admission,
//!   tearing, angle and fill heuristics);
//! * [`point`] — strategies that produce an interior or boundary *point*
//!   and purify it to a vertex afterwards.
//!
//! Every strategy reports an [`InitOutcome`]; the caller routes it to the
//! matching engine (primal for feasible bases, dual for dual-feasible ones)
//! or straight to a verdict when the strategy already settled the instance.

pub mod artificial;
pub mod point;
pub mod rules;
pub mod structural;

use crate::engine::SolveResult;
use crate::model::{Basis, InfeasibleWitness};

/// Flags a strategy may attach to its outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitFlag {
    /// The big-M style bound was hit and had to be escalated.
    BoundEscalated,
    /// The final answer still touches an artificial bound ("M too small").
    BoundPinned,
    /// A cycle guard fired and a fallback strategy produced the outcome.
    CycleFallback(&'static str),
    /// An iteration budget ran out and a fallback produced the outcome.
    LimitFallback(&'static str),
    /// Rows were detected as redundant during the construction.
    RedundantRows(Vec<usize>),
    /// The strategy could not cover some rows and completed the basis with
    /// columns outside its own selection rule.
    CompletedOutsideRule(usize),
    /// The strategy had nothing to do (already feasible / no candidates).
    NoOp,
    /// The penalty scale and the feasibility tolerance overlap
    /// (`M * feas_tol > 1`), so penalty residuals can hide inside the
    /// tolerance band.
    PenaltyToleranceConflict,
}

/// What an initialization strategy handed back.
#[derive(Debug, Clone)]
pub enum InitVerdict {
    /// Basis claimed primal feasible: route to the primal engine.
    PrimalFeasible(Basis),
    /// Basis claimed dual feasible: route to the dual engine.
    DualFeasible(Basis),
    /// Nonsingular basis with no feasibility claim.
    Structural(Basis),
    /// Starting point for purification (with its constraint residual).
    Point { x: Vec<f64>, residual: f64 },
    /// The strategy solved the instance outright.
    Solved(Box<SolveResult>),
    /// The instance was proved infeasible during initialization.
    Infeasible(InfeasibleWitness),
    /// The instance was proved unbounded during initialization; the ray is
    /// a full-length improving direction.
    Unbounded(Vec<f64>),
    /// Iteration budgets ran out before the strategy reached a usable
    /// state, and no fallback was prescribed.
    Stalled,
}

/// Outcome plus bookkeeping common to all strategies.
#[derive(Debug, Clone)]
pub struct InitOutcome {
    pub verdict: InitVerdict,
    pub flags: Vec<InitFlag>,
    /// Pivots / sweeps the strategy itself spent.
    pub work: usize,
}

impl InitOutcome {
    pub fn new(verdict: InitVerdict) -> InitOutcome {
        InitOutcome { verdict, flags: Vec::new(), work: 0 }
    }

    pub fn with_work(verdict: InitVerdict, work: usize) -> InitOutcome {
        InitOutcome { verdict, flags: Vec::new(), work }
    }

    pub fn flag(mut self, flag: InitFlag) -> InitOutcome {
        self.flags.push(flag);
        self
    }

    /// The basis carried by the verdict, if any.
    pub fn basis(&self) -> Option<&Basis> {
        match &self.verdict {
            InitVerdict::PrimalFeasible(b)
            | InitVerdict::DualFeasible(b)
            | InitVerdict::Structural(b) => Some(b),
            InitVerdict::Solved(r) => Some(&r.basis),
            _ => None,
        }
    }
}
