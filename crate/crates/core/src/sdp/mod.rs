//! Small dense semidefinite programming over Hermitian variables.
//!
//! Problems are stated over a block-diagonal Hermitian variable (one PSD
//! block per listed side, plus optional free scalar variables) with real
//! affine trace-pairing constraints:
//!
//! ```text
//! min/max  sum_b <C_b, X_b> + q . u
//! s.t.     sum_b <A_ib, X_b> + f_i . u = b_i,   X_b >= 0,  u free
//! ```
//!
//! [`solve`] runs a primal-dual path-following interior-point method on the
//! real symmetric embedding `[[Re, -Im], [Im, Re]]` of each block.
//! [`feasibility_margin`] is the phase-1 form `max t s.t. X - tI >= 0`, whose
//! sign certifies feasibility of the constraint system over the PSD cone.
//! [`project_feasibility`] is an independent Dykstra alternating-projection
//! oracle over the same data, used for cross-validation; it shares no linear
//! algebra with the interior-point path (complex arithmetic throughout).

mod project;
mod real;
mod solver;

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::{ComplexMatrix, SparseHerm, C64};

pub use project::{project_feasibility, project_feasibility_from, Feasibility};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SdpError {
    #[error("problem construction: {0}")]
    BadProblem(String),
    #[error("variable side {side} exceeds the dense limit {limit}")]
    SizeLimit { side: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// One affine constraint `sum_b <blocks[b], X_b> + free . u = rhs`.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub blocks: Vec<SparseHerm>,
    pub free: Vec<f64>,
    pub rhs: f64,
}

impl SdpConstraint {
    pub fn new(blocks: Vec<SparseHerm>, rhs: f64) -> Self {
        Self {
            blocks,
            free: Vec::new(),
            rhs,
        }
    }
}

/// Standard-form semidefinite program over Hermitian blocks.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub(crate) sides: Vec<usize>,
    pub(crate) objective: Vec<SparseHerm>,
    pub(crate) objective_free: Vec<f64>,
    pub(crate) num_free: usize,
    pub(crate) constraints: Vec<SdpConstraint>,
    pub(crate) sense: Sense,
}

/// Complex variable side limit; the real embedding doubles it.
pub const SIDE_LIMIT: usize = 160;

impl SdpProblem {
    /// Single-block problem from dense Hermitian data.
    pub fn new(
        objective: &ComplexMatrix,
        constraints: Vec<(ComplexMatrix, f64)>,
        sense: Sense,
    ) -> Result<Self, SdpError> {
        let side = objective.rows();
        let constraints = constraints
            .into_iter()
            .map(|(a, rhs)| {
                if a.rows() != side || !a.is_square() {
                    return Err(SdpError::BadProblem(
                        "constraint matrices must match the variable side".into(),
                    ));
                }
                if !a.is_hermitian(1e-10) {
                    return Err(SdpError::BadProblem(
                        "constraint matrices must be Hermitian".into(),
                    ));
                }
                Ok(SdpConstraint::new(
                    alloc::vec![SparseHerm::from_dense(&a)],
                    rhs,
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !objective.is_hermitian(1e-10) {
            return Err(SdpError::BadProblem(
                "objective matrix must be Hermitian".into(),
            ));
        }
        Self::with_blocks(
            alloc::vec![side],
            alloc::vec![SparseHerm::from_dense(objective)],
            Vec::new(),
            constraints,
            sense,
        )
    }

    /// General block form with optional free scalar variables.
    pub fn with_blocks(
        sides: Vec<usize>,
        objective: Vec<SparseHerm>,
        objective_free: Vec<f64>,
        constraints: Vec<SdpConstraint>,
        sense: Sense,
    ) -> Result<Self, SdpError> {
        if sides.is_empty() {
            return Err(SdpError::BadProblem("need at least one block".into()));
        }
        for &s in &sides {
            if s == 0 {
                return Err(SdpError::BadProblem("zero-sized block".into()));
            }
            if s > SIDE_LIMIT {
                return Err(SdpError::SizeLimit {
                    side: s,
                    limit: SIDE_LIMIT,
                });
            }
        }
        if objective.len() != sides.len() {
            return Err(SdpError::BadProblem(
                "objective needs one (possibly empty) matrix per block".into(),
            ));
        }
        let num_free = objective_free.len();
        for c in &constraints {
            if c.blocks.len() != sides.len() {
                return Err(SdpError::BadProblem(
                    "constraints need one (possibly empty) matrix per block".into(),
                ));
            }
            if c.free.len() > num_free {
                return Err(SdpError::BadProblem(
                    "constraint references more free variables than declared".into(),
                ));
            }
            for (b, m) in c.blocks.iter().enumerate() {
                if m.side() != sides[b] {
                    return Err(SdpError::BadProblem(
                        "constraint block side mismatch".into(),
                    ));
                }
            }
        }
        Ok(Self {
            sides,
            objective,
            objective_free,
            num_free,
            constraints,
            sense,
        })
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalFailure,
}

/// Per-iteration trace record: `(iteration, duality gap, residual)`.
pub type IterRecord = (usize, f64, f64);

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal optimizer, one Hermitian PSD matrix per block.
    pub blocks: Vec<ComplexMatrix>,
    pub free_values: Vec<f64>,
    /// Dual multipliers, one per constraint.
    pub dual: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub iterations: usize,
    pub trace: Vec<IterRecord>,
}

impl SdpSolution {
    /// The single-block primal optimizer.
    pub fn primal(&self) -> &ComplexMatrix {
        &self.blocks[0]
    }
}

/// Solver tolerances; the defaults match the crate-wide certification
/// thresholds.
#[derive(Debug, Clone, Copy)]
pub struct SdpConfig {
    pub gap_tol: f64,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
    pub cholesky_reg: f64,
    pub record_trace: bool,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            residual_tol: 1e-7,
            max_iter: 200,
            step_fraction: 0.98,
            cholesky_reg: 1e-12,
            record_trace: false,
        }
    }
}

/// Solves the program with default tolerances.
pub fn solve(problem: &SdpProblem) -> Result<SdpSolution, SdpError> {
    solver::solve_with(problem, &SdpConfig::default())
}

/// Solves with explicit tolerances.
pub fn solve_with(problem: &SdpProblem, config: &SdpConfig) -> Result<SdpSolution, SdpError> {
    solver::solve_with(problem, config)
}

/// Phase-1 feasibility margin: `max t` subject to `X_b - t I >= 0` for every
/// block and the given affine constraints on `X`.
///
/// A nonnegative optimum certifies that `{X >= 0, constraints}` is feasible;
/// the constraint set must pin the trace of `X` so the objective is bounded.
/// Returns the margin and the witness `X = Y + t I`.
pub fn feasibility_margin(
    sides: &[usize],
    constraints: &[SdpConstraint],
) -> Result<(f64, Vec<ComplexMatrix>), SdpError> {
    feasibility_margin_with(sides, constraints, &SdpConfig::default())
}

pub fn feasibility_margin_with(
    sides: &[usize],
    constraints: &[SdpConstraint],
    config: &SdpConfig,
) -> Result<(f64, Vec<ComplexMatrix>), SdpError> {
    let sol = feasibility_margin_solution(sides, constraints, config)?;
    if sol.status != SdpStatus::Optimal {
        return Err(SdpError::Numerical(alloc::format!(
            "feasibility margin did not certify: {:?}",
            sol.status
        )));
    }
    let t = sol.free_values[0];
    let witness: Vec<ComplexMatrix> = sol
        .blocks
        .iter()
        .map(|y| {
            let mut x = y.clone();
            for i in 0..x.rows() {
                x.add_at(i, i, C64::new(t, 0.0));
            }
            x
        })
        .collect();
    Ok((t, witness))
}

/// The raw phase-1 solution (margin as the free variable, shifted witness in
/// the blocks); useful for inspecting duals and iteration traces.
pub fn feasibility_margin_solution(
    sides: &[usize],
    constraints: &[SdpConstraint],
    config: &SdpConfig,
) -> Result<SdpSolution, SdpError> {
    let shifted: Vec<SdpConstraint> = constraints
        .iter()
        .map(|c| {
            if !c.free.is_empty() {
                return Err(SdpError::BadProblem(
                    "feasibility margin constraints must not use free variables".into(),
                ));
            }
            let id_trace: f64 = c.blocks.iter().map(diag_sum).sum();
            Ok(SdpConstraint {
                blocks: c.blocks.clone(),
                free: alloc::vec![id_trace],
                rhs: c.rhs,
            })
        })
        .collect::<Result<_, _>>()?;

    let objective: Vec<SparseHerm> = sides.iter().map(|&s| SparseHerm::new(s)).collect();
    let problem = SdpProblem::with_blocks(
        sides.to_vec(),
        objective,
        alloc::vec![1.0],
        shifted,
        Sense::Maximize,
    )?;
    solve_with(&problem, config)
}

/// Identity pairing `<M, I>` of a sparse Hermitian operator.
fn diag_sum(m: &SparseHerm) -> f64 {
    m.entries()
        .iter()
        .filter(|(i, j, _)| i == j)
        .map(|(_, _, v)| v.re)
        .sum()
}
