//! Variational 2-RDM semidefinite programs with shadow constraints.
//!
//! The variable is the 2-RDM restricted to its `S_z` blocks (`aa`, `bb`,
//! `ab` pairs); Q and G enter only through their affine images.

mod admm;
mod assemble;
mod common;
mod ipm;
pub mod layout;
mod sweep;

pub use common::{constraint_violation, SdpSolution, SolveStatus, SolverMethod, SolverSettings, Tolerances};
pub use assemble::{assemble, AffineMap, BoxRow, LinearRow, SdpProblem, SparseRow};
pub use sweep::{convergence_sweep, epsilon_diagnostic, solve_points, ConvergenceRecord, EpsilonDiagnostic, SweepOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Newton-system entries above which `Auto` falls back to ADMM.
const IPM_MEMORY_LIMIT: usize = 30_000_000;

/// Solves an assembled program with the configured method.
pub fn solve(p: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    let method = match settings.method {
        SolverMethod::Auto => {
            let n = p.n_variables();
            let blocks = |l: &layout::BlockLayout| {
                l.block_sizes().iter().map(|&k| (k * (k + 1) / 2).pow(2)).sum::<usize>()
            };
            let cost = n * n + 2 * blocks(&p.d_layout) + blocks(&p.g_layout);
            if cost <= IPM_MEMORY_LIMIT {
                SolverMethod::InteriorPoint
            } else {
                SolverMethod::Admm
            }
        }
        m => m,
    };
    match method {
        SolverMethod::Admm => admm::solve_admm(p, settings),
        _ => ipm::solve_ipm(p, settings),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConditionSet {
    D,
    DQ,
    DQG,
}

impl ConditionSet {
    pub const ALL: [ConditionSet; 3] = [ConditionSet::D, ConditionSet::DQ, ConditionSet::DQG];

    pub fn has_q(self) -> bool {
        matches!(self, ConditionSet::DQ | ConditionSet::DQG)
    }

    pub fn has_g(self) -> bool {
        matches!(self, ConditionSet::DQG)
    }
}

impl std::fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConditionSet::D => "D",
            ConditionSet::DQ => "DQ",
            ConditionSet::DQG => "DQG",
        })
    }
}

impl std::str::FromStr for ConditionSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "D" => Ok(ConditionSet::D),
            "DQ" => Ok(ConditionSet::DQ),
            "DQG" => Ok(ConditionSet::DQG),
            other => Err(Error::InvalidInput(format!("unknown condition set `{other}` (expected D, DQ or DQG)"))),
        }
    }
}
