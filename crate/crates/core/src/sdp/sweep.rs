use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assemble, solve, ConditionSet, SdpSolution, SolveStatus, SolverSettings};
use crate::error::Result;
use crate::fci::CIState;
use crate::hamiltonian::Hamiltonian;
use crate::rdm::{compute_2rdm, frobenius_error, frobenius_error_vs_self, TwoRDM};
use crate::shadow::{generate_shadows, shadow_constraint_rows, Bound, RotationGroup, Shadow};

/// Offset separating the noise stream from the rotation stream of a seed.
const NOISE_SEED_OFFSET: u64 = 0x5851_F42D_4C95_7F2D;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub seed: u64,
    pub group: RotationGroup,
    pub epsilon: f64,
    /// Add uniform noise of amplitude `epsilon` to the shadow values.
    pub noisy: bool,
    pub settings: SolverSettings,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            group: RotationGroup::default(),
            epsilon: 0.0,
            noisy: true,
            settings: SolverSettings::default(),
        }
    }
}

impl SweepOptions {
    pub fn noise_seed(&self) -> Option<u64> {
        (self.noisy && self.epsilon > 0.0).then(|| self.seed.wrapping_add(NOISE_SEED_OFFSET))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n_shadows: usize,
    pub seed: u64,
    pub energy: f64,
    pub target_energy: f64,
    pub abs_energy_error: f64,
    /// `|D - D_ref| / |D_ref|`.
    pub frobenius_error: f64,
    /// `|D - D_ref| / |D|`.
    pub frobenius_error_vs_self: f64,
    pub status: String,
    pub message: Option<String>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub constraint_violation_max: f64,
    pub wall_time: f64,
}

impl ConvergenceRecord {
    fn failed(n: usize, seed: u64, target: f64, message: String) -> Self {
        Self {
            n_shadows: n,
            seed,
            energy: f64::NAN,
            target_energy: target,
            abs_energy_error: f64::NAN,
            frobenius_error: f64::NAN,
            frobenius_error_vs_self: f64::NAN,
            status: "error".into(),
            message: Some(message),
            iterations: 0,
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
            constraint_violation_max: f64::NAN,
            wall_time: 0.0,
        }
    }

    pub fn is_converged(&self) -> bool {
        self.status == SolveStatus::Converged.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonDiagnostic {
    /// Largest `|L(D_ref) - S|` over all shadow rows.
    pub max_violation: f64,
    /// Smallest tolerance for which `D_ref` satisfies every row.
    pub suggested_epsilon: f64,
}

/// Exact-feasibility check of a reference 2-RDM against a shadow set.
pub fn epsilon_diagnostic(shadows: &[Shadow], d_ref: &TwoRDM) -> EpsilonDiagnostic {
    let mut worst: f64 = 0.0;
    let mut needed: f64 = 0.0;
    for s in shadows {
        for row in shadow_constraint_rows(s) {
            let v = row.evaluate(d_ref);
            let centre = match row.bound {
                Bound::Equal(c) => c,
                Bound::Interval { lower, upper } => 0.5 * (lower + upper),
            };
            needed = needed.max((v - centre).abs());
            worst = worst.max(row.violation(d_ref).max(0.0));
        }
    }
    EpsilonDiagnostic {
        max_violation: worst,
        suggested_epsilon: needed,
    }
}

fn record(
    n: usize,
    opts: &SweepOptions,
    target: f64,
    d_ref: &TwoRDM,
    shadows: &[Shadow],
    sol: &SdpSolution,
) -> ConvergenceRecord {
    let message = (sol.status == SolveStatus::InfeasibleDetected).then(|| {
        let diag = epsilon_diagnostic(shadows, d_ref);
        format!(
            "reference violates rows by {:.3e}; epsilon >= {:.3e} restores feasibility",
            diag.max_violation, diag.suggested_epsilon
        )
    });
    ConvergenceRecord {
        n_shadows: n,
        seed: opts.seed,
        energy: sol.energy,
        target_energy: target,
        abs_energy_error: (sol.energy - target).abs(),
        frobenius_error: frobenius_error(&sol.d_opt, d_ref).unwrap_or(f64::NAN),
        frobenius_error_vs_self: frobenius_error_vs_self(&sol.d_opt, d_ref).unwrap_or(f64::NAN),
        status: sol.status.to_string(),
        message,
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        constraint_violation_max: sol.constraint_violation_max,
        wall_time: sol.wall_time,
    }
}

/// Solves the program at each shadow count in `counts` using prefix-stable
/// shadows of `target`. Points run in parallel; output follows `counts`.
pub fn solve_points(
    h: &Hamiltonian,
    target: &CIState,
    conditions: ConditionSet,
    counts: &[usize],
    opts: &SweepOptions,
) -> Result<Vec<(ConvergenceRecord, Option<SdpSolution>)>> {
    let d_ref = compute_2rdm(target);
    let n_max = counts.iter().copied().max().unwrap_or(0);
    let shadows = generate_shadows(&d_ref, n_max, opts.group, opts.seed, opts.epsilon, opts.noise_seed())?;
    Ok(counts
        .par_iter()
        .map(|&n| {
            let prefix = &shadows[..n];
            let out = assemble(h, prefix, conditions).and_then(|p| solve(&p, &opts.settings));
            match out {
                Ok(sol) => (record(n, opts, target.energy, &d_ref, prefix, &sol), Some(sol)),
                Err(e) => (ConvergenceRecord::failed(n, opts.seed, target.energy, e.to_string()), None),
            }
        })
        .collect())
}

/// One record per shadow count `0..=n_max`.
pub fn convergence_sweep(
    h: &Hamiltonian,
    target: &CIState,
    conditions: ConditionSet,
    n_max: usize,
    opts: &SweepOptions,
) -> Result<Vec<ConvergenceRecord>> {
    let counts: Vec<usize> = (0..=n_max).collect();
    Ok(solve_points(h, target, conditions, &counts, opts)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}
