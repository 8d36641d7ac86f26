//! Settings, results and helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::assemble::{LinearRow, SdpProblem, SparseRow};
use super::layout::BlockLayout;
use crate::error::Result;
use crate::rdm::TwoRDM;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub primal: f64,
    pub dual: f64,
    /// Relative objective change between checks.
    pub stall: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            primal: 1e-7,
            dual: 1e-7,
            stall: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Interior point when the Newton system fits in memory, else ADMM.
    #[default]
    Auto,
    InteriorPoint,
    Admm,
}

impl std::fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverMethod::Auto => "auto",
            SolverMethod::InteriorPoint => "interior_point",
            SolverMethod::Admm => "admm",
        })
    }
}

impl std::str::FromStr for SolverMethod {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "auto" => Ok(SolverMethod::Auto),
            "interior_point" | "ipm" => Ok(SolverMethod::InteriorPoint),
            "admm" => Ok(SolverMethod::Admm),
            other => Err(crate::error::Error::InvalidInput(format!(
                "unknown solver `{other}` (expected auto, ipm or admm)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub method: SolverMethod,
    pub tol: Tolerances,
    /// Iteration cap; interior-point runs use `ipm_iterations` instead.
    pub max_iterations: usize,
    pub ipm_iterations: usize,
    pub rho: f64,
    pub alpha: f64,
    pub check_every: usize,
    pub adapt_every: usize,
    /// Relative residual below which an equality row counts as dependent.
    pub rank_tol: f64,
    /// Consecutive checks with a steady dual drift before declaring
    /// infeasibility; 0 disables the test.
    pub infeasibility_checks: usize,
    /// Half-width of the interval replacing each exact shadow row inside the
    /// interior-point method; 0 keeps them as equalities.
    pub shadow_slack: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            method: SolverMethod::Auto,
            tol: Tolerances::default(),
            max_iterations: 100_000,
            ipm_iterations: 200,
            rho: 1.0,
            alpha: 1.6,
            check_every: 10,
            adapt_every: 100,
            rank_tol: 1e-10,
            infeasibility_checks: 50,
            shadow_slack: 1e-8,
        }
    }
}

impl SolverSettings {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol.primal = tol;
        self.tol.dual = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    InfeasibleDetected,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::InfeasibleDetected => "infeasible_detected",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub d_opt: TwoRDM,
    pub energy: f64,
    /// Relative primal and dual residuals at the returned iterate.
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub constraint_violation_max: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub status: SolveStatus,
    pub method: SolverMethod,
    /// Relative duality gap (interior point) or objective change (ADMM).
    pub gap: f64,
    pub equalities_kept: usize,
}

impl SdpSolution {
    pub fn to_json(&self) -> Result<String> {
        let m = self.d_opt.matrix();
        let d: Vec<f64> = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
        let v = serde_json::json!({
            "energy": self.energy,
            "status": self.status,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "constraint_violation_max": self.constraint_violation_max,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "method": self.method,
            "gap": self.gap,
            "equalities_kept": self.equalities_kept,
            "n_electrons": self.d_opt.n_electrons,
            "r_spatial": self.d_opt.r_spatial,
            "n_pairs": m.nrows(),
            "d_opt": d,
        });
        Ok(serde_json::to_string(&v)?)
    }
}

/// Stacked operator `A`: D block (identity), Q map, G map, box rows.
pub(crate) struct Operator<'a> {
    pub(crate) n: usize,
    pub(crate) segments: Vec<&'a [SparseRow]>,
}

impl<'a> Operator<'a> {
    pub(crate) fn rows(&self) -> usize {
        self.n + self.segments.iter().map(|s| s.len()).sum::<usize>()
    }

    pub(crate) fn apply(&self, x: &DVector<f64>, out: &mut DVector<f64>) {
        out.rows_mut(0, self.n).copy_from(x);
        let mut k = self.n;
        for seg in &self.segments {
            for row in seg.iter() {
                out[k] = row.iter().map(|&(j, v)| v * x[j]).sum();
                k += 1;
            }
        }
    }

    pub(crate) fn apply_t(&self, y: &DVector<f64>, out: &mut DVector<f64>) {
        out.copy_from(&y.rows(0, self.n));
        let mut k = self.n;
        for seg in &self.segments {
            for row in seg.iter() {
                let yk = y[k];
                if yk != 0.0 {
                    for &(j, v) in row {
                        out[j] += v * yk;
                    }
                }
                k += 1;
            }
        }
    }

    pub(crate) fn gram(&self) -> DMatrix<f64> {
        let mut h = DMatrix::identity(self.n, self.n);
        for seg in &self.segments {
            for row in seg.iter() {
                for &(a, va) in row {
                    for &(b, vb) in row {
                        h[(a, b)] += va * vb;
                    }
                }
            }
        }
        h
    }
}

pub(crate) fn min_block_eigenvalue(layout: &BlockLayout, x: &[f64]) -> f64 {
    (0..layout.n_blocks())
        .map(|b| {
            let m = layout.block_matrix(b, x);
            if m.nrows() == 0 {
                f64::INFINITY
            } else {
                SymmetricEigen::new(m).eigenvalues.min()
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Orthonormalizes equality rows by modified Gram-Schmidt, dropping rows whose
/// residual falls below `rank_tol` relative to their norm.
pub(crate) fn orthonormal_equalities(p: &SdpProblem, rank_tol: f64) -> (DMatrix<f64>, DVector<f64>) {
    orthonormal_rows(&p.equalities, p.n_variables(), rank_tol)
}

pub(crate) fn orthonormal_rows(rows: &[LinearRow], n: usize, rank_tol: f64) -> (DMatrix<f64>, DVector<f64>) {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for row in rows {
        let mut v = DVector::zeros(n);
        for &(j, c) in &row.coefficients {
            v[j] += c;
        }
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut b = row.rhs;
        for _ in 0..2 {
            for (q, &bq) in basis.iter().zip(&rhs) {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
                b -= c * bq;
            }
        }
        let norm = v.norm();
        if norm > rank_tol * norm0 {
            basis.push(v / norm);
            rhs.push(b / norm);
        }
    }
    let e = DMatrix::from_fn(basis.len(), n, |i, j| basis[i][j]);
    (e, DVector::from_vec(rhs))
}

fn row_dot(row: &SparseRow, x: &DVector<f64>) -> f64 {
    row.iter().map(|&(j, v)| v * x[j]).sum()
}

/// Largest violation of any constraint at `x`: equalities, boxes and the
/// negative part of the smallest eigenvalue of every active block.
pub fn constraint_violation(p: &SdpProblem, x: &DVector<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for row in &p.equalities {
        worst = worst.max((row_dot(&row.coefficients, x) - row.rhs).abs());
    }
    for row in &p.inequalities {
        let v = row_dot(&row.coefficients, x);
        worst = worst.max(row.lower - v).max(v - row.upper);
    }
    worst = worst.max(-min_block_eigenvalue(&p.d_layout, x.as_slice()));
    if let Some(q) = &p.q_map {
        worst = worst.max(-min_block_eigenvalue(&p.d_layout, &q.apply(x.as_slice())));
    }
    if let Some(g) = &p.g_map {
        worst = worst.max(-min_block_eigenvalue(&p.g_layout, &g.apply(x.as_slice())));
    }
    worst
}

