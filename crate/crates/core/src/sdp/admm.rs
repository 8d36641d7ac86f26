//! Over-relaxed ADMM on `min c.x  s.t.  E x = b,  A x + a in K`.
//!
//! `K` is the product of the PSD cones of the packed D, Q and G blocks and a
//! box for interval rows. Equalities are kept inside the `x`-update, which is
//! an equality-constrained least-squares problem solved with two fixed
//! Cholesky factors (`A^T A` and its Schur complement), so the penalty can be
//! rebalanced freely.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use super::assemble::{SdpProblem, SparseRow};
use super::common::{constraint_violation, orthonormal_equalities, Operator, SdpSolution, SolveStatus, SolverSettings};
use super::layout::BlockLayout;
use super::SolverMethod;
use crate::error::{Error, Result};
use crate::rdm::TwoRDM;

/// Cone layout of `z`.
struct Cones<'a> {
    psd: Vec<(usize, &'a BlockLayout)>,
    box_offset: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn project_psd_block(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return None;
    }
    let vals = eig.eigenvalues.map(|l| l.max(0.0));
    let v = &eig.eigenvectors;
    Some(v * DMatrix::from_diagonal(&vals) * v.transpose())
}

impl Cones<'_> {
    fn project(&self, z: &mut DVector<f64>) {
        for &(off, layout) in &self.psd {
            let seg = &mut z.as_mut_slice()[off..off + layout.dim()];
            for b in 0..layout.n_blocks() {
                let m = layout.block_matrix(b, seg);
                if let Some(p) = project_psd_block(m) {
                    layout.store_block(b, &p, seg);
                }
            }
        }
        for (k, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            let v = &mut z[self.box_offset + k];
            *v = v.clamp(*lo, *hi);
        }
    }
}

pub(crate) fn solve_admm(p: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    let start = Instant::now();
    if !(settings.rho > 0.0 && settings.alpha > 0.0 && settings.alpha < 2.0) {
        return Err(Error::InvalidInput("ADMM needs rho > 0 and 0 < alpha < 2".into()));
    }
    let n = p.n_variables();
    let box_rows: Vec<SparseRow> = p.inequalities.iter().map(|r| r.coefficients.clone()).collect();
    let mut segments: Vec<&[SparseRow]> = Vec::new();
    let mut psd: Vec<(usize, &BlockLayout)> = vec![(0, &p.d_layout)];
    let mut offset = n;
    let mut a_const = vec![0.0; n];
    if let Some(q) = &p.q_map {
        segments.push(&q.rows);
        psd.push((offset, &p.d_layout));
        offset += q.rows.len();
        a_const.extend_from_slice(&q.constant);
    }
    if let Some(g) = &p.g_map {
        segments.push(&g.rows);
        psd.push((offset, &p.g_layout));
        offset += g.rows.len();
        a_const.extend_from_slice(&g.constant);
    }
    segments.push(&box_rows);
    let box_offset = offset;
    a_const.extend(std::iter::repeat_n(0.0, box_rows.len()));
    let op = Operator { n, segments };
    let m_rows = op.rows();
    let a_const = DVector::from_vec(a_const);
    let cones = Cones {
        psd,
        box_offset,
        lower: p.inequalities.iter().map(|r| r.lower).collect(),
        upper: p.inequalities.iter().map(|r| r.upper).collect(),
    };

    let c = DVector::from_column_slice(&p.objective);
    let c_norm = c.norm();
    let chol_h = Cholesky::<f64, Dyn>::new(op.gram())
        .ok_or_else(|| Error::InvalidInput("normal matrix of the cone operator is singular".into()))?;
    let (e, b) = orthonormal_equalities(p, settings.rank_tol);
    let y_mat = chol_h.solve(&e.transpose());
    let chol_s = Cholesky::<f64, Dyn>::new(&e * &y_mat)
        .ok_or_else(|| Error::InvalidInput("equality Schur complement is singular".into()))?;

    // start from the uniform pair ensemble
    let mut x = DVector::zeros(n);
    let fill = p.equalities[0].rhs / p.n_pairs() as f64;
    for k in p.d_layout.diagonal_indices() {
        x[k] = fill;
    }
    let mut ax = DVector::zeros(m_rows);
    op.apply(&x, &mut ax);
    ax += &a_const;
    let mut z = ax.clone();
    cones.project(&mut z);
    let mut u = DVector::zeros(m_rows);
    let mut rho = settings.rho;

    let mut g = DVector::zeros(n);
    let mut tmp_n = DVector::zeros(n);
    let mut z_old = z.clone();
    let mut u_prev = u.clone();
    let mut du_prev: Option<DVector<f64>> = None;
    let mut drift_count = 0usize;
    let mut f_prev = f64::INFINITY;
    let mut last_gap = f64::INFINITY;
    let mut best: Option<(f64, DVector<f64>, f64, f64)> = None;
    let mut status = SolveStatus::MaxIter;
    let mut last = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;

    for it in 1..=settings.max_iterations {
        iterations = it;
        // x-update
        let v = &z - &a_const - &u;
        op.apply_t(&v, &mut g);
        g.axpy(-1.0 / rho, &c, 1.0);
        let h = chol_h.solve(&g);
        let mu = chol_s.solve(&(&e * &h - &b));
        x = h - &y_mat * mu;
        op.apply(&x, &mut ax);
        ax += &a_const;
        // relaxed z- and u-updates
        let xh = &ax * settings.alpha + &z * (1.0 - settings.alpha);
        std::mem::swap(&mut z_old, &mut z);
        z.copy_from(&xh);
        z += &u;
        cones.project(&mut z);
        u += &xh;
        u -= &z;

        if it % settings.check_every != 0 {
            continue;
        }
        let r_p = (&ax - &z).norm();
        op.apply_t(&(&z - &z_old), &mut tmp_n);
        let r_d = rho * tmp_n.norm();
        op.apply_t(&u, &mut tmp_n);
        let scale_p = 1f64.max(ax.norm()).max(z.norm());
        let scale_d = 1f64.max(rho * tmp_n.norm()).max(c_norm);
        let rel_p = r_p / scale_p;
        let rel_d = r_d / scale_d;
        last = (rel_p, rel_d);
        let f = c.dot(&x);
        last_gap = (f - f_prev).abs() / 1f64.max(f.abs());
        let stalled = last_gap <= settings.tol.stall;
        f_prev = f;
        let merit = (rel_p / settings.tol.primal).max(rel_d / settings.tol.dual);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, x.clone(), rel_p, rel_d));
        }
        if rel_p <= settings.tol.primal && rel_d <= settings.tol.dual && stalled {
            status = SolveStatus::Converged;
            break;
        }

        // a primal-infeasible problem makes u drift along a fixed direction
        let du = (&u - &u_prev) / settings.check_every as f64;
        u_prev.copy_from(&u);
        let du_norm = du.norm();
        let steady = du_prev
            .as_ref()
            .is_some_and(|d| (&du - d).norm() <= 1e-4 * du_norm && du_norm > 1e-9 * 1f64.max(u.norm()));
        drift_count = if steady && rel_p > 10.0 * settings.tol.primal {
            drift_count + 1
        } else {
            0
        };
        du_prev = Some(du);
        if settings.infeasibility_checks > 0 && drift_count >= settings.infeasibility_checks {
            status = SolveStatus::InfeasibleDetected;
            break;
        }

        if it % settings.adapt_every == 0 {
            let ratio = ((rel_p / settings.tol.primal) / (rel_d / settings.tol.dual).max(1e-300)).sqrt();
            if !(0.2..=5.0).contains(&ratio) {
                let new_rho = (rho * ratio).clamp(1e-6, 1e6);
                u *= rho / new_rho;
                u_prev *= rho / new_rho;
                du_prev = None;
                drift_count = 0;
                rho = new_rho;
            }
        }
    }

    let (x_out, rel_p, rel_d) = match status {
        SolveStatus::MaxIter => match best {
            Some((_, bx, bp, bd)) => (bx, bp, bd),
            None => (x, last.0, last.1),
        },
        _ => (x, last.0, last.1),
    };
    let d = p.d_layout.unpack(x_out.as_slice());
    let d_opt = TwoRDM::from_matrix(p.n_electrons, p.r_spatial, d)?;
    Ok(SdpSolution {
        energy: p.e_core + c.dot(&x_out),
        constraint_violation_max: constraint_violation(p, &x_out),
        d_opt,
        primal_residual: rel_p,
        dual_residual: rel_d,
        iterations,
        wall_time: start.elapsed().as_secs_f64(),
        status,
        method: SolverMethod::Admm,
        gap: last_gap,
        equalities_kept: e.nrows(),
    })
}
