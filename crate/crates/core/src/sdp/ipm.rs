//! Infeasible-start primal-dual interior-point method for
//! `min c.x  s.t.  E x = b,  A x + a = s,  s in K`
//! with the HKM search direction and Mehrotra predictor-corrector steps.
//!
//! `K` is the product of the PSD blocks of D, Q and G (packed `svec`) and
//! the nonnegative orthant holding both sides of every interval row. The dual
//! is `max b.l - a.z  s.t.  E^T l + A^T z = c,  z in K`.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use super::assemble::{SdpProblem, SparseRow};
use super::common::{constraint_violation, orthonormal_rows, Operator, SdpSolution, SolveStatus, SolverSettings};
use super::layout::{BlockLayout, SQRT2};
use super::SolverMethod;
use crate::error::{Error, Result};
use crate::rdm::TwoRDM;

const STEP_FRACTION: f64 = 0.95;

#[inline]
fn tri(a: usize, c: usize) -> usize {
    c * (c + 1) / 2 + a
}

fn smat(v: &[f64], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for c in 0..n {
        for a in 0..=c {
            let x = v[tri(a, c)];
            if a == c {
                m[(a, a)] = x;
            } else {
                m[(a, c)] = x / SQRT2;
                m[(c, a)] = x / SQRT2;
            }
        }
    }
    m
}

fn svec_into(m: &DMatrix<f64>, out: &mut [f64]) {
    let n = m.nrows();
    for c in 0..n {
        for a in 0..=c {
            out[tri(a, c)] = if a == c { m[(a, a)] } else { SQRT2 * 0.5 * (m[(a, c)] + m[(c, a)]) };
        }
    }
}

/// Matrix of `X -> (Z X S^-1 + S^-1 X Z) / 2` in `svec` coordinates.
pub(crate) fn sym_kron(z: &DMatrix<f64>, si: &DMatrix<f64>) -> DMatrix<f64> {
    let n = z.nrows();
    let d = n * (n + 1) / 2;
    let mut k = DMatrix::zeros(d, d);
    for dd in 0..n {
        for c in 0..=dd {
            let q = tri(c, dd);
            for b in 0..n {
                for a in 0..=b {
                    let x = if c == dd {
                        0.5 * (z[(a, c)] * si[(c, b)] + z[(b, c)] * si[(c, a)])
                    } else {
                        (z[(a, c)] * si[(dd, b)] + z[(a, dd)] * si[(c, b)] + z[(b, c)] * si[(dd, a)] + z[(b, dd)] * si[(c, a)])
                            / (2.0 * SQRT2)
                    };
                    k[(tri(a, b), q)] = if a == b { x } else { SQRT2 * x };
                }
            }
        }
    }
    k
}

/// Largest `alpha` keeping `S + alpha dS` PSD, given `S = L L^T`.
fn max_step_psd(l: &DMatrix<f64>, ds: &DMatrix<f64>) -> f64 {
    let Some(w) = l.solve_lower_triangular(ds) else {
        return 0.0;
    };
    let Some(x) = l.solve_lower_triangular(&w.transpose()) else {
        return 0.0;
    };
    let x = (&x + x.transpose()) * 0.5;
    let lmin = SymmetricEigen::new(x).eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

struct PsdBlock {
    offset: usize,
    n: usize,
    /// Rows of `A` for this block; `None` for the D block (identity on `x`).
    rows: Option<(usize, usize)>,
    seg: usize,
}

impl PsdBlock {
    fn d(&self) -> usize {
        self.n * (self.n + 1) / 2
    }
}

struct Scaling {
    k: Vec<DMatrix<f64>>,
    sinv: Vec<DMatrix<f64>>,
    chol_s: Vec<DMatrix<f64>>,
    w_lp: DVector<f64>,
}

struct Direction {
    dx: DVector<f64>,
    dl: DVector<f64>,
    ds: DVector<f64>,
    dz: DVector<f64>,
}

struct Ipm<'a> {
    op: Operator<'a>,
    segs: Vec<&'a [SparseRow]>,
    blocks: Vec<PsdBlock>,
    lp_offset: usize,
    m_rows: usize,
    nu: f64,
}

impl<'a> Ipm<'a> {
    fn apply_k(&self, sc: &Scaling, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m_rows);
        for (b, blk) in self.blocks.iter().enumerate() {
            let d = blk.d();
            let r = &sc.k[b] * v.rows(blk.offset, d);
            out.rows_mut(blk.offset, d).copy_from(&r);
        }
        let n_lp = self.m_rows - self.lp_offset;
        for j in 0..n_lp {
            out[self.lp_offset + j] = sc.w_lp[j] * v[self.lp_offset + j];
        }
        out
    }

    fn schur(&self, n: usize, sc: &Scaling) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for (b, blk) in self.blocks.iter().enumerate() {
            let d = blk.d();
            let k = &sc.k[b];
            match blk.rows {
                None => {
                    let mut view = m.view_mut((blk.offset, blk.offset), (d, d));
                    view += k;
                }
                Some((seg, start)) => {
                    let rows = &self.segs[seg][start..start + d];
                    // T = K L (d x n), then M += L^T T
                    let mut t = DMatrix::zeros(d, n);
                    for (rho, row) in rows.iter().enumerate() {
                        for &(j, v) in row {
                            t.column_mut(j).axpy(v, &k.column(rho), 1.0);
                        }
                    }
                    for (rho, row) in rows.iter().enumerate() {
                        for &(i, v) in row {
                            for j in 0..n {
                                m[(i, j)] += v * t[(rho, j)];
                            }
                        }
                    }
                }
            }
        }
        let lp_rows = self.segs.len() - 2;
        let mut j = 0;
        for seg in &self.segs[lp_rows..] {
            for row in seg.iter() {
                let w = sc.w_lp[j];
                for &(a, va) in row {
                    for &(bb, vb) in row {
                        m[(a, bb)] += w * va * vb;
                    }
                }
                j += 1;
            }
        }
        (&m + m.transpose()) * 0.5
    }
}

fn factor(m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let n = m.nrows();
    if n == 0 {
        return Cholesky::new(m);
    }
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut delta = 0.0;
    for _ in 0..8 {
        let mut mm = m.clone();
        for i in 0..n {
            mm[(i, i)] += delta;
        }
        if let Some(c) = Cholesky::new(mm) {
            return Some(c);
        }
        delta = if delta == 0.0 { 1e-14 * scale } else { delta * 100.0 };
    }
    None
}

pub(crate) fn solve_ipm(p: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    let start = Instant::now();
    let n = p.n_variables();
    // exact shadow rows become thin intervals so that a strictly feasible point exists
    let slack = settings.shadow_slack;
    let n_exact = if slack > 0.0 { 1 } else { p.equalities.len() };
    let mut box_rows: Vec<SparseRow> = p.inequalities.iter().map(|r| r.coefficients.clone()).collect();
    let mut lower: Vec<f64> = p.inequalities.iter().map(|r| r.lower).collect();
    let mut upper: Vec<f64> = p.inequalities.iter().map(|r| r.upper).collect();
    for row in &p.equalities[n_exact..] {
        box_rows.push(row.coefficients.clone());
        lower.push(row.rhs - slack);
        upper.push(row.rhs + slack);
    }
    let neg_rows: Vec<SparseRow> = box_rows
        .iter()
        .map(|r| r.iter().map(|&(j, v)| (j, -v)).collect())
        .collect();
    let empty: Vec<SparseRow> = Vec::new();
    let q_rows: &[SparseRow] = p.q_map.as_ref().map_or(&empty[..], |q| &q.rows[..]);
    let g_rows: &[SparseRow] = p.g_map.as_ref().map_or(&empty[..], |g| &g.rows[..]);
    let segs: Vec<&[SparseRow]> = vec![q_rows, g_rows, &box_rows, &neg_rows];

    let mut blocks = Vec::new();
    let mut a_const = vec![0.0; n];
    let push_blocks = |layout: &BlockLayout, seg_offset: usize, seg: Option<usize>, blocks: &mut Vec<PsdBlock>| {
        for b in 0..layout.n_blocks() {
            let local = layout.block_offset(b);
            blocks.push(PsdBlock {
                offset: seg_offset + local,
                n: layout.block_sizes()[b],
                rows: seg.map(|s| (s, local)),
                seg: seg.map_or(0, |s| s + 1),
            });
        }
    };
    push_blocks(&p.d_layout, 0, None, &mut blocks);
    let mut offset = n;
    if let Some(q) = &p.q_map {
        push_blocks(&p.d_layout, offset, Some(0), &mut blocks);
        offset += q.rows.len();
        a_const.extend_from_slice(&q.constant);
    }
    if let Some(g) = &p.g_map {
        push_blocks(&p.g_layout, offset, Some(1), &mut blocks);
        offset += g.rows.len();
        a_const.extend_from_slice(&g.constant);
    }
    let lp_offset = offset;
    a_const.extend(lower.iter().map(|l| -l));
    a_const.extend_from_slice(&upper);
    let op = Operator {
        n,
        segments: segs.clone(),
    };
    let m_rows = op.rows();
    debug_assert_eq!(m_rows, a_const.len());
    let n_lp = m_rows - lp_offset;
    let nu = blocks.iter().map(|b| b.n).sum::<usize>() as f64 + n_lp as f64;
    let ipm = Ipm {
        op,
        segs,
        blocks,
        lp_offset,
        m_rows,
        nu,
    };
    let _ = ipm.blocks.iter().map(|b| b.seg).max();

    let a_vec = DVector::from_vec(a_const);
    let c = DVector::from_column_slice(&p.objective);
    let (e, b) = orthonormal_rows(&p.equalities[..n_exact], n, settings.rank_tol);

    // identity start for the cone variables
    let mut unit = DVector::zeros(m_rows);
    for blk in &ipm.blocks {
        for a in 0..blk.n {
            unit[blk.offset + tri(a, a)] = 1.0;
        }
    }
    for j in 0..n_lp {
        unit[lp_offset + j] = 1.0;
    }
    let mut x = DVector::zeros(n);
    let fill = p.equalities[0].rhs / p.n_pairs() as f64;
    for k in p.d_layout.diagonal_indices() {
        x[k] = fill;
    }
    let mut s = unit.clone();
    let mut z = unit.clone();
    let mut lam = DVector::zeros(e.nrows());

    let norm_a = a_vec.norm();
    let norm_b = b.norm();
    let norm_c = c.norm();
    let mut ax = DVector::zeros(m_rows);
    let mut atz = DVector::zeros(n);
    let mut best: Option<(f64, DVector<f64>, f64, f64, f64)> = None;
    let mut status = SolveStatus::MaxIter;
    let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    let mut stuck = 0;
    let mut flat = 0;
    let mut prev_pobj = f64::INFINITY;

    for it in 0..=settings.ipm_iterations {
        iterations = it;
        ipm.op.apply(&x, &mut ax);
        let r_p = &ax + &a_vec - &s;
        let r_e = &b - &e * &x;
        ipm.op.apply_t(&z, &mut atz);
        let r_d = &c - e.transpose() * &lam - &atz;
        let pobj = c.dot(&x);
        let dobj = b.dot(&lam) - a_vec.dot(&z);
        let rel_p = (r_p.norm() / (1.0 + norm_a.max(s.norm()))).max(r_e.norm() / (1.0 + norm_b));
        let rel_d = r_d.norm() / (1.0 + norm_c);
        let sz = s.dot(&z);
        let gap = (pobj - dobj).abs().max(sz.abs()) / (1.0 + pobj.abs() + dobj.abs());
        last = (rel_p, rel_d, gap);
        let merit = (rel_p / settings.tol.primal)
            .max(rel_d / settings.tol.dual)
            .max(gap / settings.tol.stall);
        if best.as_ref().is_none_or(|bb| merit < bb.0) {
            best = Some((merit, x.clone(), rel_p, rel_d, gap));
        }
        let feasible = rel_p <= settings.tol.primal && rel_d <= settings.tol.dual;
        // a stalled objective with a small gap also counts once the residuals are met
        let change = (pobj - prev_pobj).abs() / (1.0 + pobj.abs());
        flat = if feasible && gap <= settings.tol.primal && change <= settings.tol.stall { flat + 1 } else { 0 };
        prev_pobj = pobj;
        if feasible && (gap <= settings.tol.stall || flat >= 2) {
            status = SolveStatus::Converged;
            break;
        }
        // diverging dual ray certifies primal infeasibility
        let dual_norm = (z.norm_squared() + lam.norm_squared()).sqrt();
        if dual_norm > 1e8 * (1.0 + norm_c) && dobj / dual_norm > 1e-6 && (&c - &r_d).norm() / dual_norm < 1e-6 {
            status = SolveStatus::InfeasibleDetected;
            break;
        }
        if it == settings.ipm_iterations {
            break;
        }

        // scaling of every block
        let mut sc = Scaling {
            k: Vec::with_capacity(ipm.blocks.len()),
            sinv: Vec::with_capacity(ipm.blocks.len()),
            chol_s: Vec::with_capacity(ipm.blocks.len()),
            w_lp: DVector::zeros(n_lp),
        };
        let mut ok = true;
        for blk in &ipm.blocks {
            let d = blk.d();
            let sm = smat(&s.as_slice()[blk.offset..blk.offset + d], blk.n);
            let zm = smat(&z.as_slice()[blk.offset..blk.offset + d], blk.n);
            let Some(ch) = Cholesky::new(sm) else {
                ok = false;
                break;
            };
            let si = ch.inverse();
            sc.k.push(sym_kron(&zm, &si));
            sc.sinv.push(si);
            sc.chol_s.push(ch.l());
        }
        if !ok {
            break;
        }
        for j in 0..n_lp {
            sc.w_lp[j] = z[lp_offset + j] / s[lp_offset + j];
        }
        let m_mat = ipm.schur(n, &sc);
        let Some(chol_m) = factor(m_mat.clone()) else {
            break;
        };
        // one step of iterative refinement against the unregularized matrix
        let solve_m = |g: &DVector<f64>| -> DVector<f64> {
            let h = chol_m.solve(g);
            let r = g - &m_mat * &h;
            h + chol_m.solve(&r)
        };
        let y_mat = chol_m.solve(&e.transpose());
        let Some(chol_e) = factor(&e * &y_mat) else {
            break;
        };
        let mu = sz / ipm.nu;

        let solve_dir = |rc: &DVector<f64>| -> Direction {
            let kr = ipm.apply_k(&sc, &r_p);
            let mut g = DVector::zeros(n);
            ipm.op.apply_t(&(rc - kr), &mut g);
            g -= &r_d;
            let h = solve_m(&g);
            let dl = chol_e.solve(&(&r_e - &e * &h));
            let dx = h + &y_mat * &dl;
            let mut ds = DVector::zeros(m_rows);
            ipm.op.apply(&dx, &mut ds);
            ds += &r_p;
            let dz = rc - ipm.apply_k(&sc, &ds);
            Direction { dx, dl, ds, dz }
        };
        let steps = |dir: &Direction| -> (f64, f64) {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for (bi, blk) in ipm.blocks.iter().enumerate() {
                let d = blk.d();
                let dsm = smat(&dir.ds.as_slice()[blk.offset..blk.offset + d], blk.n);
                ap = ap.min(max_step_psd(&sc.chol_s[bi], &dsm));
                let zm = smat(&z.as_slice()[blk.offset..blk.offset + d], blk.n);
                let dzm = smat(&dir.dz.as_slice()[blk.offset..blk.offset + d], blk.n);
                ad = ad.min(match Cholesky::new(zm) {
                    Some(ch) => max_step_psd(&ch.l(), &dzm),
                    None => 0.0,
                });
            }
            for j in lp_offset..m_rows {
                if dir.ds[j] < 0.0 {
                    ap = ap.min(-s[j] / dir.ds[j]);
                }
                if dir.dz[j] < 0.0 {
                    ad = ad.min(-z[j] / dir.dz[j]);
                }
            }
            (ap, ad)
        };

        // predictor
        let rc_aff = -&z;
        let aff = solve_dir(&rc_aff);
        let (ap, ad) = steps(&aff);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mu_aff = (&s + &aff.ds * ap).dot(&(&z + &aff.dz * ad)) / ipm.nu;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let mut rc = DVector::zeros(m_rows);
        for (bi, blk) in ipm.blocks.iter().enumerate() {
            let d = blk.d();
            let zm = smat(&z.as_slice()[blk.offset..blk.offset + d], blk.n);
            let dza = smat(&aff.dz.as_slice()[blk.offset..blk.offset + d], blk.n);
            let dsa = smat(&aff.ds.as_slice()[blk.offset..blk.offset + d], blk.n);
            let corr = &dza * &dsa * &sc.sinv[bi];
            let corr = (&corr + corr.transpose()) * 0.5;
            let target = &sc.sinv[bi] * (sigma * mu) - zm - corr;
            svec_into(&target, &mut rc.as_mut_slice()[blk.offset..blk.offset + d]);
        }
        for j in lp_offset..m_rows {
            rc[j] = (sigma * mu - aff.dz[j] * aff.ds[j]) / s[j] - z[j];
        }
        let dir = solve_dir(&rc);
        let (ap, ad) = steps(&dir);
        let ap = (STEP_FRACTION * ap).min(1.0);
        let ad = (STEP_FRACTION * ad).min(1.0);
        x.axpy(ap, &dir.dx, 1.0);
        s.axpy(ap, &dir.ds, 1.0);
        lam.axpy(ad, &dir.dl, 1.0);
        z.axpy(ad, &dir.dz, 1.0);
        stuck = if ap < 1e-8 && ad < 1e-8 { stuck + 1 } else { 0 };
        if stuck >= 3 {
            break;
        }
    }

    let (x_out, rel_p, rel_d, gap) = match status {
        SolveStatus::Converged => (x, last.0, last.1, last.2),
        _ => match best {
            Some((_, bx, bp, bd, bg)) => (bx, bp, bd, bg),
            None => (x, last.0, last.1, last.2),
        },
    };
    if !x_out.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("interior-point iterate is not finite".into()));
    }
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
        method: SolverMethod::InteriorPoint,
        gap,
        equalities_kept: e.nrows(),
    })
}
