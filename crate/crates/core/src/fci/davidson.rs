//! Block Davidson eigensolver for the lowest eigenpairs of a symmetric operator.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen_sorted;

#[derive(Debug, Clone, Copy)]
pub struct DavidsonOptions {
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub max_subspace: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-9,
            max_iterations: 500,
            max_subspace: 60,
        }
    }
}

fn orthonormalize_against(t: &mut DVector<f64>, basis: &[DVector<f64>]) -> f64 {
    for _ in 0..2 {
        for v in basis {
            let ov = v.dot(t);
            t.axpy(-ov, v, 1.0);
        }
    }
    let n = t.norm();
    if n > 0.0 {
        *t /= n;
    }
    n
}

/// Lowest `k` eigenpairs of the operator `apply` with diagonal `diag`.
pub fn davidson(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    diag: &[f64],
    k: usize,
    opts: &DavidsonOptions,
) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let n = diag.len();
    let k = k.min(n);
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let max_subspace = opts.max_subspace.max(3 * k).min(n);
    let n_guess = (2 * k).max(k + 4).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));

    let mut v: Vec<DVector<f64>> = Vec::new();
    let mut av: Vec<DVector<f64>> = Vec::new();
    for &i in order.iter().take(n_guess) {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        av.push(apply(&e));
        v.push(e);
    }

    let mut worst = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let m = v.len();
        let hs = DMatrix::from_fn(m, m, |i, j| v[i].dot(&av[j]));
        let hs = (&hs + hs.transpose()) * 0.5;
        let (theta, y) = sym_eigen_sorted(hs);

        let ritz = |i: usize, basis: &[DVector<f64>]| {
            let mut x = DVector::zeros(n);
            for (j, b) in basis.iter().enumerate() {
                x.axpy(y[(j, i)], b, 1.0);
            }
            x
        };
        let mut xs = Vec::with_capacity(k);
        let mut residuals = Vec::with_capacity(k);
        worst = 0.0f64;
        for i in 0..k {
            let x = ritz(i, &v);
            let ax = ritz(i, &av);
            let r = &ax - &x * theta[i];
            worst = worst.max(r.norm());
            residuals.push(r);
            xs.push(x);
        }
        if worst < opts.residual_tol {
            return Ok((theta.iter().take(k).copied().collect(), xs));
        }

        let mut new_dirs = Vec::new();
        for (i, r) in residuals.iter().enumerate() {
            if r.norm() < opts.residual_tol {
                continue;
            }
            let mut t = DVector::from_fn(n, |j, _| {
                let d = theta[i] - diag[j];
                let d = if d.abs() < 1e-8 { 1e-8f64.copysign(d) } else { d };
                r[j] / d
            });
            let mut all: Vec<DVector<f64>> = v.clone();
            all.extend(new_dirs.iter().cloned());
            if orthonormalize_against(&mut t, &all) > 1e-10 {
                new_dirs.push(t);
            }
        }
        if new_dirs.is_empty() {
            break;
        }
        if v.len() + new_dirs.len() > max_subspace {
            let keep = (2 * k).min(m);
            let kept: Vec<DVector<f64>> = (0..keep).map(|i| ritz(i, &v)).collect();
            let kept_av: Vec<DVector<f64>> = (0..keep).map(|i| ritz(i, &av)).collect();
            v = kept;
            av = kept_av;
            // Restarted vectors are orthonormal up to round-off; re-project the new ones.
            let mut fresh = Vec::new();
            for mut t in new_dirs {
                let mut all = v.clone();
                all.extend(fresh.iter().cloned());
                if orthonormalize_against(&mut t, &all) > 1e-10 {
                    fresh.push(t);
                }
            }
            new_dirs = fresh;
        }
        for t in new_dirs {
            av.push(apply(&t));
            v.push(t);
        }
    }
    Err(Error::EigenNotConverged {
        iterations: opts.max_iterations,
        residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_eigenpairs_of_tridiagonal() {
        let n = 60;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                i as f64 + 1.0
            } else if i.abs_diff(j) == 1 {
                0.3
            } else {
                0.0
            }
        });
        let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
        let (vals, vecs) = davidson(|x| &m * x, &diag, 3, &DavidsonOptions::default()).unwrap();
        let (exact, _) = sym_eigen_sorted(m.clone());
        for i in 0..3 {
            assert!((vals[i] - exact[i]).abs() < 1e-10);
            let r = &m * &vecs[i] - &vecs[i] * vals[i];
            assert!(r.norm() < 1e-8);
        }
    }
}
