//! Full configuration interaction in the lowest-|M_s| determinant sector.

mod container;
mod davidson;
pub mod determinants;
mod sigma;
pub mod slater;
pub mod spin;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use container::{states_from_json, states_to_json};
pub use davidson::{davidson, DavidsonOptions};
pub use determinants::DeterminantBasis;
pub use sigma::SigmaBuilder;
pub use slater::{hamiltonian_diagonal, hamiltonian_matrix};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{fix_sign, sym_eigen_sorted};

/// States whose energies differ by less than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Largest `S^2` still counted as a singlet.
pub const SINGLET_S2_MAX: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FciMethod {
    /// Dense below `dense_limit`, Davidson above.
    Auto,
    Dense,
    Davidson,
}

#[derive(Debug, Clone, Copy)]
pub struct FciOptions {
    pub method: FciMethod,
    /// Largest space diagonalized densely by `Auto`. The dense path stores
    /// `8 n^2` bytes and costs `O(n^3)`.
    pub dense_limit: usize,
    /// Hard cap on the determinant count.
    pub max_determinants: usize,
    pub residual_tol: f64,
    pub davidson: DavidsonOptions,
}

impl Default for FciOptions {
    fn default() -> Self {
        Self {
            method: FciMethod::Auto,
            dense_limit: 2_500,
            max_determinants: 2_000_000,
            residual_tol: 1e-8,
            davidson: DavidsonOptions::default(),
        }
    }
}

/// An FCI eigenvector with its energy and total-spin diagnostics.
#[derive(Debug, Clone)]
pub struct CIState {
    pub basis: Arc<DeterminantBasis>,
    pub coefficients: DVector<f64>,
    pub energy: f64,
    pub s_squared: f64,
    pub state_index: usize,
}

impl CIState {
    pub fn is_singlet(&self) -> bool {
        self.s_squared < SINGLET_S2_MAX
    }

    /// Spin quantum number `S` recovered from `S(S+1)`.
    pub fn spin(&self) -> f64 {
        ((1.0 + 4.0 * self.s_squared.max(0.0)).sqrt() - 1.0) / 2.0
    }
}

/// Lowest `k_states` eigenstates, ordered by energy.
type ResidualFn<'a> = Box<dyn Fn(&DVector<f64>, f64) -> f64 + 'a>;

pub fn solve_fci(h: &Hamiltonian, k_states: usize) -> Result<Vec<CIState>> {
    solve_fci_with(h, k_states, &FciOptions::default())
}

pub fn solve_fci_with(h: &Hamiltonian, k_states: usize, opts: &FciOptions) -> Result<Vec<CIState>> {
    if k_states == 0 {
        return Err(Error::InvalidInput("at least one state must be requested".into()));
    }
    let (na, nb) = h.spin_counts();
    let size = DeterminantBasis::dimension_for(h.r_spatial(), na, nb);
    if size > opts.max_determinants {
        return Err(Error::DeterminantBudget {
            size,
            budget: opts.max_determinants,
        });
    }
    let dense = match opts.method {
        FciMethod::Dense => true,
        FciMethod::Davidson => false,
        FciMethod::Auto => size <= opts.dense_limit,
    };
    let basis = Arc::new(DeterminantBasis::new(h.r_spatial(), na, nb)?);
    let k = k_states.min(size);

    let (energies, vectors, residual_of): (Vec<f64>, Vec<DVector<f64>>, ResidualFn) =
        if dense {
            let hm = hamiltonian_matrix(h, &basis);
            let (vals, vecs) = sym_eigen_sorted(hm.clone());
            // keep a whole degenerate multiplet at the cut
            let mut keep = k;
            while keep < size && (vals[keep] - vals[keep - 1]).abs() < DEGENERACY_TOL {
                keep += 1;
            }
            let vectors = (0..keep).map(|i| vecs.column(i).into_owned()).collect();
            let energies = vals.iter().take(keep).copied().collect();
            (energies, vectors, Box::new(move |c, e| (&hm * c - c * e).norm()))
        } else {
            let sigma = SigmaBuilder::new(h, &basis);
            let diag = hamiltonian_diagonal(h, &basis);
            let extra = (k + 2).min(size);
            let (vals, vecs) = davidson(|c| sigma.apply(c), &diag, extra, &opts.davidson)?;
            (vals, vecs, Box::new(move |c, e| (sigma.apply(c) - c * e).norm()))
        };

    let (energies, vectors, s2) = spin_resolve(&basis, energies, vectors);
    let mut states = Vec::with_capacity(k);
    for (i, ((energy, coefficients), s_squared)) in energies.into_iter().zip(vectors).zip(s2).take(k).enumerate() {
        let residual = residual_of(&coefficients, energy);
        if residual > opts.residual_tol {
            return Err(Error::EigenNotConverged {
                iterations: 0,
                residual,
            });
        }
        states.push(CIState {
            basis: Arc::clone(&basis),
            coefficients,
            energy,
            s_squared,
            state_index: i,
        });
    }
    Ok(states)
}

/// Rotates each degenerate cluster onto `S^2` eigenvectors and fixes signs.
fn spin_resolve(
    basis: &DeterminantBasis,
    energies: Vec<f64>,
    mut vectors: Vec<DVector<f64>>,
) -> (Vec<f64>, Vec<DVector<f64>>, Vec<f64>) {
    let mut s2 = vec![0.0; energies.len()];
    let mut start = 0;
    while start < energies.len() {
        let mut end = start + 1;
        while end < energies.len() && (energies[end] - energies[end - 1]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        let cluster: Vec<DVector<f64>> = vectors[start..end].to_vec();
        let spun: Vec<DVector<f64>> = cluster.iter().map(|c| spin::apply_s_squared(basis, c)).collect();
        let m = end - start;
        if m == 1 {
            s2[start] = cluster[0].dot(&spun[0]);
            fix_sign(&mut vectors[start]);
        } else {
            let sm = DMatrix::from_fn(m, m, |i, j| 0.5 * (cluster[i].dot(&spun[j]) + cluster[j].dot(&spun[i])));
            let (vals, rot) = sym_eigen_sorted(sm);
            for a in 0..m {
                let mut v = DVector::zeros(cluster[0].len());
                for (b, c) in cluster.iter().enumerate() {
                    v.axpy(rot[(b, a)], c, 1.0);
                }
                v /= v.norm();
                fix_sign(&mut v);
                vectors[start + a] = v;
                s2[start + a] = vals[a];
            }
        }
        start = end;
    }
    (energies, vectors, s2)
}

/// Ground singlet plus the `m` lowest singlet excited states, in energy order.
pub fn select_singlets(states: &[CIState], m: usize) -> Result<Vec<CIState>> {
    let mut singlets: Vec<&CIState> = states.iter().filter(|s| s.is_singlet()).collect();
    singlets.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.state_index.cmp(&b.state_index)));
    if singlets.len() < m + 1 {
        return Err(Error::NotEnoughSinglets {
            available: singlets.len(),
            requested: m + 1,
        });
    }
    Ok(singlets.into_iter().take(m + 1).cloned().collect())
}
