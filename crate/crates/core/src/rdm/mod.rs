//! Reduced density matrices of fermionic states.
//!
//! Spin orbitals are interleaved (`2 p + s`). Two-body matrices live on the
//! antisymmetrized pair basis `i < j` without any `sqrt 2` factors, so the
//! pair-basis trace of the 2-RDM is `N (N - 1) / 2`.

mod build;
pub mod io;
mod maps;
mod metrics;

pub use build::compute_2rdm;
pub use maps::{hole_constant, map_d_to_g, map_d_to_q};
pub use metrics::{
    energy_from_rdm, frobenius_error, frobenius_error_vs_self, natural_occupations,
    reduced_hamiltonian, von_neumann_entropy,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue;

/// Index bookkeeping for ordered spin-orbital pairs `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairIndex {
    n_so: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairIndex {
    pub fn new(n_spin_orbitals: usize) -> Self {
        let mut pairs = Vec::with_capacity(n_spin_orbitals * n_spin_orbitals.saturating_sub(1) / 2);
        for i in 0..n_spin_orbitals {
            for j in i + 1..n_spin_orbitals {
                pairs.push((i, j));
            }
        }
        Self {
            n_so: n_spin_orbitals,
            pairs,
        }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.n_so
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Index of `i < j`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n_so);
        // pairs before row i: sum_{a<i} (n - 1 - a)
        i * (2 * self.n_so - i - 1) / 2 + (j - i - 1)
    }

    /// Pair index and antisymmetry sign of an unordered pair; `None` for `i == j`.
    #[inline]
    pub fn signed(&self, i: usize, j: usize) -> Option<(usize, f64)> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Some((self.index(i, j), 1.0)),
            std::cmp::Ordering::Greater => Some((self.index(j, i), -1.0)),
            std::cmp::Ordering::Equal => None,
        }
    }
}

/// Two-particle reduced density matrix `D^{ij}_{kl} = <a+_i a+_j a_l a_k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRDM {
    pub n_electrons: usize,
    pub r_spatial: usize,
    pairs: PairIndex,
    matrix: DMatrix<f64>,
}

impl TwoRDM {
    pub fn from_matrix(n_electrons: usize, r_spatial: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let pairs = PairIndex::new(2 * r_spatial);
        if matrix.nrows() != pairs.len() || matrix.ncols() != pairs.len() {
            return Err(Error::DimensionMismatch(format!(
                "2-RDM for {} spin orbitals must be {n}x{n}, got {}x{}",
                2 * r_spatial,
                matrix.nrows(),
                matrix.ncols(),
                n = pairs.len()
            )));
        }
        Ok(Self {
            n_electrons,
            r_spatial,
            pairs,
            matrix,
        })
    }

    pub fn zeros(n_electrons: usize, r_spatial: usize) -> Self {
        let pairs = PairIndex::new(2 * r_spatial);
        let n = pairs.len();
        Self {
            n_electrons,
            r_spatial,
            pairs,
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.r_spatial
    }

    pub fn pairs(&self) -> &PairIndex {
        &self.pairs
    }

    /// Pair-basis matrix, rows `(i<j)`, columns `(k<l)`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Element with arbitrary index order, antisymmetry applied.
    pub fn element(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        match (self.pairs.signed(i, j), self.pairs.signed(k, l)) {
            (Some((a, s)), Some((b, t))) => s * t * self.matrix[(a, b)],
            _ => 0.0,
        }
    }

    /// Full trace `sum_{ij} D^{ij}_{ij}`, which equals `N (N - 1)`.
    pub fn trace(&self) -> f64 {
        2.0 * self.matrix.trace()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            matrix: &self.matrix * alpha,
            ..self.clone()
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).abs().max()
    }

    /// `D^i_k = 1/(N-1) sum_j D^{ij}_{kj}`; needs at least two electrons.
    pub fn one_rdm(&self) -> Result<OneRDM> {
        if self.n_electrons < 2 {
            return Err(Error::InvalidInput(
                "the 1-RDM cannot be recovered by contraction for fewer than two electrons".into(),
            ));
        }
        let m = self.n_spin_orbitals();
        let scale = 1.0 / (self.n_electrons as f64 - 1.0);
        let mut d1 = DMatrix::zeros(m, m);
        for i in 0..m {
            for k in 0..m {
                let mut s = 0.0;
                for j in 0..m {
                    s += self.element(i, j, k, j);
                }
                d1[(i, k)] = s * scale;
            }
        }
        Ok(OneRDM {
            n_electrons: self.n_electrons,
            matrix: d1,
        })
    }

    /// Checks trace, Hermiticity and (optionally) positivity.
    pub fn validate(&self, tol: f64, require_psd: bool) -> Result<()> {
        let n = self.n_electrons as f64;
        let tr = self.trace();
        if (tr - n * (n - 1.0)).abs() > tol {
            return Err(Error::InvalidInput(format!("2-RDM trace {tr} != N(N-1) = {}", n * (n - 1.0))));
        }
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidInput(format!("2-RDM not Hermitian ({herm:.3e})")));
        }
        if require_psd {
            let lo = self.min_eigenvalue();
            if lo < -tol {
                return Err(Error::InvalidInput(format!("2-RDM has eigenvalue {lo:.3e}")));
            }
        }
        Ok(())
    }
}

/// One-particle reduced density matrix over spin orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct OneRDM {
    pub n_electrons: usize,
    pub matrix: DMatrix<f64>,
}

impl OneRDM {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Block of one spin (`0` alpha, `1` beta) over spatial orbitals.
    pub fn spin_block(&self, spin: usize) -> DMatrix<f64> {
        let r = self.matrix.nrows() / 2;
        DMatrix::from_fn(r, r, |p, q| self.matrix[(2 * p + spin, 2 * q + spin)])
    }
}

/// Hole-hole matrix `Q^{ij}_{kl} = <a_i a_j a+_l a+_k>` on the pair basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleRDM {
    pub matrix: DMatrix<f64>,
}

impl HoleRDM {
    pub fn trace(&self) -> f64 {
        2.0 * self.matrix.trace()
    }
}

/// Particle-hole matrix `G^{il}_{kj} = <a+_i a_l a+_j a_k>`, row `i M + l`, column `k M + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleHoleRDM {
    pub n_spin_orbitals: usize,
    pub matrix: DMatrix<f64>,
}

impl ParticleHoleRDM {
    pub fn element(&self, i: usize, l: usize, k: usize, j: usize) -> f64 {
        let m = self.n_spin_orbitals;
        self.matrix[(i * m + l, k * m + j)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}
