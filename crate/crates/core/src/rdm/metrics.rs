use nalgebra::DMatrix;

use super::{OneRDM, PairIndex, TwoRDM};
use crate::error::{Error, Result};
use crate::fci::slater::SpinOrbitalIntegrals;
use crate::hamiltonian::Hamiltonian;
use crate::linalg::sym_eigen_sorted;

fn check_dims(h: &Hamiltonian, d: &TwoRDM) -> Result<()> {
    if h.r_spatial() != d.r_spatial {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian has {} orbitals, 2-RDM has {}",
            h.r_spatial(),
            d.r_spatial
        )));
    }
    Ok(())
}

/// `E = e_core + sum h_ik D^i_k + 1/2 sum <ij|kl> D^{ij}_{kl}`.
pub fn energy_from_rdm(h: &Hamiltonian, d: &TwoRDM) -> Result<f64> {
    check_dims(h, d)?;
    let ints = SpinOrbitalIntegrals::new(h);
    let d1 = d.one_rdm()?.matrix;
    let m = d.n_spin_orbitals();
    let mut e = h.e_core();
    for i in 0..m {
        for k in 0..m {
            e += ints.one(i, k) * d1[(i, k)];
        }
    }
    for (row, &(i, j)) in d.pairs().pairs().iter().enumerate() {
        for (col, &(k, l)) in d.pairs().pairs().iter().enumerate() {
            e += ints.anti(i, j, k, l) * d.matrix()[(row, col)];
        }
    }
    Ok(e)
}

/// Pair-basis matrix `K` with `E = e_core + <K, D>_F` for `N`-electron 2-RDMs.
pub fn reduced_hamiltonian(h: &Hamiltonian, n_electrons: usize) -> Result<DMatrix<f64>> {
    if n_electrons < 2 {
        return Err(Error::InvalidInput("reduced Hamiltonian needs at least two electrons".into()));
    }
    let ints = SpinOrbitalIntegrals::new(h);
    let pairs = PairIndex::new(2 * h.r_spatial());
    let scale = 1.0 / (n_electrons as f64 - 1.0);
    let n = pairs.len();
    let p = pairs.pairs();
    Ok(DMatrix::from_fn(n, n, |row, col| {
        let (i, j) = p[row];
        let (k, l) = p[col];
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let one = ints.one(i, k) * delta(j, l) - ints.one(i, l) * delta(j, k) - ints.one(j, k) * delta(i, l)
            + ints.one(j, l) * delta(i, k);
        ints.anti(i, j, k, l) + scale * one
    }))
}

const HERMITIAN_TOL: f64 = 1e-8;
const OCCUPATION_TOL: f64 = 1e-9;

/// Eigenvalues of the alpha block of the 1-RDM, descending.
pub fn natural_occupations(d1: &OneRDM) -> Result<Vec<f64>> {
    let herm = (&d1.matrix - d1.matrix.transpose()).abs().max();
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidInput(format!("1-RDM is not Hermitian ({herm:.3e})")));
    }
    let block = d1.spin_block(0);
    let block = (&block + block.transpose()) * 0.5;
    let (vals, _) = sym_eigen_sorted(block);
    Ok(vals.iter().rev().copied().collect())
}

/// `-sum n ln n`, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(occupations: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &n in occupations {
        if !(-OCCUPATION_TOL..=1.0 + OCCUPATION_TOL).contains(&n) {
            return Err(Error::InvalidInput(format!("occupation {n} outside [0, 1]")));
        }
        let n = n.clamp(0.0, 1.0);
        if n > 0.0 {
            s -= n * n.ln();
        }
    }
    Ok(s.max(0.0))
}

fn frobenius_parts(d: &TwoRDM, d_ref: &TwoRDM) -> Result<(f64, f64, f64)> {
    if d.matrix().shape() != d_ref.matrix().shape() {
        return Err(Error::DimensionMismatch(format!(
            "2-RDM shapes {:?} and {:?} differ",
            d.matrix().shape(),
            d_ref.matrix().shape()
        )));
    }
    Ok(((d.matrix() - d_ref.matrix()).norm(), d_ref.matrix().norm(), d.matrix().norm()))
}

/// `||d - d_ref||_F / ||d_ref||_F` on the pair-basis matrices.
pub fn frobenius_error(d: &TwoRDM, d_ref: &TwoRDM) -> Result<f64> {
    let (diff, reference, _) = frobenius_parts(d, d_ref)?;
    Ok(diff / reference)
}

/// `||d - d_ref||_F / ||d||_F`, the alternative normalization.
pub fn frobenius_error_vs_self(d: &TwoRDM, d_ref: &TwoRDM) -> Result<f64> {
    let (diff, _, own) = frobenius_parts(d, d_ref)?;
    Ok(diff / own)
}
