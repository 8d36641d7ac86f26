//! Restricted Hartree-Fock for hydrogen clusters in STO-3G.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::basis::ContractedS;
use super::integrals::{AoIntegrals, Nucleus};
use super::{transform_eri, GeometryHChain, Hamiltonian};
use crate::error::{Error, Result};

/// Below this separation (angstrom) nuclei are treated as overlapping.
pub const MIN_BOND_LENGTH: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfOptions {
    pub max_iterations: usize,
    pub energy_tol: f64,
    pub density_tol: f64,
    /// Fraction of the previous density kept at each step.
    pub damping: f64,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            energy_tol: 1e-10,
            density_tol: 1e-8,
            damping: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScfOutcome {
    /// Hamiltonian in the converged MO basis.
    pub hamiltonian: Hamiltonian,
    pub scf_energy: f64,
    pub iterations: usize,
    pub orbital_energies: DVector<f64>,
    /// AO -> MO coefficients (columns are MOs).
    pub mo_coefficients: DMatrix<f64>,
    pub ao: AoIntegrals,
}

/// Hydrogen chain Hamiltonian in its RHF molecular-orbital basis.
pub fn build_h_chain(geom: &GeometryHChain) -> Result<Hamiltonian> {
    build_h_chain_with(geom, &ScfOptions::default()).map(|o| o.hamiltonian)
}

pub fn build_h_chain_with(geom: &GeometryHChain, opts: &ScfOptions) -> Result<ScfOutcome> {
    geom.validate()?;
    if geom.n_atoms > 1 && geom.bond_length < MIN_BOND_LENGTH {
        return Err(Error::InvalidInput(format!(
            "bond length {} A below the {} A floor: nuclei overlap",
            geom.bond_length, MIN_BOND_LENGTH
        )));
    }
    build_hydrogen_cluster(&geom.positions_bohr(), opts)
}

/// Neutral hydrogen cluster at arbitrary positions (bohr), one 1s shell per atom.
///
/// Odd electron counts put a single electron in the highest occupied orbital
/// and build the Fock operator from that spin-averaged density.
pub fn build_hydrogen_cluster(positions: &[[f64; 3]], opts: &ScfOptions) -> Result<ScfOutcome> {
    let n = positions.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty cluster".into()));
    }
    let basis: Vec<ContractedS> = positions
        .iter()
        .map(|&c| ContractedS::sto3g_hydrogen(c))
        .collect();
    let nuclei: Vec<Nucleus> = positions
        .iter()
        .map(|&p| Nucleus {
            position: p,
            charge: 1.0,
        })
        .collect();
    let ao = AoIntegrals::compute(&basis, &nuclei);
    let n_electrons = n;

    let s_eig = SymmetricEigen::new(ao.overlap.clone());
    let s_min = s_eig.eigenvalues.min();
    if s_min < 1e-10 {
        return Err(Error::InvalidInput(format!(
            "overlap matrix is singular (smallest eigenvalue {s_min:.3e}): nuclei overlap"
        )));
    }
    let inv_sqrt = DMatrix::from_diagonal(&s_eig.eigenvalues.map(|v| v.sqrt().recip()));
    let x = &s_eig.eigenvectors * inv_sqrt * s_eig.eigenvectors.transpose();

    let hcore = ao.core_hamiltonian();
    let occupations: Vec<f64> = (0..n)
        .map(|i| {
            if 2 * i + 1 < n_electrons {
                2.0
            } else if 2 * i < n_electrons {
                1.0
            } else {
                0.0
            }
        })
        .collect();

    let diagonalize = |f: &DMatrix<f64>| -> (DVector<f64>, DMatrix<f64>) {
        let fp = x.transpose() * f * &x;
        let (vals, vecs) = crate::linalg::sym_eigen_sorted(fp);
        (vals, &x * vecs)
    };

    let (mut eps, mut c) = diagonalize(&hcore);
    let mut p = density(&c, &occupations);
    let mut energy = scf_energy(&hcore, &fock(&hcore, &ao.eri, &p), &p) + ao.nuclear_repulsion;
    let mut converged = n == 1;
    let mut iterations = 0;
    let mut de = f64::INFINITY;
    let mut dp = f64::INFINITY;
    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let f = fock(&hcore, &ao.eri, &p);
        let (e_new, c_new) = diagonalize(&f);
        let p_calc = density(&c_new, &occupations);
        dp = (&p_calc - &p).abs().max();
        let p_next = &p_calc * (1.0 - opts.damping) + &p * opts.damping;
        let f_next = fock(&hcore, &ao.eri, &p_calc);
        let e_tot = scf_energy(&hcore, &f_next, &p_calc) + ao.nuclear_repulsion;
        de = (e_tot - energy).abs();
        energy = e_tot;
        eps = e_new;
        c = c_new;
        p = p_next;
        converged = de < opts.energy_tol && dp < opts.density_tol;
    }
    if !converged {
        return Err(Error::ScfNotConverged {
            iterations,
            energy_change: de,
            density_change: dp,
        });
    }

    let h_mo = c.transpose() * &hcore * &c;
    let v_mo = transform_eri(&ao.eri, &c);
    let mut ham = Hamiltonian {
        r_spatial: n,
        n_electrons,
        e_core: ao.nuclear_repulsion,
        h_one: h_mo,
        v_two: v_mo,
    };
    ham.symmetrize();
    Ok(ScfOutcome {
        hamiltonian: ham,
        scf_energy: energy,
        iterations,
        orbital_energies: eps,
        mo_coefficients: c,
        ao,
    })
}

fn density(c: &DMatrix<f64>, occ: &[f64]) -> DMatrix<f64> {
    let n = c.nrows();
    let mut p = DMatrix::zeros(n, n);
    for (k, &o) in occ.iter().enumerate() {
        if o == 0.0 {
            continue;
        }
        let col = c.column(k);
        p += col * col.transpose() * o;
    }
    p
}

fn fock(hcore: &DMatrix<f64>, eri: &[f64], p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = hcore.nrows();
    let mut f = hcore.clone();
    for i in 0..n {
        for j in 0..n {
            let mut g = 0.0;
            for k in 0..n {
                for l in 0..n {
                    let coul = eri[((i * n + j) * n + k) * n + l];
                    let exch = eri[((i * n + l) * n + k) * n + j];
                    g += p[(k, l)] * (coul - 0.5 * exch);
                }
            }
            f[(i, j)] += g;
        }
    }
    f
}

fn scf_energy(hcore: &DMatrix<f64>, f: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    0.5 * p.component_mul(&(hcore + f)).sum()
}
