//! Electronic Hamiltonians in an orthonormal spatial-orbital basis.
//!
//! Hydrogen chains are built in-house from a minimal s-type Gaussian basis
//! ([`build_h_chain`]); every other system enters through the FCIDUMP text
//! format ([`parse_fcidump`] / [`write_fcidump`]).

pub mod basis;
mod fcidump;
pub mod integrals;
pub mod scf;

pub use fcidump::{parse_fcidump, write_fcidump};
pub use scf::{build_h_chain, build_h_chain_with, ScfOptions, ScfOutcome};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance for the symmetry invariants of the integral arrays.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Spin-free electronic Hamiltonian.
///
/// `v_two` holds chemist-notation integrals `(ij|kl)` over spatial orbitals,
/// stored densely with `l` fastest.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    r_spatial: usize,
    n_electrons: usize,
    e_core: f64,
    h_one: DMatrix<f64>,
    v_two: Vec<f64>,
}

impl Hamiltonian {
    /// Builds a Hamiltonian, checking the electron count and the integral symmetries.
    pub fn new(
        n_electrons: usize,
        e_core: f64,
        h_one: DMatrix<f64>,
        v_two: Vec<f64>,
    ) -> Result<Self> {
        let r = h_one.nrows();
        if r == 0 || h_one.ncols() != r {
            return Err(Error::InvalidInput(format!(
                "one-electron matrix must be square and non-empty, got {}x{}",
                h_one.nrows(),
                h_one.ncols()
            )));
        }
        if v_two.len() != r * r * r * r {
            return Err(Error::DimensionMismatch(format!(
                "two-electron tensor has {} entries, expected {}",
                v_two.len(),
                r * r * r * r
            )));
        }
        if n_electrons == 0 || n_electrons > 2 * r {
            return Err(Error::InvalidInput(format!(
                "electron count {n_electrons} outside (0, {}]",
                2 * r
            )));
        }
        let h = Self {
            r_spatial: r,
            n_electrons,
            e_core,
            h_one,
            v_two,
        };
        h.check_symmetry()?;
        Ok(h)
    }

    /// Hamiltonian with every integral zero.
    pub fn zeros(r_spatial: usize, n_electrons: usize, e_core: f64) -> Result<Self> {
        Self::new(
            n_electrons,
            e_core,
            DMatrix::zeros(r_spatial, r_spatial),
            vec![0.0; r_spatial.pow(4)],
        )
    }

    fn check_symmetry(&self) -> Result<()> {
        let r = self.r_spatial;
        for i in 0..r {
            for j in 0..i {
                if (self.h_one[(i, j)] - self.h_one[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidInput(format!(
                        "one-electron integrals not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let v = self.eri(i, j, k, l);
                        let partners = [
                            self.eri(j, i, k, l),
                            self.eri(i, j, l, k),
                            self.eri(k, l, i, j),
                        ];
                        if partners.iter().any(|p| (p - v).abs() > SYMMETRY_TOL) {
                            return Err(Error::InvalidInput(format!(
                                "two-electron integrals lack 8-fold symmetry at ({i}{j}|{k}{l})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn r_spatial(&self) -> usize {
        self.r_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    pub fn h_one(&self) -> &DMatrix<f64> {
        &self.h_one
    }

    /// Raw chemist-notation tensor, `l` fastest.
    pub fn v_two(&self) -> &[f64] {
        &self.v_two
    }

    /// `(ij|kl)` in chemist notation.
    #[inline]
    pub fn eri(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let r = self.r_spatial;
        self.v_two[((i * r + j) * r + k) * r + l]
    }

    /// Alpha and beta electron counts of the lowest-|M_s| sector.
    pub fn spin_counts(&self) -> (usize, usize) {
        let n = self.n_electrons;
        (n.div_ceil(2), n / 2)
    }

    /// Largest absolute difference over all fields; `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &Hamiltonian) -> Option<f64> {
        if self.r_spatial != other.r_spatial || self.n_electrons != other.n_electrons {
            return None;
        }
        let mut d = (self.e_core - other.e_core).abs();
        for (a, b) in self.h_one.iter().zip(other.h_one.iter()) {
            d = d.max((a - b).abs());
        }
        for (a, b) in self.v_two.iter().zip(&other.v_two) {
            d = d.max((a - b).abs());
        }
        Some(d)
    }

    /// Re-expresses the integrals in the orbitals `phi'_p = sum_q phi_q C_qp`.
    ///
    /// `c` must be square and orthogonal for the result to describe the same
    /// physics; only the shape is checked here.
    pub fn transformed(&self, c: &DMatrix<f64>) -> Result<Hamiltonian> {
        let r = self.r_spatial;
        if c.nrows() != r || c.ncols() != r {
            return Err(Error::DimensionMismatch(format!(
                "rotation is {}x{}, Hamiltonian has {r} orbitals",
                c.nrows(),
                c.ncols()
            )));
        }
        let h = c.transpose() * &self.h_one * c;
        let v = transform_eri(&self.v_two, c);
        let mut out = Hamiltonian {
            r_spatial: r,
            n_electrons: self.n_electrons,
            e_core: self.e_core,
            h_one: h,
            v_two: v,
        };
        out.symmetrize();
        Ok(out)
    }

    /// Averages away round-off asymmetry in place.
    pub(crate) fn symmetrize(&mut self) {
        let r = self.r_spatial;
        let h = self.h_one.clone();
        self.h_one = (&h + h.transpose()) * 0.5;
        let old = self.v_two.clone();
        let at = |i: usize, j: usize, k: usize, l: usize| old[((i * r + j) * r + k) * r + l];
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let s = at(i, j, k, l)
                            + at(j, i, k, l)
                            + at(i, j, l, k)
                            + at(j, i, l, k)
                            + at(k, l, i, j)
                            + at(l, k, i, j)
                            + at(k, l, j, i)
                            + at(l, k, j, i);
                        self.v_two[((i * r + j) * r + k) * r + l] = s / 8.0;
                    }
                }
            }
        }
    }
}

/// Four-index transformation of a dense chemist-notation tensor, one index at a time.
pub(crate) fn transform_eri(v: &[f64], c: &DMatrix<f64>) -> Vec<f64> {
    let n_in = c.nrows();
    let n_out = c.ncols();
    // (pq|rs) -> (pq|rd)
    let mut a = vec![0.0; n_in * n_in * n_in * n_out];
    for p in 0..n_in {
        for q in 0..n_in {
            for r in 0..n_in {
                let base = ((p * n_in + q) * n_in + r) * n_in;
                for d in 0..n_out {
                    let mut s = 0.0;
                    for t in 0..n_in {
                        s += v[base + t] * c[(t, d)];
                    }
                    a[((p * n_in + q) * n_in + r) * n_out + d] = s;
                }
            }
        }
    }
    // (pq|rd) -> (pq|cd)
    let mut b = vec![0.0; n_in * n_in * n_out * n_out];
    for p in 0..n_in {
        for q in 0..n_in {
            for cc in 0..n_out {
                for d in 0..n_out {
                    let mut s = 0.0;
                    for r in 0..n_in {
                        s += a[((p * n_in + q) * n_in + r) * n_out + d] * c[(r, cc)];
                    }
                    b[((p * n_in + q) * n_out + cc) * n_out + d] = s;
                }
            }
        }
    }
    // (pq|cd) -> (pb|cd)
    let mut e = vec![0.0; n_in * n_out * n_out * n_out];
    for p in 0..n_in {
        for bb in 0..n_out {
            for cc in 0..n_out {
                for d in 0..n_out {
                    let mut s = 0.0;
                    for q in 0..n_in {
                        s += b[((p * n_in + q) * n_out + cc) * n_out + d] * c[(q, bb)];
                    }
                    e[((p * n_out + bb) * n_out + cc) * n_out + d] = s;
                }
            }
        }
    }
    // (pb|cd) -> (ab|cd)
    let mut out = vec![0.0; n_out.pow(4)];
    for aa in 0..n_out {
        for bb in 0..n_out {
            for cc in 0..n_out {
                for d in 0..n_out {
                    let mut s = 0.0;
                    for p in 0..n_in {
                        s += e[((p * n_out + bb) * n_out + cc) * n_out + d] * c[(p, aa)];
                    }
                    out[((aa * n_out + bb) * n_out + cc) * n_out + d] = s;
                }
            }
        }
    }
    out
}

/// Linear hydrogen chain geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryHChain {
    pub n_atoms: usize,
    /// H-H separation in angstrom.
    pub bond_length: f64,
}

impl GeometryHChain {
    pub fn new(n_atoms: usize, bond_length: f64) -> Result<Self> {
        let g = Self {
            n_atoms,
            bond_length,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::InvalidInput("hydrogen chain needs at least one atom".into()));
        }
        if !(self.bond_length.is_finite() && self.bond_length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bond length must be positive, got {}",
                self.bond_length
            )));
        }
        Ok(())
    }

    /// Nuclear positions along z, in bohr.
    pub fn positions_bohr(&self) -> Vec<[f64; 3]> {
        let step = self.bond_length / basis::BOHR_IN_ANGSTROM;
        (0..self.n_atoms)
            .map(|i| [0.0, 0.0, i as f64 * step])
            .collect()
    }
}
