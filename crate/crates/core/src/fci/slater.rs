//! Hamiltonian matrix elements between determinants (Slater-Condon rules).

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::determinants::{annihilate, create, DeterminantBasis};
use crate::hamiltonian::Hamiltonian;

/// Spin-orbital view of a spin-free Hamiltonian.
pub(crate) struct SpinOrbitalIntegrals<'a> {
    h: &'a Hamiltonian,
}

impl<'a> SpinOrbitalIntegrals<'a> {
    pub fn new(h: &'a Hamiltonian) -> Self {
        Self { h }
    }

    #[inline]
    pub fn one(&self, p: usize, q: usize) -> f64 {
        if p % 2 != q % 2 {
            0.0
        } else {
            self.h.h_one()[(p / 2, q / 2)]
        }
    }

    /// Physicist `<pq|rs>`.
    #[inline]
    pub fn phys(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        if p % 2 != r % 2 || q % 2 != s % 2 {
            0.0
        } else {
            self.h.eri(p / 2, r / 2, q / 2, s / 2)
        }
    }

    /// `<pq||rs> = <pq|rs> - <pq|sr>`.
    #[inline]
    pub fn anti(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.phys(p, q, r, s) - self.phys(p, q, s, r)
    }
}

fn occupied(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(p)
        }
    })
}

/// Diagonal element `<I|H|I>` without the core energy.
pub(crate) fn diagonal_element(ints: &SpinOrbitalIntegrals, mask: u64) -> f64 {
    let occ: Vec<usize> = occupied(mask).collect();
    let mut e = 0.0;
    for (a, &i) in occ.iter().enumerate() {
        e += ints.one(i, i);
        for &j in &occ[..a] {
            e += ints.anti(i, j, i, j);
        }
    }
    e
}

/// `<bra|H|ket>` without the core energy.
pub(crate) fn matrix_element(ints: &SpinOrbitalIntegrals, bra: u64, ket: u64) -> f64 {
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => diagonal_element(ints, ket),
        2 => {
            let i = (ket & diff).trailing_zeros() as usize;
            let a = (bra & diff).trailing_zeros() as usize;
            let (m, s1) = annihilate(ket, i).expect("hole occupied");
            let (_, s2) = create(m, a).expect("particle empty");
            let mut v = ints.one(a, i);
            for j in occupied(ket) {
                if j != i {
                    v += ints.anti(a, j, i, j);
                }
            }
            s1 * s2 * v
        }
        4 => {
            let holes: Vec<usize> = occupied(ket & diff).collect();
            let parts: Vec<usize> = occupied(bra & diff).collect();
            let (i, j) = (holes[0], holes[1]);
            let (a, b) = (parts[0], parts[1]);
            // a_a^dagger a_b^dagger a_j a_i |ket>
            let (m, s1) = annihilate(ket, i).expect("hole");
            let (m, s2) = annihilate(m, j).expect("hole");
            let (m, s3) = create(m, b).expect("particle");
            let (_, s4) = create(m, a).expect("particle");
            s1 * s2 * s3 * s4 * ints.anti(a, b, i, j)
        }
        _ => 0.0,
    }
}

/// Dense Hamiltonian matrix in the determinant basis, core energy included.
pub fn hamiltonian_matrix(h: &Hamiltonian, basis: &DeterminantBasis) -> DMatrix<f64> {
    let ints = SpinOrbitalIntegrals::new(h);
    let n = basis.len();
    let masks: Vec<u64> = basis.masks().collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = matrix_element(&ints, masks[i], masks[j]);
                    if i == j {
                        v + h.e_core()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Diagonal of the Hamiltonian matrix, core energy included.
pub fn hamiltonian_diagonal(h: &Hamiltonian, basis: &DeterminantBasis) -> Vec<f64> {
    let ints = SpinOrbitalIntegrals::new(h);
    (0..basis.len())
        .into_par_iter()
        .map(|i| diagonal_element(&ints, basis.mask(i)) + h.e_core())
        .collect()
}
