//! Linear maps from the 2-RDM to the hole-hole and particle-hole matrices,
//! obtained by normal-ordering the operator strings.

use nalgebra::DMatrix;

use super::{HoleRDM, PairIndex, ParticleHoleRDM, TwoRDM};
use crate::error::Result;

#[inline]
fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Constant part `delta_ik delta_jl - delta_il delta_jk` of the hole map.
pub fn hole_constant(n_spin_orbitals: usize) -> DMatrix<f64> {
    let pairs = PairIndex::new(n_spin_orbitals);
    let n = pairs.len();
    // For i<j and k<l only the direct term survives.
    DMatrix::identity(n, n)
}

/// `Q^{ij}_{kl} = (d_ik d_jl - d_il d_jk) - (d_ik D^j_l + d_jl D^i_k - d_il D^j_k - d_jk D^i_l) + D^{ij}_{kl}`.
pub fn map_d_to_q(d: &TwoRDM) -> Result<HoleRDM> {
    let d1 = d.one_rdm()?.matrix;
    let pairs = d.pairs();
    let n = pairs.len();
    let mut q = hole_constant(d.n_spin_orbitals()) + d.matrix();
    for (row, &(i, j)) in pairs.pairs().iter().enumerate() {
        for (col, &(k, l)) in pairs.pairs().iter().enumerate() {
            q[(row, col)] -= delta(i, k) * d1[(j, l)] + delta(j, l) * d1[(i, k)]
                - delta(i, l) * d1[(j, k)]
                - delta(j, k) * d1[(i, l)];
        }
    }
    debug_assert_eq!(q.nrows(), n);
    Ok(HoleRDM { matrix: q })
}

/// `G^{il}_{kj} = delta_lj D^i_k - D^{ij}_{kl}`.
pub fn map_d_to_g(d: &TwoRDM) -> Result<ParticleHoleRDM> {
    let d1 = d.one_rdm()?.matrix;
    let m = d.n_spin_orbitals();
    let mut g = DMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for l in 0..m {
            for k in 0..m {
                for j in 0..m {
                    g[(i * m + l, k * m + j)] = delta(l, j) * d1[(i, k)] - d.element(i, j, k, l);
                }
            }
        }
    }
    Ok(ParticleHoleRDM {
        n_spin_orbitals: m,
        matrix: g,
    })
}
