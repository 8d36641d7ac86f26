use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{PairIndex, TwoRDM};
use crate::fci::determinants::{annihilate, create};
use crate::fci::CIState;

const CHUNK: usize = 64;

/// Exact 2-RDM of a CI state.
pub fn compute_2rdm(state: &CIState) -> TwoRDM {
    let basis = &state.basis;
    let m = basis.n_spin_orbitals();
    let pairs = PairIndex::new(m);
    let np = pairs.len();
    let c = &state.coefficients;
    // fixed chunks summed in order keep the result independent of scheduling
    let kets: Vec<usize> = (0..basis.len()).collect();
    let partials: Vec<DMatrix<f64>> = kets
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = DMatrix::<f64>::zeros(np, np);
            for &ket in chunk {
                let ck = c[ket];
                if ck == 0.0 {
                    continue;
                }
                let mask = basis.mask(ket);
                for (col, &(k, l)) in pairs.pairs().iter().enumerate() {
                    // a_l a_k |ket>
                    let Some((m1, s1)) = annihilate(mask, k) else { continue };
                    let Some((m1, s2)) = annihilate(m1, l) else { continue };
                    for (row, &(i, j)) in pairs.pairs().iter().enumerate() {
                        // a+_i a+_j
                        let Some((m2, s3)) = create(m1, j) else { continue };
                        let Some((m2, s4)) = create(m2, i) else { continue };
                        if let Some(bra) = basis.index_of(m2) {
                            acc[(row, col)] += c[bra] * s1 * s2 * s3 * s4 * ck;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let matrix = partials.into_iter().fold(DMatrix::zeros(np, np), |a, b| a + b);
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    TwoRDM {
        n_electrons: basis.n_electrons(),
        r_spatial: basis.r_spatial,
        pairs,
        matrix,
    }
}
