//! Total-spin operator on the determinant basis.

use nalgebra::DVector;

use super::determinants::{annihilate, create, DeterminantBasis};

/// `S^2 c` via `S^2 = S_- S_+ + S_z (S_z + 1)`.
pub fn apply_s_squared(basis: &DeterminantBasis, c: &DVector<f64>) -> DVector<f64> {
    let r = basis.r_spatial;
    let ms = (basis.n_alpha as f64 - basis.n_beta as f64) / 2.0;
    let mut out = c * (ms * (ms + 1.0));
    for (idx, &cj) in c.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        let mask = basis.mask(idx);
        for q in 0..r {
            // S_+ piece: a_{q alpha}^dagger a_{q beta}
            let Some((m1, s1)) = annihilate(mask, 2 * q + 1) else { continue };
            let Some((m1, s2)) = create(m1, 2 * q) else { continue };
            for p in 0..r {
                // S_- piece: a_{p beta}^dagger a_{p alpha}
                let Some((m2, s3)) = annihilate(m1, 2 * p) else { continue };
                let Some((m2, s4)) = create(m2, 2 * p + 1) else { continue };
                if let Some(target) = basis.index_of(m2) {
                    out[target] += s1 * s2 * s3 * s4 * cj;
                }
            }
        }
    }
    out
}

pub fn s_squared_expectation(basis: &DeterminantBasis, c: &DVector<f64>) -> f64 {
    c.dot(&apply_s_squared(basis, c))
}
