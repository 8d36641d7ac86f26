//! STO-3G basis for hydrogen.
//!
//! Exponents and contraction coefficients are the standard STO-3G values for
//! a hydrogen 1s shell (Slater exponent 1.24), as tabulated by Hehre, Stewart
//! and Pople (J. Chem. Phys. 51, 2657, 1969) and distributed by the Basis Set
//! Exchange. Coefficients multiply normalized primitives and the contraction is then
//! renormalized to unit overlap.

use std::f64::consts::PI;

/// CODATA 2018 Bohr radius.
pub const BOHR_IN_ANGSTROM: f64 = 0.529_177_210_903;

pub const STO3G_H_EXPONENTS: [f64; 3] = [3.425_250_91, 0.623_913_73, 0.168_855_40];
pub const STO3G_H_COEFFICIENTS: [f64; 3] = [0.154_328_97, 0.535_328_14, 0.444_634_54];

/// Normalized s-type Gaussian primitive `N exp(-alpha |r - A|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SPrimitive {
    pub exponent: f64,
    /// Contraction coefficient with the primitive normalization folded in.
    pub weight: f64,
}

/// Contracted s-type Gaussian centered on `center` (bohr).
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedS {
    pub center: [f64; 3],
    pub primitives: Vec<SPrimitive>,
}

/// `(2 alpha / pi)^{3/4}`.
pub fn s_normalization(alpha: f64) -> f64 {
    (2.0 * alpha / PI).powf(0.75)
}

impl ContractedS {
    pub fn sto3g_hydrogen(center: [f64; 3]) -> Self {
        let primitives = STO3G_H_EXPONENTS
            .iter()
            .zip(STO3G_H_COEFFICIENTS.iter())
            .map(|(&a, &d)| SPrimitive {
                exponent: a,
                weight: d * s_normalization(a),
            })
            .collect();
        Self { center, primitives }.normalized()
    }

    /// Rescales the contraction to unit self-overlap.
    pub fn normalized(mut self) -> Self {
        let mut s = 0.0;
        for a in &self.primitives {
            for b in &self.primitives {
                s += a.weight * b.weight * (PI / (a.exponent + b.exponent)).powf(1.5);
            }
        }
        let scale = s.sqrt().recip();
        for p in &mut self.primitives {
            p.weight *= scale;
        }
        self
    }
}
