//! Closed-form integrals over contracted s-type Gaussians.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::basis::ContractedS;

/// Point charge (bohr, atomic units of charge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nucleus {
    pub position: [f64; 3],
    pub charge: f64,
}

/// Zeroth-order Boys function `F0(t) = int_0^1 exp(-t u^2) du`.
pub fn boys_f0(t: f64) -> f64 {
    if t < 1e-8 {
        1.0 - t / 3.0 + t * t / 10.0
    } else {
        0.5 * (PI / t).sqrt() * libm::erf(t.sqrt())
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

fn gaussian_center(a: f64, pa: &[f64; 3], b: f64, pb: &[f64; 3]) -> [f64; 3] {
    let p = a + b;
    [
        (a * pa[0] + b * pb[0]) / p,
        (a * pa[1] + b * pb[1]) / p,
        (a * pa[2] + b * pb[2]) / p,
    ]
}

pub fn overlap(f: &ContractedS, g: &ContractedS) -> f64 {
    let r2 = dist2(&f.center, &g.center);
    let mut s = 0.0;
    for pa in &f.primitives {
        for pb in &g.primitives {
            let (a, b) = (pa.exponent, pb.exponent);
            let p = a + b;
            s += pa.weight * pb.weight * (PI / p).powf(1.5) * (-a * b / p * r2).exp();
        }
    }
    s
}

pub fn kinetic(f: &ContractedS, g: &ContractedS) -> f64 {
    let r2 = dist2(&f.center, &g.center);
    let mut t = 0.0;
    for pa in &f.primitives {
        for pb in &g.primitives {
            let (a, b) = (pa.exponent, pb.exponent);
            let p = a + b;
            let mu = a * b / p;
            let s = (PI / p).powf(1.5) * (-mu * r2).exp();
            t += pa.weight * pb.weight * mu * (3.0 - 2.0 * mu * r2) * s;
        }
    }
    t
}

pub fn nuclear_attraction(f: &ContractedS, g: &ContractedS, nuclei: &[Nucleus]) -> f64 {
    let r2 = dist2(&f.center, &g.center);
    let mut v = 0.0;
    for pa in &f.primitives {
        for pb in &g.primitives {
            let (a, b) = (pa.exponent, pb.exponent);
            let p = a + b;
            let pc = gaussian_center(a, &f.center, b, &g.center);
            let pref = -2.0 * PI / p * (-a * b / p * r2).exp();
            for nuc in nuclei {
                v += pa.weight * pb.weight * pref * nuc.charge * boys_f0(p * dist2(&pc, &nuc.position));
            }
        }
    }
    v
}

/// `(fg|hk)` in chemist notation.
pub fn electron_repulsion(f: &ContractedS, g: &ContractedS, h: &ContractedS, k: &ContractedS) -> f64 {
    let rab = dist2(&f.center, &g.center);
    let rcd = dist2(&h.center, &k.center);
    let mut v = 0.0;
    for pa in &f.primitives {
        for pb in &g.primitives {
            let (a, b) = (pa.exponent, pb.exponent);
            let p = a + b;
            let pp = gaussian_center(a, &f.center, b, &g.center);
            let eab = (-a * b / p * rab).exp();
            for pc in &h.primitives {
                for pd in &k.primitives {
                    let (c, d) = (pc.exponent, pd.exponent);
                    let q = c + d;
                    let qq = gaussian_center(c, &h.center, d, &k.center);
                    let ecd = (-c * d / q * rcd).exp();
                    let pref = 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt());
                    let t = p * q / (p + q) * dist2(&pp, &qq);
                    v += pa.weight * pb.weight * pc.weight * pd.weight * pref * eab * ecd * boys_f0(t);
                }
            }
        }
    }
    v
}

/// Integrals over the atomic (non-orthogonal) basis.
#[derive(Debug, Clone)]
pub struct AoIntegrals {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    /// Chemist-notation `(ij|kl)`, `l` fastest.
    pub eri: Vec<f64>,
    pub nuclear_repulsion: f64,
}

impl AoIntegrals {
    pub fn compute(basis: &[ContractedS], nuclei: &[Nucleus]) -> Self {
        let n = basis.len();
        let mut s = DMatrix::zeros(n, n);
        let mut t = DMatrix::zeros(n, n);
        let mut v = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let sij = overlap(&basis[i], &basis[j]);
                let tij = kinetic(&basis[i], &basis[j]);
                let vij = nuclear_attraction(&basis[i], &basis[j], nuclei);
                s[(i, j)] = sij;
                s[(j, i)] = sij;
                t[(i, j)] = tij;
                t[(j, i)] = tij;
                v[(i, j)] = vij;
                v[(j, i)] = vij;
            }
        }
        let mut eri = vec![0.0; n.pow(4)];
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                            continue;
                        }
                        let val = electron_repulsion(&basis[i], &basis[j], &basis[k], &basis[l]);
                        for (a, b, c, d) in [
                            (i, j, k, l),
                            (j, i, k, l),
                            (i, j, l, k),
                            (j, i, l, k),
                            (k, l, i, j),
                            (l, k, i, j),
                            (k, l, j, i),
                            (l, k, j, i),
                        ] {
                            eri[idx(a, b, c, d)] = val;
                        }
                    }
                }
            }
        }
        let mut e_nuc = 0.0;
        for (a, na) in nuclei.iter().enumerate() {
            for nb in &nuclei[..a] {
                e_nuc += na.charge * nb.charge / dist2(&na.position, &nb.position).sqrt();
            }
        }
        Self {
            overlap: s,
            kinetic: t,
            nuclear: v,
            eri,
            nuclear_repulsion: e_nuc,
        }
    }

    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.nuclear
    }
}
