//! Brute-force reference implementations used across the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nalgebra::Complex;
use sv2rdm::fci::{select_singlets, solve_fci, CIState};
use sv2rdm::hamiltonian::{build_h_chain, GeometryHChain, Hamiltonian};

/// Vector over all `2^m` occupation patterns of `m` spin orbitals.
#[derive(Debug, Clone)]
pub struct Fock {
    pub m: usize,
    pub amp: Vec<f64>,
}

impl Fock {
    pub fn zeros(m: usize) -> Self {
        Self { m, amp: vec![0.0; 1 << m] }
    }

    /// `a_p`, sign `(-1)^(occupied orbitals below p)`.
    pub fn a(&self, p: usize) -> Self {
        let mut out = Self::zeros(self.m);
        for (s, &c) in self.amp.iter().enumerate() {
            if c != 0.0 && s >> p & 1 == 1 {
                let below = (0..p).filter(|&q| s >> q & 1 == 1).count();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                out.amp[s & !(1 << p)] += sign * c;
            }
        }
        out
    }

    /// `a_p^dagger`.
    pub fn ad(&self, p: usize) -> Self {
        let mut out = Self::zeros(self.m);
        for (s, &c) in self.amp.iter().enumerate() {
            if c != 0.0 && s >> p & 1 == 0 {
                let below = (0..p).filter(|&q| s >> q & 1 == 1).count();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                out.amp[s | 1 << p] += sign * c;
            }
        }
        out
    }

    pub fn dot(&self, other: &Fock) -> f64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a * b).sum()
    }

    pub fn axpy(&mut self, alpha: f64, x: &Fock) {
        for (a, b) in self.amp.iter_mut().zip(&x.amp) {
            *a += alpha * b;
        }
    }
}

/// Places a CI vector into the full Fock space.
pub fn embed(state: &CIState) -> Fock {
    let basis = &state.basis;
    let mut f = Fock::zeros(2 * basis.r_spatial);
    for (i, mask) in basis.masks().enumerate() {
        f.amp[mask as usize] = state.coefficients[i];
    }
    f
}

/// `H |psi>` from the spin-orbital Hamiltonian in second quantization.
/// `<S^2>` from `S_z^2 + S_z + S_- S_+` on the Fock space.
pub fn oracle_s2(psi: &Fock) -> f64 {
    let r = psi.m / 2;
    let sz = |v: &Fock| {
        let mut out = Fock::zeros(v.m);
        for p in 0..r {
            out.axpy(0.5, &v.a(2 * p).ad(2 * p));
            out.axpy(-0.5, &v.a(2 * p + 1).ad(2 * p + 1));
        }
        out
    };
    let splus = |v: &Fock| {
        let mut out = Fock::zeros(v.m);
        for p in 0..r {
            out.axpy(1.0, &v.a(2 * p + 1).ad(2 * p));
        }
        out
    };
    let sp = splus(psi);
    let z = sz(psi);
    psi.dot(&sz(&z)) + psi.dot(&z) + sp.dot(&sp)
}

pub fn apply_h(h: &Hamiltonian, psi: &Fock) -> Fock {
    let r = h.r_spatial();
    let m = 2 * r;
    let mut out = psi.clone();
    out.amp.iter_mut().for_each(|v| *v *= h.e_core());
    for p in 0..m {
        for q in 0..m {
            if p % 2 != q % 2 {
                continue;
            }
            let t = h.h_one()[(p / 2, q / 2)];
            if t != 0.0 {
                out.axpy(t, &psi.a(q).ad(p));
            }
        }
    }
    // 1/2 sum (pq|rs) a+_p a+_r a_s a_q
    for q in 0..m {
        let aq = psi.a(q);
        for s in 0..m {
            let asq = aq.a(s);
            for r_ in 0..m {
                if r_ % 2 != s % 2 {
                    continue;
                }
                let ar = asq.ad(r_);
                for p in 0..m {
                    if p % 2 != q % 2 {
                        continue;
                    }
                    let v = h.eri(p / 2, q / 2, r_ / 2, s / 2);
                    if v != 0.0 {
                        out.axpy(0.5 * v, &ar.ad(p));
                    }
                }
            }
        }
    }
    out
}

/// Occupation patterns with `na` alpha and `nb` beta electrons (interleaved spins).
pub fn sector(r: usize, na: usize, nb: usize) -> Vec<usize> {
    (0..1usize << (2 * r))
        .filter(|s| {
            let a = (0..r).filter(|p| s >> (2 * p) & 1 == 1).count();
            let b = (0..r).filter(|p| s >> (2 * p + 1) & 1 == 1).count();
            a == na && b == nb
        })
        .collect()
}

/// Dense Hamiltonian in a fixed-(N_alpha, N_beta) sector, built column by column.
pub fn sector_hamiltonian(h: &Hamiltonian, states: &[usize]) -> DMatrix<f64> {
    let m = 2 * h.r_spatial();
    let n = states.len();
    let mut hm = DMatrix::zeros(n, n);
    for (j, &s) in states.iter().enumerate() {
        let mut e = Fock::zeros(m);
        e.amp[s] = 1.0;
        let he = apply_h(h, &e);
        for (i, &t) in states.iter().enumerate() {
            hm[(i, j)] = he.amp[t];
        }
    }
    hm
}

/// Eigenvalues of the S_z = 0 sector, ascending.
pub fn oracle_spectrum(h: &Hamiltonian) -> Vec<f64> {
    let (na, nb) = h.spin_counts();
    let states = sector(h.r_spatial(), na, nb);
    let hm = sector_hamiltonian(h, &states);
    let mut v: Vec<f64> = hm.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `<a+_i a+_j a_l a_k>` for all spin-orbital indices.
pub fn full_2rdm(psi: &Fock) -> Vec<f64> {
    let m = psi.m;
    let phi: Vec<Vec<Fock>> = (0..m).map(|k| (0..m).map(|l| psi.a(k).a(l)).collect()).collect();
    let mut d = vec![0.0; m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    // <psi| a+_i a+_j a_l a_k |psi> = <a_j a_i psi | a_l a_k psi>
                    d[((i * m + j) * m + k) * m + l] = phi[i][j].dot(&phi[k][l]);
                }
            }
        }
    }
    d
}

pub fn pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

/// D on the pair basis from direct expectation values.
pub fn oracle_d(psi: &Fock) -> DMatrix<f64> {
    let m = psi.m;
    let full = full_2rdm(psi);
    let p = pairs(m);
    DMatrix::from_fn(p.len(), p.len(), |a, b| {
        let (i, j) = p[a];
        let (k, l) = p[b];
        full[((i * m + j) * m + k) * m + l]
    })
}

/// `Q^{ij}_{kl} = <a_i a_j a+_l a+_k>` on the pair basis.
pub fn oracle_q(psi: &Fock) -> DMatrix<f64> {
    let p = pairs(psi.m);
    let chi: Vec<Fock> = p.iter().map(|&(k, l)| psi.ad(k).ad(l)).collect();
    DMatrix::from_fn(p.len(), p.len(), |a, b| chi[a].dot(&chi[b]))
}

/// `G^{il}_{kj} = <a+_i a_l a+_j a_k>`, row `i m + l`, column `k m + j`.
pub fn oracle_g(psi: &Fock) -> DMatrix<f64> {
    let m = psi.m;
    // xi[a][b] = a+_b a_a psi
    let xi: Vec<Vec<Fock>> = (0..m).map(|a| (0..m).map(|b| psi.a(a).ad(b)).collect()).collect();
    DMatrix::from_fn(m * m, m * m, |row, col| {
        let (i, l) = (row / m, row % m);
        let (k, j) = (col / m, col % m);
        xi[i][l].dot(&xi[k][j])
    })
}

/// Energy from direct expectation values of the second-quantized Hamiltonian.
pub fn oracle_energy(h: &Hamiltonian, psi: &Fock) -> f64 {
    psi.dot(&apply_h(h, psi)) / psi.dot(psi)
}

/// `S^{pq} = <b+_p b+_q b_q b_p>` with `b_p = sum_k U_pk a_k`, summed over
/// all spin-orbital index quadruples.
pub type Complex64 = Complex<f64>;

pub fn naive_shadow(full: &[f64], u: &DMatrix<Complex64>) -> Vec<f64> {
    let m = u.nrows();
    let mut out = Vec::new();
    for (p, q) in pairs(m) {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                let left = (u[(p, i)] * u[(q, j)]).conj();
                if left.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        let d = full[((i * m + j) * m + k) * m + l];
                        if d != 0.0 {
                            s += left * u[(p, k)] * u[(q, l)] * d;
                        }
                    }
                }
            }
        }
        assert!(s.im.abs() < 1e-10, "imaginary shadow value {}", s.im);
        out.push(s.re);
    }
    out
}

pub fn h4() -> Hamiltonian {
    build_h_chain(&GeometryHChain::new(4, 1.0).unwrap()).unwrap()
}

pub fn h2() -> Hamiltonian {
    build_h_chain(&GeometryHChain::new(2, 0.74).unwrap()).unwrap()
}

/// Ground singlet plus the four lowest excited singlets of H4 at 1.0 A.
pub fn h4_singlets() -> (Hamiltonian, Vec<CIState>) {
    let h = h4();
    let s = select_singlets(&solve_fci(&h, 16).unwrap(), 4).unwrap();
    (h, s)
}

pub fn max_abs(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

pub fn to_vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Hamiltonian with random integrals carrying the 8-fold real symmetry.
pub fn random_hamiltonian(r: usize, n_electrons: usize, seed: u64) -> Hamiltonian {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut h1 = DMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            h1[(i, j)] = v;
            h1[(j, i)] = v;
        }
    }
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * r + j) * r + k) * r + l;
    let mut v2 = vec![0.0; r * r * r * r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let key = |a: usize, b: usize| (a.max(b), a.min(b));
                    let (p, q) = (key(i, j), key(k, l));
                    if (p, q) != (key(i, j).max(key(k, l)), key(i, j).min(key(k, l))) || (i, k) != (p.0, q.0) || (j, l) != (p.1, q.1) {
                        continue;
                    }
                    let v = rng.random_range(-0.5..0.5);
                    for (a, b) in [(i, j), (j, i)] {
                        for (c, d) in [(k, l), (l, k)] {
                            v2[idx(a, b, c, d)] = v;
                            v2[idx(c, d, a, b)] = v;
                        }
                    }
                }
            }
        }
    }
    Hamiltonian::new(n_electrons, rng.random_range(-1.0..1.0), h1, v2).unwrap()
}
