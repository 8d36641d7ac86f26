//! Direct Hamiltonian-vector products over alpha/beta string tables.
//!
//! Uses `H = sum_pq k_pq E_pq + 1/2 sum_pqrs (pq|rs) E_pq E_rs` with
//! `k_pq = h_pq - 1/2 sum_r (pr|rq)`, resolving the product of excitation
//! operators through an intermediate determinant.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::determinants::DeterminantBasis;
use crate::hamiltonian::Hamiltonian;

/// One single replacement `a_p^dagger a_q` acting on a string.
#[derive(Debug, Clone, Copy)]
struct Replacement {
    /// `p * r + q`
    pq: usize,
    lo: usize,
    hi: usize,
    target: usize,
    sign: f64,
}

fn replacement_table(strings: &[u64], r: usize, rank: impl Fn(u64) -> usize) -> Vec<Vec<Replacement>> {
    strings
        .iter()
        .map(|&s| {
            let mut out = Vec::new();
            for q in 0..r {
                if s >> q & 1 == 0 {
                    continue;
                }
                for p in 0..r {
                    if p != q && s >> p & 1 == 1 {
                        continue;
                    }
                    let (lo, hi) = (p.min(q), p.max(q));
                    let between = if hi > lo + 1 {
                        ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1)
                    } else {
                        0
                    };
                    let sign = if (s & between).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    let t = (s & !(1u64 << q)) | (1u64 << p);
                    out.push(Replacement {
                        pq: p * r + q,
                        lo,
                        hi,
                        target: rank(t),
                        sign,
                    });
                }
            }
            out
        })
        .collect()
}

#[inline]
fn range_parity(s: u64, from: usize, to_exclusive: usize) -> f64 {
    if to_exclusive <= from {
        return 1.0;
    }
    let m = ((1u64 << to_exclusive) - 1) & !((1u64 << from) - 1);
    if (s & m).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Precomputed operator for repeated `H c` products.
pub struct SigmaBuilder {
    r: usize,
    n_beta_strings: usize,
    alpha: Vec<u64>,
    beta: Vec<u64>,
    alpha_repl: Vec<Vec<Replacement>>,
    beta_repl: Vec<Vec<Replacement>>,
    k: Vec<f64>,
    /// `(pq|rs)` as an `r^2 x r^2` matrix, halved.
    half_eri: DMatrix<f64>,
    e_core: f64,
}

impl SigmaBuilder {
    pub fn new(h: &Hamiltonian, basis: &DeterminantBasis) -> Self {
        let r = h.r_spatial();
        let alpha = basis.alpha_strings().to_vec();
        let beta = basis.beta_strings().to_vec();
        let a_rank = |s: u64| alpha.binary_search(&s).expect("string in table");
        let b_rank = |s: u64| beta.binary_search(&s).expect("string in table");
        let alpha_repl = replacement_table(&alpha, r, a_rank);
        let beta_repl = replacement_table(&beta, r, b_rank);
        let mut k = vec![0.0; r * r];
        for p in 0..r {
            for q in 0..r {
                let mut v = h.h_one()[(p, q)];
                for s in 0..r {
                    v -= 0.5 * h.eri(p, s, s, q);
                }
                k[p * r + q] = v;
            }
        }
        let half_eri = DMatrix::from_fn(r * r, r * r, |pq, rs| {
            0.5 * h.eri(pq / r, pq % r, rs / r, rs % r)
        });
        Self {
            r,
            n_beta_strings: beta.len(),
            alpha,
            beta,
            alpha_repl,
            beta_repl,
            k,
            half_eri,
            e_core: h.e_core(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.alpha.len() * self.beta.len()
    }

    /// Visits every `(pq, target index, sign)` with `E_pq |det> = sign |target>`.
    #[inline]
    fn for_each_excitation(&self, det: usize, mut f: impl FnMut(usize, usize, f64)) {
        let nb = self.n_beta_strings;
        let (ia, ib) = (det / nb, det % nb);
        let (sa, sb) = (self.alpha[ia], self.beta[ib]);
        for e in &self.alpha_repl[ia] {
            // beta electrons in spatial range [lo, hi) sit between the two alpha slots
            let s = e.sign * range_parity(sb, e.lo, e.hi);
            f(e.pq, e.target * nb + ib, s);
        }
        for e in &self.beta_repl[ib] {
            // alpha electrons in (lo, hi]
            let s = e.sign * range_parity(sa, e.lo + 1, e.hi + 1);
            f(e.pq, ia * nb + e.target, s);
        }
    }

    /// `H c`, core energy included.
    pub fn apply(&self, c: &DVector<f64>) -> DVector<f64> {
        let n = self.dimension();
        let r2 = self.r * self.r;
        let transpose = |pq: usize| (pq % self.r) * self.r + pq / self.r;
        // d[K][rs] = <K|E_rs|c> = sum over E_sr |K> = sign |J>
        let mut d = DMatrix::<f64>::zeros(r2, n);
        d.as_mut_slice()
            .par_chunks_mut(r2)
            .enumerate()
            .for_each(|(kdet, col)| {
                self.for_each_excitation(kdet, |sr, j, sign| {
                    col[transpose(sr)] += sign * c[j];
                });
            });
        let mut g = &self.half_eri * &d;
        for (kdet, col) in g.as_mut_slice().chunks_mut(r2).enumerate() {
            for (pq, v) in col.iter_mut().enumerate() {
                *v += self.k[pq] * c[kdet];
            }
        }
        // sigma[I] = sum_K <I|E_pq|K> g[K][pq] = sum over E_qp |I> = sign |K>
        let out: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|idet| {
                let mut acc = self.e_core * c[idet];
                self.for_each_excitation(idet, |qp, kdet, sign| {
                    acc += sign * g[(transpose(qp), kdet)];
                });
                acc
            })
            .collect();
        DVector::from_vec(out)
    }
}
