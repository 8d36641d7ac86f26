//! Determinant basis and second-quantized operators on occupation bitmasks.
//!
//! A determinant is a mask over `2 r` spin orbitals with spin orbital
//! `2 p + s` (s = 0 alpha, 1 beta). Its phase convention is the product of
//! creation operators in ascending spin-orbital order acting on the vacuum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a_p |mask>`: resulting mask and sign, or `None` if `p` is empty.
#[inline]
pub fn annihilate(mask: u64, p: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if mask & bit == 0 {
        return None;
    }
    Some((mask ^ bit, parity_below(mask, p)))
}

/// `a_p^dagger |mask>`: resulting mask and sign, or `None` if `p` is occupied.
#[inline]
pub fn create(mask: u64, p: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if mask & bit != 0 {
        return None;
    }
    Some((mask | bit, parity_below(mask, p)))
}

#[inline]
fn parity_below(mask: u64, p: usize) -> f64 {
    if (mask & ((1u64 << p) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `a_p^dagger a_q |mask>`.
#[inline]
pub fn excite(mask: u64, p: usize, q: usize) -> Option<(u64, f64)> {
    let (m, s1) = annihilate(mask, q)?;
    let (m, s2) = create(m, p)?;
    Some((m, s1 * s2))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All `r`-bit strings with `n` set bits, ascending by integer value.
fn strings(r: usize, n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    if n > r {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(r, n));
    let mut v: u64 = (1u64 << n) - 1;
    let limit = 1u64 << r;
    while v < limit {
        out.push(v);
        // Gosper's hack: next larger integer with the same popcount.
        let c = v & v.wrapping_neg();
        let rr = v + c;
        v = (((rr ^ v) >> 2) / c) | rr;
    }
    out
}

/// Full determinant space of fixed alpha and beta electron counts.
///
/// Determinants are ordered alpha-string major, each string family ascending
/// by integer value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminantBasis {
    pub r_spatial: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    #[serde(skip)]
    alpha: Vec<u64>,
    #[serde(skip)]
    beta: Vec<u64>,
    /// binom[p][k] = C(p, k), for string ranking.
    #[serde(skip)]
    binom: Vec<Vec<usize>>,
}

impl DeterminantBasis {
    pub fn new(r_spatial: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if r_spatial == 0 || r_spatial > 32 {
            return Err(Error::InvalidInput(format!(
                "orbital count {r_spatial} outside [1, 32]"
            )));
        }
        if n_alpha > r_spatial || n_beta > r_spatial {
            return Err(Error::InvalidInput(format!(
                "cannot place {n_alpha} alpha / {n_beta} beta electrons in {r_spatial} orbitals"
            )));
        }
        let binom = (0..=r_spatial)
            .map(|p| (0..=r_spatial).map(|k| binomial(p, k)).collect())
            .collect();
        Ok(Self {
            r_spatial,
            n_alpha,
            n_beta,
            alpha: strings(r_spatial, n_alpha),
            beta: strings(r_spatial, n_beta),
            binom,
        })
    }

    /// Rebuilds the string tables after deserialization.
    pub(crate) fn rebuilt(&self) -> Result<Self> {
        Self::new(self.r_spatial, self.n_alpha, self.n_beta)
    }

    /// Size of the space without building it.
    pub fn dimension_for(r_spatial: usize, n_alpha: usize, n_beta: usize) -> usize {
        binomial(r_spatial, n_alpha).saturating_mul(binomial(r_spatial, n_beta))
    }

    pub fn len(&self) -> usize {
        self.alpha.len() * self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.r_spatial
    }

    pub fn alpha_strings(&self) -> &[u64] {
        &self.alpha
    }

    pub fn beta_strings(&self) -> &[u64] {
        &self.beta
    }

    /// `(alpha string, beta string)` of determinant `idx`.
    pub fn strings_of(&self, idx: usize) -> (u64, u64) {
        let nb = self.beta.len();
        (self.alpha[idx / nb], self.beta[idx % nb])
    }

    /// Interleaved spin-orbital mask of determinant `idx`.
    pub fn mask(&self, idx: usize) -> u64 {
        let (a, b) = self.strings_of(idx);
        interleave(a, b, self.r_spatial)
    }

    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len()).map(move |i| self.mask(i))
    }

    fn rank(&self, s: u64, n: usize) -> Option<usize> {
        if s.count_ones() as usize != n || s >> self.r_spatial != 0 {
            return None;
        }
        let mut rank = 0;
        let mut k = 0;
        let mut rest = s;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            k += 1;
            rank += self.binom[p][k];
            rest &= rest - 1;
        }
        Some(rank)
    }

    /// Position of a determinant given as an interleaved mask.
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        let (a, b) = deinterleave(mask, self.r_spatial);
        let ia = self.rank(a, self.n_alpha)?;
        let ib = self.rank(b, self.n_beta)?;
        Some(ia * self.beta.len() + ib)
    }
}

/// Alpha string on even bits, beta on odd bits.
pub fn interleave(alpha: u64, beta: u64, r: usize) -> u64 {
    let mut m = 0u64;
    for p in 0..r {
        m |= ((alpha >> p) & 1) << (2 * p);
        m |= ((beta >> p) & 1) << (2 * p + 1);
    }
    m
}

pub fn deinterleave(mask: u64, r: usize) -> (u64, u64) {
    let mut a = 0u64;
    let mut b = 0u64;
    for p in 0..r {
        a |= ((mask >> (2 * p)) & 1) << p;
        b |= ((mask >> (2 * p + 1)) & 1) << p;
    }
    (a, b)
}
