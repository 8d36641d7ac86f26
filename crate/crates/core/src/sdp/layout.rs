//! Block-diagonal packing of symmetric matrices into `svec` coordinates.
//!
//! Entries outside the blocks are structurally zero. Within a block the upper
//! triangle is stored column by column with off-diagonal entries scaled by
//! `sqrt 2`, so the Euclidean norm of the packed vector equals the Frobenius
//! norm of the matrix.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::rdm::PairIndex;

pub(crate) const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockLayout {
    full_size: usize,
    blocks: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    /// `(block, local index)` of every full index.
    position: Vec<(usize, usize)>,
    dim: usize,
}

#[inline]
fn tri(a: usize, c: usize) -> usize {
    c * (c + 1) / 2 + a
}

impl BlockLayout {
    /// Groups indices `0..full_size` by `class(index)`; blocks are ordered by class value.
    pub fn from_classes(full_size: usize, n_classes: usize, class: impl Fn(usize) -> usize) -> Self {
        let mut blocks = vec![Vec::new(); n_classes];
        for idx in 0..full_size {
            blocks[class(idx)].push(idx);
        }
        blocks.retain(|b| !b.is_empty());
        let mut position = vec![(0, 0); full_size];
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut dim = 0;
        for (b, members) in blocks.iter().enumerate() {
            offsets.push(dim);
            dim += members.len() * (members.len() + 1) / 2;
            for (local, &idx) in members.iter().enumerate() {
                position[idx] = (b, local);
            }
        }
        Self {
            full_size,
            blocks,
            offsets,
            position,
            dim,
        }
    }

    /// Pair basis `i < j` split into `aa`, `bb` and `ab` spin blocks.
    pub fn pair_spin_blocks(n_spin_orbitals: usize) -> Self {
        let pairs = PairIndex::new(n_spin_orbitals);
        let p = pairs.pairs().to_vec();
        Self::from_classes(p.len(), 3, |idx| {
            let (i, j) = p[idx];
            match (i % 2, j % 2) {
                (0, 0) => 0,
                (1, 1) => 1,
                _ => 2,
            }
        })
    }

    /// Particle-hole grid `(i, l) -> i M + l` split by `s_i - s_l`.
    pub fn particle_hole_spin_blocks(n_spin_orbitals: usize) -> Self {
        let m = n_spin_orbitals;
        Self::from_classes(m * m, 3, |idx| {
            let (i, l) = (idx / m, idx % m);
            match (i % 2, l % 2) {
                (a, b) if a == b => 0,
                (0, 1) => 1,
                _ => 2,
            }
        })
    }

    pub fn full_size(&self) -> usize {
        self.full_size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn block_members(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_offset(&self, b: usize) -> usize {
        self.offsets[b]
    }

    /// Packed coordinate and scale `c` with `M[row, col] = c * x[idx]`.
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Option<(usize, f64)> {
        let (br, a) = self.position[row];
        let (bc, c) = self.position[col];
        if br != bc {
            return None;
        }
        let (lo, hi) = if a <= c { (a, c) } else { (c, a) };
        let scale = if lo == hi { 1.0 } else { 1.0 / SQRT2 };
        Some((self.offsets[br] + tri(lo, hi), scale))
    }

    /// Full `(row, col)` of packed coordinate `idx` with its svec scale.
    pub fn coordinates(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.dim);
        for members in &self.blocks {
            for c in 0..members.len() {
                for a in 0..=c {
                    let s = if a == c { 1.0 } else { SQRT2 };
                    out.push((members[a], members[c], s));
                }
            }
        }
        out
    }

    pub fn pack(&self, m: &DMatrix<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim);
        for (k, (r, c, s)) in self.coordinates().into_iter().enumerate() {
            x[k] = s * m[(r, c)];
        }
        x
    }

    pub fn unpack(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.full_size, self.full_size);
        for (k, (r, c, s)) in self.coordinates().into_iter().enumerate() {
            m[(r, c)] = x[k] / s;
            m[(c, r)] = x[k] / s;
        }
        m
    }

    /// Dense symmetric matrix of block `b` from its packed slice.
    pub fn block_matrix(&self, b: usize, x: &[f64]) -> DMatrix<f64> {
        let n = self.blocks[b].len();
        let off = self.offsets[b];
        let mut m = DMatrix::zeros(n, n);
        for c in 0..n {
            for a in 0..=c {
                let v = x[off + tri(a, c)];
                if a == c {
                    m[(a, a)] = v;
                } else {
                    m[(a, c)] = v / SQRT2;
                    m[(c, a)] = v / SQRT2;
                }
            }
        }
        m
    }

    pub fn store_block(&self, b: usize, m: &DMatrix<f64>, x: &mut [f64]) {
        let n = self.blocks[b].len();
        let off = self.offsets[b];
        for c in 0..n {
            for a in 0..=c {
                x[off + tri(a, c)] = if a == c { m[(a, a)] } else { SQRT2 * 0.5 * (m[(a, c)] + m[(c, a)]) };
            }
        }
    }

    /// Packed diagonal coordinates.
    pub fn diagonal_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (b, members) in self.blocks.iter().enumerate() {
            for a in 0..members.len() {
                out.push(self.offsets[b] + tri(a, a));
            }
        }
        out
    }
}
