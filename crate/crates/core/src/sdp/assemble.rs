use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::layout::{BlockLayout, SQRT2};
use super::ConditionSet;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::rdm::{reduced_hamiltonian, PairIndex};
use crate::shadow::{shadow_constraint_rows, Bound, Shadow};

/// Sparse row `sum coef * x[idx]`.
pub type SparseRow = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub coefficients: SparseRow,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRow {
    pub coefficients: SparseRow,
    pub lower: f64,
    pub upper: f64,
}

/// `y = constant + L x` with `L` stored row-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub rows: Vec<SparseRow>,
    pub constant: Vec<f64>,
}

impl AffineMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.constant)
            .map(|(row, c)| c + row.iter().map(|&(k, v)| v * x[k]).sum::<f64>())
            .collect()
    }
}

/// Semidefinite program over the spin-blocked 2-RDM in packed coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub conditions: ConditionSet,
    pub r_spatial: usize,
    pub n_electrons: usize,
    pub e_core: f64,
    pub d_layout: BlockLayout,
    pub g_layout: BlockLayout,
    /// Energy is `e_core + objective . x`.
    pub objective: Vec<f64>,
    /// Trace row first, then shadow equalities.
    pub equalities: Vec<LinearRow>,
    pub inequalities: Vec<BoxRow>,
    pub q_map: Option<AffineMap>,
    pub g_map: Option<AffineMap>,
    pub shadow_indices: Vec<usize>,
}

impl SdpProblem {
    pub fn n_variables(&self) -> usize {
        self.d_layout.dim()
    }

    pub fn n_pairs(&self) -> usize {
        self.d_layout.full_size()
    }

    /// Logical `(name, dimension)` of every PSD block.
    pub fn block_sizes(&self) -> Vec<(&'static str, usize)> {
        let mut out = vec![("D", self.n_pairs())];
        if self.q_map.is_some() {
            out.push(("Q", self.n_pairs()));
        }
        if self.g_map.is_some() {
            out.push(("G", self.g_layout.full_size()));
        }
        out
    }

    pub fn n_equality_rows(&self) -> usize {
        self.equalities.len()
    }

    /// Each box row counts as a lower and an upper inequality.
    pub fn n_inequality_rows(&self) -> usize {
        2 * self.inequalities.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

struct Builder<'a> {
    layout: &'a BlockLayout,
    pairs: PairIndex,
    m: usize,
    inv_nm1: f64,
    acc: Vec<f64>,
    touched: Vec<usize>,
}

impl<'a> Builder<'a> {
    fn new(layout: &'a BlockLayout, n_spin_orbitals: usize, n_electrons: usize) -> Self {
        Self {
            layout,
            pairs: PairIndex::new(n_spin_orbitals),
            m: n_spin_orbitals,
            inv_nm1: 1.0 / (n_electrons as f64 - 1.0),
            acc: vec![0.0; layout.dim()],
            touched: Vec::new(),
        }
    }

    fn push(&mut self, idx: usize, v: f64) {
        self.touched.push(idx);
        self.acc[idx] += v;
    }

    /// `coef * D^{ij}_{kl}`.
    fn d(&mut self, i: usize, j: usize, k: usize, l: usize, coef: f64) {
        let (Some((p, s1)), Some((q, s2))) = (self.pairs.signed(i, j), self.pairs.signed(k, l)) else {
            return;
        };
        if let Some((idx, c)) = self.layout.entry(p, q) {
            self.push(idx, coef * s1 * s2 * c);
        }
    }

    /// `coef * D1^a_b` by contraction.
    fn d1(&mut self, a: usize, b: usize, coef: f64) {
        let c = coef * self.inv_nm1;
        for m in 0..self.m {
            self.d(a, m, b, m, c);
        }
    }

    fn take(&mut self, scale: f64) -> SparseRow {
        self.touched.sort_unstable();
        self.touched.dedup();
        let mut row = Vec::with_capacity(self.touched.len());
        for &k in &self.touched {
            let v = self.acc[k];
            if v.abs() > 1e-15 {
                row.push((k, scale * v));
            }
            self.acc[k] = 0.0;
        }
        self.touched.clear();
        row
    }
}

#[inline]
fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn build_q_map(layout: &BlockLayout, m: usize, n_electrons: usize) -> AffineMap {
    let pairs = PairIndex::new(m);
    let p = pairs.pairs().to_vec();
    let mut b = Builder::new(layout, m, n_electrons);
    let mut rows = Vec::with_capacity(layout.dim());
    let mut constant = Vec::with_capacity(layout.dim());
    for (r, c, s) in layout.coordinates() {
        let (i, j) = p[r];
        let (k, l) = p[c];
        b.d(i, j, k, l, 1.0);
        if k == i {
            b.d1(j, l, -1.0);
        }
        if l == j {
            b.d1(i, k, -1.0);
        }
        if l == i {
            b.d1(j, k, 1.0);
        }
        if k == j {
            b.d1(i, l, 1.0);
        }
        rows.push(b.take(s));
        constant.push(s * (delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k)));
    }
    AffineMap { rows, constant }
}

fn build_g_map(d_layout: &BlockLayout, g_layout: &BlockLayout, m: usize, n_electrons: usize) -> AffineMap {
    let mut b = Builder::new(d_layout, m, n_electrons);
    let mut rows = Vec::with_capacity(g_layout.dim());
    for (r, c, s) in g_layout.coordinates() {
        let (i, l) = (r / m, r % m);
        let (k, j) = (c / m, c % m);
        if l == j {
            b.d1(i, k, 1.0);
        }
        b.d(i, j, k, l, -1.0);
        rows.push(b.take(s));
    }
    let constant = vec![0.0; rows.len()];
    AffineMap { rows, constant }
}

/// Packed `sum_w w w^T` over the given weight vectors (empty ones skipped).
fn pack_gram(layout: &BlockLayout, ws: &[&[f64]]) -> SparseRow {
    let ws: Vec<&[f64]> = ws.iter().copied().filter(|w| !w.is_empty()).collect();
    let mut row = Vec::new();
    for b in 0..layout.n_blocks() {
        let members = layout.block_members(b);
        if members.iter().all(|&p| ws.iter().all(|w| w[p] == 0.0)) {
            continue;
        }
        let off = layout.block_offset(b);
        for c in 0..members.len() {
            for a in 0..=c {
                let v: f64 = ws.iter().map(|w| w[members[a]] * w[members[c]]).sum();
                let v = if a == c { v } else { SQRT2 * v };
                if v != 0.0 {
                    row.push((off + c * (c + 1) / 2 + a, v));
                }
            }
        }
    }
    row
}

/// Minimize the energy over 2-RDMs obeying the chosen positivity conditions,
/// the trace condition and every shadow row.
pub fn assemble(h: &Hamiltonian, shadows: &[Shadow], conditions: ConditionSet) -> Result<SdpProblem> {
    let n = h.n_electrons();
    let r = h.r_spatial();
    if n < 2 {
        return Err(Error::InvalidInput("the 2-RDM program needs at least two electrons".into()));
    }
    let m = 2 * r;
    let mut seen = BTreeSet::new();
    for s in shadows {
        if s.rotation.r_spatial() != r {
            return Err(Error::DimensionMismatch(format!(
                "shadow {} acts on {} orbitals, Hamiltonian has {r}",
                s.rotation.index,
                s.rotation.r_spatial()
            )));
        }
        if s.n_electrons != n {
            return Err(Error::DimensionMismatch(format!(
                "shadow {} was measured on {} electrons, Hamiltonian has {n}",
                s.rotation.index, s.n_electrons
            )));
        }
        if !seen.insert((s.rotation.seed, s.rotation.index)) {
            return Err(Error::InvalidInput(format!("duplicate shadow index {}", s.rotation.index)));
        }
    }
    let d_layout = BlockLayout::pair_spin_blocks(m);
    let g_layout = BlockLayout::particle_hole_spin_blocks(m);

    let k: DMatrix<f64> = reduced_hamiltonian(h, n)?;
    let objective = d_layout.pack(&k).as_slice().to_vec();

    let mut equalities = vec![LinearRow {
        coefficients: d_layout.diagonal_indices().into_iter().map(|k| (k, 1.0)).collect(),
        rhs: (n * (n - 1)) as f64 / 2.0,
    }];
    let mut inequalities = Vec::new();
    for s in shadows {
        for row in shadow_constraint_rows(s) {
            let coefficients = pack_gram(&d_layout, &[&row.weights_re, &row.weights_im]);
            match row.bound {
                Bound::Equal(v) => equalities.push(LinearRow { coefficients, rhs: v }),
                Bound::Interval { lower, upper } => inequalities.push(BoxRow {
                    coefficients,
                    lower,
                    upper,
                }),
            }
        }
    }

    let q_map = conditions.has_q().then(|| build_q_map(&d_layout, m, n));
    let g_map = conditions.has_g().then(|| build_g_map(&d_layout, &g_layout, m, n));

    Ok(SdpProblem {
        conditions,
        r_spatial: r,
        n_electrons: n,
        e_core: h.e_core(),
        d_layout,
        g_layout,
        objective,
        equalities,
        inequalities,
        q_map,
        g_map,
        shadow_indices: shadows.iter().map(|s| s.rotation.index).collect(),
    })
}
