//! Classical shadows of a 2-RDM under random one-body orbital rotations.
//!
//! A rotation `U` of the spatial orbitals acts identically on both spin
//! channels. Its two-particle lift on the pair basis is
//! `W_{(pq),(ij)} = u_pi u_qj - u_pj u_qi`, and a shadow records the diagonal
//! of `W D W^+`, i.e. the pair occupations in the rotated basis.
//!
//! Rotations are Haar-distributed on either the orthogonal or the unitary
//! group. Rotation `n` of a run with seed `s` is drawn from the ChaCha20
//! stream `(s, n)`, so shadow sequences are prefix-stable and can be
//! generated in any order.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rdm::{PairIndex, TwoRDM};

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationGroup {
    /// Real orthogonal matrices.
    Orthogonal,
    /// Complex unitary matrices.
    #[default]
    Unitary,
}

impl RotationGroup {
    pub fn is_complex(self) -> bool {
        self == RotationGroup::Unitary
    }
}

impl std::fmt::Display for RotationGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RotationGroup::Orthogonal => "orthogonal",
            RotationGroup::Unitary => "unitary",
        })
    }
}

impl std::str::FromStr for RotationGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "orthogonal" | "real" | "o" => Ok(RotationGroup::Orthogonal),
            "unitary" | "complex" | "u" => Ok(RotationGroup::Unitary),
            other => Err(Error::InvalidInput(format!(
                "unknown rotation group `{other}` (expected orthogonal or unitary)"
            ))),
        }
    }
}

/// One-body rotation of the spatial orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalRotation {
    pub matrix: DMatrix<C64>,
    pub group: RotationGroup,
    pub seed: u64,
    pub index: usize,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-distributed rotation: QR of a (real or complex) standard Gaussian
/// matrix with the phases of `diag(R)` moved into `Q`.
pub fn sample_rotation_in(group: RotationGroup, r: usize, seed: u64, index: usize) -> OrbitalRotation {
    let mut rng = stream_rng(seed, index as u64);
    let mut g = DMatrix::<C64>::zeros(r, r);
    // row-major draw order keeps the stream layout independent of storage order
    for i in 0..r {
        for j in 0..r {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if group.is_complex() { rng.sample(StandardNormal) } else { 0.0 };
            g[(i, j)] = C64::new(re, im);
        }
    }
    let qr = g.qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..r {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..r {
            q[(i, j)] *= phase;
        }
    }
    if !group.is_complex() {
        q.iter_mut().for_each(|z| z.im = 0.0);
    }
    OrbitalRotation {
        matrix: q,
        group,
        seed,
        index,
    }
}

pub fn sample_rotation_indexed(r: usize, seed: u64, index: usize) -> OrbitalRotation {
    sample_rotation_in(RotationGroup::default(), r, seed, index)
}

pub fn sample_rotation(r: usize, seed: u64) -> OrbitalRotation {
    sample_rotation_indexed(r, seed, 0)
}

impl OrbitalRotation {
    pub fn identity(r: usize) -> Self {
        Self {
            matrix: DMatrix::identity(r, r),
            group: RotationGroup::Orthogonal,
            seed: 0,
            index: 0,
        }
    }

    /// Wraps a real orthogonal matrix.
    pub fn from_real(matrix: &DMatrix<f64>, seed: u64, index: usize) -> Self {
        Self {
            matrix: matrix.map(|x| C64::new(x, 0.0)),
            group: RotationGroup::Orthogonal,
            seed,
            index,
        }
    }

    pub fn r_spatial(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.matrix.map(|z| z.re)
    }

    pub fn imag_part(&self) -> DMatrix<f64> {
        self.matrix.map(|z| z.im)
    }

    /// `U^+ U - I`, max-norm.
    pub fn unitarity_error(&self) -> f64 {
        let r = self.r_spatial();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(r, r))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> C64 {
        self.matrix.determinant()
    }

    /// Spin-orbital matrix `u_{2a+s, 2b+t} = U_ab delta_st`.
    pub fn spin_orbital_matrix(&self) -> DMatrix<C64> {
        let r = self.r_spatial();
        DMatrix::from_fn(2 * r, 2 * r, |p, q| {
            if p % 2 == q % 2 {
                self.matrix[(p / 2, q / 2)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Two-particle lift on the pair basis.
    pub fn pair_matrix(&self) -> DMatrix<C64> {
        let u = self.spin_orbital_matrix();
        let pairs = PairIndex::new(u.nrows());
        let p = pairs.pairs();
        DMatrix::from_fn(p.len(), p.len(), |row, col| {
            let (a, b) = p[row];
            let (i, j) = p[col];
            u[(a, i)] * u[(b, j)] - u[(a, j)] * u[(b, i)]
        })
    }

    /// `U V`: measuring with it equals measuring the `V`-rotated state with `U`.
    pub fn compose(&self, other: &OrbitalRotation) -> OrbitalRotation {
        let group = if self.group == RotationGroup::Orthogonal && other.group == RotationGroup::Orthogonal {
            RotationGroup::Orthogonal
        } else {
            RotationGroup::Unitary
        };
        OrbitalRotation {
            matrix: &self.matrix * &other.matrix,
            group,
            seed: self.seed,
            index: self.index,
        }
    }
}

fn check_dims(d: &TwoRDM, rot: &OrbitalRotation) -> Result<()> {
    if d.r_spatial != rot.r_spatial() {
        return Err(Error::DimensionMismatch(format!(
            "rotation acts on {} orbitals, 2-RDM has {}",
            rot.r_spatial(),
            d.r_spatial
        )));
    }
    Ok(())
}

/// `W D W^T` for a real rotation.
pub fn rotate_2rdm(d: &TwoRDM, rot: &OrbitalRotation) -> Result<TwoRDM> {
    check_dims(d, rot)?;
    if !rot.is_real() {
        return Err(Error::InvalidInput("a complex rotation does not keep the 2-RDM real".into()));
    }
    let w = rot.pair_matrix().map(|z| z.re);
    TwoRDM::from_matrix(d.n_electrons, d.r_spatial, &w * d.matrix() * w.transpose())
}

/// Measured pair occupations `S^{pq}` (all `p < q`, pair order) for one rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct Shadow {
    pub rotation: OrbitalRotation,
    pub n_electrons: usize,
    pub values: Vec<f64>,
    pub epsilon: f64,
    pub noise_seed: Option<u64>,
}

impl Shadow {
    /// Same measurement, different row tolerance.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// Diagonal of the rotated 2-RDM, optionally with uniform noise in `[-epsilon, epsilon]`.
pub fn measure_shadow(
    d_ref: &TwoRDM,
    rot: &OrbitalRotation,
    epsilon: f64,
    noise_seed: Option<u64>,
) -> Result<Shadow> {
    check_dims(d_ref, rot)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    let w = rot.pair_matrix();
    let a = w.map(|z| z.re);
    let b = w.map(|z| z.im);
    // Re(w^+ D w) = a^T D a + b^T D b for real symmetric D
    let da = d_ref.matrix() * a.transpose();
    let db = d_ref.matrix() * b.transpose();
    let mut values: Vec<f64> = (0..w.nrows())
        .map(|p| a.row(p).dot(&da.column(p).transpose()) + b.row(p).dot(&db.column(p).transpose()))
        .collect();
    if let Some(ns) = noise_seed {
        if epsilon > 0.0 {
            let mut rng = stream_rng(ns, rot.index as u64);
            for v in &mut values {
                *v += rng.random_range(-epsilon..=epsilon);
            }
        }
    }
    Ok(Shadow {
        rotation: rot.clone(),
        n_electrons: d_ref.n_electrons,
        values,
        epsilon,
        noise_seed,
    })
}

/// Shadows `0..n` of a run, identical to the first `n` of any longer run.
pub fn generate_shadows(
    d_ref: &TwoRDM,
    n: usize,
    group: RotationGroup,
    seed: u64,
    epsilon: f64,
    noise_seed: Option<u64>,
) -> Result<Vec<Shadow>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let rot = sample_rotation_in(group, d_ref.r_spatial, seed, i);
            measure_shadow(d_ref, &rot, epsilon, noise_seed)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Equal(f64),
    Interval { lower: f64, upper: f64 },
}

/// One linear functional `L(D) = a^T D a + b^T D b` on the pair-basis matrix,
/// where `a + i b` is a row of the pair lift.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowRow {
    /// `(p, q)` spin-orbital pair measured.
    pub pair: (usize, usize),
    pub weights_re: Vec<f64>,
    /// Empty for real rotations.
    pub weights_im: Vec<f64>,
    pub bound: Bound,
}

impl ShadowRow {
    pub fn evaluate(&self, d: &TwoRDM) -> f64 {
        let quad = |w: &[f64]| {
            if w.is_empty() {
                return 0.0;
            }
            let w = DVector::from_column_slice(w);
            w.dot(&(d.matrix() * &w))
        };
        quad(&self.weights_re) + quad(&self.weights_im)
    }

    pub fn coefficient_matrix(&self) -> DMatrix<f64> {
        let a = DVector::from_column_slice(&self.weights_re);
        let mut m = &a * a.transpose();
        if !self.weights_im.is_empty() {
            let b = DVector::from_column_slice(&self.weights_im);
            m += &b * b.transpose();
        }
        m
    }

    /// Signed distance outside the bound (negative when strictly inside).
    pub fn violation(&self, d: &TwoRDM) -> f64 {
        let v = self.evaluate(d);
        match self.bound {
            Bound::Equal(s) => (v - s).abs(),
            Bound::Interval { lower, upper } => (lower - v).max(v - upper),
        }
    }
}

/// One row per measured pair: equality when `epsilon == 0`, else `S - eps <= L <= S + eps`.
pub fn shadow_constraint_rows(shadow: &Shadow) -> Vec<ShadowRow> {
    let w = shadow.rotation.pair_matrix();
    let real = shadow.rotation.is_real();
    let pairs = PairIndex::new(2 * shadow.rotation.r_spatial());
    pairs
        .pairs()
        .iter()
        .enumerate()
        .map(|(p, &pair)| {
            let s = shadow.values[p];
            let bound = if shadow.epsilon == 0.0 {
                Bound::Equal(s)
            } else {
                Bound::Interval {
                    lower: s - shadow.epsilon,
                    upper: s + shadow.epsilon,
                }
            };
            ShadowRow {
                pair,
                weights_re: w.row(p).iter().map(|z| z.re).collect(),
                weights_im: if real { Vec::new() } else { w.row(p).iter().map(|z| z.im).collect() },
                bound,
            }
        })
        .collect()
}

/// JSON record of a shadow: rotation row-major plus values and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowRecord {
    pub r_spatial: usize,
    pub n_electrons: usize,
    pub group: RotationGroup,
    pub seed: u64,
    pub index: usize,
    pub rotation_re: Vec<f64>,
    pub rotation_im: Vec<f64>,
    pub values: Vec<f64>,
    pub epsilon: f64,
    pub noise_seed: Option<u64>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect()
}

impl From<&Shadow> for ShadowRecord {
    fn from(s: &Shadow) -> Self {
        Self {
            r_spatial: s.rotation.r_spatial(),
            n_electrons: s.n_electrons,
            group: s.rotation.group,
            seed: s.rotation.seed,
            index: s.rotation.index,
            rotation_re: row_major(&s.rotation.real_part()),
            rotation_im: if s.rotation.is_real() { Vec::new() } else { row_major(&s.rotation.imag_part()) },
            values: s.values.clone(),
            epsilon: s.epsilon,
            noise_seed: s.noise_seed,
        }
    }
}

impl TryFrom<ShadowRecord> for Shadow {
    type Error = Error;

    fn try_from(rec: ShadowRecord) -> Result<Self> {
        let r = rec.r_spatial;
        let m = 2 * r;
        let im_ok = rec.rotation_im.is_empty() || rec.rotation_im.len() == r * r;
        if rec.rotation_re.len() != r * r || !im_ok || rec.values.len() != m * m.saturating_sub(1) / 2 {
            return Err(Error::Container("shadow record has inconsistent lengths".into()));
        }
        let matrix = DMatrix::from_fn(r, r, |i, j| {
            let im = rec.rotation_im.get(i * r + j).copied().unwrap_or(0.0);
            C64::new(rec.rotation_re[i * r + j], im)
        });
        Ok(Shadow {
            rotation: OrbitalRotation {
                matrix,
                group: rec.group,
                seed: rec.seed,
                index: rec.index,
            },
            n_electrons: rec.n_electrons,
            values: rec.values,
            epsilon: rec.epsilon,
            noise_seed: rec.noise_seed,
        })
    }
}

pub fn shadows_to_json(shadows: &[Shadow]) -> Result<String> {
    let recs: Vec<ShadowRecord> = shadows.iter().map(ShadowRecord::from).collect();
    Ok(serde_json::to_string_pretty(&recs)?)
}

pub fn shadows_from_json(text: &str) -> Result<Vec<Shadow>> {
    let recs: Vec<ShadowRecord> = serde_json::from_str(text)?;
    recs.into_iter().map(Shadow::try_from).collect()
}
