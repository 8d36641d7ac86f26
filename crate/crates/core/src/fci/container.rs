//! JSON container for FCI eigenvectors.
//!
//! ```text
//! { "format": "sv2rdm-ci-states", "version": 1,
//!   "basis": { "r_spatial", "n_alpha", "n_beta" },
//!   "states": [ { "state_index", "energy", "s_squared", "coefficients": [...] } ],
//!   "sha256": hex digest }
//! ```
//!
//! The digest covers the little-endian bytes of the basis counts followed by,
//! per state, the index, energy, `S^2` and every coefficient.

use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CIState, DeterminantBasis};
use crate::error::{Error, Result};

const FORMAT: &str = "sv2rdm-ci-states";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StateRecord {
    state_index: usize,
    energy: f64,
    s_squared: f64,
    coefficients: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Container {
    format: String,
    version: u32,
    basis: DeterminantBasis,
    states: Vec<StateRecord>,
    sha256: String,
}

fn digest(basis: &DeterminantBasis, states: &[StateRecord]) -> String {
    let mut h = Sha256::new();
    for v in [basis.r_spatial, basis.n_alpha, basis.n_beta] {
        h.update((v as u64).to_le_bytes());
    }
    for s in states {
        h.update((s.state_index as u64).to_le_bytes());
        h.update(s.energy.to_le_bytes());
        h.update(s.s_squared.to_le_bytes());
        h.update((s.coefficients.len() as u64).to_le_bytes());
        for c in &s.coefficients {
            h.update(c.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Serializes states sharing one determinant basis.
pub fn states_to_json(states: &[CIState]) -> Result<String> {
    let Some(first) = states.first() else {
        return Err(Error::InvalidInput("no states to serialize".into()));
    };
    if states.iter().any(|s| *s.basis != *first.basis) {
        return Err(Error::InvalidInput("states span different determinant bases".into()));
    }
    let records: Vec<StateRecord> = states
        .iter()
        .map(|s| StateRecord {
            state_index: s.state_index,
            energy: s.energy,
            s_squared: s.s_squared,
            coefficients: s.coefficients.iter().copied().collect(),
        })
        .collect();
    let basis = (*first.basis).clone();
    let sha256 = digest(&basis, &records);
    Ok(serde_json::to_string_pretty(&Container {
        format: FORMAT.into(),
        version: VERSION,
        basis,
        states: records,
        sha256,
    })?)
}

/// Parses a container, verifying its checksum and shapes.
pub fn states_from_json(text: &str) -> Result<Vec<CIState>> {
    let c: Container = serde_json::from_str(text)?;
    if c.format != FORMAT || c.version != VERSION {
        return Err(Error::Container(format!("unsupported container {} v{}", c.format, c.version)));
    }
    let found = digest(&c.basis, &c.states);
    if found != c.sha256 {
        return Err(Error::Checksum {
            expected: c.sha256,
            found,
        });
    }
    let basis = Arc::new(c.basis.rebuilt()?);
    c.states
        .into_iter()
        .map(|s| {
            if s.coefficients.len() != basis.len() {
                return Err(Error::Container(format!(
                    "state {} has {} coefficients for a basis of {}",
                    s.state_index,
                    s.coefficients.len(),
                    basis.len()
                )));
            }
            Ok(CIState {
                basis: Arc::clone(&basis),
                coefficients: DVector::from_vec(s.coefficients),
                energy: s.energy,
                s_squared: s.s_squared,
                state_index: s.state_index,
            })
        })
        .collect()
}
