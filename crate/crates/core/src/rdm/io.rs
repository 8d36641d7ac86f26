//! Dense binary container for 2-RDMs and CSV export of occupations.
//!
//! Layout (little endian):
//!
//! ```text
//! magic    8 bytes  "SV2RDM\x00\x01"
//! n_so     u32      spin orbitals
//! n_elec   u32
//! n_pairs  u32      n_so (n_so - 1) / 2
//! reserved u32      0
//! data     n_pairs^2 f64, row-major pair-basis matrix
//! sha256   32 bytes over everything above
//! ```

use std::fmt::Write as _;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use super::TwoRDM;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SV2RDM\x00\x01";

pub fn encode_2rdm(d: &TwoRDM) -> Vec<u8> {
    let n = d.pairs().len();
    let mut out = Vec::with_capacity(24 + 8 * n * n + 32);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(d.n_spin_orbitals() as u32).to_le_bytes());
    out.extend_from_slice(&(d.n_electrons as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for r in 0..n {
        for c in 0..n {
            out.extend_from_slice(&d.matrix()[(r, c)].to_le_bytes());
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

pub fn decode_2rdm(bytes: &[u8]) -> Result<TwoRDM> {
    if bytes.len() < 24 + 32 || &bytes[..8] != MAGIC {
        return Err(Error::Container("not a 2-RDM container".into()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    let actual = Sha256::digest(body);
    if actual.as_slice() != digest {
        return Err(Error::Checksum {
            expected: hex::encode(digest),
            found: hex::encode(actual),
        });
    }
    let n_so = read_u32(body, 8) as usize;
    let n_elec = read_u32(body, 12) as usize;
    let n = read_u32(body, 16) as usize;
    if !n_so.is_multiple_of(2) || n != n_so * n_so.saturating_sub(1) / 2 || body.len() != 24 + 8 * n * n {
        return Err(Error::Container("inconsistent shape header".into()));
    }
    let data = &body[24..];
    let m = DMatrix::from_fn(n, n, |r, c| {
        let at = 8 * (r * n + c);
        f64::from_le_bytes(data[at..at + 8].try_into().expect("8 bytes"))
    });
    TwoRDM::from_matrix(n_elec, n_so / 2, m)
}

/// One row of an occupation report.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationRow {
    pub label: String,
    pub occupations: Vec<f64>,
    pub entropy: f64,
}

/// CSV with a versioned schema comment: `label,n_1..n_r,vne`.
pub fn occupations_csv(rows: &[OccupationRow]) -> String {
    let width = rows.iter().map(|r| r.occupations.len()).max().unwrap_or(0);
    let mut out = String::from("# sv2rdm-occupations v1\nlabel");
    for i in 1..=width {
        let _ = write!(out, ",n_{i}");
    }
    out.push_str(",vne\n");
    for row in rows {
        out.push_str(&row.label);
        for i in 0..width {
            match row.occupations.get(i) {
                Some(v) => {
                    let _ = write!(out, ",{v:.10}");
                }
                None => out.push(','),
            }
        }
        let _ = writeln!(out, ",{:.10}", row.entropy);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TwoRDM {
        let mut m = DMatrix::zeros(6, 6);
        m[(0, 0)] = 0.75;
        m[(5, 5)] = 0.25;
        m[(0, 5)] = 0.433;
        m[(5, 0)] = 0.433;
        TwoRDM::from_matrix(2, 2, m).unwrap()
    }

    #[test]
    fn container_roundtrip() {
        let d = sample();
        assert_eq!(decode_2rdm(&encode_2rdm(&d)).unwrap(), d);
    }

    #[test]
    fn corruption_detected() {
        let mut bytes = encode_2rdm(&sample());
        bytes[30] ^= 0x40;
        assert!(matches!(decode_2rdm(&bytes), Err(Error::Checksum { .. })));
        assert!(matches!(decode_2rdm(b"garbage"), Err(Error::Container(_))));
    }

    #[test]
    fn csv_layout() {
        let csv = occupations_csv(&[OccupationRow {
            label: "E1".into(),
            occupations: vec![1.0, 0.0],
            entropy: 0.0,
        }]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# sv2rdm-occupations v1");
        assert_eq!(lines[1], "label,n_1,n_2,vne");
        assert!(lines[2].starts_with("E1,1.0000000000,0.0000000000,"));
    }
}
