//! CSV and JSON tables. CSV files start with `# <schema> v<version>`; the
//! JSON documents carry the same schema name, version and columns.

use std::fmt::Write as _;

use serde::Serialize;

use super::RunConfig;
use crate::error::Result;
use crate::fci::CIState;
use crate::rdm::{natural_occupations, von_neumann_entropy};
use crate::sdp::{ConditionSet, ConvergenceRecord, SdpSolution};

pub const HARTREE_TO_KCAL: f64 = 627.509474;

const FCI_SCHEMA: &str = "sv2rdm-fci";
const FCI_VERSION: u32 = 1;
const CONVERGENCE_SCHEMA: &str = "sv2rdm-convergence";
const CONVERGENCE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FciRow {
    pub state_index: usize,
    /// Position among singlets: 0 ground, 1 first excited, ...
    pub singlet_rank: Option<usize>,
    pub energy: f64,
    pub s_squared: f64,
    pub singlet: bool,
    pub excitation_hartree: f64,
    pub excitation_kcal: f64,
}

/// States up to and including the `m`-th excited singlet.
pub fn fci_rows(states: &[CIState], m: usize) -> Vec<FciRow> {
    let e0 = states.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min);
    let mut rank = 0;
    let mut rows: Vec<FciRow> = states
        .iter()
        .map(|s| {
            let singlet_rank = s.is_singlet().then(|| {
                rank += 1;
                rank - 1
            });
            FciRow {
                state_index: s.state_index,
                singlet_rank,
                energy: s.energy,
                s_squared: s.s_squared,
                singlet: s.is_singlet(),
                excitation_hartree: s.energy - e0,
                excitation_kcal: (s.energy - e0) * HARTREE_TO_KCAL,
            }
        })
        .collect();
    if let Some(last) = rows.iter().position(|r| r.singlet_rank == Some(m)) {
        rows.truncate(last + 1);
    }
    rows
}

pub fn fci_csv(rows: &[FciRow]) -> String {
    let mut out = format!(
        "# {FCI_SCHEMA} v{FCI_VERSION}\nstate_index,singlet_rank,energy,s_squared,singlet,excitation_hartree,excitation_kcal\n"
    );
    for r in rows {
        let rank = r.singlet_rank.map(|k| k.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{:?},{:?},{},{:?},{:?}",
            r.state_index, rank, r.energy, r.s_squared, r.singlet, r.excitation_hartree, r.excitation_kcal
        );
    }
    out
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    schema: &'static str,
    version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<C>,
    rows: &'a [R],
}

pub fn fci_json(rows: &[FciRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Document::<(), _> {
        schema: FCI_SCHEMA,
        version: FCI_VERSION,
        config: None,
        rows,
    })?)
}

/// One sweep point with the natural-orbital analysis of its optimal 2-RDM.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub conditions: ConditionSet,
    pub state: usize,
    #[serde(flatten)]
    pub record: ConvergenceRecord,
    pub abs_energy_error_kcal: f64,
    pub von_neumann_entropy: f64,
    /// Alpha-block natural occupations, descending.
    pub natural_occupations: Vec<f64>,
}

impl ConvergenceRow {
    pub fn new(record: ConvergenceRecord, sol: Option<&SdpSolution>, conditions: ConditionSet, state: usize) -> Self {
        let occupations = sol
            .and_then(|s| s.d_opt.one_rdm().ok())
            .and_then(|d1| natural_occupations(&d1).ok())
            .map(|n| n.into_iter().map(|x| x.clamp(0.0, 1.0)).collect::<Vec<_>>())
            .unwrap_or_default();
        let entropy = if occupations.is_empty() {
            f64::NAN
        } else {
            von_neumann_entropy(&occupations).unwrap_or(f64::NAN)
        };
        Self {
            conditions,
            state,
            abs_energy_error_kcal: record.abs_energy_error * HARTREE_TO_KCAL,
            record,
            von_neumann_entropy: entropy,
            natural_occupations: occupations,
        }
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Columns: conditions, state, seed, n_shadows, energies and errors,
/// solver diagnostics, `vne` and `n_1..n_r`, then `message`.
pub fn convergence_csv(cfg: &RunConfig, rows: &[ConvergenceRow]) -> String {
    let width = rows.iter().map(|r| r.natural_occupations.len()).max().unwrap_or(0);
    let mut out = format!("# {CONVERGENCE_SCHEMA} v{CONVERGENCE_VERSION}\n");
    for line in cfg.to_config_text().lines() {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str(
        "conditions,state,seed,n_shadows,energy,target_energy,abs_energy_error,abs_energy_error_kcal,\
         frobenius_error,frobenius_error_vs_self,status,iterations,primal_residual,dual_residual,\
         constraint_violation_max,wall_time,vne",
    );
    for i in 1..=width {
        let _ = write!(out, ",n_{i}");
    }
    out.push_str(",message\n");
    for row in rows {
        let r = &row.record;
        let _ = write!(
            out,
            "{},{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{:?},{:?},{:?},{:?},{:?}",
            row.conditions,
            row.state,
            r.seed,
            r.n_shadows,
            r.energy,
            r.target_energy,
            r.abs_energy_error,
            row.abs_energy_error_kcal,
            r.frobenius_error,
            r.frobenius_error_vs_self,
            r.status,
            r.iterations,
            r.primal_residual,
            r.dual_residual,
            r.constraint_violation_max,
            r.wall_time,
            row.von_neumann_entropy
        );
        for i in 0..width {
            match row.natural_occupations.get(i) {
                Some(v) => {
                    let _ = write!(out, ",{v:?}");
                }
                None => out.push(','),
            }
        }
        let _ = writeln!(out, ",{}", csv_text(r.message.as_deref().unwrap_or("")));
    }
    out
}

pub fn convergence_json(cfg: &RunConfig, rows: &[ConvergenceRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Document {
        schema: CONVERGENCE_SCHEMA,
        version: CONVERGENCE_VERSION,
        config: Some(cfg),
        rows,
    })?)
}
