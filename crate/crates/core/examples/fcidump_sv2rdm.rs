//! Shadow reconstruction of singlet states of an active space read from
//! FCIDUMP: total energies, the gap between two states, natural occupations
//! and von Neumann entropy of the reconstructed 2-RDMs.
//!
//! ```bash
//! cargo run --release -p sv2rdm --example fcidump_sv2rdm -- active.fcidump 0,1 10,20
//! ```
//! Arguments: FCIDUMP path (an H4 chain when absent), singlet ranks, shadow counts.

use sv2rdm::cli::HARTREE_TO_KCAL;
use sv2rdm::fci::{select_singlets, solve_fci};
use sv2rdm::hamiltonian::{build_h_chain, parse_fcidump, GeometryHChain};
use sv2rdm::rdm::{natural_occupations, von_neumann_entropy};
use sv2rdm::sdp::{solve_points, ConditionSet, SweepOptions};

fn list(s: Option<String>, default: &[usize]) -> Result<Vec<usize>, std::num::ParseIntError> {
    match s {
        None => Ok(default.to_vec()),
        Some(s) => s.split(',').map(|t| t.trim().parse()).collect(),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let h = match args.next() {
        Some(p) if p != "-" => parse_fcidump(&std::fs::read_to_string(p)?)?,
        _ => build_h_chain(&GeometryHChain::new(4, 1.0)?)?,
    };
    let ranks = list(args.next(), &[0, 1])?;
    let counts = list(args.next(), &[5, 11])?;
    let top = ranks.iter().copied().max().unwrap_or(0);
    let mut k = 4 * (top + 1);
    let singlets = loop {
        match select_singlets(&solve_fci(&h, k)?, top) {
            Ok(s) => break s,
            Err(_) if k < 4096 => k *= 2,
            Err(e) => return Err(e.into()),
        }
    };

    let mut finals = Vec::new();
    for &rank in &ranks {
        let target = &singlets[rank];
        println!("singlet {rank}: E(CI) = {:.10}", target.energy);
        let points = solve_points(&h, target, ConditionSet::DQG, &counts, &SweepOptions::default())?;
        for (rec, sol) in points {
            let occ = match &sol {
                Some(s) => natural_occupations(&s.d_opt.one_rdm()?)?,
                None => Vec::new(),
            };
            let clamped: Vec<f64> = occ.iter().map(|v| v.clamp(0.0, 1.0)).collect();
            println!(
                "  n={:>3} E = {:.10} |dE| = {:.2e} frob = {:.2e} {} vNE = {:.6}",
                rec.n_shadows,
                rec.energy,
                rec.abs_energy_error,
                rec.frobenius_error,
                rec.status,
                von_neumann_entropy(&clamped).unwrap_or(f64::NAN)
            );
            println!("        occupations {:?}", clamped.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
            finals.push((rank, rec.n_shadows, rec.energy));
        }
    }
    if ranks.len() >= 2 {
        let (a, b) = (ranks[0], ranks[1]);
        let exact = (singlets[b].energy - singlets[a].energy) * HARTREE_TO_KCAL;
        for &n in &counts {
            let e = |r| finals.iter().find(|f| f.0 == r && f.1 == n).map(|f| f.2);
            if let (Some(ea), Some(eb)) = (e(a), e(b)) {
                println!("gap {a}->{b} at n={n}: {:.4} kcal/mol (CI {exact:.4})", (eb - ea) * HARTREE_TO_KCAL);
            }
        }
    }
    Ok(())
}
