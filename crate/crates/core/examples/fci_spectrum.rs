//! Full-CI spectrum of a hydrogen chain with spin labels.
//!
//! ```bash
//! cargo run -p sv2rdm --example fci_spectrum -- 4 1.0
//! ```

use sv2rdm::fci::{select_singlets, solve_fci};
use sv2rdm::hamiltonian::{build_h_chain, GeometryHChain};
use sv2rdm::rdm::{compute_2rdm, energy_from_rdm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_atoms: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);
    let bond: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1.0);

    let h = build_h_chain(&GeometryHChain::new(n_atoms, bond)?)?;
    let states = solve_fci(&h, 16)?;
    println!("H{n_atoms} chain, {bond} A: {} determinants", states[0].basis.len());
    println!("{:>5} {:>18} {:>10} {:>18}", "state", "energy", "S^2", "E[2-RDM]");
    for s in &states {
        let e_rdm = energy_from_rdm(&h, &compute_2rdm(s))?;
        println!("{:>5} {:>18.10} {:>10.6} {:>18.10}", s.state_index, s.energy, s.s_squared, e_rdm);
    }
    let singlets = select_singlets(&states, 4)?;
    println!("\nground + four lowest singlet excitations:");
    for (k, s) in singlets.iter().enumerate() {
        println!("  E{k} = {:.10} (state {})", s.energy, s.state_index);
    }
    Ok(())
}
