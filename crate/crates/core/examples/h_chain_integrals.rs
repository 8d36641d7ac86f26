//! STO-3G integrals and RHF orbitals of a linear hydrogen chain, written as FCIDUMP.
//!
//! ```bash
//! cargo run -p sv2rdm --example h_chain_integrals -- 4 1.0 h4.fcidump
//! ```

use sv2rdm::hamiltonian::{build_h_chain_with, write_fcidump, GeometryHChain, ScfOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_atoms: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);
    let bond: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1.0);
    let out = args.next();

    let scf = build_h_chain_with(&GeometryHChain::new(n_atoms, bond)?, &ScfOptions::default())?;
    let h = &scf.hamiltonian;
    println!("H{n_atoms}, {bond} A: {} orbitals, {} electrons", h.r_spatial(), h.n_electrons());
    println!("SCF energy {:.10} after {} iterations", scf.scf_energy, scf.iterations);
    println!("nuclear repulsion {:.10}", h.e_core());
    for (i, e) in scf.orbital_energies.iter().enumerate() {
        println!("  orbital {i}: {e:>14.8}");
    }
    match out {
        Some(path) => {
            std::fs::write(&path, write_fcidump(h))?;
            println!("wrote {path}");
        }
        None => print!("{}", write_fcidump(h)),
    }
    Ok(())
}
