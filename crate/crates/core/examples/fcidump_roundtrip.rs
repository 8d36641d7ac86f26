//! Writes a Hamiltonian to FCIDUMP text, parses it back and compares.
//! With a path argument the file is read instead and its FCI ground state printed.
//!
//! ```bash
//! cargo run -p sv2rdm --example fcidump_roundtrip
//! cargo run -p sv2rdm --example fcidump_roundtrip -- h4.fcidump
//! ```

use sv2rdm::fci::solve_fci;
use sv2rdm::hamiltonian::{build_h_chain, parse_fcidump, write_fcidump, GeometryHChain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = match std::env::args().nth(1) {
        Some(path) => parse_fcidump(&std::fs::read_to_string(path)?)?,
        None => build_h_chain(&GeometryHChain::new(4, 1.0)?)?,
    };
    let text = write_fcidump(&h);
    let back = parse_fcidump(&text)?;
    let diff = h.max_abs_diff(&back).ok_or("shape changed in round trip")?;
    println!("{} orbitals, {} electrons, {} lines", h.r_spatial(), h.n_electrons(), text.lines().count());
    println!("max |integral difference| after round trip: {diff:.3e}");
    let e0 = solve_fci(&h, 1)?[0].energy;
    let e1 = solve_fci(&back, 1)?[0].energy;
    println!("FCI ground energy {e0:.12} / reparsed {e1:.12}");
    Ok(())
}
