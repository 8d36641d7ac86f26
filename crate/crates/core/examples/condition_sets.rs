//! Energies of the D, DQ and DQG relaxations with and without shadows.
//! Without shadows every relaxation bounds the ground energy from below.
//!
//! ```bash
//! cargo run --release -p sv2rdm --example condition_sets -- 1 5
//! ```
//! Arguments: excited-state number, number of shadows.

use sv2rdm::fci::{select_singlets, solve_fci};
use sv2rdm::hamiltonian::{build_h_chain, GeometryHChain};
use sv2rdm::rdm::{compute_2rdm, frobenius_error};
use sv2rdm::sdp::{assemble, solve, ConditionSet, SolverSettings};
use sv2rdm::shadow::{generate_shadows, RotationGroup};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let state: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);

    let h = build_h_chain(&GeometryHChain::new(4, 1.0)?)?;
    let singlets = select_singlets(&solve_fci(&h, 12)?, 4)?;
    let d_ref = compute_2rdm(&singlets[state]);
    let shadows = generate_shadows(&d_ref, n, RotationGroup::Unitary, 0, 0.0, None)?;
    let settings = SolverSettings::default();

    println!("E0(FCI) = {:.10}, E{state}(FCI) = {:.10}", singlets[0].energy, singlets[state].energy);
    println!("{:>4} {:>16} {:>16} {:>12} {:>12}", "set", "E (0 shadows)", "E (shadows)", "|dE|", "frob");
    for cs in ConditionSet::ALL {
        let bound = solve(&assemble(&h, &[], cs)?, &settings)?;
        let p = assemble(&h, &shadows, cs)?;
        let sol = solve(&p, &settings)?;
        println!(
            "{cs:>4} {:>16.10} {:>16.10} {:>12.3e} {:>12.3e}",
            bound.energy,
            sol.energy,
            (sol.energy - singlets[state].energy).abs(),
            frobenius_error(&sol.d_opt, &d_ref)?
        );
    }
    Ok(())
}
