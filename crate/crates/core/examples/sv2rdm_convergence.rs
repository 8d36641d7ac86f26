//! Energy and 2-RDM error of a shadow-constrained variational 2-RDM run as
//! more shadows of a target state are added.
//!
//! ```bash
//! cargo run --release -p sv2rdm --example sv2rdm_convergence -- 1 DQG 12 7
//! ```
//! Arguments: excited-state number (0 = ground), condition set, maximum
//! shadow count, seed.

use sv2rdm::fci::{select_singlets, solve_fci};
use sv2rdm::hamiltonian::{build_h_chain, GeometryHChain};
use sv2rdm::sdp::{convergence_sweep, ConditionSet, SweepOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let state: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let conditions: ConditionSet = args.next().map(|s| s.parse()).transpose()?.unwrap_or(ConditionSet::DQG);
    let n_max: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(12);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let h = build_h_chain(&GeometryHChain::new(4, 1.0)?)?;
    let singlets = select_singlets(&solve_fci(&h, 12)?, 4)?;
    let target = &singlets[state];
    println!("target E{state} = {:.10}, conditions {conditions}, seed {seed}", target.energy);

    let opts = SweepOptions {
        seed,
        ..SweepOptions::default()
    };
    println!("{:>3} {:>16} {:>11} {:>11} {:>10} {:>7} {:>8}", "n", "energy", "|dE|", "frob", "status", "iters", "time/s");
    for r in convergence_sweep(&h, target, conditions, n_max, &opts)? {
        println!(
            "{:>3} {:>16.10} {:>11.3e} {:>11.3e} {:>10} {:>7} {:>8.3}",
            r.n_shadows, r.energy, r.abs_energy_error, r.frobenius_error, r.status, r.iterations, r.wall_time
        );
    }
    Ok(())
}
