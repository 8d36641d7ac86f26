//! Interior-point and ADMM solutions of the same shadow-constrained program.
//!
//! ```bash
//! cargo run --release -p sv2rdm --example solver_comparison -- DQ 4
//! ```

use sv2rdm::fci::{select_singlets, solve_fci};
use sv2rdm::hamiltonian::{build_h_chain, GeometryHChain};
use sv2rdm::rdm::compute_2rdm;
use sv2rdm::sdp::{assemble, solve, ConditionSet, SolverMethod, SolverSettings};
use sv2rdm::shadow::{generate_shadows, RotationGroup};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let conditions: ConditionSet = args.next().map(|s| s.parse()).transpose()?.unwrap_or(ConditionSet::DQ);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);

    let h = build_h_chain(&GeometryHChain::new(4, 1.0)?)?;
    let target = &select_singlets(&solve_fci(&h, 12)?, 1)?[1];
    let shadows = generate_shadows(&compute_2rdm(target), n, RotationGroup::Unitary, 3, 0.0, None)?;
    let p = assemble(&h, &shadows, conditions)?;
    println!(
        "{} variables, {} equality rows, blocks {:?}",
        p.n_variables(),
        p.n_equality_rows(),
        p.block_sizes()
    );
    for method in [SolverMethod::InteriorPoint, SolverMethod::Admm] {
        let settings = SolverSettings {
            method,
            ..SolverSettings::default()
        };
        let sol = solve(&p, &settings)?;
        println!(
            "{method:>14}: E = {:.10}  |dE| = {:.2e}  {} after {} iterations, {:.2} s, violation {:.1e}",
            sol.energy,
            (sol.energy - target.energy).abs(),
            sol.status,
            sol.iterations,
            sol.wall_time,
            sol.constraint_violation_max
        );
    }
    Ok(())
}
