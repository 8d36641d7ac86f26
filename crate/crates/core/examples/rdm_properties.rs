//! 2-RDM of FCI states: trace, positivity of D, Q and G, energy, natural
//! occupations and von Neumann entropy.
//!
//! ```bash
//! cargo run -p sv2rdm --example rdm_properties -- 4 1.0
//! ```

use sv2rdm::fci::{select_singlets, solve_fci};
use sv2rdm::hamiltonian::{build_h_chain, GeometryHChain};
use sv2rdm::rdm::io::{decode_2rdm, encode_2rdm, occupations_csv, OccupationRow};
use sv2rdm::rdm::{compute_2rdm, energy_from_rdm, map_d_to_g, map_d_to_q, natural_occupations, von_neumann_entropy};

fn min_eig(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_atoms: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);
    let bond: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1.0);

    let h = build_h_chain(&GeometryHChain::new(n_atoms, bond)?)?;
    let singlets = select_singlets(&solve_fci(&h, 16)?, 4)?;
    println!("{:>3} {:>14} {:>14} {:>8} {:>10} {:>10} {:>10}", "k", "E_FCI", "E[D]", "tr D", "min D", "min Q", "min G");
    let mut rows = Vec::new();
    for (k, s) in singlets.iter().enumerate() {
        let d = compute_2rdm(s);
        let q = map_d_to_q(&d)?;
        let g = map_d_to_g(&d)?;
        println!(
            "{k:>3} {:>14.9} {:>14.9} {:>8.4} {:>10.2e} {:>10.2e} {:>10.2e}",
            s.energy,
            energy_from_rdm(&h, &d)?,
            d.trace(),
            d.min_eigenvalue(),
            min_eig(&q.matrix),
            min_eig(&g.matrix)
        );
        let occ = natural_occupations(&d.one_rdm()?)?;
        let entropy = von_neumann_entropy(&occ)?;
        rows.push(OccupationRow {
            label: format!("E{k}"),
            occupations: occ,
            entropy,
        });
        let bytes = encode_2rdm(&d);
        assert_eq!(decode_2rdm(&bytes)?, d);
    }
    print!("\n{}", occupations_csv(&rows));
    Ok(())
}
