//! Haar-random orbital rotations and the pair-occupation shadows they produce.
//!
//! ```bash
//! cargo run -p sv2rdm --example shadow_sampling -- 3 1e-3
//! ```
//! Arguments: number of shadows, noise amplitude.

use sv2rdm::fci::{select_singlets, solve_fci};
use sv2rdm::hamiltonian::{build_h_chain, GeometryHChain};
use sv2rdm::rdm::compute_2rdm;
use sv2rdm::shadow::{generate_shadows, shadow_constraint_rows, shadows_from_json, shadows_to_json, RotationGroup};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let epsilon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-3);

    let h = build_h_chain(&GeometryHChain::new(4, 1.0)?)?;
    let target = &select_singlets(&solve_fci(&h, 12)?, 1)?[1];
    let d = compute_2rdm(target);

    let exact = generate_shadows(&d, n, RotationGroup::Unitary, 11, 0.0, None)?;
    let noisy = generate_shadows(&d, n, RotationGroup::Unitary, 11, epsilon, Some(99))?;
    for (e, s) in exact.iter().zip(&noisy) {
        let rot = &e.rotation;
        let sum: f64 = e.values.iter().map(|v| 2.0 * v).sum();
        let dev = e.values.iter().zip(&s.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "shadow {}: |U^+U - 1| = {:.1e}, |det U| = {:.12}, 2 sum S = {sum:.10}, max noise {dev:.2e}",
            rot.index,
            rot.unitarity_error(),
            rot.determinant().norm()
        );
    }

    let rows: Vec<_> = exact.iter().flat_map(shadow_constraint_rows).collect();
    let worst = rows.iter().map(|r| r.violation(&d)).fold(0.0, f64::max);
    println!("{} equality rows, largest violation by the generating 2-RDM {worst:.2e}", rows.len());
    let noisy_rows: Vec<_> = noisy.iter().flat_map(shadow_constraint_rows).collect();
    let worst = noisy_rows.iter().map(|r| r.violation(&d)).fold(0.0, f64::max);
    println!("{} interval rows, largest violation {worst:.2e}", noisy_rows.len());

    let json = shadows_to_json(&noisy)?;
    assert_eq!(shadows_from_json(&json)?, noisy);
    println!("JSON round trip of {} bytes is exact", json.len());
    Ok(())
}
