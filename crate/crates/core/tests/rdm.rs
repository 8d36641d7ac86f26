mod common;

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use common::embed;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sv2rdm::fci::{solve_fci, CIState, DeterminantBasis};
use sv2rdm::rdm::io::{decode_2rdm, encode_2rdm};
use sv2rdm::rdm::{
    compute_2rdm, energy_from_rdm, frobenius_error, map_d_to_g, map_d_to_q, natural_occupations, reduced_hamiltonian,
    von_neumann_entropy, TwoRDM,
};

fn min_eig(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

fn random_state(r: usize, na: usize, nb: usize, seed: u64) -> CIState {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let basis = Arc::new(DeterminantBasis::new(r, na, nb).unwrap());
    let mut c = DVector::from_fn(basis.len(), |_, _| rng.random_range(-1.0..1.0));
    c /= c.norm();
    CIState {
        basis,
        coefficients: c,
        energy: 0.0,
        s_squared: f64::NAN,
        state_index: 0,
    }
}

/// Exact states of H2 and H4 (all computed roots).
fn exact_states() -> Vec<(sv2rdm::hamiltonian::Hamiltonian, CIState)> {
    let mut out = Vec::new();
    for h in [common::h2(), common::h4()] {
        for s in solve_fci(&h, 8).unwrap() {
            out.push((h.clone(), s));
        }
    }
    out
}

#[test]
fn d_q_g_match_second_quantized_expectations() {
    for (_, s) in exact_states() {
        let psi = embed(&s);
        let d = compute_2rdm(&s);
        assert!(common::max_abs(d.matrix(), &common::oracle_d(&psi)) < 1e-12);
        let q = map_d_to_q(&d).unwrap();
        assert!(common::max_abs(&q.matrix, &common::oracle_q(&psi)) < 1e-12);
        let g = map_d_to_g(&d).unwrap();
        assert!(common::max_abs(&g.matrix, &common::oracle_g(&psi)) < 1e-12);
    }
}

#[test]
fn exact_rdms_are_positive_with_correct_traces() {
    for (h, s) in exact_states() {
        let n = h.n_electrons() as f64;
        let m = 2.0 * h.r_spatial() as f64;
        let d = compute_2rdm(&s);
        d.validate(1e-10, true).unwrap();
        assert_abs_diff_eq!(d.trace(), n * (n - 1.0), epsilon = 1e-10);
        assert_abs_diff_eq!(d.matrix().trace(), n * (n - 1.0) / 2.0, epsilon = 1e-10);
        let q = map_d_to_q(&d).unwrap();
        let g = map_d_to_g(&d).unwrap();
        assert!(min_eig(&q.matrix) > -1e-10);
        assert!(min_eig(&g.matrix) > -1e-10);
        // holes: (M - N)(M - N - 1)
        assert_abs_diff_eq!(q.trace(), (m - n) * (m - n - 1.0), epsilon = 1e-9);
        let d1 = d.one_rdm().unwrap();
        assert_abs_diff_eq!(d1.trace(), n, epsilon = 1e-10);
    }
}

#[test]
fn energy_functionals_match_expectation_value() {
    for (h, s) in exact_states() {
        let d = compute_2rdm(&s);
        let e_oracle = common::oracle_energy(&h, &embed(&s));
        assert_abs_diff_eq!(e_oracle, s.energy, epsilon = 1e-9);
        assert_abs_diff_eq!(energy_from_rdm(&h, &d).unwrap(), s.energy, epsilon = 1e-9);
        let k = reduced_hamiltonian(&h, h.n_electrons()).unwrap();
        assert_abs_diff_eq!(h.e_core() + k.dot(d.matrix()), s.energy, epsilon = 1e-9);
    }
}

#[test]
fn occupations_and_entropy_of_singlets() {
    let (_, singlets) = common::h4_singlets();
    for s in &singlets {
        let d = compute_2rdm(s);
        let d1 = d.one_rdm().unwrap();
        let occ = natural_occupations(&d1).unwrap();
        assert_abs_diff_eq!(occ.iter().sum::<f64>(), 2.0, epsilon = 1e-10);
        assert!(occ.windows(2).all(|w| w[0] >= w[1]));
        assert!(occ.iter().all(|&n| (-1e-12..=1.0 + 1e-12).contains(&n)));
        // singlet: identical spin blocks
        assert!(common::max_abs(&d1.spin_block(0), &d1.spin_block(1)) < 1e-10);
        let s_vn = von_neumann_entropy(&occ).unwrap();
        let direct: f64 = occ.iter().filter(|&&n| n > 0.0).map(|&n| -n * n.ln()).sum();
        assert_abs_diff_eq!(s_vn, direct, epsilon = 1e-12);
    }
}

#[test]
fn hartree_fock_determinant_has_zero_entropy() {
    let basis = Arc::new(DeterminantBasis::new(4, 2, 2).unwrap());
    let mut c = DVector::zeros(basis.len());
    c[0] = 1.0;
    let s = CIState {
        basis,
        coefficients: c,
        energy: 0.0,
        s_squared: 0.0,
        state_index: 0,
    };
    let occ = natural_occupations(&compute_2rdm(&s).one_rdm().unwrap()).unwrap();
    assert_eq!(von_neumann_entropy(&occ).unwrap(), 0.0);
}

#[test]
fn frobenius_metric_properties() {
    let (_, singlets) = common::h4_singlets();
    let a = compute_2rdm(&singlets[1]);
    let b = compute_2rdm(&singlets[2]);
    assert_eq!(frobenius_error(&a, &a).unwrap(), 0.0);
    let direct = (a.matrix() - b.matrix()).norm() / b.matrix().norm();
    assert_abs_diff_eq!(frobenius_error(&a, &b).unwrap(), direct, epsilon = 1e-14);
    let other = TwoRDM::zeros(2, 2);
    assert!(frobenius_error(&a, &other).is_err());
}

#[test]
fn binary_container_round_trip_and_checksum() {
    let (_, singlets) = common::h4_singlets();
    let d = compute_2rdm(&singlets[3]);
    let mut bytes = encode_2rdm(&d);
    assert_eq!(decode_2rdm(&bytes).unwrap(), d);
    let at = bytes.len() / 2;
    bytes[at] ^= 0x10;
    assert!(matches!(decode_2rdm(&bytes), Err(sv2rdm::error::Error::Checksum { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn maps_hold_for_arbitrary_states(seed in 0u64..10_000, shape in 0usize..4) {
        let (r, na, nb) = [(2, 1, 1), (3, 2, 1), (4, 2, 2), (3, 3, 0)][shape];
        let s = random_state(r, na, nb, seed);
        let psi = embed(&s);
        let d = compute_2rdm(&s);
        prop_assert!(common::max_abs(d.matrix(), &common::oracle_d(&psi)) < 1e-12);
        if na + nb >= 2 {
            let q = map_d_to_q(&d).unwrap();
            prop_assert!(common::max_abs(&q.matrix, &common::oracle_q(&psi)) < 1e-12);
            let g = map_d_to_g(&d).unwrap();
            prop_assert!(common::max_abs(&g.matrix, &common::oracle_g(&psi)) < 1e-12);
            prop_assert!(d.min_eigenvalue() > -1e-12);
            prop_assert!(min_eig(&g.matrix) > -1e-12);
        }
        let n = (na + nb) as f64;
        prop_assert!((d.trace() - n * (n - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn energy_from_rdm_matches_expectation_for_arbitrary_states(seed in 0u64..10_000) {
        let h = common::random_hamiltonian(3, 3, seed);
        let s = random_state(3, 2, 1, seed ^ 0xABCD);
        let e = common::oracle_energy(&h, &embed(&s));
        prop_assert!((energy_from_rdm(&h, &compute_2rdm(&s)).unwrap() - e).abs() < 1e-10);
    }
}
