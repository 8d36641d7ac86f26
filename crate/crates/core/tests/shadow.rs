mod common;

use approx::assert_abs_diff_eq;
use common::{embed, full_2rdm, naive_shadow};
use proptest::prelude::*;
use sv2rdm::rdm::compute_2rdm;
use sv2rdm::shadow::{
    generate_shadows, measure_shadow, rotate_2rdm, sample_rotation_in, shadow_constraint_rows, shadows_from_json,
    shadows_to_json, Bound, OrbitalRotation, RotationGroup,
};

const GROUPS: [RotationGroup; 2] = [RotationGroup::Orthogonal, RotationGroup::Unitary];

#[test]
fn fast_shadow_matches_direct_contraction() {
    let (_, singlets) = common::h4_singlets();
    for s in &singlets[..2] {
        let full = full_2rdm(&embed(s));
        let d = compute_2rdm(s);
        for group in GROUPS {
            for idx in 0..3 {
                let rot = sample_rotation_in(group, 4, 42, idx);
                let fast = measure_shadow(&d, &rot, 0.0, None).unwrap();
                let slow = naive_shadow(&full, &rot.spin_orbital_matrix());
                assert_eq!(fast.values.len(), 28);
                for (a, b) in fast.values.iter().zip(&slow) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                }
            }
        }
    }
}

#[test]
fn rotations_are_unitary_and_group_consistent() {
    for group in GROUPS {
        for idx in 0..20 {
            let rot = sample_rotation_in(group, 5, 7, idx);
            assert!(rot.unitarity_error() < 1e-12);
            assert_abs_diff_eq!(rot.determinant().norm(), 1.0, epsilon = 1e-12);
            assert_eq!(rot.is_real(), group == RotationGroup::Orthogonal);
            let w = rot.pair_matrix();
            let wwh = &w * w.adjoint();
            let err = (wwh - nalgebra::DMatrix::identity(w.nrows(), w.nrows())).norm();
            assert!(err < 1e-11);
        }
    }
}

#[test]
fn haar_moments() {
    let r = 4;
    let n = 20_000;
    for (group, fourth) in [(RotationGroup::Unitary, 0.1), (RotationGroup::Orthogonal, 0.125)] {
        let (mut m2, mut m4, mut sq) = (0.0, 0.0, common::Complex64::new(0.0, 0.0));
        for idx in 0..n {
            let u = sample_rotation_in(group, r, 2024, idx).matrix;
            for z in u.iter() {
                m2 += z.norm_sqr();
                m4 += z.norm_sqr().powi(2);
                sq += z * z;
            }
        }
        let count = (n * r * r) as f64;
        assert_abs_diff_eq!(m2 / count, 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(m4 / count, fourth, epsilon = 3e-3);
        if group.is_complex() {
            assert!((sq / count).norm() < 5e-3);
        } else {
            assert_abs_diff_eq!(sq.re / count, 0.25, epsilon = 1e-9);
        }
    }
}

#[test]
fn composed_rotation_equals_rotated_state() {
    let (_, singlets) = common::h4_singlets();
    let d = compute_2rdm(&singlets[0]);
    let v = sample_rotation_in(RotationGroup::Orthogonal, 4, 3, 0);
    let d_v = rotate_2rdm(&d, &v).unwrap();
    for group in GROUPS {
        let u = sample_rotation_in(group, 4, 3, 1);
        let a = measure_shadow(&d, &u.compose(&v), 0.0, None).unwrap();
        let b = measure_shadow(&d_v, &u, 0.0, None).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }
    let complex = sample_rotation_in(RotationGroup::Unitary, 4, 3, 0);
    assert!(rotate_2rdm(&d, &complex).is_err());
}

#[test]
fn identity_shadow_is_diagonal_of_d() {
    let (_, singlets) = common::h4_singlets();
    let d = compute_2rdm(&singlets[2]);
    let sh = measure_shadow(&d, &OrbitalRotation::identity(4), 0.0, None).unwrap();
    for (p, v) in sh.values.iter().enumerate() {
        assert_abs_diff_eq!(*v, d.matrix()[(p, p)], epsilon = 1e-14);
    }
}

#[test]
fn exact_rdm_satisfies_its_own_rows() {
    let (_, singlets) = common::h4_singlets();
    let d = compute_2rdm(&singlets[1]);
    for group in GROUPS {
        let shadows = generate_shadows(&d, 5, group, 11, 0.0, None).unwrap();
        for sh in &shadows {
            let rows = shadow_constraint_rows(sh);
            assert_eq!(rows.len(), 28);
            for row in &rows {
                assert!(matches!(row.bound, Bound::Equal(_)));
                assert!(row.violation(&d) < 1e-10);
                let via_matrix = (row.coefficient_matrix().component_mul(d.matrix())).sum();
                assert_abs_diff_eq!(via_matrix, row.evaluate(&d), epsilon = 1e-12);
            }
            let loose = shadow_constraint_rows(&sh.clone().with_epsilon(1e-3));
            assert!(loose.iter().all(|row| row.violation(&d) < 0.0));
        }
    }
}

#[test]
fn shadow_sequences_are_prefix_stable() {
    let (_, singlets) = common::h4_singlets();
    let d = compute_2rdm(&singlets[0]);
    let short = generate_shadows(&d, 3, RotationGroup::Unitary, 5, 1e-3, Some(9)).unwrap();
    let long = generate_shadows(&d, 8, RotationGroup::Unitary, 5, 1e-3, Some(9)).unwrap();
    assert_eq!(short[..], long[..3]);
    let other = generate_shadows(&d, 3, RotationGroup::Unitary, 6, 1e-3, Some(9)).unwrap();
    assert_ne!(short[0].values, other[0].values);
}

#[test]
fn json_round_trip_is_exact() {
    let (_, singlets) = common::h4_singlets();
    let d = compute_2rdm(&singlets[3]);
    for group in GROUPS {
        let shadows = generate_shadows(&d, 4, group, 1, 2e-3, Some(4)).unwrap();
        let back = shadows_from_json(&shadows_to_json(&shadows).unwrap()).unwrap();
        assert_eq!(back, shadows);
    }
    assert!(shadows_from_json("{\"not\": \"shadows\"}").is_err());
}

#[test]
fn rejects_bad_input() {
    let (_, singlets) = common::h4_singlets();
    let d = compute_2rdm(&singlets[0]);
    let rot = sample_rotation_in(RotationGroup::Unitary, 3, 0, 0);
    assert!(measure_shadow(&d, &rot, 0.0, None).is_err());
    let rot = sample_rotation_in(RotationGroup::Unitary, 4, 0, 0);
    assert!(measure_shadow(&d, &rot, -1.0, None).is_err());
    assert!(measure_shadow(&d, &rot, f64::NAN, None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noise_stays_within_epsilon(seed in 0u64..1_000_000, noise in 0u64..1_000_000, eps in 1e-6f64..1e-1) {
        let (_, singlets) = common::h4_singlets();
        let d = compute_2rdm(&singlets[0]);
        let rot = sample_rotation_in(RotationGroup::Unitary, 4, seed, 0);
        let clean = measure_shadow(&d, &rot, 0.0, None).unwrap();
        let noisy = measure_shadow(&d, &rot, eps, Some(noise)).unwrap();
        for (a, b) in clean.values.iter().zip(&noisy.values) {
            prop_assert!((a - b).abs() <= eps);
        }
        prop_assert!(shadow_constraint_rows(&noisy).iter().all(|row| row.violation(&d) <= 1e-12));
    }

    #[test]
    fn pair_occupations_sum_to_pair_count(seed in 0u64..1_000_000, state in 0usize..4, real in any::<bool>()) {
        let (_, singlets) = common::h4_singlets();
        let d = compute_2rdm(&singlets[state]);
        let group = if real { RotationGroup::Orthogonal } else { RotationGroup::Unitary };
        let sh = measure_shadow(&d, &sample_rotation_in(group, 4, seed, 0), 0.0, None).unwrap();
        prop_assert!((sh.values.iter().sum::<f64>() - 6.0).abs() < 1e-10);
        prop_assert!(sh.values.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }
}
