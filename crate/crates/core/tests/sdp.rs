mod common;

use approx::assert_abs_diff_eq;
use sv2rdm::fci::CIState;
use sv2rdm::hamiltonian::Hamiltonian;
use sv2rdm::rdm::{compute_2rdm, map_d_to_g, map_d_to_q};
use sv2rdm::sdp::{
    assemble, convergence_sweep, epsilon_diagnostic, solve, solve_points, ConditionSet, SdpSolution, SolveStatus,
    SolverMethod, SolverSettings, SweepOptions,
};
use sv2rdm::shadow::{generate_shadows, RotationGroup, Shadow};

const TOL: f64 = 1e-7;

fn min_eig(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

fn shadows_of(target: &CIState, n: usize, seed: u64) -> Vec<Shadow> {
    generate_shadows(&compute_2rdm(target), n, RotationGroup::Unitary, seed, 0.0, None).unwrap()
}

fn run(h: &Hamiltonian, shadows: &[Shadow], c: ConditionSet) -> SdpSolution {
    solve(&assemble(h, shadows, c).unwrap(), &SolverSettings::default()).unwrap()
}

fn check_solution(sol: &SdpSolution, c: ConditionSet) {
    assert_eq!(sol.status, SolveStatus::Converged);
    assert!(sol.primal_residual <= TOL && sol.dual_residual <= TOL);
    let d = &sol.d_opt;
    assert_abs_diff_eq!(d.trace(), 12.0, epsilon = 1e-6);
    assert!(d.hermiticity_error() < 1e-12);
    assert!(d.min_eigenvalue() > -10.0 * TOL);
    if c.has_q() {
        assert!(min_eig(&map_d_to_q(d).unwrap().matrix) > -10.0 * TOL);
    }
    if c.has_g() {
        assert!(min_eig(&map_d_to_g(d).unwrap().matrix) > -10.0 * TOL);
    }
}

#[test]
fn h4_block_sizes_and_row_counts() {
    let (h, singlets) = common::h4_singlets();
    let p = assemble(&h, &[], ConditionSet::DQG).unwrap();
    assert_eq!(p.block_sizes(), vec![("D", 28), ("Q", 28), ("G", 64)]);
    assert_eq!(p.n_equality_rows(), 1);
    assert_eq!(p.n_inequality_rows(), 0);
    assert_eq!(assemble(&h, &[], ConditionSet::D).unwrap().block_sizes(), vec![("D", 28)]);

    let one = shadows_of(&singlets[1], 1, 0);
    let p = assemble(&h, &one, ConditionSet::DQG).unwrap();
    assert_eq!(p.n_equality_rows(), 1 + 28);
    let loose: Vec<Shadow> = one.iter().cloned().map(|s| s.with_epsilon(1e-3)).collect();
    let p = assemble(&h, &loose, ConditionSet::DQG).unwrap();
    assert_eq!(p.n_equality_rows(), 1);
    assert_eq!(p.n_inequality_rows(), 56);
    for row in p.equalities.iter().map(|r| &r.coefficients).chain(p.inequalities.iter().map(|r| &r.coefficients)) {
        assert!(row.iter().all(|&(j, _)| j < p.n_variables()));
    }
}

#[test]
fn assembly_rejects_inconsistent_shadows() {
    let (h, singlets) = common::h4_singlets();
    let mut sh = shadows_of(&singlets[0], 2, 0);
    sh[1] = sh[0].clone();
    assert!(assemble(&h, &sh, ConditionSet::D).is_err());
    let h2 = common::h2();
    assert!(assemble(&h2, &shadows_of(&singlets[0], 1, 0), ConditionSet::D).is_err());
}

#[test]
fn exact_rdm_is_feasible_and_the_objective_is_its_energy() {
    let (h, singlets) = common::h4_singlets();
    let target = &singlets[2];
    let d = compute_2rdm(target);
    let p = assemble(&h, &shadows_of(target, 3, 5), ConditionSet::DQG).unwrap();
    let x = p.d_layout.pack(d.matrix());
    assert!(sv2rdm::sdp::constraint_violation(&p, &x) < 1e-10);
    let e: f64 = p.e_core + p.objective.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>();
    assert_abs_diff_eq!(e, target.energy, epsilon = 1e-10);
}

#[test]
fn zero_shadow_lower_bounds() {
    let (h, singlets) = common::h4_singlets();
    for c in ConditionSet::ALL {
        let sol = run(&h, &[], c);
        check_solution(&sol, c);
        assert!(sol.energy <= singlets[0].energy + 10.0 * TOL);
    }
    // two electrons: D alone is exact
    let h2 = common::h2();
    let e0 = common::oracle_spectrum(&h2)[0];
    for c in ConditionSet::ALL {
        let sol = solve(&assemble(&h2, &[], c).unwrap(), &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        assert_abs_diff_eq!(sol.energy, e0, epsilon = 1e-6);
    }
}

#[test]
fn condition_sets_are_ordered() {
    let (h, singlets) = common::h4_singlets();
    for n in [0, 2] {
        let sh = shadows_of(&singlets[1], n, 3);
        let e: Vec<f64> = ConditionSet::ALL
            .iter()
            .map(|&c| {
                let sol = run(&h, &sh, c);
                check_solution(&sol, c);
                sol.energy
            })
            .collect();
        assert!(e[0] <= e[1] + 10.0 * TOL && e[1] <= e[2] + 10.0 * TOL, "{e:?}");
        assert!(e[2] <= singlets[1].energy + 10.0 * TOL);
    }
}

#[test]
fn sweep_energies_rise_monotonically_and_stay_below_target() {
    let (h, singlets) = common::h4_singlets();
    for (state, c) in [(1, ConditionSet::DQG), (3, ConditionSet::DQ)] {
        let target = &singlets[state];
        let opts = SweepOptions {
            seed: 4,
            ..SweepOptions::default()
        };
        let recs = convergence_sweep(&h, target, c, 5, &opts).unwrap();
        assert_eq!(recs.iter().map(|r| r.n_shadows).collect::<Vec<_>>(), (0..=5).collect::<Vec<_>>());
        let plain = run(&h, &[], c);
        assert_abs_diff_eq!(recs[0].energy, plain.energy, epsilon = 1e-12);
        for w in recs.windows(2) {
            assert!(w[1].energy >= w[0].energy - 10.0 * TOL);
        }
        for r in &recs {
            assert!(r.is_converged());
            assert!(r.energy <= target.energy + 10.0 * TOL);
            assert_abs_diff_eq!(r.abs_energy_error, (r.energy - target.energy).abs(), epsilon = 0.0);
        }
    }
}

#[test]
fn well_determined_program_recovers_the_state() {
    let (h, singlets) = common::h4_singlets();
    let target = &singlets[1];
    let opts = SweepOptions {
        seed: 2,
        ..SweepOptions::default()
    };
    let out = solve_points(&h, target, ConditionSet::DQG, &[11], &opts).unwrap();
    let (rec, sol) = &out[0];
    check_solution(sol.as_ref().unwrap(), ConditionSet::DQG);
    assert!(rec.abs_energy_error < 1e-5);
    assert!(rec.frobenius_error < 1e-4);
}

#[test]
fn interior_point_and_admm_agree() {
    let (h, singlets) = common::h4_singlets();
    let p = assemble(&h, &shadows_of(&singlets[1], 3, 1), ConditionSet::DQ).unwrap();
    let sols: Vec<SdpSolution> = [SolverMethod::InteriorPoint, SolverMethod::Admm]
        .into_iter()
        .map(|method| {
            solve(
                &p,
                &SolverSettings {
                    method,
                    ..SolverSettings::default()
                },
            )
            .unwrap()
        })
        .collect();
    for s in &sols {
        check_solution(s, ConditionSet::DQ);
    }
    assert_eq!(sols[0].method, SolverMethod::InteriorPoint);
    assert_eq!(sols[1].method, SolverMethod::Admm);
    assert_abs_diff_eq!(sols[0].energy, sols[1].energy, epsilon = 1e-5);
}

#[test]
fn solves_are_deterministic() {
    let (h, singlets) = common::h4_singlets();
    let p = assemble(&h, &shadows_of(&singlets[2], 2, 8), ConditionSet::DQG).unwrap();
    let a = solve(&p, &SolverSettings::default()).unwrap();
    let b = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    assert_eq!(a.d_opt, b.d_opt);
}

#[test]
fn inconsistent_shadows_are_reported_infeasible() {
    let (h, singlets) = common::h4_singlets();
    let d_ref = compute_2rdm(&singlets[1]);
    let mut sh = generate_shadows(&d_ref, 2, RotationGroup::Unitary, 0, 1e-4, None).unwrap();
    // pair occupations no longer sum to the pair count
    for s in &mut sh {
        s.values.iter_mut().for_each(|v| *v += 0.01);
    }
    for method in [SolverMethod::InteriorPoint, SolverMethod::Admm] {
        let sol = solve(
            &assemble(&h, &sh, ConditionSet::DQ).unwrap(),
            &SolverSettings {
                method,
                ..SolverSettings::default()
            },
        )
        .unwrap();
        match method {
            SolverMethod::InteriorPoint => assert_eq!(sol.status, SolveStatus::InfeasibleDetected),
            _ => assert_ne!(sol.status, SolveStatus::Converged),
        }
    }
    let diag = epsilon_diagnostic(&sh, &d_ref);
    assert_abs_diff_eq!(diag.suggested_epsilon, 0.01, epsilon = 1e-9);
    assert!(diag.max_violation > 0.0099);
}

#[test]
fn problem_and_solution_serialize() {
    let (h, singlets) = common::h4_singlets();
    let p = assemble(&h, &shadows_of(&singlets[0], 1, 0), ConditionSet::DQG).unwrap();
    let v: serde_json::Value = serde_json::from_str(&p.to_json().unwrap()).unwrap();
    assert_eq!(v["equalities"].as_array().unwrap().len(), 29);
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&sol.to_json().unwrap()).unwrap();
    assert_eq!(v["status"], "converged");
    assert_eq!(v["energy"].as_f64().unwrap(), sol.energy);
}
