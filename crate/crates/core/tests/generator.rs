mod common;

use common::*;
use lindblad_core::linalg::{unvec, vec, MatrixAoS, VectorAoS};
use lindblad_core::lindblad::{lowering_operator, transmon_model};
use lindblad_core::random::{random_density, random_hermitian, random_model, rng};
use lindblad_core::validate::{check_generator, check_generator_sequential, GENERATOR_TOL};
use lindblad_core::{apply_rhs, build_lindbladian, LindbladModel, Lindbladian, TransmonParams};

fn act(l: &Lindbladian, rho: &MatrixAoS) -> Dense {
    let v = vec(rho).unwrap();
    let out = l
        .matrix()
        .matmul(&MatrixAoS::from_fn(v.len(), 1, |i, _| v.as_slice()[i]))
        .unwrap();
    dense(&unvec(&VectorAoS::from_slice(out.as_slice())).unwrap())
}

#[test]
fn generator_matches_term_by_term_rhs() {
    let mut r = rng(200);
    for d in [2, 3, 9] {
        for k in 0..100 {
            let model = random_model(&mut r, d, 1 + k % 3);
            let l = build_lindbladian(&model);
            let rho = random_density(&mut r, d);
            let ops: Vec<Dense> = model.collapse_ops().iter().map(dense).collect();
            let want = master_rhs(&dense(model.hamiltonian()), &ops, &dense(&rho));
            assert!(rel(&act(&l, &rho), &want) <= 1e-12, "d = {d}, model {k}");
            assert!(rel(&dense(&apply_rhs(&model, &rho).unwrap()), &want) <= 1e-12);
        }
    }
}

/// vec(I)† ℒ = 0: the row combination picking out the trace vanishes.
#[test]
fn generator_annihilates_the_trace() {
    let mut r = rng(201);
    for d in [2, 3, 9] {
        for _ in 0..100 {
            let l = build_lindbladian(&random_model(&mut r, d, 2));
            let m = l.matrix();
            for col in 0..d * d {
                let s: lindblad_core::Complex64 = (0..d).map(|i| m[(i * d + i, col)]).sum();
                assert!(s.norm() <= 1e-12, "column {col} at d = {d}: {s}");
            }
        }
    }
}

#[test]
fn generator_preserves_hermiticity() {
    let mut r = rng(202);
    for d in [2, 3, 9] {
        let l = build_lindbladian(&random_model(&mut r, d, 2));
        let h = random_hermitian(&mut r, d);
        let out = act(&l, &h);
        assert!(rel(&out, &dag(&out)) <= 1e-12);
    }
}

#[test]
fn hamiltonian_only_generator() {
    let mut r = rng(203);
    let h = random_hermitian(&mut r, 3);
    let l = build_lindbladian(&LindbladModel::new(h.clone(), vec![]).unwrap());
    let id = eye(3);
    let want = scale(
        &add(
            &kron(&dense(&h), &id),
            &kron(&id, &dense(&h.transpose())),
            c(-1.0, 0.0),
        ),
        c(0.0, -1.0),
    );
    assert!(rel(&dense(l.matrix()), &want) <= 1e-15);
    // [H, I] = 0
    assert!(max_abs(&act(&l, &MatrixAoS::identity(3))) <= 1e-15);
    let zero = build_lindbladian(&LindbladModel::new(MatrixAoS::zeros(2, 2), vec![]).unwrap());
    assert_eq!(zero.matrix(), &MatrixAoS::zeros(4, 4));
}

#[test]
fn amplitude_damping_generator() {
    let gamma: f64 = 0.7;
    let l_op = lowering_operator(2).scale(c(gamma.sqrt(), 0.0));
    let l = build_lindbladian(&LindbladModel::new(MatrixAoS::zeros(2, 2), vec![l_op]).unwrap());
    let g = |x: f64| c(gamma * x, 0.0);
    let want = vec![
        vec![g(0.0), g(0.0), g(0.0), g(1.0)],
        vec![g(0.0), g(-0.5), g(0.0), g(0.0)],
        vec![g(0.0), g(0.0), g(-0.5), g(0.0)],
        vec![g(0.0), g(0.0), g(0.0), g(-1.0)],
    ];
    assert!(rel(&dense(l.matrix()), &want) <= 1e-15);

    let excited = MatrixAoS::diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let out = act(&l, &excited);
    assert!(rel(&out, &vec![vec![g(1.0), g(0.0)], vec![g(0.0), g(-1.0)]]) <= 1e-15);
}

#[test]
fn generator_check_passes_on_built_and_fails_on_perturbed() {
    let mut r = rng(204);
    for d in [2, 3, 9] {
        let l = build_lindbladian(&random_model(&mut r, d, 2));
        assert!(check_generator(&l, 20, GENERATOR_TOL, 1));
        assert!(check_generator_sequential(&l, 20, GENERATOR_TOL, 1));
        let mut m = l.into_matrix();
        m[(0, 1)] += c(1e-6, 0.0);
        let bad = Lindbladian::from_matrix(m).unwrap();
        assert!(!check_generator(&bad, 20, GENERATOR_TOL, 1));
    }
    let zero = Lindbladian::from_matrix(MatrixAoS::zeros(9, 9)).unwrap();
    assert!(check_generator(&zero, 5, GENERATOR_TOL, 0));
}

#[test]
fn transmon_generator_is_trace_preserving() {
    let l = build_lindbladian(&transmon_model(TransmonParams::default()).unwrap());
    // Entries are O(1e9); the check is relative to that scale.
    let scale = l.matrix().max_abs();
    let m = l.matrix();
    for col in 0..9 {
        let s: lindblad_core::Complex64 = (0..3).map(|i| m[(i * 3 + i, col)]).sum();
        assert!(s.norm() <= 1e-12 * scale);
    }
}
