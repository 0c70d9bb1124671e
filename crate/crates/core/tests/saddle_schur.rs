mod common;

use uzawa_cavity::numcore::{dot, norm2, project_zero_mean, SplitMix64};
use uzawa_cavity::oracle::{assemble_dense_schur, dense_sym_eigen, schur_spectrum};
use uzawa_cavity::saddle::Extreme;
use uzawa_cavity::InnerSolve;

fn random_zero_mean(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    project_zero_mean(&rng.fill_signed(n))
}

#[test]
fn schur_apply_matches_dense_assembly() {
    let sys = common::cavity(4);
    let prob = sys.problem();
    let dense = assemble_dense_schur(prob).unwrap();
    let mut rng = SplitMix64::new(11);
    for _ in 0..10 {
        let q = random_zero_mean(&mut rng, prob.n_p());
        let fast = prob.schur_apply(&q).unwrap();
        let slow = dense.matrix.matvec(&q).unwrap();
        assert!(common::max_abs_diff(&fast, &slow) <= 1e-8);
    }
}

#[test]
fn schur_is_linear() {
    let sys = common::cavity(5);
    let prob = sys.problem();
    let mut rng = SplitMix64::new(3);
    for _ in 0..5 {
        let q = random_zero_mean(&mut rng, prob.n_p());
        let a = 10.0 * rng.next_signed();
        let aq: Vec<f64> = q.iter().map(|v| a * v).collect();
        let lhs = prob.schur_apply(&aq).unwrap();
        let rhs: Vec<f64> = prob.schur_apply(&q).unwrap().iter().map(|v| a * v).collect();
        assert!(common::max_abs_diff(&lhs, &rhs) <= 1e-10 * norm2(&rhs));
    }
}

#[test]
fn rayleigh_of_eigenvectors_and_range() {
    let sys = common::cavity(4);
    let prob = sys.problem();
    let dense = assemble_dense_schur(prob).unwrap();
    let eig = dense_sym_eigen(&dense.matrix).unwrap();
    let spec = schur_spectrum(prob).unwrap();
    let (m, big_m) = (spec[0], *spec.last().unwrap());
    for k in 0..eig.values.len() {
        let v = eig.vectors.column(k);
        if eig.values[k].abs() < 1e-8 {
            continue; // constant mode
        }
        let r = prob.rayleigh(&v).unwrap();
        assert!((r - eig.values[k]).abs() <= 1e-8, "k={k}: {r} vs {}", eig.values[k]);
    }
    let mut rng = SplitMix64::new(21);
    for _ in 0..20 {
        let q = random_zero_mean(&mut rng, prob.n_p());
        let r = prob.rayleigh(&q).unwrap();
        assert!(r >= m - 1e-8 && r <= big_m + 1e-8);
        let q10: Vec<f64> = q.iter().map(|v| 10.0 * v).collect();
        let r10 = prob.rayleigh(&q10).unwrap();
        assert!((r - r10).abs() <= 1e-12 * r.abs());
    }
}

#[test]
fn estimators_bracket_dense_extremes() {
    for n in [4usize, 5] {
        let sys = common::cavity(n);
        let prob = sys.problem();
        let spec = schur_spectrum(prob).unwrap();
        let top = prob.estimate_extreme_eigen(Extreme::Max, 1e-8, 5000, 1).unwrap();
        let low = prob.estimate_extreme_eigen(Extreme::Min, 1e-8, 20000, 1).unwrap();
        assert!(top.converged && low.converged);
        let exact_max = *spec.last().unwrap();
        assert!((top.value - exact_max).abs() <= 0.01 * exact_max);
        assert!((low.value - spec[0]).abs() <= 0.05 * spec[0]);
        assert!(top.residual >= 0.0 && top.residual <= 1e-8 * top.value);
    }
}

#[test]
fn self_adjoint_positive_and_sandwiched() {
    let sys = common::cavity(6);
    let prob = sys.problem().clone().with_inner(InnerSolve { tol: 1e-12, max_iter: 20_000 });
    let top = prob.estimate_extreme_eigen(Extreme::Max, 1e-8, 5000, 9).unwrap();
    let low = prob.estimate_extreme_eigen(Extreme::Min, 1e-8, 20000, 9).unwrap();
    assert!(top.converged && low.converged);
    let eps = 0.05 * (top.value - low.value);
    let mut rng = SplitMix64::new(17);
    for _ in 0..50 {
        let p = random_zero_mean(&mut rng, prob.n_p());
        let q = random_zero_mean(&mut rng, prob.n_p());
        let sp = prob.schur_apply(&p).unwrap();
        let sq = prob.schur_apply(&q).unwrap();
        let asym = (dot(&sp, &q).unwrap() - dot(&p, &sq).unwrap()).abs();
        assert!(asym <= 1e-8 * norm2(&p) * norm2(&q));
        assert!(dot(&sq, &q).unwrap() > 0.0);
        let r = prob.rayleigh(&q).unwrap();
        assert!(r >= low.value - eps && r <= top.value + eps);
    }
}

#[test]
fn estimator_is_seed_deterministic() {
    let sys = common::cavity(5);
    let a = sys.problem().estimate_extreme_eigen(Extreme::Min, 1e-6, 5000, 42).unwrap();
    let b = sys.problem().estimate_extreme_eigen(Extreme::Min, 1e-6, 5000, 42).unwrap();
    assert_eq!(a, b);
}

#[test]
fn estimator_reports_non_convergence() {
    let sys = common::cavity(6);
    let est = sys.problem().estimate_extreme_eigen(Extreme::Min, 1e-12, 3, 1).unwrap();
    assert!(!est.converged);
    assert_eq!(est.iterations, 6);
    assert!(sys.problem().estimate_extreme_eigen(Extreme::Max, 0.0, 3, 1).is_err());
}
