use std::f64::consts::PI;

use super::*;
use crate::fem::{gradient_error, interpolate};
use crate::mesh::{bisect, generate_lshape, generate_uniform_square, regular_refine};

fn p1(mesh: Mesh) -> Arc<FeSpace> {
    Arc::new(FeSpace::linear(Arc::new(mesh)))
}

fn test_meshes() -> Vec<Mesh> {
    let square = generate_uniform_square(4).unwrap();
    let marked: Vec<usize> = (0..square.num_triangles()).step_by(3).collect();
    let bisected = bisect(&square, &marked).unwrap();
    let twice = bisect(&bisected, &[0, 5, 7]).unwrap();
    vec![square, generate_lshape(2).unwrap(), bisected, twice]
}

#[test]
fn quadratics_are_recovered_exactly() {
    let q = |p: Point| 0.3 - p[0] + 2.0 * p[1] + 1.5 * p[0] * p[0] - 0.7 * p[0] * p[1] + 2.5 * p[1] * p[1];
    let dq = |p: Point| [-1.0 + 3.0 * p[0] - 0.7 * p[1], 2.0 - 0.7 * p[0] + 5.0 * p[1]];
    for mesh in test_meshes() {
        let u = interpolate(p1(mesh), q);
        let g = recover(&u).unwrap();
        for (v, &p) in u.space.dof_coords().iter().enumerate() {
            let exact = dq(p);
            let got = g.at_vertex(v);
            assert!((got[0] - exact[0]).abs() < 1e-11 && (got[1] - exact[1]).abs() < 1e-11);
        }
    }
}

#[test]
fn linear_functions_have_zero_estimator() {
    for mesh in test_meshes() {
        let u = interpolate(p1(mesh), |p| 2.0 * p[0] - 3.0 * p[1] + 1.0);
        let g = recover(&u).unwrap();
        let eta = estimate(&u, &g, &Coefficients::laplace());
        assert!(eta.global < 1e-12);
        assert!(eta.local.iter().all(|&e| (0.0..1e-12).contains(&e)));
    }
}

#[test]
fn global_is_root_sum_of_squares_and_scales_with_diffusion() {
    let u = interpolate(p1(generate_uniform_square(6).unwrap()), |p| (3.0 * p[0]).sin() * p[1].exp());
    let g = recover(&u).unwrap();
    let eta = estimate(&u, &g, &Coefficients::laplace());
    let sum: f64 = eta.squared_local().iter().sum();
    assert!((eta.global.powi(2) - sum).abs() <= 1e-12 * sum);
    let half = estimate(&u, &g, &Coefficients::constant([[0.5, 0.0], [0.0, 0.5]], 0.0));
    assert!((half.global - eta.global / 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn recovery_is_linear() {
    let space = p1(generate_lshape(3).unwrap());
    let op = RecoveryOperator::new(space.mesh().clone()).unwrap();
    let u = interpolate(space.clone(), |p| (p[0] * 2.0).cos() + p[1]);
    let v = interpolate(space.clone(), |p| p[0] * p[1] * p[1]);
    let w = FeFunction::new(
        space.clone(),
        u.values.iter().zip(&v.values).map(|(a, b)| 2.0 * a - 0.5 * b).collect(),
    );
    let (gu, gv, gw) = (op.recover(&u).unwrap(), op.recover(&v).unwrap(), op.recover(&w).unwrap());
    for i in 0..space.num_dofs() {
        assert!((gw.gx[i] - (2.0 * gu.gx[i] - 0.5 * gv.gx[i])).abs() < 1e-12);
        assert!((gw.gy[i] - (2.0 * gu.gy[i] - 0.5 * gv.gy[i])).abs() < 1e-12);
    }
}

#[test]
fn superconvergence_of_interpolant() {
    let u = |p: Point| (PI * p[0]).sin() * (PI * p[1]).sin();
    let du = |p: Point| {
        [
            PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
            PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
        ]
    };
    let coarse = generate_uniform_square(16).unwrap();
    let fine = regular_refine(&coarse).unwrap();
    let e: Vec<f64> = [coarse, fine]
        .into_iter()
        .map(|m| recover(&interpolate(p1(m), u)).unwrap().error(du))
        .collect();
    let ratio = e[0] / e[1];
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn recovery_is_bounded() {
    for mesh in test_meshes() {
        let space = p1(mesh);
        for k in 1..4 {
            let f = move |p: Point| ((k as f64) * 5.0 * p[0] + 0.3).sin() * (2.0 * p[1] - 0.1 * k as f64).cos();
            let u = interpolate(space.clone(), f);
            let g = recover(&u).unwrap();
            let grad = gradient_error(&u, |_| [0.0, 0.0]);
            assert!(g.l2_norm() <= 10.0 * grad, "{} vs {grad}", g.l2_norm());
        }
    }
}

#[test]
fn enhancement() {
    assert_eq!(enhance_eigenvalue(20.0, 0.0, 1.0).unwrap(), 20.0);
    assert_eq!(enhance_eigenvalue(20.0, 1.0, 2.0).unwrap(), 19.5);
    assert!(matches!(enhance_eigenvalue(20.0, 1.0, 0.0), Err(PprError::NonPositiveMass(_))));
}

#[test]
fn p2_functions_are_rejected() {
    let space = Arc::new(FeSpace::quadratic(Arc::new(generate_uniform_square(3).unwrap())));
    assert!(matches!(recover(&FeFunction::zero(space)), Err(PprError::NotLinear)));
}
