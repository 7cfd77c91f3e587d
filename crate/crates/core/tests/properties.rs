use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppr_eigen::algorithms::{dorfler_mark, Discretization};
use ppr_eigen::fem::{assemble_mass, assemble_stiffness, interpolate, Coefficients, FeSpace, Order};
use ppr_eigen::linalg::{dot, eigs_smallest, eigs_smallest_with, EigenOptions, Factorization, Normalization};
use ppr_eigen::mesh::{bisect, generate_lshape, generate_uniform_square, Mesh};
use ppr_eigen::ppr::{recover, EstimatorField, RecoveryOperator};

fn square(n: usize) -> Arc<Mesh> {
    Arc::new(generate_uniform_square(n).unwrap())
}

fn laplace(n: usize, order: Order) -> Discretization {
    Discretization::new(square(n), order, &Coefficients::laplace()).unwrap()
}

#[test]
fn dense_oracle_agrees_with_subspace_iteration() {
    let d = laplace(8, Order::Linear);
    let k = 6;
    let dense = eigs_smallest(&d.reduced_stiffness, &d.reduced_mass, k).unwrap();
    let opts = EigenOptions {
        dense_threshold: 0,
        ..Default::default()
    };
    let iterative = eigs_smallest_with(&d.reduced_stiffness, &d.reduced_mass, k, &opts).unwrap();
    for (a, b) in dense.iter().zip(&iterative) {
        assert!((a.value - b.value).abs() <= 1e-9 * a.value, "{} vs {}", a.value, b.value);
    }
    // simple eigenvalues: vectors agree under the sign rule
    for idx in [0, 3] {
        let diff: f64 = dense[idx]
            .vector
            .iter()
            .zip(&iterative[idx].vector)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-7, "eigenvector {idx} differs by {diff}");
    }
}

#[test]
fn eigenvectors_are_mass_orthonormal() {
    let d = laplace(12, Order::Linear);
    for threshold in [0, 1000] {
        let opts = EigenOptions {
            normalization: Normalization::L2,
            dense_threshold: threshold,
            ..Default::default()
        };
        let pairs = eigs_smallest_with(&d.reduced_stiffness, &d.reduced_mass, 5, &opts).unwrap();
        for (i, p) in pairs.iter().enumerate() {
            for (j, q) in pairs.iter().enumerate() {
                let b = d.mass_inner(&p.vector, &q.vector);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((b - expected).abs() < 1e-9, "b({i},{j}) = {b}");
            }
        }
    }
}

#[test]
fn shift_invert_fixed_point() {
    let d = laplace(10, Order::Linear);
    let pair = &eigs_smallest(&d.reduced_stiffness, &d.reduced_mass, 1).unwrap()[0];
    let sigma = 0.9 * pair.value;
    let shifted = d.reduced_stiffness.lin_comb(1.0, -sigma, &d.reduced_mass);
    let bv = d.reduced_mass.mul_vec(&pair.vector);
    let x = Factorization::new(&shifted).unwrap().solve(&bv).unwrap();
    let scale = 1.0 / (pair.value - sigma);
    for (xi, vi) in x.iter().zip(&pair.vector) {
        assert!((xi - scale * vi).abs() < 1e-9 * scale);
    }
}

#[test]
fn rayleigh_quotient_error_identity() {
    let d = laplace(8, Order::Linear);
    let pair = &eigs_smallest(&d.reduced_stiffness, &d.reduced_mass, 1).unwrap()[0];
    let (lambda, u) = (pair.value, &pair.vector);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10 {
        let w: Vec<f64> = u.iter().map(|x| x + 0.3 * rng.random_range(-1.0..1.0)).collect();
        let e: Vec<f64> = w.iter().zip(u).map(|(a, b)| a - b).collect();
        let ww = d.mass_inner(&w, &w);
        let lhs = d.energy(&w) / ww - lambda;
        let rhs = d.energy(&e) / ww - lambda * d.mass_inner(&e, &e) / ww;
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }
}

#[test]
fn discrete_first_eigenvalue_converges_from_above() {
    let exact = 2.0 * PI * PI;
    let errors: Vec<f64> = [64, 128]
        .iter()
        .map(|&n| {
            let d = laplace(n, Order::Linear);
            eigs_smallest(&d.reduced_stiffness, &d.reduced_mass, 1).unwrap()[0].value - exact
        })
        .collect();
    assert!(errors.iter().all(|&e| e > 0.0));
    let order = (errors[0] / errors[1]).log2();
    assert!((order - 2.0).abs() < 0.05, "order {order}");
}

#[test]
fn partition_of_unity_and_constant_kernel() {
    for order in [Order::Linear, Order::Quadratic] {
        let space = FeSpace::new(Arc::new(generate_lshape(4).unwrap()), order);
        let n = space.num_dofs();
        let ones = vec![1.0; n];
        let m = assemble_mass(&space);
        let total = dot(&ones, &m.mul_vec(&ones));
        assert!((total - 3.0).abs() < 1e-12);
        let a = assemble_stiffness(&space, &Coefficients::laplace()).unwrap();
        assert!(a.mul_vec(&ones).iter().all(|r| r.abs() < 1e-12));
    }
}

fn random_quadratic(c: [f64; 6]) -> impl Fn([f64; 2]) -> f64 {
    move |p| c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * p[0] * p[0] + c[4] * p[0] * p[1] + c[5] * p[1] * p[1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dorfler_marks_a_minimal_bulk(local in prop::collection::vec(0.0f64..10.0, 1..60), theta in 0.0f64..0.999) {
        let global = local.iter().map(|e| e * e).sum::<f64>().sqrt();
        let field = EstimatorField { local: local.clone(), global };
        let marked = dorfler_mark(&field, theta).unwrap();
        let sq: Vec<f64> = local.iter().map(|e| e * e).collect();
        let total: f64 = sq.iter().sum();
        let sum: f64 = marked.iter().map(|&t| sq[t]).sum();
        prop_assert!(!marked.is_empty());
        prop_assert!(sum >= theta * total);
        let without_last: f64 = marked[..marked.len() - 1].iter().map(|&t| sq[t]).sum();
        prop_assert!(marked.len() == 1 || without_last < theta * total);
    }

    #[test]
    fn recovery_reproduces_quadratics(c in prop::array::uniform6(-3.0f64..3.0)) {
        let space = Arc::new(FeSpace::linear(square(6)));
        let f = random_quadratic(c);
        let g = recover(&interpolate(space.clone(), &f)).unwrap();
        for (v, p) in space.mesh().vertices().iter().enumerate() {
            let exact = [c[1] + 2.0 * c[3] * p[0] + c[4] * p[1], c[2] + c[4] * p[0] + 2.0 * c[5] * p[1]];
            let got = g.at_vertex(v);
            prop_assert!((got[0] - exact[0]).abs() < 1e-11 && (got[1] - exact[1]).abs() < 1e-11);
        }
    }

    #[test]
    fn recovery_is_linear(
        x in prop::collection::vec(-1.0f64..1.0, 49),
        y in prop::collection::vec(-1.0f64..1.0, 49),
        a in -2.0f64..2.0,
    ) {
        let op = RecoveryOperator::new(square(6)).unwrap();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + q).collect();
        let (gx, gy) = op.apply(&x);
        let (hx, hy) = op.apply(&y);
        let (cx, cy) = op.apply(&combo);
        for i in 0..gx.len() {
            prop_assert!((cx[i] - (a * gx[i] + hx[i])).abs() < 1e-10);
            prop_assert!((cy[i] - (a * gy[i] + hy[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn bisection_keeps_meshes_conforming(seed in any::<u64>(), rounds in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mesh = generate_lshape(2).unwrap();
        for _ in 0..rounds {
            let marked: Vec<usize> = (0..mesh.num_triangles()).filter(|_| rng.random_bool(0.3)).collect();
            let area = mesh.total_area();
            mesh = bisect(&mesh, &marked).unwrap();
            prop_assert!(mesh.check_conforming().is_ok());
            prop_assert!((mesh.total_area() - area).abs() < 1e-12);
        }
    }
}
