use crate::linalg::SparseMatrix;

use super::quadrature::QuadratureRule;
use super::space::{is_spd, Coefficients, ElementGeometry, FeSpace};
use super::FemError;

/// Rule used for the bilinear forms: degree 4 integrates every P2 product
/// exactly; variable coefficients get degree 6.
pub fn assembly_rule(coeff: &Coefficients) -> QuadratureRule {
    if coeff.is_constant() {
        QuadratureRule::exact_to(4)
    } else {
        QuadratureRule::exact_to(6)
    }
}

fn assemble(
    space: &FeSpace,
    rule: QuadratureRule,
    mut integrand: impl FnMut(usize, [f64; 2], &[f64; 6], &[[f64; 2]; 6], usize, usize) -> Result<f64, FemError>,
) -> Result<SparseMatrix, FemError> {
    let mesh = space.mesh();
    let nl = space.order().local_dofs();
    let mut triplets = Vec::with_capacity(mesh.num_triangles() * nl * nl);
    for t in 0..mesh.num_triangles() {
        let geo = ElementGeometry::new(mesh, t);
        let dofs = space.element_dofs(t);
        let mut local = [[0.0; 6]; 6];
        for (l, &w) in rule.points.iter().zip(rule.weights) {
            let (phi, grad) = geo.basis(space.order(), l);
            let p = geo.point(l);
            for i in 0..nl {
                for j in i..nl {
                    local[i][j] += w * integrand(t, p, &phi, &grad, i, j)?;
                }
            }
        }
        for i in 0..nl {
            for j in i..nl {
                let v = local[i][j] * geo.area;
                triplets.push((dofs[i], dofs[j], v));
                if i != j {
                    triplets.push((dofs[j], dofs[i], v));
                }
            }
        }
    }
    Ok(SparseMatrix::from_triplets(space.num_dofs(), &triplets))
}

/// `A_ij = ∫ D∇φ_j·∇φ_i + c φ_j φ_i` over all dofs.
pub fn assemble_stiffness(space: &FeSpace, coeff: &Coefficients) -> Result<SparseMatrix, FemError> {
    let mut warned = false;
    let mut cache: Option<(usize, [f64; 2], [[f64; 2]; 2], f64)> = None;
    assemble(space, assembly_rule(coeff), |t, p, phi, grad, i, j| {
        let (d, c) = match cache {
            Some((ct, cp, d, c)) if ct == t && cp == p => (d, c),
            _ => {
                let d = coeff.diffusion(p);
                if !is_spd(&d) {
                    return Err(FemError::DiffusionNotPositiveDefinite { triangle: t, point: p });
                }
                let c = coeff.reaction(p);
                if c < 0.0 && !warned {
                    log::warn!("negative reaction coefficient {c} at {p:?}");
                    warned = true;
                }
                cache = Some((t, p, d, c));
                (d, c)
            }
        };
        let (gi, gj) = (grad[i], grad[j]);
        let dgj = [d[0][0] * gj[0] + d[0][1] * gj[1], d[1][0] * gj[0] + d[1][1] * gj[1]];
        Ok(gi[0] * dgj[0] + gi[1] * dgj[1] + c * phi[i] * phi[j])
    })
}

/// `B_ij = ∫ φ_j φ_i`.
pub fn assemble_mass(space: &FeSpace) -> SparseMatrix {
    assemble(space, QuadratureRule::exact_to(4), |_, _, phi, _, i, j| Ok(phi[i] * phi[j]))
        .expect("mass integrand is infallible")
}

/// Restriction to the free dofs (elimination of homogeneous Dirichlet data).
pub fn apply_dirichlet(a: &SparseMatrix, space: &FeSpace) -> SparseMatrix {
    a.principal_submatrix(space.free_dofs())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fem::space::Order;
    use crate::linalg::Factorization;
    use crate::mesh::{generate_uniform_square, Mesh};

    fn right_triangle() -> Arc<Mesh> {
        Arc::new(Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap())
    }

    fn assert_close(m: &SparseMatrix, expected: &[[f64; 3]; 3]) {
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - expected[i][j]).abs() < 1e-14, "({i},{j}): {}", m.get(i, j));
            }
        }
    }

    #[test]
    fn reference_element_matrices() {
        let space = FeSpace::linear(right_triangle());
        let a = assemble_stiffness(&space, &Coefficients::laplace()).unwrap();
        assert_close(&a, &[[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]]);
        let b = assemble_mass(&space);
        let s = 0.5 / 12.0;
        assert_close(&b, &[[2.0 * s, s, s], [s, 2.0 * s, s], [s, s, 2.0 * s]]);
    }

    #[test]
    fn kernel_symmetry_and_partition_of_unity() {
        let mesh = Arc::new(generate_uniform_square(5).unwrap());
        for order in [Order::Linear, Order::Quadratic] {
            let space = FeSpace::new(mesh.clone(), order);
            let a = assemble_stiffness(&space, &Coefficients::laplace()).unwrap();
            let ones = vec![1.0; space.num_dofs()];
            assert!(a.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
            assert_eq!(a.asymmetry(), 0.0);
            let b = assemble_mass(&space);
            assert!((b.inner(&ones, &ones) - 1.0).abs() < 1e-13);
            assert_eq!(b.asymmetry(), 0.0);
        }
    }

    #[test]
    fn reduced_system() {
        let mesh = Arc::new(generate_uniform_square(2).unwrap());
        let space = FeSpace::linear(mesh);
        let a = assemble_stiffness(&space, &Coefficients::laplace()).unwrap();
        let r = apply_dirichlet(&a, &space);
        assert_eq!(r.dim(), 1);
        assert!((r.get(0, 0) - 4.0).abs() < 1e-14);

        let mesh = Arc::new(generate_uniform_square(6).unwrap());
        let space = FeSpace::quadratic(mesh);
        let a = assemble_stiffness(&space, &Coefficients::laplace()).unwrap();
        let r = apply_dirichlet(&a, &space);
        assert_eq!(r.asymmetry(), 0.0);
        assert!(Factorization::new(&r).unwrap().is_definite());
    }

    #[test]
    fn mass_is_positive_definite_on_two_triangles() {
        let space = FeSpace::linear(Arc::new(generate_uniform_square(1).unwrap()));
        let b = assemble_mass(&space);
        assert!(Factorization::new(&b).unwrap().is_definite());
    }

    #[test]
    fn indefinite_diffusion_is_rejected() {
        let space = FeSpace::linear(right_triangle());
        let bad = Coefficients::constant([[1.0, 0.0], [0.0, -1.0]], 0.0);
        assert!(matches!(
            assemble_stiffness(&space, &bad),
            Err(FemError::DiffusionNotPositiveDefinite { triangle: 0, .. })
        ));
    }

    #[test]
    fn reaction_term_is_integrated() {
        // c = 1 adds exactly the mass matrix
        let space = FeSpace::quadratic(Arc::new(generate_uniform_square(3).unwrap()));
        let a0 = assemble_stiffness(&space, &Coefficients::laplace()).unwrap();
        let a1 = assemble_stiffness(&space, &Coefficients::constant([[1.0, 0.0], [0.0, 1.0]], 1.0)).unwrap();
        let b = assemble_mass(&space);
        let diff = a1.lin_comb(1.0, -1.0, &a0).lin_comb(1.0, -1.0, &b);
        assert!(diff.values().iter().all(|v| v.abs() < 1e-14));
    }
}
