//! Two-grid/two-space eigensolvers with recovery enhancement, the shifted
//! inverse two-grid baseline, and the adaptive multilevel loops.

mod adaptive;
mod rates;
mod two_grid;

use std::sync::Arc;

pub use adaptive::{adaptive_loop, AdaptiveConfig, AdaptiveState, AdaptiveTrace, Variant};
pub use rates::{convergence_order, dorfler_mark, effectivity_index};
pub use two_grid::{algorithm1, algorithm2, baseline_two_grid, two_grid, Method, TwoGridResult};

use crate::fem::{apply_dirichlet, assemble_mass, assemble_stiffness, Coefficients, FeSpace, FemError, Order};
use crate::linalg::{LinalgError, SparseMatrix};
use crate::mesh::{Mesh, MeshError};
use crate::ppr::PprError;

#[derive(Debug, thiserror::Error)]
pub enum AlgorithmError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Recovery(#[from] PprError),
    #[error("eigenvalue index must be at least 1")]
    ZeroIndex,
    #[error("coarse problem has only {available} free dofs, index {index} requested")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("no free degrees of freedom on the mesh")]
    NoFreeDofs,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point of the fine mesh outside the coarse mesh")]
    NotNested,
    #[error("{0} must be nonzero")]
    Zero(&'static str),
}

/// Stiffness and mass on one space, full and reduced to the free dofs.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub space: Arc<FeSpace>,
    pub stiffness: SparseMatrix,
    pub mass: SparseMatrix,
    pub reduced_stiffness: SparseMatrix,
    pub reduced_mass: SparseMatrix,
}

impl Discretization {
    pub fn new(mesh: Arc<Mesh>, order: Order, coeff: &Coefficients) -> Result<Self, AlgorithmError> {
        let space = Arc::new(FeSpace::new(mesh, order));
        if space.num_free() == 0 {
            return Err(AlgorithmError::NoFreeDofs);
        }
        let stiffness = assemble_stiffness(&space, coeff)?;
        let mass = assemble_mass(&space);
        let reduced_stiffness = apply_dirichlet(&stiffness, &space);
        let reduced_mass = apply_dirichlet(&mass, &space);
        Ok(Self {
            space,
            stiffness,
            mass,
            reduced_stiffness,
            reduced_mass,
        })
    }

    pub fn energy(&self, free: &[f64]) -> f64 {
        self.reduced_stiffness.inner(free, free)
    }

    pub fn mass_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.reduced_mass.inner(x, y)
    }

    /// `(w, φ_i)` for every free dof `i`, given `w` on all dofs.
    pub fn load(&self, full: &[f64]) -> Vec<f64> {
        self.space.restrict_to_free(&self.mass.mul_vec(full))
    }
}
