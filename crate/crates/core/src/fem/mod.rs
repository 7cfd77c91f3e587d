//! Lagrange P1/P2 spaces and assembly for `-∇·(D∇u) + c u` with homogeneous
//! Dirichlet conditions.

mod assemble;
mod norms;
pub mod quadrature;
mod space;

pub use assemble::{apply_dirichlet, assemble_mass, assemble_stiffness, assembly_rule};
pub use norms::{gradient_error, integrate_elementwise, norms, ExactSolution, Norms, QuadPoint, ERROR_RULE};
pub use space::{interpolate, Coefficients, ElementGeometry, FeFunction, FeSpace, Order, FIXED};

use crate::mesh::Point;

#[derive(Debug, thiserror::Error)]
pub enum FemError {
    #[error("diffusion is not symmetric positive definite at {point:?} (triangle {triangle})")]
    DiffusionNotPositiveDefinite { triangle: usize, point: Point },
}
