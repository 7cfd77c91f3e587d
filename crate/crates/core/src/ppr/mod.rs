//! Polynomial preserving recovery of P1 gradients and the recovery-based
//! error estimator.

use std::sync::Arc;

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;

use crate::fem::{assembly_rule, integrate_elementwise, Coefficients, FeFunction, FeSpace, Order, ERROR_RULE};
use crate::mesh::{build_patch, quadratic_fit_rows, Mesh, MeshError, Point};

#[derive(Debug, thiserror::Error)]
pub enum PprError {
    #[error("gradient recovery needs a P1 function")]
    NotLinear,
    #[error("function lives on a different mesh than the recovery operator")]
    MeshMismatch,
    #[error(transparent)]
    Patch(#[from] MeshError),
    #[error("mass (u,u) = {0} must be positive")]
    NonPositiveMass(f64),
}

/// Precomputed least-squares weights: for each vertex `z`, the recovered
/// gradient is `Σ_j w_j u(s_j)` over the patch samples `s_j`.
#[derive(Debug, Clone)]
pub struct RecoveryOperator {
    mesh: Arc<Mesh>,
    offsets: Vec<usize>,
    samples: Vec<usize>,
    weights: Vec<[f64; 2]>,
}

impl RecoveryOperator {
    pub fn new(mesh: Arc<Mesh>) -> Result<Self, PprError> {
        let mut offsets = vec![0];
        let mut samples = Vec::new();
        let mut weights = Vec::new();
        for z in 0..mesh.num_vertices() {
            let patch = build_patch(&mesh, z)?;
            let (rows, scale) = quadratic_fit_rows(&mesh, &patch.sample_vertices);
            let m = patch.sample_vertices.len();
            // pseudo-inverse of the fitting matrix, one column per sample
            let mut pinv = Mat::<f64>::identity(m, m);
            rows.qr().solve_lstsq_in_place(pinv.as_mut());
            for (j, &s) in patch.sample_vertices.iter().enumerate() {
                samples.push(s);
                weights.push([pinv[(1, j)] / scale, pinv[(2, j)] / scale]);
            }
            offsets.push(samples.len());
        }
        Ok(Self {
            mesh,
            offsets,
            samples,
            weights,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Sample vertices and weights used at vertex `z`.
    pub fn stencil(&self, z: usize) -> (&[usize], &[[f64; 2]]) {
        let r = self.offsets[z]..self.offsets[z + 1];
        (&self.samples[r.clone()], &self.weights[r])
    }

    /// Recovered nodal gradients of P1 nodal values.
    pub fn apply(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(values.len(), self.mesh.num_vertices());
        (0..self.mesh.num_vertices())
            .map(|z| {
                let (s, w) = self.stencil(z);
                s.iter().zip(w).fold((0.0, 0.0), |(gx, gy), (&v, w)| {
                    (gx + w[0] * values[v], gy + w[1] * values[v])
                })
            })
            .unzip()
    }

    pub fn recover(&self, u: &FeFunction) -> Result<RecoveredGradient, PprError> {
        if u.space.order() != Order::Linear {
            return Err(PprError::NotLinear);
        }
        if !Arc::ptr_eq(u.space.mesh(), &self.mesh) && **u.space.mesh() != *self.mesh {
            return Err(PprError::MeshMismatch);
        }
        let (gx, gy) = self.apply(&u.values);
        Ok(RecoveredGradient {
            space: u.space.clone(),
            gx,
            gy,
        })
    }
}

/// `G_h u` as two P1 coefficient vectors.
#[derive(Debug, Clone)]
pub struct RecoveredGradient {
    pub space: Arc<FeSpace>,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
}

impl RecoveredGradient {
    /// The P1 interpolant of the nodal gradients inside triangle `t`.
    pub fn eval_local(&self, t: usize, bary: &[f64; 3]) -> [f64; 2] {
        let tri = self.space.mesh().triangles()[t];
        let mut g = [0.0; 2];
        for (k, &v) in tri.iter().enumerate() {
            g[0] += bary[k] * self.gx[v];
            g[1] += bary[k] * self.gy[v];
        }
        g
    }

    pub fn at_vertex(&self, v: usize) -> [f64; 2] {
        [self.gx[v], self.gy[v]]
    }

    /// `‖G_h u − reference‖₀`.
    pub fn error(&self, reference: impl Fn(Point) -> [f64; 2]) -> f64 {
        let zero = FeFunction::zero(self.space.clone());
        integrate_elementwise(&zero, ERROR_RULE, |q| {
            let g = self.eval_local(q.triangle, q.bary);
            let r = reference(q.point);
            [(g[0] - r[0]).powi(2) + (g[1] - r[1]).powi(2)]
        })
        .iter()
        .map(|v| v[0])
        .sum::<f64>()
        .sqrt()
    }

    /// `‖G_h u‖₀`.
    pub fn l2_norm(&self) -> f64 {
        self.error(|_| [0.0, 0.0])
    }
}

/// Per-element `η_T = ‖D^{1/2}(G_h u − ∇u)‖_{0,T}` and the global
/// `η = (Σ η_T²)^{1/2}`.
#[derive(Debug, Clone)]
pub struct EstimatorField {
    pub local: Vec<f64>,
    pub global: f64,
}

impl EstimatorField {
    pub fn squared_local(&self) -> Vec<f64> {
        self.local.iter().map(|e| e * e).collect()
    }
}

/// One-shot recovery on `u`'s mesh.
pub fn recover(u: &FeFunction) -> Result<RecoveredGradient, PprError> {
    RecoveryOperator::new(u.space.mesh().clone())?.recover(u)
}

pub fn estimate(u: &FeFunction, recovered: &RecoveredGradient, coeff: &Coefficients) -> EstimatorField {
    let squares = integrate_elementwise(u, assembly_rule(coeff), |q| {
        let g = recovered.eval_local(q.triangle, q.bary);
        let d = [g[0] - q.gradient[0], g[1] - q.gradient[1]];
        [coeff.energy_density(q.point, d)]
    });
    let local: Vec<f64> = squares.iter().map(|s| s[0].max(0.0).sqrt()).collect();
    let global = squares.iter().map(|s| s[0].max(0.0)).sum::<f64>().sqrt();
    EstimatorField { local, global }
}

/// `λ̂ = rayleigh − η² / (u,u)`.
pub fn enhance_eigenvalue(rayleigh: f64, estimator_global: f64, mass_uu: f64) -> Result<f64, PprError> {
    if mass_uu <= 0.0 || !mass_uu.is_finite() {
        return Err(PprError::NonPositiveMass(mass_uu));
    }
    Ok(rayleigh - estimator_global * estimator_global / mass_uu)
}

#[cfg(test)]
mod tests;
