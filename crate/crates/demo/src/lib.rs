//! Browser bindings: adaptive L-shape runs with their meshes and estimator
//! fields, and a two-grid method comparison on the unit square.

use std::sync::Arc;

use wasm_bindgen::prelude::*;

use ppr_eigen::algorithms::{adaptive_loop, two_grid, AdaptiveConfig, AdaptiveState, Method, Variant};
use ppr_eigen::fem::Coefficients;
use ppr_eigen::harness::{reference_square, LSHAPE_FIRST_EIGENVALUE};
use ppr_eigen::mesh::{generate_lshape, generate_uniform_square, regular_refine};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Trace of an adaptive run on the L-shaped domain.
#[wasm_bindgen]
pub struct AdaptiveRun {
    states: Vec<AdaptiveState>,
}

#[wasm_bindgen]
impl AdaptiveRun {
    /// `variant` is `"A3"` or `"A4"`.
    #[wasm_bindgen(constructor)]
    pub fn new(theta: f64, levels: usize, variant: &str) -> Result<AdaptiveRun, JsError> {
        let variant = match variant {
            "A3" => Variant::A3,
            "A4" => Variant::A4,
            v => return Err(JsError::new(&format!("unknown variant {v}"))),
        };
        let config = AdaptiveConfig {
            theta,
            epsilon: 1e-14,
            variant,
            max_levels: levels,
        };
        let mesh = Arc::new(generate_lshape(2).map_err(js_err)?);
        let trace = adaptive_loop(mesh, &Coefficients::laplace(), &config).map_err(js_err)?;
        Ok(AdaptiveRun { states: trace.states })
    }

    pub fn levels(&self) -> usize {
        self.states.len()
    }

    pub fn reference(&self) -> f64 {
        LSHAPE_FIRST_EIGENVALUE
    }

    pub fn dofs(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.dofs as f64).collect()
    }

    pub fn rayleigh(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.rayleigh).collect()
    }

    pub fn enhanced(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.enhanced).collect()
    }

    /// Flat `x0, y0, x1, y1, ...` vertex coordinates of a level's mesh.
    pub fn vertices(&self, level: usize) -> Vec<f64> {
        self.states[level].mesh.vertices().iter().flatten().copied().collect()
    }

    /// Flat vertex triples of a level's triangles.
    pub fn triangles(&self, level: usize) -> Vec<u32> {
        self.states[level]
            .mesh
            .triangles()
            .iter()
            .flatten()
            .map(|&v| v as u32)
            .collect()
    }

    /// Squared local error indicators of a level, one per triangle.
    pub fn indicators(&self, level: usize) -> Vec<f64> {
        self.states[level].estimator.squared_local()
    }

    /// Eigenfunction values at the vertices of a level's mesh.
    pub fn eigenfunction(&self, level: usize) -> Vec<f64> {
        self.states[level].function.values.clone()
    }
}

/// `[A1, A2, TG, exact]` approximations of eigenvalue `index` of the unit
/// square, with a coarse `1/n` mesh refined `levels` times.
#[wasm_bindgen]
pub fn compare_two_grid(n: usize, levels: usize, index: usize) -> Result<Vec<f64>, JsError> {
    let coarse = generate_uniform_square(n).map_err(js_err)?;
    let mut fine = coarse.clone();
    for _ in 0..levels {
        fine = regular_refine(&fine).map_err(js_err)?;
    }
    let (coarse, fine) = (Arc::new(coarse), Arc::new(fine));
    let coeff = Coefficients::laplace();
    let mut out = Vec::with_capacity(4);
    for method in [Method::Algorithm1, Method::Algorithm2, Method::TwoGrid] {
        let r = two_grid(method, coarse.clone(), fine.clone(), &coeff, index).map_err(js_err)?;
        out.push(r.enhanced_value);
    }
    out.push(reference_square(index.max(1)).eigenvalue);
    Ok(out)
}
