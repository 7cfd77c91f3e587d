use faer::Mat;

use super::{distance, Mesh, MeshError, Point};

/// Least-squares fits need at least as many samples as quadratic monomials.
pub const MIN_PATCH_VERTICES: usize = 6;

/// Smallest admissible singular value of the scaled fitting matrix.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Elements around a vertex whose vertices serve as sampling points for a
/// local quadratic fit. The center is always the first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub center: usize,
    pub sample_vertices: Vec<usize>,
    pub elements: Vec<usize>,
}

/// Grows a patch ring by ring around `z` until it has at least six vertices
/// and the quadratic fit on it is unisolvent.
pub fn build_patch(mesh: &Mesh, z: usize) -> Result<Patch, MeshError> {
    if z >= mesh.num_vertices() {
        return Err(MeshError::InvalidVertex(z));
    }
    let mut in_patch = vec![false; mesh.num_triangles()];
    let mut is_sample = vec![false; mesh.num_vertices()];
    let mut elements = Vec::new();
    let mut samples = vec![z];
    is_sample[z] = true;
    let mut frontier = vec![z];
    loop {
        let mut added = Vec::new();
        for &v in &frontier {
            for &t in mesh.vertex_triangles(v) {
                if !in_patch[t] {
                    in_patch[t] = true;
                    elements.push(t);
                    for &w in &mesh.triangles()[t] {
                        if !is_sample[w] {
                            is_sample[w] = true;
                            added.push(w);
                        }
                    }
                }
            }
        }
        added.sort_unstable();
        samples.extend_from_slice(&added);
        if samples.len() >= MIN_PATCH_VERTICES && fit_is_unisolvent(mesh, &samples) {
            elements.sort_unstable();
            return Ok(Patch {
                center: z,
                sample_vertices: samples,
                elements,
            });
        }
        if added.is_empty() {
            return Err(MeshError::PatchTooSmall {
                vertex: z,
                found: samples.len(),
            });
        }
        frontier = added;
    }
}

/// Rows `[1, ξ, η, ξ², ξη, η²]` of the fitting matrix in coordinates centered
/// at the first sample and divided by the largest sample distance, which is
/// returned alongside.
pub fn quadratic_fit_rows(mesh: &Mesh, samples: &[usize]) -> (Mat<f64>, f64) {
    let center: Point = mesh.vertices()[samples[0]];
    let scale = samples
        .iter()
        .map(|&v| distance(mesh.vertices()[v], center))
        .fold(0.0, f64::max);
    let rows = Mat::from_fn(samples.len(), 6, |i, j| {
        let p = mesh.vertices()[samples[i]];
        let (x, y) = ((p[0] - center[0]) / scale, (p[1] - center[1]) / scale);
        match j {
            0 => 1.0,
            1 => x,
            2 => y,
            3 => x * x,
            4 => x * y,
            _ => y * y,
        }
    });
    (rows, scale)
}

fn fit_is_unisolvent(mesh: &Mesh, samples: &[usize]) -> bool {
    let (rows, _) = quadratic_fit_rows(mesh, samples);
    match rows.singular_values() {
        Ok(s) => s.last().is_some_and(|&smin| smin >= RANK_TOLERANCE),
        Err(_) => false,
    }
}
