//! Conforming triangulations of polygonal domains.
//!
//! A [`Mesh`] is immutable once built. Refinement (regular or newest-vertex
//! bisection) always produces a new mesh whose first vertices are the
//! vertices of the parent, in the same order.

mod generate;
mod io;
mod locate;
mod patch;
mod refine;

use std::collections::HashMap;

use thiserror::Error;

pub use generate::{generate_lshape, generate_uniform_rectangle, generate_uniform_square};
pub use io::{read_mesh, read_mesh_files, write_mesh, write_mesh_files, write_wireframe};
pub use locate::PointLocator;
pub use patch::{build_patch, quadratic_fit_rows, Patch, MIN_PATCH_VERTICES, RANK_TOLERANCE};
pub use refine::{bisect, bisect_with_parents, regular_refine, regular_refine_with_parents};

pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("grid resolution must be at least 1")]
    ZeroResolution,
    #[error("triangle {triangle} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        count: usize,
    },
    #[error("triangle {triangle} has non-positive signed area {area:e}")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {vertex} lies on the interior of edge ({a}, {b}): hanging node")]
    HangingNode { vertex: usize, a: usize, b: usize },
    #[error("vertex {0} is not referenced by any triangle")]
    UnusedVertex(usize),
    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),
    #[error("triangle {0} is out of range")]
    InvalidTriangle(usize),
    #[error("patch around vertex {vertex} cannot be made unisolvent ({found} vertices reachable)")]
    PatchTooSmall { vertex: usize, found: usize },
    #[error("point ({0}, {1}) is outside the mesh")]
    PointOutside(f64, f64),
    #[error("mesh file: {0}")]
    Parse(String),
    #[error("boundary flag of vertex {0} disagrees with the mesh topology")]
    BoundaryFlagMismatch(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Conforming triangulation with counterclockwise triangles.
///
/// Local edge `k` of a triangle is the edge opposite its local vertex `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
    boundary_edges: Vec<[usize; 2]>,
    refinement_edge: Vec<u8>,
    generation: Vec<u32>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    edge_triangles: Vec<[usize; 2]>,
    vertex_triangle_offsets: Vec<usize>,
    vertex_triangles: Vec<usize>,
}

/// Marker for "no triangle" in [`Mesh::edge_triangles`].
pub const NO_TRIANGLE: usize = usize::MAX;

impl Mesh {
    /// Builds a mesh, choosing the longest edge of every triangle as its
    /// refinement edge (ties go to the edge whose opposite vertex has the
    /// lowest index).
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        check_indices(vertices.len(), &triangles)?;
        let refinement_edge = triangles
            .iter()
            .map(|t| longest_edge(&vertices, t))
            .collect();
        let generation = vec![0; triangles.len()];
        Self::with_history(vertices, triangles, refinement_edge, generation)
    }

    pub(crate) fn with_history(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        refinement_edge: Vec<u8>,
        generation: Vec<u32>,
    ) -> Result<Self, MeshError> {
        let nv = vertices.len();
        check_indices(nv, &triangles)?;
        for (t, tri) in triangles.iter().enumerate() {
            let area = signed_area(&vertices, tri);
            if !(area > 0.0) {
                return Err(MeshError::DegenerateTriangle { triangle: t, area });
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<[usize; 2]> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0; 3];
            for (k, slot) in local.iter_mut().enumerate() {
                let key = edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_triangles.push([NO_TRIANGLE; 2]);
                    edges.len() - 1
                });
                let owners = &mut edge_triangles[e];
                if owners[0] == NO_TRIANGLE {
                    owners[0] = t;
                } else if owners[1] == NO_TRIANGLE {
                    owners[1] = t;
                } else {
                    return Err(MeshError::NonManifoldEdge(key[0], key[1]));
                }
                *slot = e;
            }
            triangle_edges.push(local);
        }

        let mut boundary_vertex = vec![false; nv];
        let mut boundary_edges = Vec::new();
        for (e, owners) in edge_triangles.iter().enumerate() {
            if owners[1] == NO_TRIANGLE {
                let [a, b] = edges[e];
                boundary_vertex[a] = true;
                boundary_vertex[b] = true;
                boundary_edges.push(edges[e]);
            }
        }
        boundary_edges.sort_unstable();

        let mut counts = vec![0usize; nv + 1];
        for tri in &triangles {
            for &v in tri {
                counts[v + 1] += 1;
            }
        }
        for v in 0..nv {
            counts[v + 1] += counts[v];
        }
        if let Some(v) = (0..nv).find(|&v| counts[v] == counts[v + 1]) {
            return Err(MeshError::UnusedVertex(v));
        }
        let mut fill = counts.clone();
        let mut vertex_triangles = vec![0; counts[nv]];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[fill[v]] = t;
                fill[v] += 1;
            }
        }

        Ok(Self {
            vertices,
            triangles,
            boundary_vertex,
            boundary_edges,
            refinement_edge,
            generation,
            edges,
            triangle_edges,
            edge_triangles,
            vertex_triangle_offsets: counts,
            vertex_triangles,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn boundary_vertex(&self) -> &[bool] {
        &self.boundary_vertex
    }

    /// Boundary edges as sorted vertex pairs, in lexicographic order.
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn refinement_edge(&self) -> &[u8] {
        &self.refinement_edge
    }

    pub fn generation(&self) -> &[u32] {
        &self.generation
    }

    /// Global edges as sorted vertex pairs, numbered in order of first
    /// appearance while sweeping the triangles.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Global edge index of each local edge.
    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    /// The one or two triangles sharing an edge; the second slot is
    /// [`NO_TRIANGLE`] on the boundary.
    pub fn edge_triangles(&self) -> &[[usize; 2]] {
        &self.edge_triangles
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_triangles[e][1] == NO_TRIANGLE
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[self.vertex_triangle_offsets[v]..self.vertex_triangle_offsets[v + 1]]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    /// Maximum edge length.
    pub fn mesh_size(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| distance(self.vertices[a], self.vertices[b]))
            .fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for t in 0..self.num_triangles() {
            let p = self.triangle_points(t);
            for k in 0..3 {
                let o = p[k];
                let u = sub(p[(k + 1) % 3], o);
                let w = sub(p[(k + 2) % 3], o);
                let cos = (u[0] * w[0] + u[1] * w[1]) / (norm(u) * norm(w));
                worst = worst.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        worst
    }

    /// Audits conformity: every edge is shared by at most two triangles (by
    /// construction) and no vertex sits strictly inside a boundary edge, which
    /// is where a hanging node would show up.
    pub fn check_conforming(&self) -> Result<(), MeshError> {
        let locator_tol = 1e-12 * self.mesh_size().max(f64::MIN_POSITIVE);
        let mut boundary_pts: Vec<usize> = (0..self.num_vertices())
            .filter(|&v| self.boundary_vertex[v])
            .collect();
        boundary_pts.sort_by(|&a, &b| self.vertices[a][0].total_cmp(&self.vertices[b][0]));
        for &[a, b] in &self.boundary_edges {
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            let (xlo, xhi) = (pa[0].min(pb[0]) - locator_tol, pa[0].max(pb[0]) + locator_tol);
            let start = boundary_pts.partition_point(|&v| self.vertices[v][0] < xlo);
            for &v in &boundary_pts[start..] {
                let p = self.vertices[v];
                if p[0] > xhi {
                    break;
                }
                if v == a || v == b {
                    continue;
                }
                let d = sub(pb, pa);
                let len2 = d[0] * d[0] + d[1] * d[1];
                let s = ((p[0] - pa[0]) * d[0] + (p[1] - pa[1]) * d[1]) / len2;
                let cross = d[0] * (p[1] - pa[1]) - d[1] * (p[0] - pa[0]);
                if s > 0.0 && s < 1.0 && cross.abs() <= locator_tol * len2.sqrt() {
                    return Err(MeshError::HangingNode { vertex: v, a, b });
                }
            }
        }
        Ok(())
    }

    /// The local vertex order `[apex, b, c]` of triangle `t` in which the
    /// refinement edge is `(b, c)`; a cyclic rotation, so still counterclockwise.
    pub(crate) fn oriented_for_bisection(&self, t: usize) -> [usize; 3] {
        let k = self.refinement_edge[t] as usize;
        let tri = self.triangles[t];
        [tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]]
    }
}

fn check_indices(count: usize, triangles: &[[usize; 3]]) -> Result<(), MeshError> {
    for (t, tri) in triangles.iter().enumerate() {
        if let Some(&v) = tri.iter().find(|&&v| v >= count) {
            return Err(MeshError::VertexOutOfRange {
                triangle: t,
                vertex: v,
                count,
            });
        }
    }
    Ok(())
}

pub(crate) fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub(crate) fn signed_area(vertices: &[Point], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn longest_edge(vertices: &[Point], tri: &[usize; 3]) -> u8 {
    let mut best = 0usize;
    let mut best_len = -1.0;
    // Candidates in order of increasing opposite-vertex index so that ties
    // resolve to the lowest one.
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&k| tri[k]);
    for k in order {
        let len = distance(vertices[tri[(k + 1) % 3]], vertices[tri[(k + 2) % 3]]);
        if len > best_len * (1.0 + 1e-12) {
            best = k;
            best_len = len;
        }
    }
    best as u8
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

pub(crate) fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Mesh {
        Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn topology_of_two_triangle_square() {
        let m = unit_square();
        assert_eq!(m.num_edges(), 5);
        assert_eq!(m.boundary_edges().len(), 4);
        assert!(m.boundary_vertex().iter().all(|&b| b));
        // hypotenuse is the longest edge, opposite vertex 1 and vertex 3
        assert_eq!(m.refinement_edge(), &[1, 2]);
        assert_eq!(m.vertex_triangles(0), &[0, 1]);
        m.check_conforming().unwrap();
    }

    #[test]
    fn rejects_clockwise_and_out_of_range() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(
            Mesh::new(pts.clone(), vec![[0, 2, 1]]),
            Err(MeshError::DegenerateTriangle { .. })
        ));
        assert!(matches!(
            Mesh::new(pts, vec![[0, 1, 7]]),
            Err(MeshError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn detects_hanging_node() {
        // left half split at the midpoint of the shared diagonal, right half not
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let m = Mesh::new(v, vec![[0, 1, 2], [0, 4, 3], [4, 2, 3]]).unwrap();
        assert!(matches!(m.check_conforming(), Err(MeshError::HangingNode { vertex: 4, .. })));
    }

    #[test]
    fn rejects_non_manifold_edge() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [0.6, 2.0]];
        let r = Mesh::new(v, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]);
        assert!(matches!(r, Err(MeshError::NonManifoldEdge(0, 1))));
    }
}
