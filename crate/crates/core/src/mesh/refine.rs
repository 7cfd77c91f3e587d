use std::collections::HashMap;

use super::{edge_key, midpoint, Mesh, MeshError};

/// Splits every triangle into four similar children through its edge
/// midpoints.
pub fn regular_refine(mesh: &Mesh) -> Result<Mesh, MeshError> {
    regular_refine_with_parents(mesh).map(|(m, _)| m)
}

/// Like [`regular_refine`], also returning the endpoints of the parent edge of
/// every new vertex. New vertex `mesh.num_vertices() + k` is the midpoint of
/// `parents[k]`.
pub fn regular_refine_with_parents(mesh: &Mesh) -> Result<(Mesh, Vec<[usize; 2]>), MeshError> {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices().to_vec();
    vertices.extend(
        mesh.edges()
            .iter()
            .map(|&[a, b]| midpoint(mesh.vertices()[a], mesh.vertices()[b])),
    );
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    let mut refinement_edge = Vec::with_capacity(4 * mesh.num_triangles());
    let mut generation = Vec::with_capacity(4 * mesh.num_triangles());
    for (t, &[a, b, c]) in mesh.triangles().iter().enumerate() {
        let [ea, eb, ec] = mesh.triangle_edges()[t];
        let (ma, mb, mc) = (nv + ea, nv + eb, nv + ec);
        // corner children are translates of the scaled parent and the middle
        // child is the parent rotated by a half turn, so local edge k of every
        // child is parallel to local edge k of the parent
        for child in [[a, mc, mb], [mc, b, ma], [mb, ma, c], [ma, mb, mc]] {
            triangles.push(child);
            refinement_edge.push(mesh.refinement_edge()[t]);
            generation.push(mesh.generation()[t] + 1);
        }
    }
    let parents = mesh.edges().to_vec();
    let refined = Mesh::with_history(vertices, triangles, refinement_edge, generation)?;
    Ok((refined, parents))
}

/// Newest-vertex bisection of the marked triangles plus whatever completion
/// keeps the mesh conforming.
pub fn bisect(mesh: &Mesh, marked: &[usize]) -> Result<Mesh, MeshError> {
    bisect_with_parents(mesh, marked).map(|(m, _)| m)
}

/// Like [`bisect`], also returning the parent edge of every new vertex (see
/// [`regular_refine_with_parents`]). Parents are always vertices of the input
/// mesh.
pub fn bisect_with_parents(
    mesh: &Mesh,
    marked: &[usize],
) -> Result<(Mesh, Vec<[usize; 2]>), MeshError> {
    let ne = mesh.num_edges();
    let mut edge_marked = vec![false; ne];
    let mut queue = Vec::new();
    for &t in marked {
        if t >= mesh.num_triangles() {
            return Err(MeshError::InvalidTriangle(t));
        }
        let e = refinement_edge_index(mesh, t);
        if !edge_marked[e] {
            edge_marked[e] = true;
            queue.push(e);
        }
    }
    if queue.is_empty() {
        return Ok((mesh.clone(), Vec::new()));
    }
    // completion: a triangle with any marked edge must have its refinement
    // edge marked as well
    while let Some(e) = queue.pop() {
        for &t in &mesh.edge_triangles()[e] {
            if t == super::NO_TRIANGLE {
                continue;
            }
            let r = refinement_edge_index(mesh, t);
            if !edge_marked[r] {
                edge_marked[r] = true;
                queue.push(r);
            }
        }
    }

    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices().to_vec();
    let mut parents = Vec::new();
    let mut midpoints: HashMap<[usize; 2], usize> = HashMap::new();
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        if edge_marked[e] {
            midpoints.insert([a, b], nv + parents.len());
            parents.push([a, b]);
            vertices.push(midpoint(mesh.vertices()[a], mesh.vertices()[b]));
        }
    }

    let mut triangles = Vec::with_capacity(mesh.num_triangles() + 2 * parents.len());
    let mut refinement_edge = Vec::with_capacity(triangles.capacity());
    let mut generation = Vec::with_capacity(triangles.capacity());
    let mut stack = Vec::new();
    for t in 0..mesh.num_triangles() {
        let [apex, b, c] = mesh.oriented_for_bisection(t);
        if !midpoints.contains_key(&edge_key(b, c)) {
            triangles.push(mesh.triangles()[t]);
            refinement_edge.push(mesh.refinement_edge()[t]);
            generation.push(mesh.generation()[t]);
            continue;
        }
        stack.push(([apex, b, c], mesh.generation()[t]));
        while let Some(([apex, b, c], generation_of)) = stack.pop() {
            match midpoints.get(&edge_key(b, c)) {
                Some(&m) => {
                    // pushed in reverse so the (m, apex, b) child is emitted first
                    stack.push(([m, c, apex], generation_of + 1));
                    stack.push(([m, apex, b], generation_of + 1));
                }
                None => {
                    triangles.push([apex, b, c]);
                    refinement_edge.push(0);
                    generation.push(generation_of);
                }
            }
        }
    }
    let refined = Mesh::with_history(vertices, triangles, refinement_edge, generation)?;
    Ok((refined, parents))
}

fn refinement_edge_index(mesh: &Mesh, t: usize) -> usize {
    mesh.triangle_edges()[t][mesh.refinement_edge()[t] as usize]
}
