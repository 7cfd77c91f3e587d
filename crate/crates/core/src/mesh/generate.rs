use super::{Mesh, MeshError, Point};

/// Right-triangulated `n × n` grid of the unit square; every cell is cut by
/// its lower-left to upper-right diagonal.
pub fn generate_uniform_square(n: usize) -> Result<Mesh, MeshError> {
    generate_uniform_rectangle([0.0, 1.0], [0.0, 1.0], n, n)
}

/// Right-triangulated `nx × ny` grid of `[x0, x1] × [y0, y1]`.
///
/// Vertex `(i, j)` (column `i`, row `j`) gets index `j * (nx + 1) + i`.
pub fn generate_uniform_rectangle(
    xs: [f64; 2],
    ys: [f64; 2],
    nx: usize,
    ny: usize,
) -> Result<Mesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::ZeroResolution);
    }
    let coord = |lo: f64, hi: f64, k: usize, n: usize| {
        if k == n {
            hi
        } else {
            lo + (hi - lo) * k as f64 / n as f64
        }
    };
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([coord(xs[0], xs[1], i, nx), coord(ys[0], ys[1], j, ny)]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            push_cell(&mut triangles, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
        }
    }
    Mesh::new(vertices, triangles)
}

/// Uniform triangulation of the L-shaped domain `(-1,1)² \ [0,1)×(-1,0]`
/// with `n` cells per unit length; the reentrant corner sits at the origin.
pub fn generate_lshape(n: usize) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::ZeroResolution);
    }
    let m = 2 * n;
    let coord = |k: usize| -1.0 + k as f64 / n as f64;
    let keep_cell = |i: usize, j: usize| !(i >= n && j < n);
    let mut index = vec![usize::MAX; (m + 1) * (m + 1)];
    let grid = |i: usize, j: usize| j * (m + 1) + i;
    for j in 0..m {
        for i in 0..m {
            if keep_cell(i, j) {
                for (a, b) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                    index[grid(a, b)] = 0;
                }
            }
        }
    }
    let mut vertices: Vec<Point> = Vec::new();
    for j in 0..=m {
        for i in 0..=m {
            if index[grid(i, j)] == 0 {
                index[grid(i, j)] = vertices.len();
                vertices.push([coord(i), coord(j)]);
            }
        }
    }
    let mut triangles = Vec::with_capacity(6 * n * n);
    for j in 0..m {
        for i in 0..m {
            if keep_cell(i, j) {
                push_cell(
                    &mut triangles,
                    index[grid(i, j)],
                    index[grid(i + 1, j)],
                    index[grid(i + 1, j + 1)],
                    index[grid(i, j + 1)],
                );
            }
        }
    }
    Mesh::new(vertices, triangles)
}

fn push_cell(triangles: &mut Vec<[usize; 3]>, bl: usize, br: usize, tr: usize, tl: usize) {
    triangles.push([br, tr, bl]);
    triangles.push([tl, bl, tr]);
}
