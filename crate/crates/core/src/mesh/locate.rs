use super::{Mesh, MeshError, Point};

/// Bucket grid over a mesh for locating the triangle containing a point.
#[derive(Debug, Clone)]
pub struct PointLocator<'a> {
    mesh: &'a Mesh,
    origin: Point,
    cell: [f64; 2],
    dims: [usize; 2],
    offsets: Vec<usize>,
    triangles: Vec<usize>,
}

const TOLERANCE: f64 = 1e-10;

impl<'a> PointLocator<'a> {
    pub fn new(mesh: &'a Mesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in mesh.vertices() {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let side = (mesh.num_triangles() as f64).sqrt().ceil().max(1.0) as usize;
        let dims = [side, side];
        let cell = [
            ((hi[0] - lo[0]) / side as f64).max(f64::MIN_POSITIVE),
            ((hi[1] - lo[1]) / side as f64).max(f64::MIN_POSITIVE),
        ];
        let mut locator = Self {
            mesh,
            origin: lo,
            cell,
            dims,
            offsets: vec![0; side * side + 1],
            triangles: Vec::new(),
        };
        let ranges: Vec<_> = (0..mesh.num_triangles())
            .map(|t| locator.cell_range(&mesh.triangle_points(t)))
            .collect();
        for &([i0, j0], [i1, j1]) in &ranges {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    locator.offsets[j * side + i + 1] += 1;
                }
            }
        }
        for k in 0..side * side {
            locator.offsets[k + 1] += locator.offsets[k];
        }
        let mut fill = locator.offsets.clone();
        locator.triangles = vec![0; locator.offsets[side * side]];
        for (t, &([i0, j0], [i1, j1])) in ranges.iter().enumerate() {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    locator.triangles[fill[j * side + i]] = t;
                    fill[j * side + i] += 1;
                }
            }
        }
        locator
    }

    fn cell_of(&self, p: Point) -> [usize; 2] {
        let mut c = [0; 2];
        for d in 0..2 {
            let k = ((p[d] - self.origin[d]) / self.cell[d]).floor();
            c[d] = (k.max(0.0) as usize).min(self.dims[d] - 1);
        }
        c
    }

    fn cell_range(&self, pts: &[Point; 3]) -> ([usize; 2], [usize; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in pts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let pad = [self.cell[0] * 1e-9, self.cell[1] * 1e-9];
        (
            self.cell_of([lo[0] - pad[0], lo[1] - pad[1]]),
            self.cell_of([hi[0] + pad[0], hi[1] + pad[1]]),
        )
    }

    /// Containing triangle and barycentric coordinates of `p`.
    pub fn locate(&self, p: Point) -> Result<(usize, [f64; 3]), MeshError> {
        let [i, j] = self.cell_of(p);
        let k = j * self.dims[0] + i;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.triangles[self.offsets[k]..self.offsets[k + 1]] {
            let bary = barycentric(&self.mesh.triangle_points(t), p);
            let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= 0.0 {
                return Ok((t, bary));
            }
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((t, bary, worst));
            }
        }
        match best {
            Some((t, bary, worst)) if worst >= -TOLERANCE => Ok((t, bary)),
            _ => Err(MeshError::PointOutside(p[0], p[1])),
        }
    }

    /// Evaluates a vertex-based piecewise linear function at `p`.
    pub fn eval_p1(&self, values: &[f64], p: Point) -> Result<f64, MeshError> {
        let (t, bary) = self.locate(p)?;
        let tri = self.mesh.triangles()[t];
        Ok(bary[0] * values[tri[0]] + bary[1] * values[tri[1]] + bary[2] * values[tri[2]])
    }
}

pub(crate) fn barycentric(pts: &[Point; 3], p: Point) -> [f64; 3] {
    let [a, b, c] = *pts;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
    [1.0 - l1 - l2, l1, l2]
}
