use std::sync::Arc;

use crate::mesh::{midpoint, Mesh, Point};

/// Polynomial degree of a Lagrange space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Linear = 1,
    Quadratic = 2,
}

impl Order {
    pub fn local_dofs(self) -> usize {
        match self {
            Order::Linear => 3,
            Order::Quadratic => 6,
        }
    }
}

/// Continuous Lagrange space of order 1 or 2 with homogeneous Dirichlet data.
///
/// Degrees of freedom are the vertices, followed for order 2 by the edge
/// midpoints in global edge order, so a P1 vector embeds into P2 as a prefix.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    order: Order,
    dof_coords: Vec<Point>,
    dirichlet: Vec<bool>,
    free: Vec<usize>,
    free_index: Vec<usize>,
}

pub const FIXED: usize = usize::MAX;

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, order: Order) -> Self {
        let mut dof_coords = mesh.vertices().to_vec();
        let mut dirichlet = mesh.boundary_vertex().to_vec();
        if order == Order::Quadratic {
            for (e, &[a, b]) in mesh.edges().iter().enumerate() {
                dof_coords.push(midpoint(mesh.vertices()[a], mesh.vertices()[b]));
                dirichlet.push(mesh.is_boundary_edge(e));
            }
        }
        let mut free = Vec::new();
        let mut free_index = vec![FIXED; dirichlet.len()];
        for (i, &fixed) in dirichlet.iter().enumerate() {
            if !fixed {
                free_index[i] = free.len();
                free.push(i);
            }
        }
        Self {
            mesh,
            order,
            dof_coords,
            dirichlet,
            free,
            free_index,
        }
    }

    pub fn linear(mesh: Arc<Mesh>) -> Self {
        Self::new(mesh, Order::Linear)
    }

    pub fn quadratic(mesh: Arc<Mesh>) -> Self {
        Self::new(mesh, Order::Quadratic)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    pub fn dof_coords(&self) -> &[Point] {
        &self.dof_coords
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Position of a dof among the free dofs, or [`FIXED`].
    pub fn free_index(&self) -> &[usize] {
        &self.free_index
    }

    /// Global dofs of triangle `t`; only the first `order.local_dofs()`
    /// entries are meaningful. Edge dof `3 + k` sits on local edge `k`.
    pub fn element_dofs(&self, t: usize) -> [usize; 6] {
        let [a, b, c] = self.mesh.triangles()[t];
        match self.order {
            Order::Linear => [a, b, c, 0, 0, 0],
            Order::Quadratic => {
                let nv = self.mesh.num_vertices();
                let [ea, eb, ec] = self.mesh.triangle_edges()[t];
                [a, b, c, nv + ea, nv + eb, nv + ec]
            }
        }
    }

    /// Full dof vector from values on the free dofs (zero on the boundary).
    pub fn extend_by_zero(&self, free_values: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.num_dofs()];
        for (&i, &v) in self.free.iter().zip(free_values) {
            full[i] = v;
        }
        full
    }

    pub fn restrict_to_free(&self, values: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| values[i]).collect()
    }
}

/// Affine element data: barycentric gradients and area.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub points: [Point; 3],
    pub area: f64,
    pub grad_bary: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, t: usize) -> Self {
        let points = mesh.triangle_points(t);
        let [p0, p1, p2] = points;
        let twice = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let grad_bary = [
            [(p1[1] - p2[1]) / twice, (p2[0] - p1[0]) / twice],
            [(p2[1] - p0[1]) / twice, (p0[0] - p2[0]) / twice],
            [(p0[1] - p1[1]) / twice, (p1[0] - p0[0]) / twice],
        ];
        Self {
            points,
            area: 0.5 * twice,
            grad_bary,
        }
    }

    pub fn point(&self, bary: &[f64; 3]) -> Point {
        let [p0, p1, p2] = self.points;
        [
            bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0],
            bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1],
        ]
    }

    /// Basis values and gradients at a barycentric point; entries past
    /// `order.local_dofs()` are zero.
    pub fn basis(&self, order: Order, l: &[f64; 3]) -> ([f64; 6], [[f64; 2]; 6]) {
        let g = &self.grad_bary;
        let mut phi = [0.0; 6];
        let mut grad = [[0.0; 2]; 6];
        match order {
            Order::Linear => {
                phi[..3].copy_from_slice(l);
                grad[..3].copy_from_slice(g);
            }
            Order::Quadratic => {
                for i in 0..3 {
                    phi[i] = l[i] * (2.0 * l[i] - 1.0);
                    let s = 4.0 * l[i] - 1.0;
                    grad[i] = [s * g[i][0], s * g[i][1]];
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    phi[3 + i] = 4.0 * l[j] * l[k];
                    grad[3 + i] = [
                        4.0 * (l[k] * g[j][0] + l[j] * g[k][0]),
                        4.0 * (l[k] * g[j][1] + l[j] * g[k][1]),
                    ];
                }
            }
        }
        (phi, grad)
    }
}

pub type DiffusionFn = dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync;
pub type ReactionFn = dyn Fn(Point) -> f64 + Send + Sync;

/// Coefficients of `-∇·(D∇u) + c u`.
#[derive(Clone)]
pub struct Coefficients {
    diffusion: Arc<DiffusionFn>,
    reaction: Arc<ReactionFn>,
    constant: bool,
}

impl std::fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Coefficients")
            .field("D(0,0)", &(self.diffusion)([0.0, 0.0]))
            .field("c(0,0)", &(self.reaction)([0.0, 0.0]))
            .field("constant", &self.constant)
            .finish()
    }
}

impl Coefficients {
    /// D = I, c = 0.
    pub fn laplace() -> Self {
        Self::constant([[1.0, 0.0], [0.0, 1.0]], 0.0)
    }

    pub fn constant(diffusion: [[f64; 2]; 2], reaction: f64) -> Self {
        Self {
            diffusion: Arc::new(move |_| diffusion),
            reaction: Arc::new(move |_| reaction),
            constant: true,
        }
    }

    /// `-½Δu + ½|x|²u`.
    pub fn harmonic_oscillator() -> Self {
        Self {
            diffusion: Arc::new(|_| [[0.5, 0.0], [0.0, 0.5]]),
            reaction: Arc::new(|p: Point| 0.5 * (p[0] * p[0] + p[1] * p[1])),
            constant: false,
        }
    }

    /// Arbitrary coefficient functions; treated as variable for quadrature.
    pub fn new(
        diffusion: impl Fn(Point) -> [[f64; 2]; 2] + Send + Sync + 'static,
        reaction: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            diffusion: Arc::new(diffusion),
            reaction: Arc::new(reaction),
            constant: false,
        }
    }

    pub fn diffusion(&self, p: Point) -> [[f64; 2]; 2] {
        (self.diffusion)(p)
    }

    pub fn reaction(&self, p: Point) -> f64 {
        (self.reaction)(p)
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    /// `vᵀ D(p) v`, i.e. `|D^{1/2} v|²`.
    pub fn energy_density(&self, p: Point, v: [f64; 2]) -> f64 {
        let d = self.diffusion(p);
        v[0] * (d[0][0] * v[0] + d[0][1] * v[1]) + v[1] * (d[1][0] * v[0] + d[1][1] * v[1])
    }
}

pub(crate) fn is_spd(d: &[[f64; 2]; 2]) -> bool {
    let scale = d[0][0].abs().max(d[1][1].abs()).max(f64::MIN_POSITIVE);
    (d[0][1] - d[1][0]).abs() <= 1e-12 * scale
        && d[0][0] > 0.0
        && d[0][0] * d[1][1] - d[0][1] * d[1][0] > 0.0
}

/// Coefficient vector over all dofs of a space.
#[derive(Debug, Clone)]
pub struct FeFunction {
    pub space: Arc<FeSpace>,
    pub values: Vec<f64>,
}

impl FeFunction {
    pub fn new(space: Arc<FeSpace>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), space.num_dofs(), "one value per dof");
        Self { space, values }
    }

    pub fn zero(space: Arc<FeSpace>) -> Self {
        let n = space.num_dofs();
        Self::new(space, vec![0.0; n])
    }

    pub fn from_free(space: Arc<FeSpace>, free_values: &[f64]) -> Self {
        let values = space.extend_by_zero(free_values);
        Self::new(space, values)
    }

    pub fn free_values(&self) -> Vec<f64> {
        self.space.restrict_to_free(&self.values)
    }
}

/// Nodal interpolant: the value at every dof coordinate.
pub fn interpolate(space: Arc<FeSpace>, f: impl Fn(Point) -> f64) -> FeFunction {
    let values = space.dof_coords().iter().map(|&p| f(p)).collect();
    FeFunction::new(space, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_uniform_square;

    #[test]
    fn dof_counts_and_masks() {
        let mesh = Arc::new(generate_uniform_square(2).unwrap());
        let p1 = FeSpace::linear(mesh.clone());
        assert_eq!(p1.num_dofs(), 9);
        assert_eq!(p1.free_dofs(), &[4]);
        let p2 = FeSpace::quadratic(mesh.clone());
        assert_eq!(p2.num_dofs(), 9 + mesh.num_edges());
        // interior: one vertex and the 8 interior edges
        assert_eq!(p2.num_free(), 1 + 8);
        for (i, &fixed) in p2.dirichlet_mask().iter().enumerate() {
            let p = p2.dof_coords()[i];
            let on_boundary = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
            assert_eq!(fixed, on_boundary);
        }
    }

    #[test]
    fn p2_basis_is_nodal() {
        let mesh = generate_uniform_square(1).unwrap();
        let geo = ElementGeometry::new(&mesh, 0);
        let nodes = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
            [0.5, 0.5, 0.0],
        ];
        for (i, l) in nodes.iter().enumerate() {
            let (phi, _) = geo.basis(Order::Quadratic, l);
            for (j, v) in phi.iter().enumerate() {
                assert!((v - f64::from(u8::from(i == j))).abs() < 1e-15);
            }
        }
        // gradients of a partition of unity sum to zero
        let (_, grad) = geo.basis(Order::Quadratic, &[0.2, 0.3, 0.5]);
        let s = grad.iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
        assert!(s[0].abs() < 1e-14 && s[1].abs() < 1e-14);
    }

    #[test]
    fn interpolation_of_simple_functions() {
        let mesh = Arc::new(generate_uniform_square(3).unwrap());
        let space = Arc::new(FeSpace::linear(mesh));
        let one = interpolate(space.clone(), |_| 1.0);
        assert!(one.values.iter().all(|&v| v == 1.0));
        let x = interpolate(space.clone(), |p| p[0]);
        for (v, p) in x.values.iter().zip(space.dof_coords()) {
            assert_eq!(*v, p[0]);
        }
    }

    #[test]
    fn spd_check() {
        assert!(is_spd(&[[1.0, 0.0], [0.0, 1.0]]));
        assert!(is_spd(&[[2.0, 1.0], [1.0, 2.0]]));
        assert!(!is_spd(&[[1.0, 2.0], [2.0, 1.0]]));
        assert!(!is_spd(&[[1.0, 0.5], [0.0, 1.0]]));
        assert!(!is_spd(&[[-1.0, 0.0], [0.0, -1.0]]));
    }
}
