use crate::mesh::Point;

use super::quadrature::QuadratureRule;
use super::space::{Coefficients, ElementGeometry, FeFunction};

/// A function known in closed form, with its gradient.
pub trait ExactSolution {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
}

impl<F, G> ExactSolution for (F, G)
where
    F: Fn(Point) -> f64,
    G: Fn(Point) -> [f64; 2],
{
    fn value(&self, p: Point) -> f64 {
        (self.0)(p)
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        (self.1)(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub energy: f64,
}

/// Rule for error norms, well past the degree of any assembled integrand.
pub const ERROR_RULE: QuadratureRule = super::quadrature::DEGREE_8;

/// Data handed to elementwise integrands at one quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint<'a> {
    pub triangle: usize,
    pub bary: &'a [f64; 3],
    pub point: Point,
    pub value: f64,
    pub gradient: [f64; 2],
}

impl FeFunction {
    /// Value and gradient inside triangle `t` at barycentric point `l`.
    pub fn eval_local(&self, geo: &ElementGeometry, t: usize, l: &[f64; 3]) -> (f64, [f64; 2]) {
        let order = self.space.order();
        let dofs = self.space.element_dofs(t);
        let (phi, grad) = geo.basis(order, l);
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for i in 0..order.local_dofs() {
            let c = self.values[dofs[i]];
            v += c * phi[i];
            g[0] += c * grad[i][0];
            g[1] += c * grad[i][1];
        }
        (v, g)
    }
}

/// `∫_T f` on every triangle for an `N`-valued integrand evaluated with the
/// function's local value and gradient.
pub fn integrate_elementwise<const N: usize>(
    u: &FeFunction,
    rule: QuadratureRule,
    mut f: impl FnMut(&QuadPoint) -> [f64; N],
) -> Vec<[f64; N]> {
    let mesh = u.space.mesh();
    (0..mesh.num_triangles())
        .map(|t| {
            let geo = ElementGeometry::new(mesh, t);
            let mut sum = [0.0; N];
            for (l, &w) in rule.points.iter().zip(rule.weights) {
                let (value, gradient) = u.eval_local(&geo, t, l);
                let q = QuadPoint {
                    triangle: t,
                    bary: l,
                    point: geo.point(l),
                    value,
                    gradient,
                };
                for (s, v) in sum.iter_mut().zip(f(&q)) {
                    *s += w * v;
                }
            }
            sum.map(|s| s * geo.area)
        })
        .collect()
}

/// `‖u − reference‖` in L² and in the energy norm of `coeff`; with no
/// reference, the norms of `u` itself.
pub fn norms(u: &FeFunction, reference: Option<&dyn ExactSolution>, coeff: &Coefficients) -> Norms {
    let parts = integrate_elementwise(u, ERROR_RULE, |q| {
        let (e, eg) = match reference {
            Some(r) => {
                let rg = r.gradient(q.point);
                (q.value - r.value(q.point), [q.gradient[0] - rg[0], q.gradient[1] - rg[1]])
            }
            None => (q.value, q.gradient),
        };
        [e * e, coeff.energy_density(q.point, eg) + coeff.reaction(q.point) * e * e]
    });
    let (l2, energy) = parts.iter().fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
    Norms {
        l2: l2.sqrt(),
        energy: energy.sqrt(),
    }
}

/// `‖∇u − reference‖₀` for a closed-form gradient field.
pub fn gradient_error(u: &FeFunction, reference: impl Fn(Point) -> [f64; 2]) -> f64 {
    integrate_elementwise(u, ERROR_RULE, |q| {
        let r = reference(q.point);
        let d = [q.gradient[0] - r[0], q.gradient[1] - r[1]];
        [d[0] * d[0] + d[1] * d[1]]
    })
    .iter()
    .map(|p| p[0])
    .sum::<f64>()
    .sqrt()
}
