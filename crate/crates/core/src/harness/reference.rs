use std::f64::consts::PI;
use std::sync::Arc;

use crate::fem::ExactSolution;
use crate::mesh::Point;

/// First eigenvalue of the Laplacian on the L-shaped domain (−1,1)² \ [0,1)×(−1,0].
pub const LSHAPE_FIRST_EIGENVALUE: f64 = 9.6397238440219;

/// Eigenfunctions here are scaled to unit L² norm.
pub type Eigenfunction = Arc<dyn ExactSolution + Send + Sync>;

#[derive(Clone)]
pub struct ReferenceSolution {
    pub eigenvalue: f64,
    /// How many eigenvalues (counted with multiplicity) share this value.
    pub multiplicity: usize,
    pub eigenfunction: Option<Eigenfunction>,
}

impl std::fmt::Debug for ReferenceSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceSolution")
            .field("eigenvalue", &self.eigenvalue)
            .field("multiplicity", &self.multiplicity)
            .field("eigenfunction", &self.eigenfunction.is_some())
            .finish()
    }
}

impl ReferenceSolution {
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

struct SineMode {
    k: f64,
    l: f64,
}

impl ExactSolution for SineMode {
    fn value(&self, p: Point) -> f64 {
        2.0 * (self.k * PI * p[0]).sin() * (self.l * PI * p[1]).sin()
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let (sx, cx) = (self.k * PI * p[0]).sin_cos();
        let (sy, cy) = (self.l * PI * p[1]).sin_cos();
        [2.0 * self.k * PI * cx * sy, 2.0 * self.l * PI * sx * cy]
    }
}

struct Gaussian;

impl ExactSolution for Gaussian {
    fn value(&self, p: Point) -> f64 {
        (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp() / PI.sqrt()
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let v = self.value(p);
        [-p[0] * v, -p[1] * v]
    }
}

/// Groups sorted values into clusters with relative gap below `1e-6`.
fn multiplicity_of(values: &[f64], i: usize) -> usize {
    let target = values[i - 1];
    values
        .iter()
        .filter(|&&v| (v - target).abs() <= 1e-6 * target.abs())
        .count()
}

/// `i`-th smallest `(k² + l²)π²` on the unit square, counted with
/// multiplicity, with its `sin(kπx) sin(lπy)` mode when the eigenvalue is
/// simple.
pub fn reference_square(i: usize) -> ReferenceSolution {
    assert!(i >= 1, "eigenvalue indices start at 1");
    // all pairs with k² + l² up to a bound that surely holds i of them
    let bound = ((i as f64).sqrt().ceil() as usize + 2).pow(2);
    let mut modes: Vec<(usize, usize, usize)> = (1..=bound)
        .flat_map(|k| (1..=bound).map(move |l| (k * k + l * l, k, l)))
        .collect();
    modes.sort_unstable();
    let values: Vec<f64> = modes.iter().map(|m| m.0 as f64 * PI * PI).collect();
    let (_, k, l) = modes[i - 1];
    let multiplicity = multiplicity_of(&values, i);
    ReferenceSolution {
        eigenvalue: values[i - 1],
        multiplicity,
        eigenfunction: (multiplicity == 1).then(|| {
            Arc::new(SineMode {
                k: k as f64,
                l: l as f64,
            }) as Eigenfunction
        }),
    }
}

pub fn reference_lshape(i: usize) -> Option<ReferenceSolution> {
    (i == 1).then_some(ReferenceSolution {
        eigenvalue: LSHAPE_FIRST_EIGENVALUE,
        multiplicity: 1,
        eigenfunction: None,
    })
}

/// `-½Δu + ½|x|²u = λu` on ℝ²: eigenvalues `m + 1` with multiplicity `m + 1`.
pub fn reference_oscillator(i: usize) -> ReferenceSolution {
    assert!(i >= 1, "eigenvalue indices start at 1");
    let mut m = 0;
    let mut count = 0;
    while count + m + 1 < i {
        count += m + 1;
        m += 1;
    }
    ReferenceSolution {
        eigenvalue: (m + 1) as f64,
        multiplicity: m + 1,
        eigenfunction: (m == 0).then(|| Arc::new(Gaussian) as Eigenfunction),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_spectrum() {
        let r = reference_square(1);
        assert!((r.eigenvalue - 19.7392088021787).abs() < 1e-12);
        assert!(r.is_simple() && r.eigenfunction.is_some());
        for i in [2, 3] {
            let r = reference_square(i);
            assert_eq!(r.eigenvalue, 5.0 * PI * PI);
            assert_eq!(r.multiplicity, 2);
            assert!(r.eigenfunction.is_none());
        }
        let r = reference_square(4);
        assert_eq!(r.eigenvalue, 8.0 * PI * PI);
        assert!(r.is_simple());
    }

    #[test]
    fn oscillator_spectrum() {
        let v: Vec<f64> = (1..=6).map(|i| reference_oscillator(i).eigenvalue).collect();
        assert_eq!(v, vec![1.0, 2.0, 2.0, 3.0, 3.0, 3.0]);
        let g = Gaussian;
        let p = [0.3, -0.7];
        let h = 1e-6;
        let fd = (g.value([p[0] + h, p[1]]) - g.value([p[0] - h, p[1]])) / (2.0 * h);
        assert!((fd - g.gradient(p)[0]).abs() < 1e-9);
    }

    #[test]
    fn sine_mode_gradient() {
        let r = reference_square(4);
        let u = r.eigenfunction.unwrap();
        let p = [0.2, 0.35];
        let h = 1e-6;
        let fd = (u.value([p[0], p[1] + h]) - u.value([p[0], p[1] - h])) / (2.0 * h);
        assert!((fd - u.gradient(p)[1]).abs() < 1e-7);
    }
}
