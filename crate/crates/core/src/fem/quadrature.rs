//! Symmetric quadrature rules on triangles (Dunavant), in barycentric
//! coordinates with weights normalized to sum to one.

#[derive(Debug, Clone, Copy)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: &'static [[f64; 3]],
    pub weights: &'static [f64],
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The cheapest available rule exact for polynomials of the given degree.
    pub fn exact_to(degree: usize) -> Self {
        match degree {
            0..=4 => DEGREE_4,
            5..=6 => DEGREE_6,
            _ => DEGREE_8,
        }
    }
}

const A4: f64 = 0.445_948_490_915_965;
const B4: f64 = 0.091_576_213_509_771;
const W4A: f64 = 0.223_381_589_678_011;
const W4B: f64 = 0.109_951_743_655_322;

pub const DEGREE_4: QuadratureRule = QuadratureRule {
    degree: 4,
    points: &[
        [1.0 - 2.0 * A4, A4, A4],
        [A4, 1.0 - 2.0 * A4, A4],
        [A4, A4, 1.0 - 2.0 * A4],
        [1.0 - 2.0 * B4, B4, B4],
        [B4, 1.0 - 2.0 * B4, B4],
        [B4, B4, 1.0 - 2.0 * B4],
    ],
    weights: &[W4A, W4A, W4A, W4B, W4B, W4B],
};

const A6: f64 = 0.249_286_745_170_910;
const B6: f64 = 0.063_089_014_491_502;
const C6: f64 = 0.053_145_049_844_817;
const D6: f64 = 0.310_352_451_033_784;
const E6: f64 = 1.0 - C6 - D6;
const W6A: f64 = 0.116_786_275_726_379;
const W6B: f64 = 0.050_844_906_370_207;
const W6C: f64 = 0.082_851_075_618_374;

pub const DEGREE_6: QuadratureRule = QuadratureRule {
    degree: 6,
    points: &[
        [1.0 - 2.0 * A6, A6, A6],
        [A6, 1.0 - 2.0 * A6, A6],
        [A6, A6, 1.0 - 2.0 * A6],
        [1.0 - 2.0 * B6, B6, B6],
        [B6, 1.0 - 2.0 * B6, B6],
        [B6, B6, 1.0 - 2.0 * B6],
        [C6, D6, E6],
        [C6, E6, D6],
        [D6, C6, E6],
        [D6, E6, C6],
        [E6, C6, D6],
        [E6, D6, C6],
    ],
    weights: &[W6A, W6A, W6A, W6B, W6B, W6B, W6C, W6C, W6C, W6C, W6C, W6C],
};

const A8: f64 = 0.459_292_588_292_723;
const B8: f64 = 0.170_569_307_751_760;
const C8: f64 = 0.050_547_228_317_031;
const D8: f64 = 0.008_394_777_409_958;
const E8: f64 = 0.263_112_829_634_638;
const F8: f64 = 1.0 - D8 - E8;
const W8O: f64 = 0.144_315_607_677_787;
const W8A: f64 = 0.095_091_634_267_285;
const W8B: f64 = 0.103_217_370_534_718;
const W8C: f64 = 0.032_458_497_623_198;
const W8D: f64 = 0.027_230_314_174_435;
const THIRD: f64 = 1.0 / 3.0;

pub const DEGREE_8: QuadratureRule = QuadratureRule {
    degree: 8,
    points: &[
        [THIRD, THIRD, THIRD],
        [1.0 - 2.0 * A8, A8, A8],
        [A8, 1.0 - 2.0 * A8, A8],
        [A8, A8, 1.0 - 2.0 * A8],
        [1.0 - 2.0 * B8, B8, B8],
        [B8, 1.0 - 2.0 * B8, B8],
        [B8, B8, 1.0 - 2.0 * B8],
        [1.0 - 2.0 * C8, C8, C8],
        [C8, 1.0 - 2.0 * C8, C8],
        [C8, C8, 1.0 - 2.0 * C8],
        [D8, E8, F8],
        [D8, F8, E8],
        [E8, D8, F8],
        [E8, F8, D8],
        [F8, D8, E8],
        [F8, E8, D8],
    ],
    weights: &[
        W8O, W8A, W8A, W8A, W8B, W8B, W8B, W8C, W8C, W8C, W8D, W8D, W8D, W8D, W8D, W8D,
    ],
};

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫_T λ1^a λ2^b λ3^c / |T| = 2 a! b! c! / (a+b+c+2)!
    fn exact_monomial(a: u32, b: u32, c: u32) -> f64 {
        2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2)
    }

    #[test]
    fn rules_integrate_monomials_exactly() {
        for rule in [DEGREE_4, DEGREE_6, DEGREE_8] {
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
            for p in rule.points {
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            }
            let d = rule.degree as u32;
            for a in 0..=d {
                for b in 0..=d - a {
                    for c in 0..=d - a - b {
                        let q: f64 = rule
                            .points
                            .iter()
                            .zip(rule.weights)
                            .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                            .sum();
                        let exact = exact_monomial(a, b, c);
                        assert!(
                            (q - exact).abs() < 1e-14,
                            "degree {} rule fails on ({a},{b},{c}): {q} vs {exact}",
                            rule.degree
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn degree_selection() {
        assert_eq!(QuadratureRule::exact_to(2).degree, 4);
        assert_eq!(QuadratureRule::exact_to(6).degree, 6);
        assert_eq!(QuadratureRule::exact_to(7).degree, 8);
    }
}
