use std::sync::Arc;

use crate::fem::{Coefficients, FeFunction, Order};
use crate::linalg::{dot, eigs_smallest_with, EigenOptions, Factorization, Normalization};
use crate::mesh::{bisect_with_parents, Mesh};
use crate::ppr::{enhance_eigenvalue, estimate, EstimatorField, RecoveredGradient, RecoveryOperator};

use super::rates::dorfler_mark;
use super::{AlgorithmError, Discretization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `a(u, v) = λ (ũ, v)`: one source problem per level.
    A3,
    /// `a(u, v) − λ (u, v) = (ũ, v)`: one shifted inverse step per level.
    A4,
}

#[derive(Debug, Clone)]
pub struct AdaptiveConfig {
    pub theta: f64,
    pub epsilon: f64,
    pub variant: Variant,
    pub max_levels: usize,
}

#[derive(Debug, Clone)]
pub struct AdaptiveState {
    pub level: usize,
    pub mesh: Arc<Mesh>,
    /// Scaled to `(u, u) = 1`.
    pub function: FeFunction,
    pub rayleigh: f64,
    pub enhanced: f64,
    pub recovered: RecoveredGradient,
    pub estimator: EstimatorField,
    /// Free degrees of freedom.
    pub dofs: usize,
}

#[derive(Debug, Clone)]
pub struct AdaptiveTrace {
    pub states: Vec<AdaptiveState>,
    pub converged: bool,
}

/// Adaptive first-eigenpair loop: estimate, enhance, stop once `η² < ε`,
/// otherwise mark, bisect and do a single linear solve on the new mesh.
pub fn adaptive_loop(initial: Arc<Mesh>, coeff: &Coefficients, config: &AdaptiveConfig) -> Result<AdaptiveTrace, AlgorithmError> {
    if !(0.0..1.0).contains(&config.theta) {
        return Err(AlgorithmError::InvalidParameter(format!("θ = {} not in [0, 1)", config.theta)));
    }
    if !(config.epsilon > 0.0) {
        return Err(AlgorithmError::InvalidParameter(format!("ε = {} must be positive", config.epsilon)));
    }
    if config.max_levels == 0 {
        return Err(AlgorithmError::InvalidParameter("max_levels must be positive".into()));
    }

    let mut disc = Discretization::new(initial.clone(), Order::Linear, coeff)?;
    let opts = EigenOptions {
        normalization: Normalization::L2,
        ..Default::default()
    };
    let pair = eigs_smallest_with(&disc.reduced_stiffness, &disc.reduced_mass, 1, &opts)?
        .pop()
        .expect("one pair");
    let mut mesh = initial;
    let mut u = pair.vector;
    let mut rayleigh = pair.value;
    let mut states = Vec::new();

    for level in 0..config.max_levels {
        let function = FeFunction::from_free(disc.space.clone(), &u);
        let recovered = RecoveryOperator::new(mesh.clone())?.recover(&function)?;
        let estimator = estimate(&function, &recovered, coeff);
        let enhanced = enhance_eigenvalue(rayleigh, estimator.global, disc.mass_inner(&u, &u))?;
        let eta2 = estimator.global * estimator.global;
        log::info!(
            "level {level}: N = {}, rayleigh = {rayleigh:.12}, enhanced = {enhanced:.12}, eta^2 = {eta2:.3e}",
            disc.space.num_free()
        );
        let marked = dorfler_mark(&estimator, config.theta)?;
        states.push(AdaptiveState {
            level,
            mesh: mesh.clone(),
            function,
            rayleigh,
            enhanced,
            recovered,
            estimator,
            dofs: disc.space.num_free(),
        });
        if eta2 <= config.epsilon {
            return Ok(AdaptiveTrace { states, converged: true });
        }
        if level + 1 == config.max_levels {
            break;
        }

        let (refined, parents) = bisect_with_parents(&mesh, &marked)?;
        let old = &states.last().expect("just pushed").function.values;
        let mut values = old.clone();
        values.extend(parents.iter().map(|&[a, b]| 0.5 * (old[a] + old[b])));
        mesh = Arc::new(refined);
        disc = Discretization::new(mesh.clone(), Order::Linear, coeff)?;
        let rhs = disc.load(&values);

        let mut next = match config.variant {
            Variant::A3 => {
                let scaled: Vec<f64> = rhs.iter().map(|r| enhanced * r).collect();
                Factorization::new(&disc.reduced_stiffness)?.solve(&scaled)?
            }
            Variant::A4 => {
                let shifted = disc.reduced_stiffness.lin_comb(1.0, -enhanced, &disc.reduced_mass);
                Factorization::new(&shifted)?.solve(&rhs)?
            }
        };
        let norm = disc.mass_inner(&next, &next).sqrt();
        let s = dot(&next, &rhs).signum() / norm;
        next.iter_mut().for_each(|x| *x *= s);
        rayleigh = disc.energy(&next) / disc.mass_inner(&next, &next);
        u = next;
    }
    Ok(AdaptiveTrace { states, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_lshape;

    #[test]
    fn lshape_trace_is_normalized_and_consistent() {
        let config = AdaptiveConfig {
            theta: 0.4,
            epsilon: 1e-12,
            variant: Variant::A3,
            max_levels: 6,
        };
        let trace = adaptive_loop(Arc::new(generate_lshape(2).unwrap()), &Coefficients::laplace(), &config).unwrap();
        assert_eq!(trace.states.len(), 6);
        assert!(!trace.converged);
        for s in &trace.states {
            let eta2 = s.estimator.global.powi(2);
            assert!((s.enhanced - (s.rayleigh - eta2)).abs() < 1e-10);
            assert!(s.rayleigh > 9.6397238440219);
            s.mesh.check_conforming().unwrap();
        }
        assert!(trace.states.windows(2).all(|w| w[1].dofs > w[0].dofs));
    }

    #[test]
    fn parameters_are_validated() {
        let mesh = Arc::new(generate_lshape(2).unwrap());
        let bad = AdaptiveConfig {
            theta: 1.0,
            epsilon: 1e-6,
            variant: Variant::A4,
            max_levels: 3,
        };
        assert!(adaptive_loop(mesh.clone(), &Coefficients::laplace(), &bad).is_err());
        let bad = AdaptiveConfig { theta: 0.5, epsilon: 0.0, ..bad };
        assert!(adaptive_loop(mesh, &Coefficients::laplace(), &bad).is_err());
    }

    #[test]
    fn loose_tolerance_stops_immediately() {
        let config = AdaptiveConfig {
            theta: 0.4,
            epsilon: 1e3,
            variant: Variant::A4,
            max_levels: 5,
        };
        let trace = adaptive_loop(Arc::new(generate_lshape(2).unwrap()), &Coefficients::laplace(), &config).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.states.len(), 1);
    }
}
