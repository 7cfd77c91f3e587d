use crate::ppr::EstimatorField;

use super::AlgorithmError;

/// Minimal bulk set: elements by decreasing `η_T²` (ties by index) until
/// they carry `θ` of the total. Never empty for a nonempty mesh.
pub fn dorfler_mark(estimator: &EstimatorField, theta: f64) -> Result<Vec<usize>, AlgorithmError> {
    if !(0.0..1.0).contains(&theta) {
        return Err(AlgorithmError::InvalidParameter(format!("θ = {theta} not in [0, 1)")));
    }
    let sq = estimator.squared_local();
    let total: f64 = sq.iter().sum();
    let mut order: Vec<usize> = (0..sq.len()).collect();
    order.sort_by(|&a, &b| sq[b].total_cmp(&sq[a]).then(a.cmp(&b)));
    let mut marked = Vec::new();
    let mut sum = 0.0;
    for t in order {
        marked.push(t);
        sum += sq[t];
        if sum >= theta * total {
            break;
        }
    }
    Ok(marked)
}

/// `κ = η² / |λ_ref − λ_h|`.
pub fn effectivity_index(estimator_global: f64, lambda_ref: f64, lambda_h: f64) -> Result<f64, AlgorithmError> {
    let gap = (lambda_ref - lambda_h).abs();
    if gap == 0.0 {
        return Err(AlgorithmError::Zero("eigenvalue error"));
    }
    Ok(estimator_global * estimator_global / gap)
}

/// `log(|e_{k−1}|/|e_k|) / log(s_{k−1}/s_k)` for consecutive pairs.
pub fn convergence_order(errors: &[f64], scales: &[f64]) -> Result<Vec<f64>, AlgorithmError> {
    if errors.len() != scales.len() || errors.len() < 2 {
        return Err(AlgorithmError::InvalidParameter(
            "need two or more errors with one scale each".into(),
        ));
    }
    if errors.contains(&0.0) {
        return Err(AlgorithmError::Zero("error"));
    }
    if scales.iter().any(|&s| s <= 0.0) {
        return Err(AlgorithmError::InvalidParameter("scales must be positive".into()));
    }
    Ok(errors
        .windows(2)
        .zip(scales.windows(2))
        .map(|(e, s)| (e[0].abs() / e[1].abs()).ln() / (s[0] / s[1]).ln())
        .collect())
}
