use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::factor::Factorization;
use super::sparse::SparseMatrix;
use super::LinalgError;

/// Which quadratic form the eigenvector is scaled to unit size in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `vᵀ A v = 1`
    Energy,
    /// `vᵀ B v = 1`
    L2,
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub normalization: Normalization,
}

#[derive(Debug, Clone)]
pub struct EigenOptions {
    pub normalization: Normalization,
    /// Problems up to this size are solved densely.
    pub dense_threshold: usize,
    /// Extra Ritz vectors carried along beyond the requested count.
    pub guard_vectors: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            normalization: Normalization::Energy,
            dense_threshold: 200,
            guard_vectors: 3,
            tolerance: 1e-10,
            max_iterations: 500,
            seed: 0x5eed,
        }
    }
}

/// The `k` smallest eigenpairs of `A v = λ B v`, energy-normalized.
pub fn eigs_smallest(a: &SparseMatrix, b: &SparseMatrix, k: usize) -> Result<Vec<EigenPair>, LinalgError> {
    eigs_smallest_with(a, b, k, &EigenOptions::default())
}

pub fn eigs_smallest_with(
    a: &SparseMatrix,
    b: &SparseMatrix,
    k: usize,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>, LinalgError> {
    let n = a.dim();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    assert_eq!(b.dim(), n, "A and B must have the same size");
    if k == 0 || k > n {
        return Err(LinalgError::TooManyEigenpairs { requested: k, dim: n });
    }
    let (values, vectors) = if n <= opts.dense_threshold {
        let (vals, vecs) = dense_generalized(&to_mat(a), &to_mat(b))?;
        let cols = (0..k).map(|j| vecs.col(j).iter().copied().collect()).collect();
        (vals[..k].to_vec(), cols)
    } else {
        subspace_iteration(a, b, k, opts)?
    };
    Ok(values
        .into_iter()
        .zip(vectors)
        .map(|(value, v)| finish_pair(a, b, value, v, opts.normalization))
        .collect())
}

fn finish_pair(a: &SparseMatrix, b: &SparseMatrix, value: f64, mut v: Vec<f64>, norm: Normalization) -> EigenPair {
    let size = match norm {
        Normalization::Energy => a.inner(&v, &v),
        Normalization::L2 => b.inner(&v, &v),
    }
    .sqrt();
    let peak = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    let s = peak.signum() / size;
    v.iter_mut().for_each(|x| *x *= s);
    EigenPair {
        value,
        vector: v,
        normalization: norm,
    }
}

fn to_mat(m: &SparseMatrix) -> Mat<f64> {
    let mut d = Mat::zeros(m.dim(), m.dim());
    for i in 0..m.dim() {
        for (j, v) in m.row(i) {
            d[(i, j)] = v;
        }
    }
    d
}

/// Dense `A x = λ B x` with `B = L Lᵀ`: eigenvalues ascending and
/// B-orthonormal eigenvectors as columns.
pub(crate) fn dense_generalized(a: &Mat<f64>, b: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>), LinalgError> {
    let n = a.nrows();
    let llt = b
        .llt(Side::Lower)
        .map_err(|_| LinalgError::NotPositiveDefinite("mass matrix"))?;
    let l = llt.L();
    // C = L⁻¹ A L⁻ᵀ
    let mut c = a.clone();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let mut c = c.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    // symmetrize away rounding
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = s;
            c[(j, i)] = s;
        }
    }
    let evd = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| LinalgError::NotConverged {
            iterations: 0,
            residual: f64::NAN,
            reason: format!("{e:?}"),
        })?;
    let values: Vec<f64> = (0..n).map(|i| evd.S()[i]).collect();
    let mut vectors = evd.U().to_owned();
    solve_upper_triangular_in_place(l.transpose(), vectors.as_mut(), Par::Seq);
    Ok((values, vectors))
}

/// Block inverse iteration (shift 0) with Rayleigh–Ritz on every step.
fn subspace_iteration(
    a: &SparseMatrix,
    b: &SparseMatrix,
    k: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), LinalgError> {
    let n = a.dim();
    let m = (k + opts.guard_vectors).min(n);
    let factor = Factorization::new(a)?;
    if !factor.is_definite() {
        return Err(LinalgError::NotPositiveDefinite("stiffness matrix"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut worst = f64::INFINITY;
    for iteration in 1..=opts.max_iterations {
        let mut y = Vec::with_capacity(m);
        for col in &x {
            y.push(factor.solve(&b.mul_vec(col))?);
        }
        let ay: Vec<Vec<f64>> = y.iter().map(|v| a.mul_vec(v)).collect();
        let by: Vec<Vec<f64>> = y.iter().map(|v| b.mul_vec(v)).collect();
        let ar = Mat::from_fn(m, m, |i, j| super::dot(&y[i], &ay[j]));
        let br = Mat::from_fn(m, m, |i, j| super::dot(&y[i], &by[j]));
        let ar = Mat::from_fn(m, m, |i, j| 0.5 * (ar[(i, j)] + ar[(j, i)]));
        let br = Mat::from_fn(m, m, |i, j| 0.5 * (br[(i, j)] + br[(j, i)]));
        let (theta, q) = dense_generalized(&ar, &br)?;
        x = (0..m)
            .map(|j| {
                let mut v = vec![0.0; n];
                for (i, yi) in y.iter().enumerate() {
                    let c = q[(i, j)];
                    v.iter_mut().zip(yi).for_each(|(vv, w)| *vv += c * w);
                }
                v
            })
            .collect();
        worst = 0.0;
        for j in 0..k {
            let av = a.mul_vec(&x[j]);
            let bv = b.mul_vec(&x[j]);
            let r: Vec<f64> = av.iter().zip(&bv).map(|(p, q)| p - theta[j] * q).collect();
            worst = worst.max(super::norm2(&r) / super::norm2(&av));
        }
        if worst <= opts.tolerance {
            log::debug!("subspace iteration converged in {iteration} steps (n = {n}, k = {k})");
            return Ok((theta[..k].to_vec(), x.into_iter().take(k).collect()));
        }
    }
    Err(LinalgError::NotConverged {
        iterations: opts.max_iterations,
        residual: worst,
        reason: "iteration cap reached".into(),
    })
}
