use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{MatMut, Side};

use super::sparse::{norm2, SparseMatrix};
use super::LinalgError;

/// Relative residual every solve must reach.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

const MAX_REFINEMENT_STEPS: usize = 4;

enum Factor {
    Cholesky(Llt<usize, f64>),
    Lu(Lu<usize, f64>),
}

/// Reusable direct factorization of a symmetric sparse matrix.
///
/// Cholesky is tried first; symmetric indefinite matrices (shifted systems)
/// fall back to LU with partial pivoting. Every solve is followed by a few
/// steps of iterative refinement against the original matrix.
pub struct Factorization {
    matrix: SparseMatrix,
    factor: Factor,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization")
            .field("dim", &self.matrix.dim())
            .field("definite", &self.is_definite())
            .finish()
    }
}

fn to_faer(m: &SparseMatrix) -> SparseColMat<usize, f64> {
    // CSR of a symmetric matrix is its own CSC
    let symbolic = SymbolicSparseColMat::new_checked(
        m.dim(),
        m.dim(),
        m.row_ptr().to_vec(),
        None,
        m.col_idx().to_vec(),
    );
    SparseColMat::new(symbolic, m.values().to_vec())
}

impl Factorization {
    pub fn new(matrix: &SparseMatrix) -> Result<Self, LinalgError> {
        let n = matrix.dim();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        let asym = matrix.asymmetry();
        let scale = matrix.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if asym > 1e-12 * scale {
            return Err(LinalgError::NotSymmetric(asym));
        }
        let m = to_faer(matrix);
        let factor = match m.sp_cholesky(Side::Lower) {
            Ok(llt) => Factor::Cholesky(llt),
            Err(_) => match m.sp_lu() {
                Ok(lu) => Factor::Lu(lu),
                Err(e) => return Err(LinalgError::Singular(e.to_string())),
            },
        };
        Ok(Self {
            matrix: matrix.clone(),
            factor,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Whether the Cholesky factorization succeeded.
    pub fn is_definite(&self) -> bool {
        matches!(self.factor, Factor::Cholesky(_))
    }

    fn raw_solve(&self, x: &mut [f64]) {
        let n = x.len();
        let col = MatMut::from_column_major_slice_mut(x, n, 1);
        match &self.factor {
            Factor::Cholesky(f) => f.solve_in_place(col),
            Factor::Lu(f) => f.solve_in_place(col),
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        assert_eq!(rhs.len(), self.dim());
        let rhs_norm = norm2(rhs);
        if rhs_norm == 0.0 {
            return Ok(vec![0.0; rhs.len()]);
        }
        let mut x = rhs.to_vec();
        self.raw_solve(&mut x);
        let mut residual = f64::INFINITY;
        for _ in 0..=MAX_REFINEMENT_STEPS {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(LinalgError::Singular("non-finite solution".into()));
            }
            let ax = self.matrix.mul_vec(&x);
            let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            residual = norm2(&r) / rhs_norm;
            if residual <= 0.01 * SOLVE_TOLERANCE {
                break;
            }
            self.raw_solve(&mut r);
            for (xi, di) in x.iter_mut().zip(&r) {
                *xi += di;
            }
        }
        if residual > SOLVE_TOLERANCE {
            log::warn!(
                "ill-conditioned solve: relative residual {residual:.3e} after refinement (n = {})",
                self.dim()
            );
        }
        Ok(x)
    }
}

/// One-shot factorize and solve.
pub fn factor_solve(m: &SparseMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    Factorization::new(m)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize, shift: f64) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 - shift));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, &t)
    }

    fn residual(m: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
        let r: Vec<f64> = m.mul_vec(x).iter().zip(b).map(|(a, b)| a - b).collect();
        norm2(&r) / norm2(b)
    }

    #[test]
    fn one_by_one() {
        let m = SparseMatrix::from_dense(&[vec![2.0]]);
        let x = factor_solve(&m, &[4.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn definite_and_indefinite() {
        let m = laplacian_1d(50, 0.0);
        let f = Factorization::new(&m).unwrap();
        assert!(f.is_definite());
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        assert!(residual(&m, &f.solve(&b).unwrap(), &b) <= SOLVE_TOLERANCE);

        // between the first two eigenvalues of the 1d Laplacian
        let lam1 = 2.0 - 2.0 * (std::f64::consts::PI / 51.0).cos();
        let m = laplacian_1d(50, lam1 * 1.5);
        let f = Factorization::new(&m).unwrap();
        assert!(!f.is_definite());
        assert!(residual(&m, &f.solve(&b).unwrap(), &b) <= SOLVE_TOLERANCE);
    }

    #[test]
    fn singular_matrix_is_reported() {
        // pure Neumann 1d Laplacian: constants in the kernel
        let mut t = vec![(0, 0, 1.0), (2, 2, 1.0), (1, 1, 2.0)];
        t.extend([(0, 1, -1.0), (1, 0, -1.0), (1, 2, -1.0), (2, 1, -1.0)]);
        let m = SparseMatrix::from_triplets(3, &t);
        let r = factor_solve(&m, &[1.0, 0.0, 0.0]);
        assert!(matches!(r, Err(LinalgError::Singular(_))), "{r:?}");
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(Factorization::new(&m), Err(LinalgError::NotSymmetric(_))));
    }
}
