//! Thin wrappers over nalgebra for the symmetric eigenproblems and small
//! linear systems used by PCA and the k-group log-rank test.

use nalgebra::{DMatrix, DVector};

/// Eigenpairs of a symmetric matrix, sorted by decreasing eigenvalue (ties
/// keep the lower original index first).
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Eigendecomposition of the `n x n` row-major symmetric matrix `a`.
pub fn symmetric_eigen(a: &[f64], n: usize) -> SymEigen {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[i * n + j] + a[j * n + i]));
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]).then(x.cmp(&y)));
    SymEigen {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect(),
    }
}

/// Solves `a x = b` for a square row-major `a`; `None` when singular.
pub fn solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let m = DMatrix::from_row_slice(n, n, a);
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let lu = m.lu();
    let u = lu.u();
    if scale == 0.0 || (0..n).any(|i| u[(i, i)].abs() <= 1e-12 * scale) {
        return None;
    }
    lu.solve(&DVector::from_column_slice(b)).map(|x| x.iter().copied().collect())
}
