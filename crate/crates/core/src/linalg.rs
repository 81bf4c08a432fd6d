//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Smallest eigenvalue of the symmetric part `(M + Mᵀ)/2`.
pub fn min_sym_eigenvalue(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &e| acc.min(e))
}

/// Minimum-norm least-squares solution of `a · x ≈ b`.
pub fn lstsq(a: &Matrix, b: &Vector) -> Vector {
    if a.ncols() == 0 {
        return Vector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let eps = 1e-12 * smax.max(1e-300) * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps)
        .unwrap_or_else(|_| Vector::zeros(a.ncols()))
}

pub fn rank(a: &Matrix) -> usize {
    if a.is_empty() {
        return 0;
    }
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let eps = 1e-10 * smax.max(1e-300);
    svd.singular_values.iter().filter(|&&s| s > eps).count()
}

/// Orthonormal basis (as columns) of the null space of `a`, which has `dim` columns.
pub fn null_space(a: &Matrix, dim: usize) -> Matrix {
    if a.nrows() == 0 {
        return Matrix::identity(dim, dim);
    }
    // Row space from the SVD of aᵀ a; eigenvectors with ~zero eigenvalue span the kernel.
    let gram = a.transpose() * a;
    let eig = gram.symmetric_eigen();
    let emax = eig.eigenvalues.iter().fold(0.0_f64, |m, &e| m.max(e.abs()));
    let eps = 1e-10 * emax.max(1e-300);
    let cols: Vec<Vector> = (0..dim)
        .filter(|&k| eig.eigenvalues[k].abs() <= eps)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        Matrix::zeros(dim, 0)
    } else {
        Matrix::from_columns(&cols)
    }
}

/// Euclidean norm of the orthogonal projection of `v` onto the column span of the
/// orthonormal `basis`.
pub fn projected_norm(v: &Vector, basis: &Matrix) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    (basis.transpose() * v).norm()
}

pub fn row(m: &Matrix, k: usize) -> Vector {
    m.row(k).transpose()
}

pub fn from_rows(rows: &[Vec<f64>], ncols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}
