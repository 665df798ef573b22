//! Dense numerical linear algebra on top of nalgebra's SVD.

use nalgebra::{DMatrix, DVector};

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values strictly above `tol` (absolute).
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > tol).count()
}

/// Smallest singular value of an `r × c` matrix with `r ≥ c`, i.e. the
/// injectivity modulus of the linear map. Zero when `r < c`.
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Orthonormal basis (as columns) of the kernel of `m`, treating singular
/// values at or below `tol` as zero.
pub fn kernel_basis(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // pad to at least n rows so that the SVD returns a full right basis
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the column space of `m` (singular values above `tol`).
pub fn range_basis(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let r = m.nrows();
    if m.ncols() == 0 || r == 0 {
        return DMatrix::zeros(r, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(r, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Distance from `v` to the subspace spanned by the orthonormal columns of `basis`.
pub fn projection_residual(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    if basis.ncols() == 0 {
        return v.norm();
    }
    let coeffs = basis.transpose() * v;
    (v - basis * coeffs).norm()
}

/// Build an `r × c` matrix whose columns are the given vectors.
pub fn columns(rows: usize, cols: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_circle_gradient() {
        let g = DMatrix::from_row_slice(1, 2, &[2.0, 0.0]);
        let k = kernel_basis(&g, 1e-9);
        assert_eq!(k.ncols(), 1);
        assert!((k[(0, 0)]).abs() < 1e-15);
        assert!((k[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let g = DMatrix::zeros(1, 2);
        assert_eq!(kernel_basis(&g, 1e-9).ncols(), 2);
        assert_eq!(kernel_basis(&DMatrix::zeros(0, 3), 1e-9).ncols(), 3);
    }

    #[test]
    fn rank_and_residual() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(rank(&m, 1e-12), 1);
        let b = range_basis(&m, 1e-12);
        assert!(projection_residual(&b, &DVector::from_vec(vec![5.0, 0.0, 0.0])) < 1e-14);
        assert!((projection_residual(&b, &DVector::from_vec(vec![0.0, 3.0, 4.0])) - 5.0).abs() < 1e-14);
        assert_eq!(min_singular_value(&DMatrix::from_row_slice(1, 2, &[1.0, 1.0])), 0.0);
    }
}
