//! Dense complex linear algebra helpers shared by the frame modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest ambient dimension accepted by the dense routines.
pub const MAX_DIM: usize = 2000;

/// Relative singular-value cutoff for rank decisions and pseudo-inverses.
pub const RANK_RTOL: f64 = 1e-12;

pub fn check_dim(d: usize) -> Result<()> {
    if d > MAX_DIM {
        return Err(Error::TooLarge(d));
    }
    Ok(())
}

fn to_faer(m: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD `m = U diag(s) V^*` with `s` in decreasing order.
pub fn thin_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = to_faer(m).thin_svd().expect("SVD of a finite matrix converges");
    let s = svd.S().column_vector().iter().map(|z| z.re).collect();
    (from_faer(svd.U()), s, from_faer(svd.V()))
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD of a finite matrix converges")
}

/// Operator (spectral) norm: the largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a matrix viewed as a map from its column space.
///
/// Returns 0 when the matrix has more columns than rows, since such a map
/// always has a non-trivial kernel.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn numerical_rank(m: &CMatrix) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > RANK_RTOL * smax).count()
}

/// Moore-Penrose pseudo-inverse with relative cutoff [`RANK_RTOL`]; also
/// returns the numerical rank.
pub fn pseudo_inverse(m: &CMatrix) -> (CMatrix, usize) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (CMatrix::zeros(cols, rows), 0);
    }
    let (u, s, v) = thin_svd(m);
    let cutoff = RANK_RTOL * s[0];
    let rank = s.iter().take_while(|&&x| x > cutoff && x > 0.0).count();
    let mut scaled = v.columns(0, rank).into_owned();
    for (j, &x) in s.iter().take(rank).enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / x);
    }
    (scaled * u.columns(0, rank).adjoint(), rank)
}

/// Orthonormal basis (as columns) for the column space of `m`.
pub fn column_space(m: &CMatrix) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let (u, s, _) = thin_svd(m);
    let rank = s.iter().take_while(|&&x| s[0] > 0.0 && x > RANK_RTOL * s[0]).count();
    u.columns(0, rank).into_owned()
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn from_real_rows(rows: &[Vec<f64>]) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    CMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
}

pub fn real_vector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// Entrywise maximum modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_of_diagonal() {
        let m = from_real_rows(&[vec![1.0, 0.0], vec![0.0, -3.0]]);
        assert!((op_norm(&m) - 3.0).abs() < 1e-14);
        assert!((min_singular_value(&m) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wide_matrix_has_zero_min_singular_value() {
        let m = from_real_rows(&[vec![1.0, 1.0]]);
        assert_eq!(min_singular_value(&m), 0.0);
    }

    #[test]
    fn pseudo_inverse_of_rank_one() {
        // S = diag(4, 0) has S^+ = diag(1/4, 0).
        let s = from_real_rows(&[vec![4.0, 0.0], vec![0.0, 0.0]]);
        let (p, rank) = pseudo_inverse(&s);
        assert_eq!(rank, 1);
        assert!((p[(0, 0)].re - 0.25).abs() < 1e-15);
        assert!(p[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn column_space_drops_duplicate_direction() {
        let m = from_real_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]);
        let b = column_space(&m);
        assert_eq!(b.ncols(), 1);
        assert!(((b.adjoint() * &b)[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_of_rank_deficient_complex_projector() {
        let b = CVector::from_vec(vec![
            Complex64::new(0.6, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.3, -0.4),
        ]);
        let b = &b / Complex64::new(b.norm(), 0.0);
        let p = identity(3) - &b * b.adjoint();
        let s = singular_values(&p);
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14 && s[2] < 1e-14);
        let basis = column_space(&p);
        assert_eq!(basis.ncols(), 2);
        assert!((b.adjoint() * &basis).norm() < 1e-14);
        let (u, s, v) = thin_svd(&p);
        let d = CMatrix::from_diagonal(&CVector::from_iterator(3, s.iter().map(|&x| Complex64::new(x, 0.0))));
        assert!(max_abs_diff(&(u * d * v.adjoint()), &p) < 1e-14);
    }

    #[test]
    fn rejects_oversized_dimension() {
        assert!(check_dim(MAX_DIM).is_ok());
        assert_eq!(check_dim(MAX_DIM + 1), Err(Error::TooLarge(MAX_DIM + 1)));
    }
}
