//! Small dense complex linear algebra on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest deviation from Hermitian symmetry, `max |m_ij - conj(m_ji)|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Moore–Penrose pseudo-inverse via SVD. Singular values at or below
/// `rel_tol * sigma_max` are treated as zero.
pub fn pseudo_inverse(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * smax;
    let k = svd.singular_values.len();
    let mut out = CMatrix::zeros(cols, rows);
    for i in 0..k {
        let s = svd.singular_values[i];
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let inv = Complex64::new(1.0 / s, 0.0);
        // V[:, i] * inv * U[:, i]^*
        for r in 0..cols {
            let vr = v_t[(i, r)].conj() * inv;
            for c in 0..rows {
                out[(r, c)] += vr * u[(c, i)].conj();
            }
        }
    }
    out
}

/// Solves `m x = b` for square invertible `m`.
pub fn solve(m: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    m.clone().lu().solve(b)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_hermitian_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pinv_of_invertible_is_inverse() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.5)]);
        let p = pseudo_inverse(&m, 1e-10);
        assert!(max_abs_diff(&(&p * &m), &identity(2)) < 1e-12);
        let inv = m.clone().try_inverse().unwrap();
        assert!(max_abs_diff(&p, &inv) < 1e-12);
    }

    #[test]
    fn pinv_of_tall_is_left_inverse() {
        let m = CMatrix::from_row_slice(
            3,
            2,
            &[
                c(1.0, 0.0),
                c(0.0, 1.0),
                c(2.0, -1.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(3.0, 2.0),
            ],
        );
        let p = pseudo_inverse(&m, 1e-10);
        assert_eq!(p.shape(), (2, 3));
        assert!(max_abs_diff(&(&p * &m), &identity(2)) < 1e-12);
    }

    #[test]
    fn pinv_drops_tiny_singular_values() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-14, 0.0)]);
        let p = pseudo_inverse(&m, 1e-10);
        assert!((p[(1, 1)]).norm() == 0.0);
        assert!((p[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }
}
