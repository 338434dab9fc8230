//! Dense helpers: SVD kernels, canonical orthonormal bases, least squares.

use nalgebra::{DMatrix, DVector, SVD};

/// Relative threshold on singular values below which a direction counts as
/// part of the kernel.
pub const DEFAULT_RANK_TOL: f64 = 1e-7;

fn singular_threshold(s: &DVector<f64>, rank_tol: f64) -> f64 {
    let max = s.iter().copied().fold(0.0, f64::max);
    rank_tol * if max > 0.0 { max } else { 1.0 }
}

/// Orthonormal kernel basis of `m`, one vector per row of the result.
pub fn kernel_rows(m: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // pad so that the SVD returns a full n x n right factor
    let padded;
    let input = if m.nrows() < n {
        padded = {
            let mut p = DMatrix::zeros(n, n);
            p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let svd = SVD::new(input.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let thr = singular_threshold(&svd.singular_values, rank_tol);
    let rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= thr)
        .collect();
    DMatrix::from_fn(rows.len(), n, |r, c| v_t[(rows[r], c)])
}

/// Numerical rank with the same relative threshold as [`kernel_rows`].
pub fn rank(m: &DMatrix<f64>, rank_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = m.clone().singular_values();
    let thr = singular_threshold(&s, rank_tol);
    s.iter().filter(|&&x| x > thr).count()
}

/// Deterministic orthonormal basis of the row space of `span`: reduced row
/// echelon form over the column order, Gram–Schmidt in pivot order, then the
/// first coefficient above `sign_tol` of every row made positive.
pub fn canonical_basis(span: &DMatrix<f64>, sign_tol: f64) -> DMatrix<f64> {
    let (d, n) = span.shape();
    if d == 0 {
        return DMatrix::zeros(0, n);
    }
    let mut m = span.clone();
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let pivot_tol = 1e-9 * scale;
    let mut row = 0;
    for col in 0..n {
        if row == d {
            break;
        }
        let (best, val) = (row..d)
            .map(|r| (r, m[(r, col)].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= pivot_tol {
            continue;
        }
        m.swap_rows(row, best);
        let p = m[(row, col)];
        for c in 0..n {
            m[(row, c)] /= p;
        }
        for r in 0..d {
            if r != row {
                let f = m[(r, col)];
                if f != 0.0 {
                    for c in 0..n {
                        m[(r, c)] -= f * m[(row, c)];
                    }
                }
            }
        }
        row += 1;
    }
    let m = m.rows(0, row).into_owned();
    let mut q = gram_schmidt_rows(&m);
    for r in 0..q.nrows() {
        if let Some(c) = (0..n).find(|&c| q[(r, c)].abs() > sign_tol) {
            if q[(r, c)] < 0.0 {
                q.row_mut(r).neg_mut();
            }
        }
    }
    q
}

/// Modified Gram–Schmidt with one reorthogonalisation pass.
pub fn gram_schmidt_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = m.clone();
    for r in 0..q.nrows() {
        for _ in 0..2 {
            for s in 0..r {
                let proj = q.row(r).dot(&q.row(s));
                let qs = q.row(s).into_owned();
                let mut row = q.row_mut(r);
                row -= qs * proj;
            }
        }
        let norm = q.row(r).norm();
        q.row_mut(r).unscale_mut(norm);
    }
    q
}

/// `min_x ||w x - b||` via the column space of `w`.
pub fn lstsq_residual(w: &DMatrix<f64>, b: &DVector<f64>, rank_tol: f64) -> f64 {
    if w.ncols() == 0 || w.nrows() == 0 {
        return b.norm();
    }
    let svd = SVD::new(w.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let thr = singular_threshold(&svd.singular_values, rank_tol);
    let mut r = b.clone();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > thr {
            let col = u.column(i);
            let c = col.dot(b);
            r.axpy(-c, &col, 1.0);
        }
    }
    r.norm()
}

/// `max |m - I|`.
pub fn identity_residual(m: &DMatrix<f64>) -> f64 {
    let mut res = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            res = res.max((m[(i, j)] - target).abs());
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = kernel_rows(&m, DEFAULT_RANK_TOL);
        assert_eq!(k.nrows(), 2);
        assert!((&k * m.transpose()).amax() < 1e-12);
        assert!(identity_residual(&(&k * k.transpose())) < 1e-12);
    }

    #[test]
    fn kernel_without_constraints_is_everything() {
        let m = DMatrix::<f64>::zeros(0, 4);
        assert_eq!(kernel_rows(&m, DEFAULT_RANK_TOL), DMatrix::identity(4, 4));
        let z = DMatrix::<f64>::zeros(2, 3);
        assert_eq!(kernel_rows(&z, DEFAULT_RANK_TOL).nrows(), 3);
    }

    #[test]
    fn canonical_basis_is_span_invariant() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, -1.0, 0.0, 1.0, 1.0, 1.0]);
        // a different spanning set for the same space
        let mix = DMatrix::from_row_slice(2, 2, &[0.3, -2.0, 1.5, 0.7]);
        let b = &mix * &a;
        let ca = canonical_basis(&a, 1e-9);
        let cb = canonical_basis(&b, 1e-9);
        assert!((&ca - &cb).amax() < 1e-12);
        assert!(identity_residual(&(&ca * ca.transpose())) < 1e-12);
        for r in 0..ca.nrows() {
            let first = ca.row(r).iter().copied().find(|x| x.abs() > 1e-9).unwrap();
            assert!(first > 0.0);
        }
    }

    #[test]
    fn lstsq_residual_of_orthogonal_target() {
        let w = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = DVector::from_row_slice(&[0.0, 3.0, 4.0]);
        assert!((lstsq_residual(&w, &b, DEFAULT_RANK_TOL) - 5.0).abs() < 1e-12);
        let b2 = DVector::from_row_slice(&[2.0, 0.0, 0.0]);
        assert!(lstsq_residual(&w, &b2, DEFAULT_RANK_TOL) < 1e-12);
    }

    #[test]
    fn rank_counts() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(rank(&m, DEFAULT_RANK_TOL), 1);
    }
}
