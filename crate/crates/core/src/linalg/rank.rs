use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const SWEEP_CAP: usize = 60;

/// Singular values in descending order, by one-sided Jacobi rotations.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    // Work on columns of the taller orientation.
    let work = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let (m, n) = (work.rows(), work.cols());
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| work.column(j)).collect();

    for _ in 0..SWEEP_CAP {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotation zeroing the (p, q) entry of the 2x2 Gram matrix.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for i in 0..m {
                    let x = cp[i];
                    let y = cq[i];
                    cp[i] = x * c - y * phase.conj() * s;
                    cq[i] = x * phase * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(a: &CMatrix, tol: f64) -> Result<usize> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Empty("rank of an empty matrix"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("rank tolerance must be positive"));
    }
    let sv = singular_values(a);
    let top = sv[0];
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * top).count())
}

/// Conventional relative cutoff `1e-10 * max(rows, cols)`.
pub fn default_rank_tolerance(a: &CMatrix) -> f64 {
    1e-10 * a.rows().max(a.cols()) as f64
}

/// `cols - rank`, the dimension of the (right) null space.
pub fn null_space_dim(a: &CMatrix, tol: f64) -> Result<usize> {
    if a.cols() == 0 {
        return Ok(0);
    }
    if a.rows() == 0 {
        return Ok(a.cols());
    }
    Ok(a.cols() - numerical_rank(a, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let z = CMatrix::zeros(4, 3);
        assert_eq!(numerical_rank(&z, 1e-10).unwrap(), 0);
        assert_eq!(null_space_dim(&z, 1e-10).unwrap(), 3);
    }

    #[test]
    fn outer_product_has_rank_one() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [0.3, 1.0, -1.0];
        let a = CMatrix::from_fn(4, 3, |i, j| Complex64::new(u[i] * v[j], u[i] * v[j] * 0.5));
        assert_eq!(numerical_rank(&a, 1e-10).unwrap(), 1);
    }

    #[test]
    fn identity_has_trivial_null_space() {
        for k in 1..6 {
            assert_eq!(null_space_dim(&CMatrix::identity(k), 1e-10).unwrap(), 0);
        }
    }

    #[test]
    fn empty_matrix_is_an_error() {
        assert!(numerical_rank(&CMatrix::zeros(0, 3), 1e-10).is_err());
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = CMatrix::from_fn(3, 3, |i, j| if i == j { c([3.0, -5.0, 1.0][i]) } else { c(0.0) });
        let sv = singular_values(&a);
        for (s, e) in sv.iter().zip([5.0, 3.0, 1.0]) {
            assert!((s - e).abs() < 1e-14);
        }
    }

    #[test]
    fn wide_and_tall_agree() {
        let a = CMatrix::from_fn(3, 5, |i, j| Complex64::new((i * 5 + j) as f64 % 7.0, (i + j) as f64 * 0.1));
        let s1 = singular_values(&a);
        let s2 = singular_values(&a.adjoint());
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
