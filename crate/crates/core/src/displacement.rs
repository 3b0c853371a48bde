//! Displacement operators built from the down-shift `Z` (`Z_{jk} = 1` iff
//! `j - k = 1`). Products with `Z` are index shifts; `Z` is never stored.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn square(m: &CMatrix) -> Result<usize> {
    if m.rows() != m.cols() {
        return Err(Error::invalid(format!("expected a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    Ok(m.rows())
}

/// `(Z M)_{jk} = M_{j-1,k}`.
fn shift_down(m: &CMatrix, j: usize, k: usize) -> Complex64 {
    if j == 0 {
        ZERO
    } else {
        m[(j - 1, k)]
    }
}

/// `(M Z^T)_{jk} = M_{j,k-1}`.
fn shift_right(m: &CMatrix, j: usize, k: usize) -> Complex64 {
    if k == 0 {
        ZERO
    } else {
        m[(j, k - 1)]
    }
}

/// `(Z^T M)_{jk} = M_{j+1,k}`.
fn shift_up(m: &CMatrix, j: usize, k: usize) -> Complex64 {
    if j + 1 == m.rows() {
        ZERO
    } else {
        m[(j + 1, k)]
    }
}

/// `(M Z)_{jk} = M_{j,k+1}`.
fn shift_left(m: &CMatrix, j: usize, k: usize) -> Complex64 {
    if k + 1 == m.cols() {
        ZERO
    } else {
        m[(j, k + 1)]
    }
}

pub fn is_toeplitz(m: &CMatrix) -> bool {
    (1..m.rows()).all(|j| (1..m.cols()).all(|k| m[(j, k)] == m[(j - 1, k - 1)]))
}

pub fn is_hankel(m: &CMatrix) -> bool {
    (1..m.rows()).all(|j| (0..m.cols() - 1).all(|k| m[(j, k)] == m[(j - 1, k + 1)]))
}

/// `T - Z T Z^T`, non-zero only in the first row and column.
pub fn toeplitz_displacement(t: &CMatrix) -> Result<CMatrix> {
    let n = square(t)?;
    if !is_toeplitz(t) {
        return Err(Error::invalid("matrix is not Toeplitz"));
    }
    Ok(CMatrix::from_fn(n, n, |j, k| {
        let zt = if j == 0 || k == 0 { ZERO } else { t[(j - 1, k - 1)] };
        t[(j, k)] - zt
    }))
}

/// `Z H - H Z^T`, non-zero only in the first row and column.
pub fn hankel_displacement(h: &CMatrix) -> Result<CMatrix> {
    let n = square(h)?;
    if !is_hankel(h) {
        return Err(Error::invalid("matrix is not Hankel"));
    }
    Ok(CMatrix::from_fn(n, n, |j, k| shift_down(h, j, k) - shift_right(h, j, k)))
}

/// `A M - M A` with `A = Z + Z^T`.
pub fn th_displacement(m: &CMatrix) -> Result<CMatrix> {
    let n = square(m)?;
    Ok(CMatrix::from_fn(n, n, |j, k| {
        shift_down(m, j, k) + shift_up(m, j, k) - shift_right(m, j, k) - shift_left(m, j, k)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{generate, EnsembleKind, EnsembleSpec};
    use crate::linalg::numerical_rank;

    fn rank(m: &CMatrix) -> usize {
        numerical_rank(m, 1e-10 * m.rows() as f64).unwrap()
    }

    fn sample(kind: EnsembleKind, n: usize, seed: u64) -> CMatrix {
        generate(&EnsembleSpec::new(kind, n, seed)).unwrap().into_matrix()
    }

    fn dense_shift(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |j, k| if j == k + 1 { Complex64::new(1.0, 0.0) } else { ZERO })
    }

    #[test]
    fn shift_is_nilpotent() {
        let z = dense_shift(5);
        let mut p = z.clone();
        for _ in 0..4 {
            p = p.matmul(&z);
        }
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn index_shifts_match_dense_products() {
        let n = 7;
        let z = dense_shift(n);
        let a = z.add(&z.adjoint());
        let m = sample(EnsembleKind::ThIndependentComplex, n, 3);
        let dense = a.matmul(&m).sub(&m.matmul(&a));
        assert!(th_displacement(&m).unwrap().sub(&dense).max_abs() < 1e-12);
        let t = sample(EnsembleKind::ToeplitzComplex, n, 4);
        let dense = t.sub(&z.matmul(&t).matmul(&z.adjoint()));
        assert!(toeplitz_displacement(&t).unwrap().sub(&dense).max_abs() < 1e-12);
        let h = sample(EnsembleKind::Hankel, n, 5);
        let dense = z.matmul(&h).sub(&h.matmul(&z.adjoint()));
        assert!(hankel_displacement(&h).unwrap().sub(&dense).max_abs() < 1e-12);
    }

    #[test]
    fn toeplitz_examples() {
        let t = sample(EnsembleKind::ToeplitzComplex, 8, 1);
        let d = toeplitz_displacement(&t).unwrap();
        assert!(rank(&d) <= 2);
        for j in 1..8 {
            for k in 1..8 {
                assert_eq!(d[(j, k)], ZERO);
            }
        }
        let id = toeplitz_displacement(&CMatrix::identity(8)).unwrap();
        assert_eq!(id[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(rank(&id), 1);
        assert_eq!(numerical_rank(&toeplitz_displacement(&CMatrix::zeros(8, 8)).unwrap(), 1e-9).unwrap(), 0);
        assert!(toeplitz_displacement(&sample(EnsembleKind::Hankel, 8, 1)).is_err());
    }

    #[test]
    fn hankel_examples() {
        let h = sample(EnsembleKind::Hankel, 8, 2);
        let d = hankel_displacement(&h).unwrap();
        assert!(rank(&d) <= 2);
        assert_eq!(d[(0, 0)], ZERO);
        let c = CMatrix::from_fn(8, 8, |_, _| Complex64::new(2.5, 0.0));
        let dc = hankel_displacement(&c).unwrap();
        assert!(rank(&dc) <= 2);
        // first row -h, first column +h: rows proportional
        for k in 1..8 {
            assert_eq!(dc[(0, k)], Complex64::new(-2.5, 0.0));
            assert_eq!(dc[(k, 0)], Complex64::new(2.5, 0.0));
        }
        assert!(hankel_displacement(&sample(EnsembleKind::ToeplitzReal, 8, 2)).is_err());
    }

    #[test]
    fn th_examples() {
        let m = sample(EnsembleKind::ThIndependentComplex, 8, 3);
        assert!(rank(&th_displacement(&m).unwrap()) <= 4);
        let t = sample(EnsembleKind::ToeplitzComplex, 8, 3);
        let d = th_displacement(&t).unwrap();
        for j in 1..7 {
            for k in 1..7 {
                assert!(d[(j, k)].norm() < 1e-15);
            }
        }
        // (1,1) entry is t_1 - t_{-1} = 2 i Im t_1 for Hermitian T (t_1 = T[1][0])
        let t1 = t[(1, 0)];
        assert!((d[(0, 0)] - (t1 - t1.conj())).norm() < 1e-15);
        assert_eq!(rank(&th_displacement(&CMatrix::identity(8)).unwrap()), 0);
    }

    #[test]
    fn linearity() {
        let a = sample(EnsembleKind::ThIndependentReal, 8, 4);
        let b = sample(EnsembleKind::ThSpecialPlus, 8, 5);
        let lhs = th_displacement(&a.add(&b)).unwrap();
        let rhs = th_displacement(&a).unwrap().add(&th_displacement(&b).unwrap());
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }
}
