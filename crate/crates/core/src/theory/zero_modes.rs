//! Numerical codimension counting.
//!
//! A matrix with `n + 2` degenerate levels equals `lambda * D` with `D` the
//! identity (or the Hankel involution `d(N)`). Perturbations inside the
//! family that keep the degeneracy at first order form the null space of a
//! real linear system in the unknowns `(parameters, lambda)`:
//!
//! * identity-reachable families: `sum_i p_i B_i - lambda I = 0`, real and
//!   imaginary parts of each upper-triangle entry;
//! * Hankel: `d H + H d - 2 lambda I = 0`, whose solutions are the
//!   anticommuting perturbations plus the direction `H = lambda d` itself.

use num_complex::Complex64;

use crate::ensembles::{assemble, EnsembleKind};
use crate::error::Result;
use crate::linalg::{default_rank_tolerance, null_space_dim, CMatrix, HermitianMatrix};

/// The Hankel involution `d(N)`: 1 where `j + k = 0 mod N` (1-based).
pub fn hankel_involution(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |j, k| {
        if (j + k + 2) % dim == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn basis(kind: EnsembleKind, dim: usize) -> Result<Vec<HermitianMatrix>> {
    let len = kind.parameter_len(dim);
    (0..len)
        .map(|i| {
            let mut e = vec![0.0; len];
            e[i] = 1.0;
            assemble(kind, dim, &e)
        })
        .collect()
}

/// Real constraint matrix whose columns are the family parameters followed
/// by `lambda`, for the member of size [`EnsembleKind::degeneracy_dim`].
pub fn constraint_matrix(kind: EnsembleKind, n: usize) -> Result<CMatrix> {
    let dim = kind.degeneracy_dim(n);
    let basis = basis(kind, dim)?;
    let cols = basis.len() + 1;

    // one column per unknown, listing the linear functional's coefficients
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(cols);
    if kind == EnsembleKind::Hankel {
        let d = hankel_involution(dim);
        for b in &basis {
            let m = d.matmul(b.as_matrix()).add(&b.as_matrix().matmul(&d));
            columns.push(m.as_slice().iter().map(|z| z.re).collect());
        }
        let lam = CMatrix::identity(dim);
        columns.push(lam.as_slice().iter().map(|z| -2.0 * z.re).collect());
    } else {
        let entries = |m: &CMatrix| -> Vec<f64> {
            let mut out = Vec::with_capacity(dim * (dim + 1));
            for j in 0..dim {
                for k in j..dim {
                    out.push(m[(j, k)].re);
                    out.push(m[(j, k)].im);
                }
            }
            out
        };
        for b in &basis {
            columns.push(entries(b.as_matrix()));
        }
        let id = CMatrix::identity(dim);
        columns.push(entries(&id).into_iter().map(|x| -x).collect());
    }

    let rows = columns[0].len();
    Ok(CMatrix::from_fn(rows, cols, |i, j| Complex64::new(columns[j][i], 0.0)))
}

/// Number of (almost) zero modes, including `lambda`, for the `n`-th
/// degeneracy of the family.
pub fn count_zero_modes(kind: EnsembleKind, n: usize) -> Result<usize> {
    let a = constraint_matrix(kind, n)?;
    null_space_dim(&a, default_rank_tolerance(&a))
}
