//! Seeded generators for the structured random matrix families.
//!
//! Every family is a linear map from a vector of real parameters to a
//! Hermitian matrix ([`assemble`]). Sampling draws that parameter vector
//! i.i.d. N(0, 1); zero-mode counting reuses the same map to obtain a basis.
//!
//! Index conventions: formulas in the literature use 1-based `m, n`. Here
//! rows and columns are 0-based, so a Toeplitz entry `(i, j)` is `t_{i-j}`
//! and a Hankel entry is `h_{i+j+2}`; Hankel parameters are stored in the
//! order `h_2, h_3, ..., h_{2N}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;

/// Name of the generator recorded in run manifests.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9): seed_from_u64(seed), stream = realization index";
/// Name of the Gaussian sampler recorded in run manifests.
pub const GAUSSIAN_SAMPLER: &str = "rand_distr::StandardNormal (ziggurat)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    ToeplitzReal,
    ToeplitzComplex,
    Hankel,
    ThSpecialPlus,
    ThSpecialMinus,
    ThIndependentReal,
    ThIndependentComplex,
    Goe,
    Gue,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 9] = [
        EnsembleKind::ToeplitzReal,
        EnsembleKind::ToeplitzComplex,
        EnsembleKind::Hankel,
        EnsembleKind::ThSpecialPlus,
        EnsembleKind::ThSpecialMinus,
        EnsembleKind::ThIndependentReal,
        EnsembleKind::ThIndependentComplex,
        EnsembleKind::Goe,
        EnsembleKind::Gue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::ToeplitzReal => "toeplitz-real",
            EnsembleKind::ToeplitzComplex => "toeplitz-complex",
            EnsembleKind::Hankel => "hankel",
            EnsembleKind::ThSpecialPlus => "th-special-plus",
            EnsembleKind::ThSpecialMinus => "th-special-minus",
            EnsembleKind::ThIndependentReal => "th-independent-real",
            EnsembleKind::ThIndependentComplex => "th-independent-complex",
            EnsembleKind::Goe => "goe",
            EnsembleKind::Gue => "gue",
        }
    }

    /// Whether generated matrices have complex off-diagonal entries.
    pub fn is_complex(self) -> bool {
        matches!(
            self,
            EnsembleKind::ToeplitzComplex | EnsembleKind::ThIndependentComplex | EnsembleKind::Gue
        )
    }

    /// Matrix size used for the `n`-th spacing analysis: `n + 2`, except
    /// Hankel which needs `2n + 2` to host `n + 2` near-degenerate levels.
    pub fn degeneracy_dim(self, n: usize) -> usize {
        match self {
            EnsembleKind::Hankel => 2 * n + 2,
            _ => n + 2,
        }
    }

    /// Number of real parameters of an `dim x dim` member.
    pub fn parameter_len(self, dim: usize) -> usize {
        match self {
            EnsembleKind::ToeplitzReal => dim,
            EnsembleKind::ToeplitzComplex => 2 * dim - 1,
            EnsembleKind::Hankel => 2 * dim - 1,
            EnsembleKind::ThSpecialPlus | EnsembleKind::ThSpecialMinus => 2 * dim,
            EnsembleKind::ThIndependentReal => dim + 2 * dim - 1,
            EnsembleKind::ThIndependentComplex => 2 * dim - 1 + 2 * dim - 1,
            EnsembleKind::Goe => dim * (dim + 1) / 2,
            EnsembleKind::Gue => dim * dim,
        }
    }

    /// Asymptotic `<Tr M^2> / N^2`, i.e. the density rescaling `sigma^2 / N`.
    pub fn variance_per_dim(self) -> Option<f64> {
        match self {
            EnsembleKind::ToeplitzReal | EnsembleKind::Hankel => Some(1.0),
            EnsembleKind::ToeplitzComplex | EnsembleKind::ThIndependentReal => Some(2.0),
            EnsembleKind::ThIndependentComplex => Some(3.0),
            _ => None,
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnsembleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = EnsembleKind::ALL.iter().map(|k| k.name()).collect();
                Error::invalid(format!("unknown ensemble '{s}', expected one of {}", names.join(", ")))
            })
    }
}

/// Identity of one random matrix: `(seed, realization_index)` fixes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub seed: u64,
    pub realization_index: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind,
            dim,
            seed,
            realization_index: 0,
        }
    }

    pub fn realization(self, index: u64) -> Self {
        EnsembleSpec {
            realization_index: index,
            ..self
        }
    }

    /// Independent stream for this realization.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.realization_index);
        rng
    }
}

/// i.i.d. standard normal parameter vector for `spec`.
pub fn generate_parameters(spec: &EnsembleSpec) -> Vec<f64> {
    let mut rng = spec.rng();
    (0..spec.kind.parameter_len(spec.dim))
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Samples one matrix of the requested family.
pub fn generate(spec: &EnsembleSpec) -> Result<HermitianMatrix> {
    if spec.dim < 2 {
        return Err(Error::invalid(format!("matrix dimension must be at least 2, got {}", spec.dim)));
    }
    assemble(spec.kind, spec.dim, &generate_parameters(spec))
}

/// Builds the `dim x dim` member of `kind` with the given real parameters.
///
/// Parameter layouts:
/// * Toeplitz: `t_0, t_1, ..., t_{N-1}`; complex variant interleaves
///   `Re t_k, Im t_k` for `k >= 1` (`t_0` stays real, `t_{-k} = conj t_k`).
/// * Hankel: `h_2, ..., h_{2N}`.
/// * Special T +/- H: `t_0, ..., t_{2N-1}`, entry `t_{|i-j|} +/- t_{i+j+1}`
///   (0-based, i.e. `t_{i+j-1}` in 1-based indices).
/// * Independent T + H: Toeplitz block followed by the Hankel block.
/// * GOE: upper triangle row by row. GUE: diagonal first, then `Re, Im` of
///   the strict upper triangle row by row.
pub fn assemble(kind: EnsembleKind, dim: usize, params: &[f64]) -> Result<HermitianMatrix> {
    let expected = kind.parameter_len(dim);
    if params.len() != expected {
        return Err(Error::invalid(format!(
            "{kind} of size {dim} takes {expected} parameters, got {}",
            params.len()
        )));
    }
    let real = |x: f64| Complex64::new(x, 0.0);
    let m = match kind {
        EnsembleKind::ToeplitzReal => HermitianMatrix::from_upper(dim, |j, k| real(params[k - j])),
        EnsembleKind::ToeplitzComplex => {
            let t = toeplitz_symbols(dim, params);
            // upper entry (j, k), j < k, is t_{j-k} = conj(t_{k-j})
            HermitianMatrix::from_upper(dim, |j, k| t[k - j].conj())
        }
        EnsembleKind::Hankel => HermitianMatrix::from_upper(dim, |j, k| real(params[j + k])),
        EnsembleKind::ThSpecialPlus | EnsembleKind::ThSpecialMinus => {
            let eta = if kind == EnsembleKind::ThSpecialPlus { 1.0 } else { -1.0 };
            HermitianMatrix::from_upper(dim, |j, k| real(params[k - j] + eta * params[j + k + 1]))
        }
        EnsembleKind::ThIndependentReal => {
            let (t, h) = params.split_at(dim);
            HermitianMatrix::from_upper(dim, |j, k| real(t[k - j] + h[j + k]))
        }
        EnsembleKind::ThIndependentComplex => {
            let (tp, h) = params.split_at(2 * dim - 1);
            let t = toeplitz_symbols(dim, tp);
            HermitianMatrix::from_upper(dim, |j, k| t[k - j].conj() + h[j + k])
        }
        EnsembleKind::Goe => {
            let mut idx = vec![0usize; dim];
            let mut acc = 0;
            for (j, slot) in idx.iter_mut().enumerate() {
                *slot = acc;
                acc += dim - j;
            }
            HermitianMatrix::from_upper(dim, |j, k| real(params[idx[j] + (k - j)]))
        }
        EnsembleKind::Gue => {
            let (diag, off) = params.split_at(dim);
            let mut idx = vec![0usize; dim];
            let mut acc = 0;
            for (j, slot) in idx.iter_mut().enumerate() {
                *slot = acc;
                acc += dim - j - 1;
            }
            HermitianMatrix::from_upper(dim, |j, k| {
                if j == k {
                    real(diag[j])
                } else {
                    let p = 2 * (idx[j] + (k - j - 1));
                    Complex64::new(off[p], off[p + 1])
                }
            })
        }
    };
    Ok(m)
}

/// `t_0, ..., t_{N-1}` from the interleaved complex Toeplitz layout.
fn toeplitz_symbols(dim: usize, params: &[f64]) -> Vec<Complex64> {
    let mut t = Vec::with_capacity(dim);
    t.push(Complex64::new(params[0], 0.0));
    for k in 1..dim {
        t.push(Complex64::new(params[2 * k - 1], params[2 * k]));
    }
    t
}

/// Total independent real parameters `N_t` of the member used for the
/// `n`-th spacing analysis (size [`EnsembleKind::degeneracy_dim`]).
pub fn parameter_count(kind: EnsembleKind, n: usize) -> usize {
    kind.parameter_len(kind.degeneracy_dim(n))
}
