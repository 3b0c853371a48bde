//! Reference laws for spacing distributions and two-point statistics.

mod form_factor;
mod plasma;
mod zero_modes;

pub use form_factor::{compressibility, theoretical_form_factor};
pub use plasma::{plasma_form_factor, plasma_pn, PlasmaModel};
pub use zero_modes::{constraint_matrix, count_zero_modes, hankel_involution};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};

/// Linear growth `gamma_n = p n + k` of the repulsion exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentLaw {
    pub p: f64,
    pub k: f64,
}

impl ExponentLaw {
    pub fn new(p: f64, k: f64) -> Self {
        ExponentLaw { p, k }
    }

    /// The law of a structured family; `None` for the Gaussian baselines,
    /// whose exponents grow quadratically.
    pub fn for_kind(kind: EnsembleKind) -> Option<ExponentLaw> {
        use EnsembleKind::*;
        let (p, k) = match kind {
            ToeplitzReal => (1.0, 0.0),
            ToeplitzComplex | ThSpecialPlus | ThSpecialMinus => (2.0, 1.0),
            Hankel | ThIndependentReal => (3.0, 1.0),
            ThIndependentComplex => (4.0, 2.0),
            Goe | Gue => return None,
        };
        Some(ExponentLaw { p, k })
    }

    pub fn gamma(&self, n: usize) -> f64 {
        self.p * n as f64 + self.k
    }
}

/// Dyson index of the Gaussian baselines.
fn baseline_beta(kind: EnsembleKind) -> Option<f64> {
    match kind {
        EnsembleKind::Goe => Some(1.0),
        EnsembleKind::Gue => Some(2.0),
        _ => None,
    }
}

/// Exponent of the Wigner–Dyson surmise `s^gamma exp(-b s^2)` of order `n`.
pub fn wigner_dyson_exponent(beta: f64, n: usize) -> f64 {
    let n = n as f64;
    beta * (n + 2.0) * (n + 1.0) / 2.0 + n
}

/// Small-`s` exponent of `P_n(s)` for the family.
pub fn gamma_exponent(kind: EnsembleKind, n: usize) -> f64 {
    match (ExponentLaw::for_kind(kind), baseline_beta(kind)) {
        (Some(law), _) => law.gamma(n),
        (None, Some(beta)) => wigner_dyson_exponent(beta, n),
        (None, None) => unreachable!("every kind has either a linear law or a Dyson index"),
    }
}

/// `P_n(s) = a s^gamma exp(-b s)` with unit norm and mean `n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSurmise {
    pub n: usize,
    pub gamma_n: f64,
    pub a_n: f64,
    pub b_n: f64,
}

impl GammaSurmise {
    pub fn new(n: usize, gamma_n: f64) -> Result<Self> {
        if gamma_n.is_nan() || gamma_n <= -1.0 {
            return Err(Error::invalid(format!(
                "gamma exponent must exceed -1 for a normalizable density, got {gamma_n}"
            )));
        }
        let b = (gamma_n + 1.0) / (n as f64 + 1.0);
        Ok(GammaSurmise {
            n,
            gamma_n,
            a_n: Self::ln_a(gamma_n, b).exp(),
            b_n: b,
        })
    }

    pub fn for_kind(kind: EnsembleKind, n: usize) -> Result<Self> {
        Self::new(n, gamma_exponent(kind, n))
    }

    fn ln_a(gamma_n: f64, b: f64) -> f64 {
        (gamma_n + 1.0) * b.ln() - ln_gamma(gamma_n + 1.0)
    }

    /// `ln P_n(s)`; stays finite where `a_n` alone would overflow.
    pub fn ln_pdf(&self, s: f64) -> f64 {
        Self::ln_a(self.gamma_n, self.b_n) + self.gamma_n * s.ln() - self.b_n * s
    }

    pub fn pdf(&self, s: f64) -> f64 {
        gamma_pdf(self, s)
    }

    /// Cumulative distribution, the regularized lower incomplete gamma
    /// function `P(gamma + 1, b s)`.
    pub fn cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        gamma_lr(self.gamma_n + 1.0, self.b_n * s)
    }
}

/// Density of the gamma surmise at `s` (0 for `s < 0`).
pub fn gamma_pdf(surmise: &GammaSurmise, s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    if s == 0.0 {
        let g = surmise.gamma_n;
        return if g > 0.0 {
            0.0
        } else if g == 0.0 {
            surmise.a_n
        } else {
            f64::INFINITY
        };
    }
    surmise.ln_pdf(s).exp()
}

/// `P_n(s) = a s^gamma exp(-b s^2)` with Gaussian tail, normalized with
/// unit mass and mean `n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerDysonSurmise {
    pub beta: u8,
    pub n: usize,
    pub gamma_n: f64,
    pub a_n: f64,
    pub b_n: f64,
}

impl WignerDysonSurmise {
    pub fn new(beta: u8, n: usize) -> Result<Self> {
        if !matches!(beta, 1 | 2 | 4) {
            return Err(Error::invalid(format!("Dyson index must be 1, 2 or 4, got {beta}")));
        }
        let g = wigner_dyson_exponent(beta as f64, n);
        let sqrt_b = (ln_gamma(g / 2.0 + 1.0) - ln_gamma((g + 1.0) / 2.0)).exp() / (n as f64 + 1.0);
        let b = sqrt_b * sqrt_b;
        let ln_a = std::f64::consts::LN_2 + (g + 1.0) / 2.0 * b.ln() - ln_gamma((g + 1.0) / 2.0);
        Ok(WignerDysonSurmise {
            beta,
            n,
            gamma_n: g,
            a_n: ln_a.exp(),
            b_n: b,
        })
    }

    pub fn pdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        (self.a_n.ln() + self.gamma_n * s.ln() - self.b_n * s * s).exp()
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        gamma_lr((self.gamma_n + 1.0) / 2.0, self.b_n * s * s)
    }
}

pub fn wigner_dyson_pdf(beta: u8, n: usize, s: f64) -> Result<f64> {
    Ok(WignerDysonSurmise::new(beta, n)?.pdf(s))
}
