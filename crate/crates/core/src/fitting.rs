//! One-parameter maximum-likelihood fits of the gamma surmise and ordinary
//! least squares.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::numeric::{golden_section_max, trigamma};

/// Smallest sample accepted by [`fit_gamma`].
pub const MIN_GAMMA_SAMPLES: usize = 1000;
/// Spacings are floored here before taking logarithms.
pub const SPACING_FLOOR: f64 = 1e-12;
const SEARCH_HALF_WIDTH: f64 = 3.0;
const LOWER_LIMIT: f64 = -0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub n: usize,
    pub gamma_hat: f64,
    pub stderr: f64,
    pub log_likelihood: f64,
    pub sample_count: usize,
    /// The maximizer sits on an end of the search bracket.
    pub at_bound: bool,
}

/// Sufficient statistics of a spacing sample.
struct Suff {
    count: f64,
    sum: f64,
    sum_log: f64,
    n1: f64,
}

impl Suff {
    fn log_likelihood(&self, g: f64) -> f64 {
        let b = (g + 1.0) / self.n1;
        self.count * ((g + 1.0) * b.ln() - ln_gamma(g + 1.0)) + g * self.sum_log - b * self.sum
    }

    fn score(&self, g: f64) -> f64 {
        let b = (g + 1.0) / self.n1;
        self.count * (b.ln() + 1.0 - digamma(g + 1.0)) + self.sum_log - self.sum / self.n1
    }

    fn curvature(&self, g: f64) -> f64 {
        self.count * (1.0 / (g + 1.0) - trigamma(g + 1.0))
    }
}

/// Fits `gamma_n` of `a s^gamma exp(-b s)` with `a`, `b` tied to `gamma`
/// so the density has unit mass and mean `n + 1`.
///
/// The likelihood is concave in `gamma`. Golden-section search runs on
/// `[max(-0.9, c - 3), c + 3]` and one Newton step refines the result;
/// `center` defaults to the moment estimate `(n + 1)^2 / var - 1`. The
/// standard error is `1 / sqrt(observed information)`.
pub fn fit_gamma(spacings: &[f64], n: usize, center: Option<f64>) -> Result<GammaFit> {
    if spacings.len() < MIN_GAMMA_SAMPLES {
        return Err(Error::invalid(format!(
            "gamma fit needs at least {MIN_GAMMA_SAMPLES} samples, got {}",
            spacings.len()
        )));
    }
    if let Some(bad) = spacings.iter().find(|s| !s.is_finite() || **s < 0.0) {
        return Err(Error::invalid(format!("spacings must be finite and non-negative, found {bad}")));
    }
    let count = spacings.len() as f64;
    let sum: f64 = spacings.iter().sum();
    let sum_log: f64 = spacings.iter().map(|s| s.max(SPACING_FLOOR).ln()).sum();
    let n1 = n as f64 + 1.0;
    let suff = Suff { count, sum, sum_log, n1 };

    let center = match center {
        Some(c) => c,
        None => {
            let mean = sum / count;
            let var = spacings.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (count - 1.0);
            if var > 0.0 {
                n1 * n1 / var - 1.0
            } else {
                return Err(Error::Numerical("spacings have zero variance".into()));
            }
        }
    };
    let lo = LOWER_LIMIT.max(center - SEARCH_HALF_WIDTH);
    let hi = (center + SEARCH_HALF_WIDTH).max(lo + 1.0);
    let mut g = golden_section_max(|g| suff.log_likelihood(g), lo, hi, 1e-7);
    let curv = suff.curvature(g);
    if curv < 0.0 {
        let step = g - suff.score(g) / curv;
        if step > -1.0 && suff.log_likelihood(step) >= suff.log_likelihood(g) {
            g = step;
        }
    }
    let ll = suff.log_likelihood(g);
    if !ll.is_finite() {
        return Err(Error::Numerical(format!("non-finite log-likelihood at gamma = {g}")));
    }
    let info = -suff.curvature(g);
    let edge = 1e-4 * (hi - lo);
    Ok(GammaFit {
        n,
        gamma_hat: g,
        stderr: 1.0 / info.sqrt(),
        log_likelihood: ll,
        sample_count: spacings.len(),
        at_bound: g - lo < edge || hi - g < edge,
    })
}

/// Log-likelihood of a spacing sample under the gamma surmise.
pub fn gamma_log_likelihood(spacings: &[f64], n: usize, gamma: f64) -> f64 {
    let suff = Suff {
        count: spacings.len() as f64,
        sum: spacings.iter().sum(),
        sum_log: spacings.iter().map(|s| s.max(SPACING_FLOOR).ln()).sum(),
        n1: n as f64 + 1.0,
    };
    suff.log_likelihood(gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y have different lengths"));
    }
    if x.len() < 3 {
        return Err(Error::invalid(format!("linear fit needs at least 3 points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::invalid("x values have zero variance"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let s2 = rss / (n - 2.0);
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr: (s2 / sxx).sqrt(),
        intercept_stderr: (s2 * (1.0 / n + mx * mx / sxx)).sqrt(),
    })
}
