use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};

/// Where a batch came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchInfo {
    /// Ensemble or synthetic process name.
    pub source: String,
    pub kind: Option<EnsembleKind>,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
}

/// `M` sorted spectra of length `N`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectraBatch {
    info: BatchInfo,
    values: Vec<f64>,
    sigma: f64,
}

impl SpectraBatch {
    /// Validates shape, finiteness and per-row ordering, and computes
    /// `sigma^2 = <Tr M^2> / N` from the eigenvalue sums of squares.
    pub fn new(source: impl Into<String>, kind: Option<EnsembleKind>, seed: u64, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("spectra must have at least one level"));
        }
        if values.is_empty() {
            return Err(Error::Empty("spectra batch"));
        }
        #[allow(clippy::manual_is_multiple_of)]
        if values.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "{} values do not split into rows of length {dim}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite eigenvalue at flat index {bad}")));
        }
        for (i, row) in values.chunks_exact(dim).enumerate() {
            if row.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::invalid(format!("row {i} is not sorted ascending")));
            }
        }
        let count = values.len() / dim;
        let sum_sq: f64 = values.iter().map(|x| x * x).sum();
        let sigma = (sum_sq / (count * dim) as f64).sqrt();
        if sigma <= 0.0 {
            return Err(Error::Numerical("all eigenvalues are zero, cannot rescale".into()));
        }
        Ok(SpectraBatch {
            info: BatchInfo {
                source: source.into(),
                kind,
                dim,
                count,
                seed,
            },
            values,
            sigma,
        })
    }

    pub fn from_rows(source: impl Into<String>, kind: Option<EnsembleKind>, seed: u64, rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::Empty("spectra batch"))?;
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rows have different lengths"));
        }
        SpectraBatch::new(source, kind, seed, dim, rows.concat())
    }

    pub fn info(&self) -> &BatchInfo {
        &self.info
    }

    pub fn dim(&self) -> usize {
        self.info.dim
    }

    pub fn count(&self) -> usize {
        self.info.count
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.info.dim..(i + 1) * self.info.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.info.dim)
    }
}

/// Histogram of `eps = E / sigma` normalized to unit area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityHistogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
}

impl DensityHistogram {
    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Gaussian kernel smoothing with standard deviation `bandwidth` bins.
    pub fn smoothed(&self, bandwidth: f64) -> Vec<f64> {
        let n = self.density.len();
        let reach = (4.0 * bandwidth).ceil() as isize;
        (0..n as isize)
            .map(|i| {
                let mut acc = 0.0;
                let mut wsum = 0.0;
                for d in -reach..=reach {
                    let j = i + d;
                    if j < 0 || j >= n as isize {
                        continue;
                    }
                    let w = (-0.5 * (d as f64 / bandwidth).powi(2)).exp();
                    acc += w * self.density[j as usize];
                    wsum += w;
                }
                acc / wsum
            })
            .collect()
    }

    /// Indices of strict local maxima of the given profile.
    pub fn local_maxima(profile: &[f64]) -> Vec<usize> {
        let n = profile.len();
        (0..n)
            .filter(|&i| {
                let left = if i == 0 { f64::NEG_INFINITY } else { profile[i - 1] };
                let right = if i + 1 == n { f64::NEG_INFINITY } else { profile[i + 1] };
                profile[i] > left && profile[i] >= right && profile[i] > 0.0
            })
            .collect()
    }
}

/// Mean density of rescaled levels on a symmetric range covering all of them.
pub fn mean_density(batch: &SpectraBatch, bins: usize) -> Result<DensityHistogram> {
    if bins == 0 {
        return Err(Error::invalid("density needs at least one bin"));
    }
    let sigma = batch.sigma();
    let reach = batch.values().iter().fold(0.0f64, |m, x| m.max(x.abs())) / sigma;
    let lo = -reach;
    let width = 2.0 * reach / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in batch.values() {
        let idx = (((x / sigma) - lo) / width).floor() as isize;
        counts[idx.clamp(0, bins as isize - 1) as usize] += 1;
    }
    let total = batch.values().len() as f64;
    Ok(DensityHistogram {
        edges: (0..=bins).map(|i| lo + i as f64 * width).collect(),
        density: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
    })
}
