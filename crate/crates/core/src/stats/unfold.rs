use std::ops::Range;

use super::batch::{mean_density, DensityHistogram, SpectraBatch};
use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};

const MODE_BINS: usize = 200;
const MODE_BANDWIDTH: f64 = 3.0;

/// Unit-density spectra plus the index window used for local statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct UnfoldedSpectrum {
    dim: usize,
    values: Vec<f64>,
    window: Range<usize>,
    /// Unfolded position of the positive-side density mode.
    right_mode: Option<f64>,
}

impl UnfoldedSpectrum {
    /// Wraps already-unfolded rows (e.g. synthetic unit-density sequences).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::Empty("unfolded spectrum"))?;
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rows must be non-empty and of equal length"));
        }
        if rows.iter().any(|r| r.windows(2).any(|w| w[1] < w[0])) {
            return Err(Error::invalid("unfolded rows must be non-decreasing"));
        }
        Ok(UnfoldedSpectrum {
            dim,
            values: rows.concat(),
            window: 0..dim,
            right_mode: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn window(&self) -> Range<usize> {
        self.window.clone()
    }

    pub fn with_window(mut self, window: Range<usize>) -> Result<Self> {
        if window.start >= window.end || window.end > self.dim {
            return Err(Error::invalid(format!("window {window:?} outside 0..{}", self.dim)));
        }
        self.window = window;
        Ok(self)
    }

    pub fn right_mode(&self) -> Option<f64> {
        self.right_mode
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    /// Window part of row `i`.
    pub fn window_row(&self, i: usize) -> &[f64] {
        &self.row(i)[self.window.clone()]
    }

    /// Average nearest-neighbour gap inside the window.
    pub fn window_mean_spacing(&self) -> f64 {
        let w = self.window.len();
        if w < 2 {
            return f64::NAN;
        }
        let total: f64 = (0..self.count()).map(|i| {
            let r = self.window_row(i);
            r[w - 1] - r[0]
        }).sum();
        total / (self.count() * (w - 1)) as f64
    }
}

/// Maps every level through the ensemble-averaged counting function
/// `N(E) = (pooled rank of E) / M`.
///
/// Ties receive their mean rank and half a rank is added, so a picket
/// fence `E_j = j` unfolds to `j + 1/2` and values lie in `(0, N)`.
pub fn unfold(batch: &SpectraBatch) -> Result<UnfoldedSpectrum> {
    let m = batch.count();
    if m < 2 {
        return Err(Error::invalid(format!("unfolding needs at least 2 realizations, got {m}")));
    }
    let mut pooled = batch.values().to_vec();
    pooled.sort_by(f64::total_cmp);
    if pooled[0] == pooled[pooled.len() - 1] {
        return Err(Error::Numerical("degenerate batch: all eigenvalues are equal".into()));
    }
    let mf = m as f64;
    let values: Vec<f64> = batch
        .values()
        .iter()
        .map(|&x| {
            let below = pooled.partition_point(|&p| p < x);
            let upto = pooled.partition_point(|&p| p <= x);
            let rank = 0.5 * (below + upto - 1) as f64;
            (rank + 0.5) / mf
        })
        .collect();

    let right_mode = positive_mode(batch)?.map(|eps| {
        let x = eps * batch.sigma();
        pooled.partition_point(|&p| p < x) as f64 / mf
    });

    Ok(UnfoldedSpectrum {
        dim: batch.dim(),
        values,
        window: 0..batch.dim(),
        right_mode,
    })
}

/// Location in `eps` of the highest smoothed-density peak on `eps > 0`.
fn positive_mode(batch: &SpectraBatch) -> Result<Option<f64>> {
    let h: DensityHistogram = mean_density(batch, MODE_BINS)?;
    let smooth = h.smoothed(MODE_BANDWIDTH);
    let centers = h.centers();
    Ok(centers
        .iter()
        .zip(&smooth)
        .filter(|(c, _)| **c > 0.0)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(c, _)| *c))
}

/// Central quarter `[3N/8, 5N/8)`; for Hankel the `N/4` levels centred on
/// the right density peak.
pub fn select_window(u: &UnfoldedSpectrum, kind: Option<EnsembleKind>) -> Result<UnfoldedSpectrum> {
    let n = u.dim();
    if n < 8 {
        return Err(Error::invalid(format!("window selection needs N >= 8, got {n}")));
    }
    let width = n / 4;
    let window = if kind == Some(EnsembleKind::Hankel) {
        let centre = u
            .right_mode()
            .ok_or_else(|| Error::Numerical("no positive-side density peak found".into()))?;
        let lo = (centre.round() as isize - (width / 2) as isize).clamp(0, (n - width) as isize) as usize;
        lo..lo + width
    } else {
        3 * n / 8..3 * n / 8 + width
    };
    u.clone().with_window(window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(rows: Vec<Vec<f64>>) -> SpectraBatch {
        SpectraBatch::from_rows("t", None, 0, rows).unwrap()
    }

    #[test]
    fn picket_fence_unfolds_to_half_integers() {
        let rows = vec![(0..16).map(|j| j as f64).collect::<Vec<_>>(); 5];
        let u = unfold(&batch(rows)).unwrap();
        for i in 0..5 {
            for (j, e) in u.row(i).iter().enumerate() {
                assert!((e - (j as f64 + 0.5)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unfolding_is_monotone_and_bounded() {
        let rows: Vec<Vec<f64>> = (0..7)
            .map(|r| (0..30).map(|j| ((j as f64) * 0.37 + r as f64 * 0.11).powi(3)).collect())
            .collect();
        let u = unfold(&batch(rows)).unwrap();
        for row in u.rows() {
            assert!(row.windows(2).all(|w| w[1] >= w[0]));
            assert!(row.iter().all(|&e| e > 0.0 && e < 30.0));
        }
    }

    #[test]
    fn rejects_single_row_and_constant_batch() {
        assert!(unfold(&batch(vec![vec![0.0, 1.0]])).is_err());
        assert!(unfold(&batch(vec![vec![1.0, 1.0], vec![1.0, 1.0]])).is_err());
    }

    #[test]
    fn window_arithmetic() {
        let u = UnfoldedSpectrum::from_rows(vec![(0..1024).map(|j| j as f64 + 0.5).collect()]).unwrap();
        assert_eq!(select_window(&u, None).unwrap().window(), 384..640);
        let u = UnfoldedSpectrum::from_rows(vec![(0..8).map(|j| j as f64).collect()]).unwrap();
        assert_eq!(select_window(&u, None).unwrap().window().len(), 2);
        let tiny = UnfoldedSpectrum::from_rows(vec![vec![0.0, 1.0]]).unwrap();
        assert!(select_window(&tiny, None).is_err());
    }
}
