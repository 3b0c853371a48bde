use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::unfold::UnfoldedSpectrum;
use crate::error::{Error, Result};

pub const DEFAULT_BIN_WIDTH: f64 = 0.05;
pub const PLACEMENTS_PER_ROW: usize = 50;

/// Empirical `P_n(s)` on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingHistogram {
    pub n: usize,
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub sample_count: usize,
    /// Samples beyond the last edge, excluded from the densities.
    pub overflow: usize,
}

impl SpacingHistogram {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Gaps `e_{j+n+1} - e_j` for every window index `j` of every row (the
/// partner level may lie past the window edge).
pub fn spacings(u: &UnfoldedSpectrum, n: usize) -> Vec<f64> {
    let w = u.window();
    let mut out = Vec::with_capacity(u.count() * w.len());
    for row in u.rows() {
        for j in w.clone() {
            if let Some(&far) = row.get(j + n + 1) {
                out.push(far - row[j]);
            }
        }
    }
    out
}

fn histogram(samples: &[f64], n: usize, bin_width: f64, upper: f64) -> SpacingHistogram {
    let bins = (upper / bin_width).round() as usize;
    let mut counts = vec![0usize; bins];
    let mut overflow = 0;
    for &s in samples {
        let idx = (s / bin_width).floor();
        if idx >= 0.0 && (idx as usize) < bins {
            counts[idx as usize] += 1;
        } else {
            overflow += 1;
        }
    }
    let kept = (samples.len() - overflow).max(1) as f64;
    SpacingHistogram {
        n,
        bin_edges: (0..=bins).map(|i| i as f64 * bin_width).collect(),
        densities: counts.iter().map(|&c| c as f64 / (kept * bin_width)).collect(),
        sample_count: samples.len(),
        overflow,
    }
}

/// Histograms of `P_0 ... P_{n_max}` on `[0, 4 (n_max + 1)]`.
pub fn spacing_distributions(u: &UnfoldedSpectrum, n_max: usize, bin_width: f64) -> Result<Vec<SpacingHistogram>> {
    if u.window().len() <= n_max + 1 {
        return Err(Error::invalid(format!(
            "window of {} levels is too short for n_max = {n_max}",
            u.window().len()
        )));
    }
    if bin_width.is_nan() || bin_width <= 0.0 {
        return Err(Error::invalid("bin width must be positive"));
    }
    let upper = 4.0 * (n_max + 1) as f64;
    (0..=n_max)
        .map(|n| {
            let s = spacings(u, n);
            if s.is_empty() {
                return Err(Error::Empty("spacing sample"));
            }
            Ok(histogram(&s, n, bin_width, upper))
        })
        .collect()
}

/// Two-point function `R_2(s)` by direct pair counting: for each window
/// level, the density of levels at distance `s` to its right.
pub fn pair_correlation(u: &UnfoldedSpectrum, s_max: f64, bin_width: f64) -> Result<SpacingHistogram> {
    let w = u.window();
    if w.is_empty() {
        return Err(Error::Empty("window"));
    }
    let bins = (s_max / bin_width).round() as usize;
    let mut counts = vec![0usize; bins];
    let mut refs = 0usize;
    for row in u.rows() {
        for j in w.clone() {
            refs += 1;
            for &e in &row[j + 1..] {
                let idx = ((e - row[j]) / bin_width).floor() as usize;
                if idx >= bins {
                    break;
                }
                counts[idx] += 1;
            }
        }
    }
    Ok(SpacingHistogram {
        n: usize::MAX,
        bin_edges: (0..=bins).map(|i| i as f64 * bin_width).collect(),
        densities: counts.iter().map(|&c| c as f64 / (refs as f64 * bin_width)).collect(),
        sample_count: refs,
        overflow: 0,
    })
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("KS sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberVariancePoint {
    pub l: f64,
    pub sigma2: f64,
    pub mean_count: f64,
}

/// `Sigma^2(L)`: variance of the number of levels in `[x, x + L)` over
/// [`PLACEMENTS_PER_ROW`] uniform placements per row inside the window.
/// Each row uses its own RNG stream, so results do not depend on threads.
pub fn number_variance(u: &UnfoldedSpectrum, l_grid: &[f64], seed: u64) -> Result<Vec<NumberVariancePoint>> {
    if l_grid.is_empty() {
        return Err(Error::Empty("L grid"));
    }
    let w = u.window();
    let (a, b) = (w.start as f64, w.end as f64);
    let limit = (b - a) / 4.0;
    if let Some(bad) = l_grid.iter().find(|&&l| !(l > 0.0 && l <= limit)) {
        return Err(Error::invalid(format!(
            "L = {bad} outside (0, {limit}], a quarter of the window"
        )));
    }
    let per_row: Vec<Vec<(f64, f64)>> = (0..u.count())
        .into_par_iter()
        .map(|i| {
            let row = u.row(i);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            l_grid
                .iter()
                .map(|&l| {
                    let (mut s1, mut s2) = (0.0, 0.0);
                    for _ in 0..PLACEMENTS_PER_ROW {
                        let x = rng.random_range(a..b - l);
                        let c = (row.partition_point(|&e| e < x + l) - row.partition_point(|&e| e < x)) as f64;
                        s1 += c;
                        s2 += c * c;
                    }
                    (s1, s2)
                })
                .collect()
        })
        .collect();
    let total = (u.count() * PLACEMENTS_PER_ROW) as f64;
    Ok(l_grid
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let (s1, s2) = per_row.iter().fold((0.0, 0.0), |acc, r| (acc.0 + r[k].0, acc.1 + r[k].1));
            let mean = s1 / total;
            NumberVariancePoint {
                l,
                sigma2: s2 / total - mean * mean,
                mean_count: mean,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn picket(rows: usize, n: usize) -> UnfoldedSpectrum {
        UnfoldedSpectrum::from_rows(vec![(0..n).map(|j| j as f64 + 0.5).collect(); rows]).unwrap()
    }

    #[test]
    fn picket_fence_is_a_point_mass() {
        let u = picket(3, 64).with_window(16..48).unwrap();
        let hs = spacing_distributions(&u, 3, DEFAULT_BIN_WIDTH).unwrap();
        for h in &hs {
            let mass: f64 = h.densities.iter().sum::<f64>() * h.bin_width();
            assert!((mass - 1.0).abs() < 1e-12);
            let peak = h.densities.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            let target = (h.n + 1) as f64;
            assert!(h.bin_edges[peak] <= target && target < h.bin_edges[peak + 1]);
            assert_eq!(h.densities.iter().filter(|&&d| d > 0.0).count(), 1);
        }
    }

    #[test]
    fn picket_fence_number_variance_is_small() {
        let u = picket(20, 256).with_window(64..192).unwrap();
        let nv = number_variance(&u, &[1.0, 2.5, 10.0, 32.0], 9).unwrap();
        for p in nv {
            assert!(p.sigma2 <= 0.3);
            assert!((p.mean_count - p.l).abs() < 0.02 * p.l);
        }
    }

    #[test]
    fn number_variance_rejects_long_intervals() {
        let u = picket(2, 64).with_window(16..48).unwrap();
        assert!(number_variance(&u, &[9.0], 0).is_err());
        assert!(number_variance(&u, &[], 0).is_err());
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let s: Vec<f64> = (0..n).map(|i| -(1.0 - (i as f64 + 0.5) / n as f64).ln()).collect();
        let d = ks_distance(&s, |x| 1.0 - (-x).exp()).unwrap();
        assert!(d <= 0.5 / n as f64 + 1e-12);
    }

    #[test]
    fn window_too_short() {
        let u = picket(2, 16).with_window(4..6).unwrap();
        assert!(spacing_distributions(&u, 1, 0.05).is_err());
    }
}
