use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::unfold::UnfoldedSpectrum;
use crate::error::{Error, Result};
use crate::fitting::linear_fit;

/// Rows summed per parallel task; fixed so the reduction order never
/// depends on the number of worker threads.
const ROW_CHUNK: usize = 32;
/// Phases are recomputed exactly after this many recurrence steps.
const RESYNC_STEPS: usize = 64;

/// Level weights inside the sum `sum_j w_j exp(2 pi i e_j tau)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Taper {
    /// `w_j = 1`, normalized by the number of levels.
    #[default]
    Flat,
    /// Gaussian centred on the window midpoint with standard deviation of
    /// half the window length, normalized by `<sum w_j^2>`. Suppresses the
    /// spectral-edge leakage that dominates small `tau`.
    Gaussian,
}

/// Which levels enter the sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelRange {
    #[default]
    Full,
    Window,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormFactorOptions {
    pub taper: Taper,
    pub levels: LevelRange,
}

impl FormFactorOptions {
    /// Gaussian taper over all levels, the setting used for compressibility.
    pub const TAPERED: FormFactorOptions = FormFactorOptions { taper: Taper::Gaussian, levels: LevelRange::Full };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormFactorCurve {
    pub tau: Vec<f64>,
    pub k: Vec<f64>,
    pub realizations: usize,
    pub dim: usize,
    /// Number of levels the weighted sum effectively spans, `(sum w)^2 / sum w^2`.
    pub effective_length: f64,
    pub options: FormFactorOptions,
}

/// `min, min + step, ..., max` (inclusive up to rounding).
pub fn uniform_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !min.is_finite() || !max.is_finite() || step.is_nan() || step <= 0.0 || max < min {
        return Err(Error::invalid(format!("bad grid {min}..{max} step {step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| min + k as f64 * step).collect())
}

fn uniform_step(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    let uniform = grid
        .iter()
        .enumerate()
        .all(|(k, &t)| (t - (grid[0] + k as f64 * step)).abs() <= 1e-9 * step.abs().max(1e-300));
    (uniform && step > 0.0).then_some(step)
}

/// `K(tau) = <|sum_j w_j exp(2 pi i e_j tau)|^2> / <sum_j w_j^2>` averaged
/// over rows. With the default options this is the plain full-spectrum
/// estimator `(1/N) <|sum_j exp(2 pi i e_j tau)|^2>`.
pub fn empirical_form_factor(u: &UnfoldedSpectrum, tau_grid: &[f64], options: FormFactorOptions) -> Result<FormFactorCurve> {
    if tau_grid.is_empty() {
        return Err(Error::Empty("tau grid"));
    }
    let window = u.window();
    let range = match options.levels {
        LevelRange::Full => 0..u.dim(),
        LevelRange::Window => window.clone(),
    };
    let centre = 0.5 * (window.start + window.end) as f64;
    let width = 0.5 * window.len() as f64;
    let weight = |e: f64| match options.taper {
        Taper::Flat => 1.0,
        Taper::Gaussian => (-0.5 * ((e - centre) / width).powi(2)).exp(),
    };
    let step = uniform_step(tau_grid);
    let t = tau_grid.len();

    let row_sums = |i: usize| -> (Vec<f64>, f64, f64) {
        let levels = &u.row(i)[range.clone()];
        let w: Vec<f64> = levels.iter().map(|&e| weight(e)).collect();
        let mut out = vec![0.0; t];
        match step {
            Some(dt) => {
                let rot: Vec<Complex64> = levels.iter().map(|&e| Complex64::from_polar(1.0, 2.0 * PI * e * dt)).collect();
                let mut phase: Vec<Complex64> = Vec::new();
                for (k, slot) in out.iter_mut().enumerate() {
                    if k % RESYNC_STEPS == 0 {
                        let tau = tau_grid[k];
                        phase = levels.iter().map(|&e| Complex64::from_polar(1.0, 2.0 * PI * e * tau)).collect();
                    }
                    let s: Complex64 = phase.iter().zip(&w).map(|(p, &wj)| p * wj).sum();
                    *slot = s.norm_sqr();
                    for (p, r) in phase.iter_mut().zip(&rot) {
                        *p *= r;
                    }
                }
            }
            None => {
                for (slot, &tau) in out.iter_mut().zip(tau_grid) {
                    let s: Complex64 = levels
                        .iter()
                        .zip(&w)
                        .map(|(&e, &wj)| Complex64::from_polar(wj, 2.0 * PI * e * tau))
                        .sum();
                    *slot = s.norm_sqr();
                }
            }
        }
        (out, w.iter().sum(), w.iter().map(|x| x * x).sum())
    };

    let rows: Vec<usize> = (0..u.count()).collect();
    let partial: Vec<(Vec<f64>, f64, f64)> = rows
        .par_chunks(ROW_CHUNK)
        .map(|chunk| {
            let mut acc = (vec![0.0; t], 0.0, 0.0);
            for &i in chunk {
                let (v, sw, sw2) = row_sums(i);
                for (a, b) in acc.0.iter_mut().zip(&v) {
                    *a += b;
                }
                acc.1 += sw;
                acc.2 += sw2;
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; t];
    let (mut sw, mut sw2) = (0.0, 0.0);
    for (v, a, b) in partial {
        for (x, y) in total.iter_mut().zip(&v) {
            *x += y;
        }
        sw += a;
        sw2 += b;
    }
    if sw2 <= 0.0 {
        return Err(Error::Numerical("form-factor weights vanish on every level".into()));
    }
    let m = u.count() as f64;
    Ok(FormFactorCurve {
        tau: tau_grid.to_vec(),
        k: total.iter().map(|x| x / sw2).collect(),
        realizations: u.count(),
        dim: u.dim(),
        effective_length: (sw / m).powi(2) / (sw2 / m),
        options,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressibilityEstimate {
    /// Intercept of `K = chi + a tau^2` on the plateau range.
    pub chi: f64,
    pub stderr: f64,
    /// Plain mean of `K` over the same range.
    pub plateau_mean: f64,
    pub curvature: f64,
    /// Fit range actually used after removing the small-tau blow-up.
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub points: usize,
    pub plateau_found: bool,
}

/// Default multiplier `c` of the lower cut `c * 2 / sqrt(N M)`.
pub const CUTOFF_FACTOR: f64 = 5.0;
/// Upper end of the plateau range.
pub const PLATEAU_END: f64 = 0.3;

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `chi = lim K(tau)` from the plateau `[c * 2 / sqrt(N M), 0.3]`.
///
/// The leftmost run of points exceeding the median by more than three
/// median absolute deviations is dropped first. `K` is even and smooth at
/// the origin, so the remaining points are fitted by `chi + a tau^2`; the
/// plain mean is reported alongside. Standard errors treat points closer
/// than `1 / effective_length` in `tau` as one measurement.
pub fn estimate_compressibility(curve: &FormFactorCurve, cutoff_factor: f64) -> Result<CompressibilityEstimate> {
    if curve.tau.is_empty() {
        return Err(Error::Empty("form-factor curve"));
    }
    let lower = cutoff_factor * 2.0 / ((curve.dim * curve.realizations) as f64).sqrt();
    let pts: Vec<(f64, f64)> = curve
        .tau
        .iter()
        .zip(&curve.k)
        .filter(|(t, _)| **t >= lower && **t <= PLATEAU_END + 1e-12)
        .map(|(t, k)| (*t, *k))
        .collect();
    let not_found = |pts: &[(f64, f64)]| {
        let chi = if pts.is_empty() {
            f64::NAN
        } else {
            pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64
        };
        CompressibilityEstimate {
            chi,
            stderr: f64::NAN,
            plateau_mean: chi,
            curvature: f64::NAN,
            tau_lo: pts.first().map_or(f64::NAN, |p| p.0),
            tau_hi: pts.last().map_or(f64::NAN, |p| p.0),
            points: pts.len(),
            plateau_found: false,
        }
    };
    if pts.len() < 3 {
        return Ok(not_found(&pts));
    }
    let mut ks: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let med = median(&mut ks);
    let mut dev: Vec<f64> = pts.iter().map(|p| (p.1 - med).abs()).collect();
    let mad = median(&mut dev);
    let skip = pts.iter().take_while(|p| p.1 > med + 3.0 * mad).count();
    let kept = &pts[skip..];
    if kept.len() < 3 {
        return Ok(not_found(kept));
    }
    let n = kept.len() as f64;
    let mean = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let (lo, hi) = (kept[0].0, kept[kept.len() - 1].0);
    let independent = ((hi - lo) * curve.effective_length).clamp(1.0, n);
    let x: Vec<f64> = kept.iter().map(|p| p.0 * p.0).collect();
    let y: Vec<f64> = kept.iter().map(|p| p.1).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(CompressibilityEstimate {
        chi: fit.intercept,
        stderr: fit.intercept_stderr * (n / independent).sqrt(),
        plateau_mean: mean,
        curvature: fit.slope,
        tau_lo: lo,
        tau_hi: hi,
        points: kept.len(),
        plateau_found: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn picket(rows: usize, n: usize) -> UnfoldedSpectrum {
        UnfoldedSpectrum::from_rows(vec![(0..n).map(|j| j as f64 + 0.5).collect(); rows]).unwrap()
    }

    #[test]
    fn grid_construction() {
        let g = uniform_grid(0.01, 3.0, 0.01).unwrap();
        assert_eq!(g.len(), 300);
        assert!((g[299] - 3.0).abs() < 1e-12);
        assert!(uniform_grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|r| (0..40).map(|j| j as f64 + 0.3 * ((j * 7 + r) as f64).sin()).collect())
            .collect();
        let u = UnfoldedSpectrum::from_rows(rows).unwrap().with_window(10..30).unwrap();
        let grid = uniform_grid(0.01, 2.0, 0.01).unwrap();
        let mut jittered = grid.clone();
        jittered[7] += 1e-7;
        for taper in [Taper::Flat, Taper::Gaussian] {
            let opts = FormFactorOptions { taper, levels: LevelRange::Full };
            let fast = empirical_form_factor(&u, &grid, opts).unwrap();
            let slow = empirical_form_factor(&u, &jittered, opts).unwrap();
            for (k, (a, b)) in fast.k.iter().zip(&slow.k).enumerate() {
                if k != 7 {
                    assert!((a - b).abs() < 1e-9, "k={k} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn picket_fence_vanishes_between_integers() {
        let u = picket(4, 64);
        let c = empirical_form_factor(&u, &[0.25, 0.5, 0.75], FormFactorOptions::default()).unwrap();
        for k in c.k {
            assert!(k < 1e-20);
        }
        let c = empirical_form_factor(&u, &[1.0], FormFactorOptions::default()).unwrap();
        assert!((c.k[0] - 64.0).abs() < 1e-9);
        assert_eq!(c.effective_length, 64.0);
    }

    #[test]
    fn compressibility_of_flat_curve() {
        let tau = uniform_grid(0.01, 0.5, 0.01).unwrap();
        let mut k = vec![0.7; tau.len()];
        k[0] = 5.0;
        k[1] = 3.0;
        let curve = FormFactorCurve {
            tau,
            k,
            realizations: 100,
            dim: 100,
            effective_length: 100.0,
            options: FormFactorOptions::default(),
        };
        let est = estimate_compressibility(&curve, 1.0).unwrap();
        assert!(est.plateau_found);
        assert!((est.chi - 0.7).abs() < 1e-12);
        assert!((est.plateau_mean - 0.7).abs() < 1e-12);
        assert!((est.tau_lo - 0.03).abs() < 1e-12);
        let quad: Vec<f64> = curve.tau.iter().map(|t| 0.25 + 2.0 * t * t).collect();
        let est = estimate_compressibility(&FormFactorCurve { k: quad, ..curve.clone() }, 1.0).unwrap();
        assert!((est.chi - 0.25).abs() < 1e-12);
        assert!((est.curvature - 2.0).abs() < 1e-9);
        assert!(est.plateau_mean > 0.3);
        let narrow = FormFactorCurve { tau: vec![0.4, 0.5], k: vec![1.0, 1.0], ..curve };
        assert!(!estimate_compressibility(&narrow, 1.0).unwrap().plateau_found);
    }
}
