use approx::assert_abs_diff_eq;
use structured_rmt::ensembles::EnsembleKind;
use structured_rmt::fitting::{fit_gamma, linear_fit};
use structured_rmt::pipeline::simulate_spectra;
use structured_rmt::stats::{
    empirical_form_factor, estimate_compressibility, ks_distance, mean_density, number_variance, pair_correlation,
    select_window, spacing_distributions, spacings, uniform_grid, unfold, DensityHistogram, FormFactorOptions,
    UnfoldedSpectrum, CUTOFF_FACTOR,
};
use structured_rmt::synthetic::{synthetic_batch, PointProcess};

fn raw_rows(process: PointProcess, dim: usize, count: usize, seed: u64) -> UnfoldedSpectrum {
    let rows = (0..count as u64).map(|r| process.sample_row(dim, seed, r)).collect();
    UnfoldedSpectrum::from_rows(rows).unwrap()
}

fn central(u: UnfoldedSpectrum) -> UnfoldedSpectrum {
    select_window(&u, None).unwrap()
}

fn chi_of(u: &UnfoldedSpectrum) -> f64 {
    let grid = uniform_grid(0.002, 0.5, 0.002).unwrap();
    let curve = empirical_form_factor(u, &grid, FormFactorOptions::TAPERED).unwrap();
    estimate_compressibility(&curve, CUTOFF_FACTOR).unwrap().chi
}

#[test]
fn gue_density_is_a_semicircle() {
    let batch = simulate_spectra(EnsembleKind::Gue, 256, 500, 3).unwrap();
    let h = mean_density(&batch, 80).unwrap();
    let dev = h
        .centers()
        .iter()
        .zip(&h.density)
        .map(|(&x, &d)| (d - (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)).abs())
        .fold(0.0, f64::max);
    assert!(dev < 0.05, "sup deviation {dev}");
    let second: f64 = h.centers().iter().zip(&h.density).map(|(x, d)| x * x * d * h.bin_width()).sum();
    assert!((second - 1.0).abs() < 0.05, "second moment {second}");
}

#[test]
fn hankel_density_has_two_peaks() {
    let batch = simulate_spectra(EnsembleKind::Hankel, 128, 300, 5).unwrap();
    let h = mean_density(&batch, 100).unwrap();
    let smooth = h.smoothed(3.0);
    let top = smooth.iter().cloned().fold(0.0, f64::max);
    let peaks: Vec<usize> = DensityHistogram::local_maxima(&smooth).into_iter().filter(|&i| smooth[i] > 0.2 * top).collect();
    let centers = h.centers();
    assert_eq!(peaks.len(), 2, "peaks at {:?}", peaks.iter().map(|&i| centers[i]).collect::<Vec<_>>());
    assert!(centers[peaks[0]] < 0.0 && centers[peaks[1]] > 0.0);

    let u = select_window(&unfold(&batch).unwrap(), Some(EnsembleKind::Hankel)).unwrap();
    assert!(u.window().start > 128 / 2, "window {:?}", u.window());
}

#[test]
fn unfolded_levels_track_their_index() {
    let batch = simulate_spectra(EnsembleKind::Gue, 256, 200, 11).unwrap();
    let u = central(unfold(&batch).unwrap());
    let mut dev: Vec<f64> = (0..u.count())
        .flat_map(|i| {
            let row = u.row(i).to_vec();
            u.window().map(move |j| (row[j] - (j as f64 + 0.5)).abs())
        })
        .collect();
    dev.sort_by(f64::total_cmp);
    let median = dev[dev.len() / 2];
    assert!(median < 0.5, "median |e_j - j| = {median}");
    assert_abs_diff_eq!(u.window_mean_spacing(), 1.0, epsilon = 0.02);
}

#[test]
fn synthetic_spacings_follow_their_laws() {
    let poisson = central(unfold(&synthetic_batch(PointProcess::Poisson, 512, 400, 1).unwrap()).unwrap());
    let ks = ks_distance(&spacings(&poisson, 0), |s| 1.0 - (-s).exp()).unwrap();
    assert!(ks < 0.02, "Poisson KS {ks}");

    let daisy = central(unfold(&synthetic_batch(PointProcess::Daisy(2), 512, 400, 2).unwrap()).unwrap());
    let ks = ks_distance(&spacings(&daisy, 0), |s| 1.0 - (1.0 + 2.0 * s) * (-2.0 * s).exp()).unwrap();
    assert!(ks < 0.02, "semi-Poisson KS {ks}");

    let fit = fit_gamma(&spacings(&daisy, 0), 0, None).unwrap();
    assert!((fit.gamma_hat - 1.0).abs() < 0.1, "gamma_0 {}", fit.gamma_hat);
}

#[test]
fn higher_spacings_have_mean_n_plus_one() {
    let u = central(raw_rows(PointProcess::Daisy(3), 512, 200, 4));
    for n in 0..5 {
        let s = spacings(&u, n);
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean - (n + 1) as f64).abs() < 0.05, "n = {n}: mean {mean}");
    }
}

#[test]
fn pair_correlation_is_sum_of_spacing_densities() {
    let u = central(raw_rows(PointProcess::Daisy(2), 512, 300, 6));
    let bw = 0.1;
    let r2 = pair_correlation(&u, 3.0, bw).unwrap();
    let hist = spacing_distributions(&u, 9, bw).unwrap();
    for (b, r) in r2.densities.iter().enumerate() {
        let sum: f64 = hist.iter().map(|h| h.densities[b]).sum();
        assert!((r - sum).abs() < 0.03, "bin {b}: R2 {r} vs sum {sum}");
    }
}

#[test]
fn number_variance_slopes() {
    let l: Vec<f64> = (1..=60).map(|i| i as f64 * 0.5).collect();

    let poisson = central(raw_rows(PointProcess::Poisson, 512, 400, 7));
    let nv = number_variance(&poisson, &l, 1).unwrap();
    for p in nv.iter().filter(|p| p.l >= 5.0) {
        assert!((p.sigma2 / p.l - 1.0).abs() < 0.05, "Poisson Sigma2({}) = {}", p.l, p.sigma2);
    }
    let ln_l: Vec<f64> = nv.iter().map(|p| p.l.ln()).collect();
    let ln_s: Vec<f64> = nv.iter().map(|p| p.sigma2.ln()).collect();
    let fit = linear_fit(&ln_l, &ln_s).unwrap();
    assert!((fit.slope - 1.0).abs() < 0.05, "log-log slope {}", fit.slope);

    let daisy = central(raw_rows(PointProcess::Daisy(2), 512, 400, 8));
    let nv = number_variance(&daisy, &l, 1).unwrap();
    let tail: Vec<_> = nv.iter().filter(|p| p.l >= 10.0).collect();
    let fit = linear_fit(&tail.iter().map(|p| p.l).collect::<Vec<_>>(), &tail.iter().map(|p| p.sigma2).collect::<Vec<_>>()).unwrap();
    assert!((fit.slope - 0.5).abs() < 0.05, "daisy slope {}", fit.slope);

    let chi = chi_of(&daisy);
    assert!((fit.slope - chi).abs() < 0.08, "Sigma2 slope {} vs form-factor plateau {chi}", fit.slope);
}

#[test]
fn compressibility_of_reference_processes() {
    let picket = central(raw_rows(PointProcess::PicketFence, 512, 50, 0));
    let chi = chi_of(&picket);
    assert!(chi.abs() < 0.02, "picket fence chi {chi}");

    let poisson = central(raw_rows(PointProcess::Poisson, 512, 1000, 9));
    let chi = chi_of(&poisson);
    assert!((chi - 1.0).abs() < 0.05, "Poisson chi {chi}");

    let daisy = central(raw_rows(PointProcess::Daisy(2), 512, 1000, 10));
    let chi = chi_of(&daisy);
    assert!((chi - 0.5).abs() < 0.04, "daisy-2 chi {chi}");
}

#[test]
fn poisson_form_factor_is_flat() {
    let u = central(raw_rows(PointProcess::Poisson, 512, 500, 12));
    let grid = uniform_grid(0.5, 3.0, 0.05).unwrap();
    let curve = empirical_form_factor(&u, &grid, FormFactorOptions::TAPERED).unwrap();
    let mean = curve.k.iter().sum::<f64>() / curve.k.len() as f64;
    assert!((mean - 1.0).abs() < 0.03, "mean K {mean}");
}
