//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The process exits successfully even when criteria fail, so that the
//! report is produced in full as part of `cargo test`. Set
//! `SRMT_ACCEPTANCE_STRICT=1` to turn any failure into a non-zero exit.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use structured_rmt::displacement::{hankel_displacement, th_displacement, toeplitz_displacement};
use structured_rmt::ensembles::{generate, generate_parameters, parameter_count, EnsembleKind, EnsembleSpec};
use structured_rmt::fitting::fit_gamma;
use structured_rmt::linalg::{numerical_rank, CMatrix};
use structured_rmt::multifractal::{default_q_grid, hankel_fourier_matrix, run_ladder, scaling_exponents, DEFAULT_LADDER};
use structured_rmt::numeric::integrate_half_line;
use structured_rmt::pipeline::simulate_spectra;
use structured_rmt::stats::{
    empirical_form_factor, estimate_compressibility, ks_distance, select_window, spacings, unfold, uniform_grid,
    CompressibilityEstimate, FormFactorOptions, SpectraBatch, UnfoldedSpectrum, CUTOFF_FACTOR,
};
use structured_rmt::synthetic::{synthetic_batch, PointProcess};
use structured_rmt::theory::{
    count_zero_modes, plasma_form_factor, plasma_pn, theoretical_form_factor, ExponentLaw, GammaSurmise, PlasmaModel,
    WignerDysonSurmise,
};

const SEED: u64 = 1;
const REDUCED_DIM: usize = 512;
const REDUCED_COUNT: usize = 2000;

struct Report {
    failures: usize,
    total: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, detail: String) {
        self.total += 1;
        if !pass {
            self.failures += 1;
        }
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        let _ = std::io::stdout().flush();
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn windowed(batch: &SpectraBatch) -> UnfoldedSpectrum {
    select_window(&unfold(batch).unwrap(), batch.info().kind).unwrap()
}

fn chi(u: &UnfoldedSpectrum) -> CompressibilityEstimate {
    let grid = uniform_grid(0.002, 0.5, 0.002).unwrap();
    let curve = empirical_form_factor(u, &grid, FormFactorOptions::TAPERED).unwrap();
    estimate_compressibility(&curve, CUTOFF_FACTOR).unwrap()
}

fn analytic_layer(r: &mut Report) {
    let t = Instant::now();
    let mut worst_mass: f64 = 0.0;
    let mut worst_mean: f64 = 0.0;
    let mut cases = 0;
    let mut check = |f: &dyn Fn(f64) -> f64, n: usize| {
        let mass = integrate_half_line(f, n as f64 + 1.0, 1e-12).unwrap().value;
        let mean = integrate_half_line(|s| s * f(s), n as f64 + 1.0, 1e-12).unwrap().value;
        worst_mass = worst_mass.max((mass - 1.0).abs());
        worst_mean = worst_mean.max((mean - (n as f64 + 1.0)).abs());
        cases += 1;
    };
    for law in [(1.0, 0.0), (2.0, 1.0), (3.0, 1.0), (4.0, 2.0)] {
        let law = ExponentLaw::new(law.0, law.1);
        for n in 0..=5 {
            let g = GammaSurmise::new(n, law.gamma(n)).unwrap();
            check(&|s| g.pdf(s), n);
        }
    }
    for beta in [1, 2, 4] {
        for n in 0..=5 {
            let w = WignerDysonSurmise::new(beta, n).unwrap();
            check(&|s| w.pdf(s), n);
        }
    }
    for model in [PlasmaModel::One, PlasmaModel::Two] {
        for n in 0..=2 {
            check(&|s| plasma_pn(model, n, s).unwrap(), n);
        }
    }
    let el = t.elapsed();
    r.line(
        "1 analytic normalization",
        worst_mass < 1e-8 && worst_mean < 1e-8 && el < Duration::from_secs(10),
        format!(
            "{cases} densities, max |int P - 1| = {worst_mass:.1e}, max |int sP - (n+1)| = {worst_mean:.1e} (tol 1e-8), {:.2} s (< 10 s)",
            secs(el)
        ),
    );
}

fn zero_mode_identity(r: &mut Report) {
    let t = Instant::now();
    let families = [
        (EnsembleKind::ToeplitzComplex, 2, 1),
        (EnsembleKind::ThSpecialPlus, 2, 1),
        (EnsembleKind::Hankel, 3, 1),
        (EnsembleKind::ThIndependentReal, 3, 1),
        (EnsembleKind::ThIndependentComplex, 4, 2),
    ];
    let mut mismatches = Vec::new();
    for (kind, p, k) in families {
        for n in 0..=5 {
            let gamma = parameter_count(kind, n) as i64 - count_zero_modes(kind, n).unwrap() as i64 - 1;
            if gamma != p * n as i64 + k {
                mismatches.push(format!("{kind} n={n}: {gamma}"));
            }
        }
    }
    let el = t.elapsed();
    r.line(
        "2 zero-mode identity",
        mismatches.is_empty() && el < Duration::from_secs(10),
        format!(
            "gamma_n = N_t - zero_modes - 1 for 5 families, n <= 5: {} mismatches (2n+1, 2n+1, 3n+1, 3n+1, 4n+2){}, {:.2} s (< 10 s)",
            mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!(" {mismatches:?}") },
            secs(el)
        ),
    );
}

fn form_factor_analytics(r: &mut Report) {
    let law = ExponentLaw::new(2.0, 1.0);
    let grid = uniform_grid(0.01, 5.0, 0.001).unwrap();
    let worst = grid
        .iter()
        .map(|&t| {
            let x = PI * PI * t * t;
            (theoretical_form_factor(law, t).unwrap() - (2.0 + x) / (4.0 + x)).abs()
        })
        .fold(0.0f64, f64::max);
    let p1 = plasma_form_factor(PlasmaModel::One, 0.0).unwrap();
    let p2 = plasma_form_factor(PlasmaModel::Two, 0.0).unwrap();
    r.line(
        "3 form-factor analytics",
        worst < 1e-6 && p1 == 1.0 / 3.0 && p2 == 0.25,
        format!("semi-Poisson max dev {worst:.1e} on [0.01, 5] (tol 1e-6); plasma K(0) = {p1}, {p2} (exact 1/3, 1/4)"),
    );
}

fn displacement_ranks(r: &mut Report) {
    let t = Instant::now();
    let n = 16;
    let rank = |m: &CMatrix| numerical_rank(m, 1e-10 * (1.0 + m.max_abs())).unwrap();
    let max_rank = |kind: EnsembleKind, op: fn(&CMatrix) -> structured_rmt::Result<CMatrix>| {
        (0..1000u64)
            .map(|i| {
                let m = generate(&EnsembleSpec::new(kind, n, SEED).realization(i)).unwrap();
                rank(&op(m.as_matrix()).unwrap())
            })
            .max()
            .unwrap()
    };
    let toeplitz = max_rank(EnsembleKind::ToeplitzComplex, toeplitz_displacement);
    let hankel = max_rank(EnsembleKind::Hankel, hankel_displacement);
    let th = [EnsembleKind::ThIndependentComplex, EnsembleKind::ThIndependentReal, EnsembleKind::ThSpecialPlus]
        .into_iter()
        .map(|k| max_rank(k, th_displacement))
        .max()
        .unwrap();
    let el = t.elapsed();
    r.line(
        "4 displacement ranks",
        toeplitz == 2 && hankel == 2 && th == 4 && el < Duration::from_secs(30),
        format!(
            "N=16, 1000 draws per family: max rank Toeplitz {toeplitz}, Hankel {hankel}, T+H {th} (expect 2, 2, 4), {:.1} s (< 30 s)",
            secs(el)
        ),
    );
}

fn pipeline_oracles(r: &mut Report) {
    let t = Instant::now();
    let poisson = windowed(&synthetic_batch(PointProcess::Poisson, REDUCED_DIM, REDUCED_COUNT, SEED).unwrap());
    let ks_p = ks_distance(&spacings(&poisson, 0), |s| 1.0 - (-s).exp()).unwrap();
    let chi_p = chi(&poisson);

    let daisy = windowed(&synthetic_batch(PointProcess::Daisy(2), REDUCED_DIM, REDUCED_COUNT, SEED).unwrap());
    let semi = GammaSurmise::new(0, 1.0).unwrap();
    let ks_d = ks_distance(&spacings(&daisy, 0), |s| semi.cdf(s)).unwrap();
    let chi_d = chi(&daisy);
    let grid = uniform_grid(0.2, 3.0, 0.01).unwrap();
    let curve = empirical_form_factor(&daisy, &grid, FormFactorOptions::default()).unwrap();
    let law = ExponentLaw::new(2.0, 1.0);
    let dev: Vec<f64> = curve
        .tau
        .iter()
        .zip(&curve.k)
        .map(|(t, k)| k - theoretical_form_factor(law, *t).unwrap())
        .collect();
    let pointwise = dev.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let binned = dev
        .chunks(10)
        .map(|c| (c.iter().sum::<f64>() / c.len() as f64).abs())
        .fold(0.0f64, f64::max);

    let gue = windowed(&simulate_spectra(EnsembleKind::Gue, 256, 1000, SEED).unwrap());
    let wd = WignerDysonSurmise::new(2, 0).unwrap();
    let ks_g = ks_distance(&spacings(&gue, 0), |s| wd.cdf(s)).unwrap();
    let el = t.elapsed();

    let a = ks_p < 0.02 && (chi_p.chi - 1.0).abs() <= 0.05;
    let b = ks_d < 0.02 && (chi_d.chi - 0.5).abs() <= 0.05 && binned < 0.05;
    let c = ks_g < 0.03;
    r.line(
        "5a Poisson oracle",
        a,
        format!("KS {ks_p:.4} (< 0.02), chi {:.3} +- {:.3} (1 +- 0.05)", chi_p.chi, chi_p.stderr),
    );
    r.line(
        "5b daisy oracle",
        b,
        format!(
            "KS {ks_d:.4} (< 0.02), chi {:.3} +- {:.3} (0.5 +- 0.05), K vs semi-Poisson on [0.2, 3]: max dev of 0.1-bin means {binned:.4} (< 0.05; single-point max {pointwise:.4})",
            chi_d.chi, chi_d.stderr
        ),
    );
    r.line(
        "5c GUE oracle",
        c && el < Duration::from_secs(300),
        format!("N=256 M=1000 KS to beta=2 surmise {ks_g:.4} (< 0.03); oracles took {:.1} s (< 300 s)", secs(el)),
    );
}

struct Reduced {
    kind: EnsembleKind,
    window: UnfoldedSpectrum,
    simulate_secs: f64,
}

fn reduced(kind: EnsembleKind) -> Reduced {
    let t = Instant::now();
    let batch = simulate_spectra(kind, REDUCED_DIM, REDUCED_COUNT, SEED).unwrap();
    Reduced {
        kind,
        window: windowed(&batch),
        simulate_secs: secs(t.elapsed()),
    }
}

fn table_two(r: &mut Report, sets: &[(&Reduced, [f64; 4])]) {
    let t = Instant::now();
    let mut all = true;
    let mut parts = Vec::new();
    for (set, table) in sets {
        let fitted: Vec<f64> = (0..4)
            .map(|n| fit_gamma(&spacings(&set.window, n), n, None).unwrap().gamma_hat)
            .collect();
        let worst = fitted.iter().zip(table).map(|(f, t)| (f - t).abs()).fold(0.0f64, f64::max);
        all &= worst <= 0.2;
        parts.push(format!(
            "{} [{}] vs [{}] max |dev| {worst:.2}",
            set.kind,
            fitted.iter().map(|g| format!("{g:.2}")).collect::<Vec<_>>().join(", "),
            table.iter().map(|g| format!("{g:.2}")).collect::<Vec<_>>().join(", ")
        ));
    }
    let total = secs(t.elapsed()) + sets.iter().map(|s| s.0.simulate_secs).sum::<f64>();
    r.line(
        "6 tabulated gamma_n at N=512 M=2000",
        all && total < 1200.0,
        format!("{} (tol 0.2); {total:.0} s (< 1200 s)", parts.join("; ")),
    );
}

fn compressibility_check(r: &mut Report, sets: &[(&Reduced, f64)]) -> Vec<CompressibilityEstimate> {
    let mut all = true;
    let mut parts = Vec::new();
    let mut out = Vec::new();
    for (set, target) in sets {
        let e = chi(&set.window);
        all &= (e.chi - target).abs() <= 0.1;
        parts.push(format!("{} {:.3} +- {:.3} (target {target:.3})", set.kind, e.chi, e.stderr));
        out.push(e);
    }
    r.line("7 compressibility", all, format!("{} (tol 0.1)", parts.join("; ")));
    out
}

fn multifractality(r: &mut Report, chis: &[(EnsembleKind, CompressibilityEstimate)]) {
    let t = Instant::now();
    let q = default_q_grid();
    let targets = [
        (EnsembleKind::ToeplitzComplex, 0.52),
        (EnsembleKind::Hankel, 0.65),
        (EnsembleKind::ThIndependentComplex, 0.75),
    ];
    let mut d1_ok = true;
    let mut sum_ok = true;
    let mut d1_parts = Vec::new();
    let mut sum_parts = Vec::new();
    for (kind, target) in targets {
        let report = scaling_exponents(&run_ladder(kind, &DEFAULT_LADDER, &q, SEED).unwrap()).unwrap();
        d1_ok &= (report.d1 - target).abs() <= 0.1;
        d1_parts.push(format!("{kind} {:.3} +- {:.3} (target {target})", report.d1, report.d1_stderr));
        let c = &chis.iter().find(|(k, _)| *k == kind).unwrap().1;
        let combined = (report.d1_stderr.powi(2) + c.stderr.powi(2)).sqrt();
        let miss = report.d1 + c.chi - 1.0;
        let ok = miss.abs() <= 2.0 * combined;
        sum_ok &= ok;
        sum_parts.push(format!("{kind} {:+.3} (2 sigma = {:.3})", miss, 2.0 * combined));
    }
    let gue = scaling_exponents(&run_ladder(EnsembleKind::Gue, &DEFAULT_LADDER, &q, SEED).unwrap()).unwrap();
    let (d2, d2_err) = gue.d_at(2.0).unwrap();
    let el = t.elapsed();
    r.line(
        "8a D1 on the N ladder 128..1024",
        d1_ok,
        format!("{} (tol 0.1)", d1_parts.join("; ")),
    );
    r.line(
        "8b D1 + chi = 1",
        sum_ok,
        format!("D1 + chi - 1: {} within twice the combined standard error", sum_parts.join("; ")),
    );
    r.line(
        "8c GUE control",
        (d2 - 1.0).abs() <= 0.1 && el < Duration::from_secs(1800),
        format!("D2 = {d2:.3} +- {d2_err:.3} (1 +- 0.1); ladders took {:.0} s (< 1800 s)", secs(el)),
    );
}

fn hankel_fourier(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for dim in [4usize, 8, 16] {
        let u = CMatrix::from_fn(dim, dim, |m, k| {
            Complex64::from_polar(1.0 / (dim as f64).sqrt(), 2.0 * PI * ((k + 1) * (m + 1)) as f64 / dim as f64)
        });
        for i in 0..100 {
            let spec = EnsembleSpec::new(EnsembleKind::Hankel, dim, SEED).realization(i);
            let h = generate(&spec).unwrap().into_matrix();
            let dense = u.matmul(&h).matmul(&u.adjoint());
            let closed = hankel_fourier_matrix(&generate_parameters(&spec), dim).unwrap();
            worst = worst.max(closed.as_matrix().sub(&dense).max_abs());
        }
    }
    r.line(
        "9 Hankel Fourier closed form",
        worst < 1e-9,
        format!("max |closed - U H U^+| = {worst:.1e} over N in {{4, 8, 16}}, 100 draws each (tol 1e-9)"),
    );
}

fn main() {
    let start = Instant::now();
    let mut r = Report { failures: 0, total: 0 };
    analytic_layer(&mut r);
    zero_mode_identity(&mut r);
    form_factor_analytics(&mut r);
    displacement_ranks(&mut r);
    hankel_fourier(&mut r);
    pipeline_oracles(&mut r);

    let toeplitz = reduced(EnsembleKind::ToeplitzComplex);
    let hankel = reduced(EnsembleKind::Hankel);
    let th_complex = reduced(EnsembleKind::ThIndependentComplex);
    table_two(
        &mut r,
        &[
            (&toeplitz, [1.12, 3.28, 5.45, 7.66]),
            (&hankel, [1.17, 3.77, 6.48, 9.27]),
            (&th_complex, [2.00, 5.58, 9.33, 13.20]),
        ],
    );
    let th_real = reduced(EnsembleKind::ThIndependentReal);
    let estimates = compressibility_check(
        &mut r,
        &[(&toeplitz, 0.5), (&hankel, 1.0 / 3.0), (&th_real, 1.0 / 3.0), (&th_complex, 0.25)],
    );
    let chis = vec![
        (EnsembleKind::ToeplitzComplex, estimates[0]),
        (EnsembleKind::Hankel, estimates[1]),
        (EnsembleKind::ThIndependentComplex, estimates[3]),
    ];
    multifractality(&mut r, &chis);

    println!(
        "{} of {} criteria passed in {:.0} s",
        r.total - r.failures,
        r.total,
        secs(start.elapsed())
    );
    if r.failures > 0 && std::env::var("SRMT_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
