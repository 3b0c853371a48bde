use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use structured_rmt::displacement::{hankel_displacement, th_displacement, toeplitz_displacement};
use structured_rmt::ensembles::{generate, parameter_count, EnsembleKind, EnsembleSpec};
use structured_rmt::fitting::{fit_gamma, linear_fit};
use structured_rmt::io::{read_batch, write_batch, write_csv, BatchHeader, Cell, F64Stream, OutputLock, RunManifest, EIGENVECTOR_FILE, RUN_FILE};
use structured_rmt::linalg::{default_rank_tolerance, eigh, numerical_rank, CMatrix};
use structured_rmt::multifractal::{default_q_grid, run_ladder, scaling_exponents, DEFAULT_LADDER};
use structured_rmt::pipeline::map_realizations;
use structured_rmt::stats::{
    empirical_form_factor, estimate_compressibility, mean_density, number_variance, select_window, spacing_distributions,
    spacings, unfold, uniform_grid, FormFactorOptions, LevelRange, SpectraBatch, Taper, UnfoldedSpectrum, CUTOFF_FACTOR,
    DEFAULT_BIN_WIDTH,
};
use structured_rmt::theory::{
    compressibility, count_zero_modes, gamma_exponent, plasma_form_factor, plasma_pn, theoretical_form_factor,
    ExponentLaw, GammaSurmise, PlasmaModel, WignerDysonSurmise,
};
use structured_rmt::{Error, Result};

type Pdf = Box<dyn Fn(f64) -> f64>;
type Displacement = fn(&CMatrix) -> Result<CMatrix>;

#[derive(Parser)]
#[command(name = "srmt", version, about = "Spectral statistics of structured random matrices")]
struct Cli {
    /// Worker threads (default: all cores). Never changes any output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// N = 512, M = 2000.
    PaperSmall,
}

#[derive(Subcommand)]
enum Command {
    /// Sample matrices and store their spectra.
    Gen(GenArgs),
    /// Mean density of rescaled eigenvalues.
    Density {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 200)]
        bins: usize,
    },
    /// Histograms of the n-th nearest-neighbour spacings.
    NnDist {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
        bin_width: f64,
    },
    /// One-parameter gamma fits of P_n.
    FitGamma {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
    },
    /// Empirical two-point form factor and compressibility.
    FormFactor(FormFactorArgs),
    /// Number variance on the local window.
    NumberVariance {
        #[command(flatten)]
        input: Input,
        /// Largest L (default: a quarter of the window).
        #[arg(long)]
        lmax: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        lstep: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fractal dimensions of Fourier-space eigenvectors over a ladder of sizes.
    Fractal(FractalArgs),
    /// Tabulate the reference laws.
    Theory(TheoryArgs),
    /// Count zero modes of the degeneracy conditions.
    ZeroModes {
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
    },
    /// Largest displacement rank over random draws.
    DisplacementCheck {
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Input {
    /// Batch directory written by `gen`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    ensemble: EnsembleKind,
    #[arg(long, required_unless_present = "preset")]
    dim: Option<usize>,
    #[arg(long, required_unless_present = "preset")]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also store eigenvectors.
    #[arg(long)]
    vectors: bool,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

#[derive(Args)]
struct FormFactorArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 0.01)]
    tau_min: f64,
    #[arg(long, default_value_t = 3.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 0.01)]
    tau_step: f64,
    #[arg(long, value_enum, default_value_t = TaperArg::Flat)]
    taper: TaperArg,
    #[arg(long, value_enum, default_value_t = LevelsArg::Full)]
    levels: LevelsArg,
    /// Add the plasma-model column for model 1 or 2.
    #[arg(long)]
    plasma: Option<u8>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaperArg {
    Flat,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelsArg {
    Full,
    Window,
}

#[derive(Args)]
struct FractalArgs {
    #[arg(long)]
    ensemble: EnsembleKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated `N:M` pairs.
    #[arg(long)]
    ladder: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "law_or_plasma")]
struct TheorySource {
    /// Exponent law `p,k` with gamma_n = p n + k.
    #[arg(long)]
    law: Option<String>,
    /// Plasma model 1 or 2.
    #[arg(long)]
    plasma: Option<u8>,
}

#[derive(Args)]
struct TheoryArgs {
    #[command(flatten)]
    source: TheorySource,
    #[arg(long, default_value_t = 5)]
    nmax: usize,
    /// Upper end of the shared s / tau grid.
    #[arg(long, default_value_t = 10.0)]
    xmax: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: invalid thread count {t}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Density { input, bins } => density(&input, bins),
        Command::NnDist { input, nmax, bin_width } => nn_dist(&input, nmax, bin_width),
        Command::FitGamma { input, nmax } => fit_gamma_cmd(&input, nmax),
        Command::FormFactor(a) => form_factor(a),
        Command::NumberVariance { input, lmax, lstep, seed } => number_variance_cmd(&input, lmax, lstep, seed),
        Command::Fractal(a) => fractal(a),
        Command::Theory(a) => theory(a),
        Command::ZeroModes { ensemble, nmax } => zero_modes(ensemble, nmax),
        Command::DisplacementCheck { ensemble, dim, trials, seed } => displacement_check(ensemble, dim, trials, seed),
    }
}

/// Locks the directory that will receive `out`.
fn lock_for(out: &Path) -> Result<OutputLock> {
    let dir = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    OutputLock::acquire(&dir)
}

fn finish(mut manifest: RunManifest, started: Instant, out: &Path, columns: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    manifest.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    manifest.workers = Some(rayon::current_num_threads());
    write_csv(out, &manifest.hash(), columns, rows)?;
    let mut path = out.as_os_str().to_owned();
    path.push(".manifest.json");
    manifest.write(Path::new(&path))
}

fn gen(a: GenArgs) -> Result<()> {
    let started = Instant::now();
    let (dim, count) = match a.preset {
        Some(Preset::PaperSmall) => (a.dim.unwrap_or(512), a.count.unwrap_or(2000)),
        None => (a.dim.expect("clap requires dim"), a.count.expect("clap requires count")),
    };
    let _lock = OutputLock::acquire(&a.out)?;
    let mut manifest = RunManifest::new("gen").with_ensemble(a.ensemble, dim, count, a.seed);
    manifest.set("eigenvectors", a.vectors);
    if let Some(Preset::PaperSmall) = a.preset {
        manifest.set("preset", "paper-small");
    }
    let batch = if a.vectors {
        let mut stream = F64Stream::create(&a.out.join(EIGENVECTOR_FILE))?;
        let mut rows = Vec::with_capacity(count);
        // chunks bound the memory held by vectors awaiting their turn
        for start in (0..count).step_by(64) {
            let end = (start + 64).min(count);
            let specs: Vec<EnsembleSpec> = (start..end)
                .map(|i| EnsembleSpec::new(a.ensemble, dim, a.seed).realization(i as u64))
                .collect();
            let decomps = rayon_map(&specs, |spec| eigh(&generate(spec)?, true))?;
            for d in decomps {
                let v = d.vectors.as_ref().expect("vectors requested");
                let flat: Vec<f64> = (0..dim)
                    .flat_map(|k| v.column(k).into_iter().flat_map(|z| [z.re, z.im]))
                    .collect();
                stream.push(&flat)?;
                rows.push(d.values);
            }
        }
        stream.finish()?;
        SpectraBatch::from_rows(a.ensemble.name(), Some(a.ensemble), a.seed, rows)?
    } else {
        structured_rmt::pipeline::simulate_spectra(a.ensemble, dim, count, a.seed)?
    };
    write_batch(&a.out, &batch, &manifest, a.vectors)?;
    // timing lives beside the batch so that the batch files stay byte-identical
    let mut timed = manifest.clone();
    timed.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    timed.workers = Some(rayon::current_num_threads());
    timed.write(&a.out.join(RUN_FILE))?;
    println!("wrote {count} spectra of {} (N = {dim}) to {}", a.ensemble, a.out.display());
    println!("manifest-sha256: {}", manifest.hash());
    Ok(())
}

fn rayon_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Result<U> + Sync + Send) -> Result<Vec<U>> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Batch, header and an analysis manifest that records the input.
fn load(input: &Input, command: &str) -> Result<(SpectraBatch, BatchHeader, RunManifest)> {
    let (batch, header) = read_batch(&input.input)?;
    let info = batch.info();
    let mut manifest = RunManifest::new(command);
    manifest.ensemble = info.kind;
    manifest.dim = Some(info.dim);
    manifest.count = Some(info.count);
    manifest.seed = Some(info.seed);
    manifest.set("input", input.input.display().to_string());
    manifest.set("input_manifest_sha256", header.manifest.hash());
    manifest.set("source", &info.source);
    Ok((batch, header, manifest))
}

fn windowed(batch: &SpectraBatch, manifest: &mut RunManifest) -> Result<UnfoldedSpectrum> {
    let u = select_window(&unfold(batch)?, batch.info().kind)?;
    let w = u.window();
    manifest.set("unfolding", "pooled ensemble counting function");
    manifest.set("window", [w.start, w.end]);
    Ok(u)
}

fn density(input: &Input, bins: usize) -> Result<()> {
    let started = Instant::now();
    let (batch, _, mut manifest) = load(input, "density")?;
    let _lock = lock_for(&input.out)?;
    manifest.set("bins", bins);
    let h = mean_density(&batch, bins)?;
    let rows: Vec<Vec<Cell>> = h.centers().into_iter().zip(&h.density).map(|(c, d)| vec![c.into(), (*d).into()]).collect();
    finish(manifest, started, &input.out, &["eps_center", "density"], &rows)
}

enum Reference {
    Gamma(EnsembleKind),
    WignerDyson(u8),
    None,
}

impl Reference {
    fn of(kind: Option<EnsembleKind>) -> Self {
        match kind {
            Some(EnsembleKind::Goe) => Reference::WignerDyson(1),
            Some(EnsembleKind::Gue) => Reference::WignerDyson(2),
            Some(k) => Reference::Gamma(k),
            None => Reference::None,
        }
    }

    fn pdf(&self, n: usize) -> Result<Option<Pdf>> {
        Ok(match *self {
            Reference::Gamma(k) => {
                let g = GammaSurmise::for_kind(k, n)?;
                Some(Box::new(move |s| g.pdf(s)))
            }
            Reference::WignerDyson(beta) => {
                let w = WignerDysonSurmise::new(beta, n)?;
                Some(Box::new(move |s| w.pdf(s)))
            }
            Reference::None => None,
        })
    }
}

fn nn_dist(input: &Input, nmax: usize, bin_width: f64) -> Result<()> {
    let started = Instant::now();
    let (batch, _, mut manifest) = load(input, "nn-dist")?;
    let _lock = lock_for(&input.out)?;
    manifest.set("nmax", nmax);
    manifest.set("bin_width", bin_width);
    let u = windowed(&batch, &mut manifest)?;
    let hists = spacing_distributions(&u, nmax, bin_width)?;
    let reference = Reference::of(batch.info().kind);
    let mut rows = Vec::new();
    for h in &hists {
        let theory = reference.pdf(h.n)?;
        let fitted = GammaSurmise::new(h.n, fit_gamma(&spacings(&u, h.n), h.n, None)?.gamma_hat)?;
        for (c, d) in h.centers().into_iter().zip(&h.densities) {
            rows.push(vec![
                h.n.into(),
                c.into(),
                (*d).into(),
                theory.as_ref().map(|f| f(c)).into(),
                fitted.pdf(c).into(),
            ]);
        }
    }
    finish(manifest, started, &input.out, &["n", "s_center", "density", "theory_gamma", "theory_fitted"], &rows)
}

fn fit_gamma_cmd(input: &Input, nmax: usize) -> Result<()> {
    let started = Instant::now();
    let (batch, _, mut manifest) = load(input, "fit-gamma")?;
    let _lock = lock_for(&input.out)?;
    manifest.set("nmax", nmax);
    manifest.set("objective", "maximum likelihood");
    let u = windowed(&batch, &mut manifest)?;
    let kind = batch.info().kind;
    let mut rows = Vec::new();
    for n in 0..=nmax {
        let fit = fit_gamma(&spacings(&u, n), n, None)?;
        let table = kind.map(|k| gamma_exponent(k, n));
        println!("n = {n}: gamma = {:.3} +- {:.3}{}", fit.gamma_hat, fit.stderr, table.map_or(String::new(), |t| format!("  (law {t})")));
        rows.push(vec![n.into(), fit.gamma_hat.into(), fit.stderr.into(), table.into()]);
    }
    finish(manifest, started, &input.out, &["n", "gamma_hat", "stderr", "gamma_table"], &rows)
}

fn form_factor(a: FormFactorArgs) -> Result<()> {
    let started = Instant::now();
    let (batch, _, mut manifest) = load(&a.input, "form-factor")?;
    let _lock = lock_for(&a.input.out)?;
    let grid = uniform_grid(a.tau_min, a.tau_max, a.tau_step)?;
    let options = FormFactorOptions {
        taper: match a.taper {
            TaperArg::Flat => Taper::Flat,
            TaperArg::Gaussian => Taper::Gaussian,
        },
        levels: match a.levels {
            LevelsArg::Full => LevelRange::Full,
            LevelsArg::Window => LevelRange::Window,
        },
    };
    manifest.set("tau_grid", [a.tau_min, a.tau_max, a.tau_step]);
    manifest.set("options", options);
    let plasma = a.plasma.map(PlasmaModel::from_index).transpose()?;
    manifest.set("plasma", a.plasma);
    let u = windowed(&batch, &mut manifest)?;
    let curve = empirical_form_factor(&u, &grid, options)?;
    let law = batch.info().kind.and_then(ExponentLaw::for_kind);

    let chi_grid = uniform_grid(0.002, 0.5, 0.002)?;
    let chi_curve = empirical_form_factor(&u, &chi_grid, FormFactorOptions::TAPERED)?;
    let est = estimate_compressibility(&chi_curve, CUTOFF_FACTOR)?;
    manifest.set("compressibility_options", FormFactorOptions::TAPERED);
    manifest.set("compressibility_cutoff_factor", CUTOFF_FACTOR);
    println!(
        "chi = {:.4} +- {:.4} (plateau mean {:.4}, tau in [{:.3}, {:.3}]{})",
        est.chi,
        est.stderr,
        est.plateau_mean,
        est.tau_lo,
        est.tau_hi,
        if est.plateau_found { "" } else { ", no stable plateau" }
    );
    if let Some(l) = law {
        println!("theory chi = 1/p = {:.4}", compressibility(l)?);
    }

    let mut rows = Vec::with_capacity(grid.len());
    for (t, k) in curve.tau.iter().zip(&curve.k) {
        let theory = law.map(|l| theoretical_form_factor(l, *t)).transpose()?;
        let p = plasma.map(|m| plasma_form_factor(m, *t)).transpose()?;
        rows.push(vec![(*t).into(), (*k).into(), theory.into(), p.into()]);
    }
    finish(manifest, started, &a.input.out, &["tau", "K_empirical", "K_theory", "K_plasma"], &rows)
}

fn number_variance_cmd(input: &Input, lmax: Option<f64>, lstep: f64, seed: u64) -> Result<()> {
    let started = Instant::now();
    let (batch, _, mut manifest) = load(input, "number-variance")?;
    let _lock = lock_for(&input.out)?;
    let u = windowed(&batch, &mut manifest)?;
    let lmax = lmax.unwrap_or(u.window().len() as f64 / 4.0);
    let grid = uniform_grid(lstep, lmax, lstep)?;
    manifest.set("l_grid", [lstep, lmax, lstep]);
    manifest.set("placement_seed", seed);
    let points = number_variance(&u, &grid, seed)?;
    let mut rows = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        // slope over the upper half of the points up to L
        let lo = i.div_ceil(2);
        let slope = if i + 1 - lo >= 3 {
            let x: Vec<f64> = points[lo..=i].iter().map(|q| q.l).collect();
            let y: Vec<f64> = points[lo..=i].iter().map(|q| q.sigma2).collect();
            Some(linear_fit(&x, &y)?.slope)
        } else {
            None
        };
        rows.push(vec![p.l.into(), p.sigma2.into(), slope.into()]);
    }
    finish(manifest, started, &input.out, &["L", "sigma2", "chi_slope_running"], &rows)
}

fn parse_ladder(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|pair| {
            let (n, m) = pair
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("ladder entry {pair:?} is not N:M")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad ladder number {x:?}")))
            };
            Ok((parse(n)?, parse(m)?))
        })
        .collect()
}

fn fractal(a: FractalArgs) -> Result<()> {
    let started = Instant::now();
    let ladder = match &a.ladder {
        Some(s) => parse_ladder(s)?,
        None => DEFAULT_LADDER.to_vec(),
    };
    let _lock = lock_for(&a.out)?;
    let q = default_q_grid();
    let mut manifest = RunManifest::new("fractal");
    manifest.ensemble = Some(a.ensemble);
    manifest.seed = Some(a.seed);
    manifest.set("ladder", &ladder);
    manifest.set("q_grid", &q);
    manifest.set("basis", "unitary DFT of eigenvectors");
    let table = run_ladder(a.ensemble, &ladder, &q, a.seed)?;
    let report = scaling_exponents(&table)?;
    println!("D1 = {:.4} +- {:.4}", report.d1, report.d1_stderr);
    if let Some((d2, e2)) = report.d_at(2.0) {
        println!("D2 = {d2:.4} +- {e2:.4}");
    }
    let mut rows = Vec::new();
    for i in 0..report.q.len() {
        rows.push(vec![
            report.q[i].into(),
            report.tau_q[i].into(),
            report.d_q[i].into(),
            report.delta_q[i].into(),
            report.tau_stderr[i].into(),
        ]);
    }
    rows.push(vec![1.0.into(), 0.0.into(), report.d1.into(), 0.0.into(), report.d1_stderr.into()]);
    rows.sort_by(|x, y| match (&x[0], &y[0]) {
        (Cell::Float(a), Cell::Float(b)) => a.total_cmp(b),
        _ => std::cmp::Ordering::Equal,
    });
    finish(manifest, started, &a.out, &["q", "tau_q", "D_q", "Delta_q", "stderr"], &rows)
}

fn parse_law(s: &str) -> Result<ExponentLaw> {
    let (p, k) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidInput(format!("law {s:?} is not p,k")))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("bad number {x:?} in law")))
    };
    Ok(ExponentLaw::new(num(p)?, num(k)?))
}

fn theory(a: TheoryArgs) -> Result<()> {
    let started = Instant::now();
    let _lock = lock_for(&a.out)?;
    let grid = uniform_grid(0.0, a.xmax, a.step)?;
    let mut manifest = RunManifest::new("theory");
    manifest.set("grid", [0.0, a.xmax, a.step]);
    manifest.set("nmax", a.nmax);
    let mut columns: Vec<String> = vec!["x".into()];
    columns.extend((0..=a.nmax).map(|n| format!("P_{n}")));
    columns.push("K".into());
    let mut rows = Vec::with_capacity(grid.len());
    if let Some(law) = &a.source.law {
        let law = parse_law(law)?;
        manifest.set("law", law);
        let surmises = (0..=a.nmax)
            .map(|n| GammaSurmise::new(n, law.gamma(n)))
            .collect::<Result<Vec<_>>>()?;
        for &x in &grid {
            let mut row: Vec<Cell> = vec![x.into()];
            row.extend(surmises.iter().map(|g| g.pdf(x).into()));
            let k = if x == 0.0 { compressibility(law)? } else { theoretical_form_factor(law, x)? };
            row.push(k.into());
            rows.push(row);
        }
    } else {
        let model = PlasmaModel::from_index(a.source.plasma.expect("clap group"))?;
        manifest.set("plasma", a.source.plasma);
        if a.nmax > 2 {
            return Err(Error::InvalidInput("plasma P_n is tabulated for n <= 2".into()));
        }
        for &x in &grid {
            let mut row: Vec<Cell> = vec![x.into()];
            for n in 0..=a.nmax {
                row.push(plasma_pn(model, n, x)?.into());
            }
            row.push(plasma_form_factor(model, x)?.into());
            rows.push(row);
        }
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    finish(manifest, started, &a.out, &cols, &rows)
}

fn zero_modes(kind: EnsembleKind, nmax: usize) -> Result<()> {
    println!("{:>2} {:>4} {:>10} {:>7} {:>10}", "n", "q_n", "zero_modes", "gamma_n", "expected");
    let mut all_ok = true;
    for n in 0..=nmax {
        let q = parameter_count(kind, n);
        let z = count_zero_modes(kind, n)?;
        let gamma = q as i64 - z as i64 - 1;
        let expected = gamma_exponent(kind, n);
        let ok = (gamma as f64 - expected).abs() < 1e-9;
        all_ok &= ok;
        println!("{n:>2} {q:>4} {z:>10} {gamma:>7} {expected:>10} {}", if ok { "ok" } else { "MISMATCH" });
    }
    if all_ok {
        Ok(())
    } else {
        Err(Error::Numerical(format!("zero-mode count disagrees with the exponent law for {kind}")))
    }
}

fn displacement_check(kind: EnsembleKind, dim: usize, trials: usize, seed: u64) -> Result<()> {
    use EnsembleKind::*;
    let (label, bound, op): (&str, usize, Displacement) = match kind {
        ToeplitzReal | ToeplitzComplex => ("T - Z T Z^T", 2, toeplitz_displacement),
        Hankel => ("Z H - H Z^T", 2, hankel_displacement),
        _ => ("A M - M A, A = Z + Z^T", 4, th_displacement),
    };
    let ranks = map_realizations(kind, dim, trials, seed, |_, m| {
        let d = op(m.as_matrix())?;
        numerical_rank(&d, default_rank_tolerance(&d))
    })?;
    let max = ranks.iter().copied().max().unwrap_or(0);
    println!("{kind}: displacement {label}, N = {dim}, {trials} trials");
    println!("max observed rank = {max} (structural bound {bound})");
    Ok(())
}
