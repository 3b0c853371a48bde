//! Multifractal analysis of eigenvectors in Fourier space.
//!
//! Moments `<sum_p |psi_p|^{2q}>` over a window of eigenvectors scale as
//! `N^{-tau(q)}`. From the fitted exponents: `D_q = tau(q) / (q - 1)`,
//! `Delta_q = (D_q - 1)(q - 1)`, and `D_1` from the entropy
//! `<sum_p |psi_p|^2 ln |psi_p|^2> ~ -D_1 ln N`.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};
use crate::fitting::linear_fit;
use crate::linalg::{dft, eigh_window, CMatrix, EigenDecomposition, HermitianMatrix};
use crate::pipeline::{map_realizations, simulate_spectra};
use crate::stats::{select_window, unfold};

/// Components with `|psi_p|^2` below this are left out of negative moments.
pub const NEGATIVE_Q_FLOOR: f64 = 1e-14;
/// Realizations used to locate the Hankel right-peak window.
pub const PILOT_REALIZATIONS: usize = 24;

/// Default ladder `(N, realizations)`.
pub const DEFAULT_LADDER: [(usize, usize); 4] = [(128, 2000), (256, 800), (512, 300), (1024, 100)];

/// `-2, -1.75, ..., 4` without `q = 1`.
pub fn default_q_grid() -> Vec<f64> {
    (0..=24).map(|i| -2.0 + 0.25 * i as f64).filter(|&q| q != 1.0).collect()
}

/// Column-wise unitary DFT of eigenvectors.
pub fn fourier_columns(vectors: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(vectors.rows(), vectors.cols());
    for j in 0..vectors.cols() {
        out.set_column(j, &dft(&vectors.column(j), 1));
    }
    out
}

pub fn fourier_eigenvectors(decomp: &EigenDecomposition) -> Result<CMatrix> {
    let v = decomp
        .vectors
        .as_ref()
        .ok_or_else(|| Error::invalid("eigendecomposition has no eigenvectors"))?;
    Ok(fourier_columns(v))
}

/// Moment sums of one vector of intensities `|psi_p|^2`.
fn vector_moments(intensity: &[f64], q_grid: &[f64]) -> (Vec<f64>, f64, usize) {
    let small = intensity.iter().filter(|&&x| x < NEGATIVE_Q_FLOOR).count();
    let sums = q_grid
        .iter()
        .map(|&q| {
            if q == 0.0 {
                intensity.len() as f64
            } else if q < 0.0 {
                intensity.iter().filter(|&&x| x >= NEGATIVE_Q_FLOOR).map(|x| x.powf(q)).sum()
            } else {
                intensity.iter().map(|x| x.powf(q)).sum()
            }
        })
        .collect();
    let entropy = intensity.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum();
    (sums, entropy, small)
}

/// Running sums for the moments of one matrix size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub dim: usize,
    pub realizations: usize,
    pub vectors: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub entropy_mean: f64,
    pub entropy_stderr: f64,
    /// Fraction of components excluded from negative moments.
    pub excluded_fraction: f64,
}

#[derive(Default)]
struct Accum {
    s1: Vec<f64>,
    s2: Vec<f64>,
    e1: f64,
    e2: f64,
    vectors: usize,
    components: usize,
    excluded: usize,
}

impl Accum {
    fn new(nq: usize) -> Self {
        Accum {
            s1: vec![0.0; nq],
            s2: vec![0.0; nq],
            ..Default::default()
        }
    }

    fn add_columns(&mut self, psi_hat: &CMatrix, q_grid: &[f64]) {
        for j in 0..psi_hat.cols() {
            let intensity: Vec<f64> = psi_hat.column(j).iter().map(|z| z.norm_sqr()).collect();
            let (sums, entropy, small) = vector_moments(&intensity, q_grid);
            for (k, v) in sums.into_iter().enumerate() {
                self.s1[k] += v;
                self.s2[k] += v * v;
            }
            self.e1 += entropy;
            self.e2 += entropy * entropy;
            self.vectors += 1;
            self.components += intensity.len();
            self.excluded += small;
        }
    }

    fn merge(&mut self, other: &Accum) {
        for k in 0..self.s1.len() {
            self.s1[k] += other.s1[k];
            self.s2[k] += other.s2[k];
        }
        self.e1 += other.e1;
        self.e2 += other.e2;
        self.vectors += other.vectors;
        self.components += other.components;
        self.excluded += other.excluded;
    }

    fn finish(&self, dim: usize, realizations: usize) -> MomentRow {
        let n = self.vectors as f64;
        let se = |s1: f64, s2: f64| {
            let mean = s1 / n;
            let var = ((s2 / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
            (mean, (var / n).sqrt())
        };
        let (mean, stderr) = self.s1.iter().zip(&self.s2).map(|(&a, &b)| se(a, b)).unzip();
        let (entropy_mean, entropy_stderr) = se(self.e1, self.e2);
        MomentRow {
            dim,
            realizations,
            vectors: self.vectors,
            mean,
            stderr,
            entropy_mean,
            entropy_stderr,
            excluded_fraction: self.excluded as f64 / self.components.max(1) as f64,
        }
    }
}

/// Moments of a set of Fourier-space vectors (columns), as a table row.
pub fn moments(psi_hat: &CMatrix, q_grid: &[f64]) -> Result<MomentRow> {
    if psi_hat.cols() == 0 {
        return Err(Error::Empty("eigenvector window"));
    }
    let mut acc = Accum::new(q_grid.len());
    acc.add_columns(psi_hat, q_grid);
    Ok(acc.finish(psi_hat.rows(), 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub q: Vec<f64>,
    pub rows: Vec<MomentRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultifractalReport {
    pub q: Vec<f64>,
    pub tau_q: Vec<f64>,
    pub tau_stderr: Vec<f64>,
    pub d_q: Vec<f64>,
    pub d_stderr: Vec<f64>,
    pub delta_q: Vec<f64>,
    pub d1: f64,
    pub d1_stderr: f64,
    pub dims: Vec<usize>,
}

impl MultifractalReport {
    /// `D_q` at the grid point closest to `q`.
    pub fn d_at(&self, q: f64) -> Option<(f64, f64)> {
        let i = self.index_of(q)?;
        Some((self.d_q[i], self.d_stderr[i]))
    }

    fn index_of(&self, q: f64) -> Option<usize> {
        self.q.iter().position(|&x| (x - q).abs() < 1e-9)
    }
}

/// Slope of `y` against `x` with an error that combines the regression
/// residual with the propagated statistical errors `sy` of each point.
fn slope_with_error(x: &[f64], y: &[f64], sy: &[f64]) -> Result<(f64, f64)> {
    let fit = linear_fit(x, y)?;
    let mx = x.iter().sum::<f64>() / x.len() as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let stat = x.iter().zip(sy).map(|(v, s)| ((v - mx) * s).powi(2)).sum::<f64>().sqrt() / sxx;
    Ok((fit.slope, (fit.slope_stderr.powi(2) + stat.powi(2)).sqrt()))
}

/// Regresses log-moments on `ln N`.
pub fn scaling_exponents(table: &MomentTable) -> Result<MultifractalReport> {
    let mut dims: Vec<usize> = table.rows.iter().map(|r| r.dim).collect();
    dims.dedup();
    if dims.len() < 4 {
        return Err(Error::invalid(format!("scaling fit needs at least 4 matrix sizes, got {}", dims.len())));
    }
    let x: Vec<f64> = table.rows.iter().map(|r| (r.dim as f64).ln()).collect();
    let mut tau_q = Vec::new();
    let mut tau_stderr = Vec::new();
    for k in 0..table.q.len() {
        let y: Vec<f64> = table.rows.iter().map(|r| r.mean[k].ln()).collect();
        let sy: Vec<f64> = table.rows.iter().map(|r| r.stderr[k] / r.mean[k]).collect();
        let (slope, err) = slope_with_error(&x, &y, &sy)?;
        tau_q.push(-slope);
        tau_stderr.push(err);
    }
    let ent: Vec<f64> = table.rows.iter().map(|r| r.entropy_mean).collect();
    let ent_err: Vec<f64> = table.rows.iter().map(|r| r.entropy_stderr).collect();
    let (slope, d1_stderr) = slope_with_error(&x, &ent, &ent_err)?;

    let mut d_q = Vec::new();
    let mut d_stderr = Vec::new();
    let mut delta_q = Vec::new();
    for (k, &q) in table.q.iter().enumerate() {
        if (q - 1.0).abs() < 1e-12 {
            d_q.push(-slope);
            d_stderr.push(d1_stderr);
            delta_q.push(0.0);
        } else {
            d_q.push(tau_q[k] / (q - 1.0));
            d_stderr.push(tau_stderr[k] / (q - 1.0).abs());
            delta_q.push(tau_q[k] - (q - 1.0));
        }
    }
    Ok(MultifractalReport {
        q: table.q.clone(),
        tau_q,
        tau_stderr,
        d_q,
        d_stderr,
        delta_q,
        d1: -slope,
        d1_stderr,
        dims,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRow {
    pub q: f64,
    pub delta_q: f64,
    pub delta_mirror: f64,
    pub difference: f64,
    pub stderr: f64,
    /// `|q| < 1`, where the symmetry is expected to hold.
    pub inside_expected_region: bool,
}

/// `Delta_q - Delta_{1-q}` for every grid point whose mirror is on the
/// grid (`Delta_1 = 0` by definition).
pub fn symmetry_check(report: &MultifractalReport) -> Vec<SymmetryRow> {
    let delta_err = |i: usize| report.tau_stderr[i];
    let lookup = |q: f64| -> Option<(f64, f64)> {
        if (q - 1.0).abs() < 1e-9 {
            return Some((0.0, 0.0));
        }
        report.index_of(q).map(|i| (report.delta_q[i], delta_err(i)))
    };
    report
        .q
        .iter()
        .enumerate()
        .filter_map(|(i, &q)| {
            let (dm, em) = lookup(1.0 - q)?;
            let same = (q - 0.5).abs() < 1e-12;
            let d = report.delta_q[i];
            Some(SymmetryRow {
                q,
                delta_q: d,
                delta_mirror: dm,
                difference: if same { 0.0 } else { d - dm },
                stderr: if same { 0.0 } else { (delta_err(i).powi(2) + em.powi(2)).sqrt() },
                inside_expected_region: q.abs() < 1.0,
            })
        })
        .collect()
}

/// Eigenvector index range analysed at size `dim`: the central quarter,
/// or for Hankel the quarter centred on the right density peak, located
/// from a pilot batch.
pub fn eigenvector_window(kind: EnsembleKind, dim: usize, seed: u64) -> Result<Range<usize>> {
    if kind != EnsembleKind::Hankel {
        return Ok(3 * dim / 8..3 * dim / 8 + dim / 4);
    }
    let pilot = simulate_spectra(kind, dim, PILOT_REALIZATIONS, seed ^ 0x5eed_0f9a_1107)?;
    Ok(select_window(&unfold(&pilot)?, Some(kind))?.window())
}

/// Moments over the ladder, one row per `(N, M)`.
pub fn run_ladder(kind: EnsembleKind, ladder: &[(usize, usize)], q_grid: &[f64], seed: u64) -> Result<MomentTable> {
    let mut rows = Vec::with_capacity(ladder.len());
    for &(dim, count) in ladder {
        let window = eigenvector_window(kind, dim, seed)?;
        let parts = map_realizations(kind, dim, count, seed, |_, m| {
            let w = eigh_window(&m, window.clone())?;
            let mut acc = Accum::new(q_grid.len());
            acc.add_columns(&fourier_columns(&w.vectors), q_grid);
            Ok(acc)
        })?;
        let mut total = Accum::new(q_grid.len());
        for p in &parts {
            total.merge(p);
        }
        rows.push(total.finish(dim, count));
    }
    Ok(MomentTable { q: q_grid.to_vec(), rows })
}

/// Hankel matrix conjugated by the 1-based Fourier matrix
/// `U_{mk} = exp(2 pi i k m / N) / sqrt(N)`, from its closed form.
///
/// `h` holds `h_2, ..., h_{2N}`. With `d_{mn} = [m + n = 0 mod N]`:
/// `H_mn = xi_n d_mn - (1 - d_mn) [eta_n / (1 - w^{-(m+n)}) + conj(eta_m) / (1 - w^{m+n})]`,
/// `w = exp(2 pi i / N)`,
/// `eta_n = (1/N) sum_{r=2}^{N} (h_r - h_{r+N}) w^{-rn}`,
/// `xi_n = (1/N) sum_{r=2}^{N} (h_r - h_{r+N}) (r - 1) w^{-rn} + sum_{r=1}^{N} h_{r+N} w^{-rn}`.
pub fn hankel_fourier_matrix(h: &[f64], dim: usize) -> Result<HermitianMatrix> {
    if dim == 0 || h.len() != 2 * dim - 1 {
        return Err(Error::invalid(format!(
            "Hankel of size {dim} needs {} parameters, got {}",
            2 * dim.max(1) - 1,
            h.len()
        )));
    }
    let hv = |r: usize| h[r - 2];
    let nf = dim as f64;
    let w = |k: i64| Complex64::from_polar(1.0, 2.0 * PI * (k.rem_euclid(dim as i64)) as f64 / nf);
    let eta: Vec<Complex64> = (1..=dim)
        .map(|n| {
            (2..=dim).map(|r| w(-((r * n) as i64)) * (hv(r) - hv(r + dim))).sum::<Complex64>() / nf
        })
        .collect();
    let xi: Vec<Complex64> = (1..=dim)
        .map(|n| {
            let a: Complex64 = (2..=dim)
                .map(|r| w(-((r * n) as i64)) * ((hv(r) - hv(r + dim)) * (r as f64 - 1.0)))
                .sum::<Complex64>()
                / nf;
            let b: Complex64 = (1..=dim).map(|r| w(-((r * n) as i64)) * hv(r + dim)).sum();
            a + b
        })
        .collect();
    let one = Complex64::new(1.0, 0.0);
    Ok(HermitianMatrix::from_upper(dim, |j, k| {
        let (m, n) = (j + 1, k + 1);
        if (m + n) % dim == 0 {
            xi[n - 1]
        } else {
            let s = (m + n) as i64;
            -(eta[n - 1] / (one - w(-s)) + eta[m - 1].conj() / (one - w(s)))
        }
    }))
}
