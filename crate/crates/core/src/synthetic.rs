//! Synthetic level sequences with known statistics, used as oracles for
//! the spectral pipeline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::SpectraBatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointProcess {
    /// Unit-rate Poisson process: cumulative exponential gaps.
    Poisson,
    /// Poisson process keeping every `k`-th point, rescaled to unit density.
    /// `k = 2` has semi-Poisson statistics, `P_0(s) = 4 s exp(-2 s)`.
    Daisy(usize),
    /// `N` uniform points on `[0, N]`, sorted (a Poisson process
    /// conditioned on its count).
    Uniform,
    /// `e_j = j`.
    PicketFence,
}

impl PointProcess {
    pub fn name(&self) -> String {
        match self {
            PointProcess::Poisson => "poisson".into(),
            PointProcess::Daisy(k) => format!("daisy-{k}"),
            PointProcess::Uniform => "uniform".into(),
            PointProcess::PicketFence => "picket-fence".into(),
        }
    }

    /// One row of `len` levels; `row` selects an independent RNG stream.
    pub fn sample_row(&self, len: usize, seed: u64, row: u64) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(row);
        match *self {
            PointProcess::Poisson => renewal(&mut rng, len, 1),
            PointProcess::Daisy(k) => renewal(&mut rng, len, k),
            PointProcess::Uniform => {
                let mut v: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * len as f64).collect();
                v.sort_by(f64::total_cmp);
                v
            }
            PointProcess::PicketFence => (0..len).map(|j| j as f64).collect(),
        }
    }
}

fn renewal(rng: &mut ChaCha20Rng, len: usize, keep_every: usize) -> Vec<f64> {
    let mut x = 0.0;
    (0..len)
        .map(|_| {
            for _ in 0..keep_every {
                x += rng.sample::<f64, _>(Exp1);
            }
            x / keep_every as f64
        })
        .collect()
}

/// `count` rows of `dim` levels.
pub fn synthetic_batch(process: PointProcess, dim: usize, count: usize, seed: u64) -> Result<SpectraBatch> {
    if let PointProcess::Daisy(0) = process {
        return Err(Error::invalid("daisy thinning factor must be at least 1"));
    }
    if dim == 0 || count == 0 {
        return Err(Error::invalid("synthetic batch needs dim >= 1 and count >= 1"));
    }
    let rows = (0..count as u64).map(|r| process.sample_row(dim, seed, r)).collect();
    SpectraBatch::from_rows(process.name(), None, seed, rows)
}
