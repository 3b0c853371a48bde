//! Empirical spectral statistics: density, unfolding, windows, spacing
//! distributions, number variance and the form factor.

mod batch;
mod form_factor;
mod spacing;
mod unfold;

pub use batch::{mean_density, BatchInfo, DensityHistogram, SpectraBatch};
pub use form_factor::{
    empirical_form_factor, estimate_compressibility, uniform_grid, CompressibilityEstimate, FormFactorCurve, CUTOFF_FACTOR, PLATEAU_END,
    FormFactorOptions, LevelRange, Taper,
};
pub use spacing::{
    ks_distance, number_variance, pair_correlation, spacing_distributions, spacings, NumberVariancePoint,
    SpacingHistogram, DEFAULT_BIN_WIDTH, PLACEMENTS_PER_ROW,
};
pub use unfold::{select_window, unfold, UnfoldedSpectrum};
