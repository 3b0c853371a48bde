//! Short-range plasma models with nearest and next-to-nearest neighbour
//! interaction. Model 1 has `gamma_n = 3n + 1`, model 2 `gamma_n = 4n + 2`.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlasmaModel {
    /// Equal `beta = 1` interaction of nearest and next-to-nearest levels.
    One,
    /// `beta = 2` between nearest and `beta = 1` between next-to-nearest levels.
    Two,
}

impl PlasmaModel {
    pub fn from_index(model: u8) -> Result<Self> {
        match model {
            1 => Ok(PlasmaModel::One),
            2 => Ok(PlasmaModel::Two),
            _ => Err(Error::invalid(format!("plasma model must be 1 or 2, got {model}"))),
        }
    }

    pub fn gamma(self, n: usize) -> f64 {
        match self {
            PlasmaModel::One => 3.0 * n as f64 + 1.0,
            PlasmaModel::Two => 4.0 * n as f64 + 2.0,
        }
    }

    /// `K(0)`, the compressibility of the model.
    pub fn compressibility(self) -> f64 {
        match self {
            PlasmaModel::One => 1.0 / 3.0,
            PlasmaModel::Two => 0.25,
        }
    }
}

impl FromStr for PlasmaModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let idx: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("plasma model must be 1 or 2, got '{s}'")))?;
        PlasmaModel::from_index(idx)
    }
}

/// Exact nearest-neighbour densities `P_n(s)` for `n <= 2`.
pub fn plasma_pn(model: PlasmaModel, n: usize, s: f64) -> Result<f64> {
    if n > 2 {
        return Err(Error::invalid(format!("plasma densities are available for n <= 2, got {n}")));
    }
    if s < 0.0 {
        return Ok(0.0);
    }
    let s6 = 6f64.sqrt();
    let s3 = 3f64.sqrt();
    let v = match (model, n) {
        (PlasmaModel::One, 0) => 4.5 * (3.0 - s6) * s * (-3.0 * s).exp() * (1.0 + s6 / 2.0 * s).powi(2),
        (PlasmaModel::One, 1) => {
            81.0 / 8.0 * (5.0 * s6 - 12.0) * s.powi(4) * (-3.0 * s).exp() * (1.0 + s6 / 2.0 * s + 0.3 * s * s)
        }
        (PlasmaModel::One, _) => {
            6561.0 / 1120.0
                * (27.0 - 11.0 * s6)
                * s.powi(7)
                * (-3.0 * s).exp()
                * (1.0 + 11.0 / 36.0 * s6 * s + s * s / 8.0)
        }
        (PlasmaModel::Two, 0) => 32.0 * (2.0 - s3) * s * s * (-4.0 * s).exp() * (1.0 + 2.0 * s3 / 3.0 * s).powi(2),
        (PlasmaModel::Two, 1) => {
            2048.0 / 45.0
                * (7.0 * s3 - 12.0)
                * s.powi(6)
                * (-4.0 * s).exp()
                * (1.0 + 2.0 * s3 / 3.0 * s + 2.0 / 7.0 * s * s)
        }
        (PlasmaModel::Two, _) => {
            16384.0 * 13.0 / 14175.0
                * (26.0 - 15.0 * s3)
                * s.powi(10)
                * (-4.0 * s).exp()
                * (1.0 + 60.0 * s3 / 143.0 * s + 4.0 / 33.0 * s * s)
        }
    };
    Ok(v)
}

/// Laplace transform of the two-point function, rational in `t`.
fn g2(model: PlasmaModel, t: Complex64) -> Complex64 {
    match model {
        PlasmaModel::One => {
            let c = 5.0 - 2.0 * 6f64.sqrt();
            let u = t + 3.0;
            9.0 / (4.0 * u) * ((t + 6.0).powi(2) / (u.powi(3) - 27.0) + t * t * c / (u.powi(3) + 27.0 * c))
        }
        PlasmaModel::Two => {
            let c = 7.0 - 4.0 * 3f64.sqrt();
            let u = t + 4.0;
            16.0 / u * ((t + 8.0).powi(2) / (u.powi(4) - 256.0) + t * t * c / (u.powi(4) + 256.0 * c))
        }
    }
}

/// `K(tau) = 1 + 2 Re g_2(2 pi i tau)`; `g_2` has a simple pole at `t = 0`
/// with imaginary residue, so `tau = 0` returns the exact limit `K(0)`.
pub fn plasma_form_factor(model: PlasmaModel, tau: f64) -> Result<f64> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::invalid(format!("form factor needs tau >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(model.compressibility());
    }
    let t = Complex64::new(0.0, 2.0 * std::f64::consts::PI * tau);
    Ok(1.0 + 2.0 * g2(model, t).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate_half_line;

    const MODELS: [PlasmaModel; 2] = [PlasmaModel::One, PlasmaModel::Two];

    #[test]
    fn densities_are_normalized_with_unit_mean_spacing() {
        for model in MODELS {
            for n in 0..=2 {
                let scale = (n + 1) as f64;
                let mass = integrate_half_line(|s| plasma_pn(model, n, s).unwrap(), scale, 1e-12).unwrap();
                let mean = integrate_half_line(|s| s * plasma_pn(model, n, s).unwrap(), scale, 1e-12).unwrap();
                assert!((mass.value - 1.0).abs() < 1e-8, "{model:?} n={n} mass={}", mass.value);
                assert!((mean.value - scale).abs() < 1e-8, "{model:?} n={n} mean={}", mean.value);
            }
        }
    }

    #[test]
    fn leading_coefficient() {
        let s = 1e-9;
        let c = plasma_pn(PlasmaModel::One, 0, s).unwrap() / s;
        assert!((c - 2.477).abs() < 1e-3);
    }

    #[test]
    fn small_s_exponent() {
        for model in MODELS {
            for n in 0..=2 {
                let (s1, s2) = (1e-4, 1e-3);
                let slope = (plasma_pn(model, n, s2).unwrap().ln() - plasma_pn(model, n, s1).unwrap().ln())
                    / (s2.ln() - s1.ln());
                assert!((slope - model.gamma(n)).abs() < 0.02, "{model:?} n={n} slope={slope}");
            }
        }
    }

    #[test]
    fn form_factor_limits() {
        assert_eq!(plasma_form_factor(PlasmaModel::One, 0.0).unwrap(), 1.0 / 3.0);
        assert_eq!(plasma_form_factor(PlasmaModel::Two, 0.0).unwrap(), 0.25);
        assert!((plasma_form_factor(PlasmaModel::One, 1e-5).unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!((plasma_form_factor(PlasmaModel::Two, 1e-5).unwrap() - 0.25).abs() < 1e-6);
        // the linear onset P_0(s) ~ c s sets the large-tau approach K - 1 ~ -2c / (2 pi tau)^2
        let c = 4.5 * (3.0 - 6f64.sqrt());
        for tau in [10.0, 30.0] {
            let dev = plasma_form_factor(PlasmaModel::One, tau).unwrap() - 1.0;
            let lead = -2.0 * c / (2.0 * std::f64::consts::PI * tau).powi(2);
            assert!((dev - lead).abs() < 0.05 * lead.abs(), "tau={tau} dev={dev}");
        }
        assert!((plasma_form_factor(PlasmaModel::One, 30.0).unwrap() - 1.0).abs() < 1e-3);
        assert!((plasma_form_factor(PlasmaModel::Two, 10.0).unwrap() - 1.0).abs() < 1e-3);
        assert!(plasma_form_factor(PlasmaModel::One, -1.0).is_err());
    }

    #[test]
    fn rejects_unknown_order_and_model() {
        assert!(plasma_pn(PlasmaModel::One, 3, 1.0).is_err());
        assert!(PlasmaModel::from_index(3).is_err());
        assert_eq!("2".parse::<PlasmaModel>().unwrap(), PlasmaModel::Two);
    }
}
