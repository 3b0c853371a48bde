use num_complex::Complex64;

use super::ExponentLaw;
use crate::error::{Error, Result};

const TERM_CUTOFF: f64 = 1e-12;
const MAX_TERMS: usize = 100_000;

/// `base^(-m)` with real `m`. Bases here satisfy `Re base >= 1`, so the
/// principal logarithm never crosses its branch cut.
fn neg_pow(base: Complex64, m: f64) -> Complex64 {
    debug_assert!(base.re > 0.0);
    (-m * base.ln()).exp()
}

/// Laplace transform `g(t) = sum_n g_n(t)` of the summed gamma surmises,
/// split into a convergent difference series plus a geometric tail.
fn laplace_sum(law: ExponentLaw, t: Complex64) -> Complex64 {
    let (p, k) = (law.p, law.k);
    let one = Complex64::new(1.0, 0.0);
    let base = one + t / p;
    let damp = (-t * (p - k - 1.0) / (p + t)).exp();

    let mut f = Complex64::new(0.0, 0.0);
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let m = p * nf + k + 1.0;
        let exact = neg_pow(one + (nf + 1.0) * t / m, m);
        let asymptotic = neg_pow(base, m) * damp;
        let term = exact - asymptotic;
        f += term;
        if term.norm() < TERM_CUTOFF {
            break;
        }
    }
    let tail = base.powf(p - k - 1.0) / (base.powf(p) - one) * damp;
    f + tail
}

/// `K(tau) = 1 + 2 Re g(2 pi i tau)` for gamma surmises with `gamma_n = p n + k`.
pub fn theoretical_form_factor(law: ExponentLaw, tau: f64) -> Result<f64> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::invalid(format!(
            "form factor needs tau > 0 (tau -> 0 is the compressibility), got {tau}"
        )));
    }
    if law.p < 1.0 {
        return Err(Error::invalid(format!("exponent slope must be at least 1, got {}", law.p)));
    }
    let t = Complex64::new(0.0, 2.0 * std::f64::consts::PI * tau);
    Ok(1.0 + 2.0 * laplace_sum(law, t).re)
}

/// `chi = lim_{tau -> 0} K(tau) = 1 / p`.
pub fn compressibility(law: ExponentLaw) -> Result<f64> {
    if law.p.is_nan() || law.p < 1.0 {
        return Err(Error::invalid(format!("exponent slope must be at least 1, got {}", law.p)));
    }
    Ok(1.0 / law.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn semi_poisson(tau: f64) -> f64 {
        let x = PI * PI * tau * tau;
        (2.0 + x) / (4.0 + x)
    }

    #[test]
    fn semi_poisson_closed_form() {
        let law = ExponentLaw::new(2.0, 1.0);
        for i in 1..=500 {
            let tau = 0.01 * i as f64;
            let k = theoretical_form_factor(law, tau).unwrap();
            assert!((k - semi_poisson(tau)).abs() < 1e-6, "tau={tau}");
        }
        assert!((theoretical_form_factor(law, 1.0).unwrap() - 0.85580).abs() < 1e-5);
    }

    #[test]
    fn small_tau_tends_to_compressibility() {
        let law = ExponentLaw::new(3.0, 1.0);
        let k = theoretical_form_factor(law, 1e-3).unwrap();
        assert!((k - 1.0 / 3.0).abs() < 1e-2, "{k}");
        let law = ExponentLaw::new(4.0, 2.0);
        assert!((theoretical_form_factor(law, 1e-3).unwrap() - 0.25).abs() < 1e-2);
    }

    #[test]
    fn large_tau_tends_to_one() {
        let law = ExponentLaw::new(4.0, 2.0);
        assert!((theoretical_form_factor(law, 50.0).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn poisson_law_is_flat() {
        let law = ExponentLaw::new(1.0, 0.0);
        for tau in [0.05, 0.3, 2.0] {
            assert!((theoretical_form_factor(law, tau).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_is_continuous_on_fine_grid() {
        for law in [ExponentLaw::new(2.0, 1.0), ExponentLaw::new(3.0, 1.0), ExponentLaw::new(4.0, 2.0)] {
            let mut prev = theoretical_form_factor(law, 0.005).unwrap();
            for i in 2..=600 {
                let k = theoretical_form_factor(law, 0.005 * i as f64).unwrap();
                assert!((k - prev).abs() < 0.02);
                prev = k;
            }
        }
    }

    #[test]
    fn compressibility_values() {
        assert_eq!(compressibility(ExponentLaw::new(2.0, 1.0)).unwrap(), 0.5);
        assert_eq!(compressibility(ExponentLaw::new(3.0, 1.0)).unwrap(), 1.0 / 3.0);
        assert_eq!(compressibility(ExponentLaw::new(4.0, 2.0)).unwrap(), 0.25);
        assert!(compressibility(ExponentLaw::new(0.5, 0.0)).is_err());
        assert!(theoretical_form_factor(ExponentLaw::new(2.0, 1.0), 0.0).is_err());
    }
}
