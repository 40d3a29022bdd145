//! Stokes moments and distinguishability of rotated linearly polarized
//! coherent states.

use num_complex::Complex64;
use serde::Serialize;

use crate::components::PolarizationUnitary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StokesMoments {
    pub means: [f64; 3],
    pub variances: [f64; 3],
}

/// Stokes means and variances of the two-mode coherent state
/// `|alpha_h, alpha_v>`.
///
/// `S1 = n_H - n_V`, `S2 = 2 Re(a_H^* a_V)`, `S3 = 2 Im(a_H^* a_V)`; for a
/// coherent state every Stokes variance equals the total mean photon number.
pub fn stokes_of_pulse(alpha_h: Complex64, alpha_v: Complex64) -> StokesMoments {
    let cross = alpha_h.conj() * alpha_v;
    let n = alpha_h.norm_sqr() + alpha_v.norm_sqr();
    StokesMoments {
        means: [alpha_h.norm_sqr() - alpha_v.norm_sqr(), 2.0 * cross.re, 2.0 * cross.im],
        variances: [n; 3],
    }
}

/// Stokes moments of `R(theta)|alpha, 0>`.
pub fn stokes_parameters(alpha: Complex64, theta: f64) -> StokesMoments {
    let [h, v] = PolarizationUnitary::rotation(theta).apply([alpha, Complex64::new(0.0, 0.0)]);
    stokes_of_pulse(h, v)
}

/// `exp(-2|alpha|^2 sin^2 theta)`, the closed form quoted in the literature
/// for this protocol. Differs from the true overlap; see
/// [`distinguishability_exact`].
pub fn distinguishability_paper(alpha: Complex64, theta: f64) -> f64 {
    (-2.0 * alpha.norm_sqr() * theta.sin().powi(2)).exp()
}

/// `|<alpha, 0| R(theta) |alpha, 0>|^2 = exp(-2|alpha|^2 (1 - cos theta))`.
pub fn distinguishability_exact(alpha: Complex64, theta: f64) -> f64 {
    // 1 - cos = 2 sin^2(theta/2) keeps precision at small angles
    (-4.0 * alpha.norm_sqr() * (theta / 2.0).sin().powi(2)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn stokes_cases() {
        let a = Complex64::new(1.5, -0.5);
        let n = a.norm_sqr();
        let s = stokes_parameters(a, 0.0);
        assert!((s.means[0] - n).abs() < 1e-12 && s.means[1].abs() < 1e-12 && s.means[2].abs() < 1e-12);
        let s = stokes_parameters(a, FRAC_PI_4);
        assert!(s.means[0].abs() < 1e-12 && (s.means[1] - n).abs() < 1e-12);
        let s = stokes_parameters(Complex64::new(0.0, 0.0), 0.3);
        assert_eq!(s.means, [0.0; 3]);
        assert_eq!(s.variances, [0.0; 3]);
    }

    #[test]
    fn distinguishability_cases() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(distinguishability_paper(one, 0.0), 1.0);
        assert_eq!(distinguishability_exact(one, 0.0), 1.0);
        assert!((distinguishability_paper(one, FRAC_PI_2) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((distinguishability_paper(one, PI) - 1.0).abs() < 1e-12);
        assert!((distinguishability_exact(one, PI) - (-4.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn exact_is_monotone_in_photon_number() {
        for theta in [0.1, 1.0, 2.0, PI] {
            let mut prev = 1.0;
            for k in 1..20 {
                let d = distinguishability_exact(Complex64::new(0.3 * k as f64, 0.0), theta);
                assert!(d < prev && d <= 1.0);
                prev = d;
            }
        }
    }
}
