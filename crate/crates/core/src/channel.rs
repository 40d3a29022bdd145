//! Stationary birefringent fiber channel.
//!
//! The channel maps `|H>` to `e^{i lambda} cos(phi)|H> + e^{i xi} sin(phi)|V>`.
//! Only the action on `|H>` matters for the corrector pipelines (everything
//! entering the fiber is horizontally polarized); the second column is the
//! SU(2) completion `(-e^{-i xi} sin(phi), e^{-i lambda} cos(phi))`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::components::{Optical, PolarizationUnitary};
use crate::state::Port;

/// Channel parameters `(lambda, xi, phi)`. Phases are wrapped into
/// `[0, 2pi)`, the mixing angle is clamped to `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    pub lambda_phase: f64,
    pub xi_phase: f64,
    pub phi_mix: f64,
}

impl ChannelParams {
    pub fn new(lambda_phase: f64, xi_phase: f64, phi_mix: f64) -> Self {
        ChannelParams {
            lambda_phase: wrap_phase(lambda_phase),
            xi_phase: wrap_phase(xi_phase),
            phi_mix: phi_mix.clamp(0.0, FRAC_PI_2),
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Matrix of the channel unitary.
    pub fn matrix(&self) -> PolarizationUnitary {
        channel_matrix(self)
    }
}

fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub fn channel_matrix(p: &ChannelParams) -> PolarizationUnitary {
    let (s, c) = p.phi_mix.sin_cos();
    let el = Complex64::from_polar(1.0, p.lambda_phase);
    let ex = Complex64::from_polar(1.0, p.xi_phase);
    PolarizationUnitary::from_rows([[el * c, -ex.conj() * s], [ex * s, el.conj() * c]])
}

/// Propagates every time-bin on the channel port through the same unitary.
pub fn apply_channel<S: Optical>(state: &S, p: &ChannelParams) -> S {
    state.apply_unitary(Port::Channel, None, &channel_matrix(p))
}

/// Distribution of a single channel parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamDist {
    Fixed(f64),
    /// Uniform on `[lo, hi)`.
    Uniform(f64, f64),
}

impl ParamDist {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ParamDist::Fixed(x) => x,
            ParamDist::Uniform(lo, hi) if hi > lo => rng.gen_range(lo..hi),
            ParamDist::Uniform(lo, _) => lo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDistribution {
    pub lambda_phase: ParamDist,
    pub xi_phase: ParamDist,
    pub phi_mix: ParamDist,
}

impl Default for ChannelDistribution {
    /// `phi ~ U[0, pi/2]`, `lambda, xi ~ U[0, 2pi)`.
    fn default() -> Self {
        ChannelDistribution {
            lambda_phase: ParamDist::Uniform(0.0, TAU),
            xi_phase: ParamDist::Uniform(0.0, TAU),
            phi_mix: ParamDist::Uniform(0.0, FRAC_PI_2),
        }
    }
}

impl ChannelDistribution {
    pub fn fixed(p: ChannelParams) -> Self {
        ChannelDistribution {
            lambda_phase: ParamDist::Fixed(p.lambda_phase),
            xi_phase: ParamDist::Fixed(p.xi_phase),
            phi_mix: ParamDist::Fixed(p.phi_mix),
        }
    }
}

pub fn sample_params<R: Rng + ?Sized>(rng: &mut R, dist: &ChannelDistribution) -> ChannelParams {
    let lambda = dist.lambda_phase.sample(rng);
    let xi = dist.xi_phase.sample(rng);
    let phi = dist.phi_mix.sample(rng);
    ChannelParams::new(lambda, xi, phi)
}

/// Uniform over the whole parameter box; handy for tests and sweeps.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> ChannelParams {
    sample_params(rng, &ChannelDistribution::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CoherentField, Slot};
    use crate::state::{overlap, ModeLabel, PhotonState, Pol};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_params() {
        let u = channel_matrix(&ChannelParams::identity());
        assert_eq!(u, PolarizationUnitary::identity());
    }

    #[test]
    fn quarter_turn_mixing() {
        let u = channel_matrix(&ChannelParams::new(0.0, 0.0, FRAC_PI_2));
        assert!((u.entry(Pol::V, Pol::H) - 1.0).norm() < 1e-15);
        assert!(u.entry(Pol::H, Pol::H).norm() < 1e-15);
        assert!((u.entry(Pol::H, Pol::V) + 1.0).norm() < 1e-15);
        assert!(u.entry(Pol::V, Pol::V).norm() < 1e-15);
    }

    #[test]
    fn acts_on_horizontal() {
        let p = ChannelParams::new(0.7, 2.1, 0.4);
        let h = PhotonState::new_qubit(c(1.0, 0.0), c(0.0, 0.0), Port::Channel).unwrap();
        let out = apply_channel(&h, &p);
        let eh = Complex64::from_polar(p.phi_mix.cos(), p.lambda_phase);
        let ev = Complex64::from_polar(p.phi_mix.sin(), p.xi_phase);
        assert!((out.amplitude(&ModeLabel::new(Pol::H, 0, Port::Channel)) - eh).norm() < 1e-15);
        assert!((out.amplitude(&ModeLabel::new(Pol::V, 0, Port::Channel)) - ev).norm() < 1e-15);
    }

    #[test]
    fn coherent_propagation() {
        let p = ChannelParams::new(1.0, 4.0, 1.2);
        let (a, b) = (c(0.3, 1.1), c(-0.7, 0.2));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let f = CoherentField::from_slots([
            (Slot::new(0, Port::Channel), [a * r, c(0.0, 0.0)]),
            (Slot::new(1, Port::Channel), [b * r, c(0.0, 0.0)]),
        ]);
        let out = apply_channel(&f, &p);
        let (s, co) = p.phi_mix.sin_cos();
        let el = Complex64::from_polar(1.0, p.lambda_phase);
        let ex = Complex64::from_polar(1.0, p.xi_phase);
        for (d, x) in [(0, a), (1, b)] {
            let [h, v] = out.amplitudes(d, Port::Channel);
            assert!((h - x * r * co * el).norm() < 1e-15);
            assert!((v - x * r * s * ex).norm() < 1e-15);
        }
        assert!((out.total_power() - f.total_power()).abs() < 1e-12);
        assert_eq!(apply_channel(&f, &ChannelParams::identity()), f);
    }

    #[test]
    fn wraps_and_clamps() {
        let p = ChannelParams::new(-0.5, 7.0, 2.0);
        assert!((p.lambda_phase - (TAU - 0.5)).abs() < 1e-12);
        assert!((p.xi_phase - (7.0 - TAU)).abs() < 1e-12);
        assert_eq!(p.phi_mix, FRAC_PI_2);
        assert!(ChannelParams::new(-1e-300, 0.0, 0.0).lambda_phase < TAU);
    }

    #[test]
    fn unitary_on_many_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let p = random_params(&mut rng);
            assert!(channel_matrix(&p).unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn channel_is_delay_blind() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = random_params(&mut rng);
            let (a, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = f64::hypot(a, b);
            let q = PhotonState::new_qubit(c(a / n, 0.0), c(0.0, b / n), Port::Channel).unwrap();
            let shift = |s: &PhotonState| s.map_labels(|l| ModeLabel { delay: l.delay + 1, ..l });
            let x = shift(&apply_channel(&q, &p));
            let y = apply_channel(&shift(&q), &p);
            assert!((overlap(&x, &y).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn sampler_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fixed = ChannelDistribution {
            phi_mix: ParamDist::Fixed(0.0),
            ..Default::default()
        };
        for _ in 0..100 {
            let u = channel_matrix(&sample_params(&mut rng, &fixed));
            assert!(u.entry(Pol::V, Pol::H).norm() < 1e-15);
        }

        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| sample_params(&mut rng, &ChannelDistribution::default()).phi_mix.cos().powi(2))
            .sum::<f64>()
            / n as f64;
        // Var[cos^2 phi] for phi ~ U[0, pi/2] is 1/8
        let sigma = (0.125f64 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sigma, "mean = {mean}");

        let a: Vec<_> = {
            let mut r = ChaCha8Rng::seed_from_u64(11);
            (0..5).map(|_| random_params(&mut r)).collect()
        };
        let b: Vec<_> = {
            let mut r = ChaCha8Rng::seed_from_u64(11);
            (0..5).map(|_| random_params(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
