//! Fuchs-Peres-Brandt individual attack.
//!
//! Eve's probe starts in `C|+> + S|->` with `C = sqrt(1 - 2 p_e)` and
//! `S = sqrt(2 p_e)`. After the entangling gate each BB84 state `X` becomes
//! `|X>|T_X> + |X_perp>|T_E>`, where (unnormalized)
//! `T_+- = C|+> +- (S/sqrt2)|->` and `T_E = (S/sqrt2)|->`:
//!
//! | Alice | correct-bit probe | wrong-bit probe |
//! |-------|-------------------|-----------------|
//! | H     | `T_-`             | `T_E`           |
//! | V     | `T_+`             | `T_E`           |
//! | +     | `T_+`             | `T_E`           |
//! | -     | `T_-`             | `T_E`           |
//!
//! Eve reads her probe in the basis `|0>, |1>` with `|+-> = (|0> +- |1>)/sqrt2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::{apply_channel, ChannelParams};
use crate::components::rotate;
use crate::error::{Error, Result};
use crate::setups::{encode_alice, fig2_receiver, SetupTrace};
use crate::state::{equal_up_to_global_phase, overlap, EveBasis, ModeLabel, PhotonState, Pol, Port};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Basis {
    /// Rotation that maps this basis onto H/V before a PBS measurement.
    pub fn measurement_rotation(self) -> f64 {
        match self {
            Basis::Rectilinear => 0.0,
            Basis::Diagonal => -FRAC_PI_4,
        }
    }
}

/// One of the four BB84 polarization states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AliceChoice {
    H,
    V,
    Plus,
    Minus,
}

impl AliceChoice {
    pub const ALL: [AliceChoice; 4] = [AliceChoice::H, AliceChoice::V, AliceChoice::Plus, AliceChoice::Minus];

    pub fn from_basis_bit(basis: Basis, bit: u8) -> Self {
        match (basis, bit) {
            (Basis::Rectilinear, 0) => AliceChoice::H,
            (Basis::Rectilinear, _) => AliceChoice::V,
            (Basis::Diagonal, 0) => AliceChoice::Plus,
            (Basis::Diagonal, _) => AliceChoice::Minus,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            AliceChoice::H | AliceChoice::V => Basis::Rectilinear,
            AliceChoice::Plus | AliceChoice::Minus => Basis::Diagonal,
        }
    }

    /// H and + encode 0; V and - encode 1.
    pub fn bit(self) -> u8 {
        match self {
            AliceChoice::H | AliceChoice::Plus => 0,
            AliceChoice::V | AliceChoice::Minus => 1,
        }
    }

    pub fn orthogonal(self) -> Self {
        match self {
            AliceChoice::H => AliceChoice::V,
            AliceChoice::V => AliceChoice::H,
            AliceChoice::Plus => AliceChoice::Minus,
            AliceChoice::Minus => AliceChoice::Plus,
        }
    }

    /// Jones vector (H, V).
    pub fn jones(self) -> [Complex64; 2] {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            AliceChoice::H => [Complex64::new(1.0, 0.0), ZERO],
            AliceChoice::V => [ZERO, Complex64::new(1.0, 0.0)],
            AliceChoice::Plus => [r, r],
            AliceChoice::Minus => [r, -r],
        }
    }

    pub fn qubit(self, port: Port) -> PhotonState {
        let [a, b] = self.jones();
        PhotonState::new_qubit(a, b, port).expect("BB84 states are normalized")
    }
}

/// Eve's operating point: the error probability `p_e` she induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FpbConfig {
    p_e: f64,
}

impl FpbConfig {
    pub fn new(p_e: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p_e) {
            return Err(Error::InvalidParameter(format!(
                "p_e = {p_e} is outside the valid range [0, 0.5]"
            )));
        }
        Ok(FpbConfig { p_e })
    }

    pub fn p_e(&self) -> f64 {
        self.p_e
    }

    pub fn c(&self) -> f64 {
        (1.0 - 2.0 * self.p_e).sqrt()
    }

    pub fn s(&self) -> f64 {
        (2.0 * self.p_e).sqrt()
    }

    /// Angle of Eve's measurement basis relative to H (pi/8).
    pub fn eve_basis_angle(&self) -> f64 {
        FRAC_PI_8
    }

    /// Jones vectors of Eve's measurement basis `|0>`, `|1>`.
    pub fn eve_basis(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.eve_basis_angle().sin_cos();
        [[c, s], [-s, c]]
    }

    /// Probe components (plus, minus) of `T_+`.
    pub fn t_plus(&self) -> [Complex64; 2] {
        [Complex64::new(self.c(), 0.0), Complex64::new(self.s() * FRAC_1_SQRT_2, 0.0)]
    }

    pub fn t_minus(&self) -> [Complex64; 2] {
        [Complex64::new(self.c(), 0.0), Complex64::new(-self.s() * FRAC_1_SQRT_2, 0.0)]
    }

    pub fn t_e(&self) -> [Complex64; 2] {
        [ZERO, Complex64::new(self.s() * FRAC_1_SQRT_2, 0.0)]
    }

    /// Probe left behind when Bob receives `choice` correctly.
    pub fn correct_probe(&self, choice: AliceChoice) -> [Complex64; 2] {
        match choice {
            AliceChoice::H | AliceChoice::Minus => self.t_minus(),
            AliceChoice::V | AliceChoice::Plus => self.t_plus(),
        }
    }
}

/// Eve's guess of Alice's state from her probe outcome (0 or 1) once the
/// basis is public: outcome 1 points at the `T_-` states, 0 at `T_+`.
pub fn eve_guess(basis: Basis, outcome: u8) -> AliceChoice {
    match (basis, outcome) {
        (Basis::Rectilinear, 1) => AliceChoice::H,
        (Basis::Rectilinear, _) => AliceChoice::V,
        (Basis::Diagonal, 1) => AliceChoice::Minus,
        (Basis::Diagonal, _) => AliceChoice::Plus,
    }
}

/// Unitary taking probe amplitudes in the `|+>, |->` basis to Eve's
/// measurement basis `|0>, |1>` (stored in the `Plus`, `Minus` slots).
pub fn eve_readout_unitary() -> [[Complex64; 2]; 2] {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[r, r], [r, -r]]
}

fn product(pol: [Complex64; 2], probe: [Complex64; 2], delay: u8, port: Port) -> Vec<(ModeLabel, Complex64)> {
    let mut out = Vec::with_capacity(4);
    for (pi, p) in pol.iter().enumerate() {
        for (ei, e) in probe.iter().enumerate() {
            let l = ModeLabel::new(Pol::from_index(pi), delay, port).with_eve(EveBasis::from_index(ei));
            out.push((l, p * e));
        }
    }
    out
}

fn entangled_pair(choice: AliceChoice, cfg: &FpbConfig, port: Port) -> Vec<(ModeLabel, Complex64)> {
    let mut terms = product(choice.jones(), cfg.correct_probe(choice), 0, port);
    terms.extend(product(choice.orthogonal().jones(), cfg.t_e(), 0, port));
    terms
}

/// Alice-Eve joint state after the entangling gate.
///
/// BB84 states (up to a global phase) follow the table in the module docs
/// exactly. Those four relations are not the restriction of one linear map,
/// so any other qubit is extended linearly from the H and V rows.
pub fn fpb_entangle(alice: &PhotonState, cfg: &FpbConfig) -> Result<PhotonState> {
    if alice.has_eve() != Some(false) {
        return Err(Error::Structure("input must be an unentangled photon".into()));
    }
    let port = alice.terms().next().map(|(l, _)| l.port).expect("non-empty");
    if alice.terms().any(|(l, _)| l.port != port || l.delay != 0) {
        return Err(Error::Precondition("input must be a delay-0 single-port qubit".into()));
    }
    for choice in AliceChoice::ALL {
        let x = choice.qubit(port);
        if equal_up_to_global_phase(&x, alice, 1e-12) {
            let phase = overlap(&x, alice)?;
            return Ok(PhotonState::from_terms(entangled_pair(choice, cfg, port)).scaled(phase));
        }
    }
    let a = alice.amplitude(&ModeLabel::new(Pol::H, 0, port));
    let b = alice.amplitude(&ModeLabel::new(Pol::V, 0, port));
    let h = PhotonState::from_terms(entangled_pair(AliceChoice::H, cfg, port));
    let v = PhotonState::from_terms(entangled_pair(AliceChoice::V, cfg, port));
    Ok(PhotonState::from_terms(
        h.scaled(a).terms().chain(v.scaled(b).terms()).map(|(l, z)| (*l, *z)),
    ))
}

/// `0.5 (1 + sqrt2 C S)`: probability that Eve's guess is right.
pub fn fpb_eve_success_probability(p_e: f64) -> Result<f64> {
    let cfg = FpbConfig::new(p_e)?;
    Ok(0.5 * (1.0 + SQRT_2 * cfg.c() * cfg.s()))
}

/// Attack placed between Alice's decoder and her re-encoder, followed by
/// the channel and the simplified active corrector (output ports canonical).
pub fn fpb_through_corrector(
    choice: AliceChoice,
    cfg: &FpbConfig,
    p: &ChannelParams,
) -> Result<(PhotonState, SetupTrace)> {
    let mut trace = SetupTrace::default();
    let joint = fpb_entangle(&choice.qubit(Port::Input), cfg)?;
    let s = encode_alice(&joint)?;
    trace.push(crate::setups::stage::ALICE_ENCODED, s.clone());
    let s = apply_channel(&s, p);
    trace.push(crate::setups::stage::CHANNEL_OUTPUT, s.clone());
    let out = fig2_receiver(&s, &mut trace);
    Ok((out, trace))
}

/// Post-selects output `port` and measures in `choice`'s basis; returns the
/// probability of the orthogonal outcome, or `None` if the port is empty.
pub fn port_conditional_error(out: &PhotonState, choice: AliceChoice, port: Port) -> Option<f64> {
    let (_, s) = out.postselect(|l| l.port == port);
    let s = rotate(&s?, port, choice.basis().measurement_rotation());
    let wrong = Pol::from_index(choice.orthogonal().bit() as usize);
    Some(s.postselect(|l| l.pol == wrong).0)
}

/// Probability that Eve's guess equals `choice` given detection on `port`.
pub fn port_conditional_eve_success(out: &PhotonState, choice: AliceChoice, port: Port) -> Option<f64> {
    let (_, s) = out.postselect(|l| l.port == port);
    let s = s?.map_eve(&eve_readout_unitary());
    let basis = choice.basis();
    Some(
        s.postselect(|l| {
            l.eve
                .map(|e| eve_guess(basis, e.index() as u8) == choice)
                .unwrap_or(false)
        })
        .0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_params;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flip_mass(joint: &PhotonState, choice: AliceChoice) -> f64 {
        let s = rotate(joint, Port::Input, choice.basis().measurement_rotation());
        let wrong = Pol::from_index(choice.orthogonal().bit() as usize);
        s.postselect(|l| l.pol == wrong).0
    }

    #[test]
    fn config_range() {
        assert!(FpbConfig::new(-0.01).is_err());
        let err = FpbConfig::new(0.7).unwrap_err();
        assert!(err.to_string().contains("[0, 0.5]"));
        let cfg = FpbConfig::new(0.25).unwrap();
        assert!((cfg.c() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((cfg.s() - 0.5f64.sqrt()).abs() < 1e-15);
        for p in [0.0, 0.1, 0.3, 0.5] {
            let c = FpbConfig::new(p).unwrap();
            assert!((c.c().powi(2) + c.s().powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_disturbance_is_product_state() {
        let cfg = FpbConfig::new(0.0).unwrap();
        for choice in AliceChoice::ALL {
            let j = fpb_entangle(&choice.qubit(Port::Input), &cfg).unwrap();
            assert!(j.terms().all(|(l, _)| l.eve == Some(EveBasis::Plus)));
            assert!((j.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_mass_equals_pe() {
        for p in [0.0, 0.05, 0.25, 0.4, 0.5] {
            let cfg = FpbConfig::new(p).unwrap();
            for choice in AliceChoice::ALL {
                let j = fpb_entangle(&choice.qubit(Port::Input), &cfg).unwrap();
                assert!((j.norm_sqr() - 1.0).abs() < 1e-12);
                assert!((flip_mass(&j, choice) - p).abs() < 1e-12, "{choice:?} {p}");
            }
        }
    }

    #[test]
    fn global_phase_is_carried() {
        let cfg = FpbConfig::new(0.2).unwrap();
        let z = Complex64::from_polar(1.0, 0.9);
        let j = fpb_entangle(&AliceChoice::Plus.qubit(Port::Input).scaled(z), &cfg).unwrap();
        let j0 = fpb_entangle(&AliceChoice::Plus.qubit(Port::Input), &cfg).unwrap();
        assert!((overlap(&j0, &j).unwrap() - z).norm() < 1e-12);
    }

    #[test]
    fn general_qubit_is_normalized() {
        let cfg = FpbConfig::new(0.3).unwrap();
        let q = PhotonState::new_qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), Port::Input).unwrap();
        let j = fpb_entangle(&q, &cfg).unwrap();
        assert!((j.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn success_probability_values() {
        assert!((fpb_eve_success_probability(0.25).unwrap() - 0.853_553_390_593_273_8).abs() < 1e-12);
        assert_eq!(fpb_eve_success_probability(0.0).unwrap(), 0.5);
        assert!((fpb_eve_success_probability(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(fpb_eve_success_probability(0.51).is_err());
    }

    #[test]
    fn corrector_is_transparent_to_eve() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            for pe in [0.0, 0.1, 0.25] {
                let cfg = FpbConfig::new(pe).unwrap();
                for choice in AliceChoice::ALL {
                    let (out, _) = fpb_through_corrector(choice, &cfg, &p).unwrap();
                    assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
                    for port in [Port::Out(1), Port::Out(2)] {
                        if let Some(e) = port_conditional_error(&out, choice, port) {
                            assert!((e - pe).abs() < 1e-12);
                        }
                        if let Some(s) = port_conditional_eve_success(&out, choice, port) {
                            let expected = fpb_eve_success_probability(pe).unwrap();
                            assert!((s - expected).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn eve_basis_is_orthonormal() {
        let b = FpbConfig::new(0.1).unwrap().eve_basis();
        let dot = b[0][0] * b[1][0] + b[0][1] * b[1][1];
        assert!(dot.abs() < 1e-15);
        assert!((b[0][0] - FRAC_PI_8.cos()).abs() < 1e-15);
    }
}
