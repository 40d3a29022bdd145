//! Polarization-basis protocol with mesoscopic coherent pulses running over
//! the passive corrector.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::components::{pbs, rotate};
use crate::error::{Error, Result};
use crate::setups::{run_fig4_passive, select_useful_pulse, stage, CoherentField, SetupTrace};
use crate::channel::ChannelParams;
use crate::state::Port;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MesoscopicConfig {
    m_bases: u32,
    alpha: Complex64,
    basis_angles: Vec<f64>,
}

impl MesoscopicConfig {
    /// `m_bases` evenly spaced bases, basis `k` at angle `(k - 1) pi / (2M)`.
    pub fn new(m_bases: u32, alpha: Complex64) -> Result<Self> {
        let angles = (0..m_bases)
            .map(|k| k as f64 * FRAC_PI_2 / m_bases as f64)
            .collect();
        Self::with_angles(m_bases, alpha, angles)
    }

    pub fn with_angles(m_bases: u32, alpha: Complex64, basis_angles: Vec<f64>) -> Result<Self> {
        if m_bases.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "number of bases must be odd and positive, got {m_bases}"
            )));
        }
        if basis_angles.len() != m_bases as usize {
            return Err(Error::InvalidParameter(format!(
                "expected {m_bases} basis angles, got {}",
                basis_angles.len()
            )));
        }
        if let Some(a) = basis_angles.iter().find(|a| !(0.0..FRAC_PI_2).contains(*a)) {
            return Err(Error::InvalidParameter(format!(
                "basis angle {a} outside [0, pi/2)"
            )));
        }
        let mut sorted = basis_angles.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("basis angles must be distinct".into()));
        }
        Ok(MesoscopicConfig {
            m_bases,
            alpha,
            basis_angles,
        })
    }

    pub fn m_bases(&self) -> u32 {
        self.m_bases
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Angle of basis `index` (1-based).
    pub fn basis_angle(&self, index: u32) -> Result<f64> {
        index
            .checked_sub(1)
            .and_then(|i| self.basis_angles.get(i as usize))
            .copied()
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "basis index {index} outside 1..={}",
                    self.m_bases
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MesoscopicOutcome {
    /// Detector with the larger total power; `None` when both are dark or
    /// equal.
    pub decoded_bit: Option<u8>,
    /// Useful-pulse power on receiver outputs 1 and 2.
    pub port_powers: [f64; 2],
    /// `detector_powers[port - 1][bit]`.
    pub detector_powers: [[f64; 2]; 2],
    pub trace: SetupTrace,
}

/// One round with Bob in the basis Alice used.
pub fn run_mesoscopic_round(
    bit: u8,
    basis_index: u32,
    cfg: &MesoscopicConfig,
    p: &ChannelParams,
) -> Result<MesoscopicOutcome> {
    run_mesoscopic_round_with_bob(bit, basis_index, basis_index, cfg, p)
}

/// One round; Bob's basis may differ from Alice's.
pub fn run_mesoscopic_round_with_bob(
    bit: u8,
    alice_basis: u32,
    bob_basis: u32,
    cfg: &MesoscopicConfig,
    p: &ChannelParams,
) -> Result<MesoscopicOutcome> {
    if bit > 1 {
        return Err(Error::InvalidParameter(format!("bit must be 0 or 1, got {bit}")));
    }
    let theta_a = bit as f64 * FRAC_PI_2 + cfg.basis_angle(alice_basis)?;
    let theta_b = -cfg.basis_angle(bob_basis)?;

    let mut trace = SetupTrace::default();
    let prepared = rotate(
        &CoherentField::pulse(cfg.alpha, Complex64::new(0.0, 0.0), Port::Input),
        Port::Input,
        theta_a,
    );
    trace.push(stage::ALICE_ENCODED, prepared.clone());
    let [h, v] = prepared.amplitudes(0, Port::Input);

    let (out, passive) = run_fig4_passive(h, v, p);
    trace.extend(passive);

    let useful = select_useful_pulse(&out);
    trace.push(stage::USEFUL_PULSES, useful.clone());
    let port_powers = [useful.port_power(Port::Out(1)), useful.port_power(Port::Out(2))];

    let f = rotate(&useful, Port::Out(1), theta_b);
    let f = rotate(&f, Port::Out(2), theta_b);
    trace.push(stage::BOB_ROTATION, f.clone());

    let mut f = f;
    for out in [1u8, 2] {
        f = pbs(
            &f,
            Port::Out(out),
            Port::Detector { out, bit: 0 },
            Port::Detector { out, bit: 1 },
        );
    }
    trace.push(stage::DETECTORS, f.clone());

    let mut detector_powers = [[0.0; 2]; 2];
    for (o, row) in detector_powers.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = f.port_power(Port::Detector {
                out: o as u8 + 1,
                bit: b as u8,
            });
        }
    }
    let d0 = detector_powers[0][0] + detector_powers[1][0];
    let d1 = detector_powers[0][1] + detector_powers[1][1];
    let decoded_bit = match d0.partial_cmp(&d1) {
        Some(std::cmp::Ordering::Greater) => Some(0),
        Some(std::cmp::Ordering::Less) => Some(1),
        _ => None,
    };

    Ok(MesoscopicOutcome {
        decoded_bit,
        port_powers,
        detector_powers,
        trace,
    })
}

/// Mixing angle from the useful-pulse powers on outputs 1 (`~ sin^2 phi`)
/// and 2 (`~ cos^2 phi`).
pub fn estimate_phi(power_port1: f64, power_port2: f64) -> Result<f64> {
    if power_port1 < 0.0 || power_port2 < 0.0 || power_port1.is_nan() || power_port2.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "powers must be non-negative, got ({power_port1}, {power_port2})"
        )));
    }
    if power_port1 == 0.0 && power_port2 == 0.0 {
        return Err(Error::UndefinedEstimate);
    }
    Ok(power_port1.sqrt().atan2(power_port2.sqrt()))
}
