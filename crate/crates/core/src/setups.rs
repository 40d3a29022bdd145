//! End-to-end optical setups: Alice's time-bin encoder, the two active
//! single-photon correctors and the passive coherent-state corrector.
//!
//! Every pipeline records a [`SetupTrace`] with one named snapshot per
//! optical stage so that intermediate states can be audited individually.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::channel::{apply_channel, ChannelParams};
use crate::components::{
    coupler_50_50, delay_arm, hwp_swap, pbs, phase_shift, pockels_flip, rotate, Optical,
};
use crate::error::{Error, Result};
pub use crate::field::{CoherentField, Slot};
use crate::state::{PhotonState, Pol, Port};

/// Stage names shared by the pipelines.
pub mod stage {
    pub const ALICE_ENCODED: &str = "alice_encoded";
    pub const ALICE_ARMS: &str = "alice_arms";
    pub const CHANNEL_INPUT: &str = "channel_input";
    pub const CHANNEL_OUTPUT: &str = "channel_output";
    pub const BOB_POCKELS: &str = "bob_pockels";
    pub const BOB_PBS: &str = "bob_pbs";
    pub const BALANCED_INTERFEROMETER: &str = "balanced_interferometer";
    pub const UNBALANCED_INTERFEROMETERS: &str = "unbalanced_interferometers";
    pub const ROTATORS: &str = "rotators";
    pub const OUTPUT: &str = "output";
    pub const USEFUL_PULSES: &str = "useful_pulses";
    pub const BOB_ROTATION: &str = "bob_rotation";
    pub const DETECTORS: &str = "detectors";
}

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Photon(PhotonState),
    Field(CoherentField),
}

impl From<PhotonState> for Snapshot {
    fn from(s: PhotonState) -> Self {
        Snapshot::Photon(s)
    }
}

impl From<CoherentField> for Snapshot {
    fn from(f: CoherentField) -> Self {
        Snapshot::Field(f)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SetupTrace {
    stages: Vec<(String, Snapshot)>,
}

impl SetupTrace {
    pub fn push(&mut self, label: &str, snap: impl Into<Snapshot>) {
        self.stages.push((label.to_owned(), snap.into()));
    }

    pub fn labels(&self) -> Vec<&str> {
        self.stages.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn get(&self, label: &str) -> Option<&Snapshot> {
        self.stages.iter().find(|(l, _)| l == label).map(|(_, s)| s)
    }

    pub fn photon(&self, label: &str) -> Option<&PhotonState> {
        match self.get(label)? {
            Snapshot::Photon(s) => Some(s),
            Snapshot::Field(_) => None,
        }
    }

    pub fn field(&self, label: &str) -> Option<&CoherentField> {
        match self.get(label)? {
            Snapshot::Field(f) => Some(f),
            Snapshot::Photon(_) => None,
        }
    }

    pub fn extend(&mut self, other: SetupTrace) {
        self.stages.extend(other.stages);
    }

    /// `[{"stage": .., "terms": [{"mode": .., "re": .., "im": ..}]}]`
    pub fn to_json(&self) -> Value {
        let term = |mode: String, a: &Complex64| json!({ "mode": mode, "re": a.re, "im": a.im });
        let stages: Vec<Value> = self
            .stages
            .iter()
            .map(|(label, snap)| {
                let terms: Vec<Value> = match snap {
                    Snapshot::Photon(s) => s.terms().map(|(l, a)| term(l.to_string(), a)).collect(),
                    Snapshot::Field(f) => f
                        .slots()
                        .flat_map(|(s, [h, v])| {
                            [
                                term(format!("H@{}:{}", s.delay, s.port), h),
                                term(format!("V@{}:{}", s.delay, s.port), v),
                            ]
                        })
                        .collect(),
                };
                json!({ "stage": label, "terms": terms })
            })
            .collect();
        Value::Array(stages)
    }
}

fn check_delay0_single_port(q: &PhotonState) -> Result<Port> {
    let mut ports = q.terms().map(|(l, _)| l.port);
    let port = ports
        .next()
        .ok_or_else(|| Error::Precondition("empty input state".into()))?;
    if ports.any(|p| p != port) {
        return Err(Error::Precondition("input qubit spans several ports".into()));
    }
    if q.terms().any(|(l, _)| l.delay != 0) {
        return Err(Error::Precondition("input qubit is already time-binned".into()));
    }
    Ok(port)
}

/// Polarization to time-bin conversion: V takes the long arm, then a Pockels
/// cell gated on the late bin turns it horizontal. The result sits on
/// [`Port::Channel`] as `alpha|H>_0 + beta|H>_1`.
pub fn encode_alice(q: &PhotonState) -> Result<PhotonState> {
    let port = check_delay0_single_port(q)?;
    let s = delay_arm(q, port, Pol::V);
    let s = pockels_flip(&s, port, 1);
    Ok(s.route(|_, d, _| (Port::Channel, d)))
}

fn encode_and_propagate(
    q: &PhotonState,
    p: &ChannelParams,
    trace: &mut SetupTrace,
) -> Result<PhotonState> {
    let s = encode_alice(q)?;
    trace.push(stage::ALICE_ENCODED, s.clone());
    let s = apply_channel(&s, p);
    trace.push(stage::CHANNEL_OUTPUT, s.clone());
    Ok(s)
}

/// Original active corrector: a Pockels cell on the early bin, a balanced
/// polarization interferometer with gated cells in each arm, then an
/// encoder-type unbalanced interferometer and a HWP on each output.
///
/// The output carries `e^{i lambda} cos(phi)` times the input qubit on port 1
/// and `e^{i xi} sin(phi)` times the input qubit on port 2, both at delay 1.
pub fn run_fig1_corrector(q: &PhotonState, p: &ChannelParams) -> Result<(PhotonState, SetupTrace)> {
    let mut trace = SetupTrace::default();
    let s = encode_and_propagate(q, p, &mut trace)?;
    Ok((fig1_receiver(&s, &mut trace), trace))
}

pub(crate) fn fig1_receiver(s: &PhotonState, trace: &mut SetupTrace) -> PhotonState {
    let s = pockels_flip(s, Port::Channel, 0);
    trace.push(stage::BOB_POCKELS, s.clone());

    let s = pbs(&s, Port::Channel, Port::Arm(1), Port::Arm(2));
    let s = pockels_flip(&s, Port::Arm(1), 0);
    let s = pockels_flip(&s, Port::Arm(2), 1);
    let s = pbs(&s, Port::Arm(1), Port::Out(1), Port::Out(2));
    let s = pbs(&s, Port::Arm(2), Port::Out(2), Port::Out(1));
    trace.push(stage::BALANCED_INTERFEROMETER, s.clone());

    let s = delay_arm(&s, Port::Out(1), Pol::V);
    let s = delay_arm(&s, Port::Out(2), Pol::V);
    trace.push(stage::UNBALANCED_INTERFEROMETERS, s.clone());

    let s = hwp_swap(&s, Port::Out(1));
    let s = hwp_swap(&s, Port::Out(2));
    trace.push(stage::OUTPUT, s.clone());
    s
}

/// Simplified active corrector: one PBS, a gated Pockels cell per arm and an
/// H-long unbalanced interferometer per arm.
///
/// Raw arm labels (V arm = 1, H arm = 2) are kept in the trace; the
/// returned state is relabeled so that the `cos(phi)` branch is port 1, as in
/// [`run_fig1_corrector`].
pub fn run_fig2_corrector(q: &PhotonState, p: &ChannelParams) -> Result<(PhotonState, SetupTrace)> {
    let mut trace = SetupTrace::default();
    let s = encode_and_propagate(q, p, &mut trace)?;
    Ok((fig2_receiver(&s, &mut trace), trace))
}

pub(crate) fn fig2_receiver(s: &PhotonState, trace: &mut SetupTrace) -> PhotonState {
    let s = pbs(s, Port::Channel, Port::Out(2), Port::Out(1));
    trace.push(stage::BOB_PBS, s.clone());

    let s = pockels_flip(&s, Port::Out(1), 0);
    let s = pockels_flip(&s, Port::Out(2), 1);
    trace.push(stage::BOB_POCKELS, s.clone());

    let s = delay_arm(&s, Port::Out(1), Pol::H);
    let s = delay_arm(&s, Port::Out(2), Pol::H);
    trace.push(stage::UNBALANCED_INTERFEROMETERS, s.clone());

    let s = swap_output_ports(&s);
    trace.push(stage::OUTPUT, s.clone());
    s
}

/// Exchanges output ports 1 and 2.
pub fn swap_output_ports<S: Optical>(s: &S) -> S {
    s.route(|p, d, _| match p {
        Port::Out(1) => (Port::Out(2), d),
        Port::Out(2) => (Port::Out(1), d),
        other => (other, d),
    })
}

/// Optical delay plus switch folding port 2 onto port 1, `offset` bins late,
/// so both corrected copies exit one fiber.
pub fn time_multiplex<S: Optical>(s: &S, offset: u8) -> S {
    s.route(|p, d, _| match p {
        Port::Out(2) => (Port::Out(1), d + offset),
        other => (other, d),
    })
}

/// Passive corrector for coherent pulses: PBS, `-pi/2` phase on the short
/// arm, HWP plus delay on the long arm, a 50/50 coupler into the fiber;
/// at Bob a PBS, `-/+pi/4` rotators on ports 1/2 and H-long unbalanced
/// interferometers.
///
/// The returned field holds the six output slots (delays 0, 1, 2 on ports
/// 1 and 2) plus the coupler's unused output on [`Port::Discard`].
pub fn run_fig4_passive(
    alpha: Complex64,
    beta: Complex64,
    p: &ChannelParams,
) -> (CoherentField, SetupTrace) {
    let mut trace = SetupTrace::default();
    let f = CoherentField::pulse(alpha, beta, Port::Input);

    let f = pbs(&f, Port::Input, Port::ShortArm, Port::LongArm);
    let f = phase_shift(&f, Port::ShortArm, -std::f64::consts::FRAC_PI_2);
    let f = hwp_swap(&f, Port::LongArm);
    let f = delay_arm(&f, Port::LongArm, Pol::H);
    trace.push(stage::ALICE_ARMS, f.clone());

    let f = coupler_50_50(&f, (Port::ShortArm, Port::LongArm), (Port::Discard, Port::Channel))
        .expect("coupler acts on coherent fields");
    trace.push(stage::CHANNEL_INPUT, f.clone());

    let f = apply_channel(&f, p);
    trace.push(stage::CHANNEL_OUTPUT, f.clone());

    let f = pbs(&f, Port::Channel, Port::Out(2), Port::Out(1));
    trace.push(stage::BOB_PBS, f.clone());

    let f = rotate(&f, Port::Out(1), -FRAC_PI_4);
    let f = rotate(&f, Port::Out(2), FRAC_PI_4);
    trace.push(stage::ROTATORS, f.clone());

    let f = delay_arm(&f, Port::Out(1), Pol::H);
    let f = delay_arm(&f, Port::Out(2), Pol::H);
    trace.push(stage::OUTPUT, f.clone());
    (f, trace)
}

/// Keeps the middle (delay-1) pulse on each receiver output; the early and
/// late pulses and the coupler discard are dropped.
pub fn select_useful_pulse(f: &CoherentField) -> CoherentField {
    f.filter(|s| s.delay == 1 && matches!(s.port, Port::Out(_)))
}
