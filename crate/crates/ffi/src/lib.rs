//! C ABI over `polqec`.
//!
//! Every function returns a [`PolqecStatus`]; results go through out
//! pointers. On failure, [`polqec_last_error_message`] describes the most
//! recent error on the calling thread. States and fields are opaque handles
//! released with their `_free` function. Panics never cross the boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use polqec::protocols::{
    estimate_phi, fpb_eve_success_probability, fpb_through_corrector, port_conditional_error,
    port_conditional_eve_success, run_bb84, AliceChoice, Bb84Config, FpbConfig, KeyPorts,
};
use polqec::{
    fidelity, run_fig1_corrector, run_fig2_corrector, run_fig4_passive, ChannelParams,
    CoherentField, Error, ModeLabel, PhotonState, Port,
};

/// Result code of every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolqecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    Structure = 4,
    UndefinedEstimate = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolqecComplex {
    pub re: f64,
    pub im: f64,
}

impl From<PolqecComplex> for Complex64 {
    fn from(z: PolqecComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Channel phases `lambda`, `xi` and mixing angle `phi`, in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolqecChannel {
    pub lambda: f64,
    pub xi: f64,
    pub phi: f64,
}

impl From<PolqecChannel> for ChannelParams {
    fn from(c: PolqecChannel) -> Self {
        ChannelParams::new(c.lambda, c.xi, c.phi)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PolqecBb84Stats {
    pub n_rounds: u64,
    pub n_sifted: u64,
    pub n_errors: u64,
    pub sift_rate: f64,
    pub qber: f64,
    /// Negative when no eavesdropper was simulated.
    pub eve_success: f64,
}

/// Single-photon state.
pub struct PolqecPhotonState(PhotonState);

/// Classical coherent field.
pub struct PolqecCoherentField(CoherentField);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: PolqecStatus, msg: impl Into<String>) -> PolqecStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> PolqecStatus {
    let status = match e {
        Error::NotNormalized { .. } => PolqecStatus::NotNormalized,
        Error::InvalidParameter(_) => PolqecStatus::InvalidArgument,
        Error::UndefinedEstimate => PolqecStatus::UndefinedEstimate,
        _ => PolqecStatus::Structure,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> PolqecStatus) -> PolqecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == PolqecStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(PolqecStatus::Panic, "internal panic"),
    }
}

fn output_port(port: u8) -> Result<Port, PolqecStatus> {
    match port {
        1 | 2 => Ok(Port::Out(port)),
        _ => Err(fail(
            PolqecStatus::InvalidArgument,
            format!("port must be 1 or 2, got {port}"),
        )),
    }
}

fn alice_choice(index: u8) -> Result<AliceChoice, PolqecStatus> {
    AliceChoice::ALL.get(index as usize).copied().ok_or_else(|| {
        fail(
            PolqecStatus::InvalidArgument,
            format!("state index must be 0 (H), 1 (V), 2 (+) or 3 (-), got {index}"),
        )
    })
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => return fail(PolqecStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

macro_rules! deref_mut {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(r) => r,
            None => return fail(PolqecStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

macro_rules! check {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

macro_rules! code {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn polqec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn polqec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New qubit `h|H> + v|V>` at the encoder input. Must be normalized.
#[no_mangle]
pub unsafe extern "C" fn polqec_qubit_new(
    h: PolqecComplex,
    v: PolqecComplex,
    out: *mut *mut PolqecPhotonState,
) -> PolqecStatus {
    guard(|| {
        let out = deref_mut!(out);
        let q = check!(PhotonState::new_qubit(h.into(), v.into(), Port::Input));
        *out = Box::into_raw(Box::new(PolqecPhotonState(q)));
        PolqecStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn polqec_photon_state_free(state: *mut PolqecPhotonState) {
    if !state.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(state))));
    }
}

/// Number of nonzero mode amplitudes.
#[no_mangle]
pub unsafe extern "C" fn polqec_photon_state_len(
    state: *const PolqecPhotonState,
    out: *mut usize,
) -> PolqecStatus {
    guard(|| {
        let s = deref!(state);
        *deref_mut!(out) = s.0.len();
        PolqecStatus::Ok
    })
}

fn correct(
    input: *const PolqecPhotonState,
    channel: PolqecChannel,
    out: *mut *mut PolqecPhotonState,
    run: fn(&PhotonState, &ChannelParams) -> polqec::Result<(PhotonState, polqec::SetupTrace)>,
) -> PolqecStatus {
    guard(|| {
        let q = deref!(input);
        let out = deref_mut!(out);
        let (s, _) = check!(run(&q.0, &channel.into()));
        *out = Box::into_raw(Box::new(PolqecPhotonState(s)));
        PolqecStatus::Ok
    })
}

/// Encoder, channel and the two-interferometer corrector.
#[no_mangle]
pub unsafe extern "C" fn polqec_fig1_correct(
    input: *const PolqecPhotonState,
    channel: PolqecChannel,
    out: *mut *mut PolqecPhotonState,
) -> PolqecStatus {
    correct(input, channel, out, run_fig1_corrector)
}

/// Encoder, channel and the simplified corrector.
#[no_mangle]
pub unsafe extern "C" fn polqec_fig2_correct(
    input: *const PolqecPhotonState,
    channel: PolqecChannel,
    out: *mut *mut PolqecPhotonState,
) -> PolqecStatus {
    correct(input, channel, out, run_fig2_corrector)
}

/// Probability of finding the photon on receiver output `port` (1 or 2).
#[no_mangle]
pub unsafe extern "C" fn polqec_port_probability(
    state: *const PolqecPhotonState,
    port: u8,
    out: *mut f64,
) -> PolqecStatus {
    guard(|| {
        let s = deref!(state);
        let out = deref_mut!(out);
        let port = code!(output_port(port));
        *out = s.0.postselect(|l| l.port == port).0;
        PolqecStatus::Ok
    })
}

/// Fidelity between the state conditioned on output `port` and `reference`
/// (a qubit from [`polqec_qubit_new`]). Returns `UndefinedEstimate` when the
/// port is never reached.
#[no_mangle]
pub unsafe extern "C" fn polqec_port_fidelity(
    state: *const PolqecPhotonState,
    port: u8,
    reference: *const PolqecPhotonState,
    out: *mut f64,
) -> PolqecStatus {
    guard(|| {
        let s = deref!(state);
        let r = deref!(reference);
        let out = deref_mut!(out);
        let port = code!(output_port(port));
        match s.0.postselect(|l| l.port == port).1 {
            Some(c) => {
                let c = c.map_labels(|l| ModeLabel { delay: 0, port: Port::Input, ..l });
                *out = fidelity(&c, &r.0);
                PolqecStatus::Ok
            }
            None => fail(PolqecStatus::UndefinedEstimate, "port carries no amplitude"),
        }
    })
}

/// `|<a|b>|^2` over the full mode labels.
#[no_mangle]
pub unsafe extern "C" fn polqec_fidelity(
    a: *const PolqecPhotonState,
    b: *const PolqecPhotonState,
    out: *mut f64,
) -> PolqecStatus {
    guard(|| {
        let (a, b) = (deref!(a), deref!(b));
        *deref_mut!(out) = fidelity(&a.0, &b.0);
        PolqecStatus::Ok
    })
}

/// Passive corrector acting on the coherent pulse `(alpha, beta)`.
#[no_mangle]
pub unsafe extern "C" fn polqec_passive_correct(
    alpha: PolqecComplex,
    beta: PolqecComplex,
    channel: PolqecChannel,
    out: *mut *mut PolqecCoherentField,
) -> PolqecStatus {
    guard(|| {
        let out = deref_mut!(out);
        let (f, _) = run_fig4_passive(alpha.into(), beta.into(), &channel.into());
        *out = Box::into_raw(Box::new(PolqecCoherentField(f)));
        PolqecStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn polqec_coherent_field_free(field: *mut PolqecCoherentField) {
    if !field.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(field))));
    }
}

/// Power in time slot `delay` of `port`: 1 or 2 for the receiver outputs,
/// 0 for the discarded coupler output.
#[no_mangle]
pub unsafe extern "C" fn polqec_field_power(
    field: *const PolqecCoherentField,
    delay: u8,
    port: u8,
    out: *mut f64,
) -> PolqecStatus {
    guard(|| {
        let f = deref!(field);
        let out = deref_mut!(out);
        let port = match port {
            0 => Port::Discard,
            p => code!(output_port(p)),
        };
        *out = f.0.power_at(delay, port);
        PolqecStatus::Ok
    })
}

/// Eve's unconditional guessing probability for disturbance `pe`.
#[no_mangle]
pub unsafe extern "C" fn polqec_fpb_eve_success(pe: f64, out: *mut f64) -> PolqecStatus {
    guard(|| {
        let out = deref_mut!(out);
        *out = check!(fpb_eve_success_probability(pe));
        PolqecStatus::Ok
    })
}

/// Error rate and Eve's success conditioned on output `port` for Alice state
/// `state` (0 H, 1 V, 2 +, 3 -) sent through the probe and the simplified
/// corrector. Returns `UndefinedEstimate` when the port is never reached.
#[no_mangle]
pub unsafe extern "C" fn polqec_fpb_port_stats(
    state: u8,
    pe: f64,
    channel: PolqecChannel,
    port: u8,
    qber: *mut f64,
    eve_success: *mut f64,
) -> PolqecStatus {
    guard(|| {
        let qber = deref_mut!(qber);
        let eve_success = deref_mut!(eve_success);
        let choice = code!(alice_choice(state));
        let port = code!(output_port(port));
        let cfg = check!(FpbConfig::new(pe));
        let (out, _) = check!(fpb_through_corrector(choice, &cfg, &channel.into()));
        match (
            port_conditional_error(&out, choice, port),
            port_conditional_eve_success(&out, choice, port),
        ) {
            (Some(q), Some(e)) => {
                *qber = q;
                *eve_success = e;
                PolqecStatus::Ok
            }
            _ => fail(PolqecStatus::UndefinedEstimate, "port carries no amplitude"),
        }
    })
}

/// BB84 Monte Carlo with the default random channel. A negative `pe` runs
/// without an eavesdropper.
#[no_mangle]
pub unsafe extern "C" fn polqec_bb84_run(
    n_rounds: u64,
    seed: u64,
    pe: f64,
    both_ports: bool,
    out: *mut PolqecBb84Stats,
) -> PolqecStatus {
    guard(|| {
        let out = deref_mut!(out);
        let mut cfg = Bb84Config::new(n_rounds as usize, seed);
        if pe >= 0.0 || pe.is_nan() {
            cfg.eve = Some(check!(FpbConfig::new(pe)));
        }
        if both_ports {
            cfg.key_ports = KeyPorts::Both;
        }
        let (stats, _) = check!(run_bb84(&cfg));
        *out = PolqecBb84Stats {
            n_rounds: stats.n_rounds,
            n_sifted: stats.n_sifted,
            n_errors: stats.n_errors,
            sift_rate: stats.sift_rate,
            qber: stats.qber,
            eve_success: stats.eve_success.unwrap_or(-1.0),
        };
        PolqecStatus::Ok
    })
}

/// Mixing angle from the useful-pulse powers on outputs 1 and 2.
#[no_mangle]
pub unsafe extern "C" fn polqec_estimate_phi(
    power_port1: f64,
    power_port2: f64,
    out: *mut f64,
) -> PolqecStatus {
    guard(|| {
        let out = deref_mut!(out);
        *out = check!(estimate_phi(power_port1, power_port2));
        PolqecStatus::Ok
    })
}
