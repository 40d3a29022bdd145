//! Simulation of linear-optical polarization error correction.
//!
//! Single photons are encoded into horizontally polarized time-bin qubits
//! before the fiber, so both bins see the same birefringence and the
//! receiver can undo it without knowing the channel. The crate models:
//!
//! * [`state`]: single-photon states over labeled optical modes,
//! * [`components`]: PBS, Pockels cells, unbalanced interferometers,
//!   rotators, wave plates, couplers and phase modulators,
//! * [`channel`]: the stationary random birefringent fiber,
//! * [`setups`]: the active single-photon correctors and the passive
//!   coherent-state corrector,
//! * [`protocols`]: BB84 with an FPB eavesdropper, Stokes analytics and the
//!   mesoscopic coherent-state protocol,
//! * [`experiments`] / [`config`]: the reproducible runs behind the CLI.

pub mod channel;
pub mod components;
pub mod config;
pub mod error;
pub mod experiments;
pub mod field;
pub mod protocols;
pub mod setups;
pub mod state;

pub use channel::{apply_channel, channel_matrix, sample_params, ChannelDistribution, ChannelParams, ParamDist};
pub use components::{Optical, PolarizationUnitary};
pub use error::{Error, Result};
pub use field::{CoherentField, Slot};
pub use setups::{
    encode_alice, run_fig1_corrector, run_fig2_corrector, run_fig4_passive, select_useful_pulse,
    SetupTrace,
};
pub use state::{equal_up_to_global_phase, fidelity, overlap, EveBasis, ModeLabel, PhotonState, Pol, Port};
