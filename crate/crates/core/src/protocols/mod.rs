//! Protocol-level analyses built on the setups.

pub mod bb84;
pub mod coherent;
pub mod fpb;
pub mod mesoscopic;

pub use bb84::{run_bb84, Bb84Config, Bb84Stats, KeyPorts, TrialRecord};
pub use coherent::{
    distinguishability_exact, distinguishability_paper, stokes_of_pulse, stokes_parameters,
    StokesMoments,
};
pub use fpb::{
    fpb_entangle, fpb_eve_success_probability, fpb_through_corrector, port_conditional_error,
    port_conditional_eve_success, AliceChoice, Basis, FpbConfig,
};
pub use mesoscopic::{
    estimate_phi, run_mesoscopic_round, run_mesoscopic_round_with_bob, MesoscopicConfig,
    MesoscopicOutcome,
};
