use std::f64::consts::FRAC_1_SQRT_2;
use std::ffi::CStr;
use std::ptr;

use polqec_ffi::*;

fn c(re: f64, im: f64) -> PolqecComplex {
    PolqecComplex { re, im }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(polqec_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn qubit(h: PolqecComplex, v: PolqecComplex) -> *mut PolqecPhotonState {
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { polqec_qubit_new(h, v, &mut q) }, PolqecStatus::Ok);
    q
}

const CH: PolqecChannel = PolqecChannel { lambda: 2.0, xi: 0.4, phi: 1.0 };

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(polqec_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn correctors_restore_the_qubit() {
    let q = qubit(c(0.6, 0.0), c(0.0, 0.8));
    for run in [polqec_fig1_correct, polqec_fig2_correct] {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { run(q, CH, &mut out) }, PolqecStatus::Ok);
        let (mut p1, mut p2, mut f) = (0.0, 0.0, 0.0);
        unsafe {
            assert_eq!(polqec_port_probability(out, 1, &mut p1), PolqecStatus::Ok);
            assert_eq!(polqec_port_probability(out, 2, &mut p2), PolqecStatus::Ok);
            for port in [1, 2] {
                assert_eq!(polqec_port_fidelity(out, port, q, &mut f), PolqecStatus::Ok);
                assert!(f > 1.0 - 1e-12);
            }
        }
        assert!((p1 - 1f64.cos().powi(2)).abs() < 1e-12);
        assert!((p1 + p2 - 1.0).abs() < 1e-12);
        let mut n = 0usize;
        assert_eq!(unsafe { polqec_photon_state_len(out, &mut n) }, PolqecStatus::Ok);
        assert_eq!(n, 4);
        unsafe { polqec_photon_state_free(out) };
    }
    unsafe { polqec_photon_state_free(q) };
}

#[test]
fn setups_agree_through_the_abi() {
    let q = qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2));
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    let mut f = 0.0;
    unsafe {
        polqec_fig1_correct(q, CH, &mut a);
        polqec_fig2_correct(q, CH, &mut b);
        assert_eq!(polqec_fidelity(a, b, &mut f), PolqecStatus::Ok);
        polqec_photon_state_free(a);
        polqec_photon_state_free(b);
        polqec_photon_state_free(q);
    }
    assert!(f > 1.0 - 1e-12);
}

#[test]
fn error_codes_and_messages() {
    let mut q = ptr::null_mut();
    let s = unsafe { polqec_qubit_new(c(1.0, 0.0), c(1.0, 0.0), &mut q) };
    assert_eq!(s, PolqecStatus::NotNormalized);
    assert!(q.is_null());
    assert!(last_error().contains("normalized"));

    let mut x = 0.0;
    let s = unsafe { polqec_port_probability(ptr::null(), 1, &mut x) };
    assert_eq!(s, PolqecStatus::NullPointer);

    let s = unsafe { polqec_fpb_eve_success(0.7, &mut x) };
    assert_eq!(s, PolqecStatus::InvalidArgument);
    assert!(last_error().contains("[0, 0.5]"));

    assert_eq!(unsafe { polqec_estimate_phi(0.0, 0.0, &mut x) }, PolqecStatus::UndefinedEstimate);
    assert_eq!(unsafe { polqec_estimate_phi(1.0, 1.0, &mut x) }, PolqecStatus::Ok);
    assert!(last_error().is_empty());
    assert!((x - std::f64::consts::FRAC_PI_4).abs() < 1e-15);

    let q = qubit(c(1.0, 0.0), c(0.0, 0.0));
    assert_eq!(unsafe { polqec_port_probability(q, 3, &mut x) }, PolqecStatus::InvalidArgument);
    unsafe {
        polqec_photon_state_free(q);
        polqec_photon_state_free(ptr::null_mut());
        polqec_coherent_field_free(ptr::null_mut());
    }
}

#[test]
fn passive_field_powers() {
    let mut f = ptr::null_mut();
    let (a, b) = (c(1.2, 0.5), c(-0.3, 0.9));
    let n = 1.2f64.powi(2) + 0.25 + 0.09 + 0.81;
    assert_eq!(unsafe { polqec_passive_correct(a, b, CH, &mut f) }, PolqecStatus::Ok);
    let (mut p1, mut p2, mut d) = (0.0, 0.0, 0.0);
    unsafe {
        polqec_field_power(f, 1, 1, &mut p1);
        polqec_field_power(f, 1, 2, &mut p2);
        polqec_field_power(f, 0, 0, &mut d);
        polqec_coherent_field_free(f);
    }
    assert!((p1 - n * 1f64.sin().powi(2) / 4.0).abs() < 1e-12);
    assert!((p2 - n * 1f64.cos().powi(2) / 4.0).abs() < 1e-12);
    assert!(d > 0.0);
}

#[test]
fn fpb_through_abi() {
    let mut e = 0.0;
    assert_eq!(unsafe { polqec_fpb_eve_success(0.25, &mut e) }, PolqecStatus::Ok);
    assert!((e - (0.5 + 0.5 * 0.5f64.sqrt())).abs() < 1e-12);
    let (mut q, mut s) = (0.0, 0.0);
    for state in 0..4 {
        for port in [1, 2] {
            let st = unsafe { polqec_fpb_port_stats(state, 0.1, CH, port, &mut q, &mut s) };
            assert_eq!(st, PolqecStatus::Ok);
            assert!((q - 0.1).abs() < 1e-12);
        }
    }
    let st = unsafe { polqec_fpb_port_stats(4, 0.1, CH, 1, &mut q, &mut s) };
    assert_eq!(st, PolqecStatus::InvalidArgument);
}

#[test]
fn bb84_stats() {
    let mut st = PolqecBb84Stats::default();
    assert_eq!(unsafe { polqec_bb84_run(4_000, 3, 0.2, false, &mut st) }, PolqecStatus::Ok);
    assert_eq!(st.n_rounds, 4_000);
    assert!(st.eve_success > 0.5);
    assert!((st.qber - 0.2).abs() < 3.0 * (0.16f64 / st.n_sifted as f64).sqrt());
    let mut again = PolqecBb84Stats::default();
    unsafe { polqec_bb84_run(4_000, 3, 0.2, false, &mut again) };
    assert_eq!(st, again);
    assert_eq!(unsafe { polqec_bb84_run(0, 3, -1.0, false, &mut st) }, PolqecStatus::InvalidArgument);
}
