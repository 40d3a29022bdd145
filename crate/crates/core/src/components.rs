//! Linear-optical components as mode rewrites and 2x2 polarization
//! unitaries.
//!
//! Every component is written once against [`Optical`], so the same
//! function drives both single photons ([`PhotonState`]) and coherent
//! pulses ([`CoherentField`]).

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{CoherentField, Slot};
use crate::state::{ModeLabel, PhotonState, Pol, Port, MAX_DELAY};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Jones matrix acting on (H, V) amplitude pairs; `m[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationUnitary {
    m: [[Complex64; 2]; 2],
}

impl PolarizationUnitary {
    pub const fn from_rows(m: [[Complex64; 2]; 2]) -> Self {
        PolarizationUnitary { m }
    }

    pub const fn identity() -> Self {
        Self::from_rows([[ONE, ZERO], [ZERO, ONE]])
    }

    /// Signless H <-> V exchange.
    pub const fn swap() -> Self {
        Self::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    /// `[[cos, -sin], [sin, cos]]`; `rotation(t)|H> = cos t|H> + sin t|V>`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_rows([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    /// Polarization-independent phase `e^{i phi}`.
    pub fn phase(phi: f64) -> Self {
        let z = Complex64::from_polar(1.0, phi);
        Self::from_rows([[z, ZERO], [ZERO, z]])
    }

    pub fn rows(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn entry(&self, row: Pol, col: Pol) -> Complex64 {
        self.m[row.index()][col.index()]
    }

    pub fn apply(&self, [h, v]: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * h + self.m[0][1] * v,
            self.m[1][0] * h + self.m[1][1] * v,
        ]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::from_rows([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// `max |(U^dagger U - I)_ij|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint() * *self;
        let id = Self::identity();
        (0..2)
            .flat_map(|r| (0..2).map(move |c| (r, c)))
            .map(|(r, c)| (p.m[r][c] - id.m[r][c]).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for PolarizationUnitary {
    type Output = PolarizationUnitary;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self::from_rows(m)
    }
}

/// Anything the components can act on.
pub trait Optical: Sized {
    /// Human-readable kind name for diagnostics.
    const KIND: &'static str;

    /// Applies `u` to every (H, V) pair on `port`, optionally only at time-bin
    /// `gate`.
    fn apply_unitary(&self, port: Port, gate: Option<u8>, u: &PolarizationUnitary) -> Self;

    /// Moves each polarization component to a new (port, delay) without
    /// touching amplitudes. Components that land together are summed.
    fn route(&self, f: impl Fn(Port, u8, Pol) -> (Port, u8)) -> Self;

    /// Lossless 50/50 coupler with `T = 1/sqrt2`, `R = i/sqrt2`.
    fn couple(&self, _inputs: (Port, Port), _outputs: (Port, Port)) -> Result<Self> {
        Err(Error::UnsupportedKind {
            op: "coupler_50_50",
            kind: Self::KIND,
        })
    }
}

impl Optical for PhotonState {
    const KIND: &'static str = "single-photon state";

    fn apply_unitary(&self, port: Port, gate: Option<u8>, u: &PolarizationUnitary) -> Self {
        let mut out = Vec::with_capacity(self.len() * 2);
        for (label, amp) in self.terms() {
            if label.port != port || gate.is_some_and(|g| g != label.delay) {
                out.push((*label, *amp));
                continue;
            }
            for to in [Pol::H, Pol::V] {
                let l = ModeLabel { pol: to, ..*label };
                out.push((l, u.entry(to, label.pol) * amp));
            }
        }
        PhotonState::from_terms(out)
    }

    fn route(&self, f: impl Fn(Port, u8, Pol) -> (Port, u8)) -> Self {
        self.map_labels(|l| {
            let (port, delay) = f(l.port, l.delay, l.pol);
            ModeLabel { port, delay, ..l }
        })
    }
}

impl Optical for CoherentField {
    const KIND: &'static str = "coherent field";

    fn apply_unitary(&self, port: Port, gate: Option<u8>, u: &PolarizationUnitary) -> Self {
        CoherentField::from_slots(self.slots().map(|(s, a)| {
            if s.port == port && gate.is_none_or(|g| g == s.delay) {
                (*s, u.apply(*a))
            } else {
                (*s, *a)
            }
        }))
    }

    fn route(&self, f: impl Fn(Port, u8, Pol) -> (Port, u8)) -> Self {
        CoherentField::from_slots(self.slots().flat_map(|(s, [h, v])| {
            let (hp, hd) = f(s.port, s.delay, Pol::H);
            let (vp, vd) = f(s.port, s.delay, Pol::V);
            [
                (Slot::new(hd, hp), [*h, ZERO]),
                (Slot::new(vd, vp), [ZERO, *v]),
            ]
        }))
    }

    fn couple(&self, (in1, in2): (Port, Port), (out1, out2): (Port, Port)) -> Result<Self> {
        let t = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let r = I * FRAC_1_SQRT_2;
        let mut out = Vec::with_capacity(self.len() + 2);
        for (s, a) in self.slots() {
            if s.port == in1 {
                out.push((Slot::new(s.delay, out1), [t * a[0], t * a[1]]));
                out.push((Slot::new(s.delay, out2), [r * a[0], r * a[1]]));
            } else if s.port == in2 {
                out.push((Slot::new(s.delay, out1), [r * a[0], r * a[1]]));
                out.push((Slot::new(s.delay, out2), [t * a[0], t * a[1]]));
            } else {
                out.push((*s, *a));
            }
        }
        Ok(CoherentField::from_slots(out))
    }
}

/// Polarizing beam splitter: H on `input` exits on `out_h`, V on `out_v`.
pub fn pbs<S: Optical>(state: &S, input: Port, out_h: Port, out_v: Port) -> S {
    state.route(|port, delay, pol| {
        if port != input {
            (port, delay)
        } else {
            match pol {
                Pol::H => (out_h, delay),
                Pol::V => (out_v, delay),
            }
        }
    })
}

/// Time-gated Pockels cell: H <-> V on `port` at time-bin `gate` only.
pub fn pockels_flip<S: Optical>(state: &S, port: Port, gate: u8) -> S {
    state.apply_unitary(port, Some(gate), &PolarizationUnitary::swap())
}

/// Unbalanced polarization interferometer: the `long` polarization on
/// `port` is delayed by one time-bin.
pub fn delay_arm<S: Optical>(state: &S, port: Port, long: Pol) -> S {
    state.route(|p, delay, pol| {
        if p == port && pol == long {
            debug_assert!(delay < MAX_DELAY, "time-bin exceeds pipeline depth");
            (p, delay + 1)
        } else {
            (p, delay)
        }
    })
}

/// Polarization rotator `R(theta)`.
pub fn rotate<S: Optical>(state: &S, port: Port, theta: f64) -> S {
    state.apply_unitary(port, None, &PolarizationUnitary::rotation(theta))
}

/// Half-wave plate used as a polarization exchanger.
pub fn hwp_swap<S: Optical>(state: &S, port: Port) -> S {
    state.apply_unitary(port, None, &PolarizationUnitary::swap())
}

pub fn phase_shift<S: Optical>(state: &S, port: Port, phi: f64) -> S {
    state.apply_unitary(port, None, &PolarizationUnitary::phase(phi))
}

/// `out1 = (in1 + i in2)/sqrt2`, `out2 = (i in1 + in2)/sqrt2` per
/// polarization and time-bin. Coherent fields only.
pub fn coupler_50_50<S: Optical>(state: &S, inputs: (Port, Port), outputs: (Port, Port)) -> Result<S> {
    state.couple(inputs, outputs)
}

/// Renames one port.
pub fn relabel_port<S: Optical>(state: &S, from: Port, to: Port) -> S {
    state.route(|p, d, _| if p == from { (to, d) } else { (p, d) })
}
