//! Single-photon states over labeled optical modes.
//!
//! A mode is the tuple (polarization, time-bin, port) plus an optional
//! component of Eve's probe qubit. Time-bins are arrival times in units of
//! the interferometer imbalance, so the "SL" and "LS" paths of a
//! short/long pair land in the same mode (delay 1).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped from a state.
pub const PRUNE_EPS: f64 = 1e-15;
/// Default tolerance for overlap and equality checks.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Deepest time-bin produced by any of the modeled setups (the "LL" slot).
pub const MAX_DELAY: u8 = 2;

const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub fn flipped(self) -> Pol {
        match self {
            Pol::H => Pol::V,
            Pol::V => Pol::H,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    pub(crate) fn from_index(i: usize) -> Pol {
        if i == 0 {
            Pol::H
        } else {
            Pol::V
        }
    }
}

/// Component of Eve's probe qubit in her `|+>`/`|->` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EveBasis {
    Plus,
    Minus,
}

impl EveBasis {
    pub(crate) fn index(self) -> usize {
        match self {
            EveBasis::Plus => 0,
            EveBasis::Minus => 1,
        }
    }

    pub(crate) fn from_index(i: usize) -> EveBasis {
        if i == 0 {
            EveBasis::Plus
        } else {
            EveBasis::Minus
        }
    }
}

/// Spatial port (fiber or free-space path) a mode lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    Input,
    ShortArm,
    LongArm,
    Channel,
    /// Internal arm of a receiver (e.g. the two arms between Bob's PBSs).
    Arm(u8),
    /// Receiver output mode 1 or 2.
    Out(u8),
    /// Power that leaves the setup (unused coupler output).
    Discard,
    /// Photodetector `bit` behind output `out`.
    Detector { out: u8, bit: u8 },
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Input => f.write_str("in"),
            Port::ShortArm => f.write_str("short"),
            Port::LongArm => f.write_str("long"),
            Port::Channel => f.write_str("ch"),
            Port::Arm(n) => write!(f, "arm{n}"),
            Port::Out(n) => write!(f, "{n}"),
            Port::Discard => f.write_str("discard"),
            Port::Detector { out, bit } => write!(f, "{out}.d{bit}"),
        }
    }
}

impl Serialize for Port {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub pol: Pol,
    pub delay: u8,
    pub port: Port,
    pub eve: Option<EveBasis>,
}

impl ModeLabel {
    pub fn new(pol: Pol, delay: u8, port: Port) -> Self {
        ModeLabel {
            pol,
            delay,
            port,
            eve: None,
        }
    }

    pub fn with_eve(self, eve: EveBasis) -> Self {
        ModeLabel {
            eve: Some(eve),
            ..self
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}:{}", self.pol, self.delay, self.port)?;
        match self.eve {
            Some(EveBasis::Plus) => f.write_str("/e+"),
            Some(EveBasis::Minus) => f.write_str("/e-"),
            None => Ok(()),
        }
    }
}

/// A (possibly Eve-entangled) single-photon state. Immutable value type.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhotonState {
    terms: BTreeMap<ModeLabel, Complex64>,
}

impl PhotonState {
    /// `alpha|H> + beta|V>` at delay 0 on `port`.
    pub fn new_qubit(alpha: Complex64, beta: Complex64, port: Port) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self::from_terms([
            (ModeLabel::new(Pol::H, 0, port), alpha),
            (ModeLabel::new(Pol::V, 0, port), beta),
        ]))
    }

    /// Builds a state from raw terms. Repeated labels are summed and
    /// negligible amplitudes pruned; no normalization is applied.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (ModeLabel, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (label, amp) in terms {
            *map.entry(label).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        map.retain(|_, a: &mut Complex64| a.norm() >= PRUNE_EPS);
        PhotonState { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeLabel, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, label: &ModeLabel) -> Complex64 {
        self.terms.get(label).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// `Some(true)` if every term carries an Eve component, `Some(false)` if
    /// none does, `None` for an empty or inhomogeneous state.
    pub fn has_eve(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|l| l.eve.is_some());
        let first = it.next()?;
        it.all(|e| e == first).then_some(first)
    }

    /// Rewrites every label. Colliding labels have their amplitudes summed.
    pub fn map_labels(&self, f: impl Fn(ModeLabel) -> ModeLabel) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, a)| (f(*l), *a)))
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, a)| (*l, a * z)))
    }

    /// Applies a 2x2 unitary to Eve's probe component; `u[out][in]` with
    /// index 0 = plus, 1 = minus. Unentangled terms are left untouched.
    pub fn map_eve(&self, u: &[[Complex64; 2]; 2]) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for (label, amp) in &self.terms {
            match label.eve {
                Some(e) => {
                    for (o, row) in u.iter().enumerate() {
                        out.push((label.with_eve(EveBasis::from_index(o)), row[e.index()] * amp));
                    }
                }
                None => out.push((*label, *amp)),
            }
        }
        Self::from_terms(out)
    }

    /// Tensors the photon with Eve's probe `eve_plus|+> + eve_minus|->`.
    pub fn tensor_with_eve(&self, eve_plus: Complex64, eve_minus: Complex64) -> Result<Self> {
        if self.terms.keys().any(|l| l.eve.is_some()) {
            return Err(Error::Structure(
                "state is already entangled with a probe".into(),
            ));
        }
        let norm_sqr = eve_plus.norm_sqr() + eve_minus.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self::from_terms(self.terms.iter().flat_map(|(l, a)| {
            [
                (l.with_eve(EveBasis::Plus), a * eve_plus),
                (l.with_eve(EveBasis::Minus), a * eve_minus),
            ]
        })))
    }

    /// Probability of the modes selected by `pred`, and the renormalized
    /// conditional state (absent when the probability is zero).
    pub fn postselect(&self, pred: impl Fn(&ModeLabel) -> bool) -> (f64, Option<PhotonState>) {
        let kept = Self::from_terms(
            self.terms
                .iter()
                .filter(|(l, _)| pred(l))
                .map(|(l, a)| (*l, *a)),
        );
        let p = kept.norm_sqr();
        if p <= 0.0 || kept.is_empty() {
            return (0.0, None);
        }
        let total = self.norm_sqr();
        let normalized = kept.scaled(Complex64::new(1.0 / p.sqrt(), 0.0));
        (p / total, Some(normalized))
    }

    /// Born-rule measurement of the partition defined by `cell_of`. Every
    /// term must map to some cell.
    pub fn born_sample<K, R>(
        &self,
        cell_of: impl Fn(&ModeLabel) -> Option<K>,
        rng: &mut R,
    ) -> Result<(K, PhotonState)>
    where
        K: Ord + Clone,
        R: Rng + ?Sized,
    {
        let mut masses: BTreeMap<K, f64> = BTreeMap::new();
        for (label, amp) in &self.terms {
            let cell = cell_of(label).ok_or_else(|| Error::Partition(label.to_string()))?;
            *masses.entry(cell).or_insert(0.0) += amp.norm_sqr();
        }
        let total: f64 = masses.values().sum();
        if total <= 0.0 {
            return Err(Error::Precondition("cannot sample an empty state".into()));
        }
        let mut draw = rng.gen::<f64>() * total;
        let mut chosen = None;
        for (cell, mass) in &masses {
            chosen = Some(cell.clone());
            if draw < *mass {
                break;
            }
            draw -= mass;
        }
        let cell = chosen.expect("non-empty partition");
        let (_, collapsed) = self.postselect(|l| cell_of(l).as_ref() == Some(&cell));
        Ok((cell, collapsed.expect("sampled cell has positive mass")))
    }
}

/// `<a|b>`, summed over shared mode labels.
pub fn overlap(a: &PhotonState, b: &PhotonState) -> Result<Complex64> {
    match (a.has_eve(), b.has_eve()) {
        (Some(x), Some(y)) if x != y => {
            return Err(Error::Structure(
                "cannot overlap an Eve-entangled state with an unentangled one".into(),
            ))
        }
        (None, _) | (_, None) if !a.is_empty() && !b.is_empty() => {
            return Err(Error::Structure("inhomogeneous Eve structure".into()))
        }
        _ => {}
    }
    Ok(a
        .terms
        .iter()
        .filter_map(|(l, x)| b.terms.get(l).map(|y| x.conj() * y))
        .sum())
}

/// `|<a|b>|^2 / (|a|^2 |b|^2)`; zero when either state is empty or the
/// structures differ.
pub fn fidelity(a: &PhotonState, b: &PhotonState) -> f64 {
    let denom = a.norm_sqr() * b.norm_sqr();
    if denom <= 0.0 {
        return 0.0;
    }
    overlap(a, b).map(|o| o.norm_sqr() / denom).unwrap_or(0.0)
}

pub fn equal_up_to_global_phase(a: &PhotonState, b: &PhotonState, tol: f64) -> bool {
    match overlap(a, b) {
        Ok(o) => o.norm_sqr() >= (1.0 - tol) * a.norm_sqr() * b.norm_sqr(),
        Err(_) => false,
    }
}
