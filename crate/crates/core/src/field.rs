//! Multi-slot two-mode coherent states.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::state::{Port, PRUNE_EPS};

/// A (time-bin, port) location of a coherent pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Slot {
    pub delay: u8,
    pub port: Port,
}

impl Slot {
    pub fn new(delay: u8, port: Port) -> Self {
        Slot { delay, port }
    }
}

/// Product of coherent states `|alpha_H, alpha_V>`, one per slot.
/// Amplitudes are in units of sqrt(photon number), so `|alpha|^2` is the
/// mean photon number (optical power per pulse).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoherentField {
    slots: BTreeMap<Slot, [Complex64; 2]>,
}

impl CoherentField {
    /// A single pulse `|alpha_h, alpha_v>` at delay 0 on `port`.
    pub fn pulse(alpha_h: Complex64, alpha_v: Complex64, port: Port) -> Self {
        Self::from_slots([(Slot::new(0, port), [alpha_h, alpha_v])])
    }

    /// Collects slots, summing amplitudes that land on the same slot and
    /// dropping vacuum slots.
    pub fn from_slots<I>(slots: I) -> Self
    where
        I: IntoIterator<Item = (Slot, [Complex64; 2])>,
    {
        let mut map: BTreeMap<Slot, [Complex64; 2]> = BTreeMap::new();
        for (slot, [h, v]) in slots {
            let e = map.entry(slot).or_default();
            e[0] += h;
            e[1] += v;
        }
        map.retain(|_, [h, v]| h.norm() >= PRUNE_EPS || v.norm() >= PRUNE_EPS);
        CoherentField { slots: map }
    }

    pub fn slots(&self) -> impl Iterator<Item = (&Slot, &[Complex64; 2])> {
        self.slots.iter()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Amplitudes at a slot; vacuum if absent.
    pub fn amplitudes(&self, delay: u8, port: Port) -> [Complex64; 2] {
        self.slots
            .get(&Slot::new(delay, port))
            .copied()
            .unwrap_or_default()
    }

    pub fn power_at(&self, delay: u8, port: Port) -> f64 {
        let [h, v] = self.amplitudes(delay, port);
        h.norm_sqr() + v.norm_sqr()
    }

    pub fn total_power(&self) -> f64 {
        self.slots
            .values()
            .map(|[h, v]| h.norm_sqr() + v.norm_sqr())
            .sum()
    }

    /// Total power on every slot of `port`, any delay.
    pub fn port_power(&self, port: Port) -> f64 {
        self.slots
            .iter()
            .filter(|(s, _)| s.port == port)
            .map(|(_, [h, v])| h.norm_sqr() + v.norm_sqr())
            .sum()
    }

    pub fn filter(&self, keep: impl Fn(&Slot) -> bool) -> Self {
        Self::from_slots(self.slots.iter().filter(|(s, _)| keep(s)).map(|(s, a)| (*s, *a)))
    }
}
