//! Atomic-unit constants.

use std::f64::consts::PI;

/// Conversion factors and the handful of constants the model needs, all in
/// Hartree atomic units (`ħ = e = mₑ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicUnits {
    /// Seconds per atomic unit of time.
    pub time_si: f64,
    /// Metres per atomic unit of length.
    pub length_si: f64,
    /// MHz per atomic unit of (angular) frequency.
    pub frequency_mhz: f64,
    /// Speed of light, `1/α`.
    pub c: f64,
    /// Vacuum permittivity, `1/(4π)`.
    pub eps0: f64,
    pub hbar: f64,
}

pub const ATOMIC_UNITS: AtomicUnits = AtomicUnits {
    time_si: 2.42e-17,
    length_si: 0.529e-10,
    frequency_mhz: 6.58e9,
    c: 137.036,
    eps0: 1.0 / (4.0 * PI),
    hbar: 1.0,
};

/// Speed of light in atomic units.
pub const C_AU: f64 = ATOMIC_UNITS.c;

impl AtomicUnits {
    pub fn time_to_seconds(&self, t: f64) -> f64 {
        t * self.time_si
    }

    pub fn length_to_metres(&self, z: f64) -> f64 {
        z * self.length_si
    }

    pub fn frequency_to_mhz(&self, w: f64) -> f64 {
        w * self.frequency_mhz
    }
}
