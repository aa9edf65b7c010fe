//! Physical constants and the unit system shared by every module.
//!
//! Internally all energies are in eV and all lengths in nm. Momenta are stored
//! as `p·c` in eV and masses as rest energies `M·c²` in eV. Because
//! 1 eV·nm = 1 MeV·fm, the single constant `ħc` covers the atomic, nuclear and
//! high-energy regimes without scale-dependent branches.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{domain, Result};

/// CODATA-2018 constants plus the few nuclear and atomic masses this crate needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// ħc in eV·nm (numerically identical in MeV·fm).
    pub hbar_c: f64,
    /// Electron rest energy in MeV.
    pub electron_mass: f64,
    /// Deuteron rest energy in MeV.
    pub deuteron_mass: f64,
    /// Singly ionized ⁴⁰Ca rest energy in MeV (atomic mass minus one electron).
    pub ca40_ion_mass: f64,
    /// Planck constant h in eV·s.
    pub planck_h: f64,
    /// Deuteron binding energy in keV.
    pub deuteron_binding: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar_c: 197.326_980_4,
    electron_mass: 0.510_998_950_00,
    deuteron_mass: 1_875.612_942_57,
    // 39.962 590 863 u × 931.494 102 42 MeV/u − m_e
    ca40_ion_mass: 37_224.406_707_357_88,
    planck_h: 4.135_667_696e-15,
    deuteron_binding: 2224.52,
};

impl PhysicalConstants {
    /// SHA-256 over a canonical rendering of the table, recorded in sweep metadata.
    pub fn table_hash(&self) -> String {
        let canonical = format!(
            "hbar_c={:e};electron_mass={:e};deuteron_mass={:e};ca40_ion_mass={:e};planck_h={:e};deuteron_binding={:e}",
            self.hbar_c,
            self.electron_mass,
            self.deuteron_mass,
            self.ca40_ion_mass,
            self.planck_h,
            self.deuteron_binding
        );
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// ħc in eV·nm.
#[inline]
pub fn hbar_c() -> f64 {
    CONSTANTS.hbar_c
}

pub fn electron_mass() -> Energy {
    Energy::from_mev(CONSTANTS.electron_mass)
}

pub fn deuteron_mass() -> Energy {
    Energy::from_mev(CONSTANTS.deuteron_mass)
}

pub fn ca40_ion_mass() -> Energy {
    Energy::from_mev(CONSTANTS.ca40_ion_mass)
}

pub fn deuteron_binding() -> Energy {
    Energy::from_kev(CONSTANTS.deuteron_binding)
}

macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $unit:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize)]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: $name = $name(0.0);

            pub fn is_finite(self) -> bool {
                self.0.is_finite()
            }

            pub fn abs(self) -> Self {
                $name(self.0.abs())
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                $name(self.0 + rhs.0)
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                $name(self.0 - rhs.0)
            }
        }

        impl Mul<f64> for $name {
            type Output = $name;
            fn mul(self, rhs: f64) -> $name {
                $name(self.0 * rhs)
            }
        }

        impl Div<f64> for $name {
            type Output = $name;
            fn div(self, rhs: f64) -> $name {
                $name(self.0 / rhs)
            }
        }

        impl Div for $name {
            type Output = f64;
            fn div(self, rhs: $name) -> f64 {
                self.0 / rhs.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:e} {}", self.0, $unit)
            }
        }
    };
}

quantity!(
    /// Energy, stored in eV. Also used for rest energies `M·c²`.
    Energy,
    "eV"
);
quantity!(
    /// Length, stored in nm.
    Length,
    "nm"
);
quantity!(
    /// Momentum as `p·c`, stored in eV.
    Momentum,
    "eV/c"
);

impl Energy {
    pub const fn from_ev(v: f64) -> Self {
        Energy(v)
    }
    pub fn from_nev(v: f64) -> Self {
        Energy(v * 1e-9)
    }
    pub fn from_kev(v: f64) -> Self {
        Energy(v * 1e3)
    }
    pub fn from_mev(v: f64) -> Self {
        Energy(v * 1e6)
    }
    pub fn from_gev(v: f64) -> Self {
        Energy(v * 1e9)
    }
    pub fn ev(self) -> f64 {
        self.0
    }
    pub fn nev(self) -> f64 {
        self.0 * 1e9
    }
    pub fn kev(self) -> f64 {
        self.0 * 1e-3
    }
    pub fn mev(self) -> f64 {
        self.0 * 1e-6
    }
    pub fn gev(self) -> f64 {
        self.0 * 1e-9
    }
    /// Momentum of a massless quantum of this energy.
    pub fn as_momentum(self) -> Momentum {
        Momentum(self.0)
    }
}

impl Length {
    pub const fn from_nm(v: f64) -> Self {
        Length(v)
    }
    pub fn from_fm(v: f64) -> Self {
        Length(v * 1e-6)
    }
    pub fn from_pm(v: f64) -> Self {
        Length(v * 1e-3)
    }
    pub fn from_um(v: f64) -> Self {
        Length(v * 1e3)
    }
    pub fn nm(self) -> f64 {
        self.0
    }
    pub fn fm(self) -> f64 {
        self.0 * 1e6
    }
    pub fn pm(self) -> f64 {
        self.0 * 1e3
    }
}

impl Momentum {
    pub const fn from_ev(v: f64) -> Self {
        Momentum(v)
    }
    pub fn from_mev(v: f64) -> Self {
        Momentum(v * 1e6)
    }
    pub fn ev(self) -> f64 {
        self.0
    }
    pub fn mev(self) -> f64 {
        self.0 * 1e-6
    }
    /// Energy of a massless quantum carrying this momentum.
    pub fn as_energy(self) -> Energy {
        Energy(self.0)
    }
}

/// Photon energy `2πħc/λ`.
pub fn wavelength_to_energy(wavelength: Length) -> Result<Energy> {
    if !(wavelength.0 > 0.0) || !wavelength.is_finite() {
        return Err(domain(format!("wavelength must be positive and finite, got {wavelength}")));
    }
    Ok(Energy(2.0 * PI * hbar_c() / wavelength.0))
}

/// Photon wavelength `2πħc/E`.
pub fn energy_to_wavelength(energy: Energy) -> Result<Length> {
    if !(energy.0 > 0.0) || !energy.is_finite() {
        return Err(domain(format!("photon energy must be positive and finite, got {energy}")));
    }
    Ok(Length(2.0 * PI * hbar_c() / energy.0))
}

/// Kinetic energy `p²c²/(2Mc²)` of a nonrelativistic recoil.
pub fn nonrel_recoil_energy(p: Momentum, mass: Energy) -> Result<Energy> {
    if !(mass.0 > 0.0) {
        return Err(domain(format!("mass must be positive, got {mass}")));
    }
    Ok(Energy(p.0 * p.0 / (2.0 * mass.0)))
}

/// Oscillator quantum `h·f` for a linear frequency in Hz.
pub fn level_spacing(frequency_hz: f64) -> Result<Energy> {
    if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
        return Err(domain(format!("frequency must be positive, got {frequency_hz} Hz")));
    }
    Ok(Energy(CONSTANTS.planck_h * frequency_hz))
}
