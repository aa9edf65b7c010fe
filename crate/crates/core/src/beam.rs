//! The twisted-photon model: quantum numbers, cone geometry, the local
//! superkick momentum and the Bessel–Gauss transverse profile.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numeric::{integrate_vec_with_breaks, scan_then_refine_max, QuadOptions};
use crate::special_functions::{jn, BESSEL_MAX_ARG, BESSEL_MAX_ORDER};
use crate::units::{energy_to_wavelength, hbar_c, wavelength_to_energy, Energy, Length, Momentum};

/// Paraxial spin label Λ of the photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn value(self) -> i32 {
        match self {
            Helicity::Plus => 1,
            Helicity::Minus => -1,
        }
    }

    pub fn from_i32(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            _ => Err(domain(format!("helicity must be +1 or -1, got {v}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Helicity::Plus => Helicity::Minus,
            Helicity::Minus => Helicity::Plus,
        }
    }
}

/// Which form of the photon's longitudinal momentum to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PzConvention {
    /// `p_z = E/c`, as used for atomic and nuclear recoil.
    Paraxial,
    /// `p_z = (E/c) cos θ_k`, as needed at very high energies.
    Exact,
}

/// Default pitch angle when a figure or command leaves it unstated.
pub const DEFAULT_PITCH_ANGLE: f64 = 0.1;

/// A Bessel-beam photon. Immutable once constructed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistedPhotonBeam {
    m_gamma: i32,
    helicity: Helicity,
    energy: Energy,
    pitch_angle: f64,
    envelope_w0: Option<Length>,
}

impl TwistedPhotonBeam {
    pub fn new(m_gamma: i32, helicity: Helicity, energy: Energy, pitch_angle: f64) -> Result<Self> {
        if !(energy.ev() > 0.0) || !energy.is_finite() {
            return Err(domain(format!("photon energy must be positive, got {energy}")));
        }
        if !(0.0..PI / 2.0).contains(&pitch_angle) {
            return Err(domain(format!("pitch angle must lie in [0, π/2), got {pitch_angle}")));
        }
        let orbital = m_gamma - helicity.value();
        if orbital.abs() > BESSEL_MAX_ORDER {
            return Err(domain(format!("orbital index {orbital} exceeds |ℓ| ≤ {BESSEL_MAX_ORDER}")));
        }
        Ok(TwistedPhotonBeam { m_gamma, helicity, energy, pitch_angle, envelope_w0: None })
    }

    pub fn from_wavelength(m_gamma: i32, helicity: Helicity, wavelength: Length, pitch_angle: f64) -> Result<Self> {
        Self::new(m_gamma, helicity, wavelength_to_energy(wavelength)?, pitch_angle)
    }

    /// Attaches the Gaussian envelope scale `w_0` of the Bessel–Gauss profile.
    pub fn with_envelope(mut self, w0: Length) -> Result<Self> {
        if !(w0.nm() > 0.0) || !w0.is_finite() {
            return Err(domain(format!("envelope w0 must be positive, got {w0}")));
        }
        self.envelope_w0 = Some(w0);
        Ok(self)
    }

    pub fn m_gamma(&self) -> i32 {
        self.m_gamma
    }

    pub fn helicity(&self) -> Helicity {
        self.helicity
    }

    /// Λ as ±1.
    pub fn spin(&self) -> i32 {
        self.helicity.value()
    }

    /// Orbital index `ℓ_γ = m_γ − Λ`.
    pub fn orbital(&self) -> i32 {
        self.m_gamma - self.helicity.value()
    }

    pub fn energy(&self) -> Energy {
        self.energy
    }

    pub fn pitch_angle(&self) -> f64 {
        self.pitch_angle
    }

    pub fn envelope_w0(&self) -> Option<Length> {
        self.envelope_w0
    }

    pub fn wavelength(&self) -> Length {
        energy_to_wavelength(self.energy).expect("energy is positive by construction")
    }

    /// Free-space wavenumber `E/ħc` in nm⁻¹.
    pub fn wavenumber(&self) -> f64 {
        self.energy.ev() / hbar_c()
    }

    /// Cone wavenumber `κ = (E/ħc) sin θ_k` in nm⁻¹.
    pub fn transverse_wavenumber(&self) -> f64 {
        self.wavenumber() * self.pitch_angle.sin()
    }

    pub fn longitudinal_momentum(&self, convention: PzConvention) -> Momentum {
        let e = self.energy.ev();
        match convention {
            PzConvention::Paraxial => Momentum::from_ev(e),
            PzConvention::Exact => Momentum::from_ev(e * self.pitch_angle.cos()),
        }
    }

    /// `E − p_z c = 2E sin²(θ_k/2)`, free of the cancellation in `E(1 − cos θ_k)`.
    pub fn longitudinal_deficit(&self) -> Energy {
        let s = (0.5 * self.pitch_angle).sin();
        self.energy * (2.0 * s * s)
    }

    /// Impact parameter where the superkick equals the paraxial longitudinal
    /// momentum: `b = λ|m_γ − Λ|/2π`.
    pub fn equal_kick_radius(&self) -> Result<Length> {
        let l = self.orbital();
        if l == 0 {
            return Err(Error::NoFiniteSolution(
                "m_γ = Λ carries no orbital angular momentum, the transverse kick vanishes".into(),
            ));
        }
        Ok(self.wavelength() * (f64::from(l.abs()) / (2.0 * PI)))
    }

    fn require_envelope(&self) -> Result<Length> {
        self.envelope_w0.ok_or_else(|| Error::Config("Bessel–Gauss profile requires an envelope w0".into()))
    }

    /// Unnormalized `J_ℓ(κρ)·exp(−ρ²/w_0²)`.
    pub fn bessel_gauss_amplitude(&self, rho: Length) -> Result<f64> {
        let w0 = self.require_envelope()?;
        if !(rho.nm() >= 0.0) {
            return Err(domain(format!("radius must be non-negative, got {rho}")));
        }
        let x = self.transverse_wavenumber() * rho.nm();
        if x > BESSEL_MAX_ARG {
            return Err(domain(format!("κρ = {x} beyond the supported Bessel range")));
        }
        Ok(bessel_gauss_unchecked(self.orbital(), self.transverse_wavenumber(), w0.nm(), rho.nm()))
    }

    /// Normalization `A` with `∫ |A ψ(ρ)|² 2πρ dρ = 1`, lengths in nm.
    pub fn bessel_gauss_norm(&self) -> Result<f64> {
        let w0 = self.require_envelope()?;
        let total = profile_power(self, w0.nm(), None)?;
        if !(total > 0.0) {
            return Err(Error::Quadrature("Bessel–Gauss profile is not normalizable (identically zero)".into()));
        }
        Ok(1.0 / total.sqrt())
    }

    /// Fraction of `|ψ|²·2πρ` inside radius `r`.
    pub fn enclosed_power_fraction(&self, r: Length) -> Result<f64> {
        let w0 = self.require_envelope()?;
        let total = profile_power(self, w0.nm(), None)?;
        if !(total > 0.0) {
            return Err(Error::Quadrature("Bessel–Gauss profile is not normalizable (identically zero)".into()));
        }
        if r.nm() <= 0.0 {
            return Ok(0.0);
        }
        let inner = profile_power(self, w0.nm(), Some(r.nm()))?;
        Ok((inner / total).min(1.0))
    }

    /// Radius of the global maximum of `|ψ|` on `(0, 10 w_0]`.
    pub fn profile_peak_radius(&self) -> Result<Length> {
        let w0 = self.require_envelope()?.nm();
        let l = self.orbital();
        if l == 0 {
            return Err(Error::NoPeak("ℓ_γ = 0 profile peaks on the axis".into()));
        }
        let kappa = self.transverse_wavenumber();
        let span = 10.0 * w0;
        let oscillations = kappa * span / PI;
        let points = ((40.0 * oscillations) as usize).clamp(4000, 1_000_000);
        let (rho, value) =
            scan_then_refine_max(|r| bessel_gauss_unchecked(l, kappa, w0, r).abs(), 0.0, span, points, 1e-12)
                .ok_or_else(|| {
                    Error::NoPeak(format!("flat or boundary-peaked profile (κ = {kappa} nm⁻¹, w0 = {w0} nm)"))
                })?;
        if !(value > 0.0) {
            return Err(Error::NoPeak("profile vanishes everywhere".into()));
        }
        Ok(Length::from_nm(rho))
    }
}

pub(crate) fn bessel_gauss_unchecked(l: i32, kappa: f64, w0: f64, rho: f64) -> f64 {
    jn(l, kappa * rho) * (-(rho / w0).powi(2)).exp()
}

/// `∫_0^R |ψ|² 2πρ dρ`, with `R` defaulting to where the envelope is negligible.
fn profile_power(beam: &TwistedPhotonBeam, w0: f64, upper: Option<f64>) -> Result<f64> {
    let l = beam.orbital();
    let kappa = beam.transverse_wavenumber();
    // exp(-2ρ²/w0²) < 1e-40 beyond 6.8 w0
    let tail = 6.8 * w0;
    let r_max = upper.map_or(tail, |u| u.min(tail));
    if kappa * r_max > BESSEL_MAX_ARG {
        return Err(domain("profile extends beyond the supported Bessel argument range"));
    }
    // one break per half oscillation keeps every panel smooth
    let half_period = if kappa > 0.0 { PI / kappa } else { f64::INFINITY };
    let pieces = ((r_max / half_period).ceil() as usize).clamp(1, 2000);
    let breaks: Vec<f64> = (0..=pieces).map(|i| r_max * i as f64 / pieces as f64).collect();
    let mut f = |r: f64, out: &mut [f64]| {
        let a = bessel_gauss_unchecked(l, kappa, w0, r);
        out[0] = 2.0 * PI * r * a * a;
    };
    let opts = QuadOptions { rel_tol: 1e-11, abs_tol: 0.0, max_intervals: 20_000 };
    let r = integrate_vec_with_breaks(&mut f, &breaks, 1, opts)?;
    Ok(r.value[0])
}

/// Transverse recoil `p_T = Δℓ·ħ/b`.
pub fn superkick(delta_l: i32, b: Length) -> Result<Momentum> {
    if delta_l < 0 {
        return Err(domain(format!("angular-momentum transfer must be non-negative, got {delta_l}")));
    }
    if delta_l == 0 {
        return Ok(Momentum::ZERO);
    }
    if !(b.nm() > 0.0) {
        return Err(Error::BSingularity(b.nm()));
    }
    Ok(Momentum::from_ev(f64::from(delta_l) * hbar_c() / b.nm()))
}
