//! Photoexcitation of a localized target at impact parameter `b` from the
//! vortex line.
//!
//! The amplitude for ending in sublevel `m_f` factorizes as
//! `A(m_f) ∝ J_{m_γ−Δm}(κb) · d^J_{Δm,Λ}(θ_k)` with `Δm = m_f − m_i`, up to the
//! azimuthal phase `e^{i(m_γ−Δm)φ_b}` and a reduced matrix element common to
//! the whole channel. The sum over final sublevels runs over the inclusive
//! range `m_i − J ≤ m_f ≤ m_i + J`.

use num_complex::Complex64;
use serde::Serialize;

use crate::beam::TwistedPhotonBeam;
use crate::error::{domain, Error, Result};
use crate::special_functions::{bessel_first_maximum, bessel_j, wigner_small_d, HalfInt, WIGNER_MAX_J};
use crate::units::{hbar_c, Length};

/// A multipole channel from an initial sublevel `m_i`.
///
/// The multipole order `J` is the angular momentum absorbed internally and is
/// an integer. Half-integer character of the atomic states enters through
/// `m_initial` (for example `m_i = −1/2` in an `S₁/₂ → D₅/₂` line).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionChannel {
    multipole: u32,
    m_initial: HalfInt,
    label: String,
}

impl TransitionChannel {
    pub fn new(multipole: u32, m_initial: HalfInt, label: impl Into<String>) -> Result<Self> {
        let max = WIGNER_MAX_J.twice() / 2;
        if multipole == 0 || multipole as i32 > max {
            return Err(domain(format!("multipole order must be in 1..={max}, got {multipole}")));
        }
        if m_initial.twice().abs() > 64 {
            return Err(domain(format!("|m_initial| is limited to 32, got {m_initial}")));
        }
        Ok(TransitionChannel { multipole, m_initial, label: label.into() })
    }

    /// Electric multipole `E{J}` from a spinless S state.
    pub fn electric(multipole: u32) -> Result<Self> {
        Self::new(multipole, HalfInt::ZERO, format!("E{multipole}"))
    }

    pub fn s_to_p() -> Self {
        Self::electric(1).expect("valid")
    }

    pub fn s_to_d() -> Self {
        Self::electric(2).expect("valid")
    }

    pub fn s_to_f() -> Self {
        Self::electric(3).expect("valid")
    }

    pub fn multipole(&self) -> u32 {
        self.multipole
    }

    pub fn m_initial(&self) -> HalfInt {
        self.m_initial
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same multipole with the initial sublevel mirrored.
    pub fn mirrored(&self) -> Self {
        TransitionChannel { m_initial: self.m_initial.neg(), ..self.clone() }
    }

    fn delta_range(&self) -> std::ops::RangeInclusive<i32> {
        let j = self.multipole as i32;
        -j..=j
    }
}

/// One final sublevel with its relative amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SublevelAmplitude {
    pub m_final: HalfInt,
    pub delta_m: i32,
    /// Bessel order `ν = m_γ − Δm`, also the winding of the azimuthal phase.
    pub bessel_order: i32,
    /// Real amplitude `J_ν(κb)·d^J_{Δm,Λ}(θ_k)`.
    pub amplitude: f64,
}

impl SublevelAmplitude {
    /// Complex amplitude for an absorber at azimuth `φ_b`.
    pub fn amplitude_at(&self, phi_b: f64) -> Complex64 {
        Complex64::from_polar(1.0, f64::from(self.bessel_order) * phi_b) * self.amplitude
    }
}

/// Normalized final-sublevel probabilities `w(m_f)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublevelDistribution {
    pub levels: Vec<SublevelAmplitude>,
    /// `weights[i]` belongs to `levels[i]`.
    pub weights: Vec<f64>,
}

impl SublevelDistribution {
    pub fn weight(&self, m_final: HalfInt) -> f64 {
        self.levels.iter().zip(&self.weights).find(|(l, _)| l.m_final == m_final).map_or(0.0, |(_, w)| *w)
    }

    pub fn weight_by_delta(&self, delta_m: i32) -> f64 {
        self.levels.iter().zip(&self.weights).find(|(l, _)| l.delta_m == delta_m).map_or(0.0, |(_, w)| *w)
    }

    /// `Σ Δm · w(Δm)`.
    ///
    /// Positive and negative terms are accumulated separately in a fixed
    /// magnitude order, so a mirrored distribution gives exactly the negated mean.
    pub fn mean_delta_m(&self) -> f64 {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (l, w) in self.levels.iter().zip(&self.weights) {
            let t = f64::from(l.delta_m) * w;
            if l.delta_m > 0 {
                pos.push(t);
            } else if l.delta_m < 0 {
                neg.push(-t);
            }
        }
        sorted_sum(&mut pos) - sorted_sum(&mut neg)
    }
}

fn sorted_sum(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

fn check_b(b: Length) -> Result<f64> {
    let b = b.nm();
    if !(b >= 0.0) || !b.is_finite() {
        return Err(domain(format!("impact parameter must be a non-negative length, got {b} nm")));
    }
    Ok(b)
}

/// Relative amplitudes for every final sublevel, in ascending `m_f`.
pub fn transition_amplitudes(
    beam: &TwistedPhotonBeam,
    channel: &TransitionChannel,
    b: Length,
) -> Result<Vec<SublevelAmplitude>> {
    let b = check_b(b)?;
    let x = beam.transverse_wavenumber() * b;
    let theta = beam.pitch_angle();
    let j = HalfInt::from_int(channel.multipole as i32);
    let spin = HalfInt::from_int(beam.spin());
    channel
        .delta_range()
        .map(|dm| {
            let nu = beam.m_gamma() - dm;
            let radial = bessel_j(nu, x)?;
            let angular = wigner_small_d(j, HalfInt::from_int(dm), spin, theta)?;
            Ok(SublevelAmplitude {
                m_final: channel.m_initial.add_int(dm),
                delta_m: dm,
                bessel_order: nu,
                amplitude: radial * angular,
            })
        })
        .collect()
}

/// `w(m_f) = |A(m_f)|² / Σ|A|²`.
pub fn excitation_probabilities(
    beam: &TwistedPhotonBeam,
    channel: &TransitionChannel,
    b: Length,
) -> Result<SublevelDistribution> {
    let levels = transition_amplitudes(beam, channel, b)?;
    let mut squares: Vec<f64> = levels.iter().map(|l| l.amplitude * l.amplitude).collect();
    let total = sorted_sum(&mut squares.clone());
    if !(total > 0.0) {
        return Err(Error::UndefinedDistribution);
    }
    for s in &mut squares {
        *s /= total;
    }
    Ok(SublevelDistribution { levels, weights: squares })
}

/// Mean angular momentum absorbed by internal excitation, `⟨m_f − m_i⟩` in ħ.
pub fn mean_internal_am(beam: &TwistedPhotonBeam, channel: &TransitionChannel, b: Length) -> Result<f64> {
    Ok(excitation_probabilities(beam, channel, b)?.mean_delta_m())
}

/// Mean angular momentum delivered to centre-of-mass motion, `m_γ − ⟨Δm⟩` in ħ.
pub fn mean_cm_am(beam: &TwistedPhotonBeam, channel: &TransitionChannel, b: Length) -> Result<f64> {
    Ok(f64::from(beam.m_gamma()) - mean_internal_am(beam, channel, b)?)
}

/// Ratio `p_T/p_z = |⟨ℓ_z⟩_c.m.|·λ/(2π b)` with paraxial `p_z = E/c`.
pub fn recoil_ratio(beam: &TwistedPhotonBeam, channel: &TransitionChannel, b: Length) -> Result<f64> {
    check_b(b)?;
    if b.nm() == 0.0 {
        return Err(domain("recoil ratio requires b > 0"));
    }
    let cm = mean_cm_am(beam, channel, b)?;
    Ok(cm.abs() * hbar_c() / (b.nm() * beam.energy().ev()))
}

/// Shape of `|A(m_f)|²` as a function of `b`, scaled so its maximum over `b` is 1.
///
/// Returns 0 when the angular factor vanishes for this sublevel.
pub fn sublevel_profile(
    beam: &TwistedPhotonBeam,
    channel: &TransitionChannel,
    m_final: HalfInt,
    b: Length,
) -> Result<f64> {
    let b = check_b(b)?;
    let twice_dm = m_final.twice() - channel.m_initial.twice();
    if twice_dm % 2 != 0 {
        return Err(domain(format!("m_f = {m_final} and m_i = {} differ by a half-integer", channel.m_initial)));
    }
    let dm = twice_dm / 2;
    if dm.unsigned_abs() > channel.multipole {
        return Err(domain(format!("|m_f − m_i| = {} exceeds J = {}", dm.abs(), channel.multipole)));
    }
    let angular = wigner_small_d(
        HalfInt::from_int(channel.multipole as i32),
        HalfInt::from_int(dm),
        HalfInt::from_int(beam.spin()),
        beam.pitch_angle(),
    )?;
    if angular == 0.0 {
        return Ok(0.0);
    }
    let nu = beam.m_gamma() - dm;
    let radial = bessel_j(nu, beam.transverse_wavenumber() * b)?;
    if nu == 0 {
        return Ok(radial * radial);
    }
    let (_, peak) = bessel_first_maximum(nu)?;
    Ok((radial / peak).powi(2))
}
