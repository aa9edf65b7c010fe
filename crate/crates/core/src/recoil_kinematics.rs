//! Energy conservation with recoil, `ℏω = ℏω₀ + (p_z² + p_T²)/2M`, where
//! `p_z = ℏω/c` and `p_T = Δℓ_c.m.·ℏ/b`.

use serde::Serialize;

use crate::beam::{superkick, PzConvention, TwistedPhotonBeam};
use crate::error::{domain, Error, Result};
use crate::units::{deuteron_binding, deuteron_mass, hbar_c, Energy, Length, Momentum};

/// A localized absorber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetParticle {
    mass: Energy,
    impact_parameter: Length,
    spread_rms: Option<Length>,
}

impl TargetParticle {
    /// `mass` may be infinite, which switches recoil off.
    pub fn new(mass: Energy, impact_parameter: Length) -> Result<Self> {
        if !(mass.ev() > 0.0) {
            return Err(domain(format!("target mass must be positive, got {mass}")));
        }
        if !(impact_parameter.nm() >= 0.0) || !impact_parameter.is_finite() {
            return Err(domain(format!("impact parameter must be non-negative, got {impact_parameter}")));
        }
        Ok(TargetParticle { mass, impact_parameter, spread_rms: None })
    }

    pub fn with_spread(mut self, sigma: Length) -> Result<Self> {
        if !(sigma.nm() > 0.0) || !sigma.is_finite() {
            return Err(domain(format!("spread must be positive, got {sigma}")));
        }
        self.spread_rms = Some(sigma);
        Ok(self)
    }

    pub fn deuteron(impact_parameter: Length) -> Result<Self> {
        Self::new(deuteron_mass(), impact_parameter)
    }

    pub fn mass(&self) -> Energy {
        self.mass
    }

    pub fn impact_parameter(&self) -> Length {
        self.impact_parameter
    }

    pub fn spread_rms(&self) -> Option<Length> {
        self.spread_rms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSolution {
    pub omega0: Energy,
    pub photon_energy: Energy,
    pub p_z: Momentum,
    pub p_t: Momentum,
    pub recoil_energy: Energy,
}

impl ThresholdSolution {
    /// `|ℏω − ℏω₀ − E_rec| / ℏω`.
    pub fn relative_residual(&self) -> f64 {
        let r = self.photon_energy - self.omega0 - self.recoil_energy;
        (r.ev() / self.photon_energy.ev()).abs()
    }

    pub fn shift(&self) -> Energy {
        self.photon_energy - self.omega0
    }
}

/// Solves the recoil-corrected resonance condition for the photon energy.
pub fn absorption_energy(omega0: Energy, target: &TargetParticle, delta_l_cm: u32) -> Result<ThresholdSolution> {
    if !(omega0.ev() > 0.0) || !omega0.is_finite() {
        return Err(domain(format!("transition energy must be positive, got {omega0}")));
    }
    let p_t = superkick(delta_l_cm as i32, target.impact_parameter)?;
    let m = target.mass.ev();
    let (w0, pt) = (omega0.ev(), p_t.ev());
    if m.is_infinite() {
        return Ok(ThresholdSolution {
            omega0,
            photon_energy: omega0,
            p_z: omega0.as_momentum(),
            p_t,
            recoil_energy: Energy::ZERO,
        });
    }
    // ω² − 2Mω + 2Mω₀ + p_T² = 0, lower root in cancellation-free form
    let c = 2.0 * m * w0 + pt * pt;
    let disc = m * m - c;
    if !(disc >= 0.0) {
        return Err(Error::Solver(format!("no physical root: 2Mω₀ + p_T² = {c:e} eV² exceeds M² = {:e} eV²", m * m)));
    }
    let omega = c / (m + disc.sqrt());
    let recoil = (omega * omega + pt * pt) / (2.0 * m);
    Ok(ThresholdSolution {
        omega0,
        photon_energy: Energy::from_ev(omega),
        p_z: Momentum::from_ev(omega),
        p_t,
        recoil_energy: Energy::from_ev(recoil),
    })
}

/// `(Δℓ·ℏ/b)²/2M`.
pub fn transverse_recoil_energy(target: &TargetParticle, delta_l_cm: u32) -> Result<Energy> {
    if !(target.impact_parameter.nm() > 0.0) {
        return Err(domain("transverse recoil requires b > 0"));
    }
    let p = superkick(delta_l_cm as i32, target.impact_parameter)?.ev();
    Ok(Energy::from_ev(p * p / (2.0 * target.mass.ev())))
}

/// Photodisintegration threshold when `internal_am_absorbed` units go into the
/// nuclear transition and the rest into centre-of-mass motion.
pub fn deuteron_threshold(beam: &TwistedPhotonBeam, internal_am_absorbed: i32, b: Length) -> Result<ThresholdSolution> {
    if internal_am_absorbed < 0 {
        return Err(domain(format!("internal angular momentum must be non-negative, got {internal_am_absorbed}")));
    }
    let delta = beam.m_gamma() - internal_am_absorbed;
    if delta < 0 {
        return Err(domain(format!("m_γ = {} cannot supply {internal_am_absorbed} units internally", beam.m_gamma())));
    }
    absorption_energy(deuteron_binding(), &TargetParticle::deuteron(b)?, delta as u32)
}

/// Radius inside which `p_T > ratio_cut · p_z`: `b* = Δℓ·ℏc/(ratio_cut·E)`.
pub fn focus_radius(beam: &TwistedPhotonBeam, delta_l_cm: u32, ratio_cut: f64) -> Result<Length> {
    if !(ratio_cut > 0.0) {
        return Err(domain(format!("ratio cut must be positive, got {ratio_cut}")));
    }
    let pz = beam.longitudinal_momentum(PzConvention::Paraxial).ev();
    Ok(Length::from_nm(f64::from(delta_l_cm) * hbar_c() / (ratio_cut * pz)))
}

/// Fraction of absorption events with `p_T > ratio_cut · p_z`, taking the
/// absorption density proportional to the Bessel–Gauss intensity.
pub fn focus_fraction(beam: &TwistedPhotonBeam, delta_l_cm: u32, ratio_cut: f64) -> Result<f64> {
    let r = focus_radius(beam, delta_l_cm, ratio_cut)?;
    beam.enclosed_power_fraction(r)
}
