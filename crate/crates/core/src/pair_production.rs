//! Threshold of `γγ → e⁺e⁻` for a twisted high-energy photon `ω₁` meeting a
//! background photon `ω₂` head on.
//!
//! The twisted photon carries transverse momentum `ω₁ sin θ_k` from its cone
//! and the pair recoils with `p_T = ℓ_γℏ/b`. At threshold
//! `ω₁² sin²θ_k + 4ω₁ω₂ = 4m² + p_T²`.

use serde::Serialize;

use crate::beam::{superkick, Helicity, TwistedPhotonBeam};
use crate::error::{domain, Error, Result};
use crate::numeric::bisect;
use crate::special_functions::bessel_first_maximum;
use crate::units::{electron_mass, hbar_c, Energy, Length, Momentum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairThresholdQuery {
    pub omega2: Energy,
    pub pitch_angle: f64,
    pub impact_parameter: Length,
    pub l_gamma: i32,
}

impl PairThresholdQuery {
    pub fn new(omega2: Energy, pitch_angle: f64, impact_parameter: Length, l_gamma: i32) -> Result<Self> {
        let q = PairThresholdQuery { omega2, pitch_angle, impact_parameter, l_gamma };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        check_omega2(self.omega2)?;
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.pitch_angle) {
            return Err(domain(format!("pitch angle must lie in [0, π/2), got {}", self.pitch_angle)));
        }
        if self.l_gamma < 0 {
            return Err(domain(format!("ℓ_γ must be non-negative, got {}", self.l_gamma)));
        }
        Ok(())
    }

    fn transverse_momentum(&self) -> Result<Momentum> {
        superkick(self.l_gamma, self.impact_parameter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairThreshold {
    /// Threshold energy `ω₁` of the twisted photon.
    pub photon_energy: Energy,
    /// `ω₁ cos θ_k`.
    pub p_z: Momentum,
    pub p_t: Momentum,
    pub plane_wave: Energy,
    /// Relative residual of the threshold equation at the returned root.
    pub residual: f64,
}

fn check_omega2(omega2: Energy) -> Result<()> {
    if !(omega2.ev() > 0.0) || !omega2.is_finite() {
        return Err(domain(format!("background photon energy must be positive, got {omega2}")));
    }
    Ok(())
}

/// `m²/ω₂`.
pub fn plane_wave_threshold(omega2: Energy) -> Result<Energy> {
    check_omega2(omega2)?;
    let m = electron_mass().ev();
    Ok(Energy::from_ev(m * m / omega2.ev()))
}

/// Positive root of `s²ω₁² + 4ω₂ω₁ − (4m² + p_T²) = 0`.
fn threshold_root(omega2: f64, sin_theta: f64, p_t: f64) -> f64 {
    let m = electron_mass().ev();
    let c = 4.0 * m * m + p_t * p_t;
    let lin = 4.0 * omega2;
    2.0 * c / (lin + (lin * lin + 4.0 * sin_theta * sin_theta * c).sqrt())
}

pub fn pair_threshold(query: &PairThresholdQuery) -> Result<PairThreshold> {
    query.validate()?;
    pair_threshold_with_pt(query.omega2, query.pitch_angle, query.transverse_momentum()?)
}

/// Threshold for a pair recoiling with a given transverse momentum.
pub fn pair_threshold_with_pt(omega2: Energy, pitch_angle: f64, p_t: Momentum) -> Result<PairThreshold> {
    check_omega2(omega2)?;
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&pitch_angle) {
        return Err(domain(format!("pitch angle must lie in [0, π/2), got {pitch_angle}")));
    }
    if !(p_t.ev() >= 0.0) || !p_t.is_finite() {
        return Err(domain(format!("p_T must be non-negative and finite, got {p_t}")));
    }
    let (w2, s) = (omega2.ev(), pitch_angle.sin());
    let omega1 = threshold_root(w2, s, p_t.ev());
    if !(omega1 > 0.0) || !omega1.is_finite() {
        return Err(Error::Solver(format!("no positive threshold root for ω₂ = {omega2}, p_T = {p_t}")));
    }
    let m = electron_mass().ev();
    let c = 4.0 * m * m + p_t.ev() * p_t.ev();
    let residual = ((omega1 * omega1 * s * s + 4.0 * omega1 * w2 - c) / c).abs();
    Ok(PairThreshold {
        photon_energy: Energy::from_ev(omega1),
        p_z: Momentum::from_ev(omega1 * pitch_angle.cos()),
        p_t,
        plane_wave: plane_wave_threshold(omega2)?,
        residual,
    })
}

/// Small-angle form `m²/ω₂ + p_T²/(4ω₂)`.
pub fn small_angle_threshold(omega2: Energy, p_t: Momentum) -> Result<Energy> {
    check_omega2(omega2)?;
    if !(p_t.ev() >= 0.0) {
        return Err(domain(format!("p_T must be non-negative, got {p_t}")));
    }
    let m = electron_mass().ev();
    Ok(Energy::from_ev((4.0 * m * m + p_t.ev() * p_t.ev()) / (4.0 * omega2.ev())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    /// `b·θ_k` at the crossing for the reference angle, in nm·rad.
    pub product: f64,
    pub reference_angle: f64,
    /// `(max − min)/product` of the crossing product over `θ_k ∈ [1, 10] µrad`.
    pub variation: f64,
}

impl Crossover {
    /// The product in pm·µrad.
    pub fn pm_urad(&self) -> f64 {
        self.product * 1e9
    }
}

pub const CROSSOVER_REFERENCE_ANGLE: f64 = 5e-6;

fn crossing_product(omega2: Energy, l_gamma: i32, theta: f64) -> Result<f64> {
    let plane = plane_wave_threshold(omega2)?.ev();
    let m = electron_mass().ev();
    let guess = f64::from(l_gamma) * hbar_c() * omega2.ev() / (m * m);
    let gap = |u: f64| {
        let q =
            PairThresholdQuery { omega2, pitch_angle: theta, impact_parameter: Length::from_nm(u / theta), l_gamma };
        pair_threshold(&q).map_or(f64::NAN, |t| (t.photon_energy.ev() - plane) / plane)
    };
    bisect(gap, guess / 8.0, guess * 8.0)
}

/// Solves for the `b·θ_k` product where the twisted threshold meets the
/// plane-wave one, and reports how constant it is across a decade of angles.
pub fn crossover_product(omega2: Energy, l_gamma: i32) -> Result<Crossover> {
    if l_gamma <= 0 {
        return Err(domain(format!("crossover requires ℓ_γ ≥ 1, got {l_gamma}")));
    }
    let product = crossing_product(omega2, l_gamma, CROSSOVER_REFERENCE_ANGLE)?;
    let samples = (0..=10)
        .map(|i| crossing_product(omega2, l_gamma, 1e-6 * 10f64.powf(f64::from(i) / 10.0)))
        .collect::<Result<Vec<_>>>()?;
    let max = samples.iter().copied().fold(f64::MIN, f64::max);
    let min = samples.iter().copied().fold(f64::MAX, f64::min);
    Ok(Crossover { product, reference_angle: CROSSOVER_REFERENCE_ANGLE, variation: (max - min) / product })
}

/// Beam parameters giving a chosen multiple of the plane-wave threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamFit {
    pub factor: f64,
    pub p_t: Momentum,
    /// `None` when `factor = 1`: no kick is needed and `b` is unbounded.
    pub impact_parameter: Option<Length>,
    /// Photon energy at the requested threshold, `factor · m²/ω₂`.
    pub photon_energy: Energy,
    pub pitch_angle: f64,
    pub w0: Option<Length>,
    /// Profile peak radius achieved with `(pitch_angle, w0)`.
    pub achieved_peak: Option<Length>,
}

pub const FIT_DEFAULT_ANGLE: f64 = 5e-6;

/// Chooses `p_T`, then `b = ℓ_γℏ/p_T`, then a pitch angle and envelope `w_0`
/// whose Bessel–Gauss intensity peaks at `b`.
pub fn fit_beam_for_threshold_factor(factor: f64, omega2: Energy, l_gamma: i32) -> Result<BeamFit> {
    if !(factor >= 1.0) || !factor.is_finite() {
        return Err(domain(format!("threshold factor must be ≥ 1, got {factor}")));
    }
    if l_gamma <= 0 {
        return Err(domain(format!("ℓ_γ must be at least 1, got {l_gamma}")));
    }
    let m = electron_mass().ev();
    let p_t = Momentum::from_ev(2.0 * m * (factor - 1.0).sqrt());
    let photon_energy = plane_wave_threshold(omega2)? * factor;
    if p_t.ev() == 0.0 {
        return Ok(BeamFit {
            factor,
            p_t,
            impact_parameter: None,
            photon_energy,
            pitch_angle: FIT_DEFAULT_ANGLE,
            w0: None,
            achieved_peak: None,
        });
    }
    let b = f64::from(l_gamma) * hbar_c() / p_t.ev();
    let (x_max, _) = bessel_first_maximum(l_gamma).map_err(|e| Error::Fit(e.to_string()))?;

    let mut theta = FIT_DEFAULT_ANGLE;
    // the peak radius can only approach j'_{ℓ,1}/κ from below
    loop {
        let kappa = photon_energy.ev() * theta.sin() / hbar_c();
        if b < 0.95 * x_max / kappa {
            break;
        }
        theta *= 0.5;
        if theta < 1e-15 {
            return Err(Error::Fit("no pitch angle places the profile peak at b".into()));
        }
    }
    let beam = TwistedPhotonBeam::new(l_gamma + 1, Helicity::Plus, photon_energy, theta)?;
    let peak_at = |w0: f64| -> Result<f64> { Ok(beam.with_envelope(Length::from_nm(w0))?.profile_peak_radius()?.nm()) };
    let w_lo = b * (2.0 / f64::from(l_gamma)).sqrt();
    let mut w_hi = 2.0 * w_lo;
    while peak_at(w_hi).map_err(|e| Error::Fit(e.to_string()))? < b {
        w_hi *= 2.0;
        if w_hi > 1e6 * w_lo {
            return Err(Error::Fit("envelope search did not bracket the target radius".into()));
        }
    }
    let w0 = bisect(|w| peak_at(w).map_or(f64::NAN, |p| p - b), w_lo, w_hi).map_err(|e| Error::Fit(e.to_string()))?;
    let achieved = peak_at(w0).map_err(|e| Error::Fit(e.to_string()))?;
    Ok(BeamFit {
        factor,
        p_t,
        impact_parameter: Some(Length::from_nm(b)),
        photon_energy,
        pitch_angle: theta,
        w0: Some(Length::from_nm(w0)),
        achieved_peak: Some(Length::from_nm(achieved)),
    })
}

/// Peak radius of the Bessel–Gauss profile for a given pitch angle and envelope,
/// for a photon at `factor` times the plane-wave threshold.
pub fn profile_peak_for(factor: f64, omega2: Energy, l_gamma: i32, pitch_angle: f64, w0: Length) -> Result<Length> {
    let energy = plane_wave_threshold(omega2)? * factor;
    TwistedPhotonBeam::new(l_gamma + 1, Helicity::Plus, energy, pitch_angle)?.with_envelope(w0)?.profile_peak_radius()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn green() -> Energy {
        Energy::from_ev(2.5)
    }

    #[test]
    fn plane_wave_values() {
        let t = plane_wave_threshold(green()).unwrap();
        assert!(rel(t.gev(), 104.446) < 1e-4, "{}", t.gev());
        let half = plane_wave_threshold(Energy::from_ev(5.0)).unwrap();
        assert!(rel(half.ev(), 0.5 * t.ev()) < 1e-12);
        assert!(rel(plane_wave_threshold(electron_mass()).unwrap().ev(), electron_mass().ev()) < 1e-15);
        assert!(plane_wave_threshold(Energy::ZERO).is_err());
    }

    #[test]
    fn fig8_point_against_quadratic_formula() {
        let q = PairThresholdQuery::new(green(), 5e-6, Length::from_fm(200.0), 1).unwrap();
        let t = pair_threshold(&q).unwrap();
        let pt = hbar_c() / 200e-6;
        assert!(rel(pt, 0.9866e6) < 1e-4);
        let m = electron_mass().ev();
        let (a, bq, c) = (25e-12, 10.0, -(4.0 * m * m + pt * pt));
        let oracle = (-bq + (bq * bq - 4.0 * a * c).sqrt()) / (2.0 * a);
        assert!(rel(t.photon_energy.ev(), oracle) < 1e-6);
        assert!(rel(t.photon_energy.gev(), 147.0) < 0.01, "{}", t.photon_energy.gev());
        assert!(t.residual < 1e-10);
    }

    #[test]
    fn degenerate_angle_is_linear() {
        let q = PairThresholdQuery::new(green(), 0.0, Length::from_fm(100.0), 0).unwrap();
        let t = pair_threshold(&q).unwrap();
        assert!(rel(t.photon_energy.ev(), t.plane_wave.ev()) < 1e-9);
        let kicked = PairThresholdQuery::new(green(), 0.0, Length::from_fm(100.0), 1).unwrap();
        let t = pair_threshold(&kicked).unwrap();
        let eq12 = small_angle_threshold(green(), t.p_t).unwrap();
        assert!(rel(t.photon_energy.ev(), eq12.ev()) < 1e-14);
        assert!(PairThresholdQuery::new(green(), 0.0, Length::ZERO, 1).and_then(|q| pair_threshold(&q)).is_err());
    }

    #[test]
    fn small_angle_values() {
        let m = electron_mass().ev();
        let plane = plane_wave_threshold(green()).unwrap().ev();
        let ten = small_angle_threshold(green(), Momentum::from_ev(6.0 * m)).unwrap().ev();
        assert!(rel(ten, 10.0 * plane) < 1e-15);
        let two = small_angle_threshold(green(), Momentum::from_ev(2.0 * m)).unwrap().ev();
        assert!(rel(two, 2.0 * plane) < 1e-12);
        assert!(rel(small_angle_threshold(green(), Momentum::ZERO).unwrap().ev(), plane) < 1e-15);
    }

    #[test]
    fn crossover_values() {
        let c = crossover_product(green(), 1).unwrap();
        let m = electron_mass().ev();
        let analytic = hbar_c() * 2.5 / (m * m);
        assert!(rel(c.product, analytic) < 0.02);
        assert!((c.pm_urad() - 2.0).abs() < 0.3, "{}", c.pm_urad());
        assert!((c.pm_urad() - 1.889).abs() < 0.001);
        assert!(c.variation < 1e-6);
        let c2 = crossover_product(green(), 2).unwrap();
        assert!(rel(c2.product, 2.0 * c.product) < 0.02);
        assert!(crossover_product(green(), 0).is_err());
    }

    #[test]
    fn fig8a_crosses_at_the_product() {
        let theta = 5e-6;
        let plane = plane_wave_threshold(green()).unwrap().ev();
        let crossing = bisect(
            |b| {
                let q = PairThresholdQuery::new(green(), theta, Length::from_fm(b), 1).unwrap();
                pair_threshold(&q).unwrap().photon_energy.ev() - plane
            },
            20.0,
            2000.0,
        )
        .unwrap();
        let c = crossover_product(green(), 1).unwrap();
        assert!(rel(crossing * 1e-6 * theta, c.product) < 0.05);
    }

    #[test]
    fn monotone_in_b_and_theta() {
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let b = 20.0 * 100f64.powf(f64::from(i) / 99.0);
            let q = PairThresholdQuery::new(green(), 5e-6, Length::from_fm(b), 1).unwrap();
            let t = pair_threshold(&q).unwrap().photon_energy.ev();
            assert!(t < last);
            last = t;
        }
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let theta = 0.5e-6 * 100f64.powf(f64::from(i) / 99.0);
            let q = PairThresholdQuery::new(green(), theta, Length::from_fm(200.0), 1).unwrap();
            let t = pair_threshold(&q).unwrap().photon_energy.ev();
            assert!(t < last);
            last = t;
        }
    }

    #[test]
    fn ten_fold_fit() {
        let fit = fit_beam_for_threshold_factor(10.0, green(), 1).unwrap();
        let m = electron_mass().ev();
        assert!(rel(fit.p_t.ev(), 6.0 * m) < 1e-15);
        let b = fit.impact_parameter.unwrap();
        assert!(rel(b.fm(), hbar_c() / (6.0 * m) * 1e6) < 1e-12);
        assert!(rel(b.fm(), 64.4) < 0.01);
        let peak = fit.achieved_peak.unwrap();
        assert!(rel(peak.nm(), b.nm()) < 1e-6, "{peak} vs {b}");
        assert!(rel(fit.photon_energy.ev(), 10.0 * plane_wave_threshold(green()).unwrap().ev()) < 1e-15);
    }

    #[test]
    fn unit_factor_is_unbounded() {
        let fit = fit_beam_for_threshold_factor(1.0, green(), 1).unwrap();
        assert_eq!(fit.p_t, Momentum::ZERO);
        assert!(fit.impact_parameter.is_none());
        assert!(fit_beam_for_threshold_factor(0.5, green(), 1).is_err());
        let near = fit_beam_for_threshold_factor(1.0 + 1e-8, green(), 1).unwrap();
        assert!(near.impact_parameter.unwrap().fm() > 1e5);
    }

    #[test]
    fn reference_beam_peak_inside_envelope() {
        let p = profile_peak_for(10.0, green(), 1, 5e-6, Length::from_fm(60.0)).unwrap();
        assert!((p.fm() - 36.81).abs() < 0.05, "{p}");
    }

    proptest! {
        #[test]
        fn quadratic_matches_small_angle_to_first_order(
            theta in 1e-8f64..1e-5, b_fm in 20.0f64..5000.0, l in 0i32..4, w2 in 0.1f64..10.0,
        ) {
            let q = PairThresholdQuery::new(Energy::from_ev(w2), theta, Length::from_fm(b_fm), l).unwrap();
            let full = pair_threshold(&q).unwrap();
            prop_assert!(full.residual < 1e-10);
            let approx = small_angle_threshold(Energy::from_ev(w2), full.p_t).unwrap().ev();
            let w1 = full.photon_energy.ev();
            let bound = theta * theta * w1 / (4.0 * w2);
            prop_assert!(((approx - w1) / w1).abs() <= bound * (1.0 + 1e-9) + 1e-15);
        }
    }
}
