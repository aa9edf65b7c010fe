//! Response of a harmonically trapped ion to the transverse kick.
//!
//! Two jump models are provided. The point model treats absorption as a sudden
//! momentum kick `p_T` on the oscillator ground state. The extended model uses
//! the beam factor `F(r) = J_ν(κ|r|)·e^{iνφ_r}` about the vortex axis and asks
//! how much of `F|0⟩` leaves the ground state of a wavepacket centred at `b`.
//! Both give the probability of a trap jump given that absorption happened.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::beam::TwistedPhotonBeam;
use crate::error::{domain, Error, Result};
use crate::numeric::{integrate_2d, QuadOptions};
use crate::special_functions::{jn, laguerre, BESSEL_MAX_ARG, BESSEL_MAX_ORDER};
use crate::units::{ca40_ion_mass, hbar_c, level_spacing, nonrel_recoil_energy, Energy, Length, Momentum};

/// Isotropic transverse trap with a separate axial frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapModel {
    axial_hz: f64,
    transverse_hz: f64,
    ion_mass: Energy,
}

impl TrapModel {
    pub fn new(axial_hz: f64, transverse_hz: f64, ion_mass: Energy) -> Result<Self> {
        for (name, f) in [("axial", axial_hz), ("transverse", transverse_hz)] {
            if !(f > 0.0) || !f.is_finite() {
                return Err(domain(format!("{name} trap frequency must be positive, got {f} Hz")));
            }
        }
        if !(ion_mass.ev() > 0.0) || !ion_mass.is_finite() {
            return Err(domain(format!("ion mass must be positive and finite, got {ion_mass}")));
        }
        Ok(TrapModel { axial_hz, transverse_hz, ion_mass })
    }

    /// ⁴⁰Ca⁺ with the same frequency on all axes.
    pub fn calcium(frequency_hz: f64) -> Result<Self> {
        Self::new(frequency_hz, frequency_hz, ca40_ion_mass())
    }

    pub fn axial_hz(&self) -> f64 {
        self.axial_hz
    }

    pub fn transverse_hz(&self) -> f64 {
        self.transverse_hz
    }

    pub fn ion_mass(&self) -> Energy {
        self.ion_mass
    }

    /// Axial quantum `h·f_z`.
    pub fn level_spacing(&self) -> Energy {
        level_spacing(self.axial_hz).expect("validated frequency")
    }

    /// Transverse quantum `h·f_T`.
    pub fn transverse_spacing(&self) -> Energy {
        level_spacing(self.transverse_hz).expect("validated frequency")
    }

    /// Transverse oscillator length `x₀ = √(ℏ/Mω_T)`.
    pub fn oscillator_length(&self) -> Length {
        Length::from_nm(hbar_c() / (self.ion_mass.ev() * self.transverse_spacing().ev()).sqrt())
    }

    /// Per-axis rms width of the transverse ground state, `x₀/√2`.
    pub fn ground_state_rms(&self) -> Length {
        self.oscillator_length() / std::f64::consts::SQRT_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LambDickeRegime {
    /// `η < 1`.
    Within,
    /// `η ≥ 1`.
    Broken,
}

impl LambDickeRegime {
    pub fn classify(eta: f64) -> Self {
        if eta < 1.0 {
            LambDickeRegime::Within
        } else {
            LambDickeRegime::Broken
        }
    }
}

/// `η = √(E_rec/ℏω_trap)`.
pub fn lamb_dicke(recoil_energy: Energy, trap_frequency_hz: f64) -> Result<f64> {
    if !(recoil_energy.ev() >= 0.0) {
        return Err(domain(format!("recoil energy must be non-negative, got {recoil_energy}")));
    }
    Ok((recoil_energy / level_spacing(trap_frequency_hz)?).sqrt())
}

/// Sudden-kick jump probability `1 − exp(−η²)` for a point-like ion.
pub fn jump_probability_point(p_t: Momentum, trap: &TrapModel) -> Result<f64> {
    let recoil = nonrel_recoil_energy(p_t, trap.ion_mass)?;
    let eta_sq = recoil / trap.transverse_spacing();
    Ok(-(-eta_sq).exp_m1())
}

#[derive(Debug, Clone, Copy)]
struct BeamFactor {
    nu: i32,
    kappa: f64,
}

impl BeamFactor {
    fn new(beam: &TwistedPhotonBeam, nu: i32) -> Result<Self> {
        if nu.abs() > BESSEL_MAX_ORDER {
            return Err(domain(format!("|ν| must not exceed {BESSEL_MAX_ORDER}, got {nu}")));
        }
        Ok(BeamFactor { nu, kappa: beam.transverse_wavenumber() })
    }

    fn at(&self, x: f64, y: f64) -> Complex64 {
        let r = x.hypot(y);
        let radial = jn(self.nu, self.kappa * r);
        if self.nu == 0 {
            return Complex64::new(radial, 0.0);
        }
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(x / r, y / r).powi(self.nu) * radial
    }
}

fn resolve_sigma(trap: &TrapModel, sigma: Option<Length>) -> Result<f64> {
    let s = sigma.unwrap_or_else(|| trap.ground_state_rms()).nm();
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!("wavepacket rms must be positive, got {s} nm")));
    }
    Ok(s)
}

fn check_extent(factor: &BeamFactor, b: f64, reach: f64) -> Result<()> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(domain(format!("impact parameter must be non-negative, got {b} nm")));
    }
    if factor.kappa * (b + reach) > BESSEL_MAX_ARG {
        return Err(domain("wavepacket extends beyond the supported Bessel argument range"));
    }
    Ok(())
}

const GAUSS_HALF_WIDTH: f64 = 10.0;

/// Jump probability `1 − |⟨0|F|0⟩|²/⟨0||F|²|0⟩` for a Gaussian wavepacket of
/// per-axis rms `sigma` centred at distance `b` from the vortex axis.
///
/// `sigma = None` uses the trap's ground-state width.
pub fn jump_probability_extended(
    beam: &TwistedPhotonBeam,
    nu: i32,
    b: Length,
    trap: &TrapModel,
    sigma: Option<Length>,
) -> Result<f64> {
    let sigma = resolve_sigma(trap, sigma)?;
    let factor = BeamFactor::new(beam, nu)?;
    let b = b.nm();
    check_extent(&factor, b, GAUSS_HALF_WIDTH * sigma * std::f64::consts::SQRT_2)?;
    let w = GAUSS_HALF_WIDTH;
    let gauss = |u: f64, v: f64| (-0.5 * (u * u + v * v)).exp() / (2.0 * PI);
    let point = |u: f64, v: f64| factor.at(b + sigma * u, sigma * v);

    let strength = integrate_2d(
        |u, v, out| out[0] = gauss(u, v) * point(u, v).norm_sqr(),
        (-w, w),
        (-w, w),
        1,
        QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 4000 },
    )?
    .value[0];
    if !(strength > 0.0) {
        return Err(Error::NoAbsorption);
    }
    let amp_tol = 1e-10 * strength.sqrt();
    let mean = integrate_2d(
        |u, v, out| {
            let f = point(u, v) * gauss(u, v);
            out[0] = f.re;
            out[1] = f.im;
        },
        (-w, w),
        (-w, w),
        2,
        QuadOptions { rel_tol: 1e-10, abs_tol: amp_tol, max_intervals: 4000 },
    )?;
    let mean = Complex64::new(mean.value[0], mean.value[1]);
    // ⟨|F − ⟨F⟩|²⟩ keeps full relative accuracy when the jump probability is small
    let variance = integrate_2d(
        |u, v, out| out[0] = gauss(u, v) * (point(u, v) - mean).norm_sqr(),
        (-w, w),
        (-w, w),
        1,
        QuadOptions { rel_tol: 1e-10, abs_tol: 1e-13 * strength, max_intervals: 4000 },
    )?
    .value[0];
    Ok((variance / strength).clamp(0.0, 1.0))
}

/// One oscillator eigenstate `|n_r, ℓ⟩` reached from the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidebandComponent {
    /// Trap quanta gained, `n = 2 n_r + |ℓ|`.
    pub n: u32,
    pub n_radial: u32,
    pub l_osc: i32,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SidebandSpectrum {
    /// `weights[n]` is the probability to gain `n` transverse quanta.
    pub weights: Vec<f64>,
    pub carrier_weight: f64,
    /// `1 − Σ weights`, the strength lying above `n_max`.
    pub residual: f64,
    pub truncation_warning: bool,
    pub components: Vec<SidebandComponent>,
    /// `⟨0||F|²|0⟩`.
    pub total_strength: f64,
}

pub const SIDEBAND_MAX_LEVEL: u32 = 40;
const TRUNCATION_WARN: f64 = 1e-3;

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Distribution of transverse trap quanta after absorption, from the
/// ground state, in the polar oscillator basis centred on the trap.
pub fn sideband_spectrum(
    beam: &TwistedPhotonBeam,
    nu: i32,
    b: Length,
    trap: &TrapModel,
    sigma: Option<Length>,
    n_max: u32,
) -> Result<SidebandSpectrum> {
    if !(2..=SIDEBAND_MAX_LEVEL).contains(&n_max) {
        return Err(domain(format!("n_max must be in 2..={SIDEBAND_MAX_LEVEL}, got {n_max}")));
    }
    let sigma = resolve_sigma(trap, sigma)?;
    let x0 = std::f64::consts::SQRT_2 * sigma;
    let factor = BeamFactor::new(beam, nu)?;
    let b = b.nm();
    let w = 8f64.max(f64::from(n_max).sqrt() + 7.0);
    check_extent(&factor, b, w * x0 * std::f64::consts::SQRT_2)?;

    let mut states = Vec::new();
    for n in 0..=n_max {
        for l in (-(n as i32)..=n as i32).step_by(2) {
            let nr = (n - l.unsigned_abs()) / 2;
            let norm = (factorial(nr) / (PI * factorial(nr + l.unsigned_abs()))).sqrt();
            states.push((n, nr, l, norm));
        }
    }
    let ground = 1.0 / PI.sqrt();
    let point = |sx: f64, sy: f64| factor.at(b + x0 * sx, x0 * sy);

    let strength = integrate_2d(
        |sx, sy, out| out[0] = point(sx, sy).norm_sqr() * (-(sx * sx + sy * sy)).exp() / PI,
        (-w, w),
        (-w, w),
        1,
        QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 4000 },
    )?
    .value[0];
    if !(strength > 0.0) {
        return Err(Error::NoAbsorption);
    }

    let dim = 2 * states.len();
    let overlaps = integrate_2d(
        |sx, sy, out| {
            let s2 = sx * sx + sy * sy;
            let envelope = (-s2).exp() * ground;
            let f = point(sx, sy) * envelope;
            for (i, &(_, nr, l, norm)) in states.iter().enumerate() {
                let k = l.unsigned_abs();
                // conj of (s_x + i·sgn(ℓ)·s_y)^{|ℓ|}
                let winding = Complex64::new(sx, -f64::from(l.signum()) * sy).powu(k);
                let v = f * winding * (norm * laguerre(nr, f64::from(k), s2));
                out[2 * i] = v.re;
                out[2 * i + 1] = v.im;
            }
        },
        (-w, w),
        (-w, w),
        dim,
        QuadOptions { rel_tol: 1e-10, abs_tol: 1e-11 * strength.sqrt(), max_intervals: 4000 },
    )?;

    let mut weights = vec![0.0; n_max as usize + 1];
    let mut components = Vec::with_capacity(states.len());
    for (i, &(n, nr, l, _)) in states.iter().enumerate() {
        let amp = Complex64::new(overlaps.value[2 * i], overlaps.value[2 * i + 1]);
        let weight = amp.norm_sqr() / strength;
        weights[n as usize] += weight;
        components.push(SidebandComponent { n, n_radial: nr, l_osc: l, weight });
    }
    let mut sorted = weights.clone();
    sorted.sort_by(f64::total_cmp);
    let residual = 1.0 - sorted.iter().sum::<f64>();
    Ok(SidebandSpectrum {
        carrier_weight: weights[0],
        weights,
        residual,
        truncation_warning: residual > TRUNCATION_WARN,
        components,
        total_strength: strength,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{superkick, Helicity};
    use crate::special_functions::bessel_j;
    use crate::units::wavelength_to_energy;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn beam_729(theta: f64) -> TwistedPhotonBeam {
        let e = wavelength_to_energy(Length::from_nm(729.0)).unwrap();
        TwistedPhotonBeam::new(-2, Helicity::Minus, e, theta).unwrap()
    }

    fn trap() -> TrapModel {
        TrapModel::calcium(1.5e6).unwrap()
    }

    // I_ν(x) by its ascending series
    fn bessel_i(nu: u32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(nu as i32) / factorial(nu);
        let mut sum = term;
        for k in 1..200 {
            term *= 0.25 * x * x / (f64::from(k) * f64::from(k + nu));
            sum += term;
        }
        sum
    }

    #[test]
    fn spacing_and_lengths() {
        let t = trap();
        assert!(rel(t.level_spacing().nev(), 6.2) < 0.02);
        assert!(rel(TrapModel::calcium(0.75e6).unwrap().level_spacing().ev(), 0.5 * t.level_spacing().ev()) < 1e-12);
        assert!(rel(TrapModel::calcium(3e6).unwrap().level_spacing().nev(), 12.4) < 0.02);
        assert!((t.oscillator_length().nm() - 12.99).abs() < 0.01);
        assert!((t.ground_state_rms().nm() - 9.19).abs() < 0.01);
        assert!(TrapModel::calcium(0.0).is_err());
    }

    #[test]
    fn lamb_dicke_values() {
        let spacing = level_spacing(1.5e6).unwrap();
        assert!((lamb_dicke(spacing, 1.5e6).unwrap() - 1.0).abs() < 1e-15);
        let eta = lamb_dicke(Energy::from_nev(0.13), 1.5e6).unwrap();
        assert!(rel(eta, 0.145) < 0.03);
        assert_eq!(LambDickeRegime::classify(eta), LambDickeRegime::Within);
        assert_eq!(LambDickeRegime::classify(1.0), LambDickeRegime::Broken);
        assert_eq!(LambDickeRegime::classify(0.999_999), LambDickeRegime::Within);
    }

    #[test]
    fn point_model_values() {
        let t = trap();
        assert_eq!(jump_probability_point(Momentum::ZERO, &t).unwrap(), 0.0);
        let p_unit = Momentum::from_ev((2.0 * t.ion_mass().ev() * t.transverse_spacing().ev()).sqrt());
        let p = jump_probability_point(p_unit, &t).unwrap();
        assert!((p - (1.0 - (-1f64).exp())).abs() < 1e-12);
        let kick = superkick(1, Length::from_nm(10.0)).unwrap();
        let eta_sq = nonrel_recoil_energy(kick, t.ion_mass()).unwrap() / level_spacing(1.5e6).unwrap();
        assert!((eta_sq - 0.84).abs() < 0.01);
        assert!((jump_probability_point(kick, &t).unwrap() - 0.57).abs() < 0.01);
    }

    #[test]
    fn point_model_monotone() {
        let t = trap();
        let mut last = -1.0;
        for i in 0..50 {
            let p = jump_probability_point(Momentum::from_ev(f64::from(i) * 0.01), &t).unwrap();
            assert!(p >= last);
            last = p;
        }
        let kick = Momentum::from_ev(0.02);
        let soft = jump_probability_point(kick, &TrapModel::calcium(1e6).unwrap()).unwrap();
        let stiff = jump_probability_point(kick, &TrapModel::calcium(2e6).unwrap()).unwrap();
        assert!(soft > stiff);
    }

    #[test]
    fn extended_vortex_centre_has_no_carrier() {
        let p =
            jump_probability_extended(&beam_729(0.1), 1, Length::ZERO, &trap(), Some(Length::from_nm(10.0))).unwrap();
        assert!((p - 1.0).abs() < 1e-9, "{p}");
    }

    #[test]
    fn extended_constant_factor_limit() {
        let p =
            jump_probability_extended(&beam_729(1e-4), 0, Length::from_nm(30.0), &trap(), Some(Length::from_nm(1.0)))
                .unwrap();
        assert!(p < 1e-12, "{p}");
    }

    #[test]
    fn extended_matches_closed_forms() {
        let beam = beam_729(0.6);
        let kappa = beam.transverse_wavenumber();
        for (nu, b, sigma) in [(1, 0.0, 300.0), (2, 0.0, 150.0), (1, 400.0, 200.0), (3, 900.0, 250.0)] {
            let p = jump_probability_extended(&beam, nu, Length::from_nm(b), &trap(), Some(Length::from_nm(sigma)))
                .unwrap();
            let mean = (-0.5 * (kappa * sigma).powi(2)).exp() * bessel_j(nu, kappa * b).unwrap();
            if b == 0.0 {
                let q = (kappa * sigma).powi(2);
                let strength = (-q).exp() * bessel_i(nu as u32, q);
                assert!((p - (1.0 - mean * mean / strength)).abs() < 1e-9);
            } else {
                assert!(p > 0.0 && p < 1.0);
                let s =
                    sideband_spectrum(&beam, nu, Length::from_nm(b), &trap(), Some(Length::from_nm(sigma)), 4).unwrap();
                assert!(rel(1.0 - p, mean * mean / s.total_strength) < 1e-8);
            }
        }
    }

    #[test]
    fn extended_agrees_with_riemann_sum() {
        let beam = beam_729(0.1);
        let (sigma, b) = (10.0, 20.0);
        let p = jump_probability_extended(&beam, 1, Length::from_nm(b), &trap(), Some(Length::from_nm(sigma))).unwrap();
        let factor = BeamFactor::new(&beam, 1).unwrap();
        let n = 4 * 200;
        let half = 8.0 * sigma;
        let h = 2.0 * half / n as f64;
        let (mut m, mut s) = (Complex64::new(0.0, 0.0), 0.0);
        for i in 0..n {
            for j in 0..n {
                let u = -half + (i as f64 + 0.5) * h;
                let v = -half + (j as f64 + 0.5) * h;
                let g = (-(u * u + v * v) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma) * h * h;
                let f = factor.at(b + u, v);
                m += f * g;
                s += f.norm_sqr() * g;
            }
        }
        let oracle = 1.0 - m.norm_sqr() / s;
        assert!((p - oracle).abs() < 1e-4, "{p} vs {oracle}");
    }

    #[test]
    fn extended_errors() {
        let flat = beam_729(0.0);
        assert_eq!(jump_probability_extended(&flat, 1, Length::from_nm(5.0), &trap(), None), Err(Error::NoAbsorption));
        assert!(
            jump_probability_extended(&beam_729(0.1), 1, Length::from_nm(5.0), &trap(), Some(Length::ZERO)).is_err()
        );
        assert!(jump_probability_extended(&beam_729(0.1), 1, Length::from_nm(-5.0), &trap(), None).is_err());
    }

    #[test]
    fn sideband_vortex_centre_single_quantum() {
        let s = sideband_spectrum(&beam_729(0.1), 1, Length::ZERO, &trap(), Some(Length::from_nm(10.0)), 6).unwrap();
        assert!(s.carrier_weight.abs() < 1e-12);
        assert!(s.weights[1] > 0.999, "{:?}", s.weights);
        let one = s.components.iter().find(|c| c.n == 1 && c.l_osc == 1).unwrap();
        assert!((one.weight - s.weights[1]).abs() < 1e-12);
        assert!(!s.truncation_warning);
    }

    #[test]
    fn sideband_completeness_and_consistency() {
        let beam = beam_729(0.1);
        let sigma = Some(Length::from_nm(10.0));
        let b = Length::from_nm(10.0);
        let s = sideband_spectrum(&beam, 1, b, &trap(), sigma, 8).unwrap();
        let total: f64 = s.weights.iter().sum();
        assert!((total + s.residual - 1.0).abs() < 1e-12);
        assert!(s.residual.abs() < 1e-4, "{}", s.residual);
        assert!(s.weights.iter().all(|w| *w >= 0.0));
        let p = jump_probability_extended(&beam, 1, b, &trap(), sigma).unwrap();
        assert!((p - (1.0 - s.carrier_weight)).abs() < 1e-6);
    }

    #[test]
    fn sideband_truncation_warning() {
        let beam = beam_729(1.0);
        let s = sideband_spectrum(&beam, 3, Length::from_nm(300.0), &trap(), Some(Length::from_nm(300.0)), 2).unwrap();
        assert!(s.truncation_warning);
        assert!(s.residual > 1e-3);
        assert!(sideband_spectrum(&beam, 3, Length::ZERO, &trap(), None, 1).is_err());
    }
}
