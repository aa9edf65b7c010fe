//! Integer-order Bessel functions of the first kind, Wigner small-d elements
//! and the Laguerre polynomials used by the oscillator basis.

use std::f64::consts::PI;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::numeric::golden_section_max;

/// Largest supported |n| for [`bessel_j`].
pub const BESSEL_MAX_ORDER: i32 = 64;
/// Largest supported |x| for [`bessel_j`].
pub const BESSEL_MAX_ARG: f64 = 1e6;
/// Largest supported J for [`wigner_small_d`].
pub const WIGNER_MAX_J: HalfInt = HalfInt(32);

/// Beyond this argument the Hankel asymptotic expansion replaces Miller's recurrence.
const ASYMPTOTIC_MIN_ARG: f64 = 1.0e4;

/// Integer or half-integer quantum number, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(v: i32) -> Self {
        HalfInt(2 * v)
    }

    /// Accepts values that are exact multiples of 1/2.
    pub fn from_f64(v: f64) -> Result<Self> {
        let twice = 2.0 * v;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > 1e6 {
            return Err(domain(format!("{v} is not an integer or half-integer")));
        }
        Ok(HalfInt(twice as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) * 0.5
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Integer value, if this is an integer.
    pub fn to_int(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    pub const fn neg(self) -> Self {
        HalfInt(-self.0)
    }

    pub const fn add_int(self, v: i32) -> Self {
        HalfInt(self.0 + 2 * v)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

/// Bessel function of the first kind `J_n(x)` for integer order.
///
/// Absolute error is below 1e-12 for |x| ≤ 50; for larger arguments the error
/// relative to the envelope `√(2/πx)` stays below 1e-10.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    if n.abs() > BESSEL_MAX_ORDER {
        return Err(domain(format!("Bessel order {n} outside |n| ≤ {BESSEL_MAX_ORDER}")));
    }
    if !x.is_finite() || x.abs() > BESSEL_MAX_ARG {
        return Err(domain(format!("Bessel argument {x} outside |x| ≤ {BESSEL_MAX_ARG}")));
    }
    Ok(jn(n, x))
}

/// Unchecked `J_n(x)`; callers guarantee the supported range.
pub(crate) fn jn(n: i32, x: f64) -> f64 {
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x)
    let order = n.unsigned_abs();
    let odd = order % 2 == 1;
    let mut sign = 1.0;
    if n < 0 && odd {
        sign = -sign;
    }
    if x < 0.0 && odd {
        sign = -sign;
    }
    sign * jn_nonneg(order, x.abs())
}

fn jn_nonneg(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = f64::from(n);
    if x * x < 4.0 * (nf + 1.0) {
        ascending_series(n, x)
    } else if x < ASYMPTOTIC_MIN_ARG {
        miller(n, x)
    } else {
        hankel_asymptotic(n, x)
    }
}

/// Every term after the first is smaller, so the alternating sum is well conditioned.
fn ascending_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / f64::from(k);
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (f64::from(k) * f64::from(n + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

/// Backward recurrence from an order well above `max(n, x)`, normalized with
/// `1 = J_0 + 2 Σ_k J_{2k}`.
fn miller(n: u32, x: f64) -> f64 {
    let m0 = f64::from(n).max(x);
    let start = (m0 + 30.0 + 12.0 * m0.sqrt()) as u32;
    let start = start + (start % 2);
    const BIG: f64 = 1e250;
    let mut j_up = 0.0;
    let mut j = 1e-30;
    let mut sum = 2.0 * j;
    let mut result = if start == n { j } else { 0.0 };
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let j_down = f64::from(k) * two_over_x * j - j_up;
        j_up = j;
        j = j_down;
        let idx = k - 1;
        if idx == n {
            result = j;
        }
        if idx > 0 && idx % 2 == 0 {
            sum += 2.0 * j;
        }
        if j.abs() > BIG {
            j /= BIG;
            j_up /= BIG;
            sum /= BIG;
            result /= BIG;
        }
    }
    sum += j;
    result / sum
}

/// Hankel expansion `√(2/πx)(P cos χ − Q sin χ)`, `χ = x − (n/2 + 1/4)π`.
fn hankel_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(n) * f64::from(n);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200u32 {
        let odd = f64::from(2 * k - 1);
        term *= (mu - odd * odd) / (8.0 * f64::from(k) * x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // a_k/x^k enters P for even k and Q for odd k with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * f64::from(n) + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Location and value of the first maximum of `J_n` for `n ≥ 1`.
///
/// This first maximum is the global maximum of `|J_n|` on `x > 0`.
pub fn bessel_first_maximum(n: i32) -> Result<(f64, f64)> {
    let order = n.abs();
    if order == 0 || order > BESSEL_MAX_ORDER {
        return Err(domain(format!("first maximum requires 1 ≤ |n| ≤ {BESSEL_MAX_ORDER}, got {n}")));
    }
    let nf = f64::from(order);
    // j'_{n,1} lies between n and n + 2 n^{1/3} + 1
    let hi = nf + 2.0 * nf.cbrt() + 1.0;
    let (x, v) = golden_section_max(|x| jn(order, x), nf * 0.9, hi, 1e-13);
    Ok((x, v.abs()))
}

fn factorial(n: i32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Wigner small-d element `d^j_{m',m}(θ)` in the Condon–Shortley convention.
///
/// Evaluated with the explicit finite sum. Arguments are first mapped to a
/// canonical representative with `d_{m',m} = (−1)^{m'−m} d_{−m',−m}`, so
/// mirrored index pairs produce bit-identical magnitudes.
pub fn wigner_small_d(j: HalfInt, m_row: HalfInt, m_col: HalfInt, theta: f64) -> Result<f64> {
    let (tj, tmp, tm) = (j.twice(), m_row.twice(), m_col.twice());
    if tj < 0 || j > WIGNER_MAX_J {
        return Err(domain(format!("Wigner d requires 0 ≤ J ≤ {WIGNER_MAX_J}, got {j}")));
    }
    if tmp.abs() > tj || tm.abs() > tj {
        return Err(domain(format!("|m| exceeds J in d^{j}_{{{m_row},{m_col}}}")));
    }
    if (tj + tmp) % 2 != 0 || (tj + tm) % 2 != 0 {
        return Err(domain(format!("J = {j} and m = ({m_row}, {m_col}) mix integer and half-integer values")));
    }
    if !theta.is_finite() {
        return Err(domain("rotation angle must be finite"));
    }
    if tmp < 0 || (tmp == 0 && tm < 0) {
        let sign = if ((tmp - tm) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * small_d_sum(tj, -tmp, -tm, theta));
    }
    Ok(small_d_sum(tj, tmp, tm, theta))
}

fn small_d_sum(tj: i32, tmp: i32, tm: i32, theta: f64) -> f64 {
    let jpm_row = (tj + tmp) / 2;
    let jmm_row = (tj - tmp) / 2;
    let jpm = (tj + tm) / 2;
    let jmm = (tj - tm) / 2;
    let diff = (tmp - tm) / 2; // m' − m
    let prefactor = (factorial(jpm_row) * factorial(jmm_row) * factorial(jpm) * factorial(jmm)).sqrt();
    let (s, c) = (0.5 * theta).sin_cos();
    let k_min = 0.max(-diff);
    let k_max = jpm.min(jmm_row);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = factorial(jpm - k) * factorial(k) * factorial(diff + k) * factorial(jmm_row - k);
        let sign = if (diff + k) % 2 == 0 { 1.0 } else { -1.0 };
        let cos_pow = tj + (tm - tmp) / 2 - 2 * k;
        let sin_pow = diff + 2 * k;
        sum += sign * c.powi(cos_pow) * s.powi(sin_pow) / denom;
    }
    prefactor * sum
}

/// Generalized Laguerre polynomial `L_n^α(x)` by upward recurrence.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = f64::from(k);
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `J_n(x) = (1/2π) ∫_0^{2π} cos(nτ − x sin τ) dτ`; the trapezoid rule on a
    /// periodic analytic integrand converges geometrically once the node count
    /// exceeds `n + x` comfortably.
    fn integral_oracle(n: i32, x: f64) -> f64 {
        let nodes = (2.0 * (f64::from(n.abs()) + x.abs()) + 80.0) as usize;
        let h = 2.0 * PI / nodes as f64;
        let sum: f64 = (0..nodes)
            .map(|i| {
                let t = h * i as f64;
                (f64::from(n) * t - x * t.sin()).cos()
            })
            .sum();
        sum / nodes as f64
    }

    fn series_oracle(n: u32, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..60u32 {
            let mut t = 1.0;
            for i in 1..=k {
                t *= -(x / 2.0) * (x / 2.0) / f64::from(i) / f64::from(n + i);
            }
            for i in 1..=n {
                t *= (x / 2.0) / f64::from(i);
            }
            sum += t;
        }
        sum
    }

    #[test]
    fn bessel_trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert!((bessel_j(1, 1e-8).unwrap() - 5e-9).abs() < 1e-12);
        assert!((bessel_j(0, 1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 10.0).unwrap() - 0.043_472_746_168_861_44).abs() < 1e-14);
    }

    #[test]
    fn bessel_first_zero_of_j0() {
        // bisection on the ascending-series oracle brackets the root
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if series_oracle(0, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(lo > 2.40 && lo < 2.41);
        assert!(bessel_j(0, lo).unwrap().abs() < 1e-13);
    }

    #[test]
    fn bessel_matches_integral_oracle_up_to_50() {
        let mut worst: f64 = 0.0;
        for n in -12..=64 {
            for i in 0..=250 {
                let x = 0.2 * f64::from(i);
                let err = (bessel_j(n, x).unwrap() - integral_oracle(n, x)).abs();
                worst = worst.max(err);
            }
        }
        assert!(worst < 1e-12, "worst absolute error {worst}");
    }

    #[test]
    fn bessel_large_arguments_relative_to_envelope() {
        for &n in &[0, 1, 7, 30, 64] {
            for &x in &[120.0, 999.5, 4321.0, 9999.0] {
                let env = (2.0 / (PI * x)).sqrt();
                let err = (bessel_j(n, x).unwrap() - integral_oracle(n, x)).abs() / env;
                assert!(err < 1e-10, "n={n} x={x} err={err}");
            }
        }
    }

    #[test]
    fn miller_and_hankel_agree_at_the_switch() {
        for &n in &[0u32, 2, 17, 64] {
            for &x in &[1.0e4, 1.2e4, 3.0e4] {
                let env = (2.0 / (PI * x)).sqrt();
                let diff = (miller(n, x) - hankel_asymptotic(n, x)).abs() / env;
                assert!(diff < 1e-10, "n={n} x={x} diff={diff}");
            }
        }
        let x = 9.0e5;
        assert!((bessel_j(0, x).unwrap() - hankel_asymptotic(0, x)).abs() == 0.0);
    }

    #[test]
    fn bessel_negative_order_and_argument() {
        for n in 0..10 {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(bessel_j(-n, 3.3).unwrap(), s * bessel_j(n, 3.3).unwrap());
            assert_eq!(bessel_j(n, -3.3).unwrap(), s * bessel_j(n, 3.3).unwrap());
        }
    }

    #[test]
    fn bessel_domain_errors() {
        assert!(bessel_j(65, 1.0).is_err());
        assert!(bessel_j(0, 2e6).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
    }

    #[test]
    fn first_maximum_of_j1() {
        let (x, v) = bessel_first_maximum(1).unwrap();
        assert!((x - 1.841_183_781_340_659).abs() < 1e-6);
        assert!((v - 0.581_865_224_281_596).abs() < 1e-12);
        let (x2, _) = bessel_first_maximum(-2).unwrap();
        assert!((x2 - 3.054_236_928_227_14).abs() < 1e-6);
        assert!(bessel_first_maximum(0).is_err());
    }

    proptest! {
        #[test]
        fn bessel_recurrence(n in -10i32..=10, x in 0.1f64..50.0) {
            let lhs = jn(n - 1, x) + jn(n + 1, x);
            let rhs = 2.0 * f64::from(n) / x * jn(n, x);
            let scale = jn(n - 1, x).abs().max(jn(n + 1, x).abs()).max(1e-300);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * scale, "n={} x={} lhs={} rhs={}", n, x, lhs, rhs);
        }
    }

    fn half(v: f64) -> HalfInt {
        HalfInt::from_f64(v).unwrap()
    }

    #[test]
    fn wigner_identity_and_closed_form() {
        let one = HalfInt::from_int(1);
        assert_eq!(wigner_small_d(one, one, one, 0.0).unwrap(), 1.0);
        let t = 0.3;
        let d = wigner_small_d(one, one, one, t).unwrap();
        assert!((d - (1.0 + t.cos()) / 2.0).abs() < 1e-14);
        let d10 = wigner_small_d(one, one, HalfInt::ZERO, t).unwrap();
        assert!((d10 + t.sin() / 2f64.sqrt()).abs() < 1e-14);
        let dm = wigner_small_d(one, one, one.neg(), t).unwrap();
        assert!((dm - (1.0 - t.cos()) / 2.0).abs() < 1e-14);
        let dh = wigner_small_d(half(0.5), half(0.5), half(-0.5), t).unwrap();
        assert!((dh + (t / 2.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn wigner_quadrupole_closed_form() {
        let two = HalfInt::from_int(2);
        for &t in &[0.1, 0.7, 2.0] {
            let d21 = wigner_small_d(two, HalfInt::from_int(2), HalfInt::from_int(1), t).unwrap();
            assert!((d21 + (1.0 + t.cos()) * t.sin() / 2.0).abs() < 1e-14);
            let d00 = wigner_small_d(two, HalfInt::ZERO, HalfInt::ZERO, t).unwrap();
            assert!((d00 - (3.0 * t.cos().powi(2) - 1.0) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wigner_row_normalization_j2() {
        let two = HalfInt::from_int(2);
        for m in -2..=2 {
            let s: f64 = (-2..=2)
                .map(|mf| wigner_small_d(two, HalfInt::from_int(mf), HalfInt::from_int(m), 0.7).unwrap().powi(2))
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_zero_angle_is_delta() {
        for tj in 0..=6 {
            let j = HalfInt::from_twice(tj);
            for a in (-tj..=tj).step_by(2) {
                for b in (-tj..=tj).step_by(2) {
                    let d = wigner_small_d(j, HalfInt::from_twice(a), HalfInt::from_twice(b), 0.0).unwrap();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((d - expect).abs() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn wigner_rejects_inconsistent_triples() {
        let one = HalfInt::from_int(1);
        assert!(wigner_small_d(one, half(0.5), half(0.5), 0.1).is_err());
        assert!(wigner_small_d(one, HalfInt::from_int(2), one, 0.1).is_err());
        assert!(wigner_small_d(HalfInt::from_int(-1), one, one, 0.1).is_err());
    }

    #[test]
    fn wigner_mirror_is_exact() {
        for tj in 0..=6 {
            let j = HalfInt::from_twice(tj);
            for a in (-tj..=tj).step_by(2) {
                for b in (-tj..=tj).step_by(2) {
                    let d = wigner_small_d(j, HalfInt::from_twice(a), HalfInt::from_twice(b), 0.37).unwrap();
                    let dm = wigner_small_d(j, HalfInt::from_twice(-a), HalfInt::from_twice(-b), 0.37).unwrap();
                    assert_eq!(d.abs(), dm.abs());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn wigner_unitarity(tj in 0i32..=6, col in 0i32..=6, theta in 0.0f64..PI) {
            prop_assume!(col <= tj);
            let j = HalfInt::from_twice(tj);
            let m = HalfInt::from_twice(tj - 2 * col);
            let s: f64 = (0..=tj)
                .map(|r| wigner_small_d(j, HalfInt::from_twice(tj - 2 * r), m, theta).unwrap().powi(2))
                .sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.8;
        assert_eq!(laguerre(0, 2.0, x), 1.0);
        assert!((laguerre(1, 2.0, x) - (3.0 - x)).abs() < 1e-15);
        assert!((laguerre(2, 1.0, x) - (x * x / 2.0 - 3.0 * x + 3.0)).abs() < 1e-14);
    }

    #[test]
    fn half_int_parsing() {
        assert_eq!(half(-1.5).twice(), -3);
        assert_eq!(half(2.0).to_int(), Some(2));
        assert!(HalfInt::from_f64(0.25).is_err());
        assert_eq!(format!("{}", half(-1.5)), "-3/2");
    }
}
