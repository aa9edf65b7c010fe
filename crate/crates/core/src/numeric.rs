//! Quadrature, bracketed root finding and 1-D maximization.
//!
//! The adaptive integrator is a global-subdivision Gauss–Kronrod (7/15) scheme
//! in the style of QUADPACK's QAG. It integrates vector-valued integrands so
//! that several overlaps sharing one set of function evaluations converge
//! together. Two-dimensional integrals are iterated 1-D integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the 7-point rule embedded at the odd Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Convergence controls for [`integrate_vec`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    /// Largest component error relative to that component's tolerance share.
    priority: f64,
    seq: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority).then_with(|| other.seq.cmp(&self.seq))
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> (Vec<f64>, Vec<f64>)
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];

    f(center, buf);
    for d in 0..dim {
        k[d] = WGK[7] * buf[d];
        g[d] = WG[3] * buf[d];
    }
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        f(center - dx, buf);
        let lo: Vec<f64> = buf[..dim].to_vec();
        f(center + dx, buf);
        for d in 0..dim {
            let s = lo[d] + buf[d];
            k[d] += wk * s;
            if j % 2 == 1 {
                g[d] += WG[j / 2] * s;
            }
        }
    }
    let value: Vec<f64> = k.iter().map(|v| v * half).collect();
    let error: Vec<f64> = k.iter().zip(&g).map(|(kv, gv)| ((kv - gv) * half).abs()).collect();
    (value, error)
}

/// Integrates a vector-valued function over `[a, b]`.
///
/// `f(x, out)` writes `dim` components into `out`. Convergence requires every
/// component error to satisfy `err ≤ max(rel_tol·|I|, abs_tol)`.
pub fn integrate_vec<F>(mut f: F, a: f64, b: f64, dim: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]),
{
    integrate_vec_with_breaks(&mut f, &[a, b], dim, opts)
}

/// As [`integrate_vec`] but starting from the given strictly increasing break points.
pub fn integrate_vec_with_breaks<F>(f: &mut F, breaks: &[f64], dim: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]),
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::Quadrature(format!("invalid integration limits {breaks:?}")));
    }
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    let mut seq = 0usize;

    let push = |heap: &mut BinaryHeap<Segment>, a: f64, b: f64, value: Vec<f64>, error: Vec<f64>, seq: usize| {
        let priority = error.iter().cloned().fold(0.0, f64::max);
        heap.push(Segment { a, b, value, error, priority, seq });
    };

    for w in breaks.windows(2) {
        let (v, e) = kronrod(f, w[0], w[1], dim, &mut buf);
        for d in 0..dim {
            total[d] += v[d];
            total_err[d] += e[d];
        }
        push(&mut heap, w[0], w[1], v, e, seq);
        seq += 1;
    }

    let converged = |total: &[f64], err: &[f64]| {
        total.iter().zip(err).all(|(v, e)| *e <= (opts.rel_tol * v.abs()).max(opts.abs_tol))
    };

    while !converged(&total, &total_err) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!(
                "{} intervals exhausted on [{}, {}]; error {:?} vs value {:?}",
                heap.len(),
                breaks[0],
                breaks[breaks.len() - 1],
                total_err,
                total
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature("interval width reached machine precision".into()));
        }
        let (v1, e1) = kronrod(f, worst.a, mid, dim, &mut buf);
        let (v2, e2) = kronrod(f, mid, worst.b, dim, &mut buf);
        for d in 0..dim {
            total[d] += v1[d] + v2[d] - worst.value[d];
            total_err[d] += e1[d] + e2[d] - worst.error[d];
        }
        push(&mut heap, worst.a, mid, v1, e1, seq);
        push(&mut heap, mid, worst.b, v2, e2, seq + 1);
        seq += 2;
    }

    // Re-sum in interval order so the result does not depend on refinement history.
    let mut segments = heap.into_vec();
    segments.sort_by(|l, r| l.a.total_cmp(&r.a));
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    for s in &segments {
        for d in 0..dim {
            value[d] += s.value[d];
            error[d] += s.error[d];
        }
    }
    Ok(QuadResult { value, error, intervals: segments.len() })
}

/// Scalar adaptive integral over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|x, out| out[0] = f(x), a, b, 1, opts)?;
    Ok(r.value[0])
}

/// Iterated 2-D integral over the rectangle `[x0, x1] × [y0, y1]`.
///
/// `f(x, y, out)` writes `dim` components. The inner integrals run at ten
/// times tighter tolerance than the outer one.
pub fn integrate_2d<F>(f: F, x: (f64, f64), y: (f64, f64), dim: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64, f64, &mut [f64]),
{
    let inner_opts = QuadOptions { rel_tol: opts.rel_tol * 0.1, abs_tol: opts.abs_tol * 0.1, ..opts };
    let mut failure: Option<Error> = None;
    let result = integrate_vec(
        |xv, out| {
            if failure.is_some() {
                out.iter_mut().for_each(|o| *o = 0.0);
                return;
            }
            match integrate_vec(|yv, inner| f(xv, yv, inner), y.0, y.1, dim, inner_opts) {
                Ok(r) => out.copy_from_slice(&r.value),
                Err(e) => {
                    failure = Some(e);
                    out.iter_mut().for_each(|o| *o = 0.0);
                }
            }
        },
        x.0,
        x.1,
        dim,
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    result
}

/// Bisection on a sign-changing bracket, to full double precision.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Solver(format!("root not bracketed by [{lo}, {hi}] (f = {flo}, {fhi})")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
///
/// Stops when the bracket is narrower than `rel_tol` times its midpoint.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= rel_tol * (0.5 * (a + b)).abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Dense scan followed by golden-section refinement around the best grid point.
///
/// Returns `None` when the maximum sits on the scan boundary or the function
/// is identically zero there.
pub fn scan_then_refine_max<F>(mut f: F, a: f64, b: f64, points: usize, rel_tol: f64) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let h = (b - a) / points as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=points {
        let v = f(a + h * i as f64);
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 || best.0 == points || !(best.1 > 0.0) {
        return None;
    }
    let lo = a + h * (best.0 - 1) as f64;
    let hi = a + h * (best.0 + 1) as f64;
    Some(golden_section_max(f, lo, hi, rel_tol))
}
