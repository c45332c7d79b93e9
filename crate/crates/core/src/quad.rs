//! Globally adaptive Gauss-Kronrod (7/15) quadrature over finite intervals.
//!
//! The integrator is generic over the value type so the same code serves
//! real CGF integrals and complex characteristic-exponent integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Values that can be integrated: closed under addition and real scaling,
/// with a norm for error control.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Tolerances and refinement limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
    /// Hard cap on the number of live subintervals.
    pub max_intervals: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { abs_tol: 1e-12, rel_tol: 1e-10, max_depth: 60, max_intervals: 4000 }
    }
}

impl QuadratureSettings {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSettings { abs_tol, rel_tol, ..Default::default() }
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Segment<T> {
    a: f64,
    b: f64,
    depth: u32,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
///
/// The error uses the QUADPACK scaling of `|K − G|` against the panel's
/// absolute variation, which is far less pessimistic on smooth integrands.
pub fn gk15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut pairs = [(fc, fc); 7];
    for (j, (&x, &w)) in XGK[..7].iter().zip(WGK[..7].iter()).enumerate() {
        let dx = half * x;
        let (lo, hi) = (f(center - dx), f(center + dx));
        pairs[j] = (lo, hi);
        kronrod = kronrod + (lo + hi) * w;
        if j % 2 == 1 {
            gauss = gauss + (lo + hi) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for (j, &(lo, hi)) in pairs.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).norm() + (hi - mean).norm());
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).norm();
    if asc > 0.0 && err > 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * value.norm();
    (value, err.max(roundoff))
}

/// Adaptive integration of `f` over `[a, b]` that always returns its best
/// estimate; `converged` reports whether the tolerance was met.
pub fn integrate_partial<T, F>(mut f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Estimate<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if a == b {
        return Estimate { value: T::zero(), error: 0.0, evaluations: 0, converged: true };
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut total = v0;
    let mut total_err = e0;
    let mut heap = BinaryHeap::new();
    let mut frozen_value = T::zero();
    let mut frozen_err = 0.0;
    heap.push(Segment { a, b, depth: 0, value: v0, error: e0 });

    let tolerance = |v: T| settings.abs_tol.max(settings.rel_tol * v.norm());
    loop {
        if !total.is_finite_value() {
            break;
        }
        if total_err <= tolerance(total) {
            break;
        }
        if heap.len() >= settings.max_intervals {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        let tiny = (seg.b - seg.a).abs() <= 64.0 * f64::EPSILON * seg.a.abs().max(seg.b.abs());
        if seg.depth >= settings.max_depth || tiny {
            frozen_value = frozen_value + seg.value;
            frozen_err += seg.error;
            continue;
        }
        let mid = 0.5 * (seg.a + seg.b);
        let (vl, el) = gk15(&mut f, seg.a, mid);
        let (vr, er) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        total = total - seg.value + vl + vr;
        total_err += el + er - seg.error;
        heap.push(Segment { a: seg.a, b: mid, depth: seg.depth + 1, value: vl, error: el });
        heap.push(Segment { a: mid, b: seg.b, depth: seg.depth + 1, value: vr, error: er });
    }

    // Re-sum from the segments to shed the drift of incremental updates.
    let mut value = frozen_value;
    let mut error = frozen_err;
    for seg in heap.iter() {
        value = value + seg.value;
        error += seg.error;
    }
    let converged = value.is_finite_value() && error <= tolerance(value);
    Estimate { value, error, evaluations, converged }
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// Returns [`Error::Quadrature`] with the achieved error estimate when the
/// tolerance cannot be met within the refinement limits.
pub fn integrate<T, F>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let est = integrate_partial(f, a, b, settings);
    if !est.value.is_finite_value() {
        return Err(Error::NonFinite("quadrature"));
    }
    if est.converged {
        Ok(est)
    } else {
        Err(Error::Quadrature {
            achieved: est.error,
            tolerance: settings.abs_tol.max(settings.rel_tol * est.value.norm()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_exact_to_degree_22() {
        for k in 0..=22 {
            let (v, _) = gk15(&mut |x: f64| x.powi(k), -1.0, 1.0);
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((v - exact).abs() < 1e-14, "degree {k}: {v} vs {exact}");
        }
    }

    #[test]
    fn smooth_integrals() {
        let s = QuadratureSettings::default();
        let r = integrate(|x: f64| x.exp(), 0.0, 1.0, &s).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-13);
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &s).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let s = QuadratureSettings::with_tolerances(1e-12, 1e-9);
        let r = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, &s).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn complex_integrand() {
        let s = QuadratureSettings::default();
        let r = integrate(|x: f64| Complex64::new(0.0, x).exp(), 0.0, 1.0, &s).unwrap();
        let exact = Complex64::new(1f64.sin(), 1.0 - 1f64.cos());
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn reversed_limits_negate() {
        let s = QuadratureSettings::default();
        let f = |x: f64| x * x;
        let fwd = integrate(f, 0.0, 2.0, &s).unwrap().value;
        let rev = integrate(f, 2.0, 0.0, &s).unwrap().value;
        assert!((fwd + rev).abs() < 1e-14);
    }

    #[test]
    fn unreachable_tolerance_reports_error() {
        let s = QuadratureSettings { abs_tol: 1e-300, rel_tol: 0.0, max_depth: 3, max_intervals: 8 };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &s);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
