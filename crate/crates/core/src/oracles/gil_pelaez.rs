use std::cell::RefCell;
use std::f64::consts::PI;

use crate::cgf::Cgf;
use crate::error::{Error, Result};
use crate::quad::{integrate_partial, QuadratureSettings};

/// Tolerances and limits for [`gil_pelaez_ccdf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of frequency panels.
    pub max_panels: usize,
    /// Optional hard upper frequency; by default the integration runs until
    /// the panel contributions fall below tolerance.
    pub tail_cut: Option<f64>,
}

impl Default for InversionSettings {
    fn default() -> Self {
        InversionSettings { abs_tol: 1e-9, rel_tol: 1e-7, max_panels: 1 << 14, tail_cut: None }
    }
}

impl InversionSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::config("inversion", "tolerances must be positive"));
        }
        if self.max_panels < 16 {
            return Err(Error::config("max_panels", format!("must be at least 16, got {}", self.max_panels)));
        }
        if let Some(cut) = self.tail_cut {
            if !(cut > 0.0) {
                return Err(Error::config("tail_cut", format!("must be positive, got {cut}")));
            }
        }
        Ok(())
    }
}

/// Result of a characteristic-function inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    /// Estimated absolute error, never below `abs_tol`.
    pub err_est: f64,
    /// `|value| < 10·err_est`: the value is not resolved by the inversion.
    pub unstable: bool,
    pub panels: usize,
}

/// Shanks transform of a sequence of partial sums by Wynn's epsilon
/// algorithm: the newest entry of the highest even column, and its change
/// from the newest entry of the even column below it.
fn wynn_epsilon(sums: &[f64]) -> Option<(f64, f64)> {
    if sums.len() < 3 {
        return None;
    }
    let mut below: Vec<f64> = vec![0.0; sums.len() + 1];
    let mut col: Vec<f64> = sums.to_vec();
    let mut evens = vec![*sums.last()?];
    let mut k = 0;
    while col.len() > 1 {
        let mut next = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            let diff = col[i + 1] - col[i];
            if diff == 0.0 || !diff.is_finite() {
                break;
            }
            next.push(below[i + 1] + 1.0 / diff);
        }
        if next.len() != col.len() - 1 {
            break;
        }
        below = col;
        col = next;
        k += 1;
        if k % 2 == 0 {
            evens.push(*col.last()?);
        }
    }
    let n = evens.len();
    let best = evens[n - 1];
    let change = if n >= 2 { (best - evens[n - 2]).abs() } else { f64::INFINITY };
    Some((best, change))
}

/// Survival function `Pr(V > ω)` from the characteristic function,
///
/// `1/2 + (1/π) ∫₀^∞ Im{exp(K(ju) − juω)}/u du`,
///
/// integrated panel by panel. Panels double in width from a start set by the
/// standard deviation; when `ω ≠ 0` they are capped at the half-period
/// `π/|ω|` and the resulting alternating series is accelerated with Wynn's
/// epsilon algorithm. Near `u = 0` the integrand is replaced by its limit
/// `κ₁ − ω`.
///
/// Returns [`Error::Inversion`] with the partial estimate if the panel budget
/// runs out before convergence.
pub fn gil_pelaez_ccdf(cgf: &dyn Cgf, omega: f64, s: &InversionSettings) -> Result<Inversion> {
    s.validate()?;
    let k1 = cgf.cumulant(1)?;
    let sd = cgf.cumulant(2)?.sqrt();
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(Error::domain("gil_pelaez_ccdf", "variance must be positive and finite"));
    }
    let u_small = 1e-7 / sd;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut integrand = |u: f64| -> f64 {
        if u < u_small {
            return k1 - omega;
        }
        match cgf.char_exponent(u) {
            Ok(k) => {
                let z = num_complex::Complex64::new(k.re, k.im - u * omega);
                (z.re.exp() * z.im.sin()) / u
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };

    let period = if omega != 0.0 { PI / omega.abs() } else { f64::INFINITY };
    let mut width = (0.25 / sd).min(period);
    let quad = QuadratureSettings { abs_tol: 0.05 * PI * s.abs_tol, rel_tol: 0.1 * s.rel_tol, max_depth: 40, max_intervals: 2000 };
    let tol = |v: f64| s.abs_tol.max(s.rel_tol * v.abs());

    let mut lo = 0.0;
    let mut total = 0.0;
    let mut quad_err = 0.0;
    let mut sums: Vec<f64> = Vec::new();
    let mut small_run = 0;
    let mut panels = 0;
    let mut tail_err = f64::INFINITY;
    let mut prev_limit = None;
    while panels < s.max_panels {
        let mut hi = lo + width;
        if period.is_finite() {
            let mut next = ((lo / period).floor() + 1.0) * period;
            if next - lo < 1e-9 * period {
                next += period;
            }
            if hi >= next || next - hi < 1e-9 * period {
                hi = next;
            }
        }
        let mut last = false;
        if let Some(cut) = s.tail_cut {
            if hi >= cut {
                hi = cut;
                last = true;
            }
        }
        let est = integrate_partial(&mut integrand, lo, hi, &quad);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        panels += 1;
        total += est.value;
        quad_err += est.error;
        let value = 0.5 + total / PI;
        if last {
            tail_err = 0.0;
            break;
        }
        let at_period = period.is_finite() && hi - lo >= period * (1.0 - 1e-9);
        if at_period {
            sums.push(value);
        }
        // A panel at least as wide as everything before it bounds the
        // remaining tail of a decaying integrand by about twice its size.
        let contribution = (est.value / PI).abs();
        if contribution <= 0.5 * tol(value) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 2 {
            tail_err = 2.0 * contribution;
            break;
        }
        // The extrapolated limit must also agree with the one from two
        // fewer terms: early panels are far from a regular alternating
        // series and a single table can look converged when it is not.
        if at_period && sums.len() >= 8 && sums.len() % 2 == 0 {
            if let Some((v, change)) = wynn_epsilon(&sums[sums.len().saturating_sub(24)..]) {
                let drift = prev_limit.map_or(f64::INFINITY, |p: f64| (v - p).abs());
                if change.max(drift) <= 0.1 * tol(v) {
                    total = (v - 0.5) * PI;
                    tail_err = change.max(drift);
                    break;
                }
                prev_limit = Some(v);
            }
        }
        lo = hi;
        width = (2.0 * width).min(period);
    }
    let value = 0.5 + total / PI;
    let err_est = (quad_err / PI + tail_err).max(s.abs_tol);
    if !tail_err.is_finite() {
        return Err(Error::Inversion { partial: value, err_est: quad_err / PI });
    }
    Ok(Inversion { value, err_est, unstable: value.abs() < 10.0 * err_est, panels })
}

/// Distribution function `Pr(V ≤ ω)` by inversion; see [`gil_pelaez_ccdf`].
pub fn gil_pelaez_cdf(cgf: &dyn Cgf, omega: f64, s: &InversionSettings) -> Result<Inversion> {
    let r = gil_pelaez_ccdf(cgf, omega, s)?;
    let value = 1.0 - r.value;
    Ok(Inversion { value, unstable: value.abs() < 10.0 * r.err_est, ..r })
}
