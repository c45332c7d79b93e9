//! Deterministic-gain (no fading) shot noise: incomplete-gamma closed forms
//! for the decaying side `exp(−τ r^{-α})` and a steepest-descent evaluation
//! of the oscillatory characteristic exponent.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use super::ppp::ppp_nofading_pair;
use super::{check_order, omega_cgf, OmegaCgf, OmegaSpec, PppGeometry};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadratureSettings};
use crate::specfun::{lower_inc_gamma, upper_inc_gamma};

/// Above this dimensionless frequency the characteristic exponent is
/// evaluated along steepest-descent paths instead of the real axis.
pub(super) const STEEPEST_DESCENT_MIN: f64 = 20.0;

/// Below this value of `τ lo^{-α}` the closed forms are replaced by their
/// Taylor expansion in `τ`.
const SMALL_TAU: f64 = 1e-6;

/// `∫_{x1}^{x2} x^{b−1} e^{−x} dx` for `b > 0` and `0 ≤ x1 ≤ x2`, split at
/// `x = b` so each half is a difference of like-sided incomplete gammas.
fn inc_gamma_interval(b: f64, x1: f64, x2: f64) -> Result<f64> {
    let pivot = b.max(1.0);
    let mut total = 0.0;
    if x1 < pivot {
        let top = x2.min(pivot);
        total += lower_inc_gamma(b, top)? - lower_inc_gamma(b, x1)?;
    }
    if x2 > pivot {
        let bottom = x1.max(pivot);
        total += upper_inc_gamma(b, bottom)? - upper_inc_gamma(b, x2)?;
    }
    Ok(total)
}

/// `∫_lo^hi r^{e-1} dr` for `e < 0`, allowing `hi = ∞`.
fn power_integral(e: f64, lo: f64, hi: f64) -> f64 {
    let tail = if hi.is_finite() { hi.powf(e) } else { 0.0 };
    (lo.powf(e) - tail) / -e
}

/// `2πλ ∫_lo^hi (exp(−τ r^{-α}) − 1) r dr` for `τ > 0`.
pub(super) fn annulus_value(lam: f64, lo: f64, hi: f64, alpha: f64, tau: f64) -> Result<f64> {
    let x_lo = tau * lo.powf(-alpha);
    if x_lo < SMALL_TAU {
        let mut sum = 0.0;
        let mut coef = 1.0;
        for k in 1..=3 {
            coef *= -tau / k as f64;
            sum += coef * power_integral(2.0 - k as f64 * alpha, lo, hi);
        }
        return Ok(2.0 * PI * lam * sum);
    }
    let x_hi = if hi.is_finite() { tau * hi.powf(-alpha) } else { 0.0 };
    let edge = |r: f64, x: f64| if r.is_finite() { r * r * (-x).exp_m1() } else { 0.0 };
    let b = 1.0 - 2.0 / alpha;
    let ig = inc_gamma_interval(b, x_hi, x_lo)?;
    Ok(2.0 * PI * lam * (0.5 * (edge(hi, x_hi) - edge(lo, x_lo)) - 0.5 * tau.powf(2.0 / alpha) * ig))
}

/// `n`-th derivative of the shot-noise CGF at `t = −τ/P`:
/// `2πλ Pⁿ ∫_lo^hi r^{1−nα} exp(−τ r^{-α}) dr`.
pub(super) fn annulus_deriv(n: usize, lam: f64, lo: f64, hi: f64, alpha: f64, power: f64, tau: f64) -> Result<f64> {
    let nf = n as f64;
    let x_lo = tau * lo.powf(-alpha);
    let integral = if x_lo < SMALL_TAU {
        let mut sum = 0.0;
        let mut coef = 1.0;
        for k in 0..=2 {
            if k > 0 {
                coef *= -tau / k as f64;
            }
            sum += coef * power_integral(2.0 - (nf + k as f64) * alpha, lo, hi);
        }
        sum
    } else {
        let x_hi = if hi.is_finite() { tau * hi.powf(-alpha) } else { 0.0 };
        let b = nf - 2.0 / alpha;
        tau.powf(2.0 / alpha - nf) / alpha * inc_gamma_interval(b, x_hi, x_lo)?
    };
    Ok(2.0 * PI * lam * power.powi(n as i32) * integral)
}

/// `∫_c^{∞} x^{−1−2/α} e^{jyx} dx` (`c > 0`, `y > 0`) along the vertical
/// path `x = c + jw/y`, on which the oscillation turns into decay.
fn vertical_path(c: f64, y: f64, alpha: f64, quad: &QuadratureSettings) -> Result<Complex64> {
    let p = -1.0 - 2.0 / alpha;
    let f = |w: f64| Complex64::new(c, w / y).powf(p) * (-w).exp();
    let scale = c.powf(p);
    let settings = QuadratureSettings { abs_tol: quad.abs_tol * scale, ..*quad };
    let mut total = Complex64::new(0.0, 0.0);
    // Resolve the near-singular start when c·y is small.
    let knee = (c * y).clamp(1e-12, 1.0);
    for (lo, hi) in [(0.0, knee), (knee, 1.0), (1.0, 60.0)] {
        if hi > lo {
            total += integrate(f, lo, hi, &settings)?.value;
        }
    }
    Ok(Complex64::new(0.0, 1.0 / y) * Complex64::new(0.0, y * c).exp() * total)
}

/// `∫_1^{ρmax} (exp(jy ρ^{-α}) − 1) ρ dρ` for `y > 0`, `ρmax` possibly infinite.
pub(super) fn oscillatory_char(y: f64, rho_max: f64, alpha: f64, quad: &QuadratureSettings) -> Result<Complex64> {
    let beta = 2.0 / alpha;
    let j1 = vertical_path(1.0, y, alpha, quad)?;
    let inner = if rho_max.is_finite() {
        let x_min = rho_max.powf(-alpha);
        let j0 = vertical_path(x_min, y, alpha, quad)?;
        j0 - j1 - (x_min.powf(-beta) - 1.0) / beta
    } else {
        // ∫_0^∞ (e^{jyx} − 1) x^{−1−β} dx = Γ(−β)(−jy)^β.
        let stable = Complex64::from_polar(gamma(-beta) * y.powf(beta), -PI * beta / 2.0);
        stable - j1 + 1.0 / beta
    };
    Ok(inner / alpha)
}

/// `n`-th derivative in `t` of `2πλ ∫_R^∞ (exp(−tθP r^{-α}) − 1) r dr`, for
/// `t > 0`:
///
/// `(−1)ⁿ (2πλ/α) (tθP)^{2/α} t^{−n} γ(n − 2/α, tθP R^{-α})`.
pub fn nofading_tail_deriv(n: usize, t: f64, lam: f64, r_coop: f64, alpha: f64, power: f64, theta: f64) -> Result<f64> {
    check_order(n)?;
    if !(t > 0.0) {
        return Err(Error::domain("nofading_tail_deriv", format!("t must be positive, got {t}")));
    }
    let tau = t * theta * power;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let g = lower_inc_gamma(n as f64 - 2.0 / alpha, tau * r_coop.powf(-alpha))?;
    Ok(sign * 2.0 * PI * lam / alpha * tau.powf(2.0 / alpha) / t.powi(n as i32) * g)
}

/// CGF of `Ω = θY − X` for the cooperative model without fading.
pub fn nofading_cgf(geom: &PppGeometry, theta: f64, quad: QuadratureSettings) -> Result<OmegaCgf> {
    let (signal, interference) = ppp_nofading_pair(geom, quad)?;
    omega_cgf(OmegaSpec { signal, interference, theta })
}
