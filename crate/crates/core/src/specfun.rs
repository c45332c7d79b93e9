//! Special functions: normal law, incomplete gamma functions of real
//! (possibly negative) order, the modified Bessel function K₁ and the NIG
//! density and distribution function.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;
use statrs::function::gamma::{gamma, gamma_li, gamma_ui};

use crate::error::{Error, Result};
use crate::quad::{integrate_partial, QuadratureSettings};
use crate::spa::NigParams;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - Φ(z)`, accurate in the upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

fn is_nonpositive_integer(a: f64) -> bool {
    a <= 0.0 && a.fract() == 0.0
}

/// Exponential integral E₁(z) = Γ(0, z) for 0 < z < 1 by its power series.
fn e1_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 1..200 {
        term *= -z / n as f64;
        let add = term / n as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Legendre continued fraction for Γ(a, z), evaluated with modified Lentz.
/// Converges for any real `a` once `z` is moderately large.
fn upper_gamma_cf(a: f64, z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * z.ln() - z).exp() * h
}

/// Upper incomplete gamma function Γ(a, z) = ∫_z^∞ x^{a−1} e^{−x} dx.
///
/// Negative orders are allowed for `z > 0`. Below `z = 1` they are reduced
/// to an order in `(0, 1]` (or to E₁ for integer orders) through
/// Γ(a+1, z) = aΓ(a, z) + zᵃe⁻ᶻ.
pub fn upper_inc_gamma(a: f64, z: f64) -> Result<f64> {
    if !a.is_finite() || z.is_nan() {
        return Err(Error::domain("upper_inc_gamma", format!("a = {a}, z = {z}")));
    }
    if z < 0.0 || (z == 0.0 && a <= 0.0) {
        return Err(Error::domain("upper_inc_gamma", format!("divergent for a = {a}, z = {z}")));
    }
    if z == f64::INFINITY {
        return Ok(0.0);
    }
    let value = if z == 0.0 {
        gamma(a)
    } else if a > 0.0 {
        if z < 1.0 || z <= a {
            gamma_ui(a, z)
        } else {
            upper_gamma_cf(a, z)
        }
    } else if z >= 1.0 {
        upper_gamma_cf(a, z)
    } else {
        let (mut order, mut value) = if is_nonpositive_integer(a) {
            (0.0, e1_series(z))
        } else {
            let base = a - a.floor();
            (base, gamma_ui(base, z))
        };
        let lnz = z.ln();
        while order - a > 0.5 {
            order -= 1.0;
            let boundary = (order * lnz - z).exp();
            if boundary.is_infinite() {
                return Err(Error::Overflow { func: "upper_inc_gamma" });
            }
            value = (value - boundary) / order;
        }
        value
    };
    if value.is_nan() {
        return Err(Error::domain("upper_inc_gamma", format!("a = {a}, z = {z}")));
    }
    if value.is_infinite() {
        return Err(Error::Overflow { func: "upper_inc_gamma" });
    }
    Ok(value)
}

/// Lower incomplete gamma function γ(a, z) = ∫_0^z x^{a−1} e^{−x} dx, a > 0.
pub fn lower_inc_gamma(a: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("lower_inc_gamma", format!("order must be positive, got {a}")));
    }
    if !(z >= 0.0) {
        return Err(Error::domain("lower_inc_gamma", format!("z = {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(gamma(a));
    }
    let v = gamma_li(a, z);
    if v.is_infinite() {
        return Err(Error::Overflow { func: "lower_inc_gamma" });
    }
    Ok(v)
}

/// Generalized incomplete gamma function Γ(a, z0, z1) = Γ(a, z0) − Γ(a, z1).
pub fn generalized_inc_gamma(a: f64, z0: f64, z1: f64) -> Result<f64> {
    if z0 == z1 {
        return Ok(0.0);
    }
    Ok(upper_inc_gamma(a, z0)? - upper_inc_gamma(a, z1)?)
}

/// Small-argument series for K₁(x), x ≤ 2.
fn k1_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0; // y^k / (k! (k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // ψ(k+1)
    let mut i1_sum = 0.0;
    let mut psi_sum = 0.0;
    for k in 0..60 {
        let psi_k2 = psi_k1 + 1.0 / (k as f64 + 1.0);
        i1_sum += term;
        psi_sum += (psi_k1 + psi_k2) * term;
        psi_k1 = psi_k2;
        term *= y / ((k as f64 + 1.0) * (k as f64 + 2.0));
        if term < 1e-18 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * psi_sum
}

/// Steed's continued fraction for eˣK₁(x), x ≥ 2.
fn k1_scaled_cf(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    k0 * (x + 0.5 - h) / x
}

/// Exponentially scaled Bessel function eˣK₁(x), x > 0.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("bessel_k1", format!("x = {x}")));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(if x <= 2.0 { k1_series(x) * x.exp() } else { k1_scaled_cf(x) })
}

/// Modified Bessel function of the second kind K₁(x), x > 0.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("bessel_k1", format!("x = {x}")));
    }
    if x <= 2.0 {
        Ok(k1_series(x))
    } else {
        Ok(k1_scaled_cf(x) * (-x).exp())
    }
}

/// Natural log of the NIG density, arranged so that no factor over- or
/// underflows on its own.
pub fn nig_log_pdf(z: f64, p: &NigParams) -> Result<f64> {
    let (alpha, beta, mu, delta) = (p.alpha, p.beta, p.mu, p.delta);
    let gamma = p.gamma();
    let y = z - mu;
    let w = y / delta;
    let q = (1.0 + w * w).sqrt();
    let gamma_minus_alpha = -beta * beta / (gamma + alpha);
    let q_minus_1 = w * w / (1.0 + q);
    let exponent = delta * gamma_minus_alpha + beta * y - alpha * delta * q_minus_1;
    let k1s = bessel_k1_scaled(alpha * delta * q)?;
    Ok((alpha / (PI * q)).ln() + exponent + k1s.ln())
}

/// NIG density with tail α, asymmetry β, location μ and scale δ.
pub fn nig_pdf(z: f64, p: &NigParams) -> Result<f64> {
    p.validate()?;
    Ok(nig_log_pdf(z, p)?.exp())
}

/// Mass of the NIG density from `z` outward (`dir = 1.0` upper tail,
/// `−1.0` lower tail).
///
/// The integral runs in pieces that start at the smaller of `δ` and the
/// standard deviation and grow geometrically. It stops once a piece beyond
/// the mode adds a negligible fraction, so the tail is relatively accurate
/// however far out `z` lies.
fn nig_tail_mass(z: f64, p: &NigParams, dir: f64) -> Result<f64> {
    let settings = QuadratureSettings { abs_tol: 1e-300, rel_tol: 1e-13, ..Default::default() };
    let gamma = p.gamma();
    let sd = (p.delta * p.alpha * p.alpha / gamma.powi(3)).sqrt();
    let pdf = |x: f64| nig_log_pdf(x, p).map(f64::exp).unwrap_or(0.0);
    let mut h = 0.5 * p.delta.min(sd);
    let mut lo = z;
    let mut total = 0.0;
    for _ in 0..600 {
        let hi = lo + dir * h;
        let piece = integrate_partial(pdf, lo.min(hi), lo.max(hi), &settings).value;
        total += piece;
        let (f_lo, f_hi) = (pdf(lo), pdf(hi));
        if f_hi == 0.0 || (f_hi < f_lo && piece <= 1e-16 * total) {
            return Ok(total);
        }
        lo = hi;
        h *= 1.5;
    }
    Err(Error::NonFinite("nig tail integration"))
}

/// NIG distribution function by adaptive quadrature of the density.
///
/// The tail on the far side of `z` from the mean is integrated, the other
/// probability is its complement.
pub fn nig_cdf(z: f64, p: &NigParams) -> Result<f64> {
    Ok(nig_cdf_sf(z, p)?.0)
}

/// NIG survival function `1 − F(z)`, accurate in the upper tail.
pub fn nig_sf(z: f64, p: &NigParams) -> Result<f64> {
    Ok(nig_cdf_sf(z, p)?.1)
}

/// Distribution and survival function together.
pub fn nig_cdf_sf(z: f64, p: &NigParams) -> Result<(f64, f64)> {
    p.validate()?;
    if z.is_nan() {
        return Err(Error::domain("nig_cdf", "z is NaN"));
    }
    let mean = p.mu + p.delta * p.beta / p.gamma();
    if z <= mean {
        let mass = nig_tail_mass(z, p, -1.0)?.clamp(0.0, 1.0);
        Ok((mass, 1.0 - mass))
    } else {
        let mass = nig_tail_mass(z, p, 1.0)?.clamp(0.0, 1.0);
        Ok((1.0 - mass, mass))
    }
}
